#include "modalpf/model.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "modalpf/errors.hpp"
#include "modalpf/io.hpp"

namespace modalpf {

using json = nlohmann::json;

PolynomialSystem::PolynomialSystem(Eigen::MatrixXd A) : A_(std::move(A)) {
  if (A_.rows() == 0 || A_.rows() != A_.cols()) {
    throw ParseError("linear part must be a nonempty square matrix");
  }
  if (!A_.allFinite()) throw ParseError("linear part contains NaN or Inf");
}

PolynomialSystem& PolynomialSystem::add_term(int k, MultiIndex index, double coeff) {
  if (!std::isfinite(coeff)) throw ParseError("tensor coefficient is NaN or Inf");
  if (index.size() < 2) throw ParseError("tensor terms need order >= 2");
  if (k < 0 || k >= n()) throw ParseError("equation index out of range");
  for (int v : index) {
    if (v < 0 || v >= n()) throw ParseError("state index out of range");
  }
  const int order = static_cast<int>(index.size());
  auto& table = tensors_[order];
  TermKey key{k, canonical(std::move(index))};
  table[key] += coeff;
  return *this;
}

int PolynomialSystem::max_order() const {
  int top = 1;
  for (const auto& [order, table] : tensors_) {
    if (!table.empty()) top = std::max(top, order);
  }
  return top;
}

const SparseTensor& PolynomialSystem::tensor(int order) const {
  static const SparseTensor empty;
  auto it = tensors_.find(order);
  return it == tensors_.end() ? empty : it->second;
}

Eigen::VectorXd PolynomialSystem::evaluate_nonlinear(const Eigen::VectorXd& x) const {
  if (x.size() != n()) throw ParseError("state has wrong dimension");
  if (!x.allFinite()) throw ParseError("state is not finite");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n());
  for (const auto& [order, table] : tensors_) {
    for (const auto& [key, coeff] : table) {
      double mono = coeff;
      for (int v : key.index) mono *= x[v];
      out[key.row] += mono;
    }
  }
  return out;
}

Eigen::VectorXd PolynomialSystem::evaluate_rhs(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = evaluate_nonlinear(x);
  out.noalias() += A_ * x;
  return out;
}

PolynomialSystem PolynomialSystem::with_linear_part(Eigen::MatrixXd A) const {
  if (A.rows() != n() || A.cols() != n()) throw ParseError("replacement matrix has wrong size");
  PolynomialSystem out(std::move(A));
  out.tensors_ = tensors_;
  return out;
}

bool operator==(const PolynomialSystem& a, const PolynomialSystem& b) {
  if (a.n() != b.n() || a.A() != b.A()) return false;
  // Compare ignoring empty tables.
  for (int d = 2; d <= std::max(a.max_order(), b.max_order()); ++d) {
    if (a.tensor(d) != b.tensor(d)) return false;
  }
  return true;
}

PolynomialSystem parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model JSON: ") + e.what());
  }
  try {
    const int n = doc.at("n").get<int>();
    if (n <= 0) throw ParseError("n must be positive");
    const auto& rows = doc.at("A");
    if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
      throw ParseError("A must have n rows");
    }
    Eigen::MatrixXd A(n, n);
    for (int r = 0; r < n; ++r) {
      const auto& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<int>(row.size()) != n) {
        throw ParseError("A row " + std::to_string(r + 1) + " must have n entries");
      }
      for (int c = 0; c < n; ++c) A(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    PolynomialSystem sys(std::move(A));
    if (doc.contains("tensors")) {
      for (const auto& block : doc.at("tensors")) {
        const int order = block.at("order").get<int>();
        if (order < 2) throw ParseError("tensor order must be >= 2");
        for (const auto& e : block.at("entries")) {
          const int k = e.at("k").get<int>() - 1;
          MultiIndex idx;
          for (const auto& v : e.at("index")) idx.push_back(v.get<int>() - 1);
          if (static_cast<int>(idx.size()) != order) {
            throw ParseError("tensor entry index length differs from its order");
          }
          const auto& c = e.at("coeff");
          if (!c.is_number()) throw ParseError("coefficient must be a number");
          sys.add_term(k, std::move(idx), c.get<double>());
        }
      }
    }
    return sys;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model schema error: ") + e.what());
  }
}

PolynomialSystem load_model(const std::string& path) { return parse_model(read_file(path)); }

std::string serialize_model(const PolynomialSystem& sys) {
  json doc;
  doc["n"] = sys.n();
  json A = json::array();
  for (int r = 0; r < sys.n(); ++r) {
    json row = json::array();
    for (int c = 0; c < sys.n(); ++c) row.push_back(sys.A()(r, c));
    A.push_back(row);
  }
  doc["A"] = A;
  json tensors = json::array();
  for (const auto& [order, table] : sys.tensors()) {
    if (table.empty()) continue;
    json entries = json::array();
    for (const auto& [key, coeff] : table) {
      json idx = json::array();
      for (int v : key.index) idx.push_back(v + 1);
      entries.push_back({{"k", key.row + 1}, {"index", idx}, {"coeff", coeff}});
    }
    tensors.push_back({{"order", order}, {"entries", entries}});
  }
  doc["tensors"] = tensors;
  return doc.dump(2);
}

}  // namespace modalpf
