#include "modalpf/pf.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "modalpf/errors.hpp"
#include "modalpf/io.hpp"

namespace modalpf {

using json = nlohmann::json;

namespace {

void check_request(const NormalFormExpansion& expansion, int k, const MultiIndex& tuple) {
  const int n = expansion.n();
  if (k < 0 || k >= n) throw ParseError("state index out of range");
  if (tuple.empty()) throw ParseError("empty mode tuple");
  for (int v : tuple) {
    if (v < 0 || v >= n) throw ParseError("mode index out of range");
  }
  if (static_cast<int>(tuple.size()) > std::max(expansion.order, 1)) {
    throw ParseError("combination order M = " + std::to_string(tuple.size()) +
                     " exceeds normal-form order N = " + std::to_string(expansion.order));
  }
}

cplx product_over(const Eigen::VectorXcd& values, const MultiIndex& tuple) {
  cplx p = 1.0;
  for (int v : tuple) p *= values[v];
  return p;
}

// sum_i weight_i * Phi_ki * h^i_T, skipping resonant targets.
cplx combination_sum(const NormalFormExpansion& expansion, const MultiIndex& T,
                     const std::function<cplx(int)>& column_weight, std::vector<ResonantTerm>& skipped) {
  cplx sum = 0.0;
  for (int i = 0; i < expansion.n(); ++i) {
    if (const ResonantTerm* r = expansion.find_resonant(i, T)) {
      skipped.push_back(*r);
      continue;
    }
    if (auto h = expansion.h(i, T)) sum += column_weight(i) * *h;
  }
  return sum;
}

json cjson(cplx v) { return json::array({v.real(), v.imag()}); }

json tuple_json(const MultiIndex& t) {
  json a = json::array();
  for (int v : t) a.push_back(v + 1);
  return a;
}

}  // namespace

Eigen::MatrixXcd linear_pf(const Eigen::MatrixXcd& Phi, const Eigen::MatrixXcd& Psi) {
  if (Phi.rows() != Psi.cols() || Phi.cols() != Psi.rows()) {
    throw ParseError("Phi and Psi^T must have the same shape");
  }
  return Phi.cwiseProduct(Psi.transpose());
}

NonlinearPF nonlinear_pf(const NormalFormExpansion& expansion, const Eigen::MatrixXcd& Phi,
                         const Eigen::MatrixXcd& Psi, int k, const MultiIndex& tuple, cplx alpha) {
  check_request(expansion, k, tuple);
  const MultiIndex T = canonical(tuple);
  const Eigen::VectorXcd mu = z_initial(expansion, Psi, k, alpha).mu;
  NonlinearPF out;
  if (T.size() == 1) {
    out.value = Phi(k, T[0]) * mu[T[0]];
    return out;
  }
  const cplx mu_prod = product_over(mu, T);
  out.value = combination_sum(
      expansion, T, [&](int i) { return Phi(k, i); }, out.skipped) * mu_prod;
  return out;
}

NonlinearPF nonlinear_pf_theta(const ModalBasis& references,
                               const NormalFormExpansion& reference_expansion,
                               const Eigen::VectorXcd& theta, int k, const MultiIndex& tuple,
                               cplx alpha) {
  check_request(reference_expansion, k, tuple);
  const int n = references.n();
  if (theta.size() != n) throw ParseError("theta vector has wrong length");
  for (int i = 0; i < n; ++i) {
    if (std::abs(references.cos_delta[i]) < 1e-12) {
      throw DegenerateModeError("mode " + std::to_string(i + 1) + " has |cos delta| < 1e-12");
    }
  }
  const MultiIndex T = canonical(tuple);
  // w_l = theta_l / cos delta_l plays the role of xi_l sigma_l.
  const Eigen::VectorXcd w = theta.cwiseQuotient(references.cos_delta);
  const Eigen::VectorXcd y_hat = alpha * references.psi_hat.col(k);
  // J_l = alpha psi_hat_lk - sum_T (prod_T w) h_hat^l_T alpha^d prod_T psi_hat_Tk
  const Eigen::VectorXcd J = y_hat - reference_expansion.nonlinear_part(w.cwiseProduct(y_hat));
  const Eigen::VectorXcd mu = w.cwiseProduct(J);

  NonlinearPF out;
  if (T.size() == 1) {
    const int l = T[0];
    out.value = w[l] * references.phi_hat(k, l) * J[l];
    return out;
  }
  out.value = combination_sum(
                  reference_expansion, T,
                  [&](int i) { return w[i] * references.phi_hat(k, i); }, out.skipped) *
              product_over(mu, T);
  return out;
}

cplx theta_residual(const Eigen::VectorXcd& theta, cplx target, const ModalBasis& references,
                    const NormalFormExpansion& reference_expansion, int k, const MultiIndex& tuple,
                    cplx alpha) {
  return target -
         nonlinear_pf_theta(references, reference_expansion, theta, k, tuple, alpha).value;
}

Eigen::VectorXcd normalize_pf(const Eigen::VectorXcd& values) {
  if (values.size() == 0) throw ParseError("cannot normalize an empty vector");
  Eigen::Index pivot = 0;
  double top = 0.0;
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    if (std::abs(values[j]) > top) {
      top = std::abs(values[j]);
      pivot = j;
    }
  }
  if (top == 0.0) throw ParseError("cannot normalize an all-zero PF vector");
  Eigen::VectorXcd out = values / values[pivot];
  out[pivot] = 1.0;
  return out;
}

PFReport build_pf_report(const NormalFormExpansion& expansion, const ModalBasis& basis,
                         const PFRequest& request, const std::string& scheme_label) {
  const int n = basis.n();
  const Eigen::MatrixXcd Phi = basis.Phi();
  const Eigen::MatrixXcd Psi = basis.Psi();
  PFReport report;
  report.scheme = scheme_label;
  report.theta = basis.theta;
  report.normalized = request.normalize;
  report.alpha = request.alpha.size() ? request.alpha : Eigen::VectorXcd::Ones(n);
  if (report.alpha.size() != n) throw ParseError("alpha needs one value per state");

  if (request.include_linear) {
    report.linear = linear_pf(Phi, Psi);
    if (request.normalize) {
      for (int i = 0; i < n; ++i) report.linear.col(i) = normalize_pf(report.linear.col(i));
    }
  }
  for (const MultiIndex& raw : request.tuples) {
    const MultiIndex T = canonical(raw);
    Eigen::VectorXcd column(n);
    for (int k = 0; k < n; ++k) {
      NonlinearPF p = nonlinear_pf(expansion, Phi, Psi, k, T, report.alpha[k]);
      column[k] = p.value;
      for (auto& s : p.skipped) {
        const bool seen = std::any_of(
            report.skipped_resonant.begin(), report.skipped_resonant.end(),
            [&](const ResonantTerm& r) { return r.target == s.target && r.tuple == s.tuple; });
        if (!seen) report.skipped_resonant.push_back(s);
      }
    }
    if (request.normalize && column.cwiseAbs().maxCoeff() > 0.0) column = normalize_pf(column);
    for (int k = 0; k < n; ++k) report.nonlinear.push_back({k, T, column[k]});
  }
  return report;
}

std::string pf_csv(const PFReport& report, bool with_phase) {
  std::ostringstream out;
  out << "state,mode_tuple,re,im,magnitude" << (with_phase ? ",phase" : "") << '\n';
  auto row = [&](int state, const MultiIndex& tuple, cplx v) {
    out << state + 1 << ',' << format_one_based(tuple) << ',' << format_real(v.real()) << ','
        << format_real(v.imag()) << ',' << format_real(std::abs(v));
    if (with_phase) out << ',' << format_real(std::arg(v));
    out << '\n';
  };
  for (Eigen::Index i = 0; i < report.linear.cols(); ++i) {
    for (Eigen::Index k = 0; k < report.linear.rows(); ++k) {
      row(static_cast<int>(k), MultiIndex{static_cast<int>(i)}, report.linear(k, i));
    }
  }
  for (const auto& e : report.nonlinear) row(e.state, e.tuple, e.value);
  for (const auto& r : report.skipped_resonant) {
    out << "# skipped resonant: target=" << r.target + 1 << " tuple=" << format_one_based(r.tuple)
        << " |defect|=" << format_real(std::abs(r.defect)) << " C=" << format_real(r.c.real())
        << (r.c.imag() < 0 ? "" : "+") << format_real(r.c.imag()) << "j\n";
  }
  return out.str();
}

std::string pf_json(const PFReport& report) {
  json doc;
  doc["scheme"] = report.scheme;
  doc["normalized"] = report.normalized;
  json theta = json::array();
  for (Eigen::Index i = 0; i < report.theta.size(); ++i) theta.push_back(cjson(report.theta[i]));
  doc["theta"] = theta;
  json alpha = json::array();
  for (Eigen::Index i = 0; i < report.alpha.size(); ++i) alpha.push_back(cjson(report.alpha[i]));
  doc["alpha"] = alpha;
  if (report.linear.size()) {
    json rows = json::array();
    for (Eigen::Index k = 0; k < report.linear.rows(); ++k) {
      json row = json::array();
      for (Eigen::Index i = 0; i < report.linear.cols(); ++i) row.push_back(cjson(report.linear(k, i)));
      rows.push_back(row);
    }
    doc["linear"] = rows;
  }
  json nl = json::array();
  for (const auto& e : report.nonlinear) {
    nl.push_back({{"state", e.state + 1},
                  {"mode_tuple", tuple_json(e.tuple)},
                  {"value", cjson(e.value)},
                  {"magnitude", std::abs(e.value)}});
  }
  doc["nonlinear"] = nl;
  json skipped = json::array();
  for (const auto& r : report.skipped_resonant) {
    skipped.push_back({{"target", r.target + 1},
                       {"tuple", tuple_json(r.tuple)},
                       {"c", cjson(r.c)},
                       {"defect", cjson(r.defect)}});
  }
  doc["skipped_resonant"] = skipped;
  return doc.dump(2);
}

}  // namespace modalpf
