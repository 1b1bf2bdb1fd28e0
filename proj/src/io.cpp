#include "modalpf/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "modalpf/errors.hpp"

namespace modalpf {

using json = nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw ParseError("failed writing '" + path + "'");
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

json cjson(cplx v) { return json::array({v.real(), v.imag()}); }

json vec_json(const Eigen::VectorXcd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(cjson(v[i]));
  return a;
}

json mat_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(cjson(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string basis_json(const ModalBasis& basis, const std::string& scheme_label) {
  json doc;
  doc["scheme"] = scheme_label;
  doc["norm"] = to_string(basis.norm);
  doc["eigenvalues"] = vec_json(basis.eigenvalues);
  doc["phi_hat"] = mat_json(basis.phi_hat);
  doc["psi_hat"] = mat_json(basis.psi_hat);
  doc["cos_delta"] = vec_json(basis.cos_delta);
  doc["sigma"] = vec_json(basis.sigma);
  doc["xi"] = vec_json(basis.xi);
  doc["theta"] = vec_json(basis.theta);
  return doc.dump(2);
}

}  // namespace modalpf
