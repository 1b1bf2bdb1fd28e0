#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "modalpf/model.hpp"
#include "modalpf/normalform.hpp"
#include "modalpf/spectrum.hpp"

namespace testsupport {

using modalpf::cplx;

inline const char* kExampleA = R"([[0, 0, 1, 0], [0, 0, 0, 1], [-20, 20, -1, 0], [5, -5, 0, -1]])";

inline Eigen::MatrixXd example_a() {
  Eigen::MatrixXd A(4, 4);
  A << 0, 0, 1, 0, 0, 0, 0, 1, -20, 20, -1, 0, 5, -5, 0, -1;
  return A;
}

inline modalpf::PolynomialSystem example1() { return modalpf::PolynomialSystem(example_a()); }

inline modalpf::PolynomialSystem example2() {
  modalpf::PolynomialSystem sys(example_a());
  sys.add_term(2, {0, 2}, -2.0);
  return sys;
}

inline std::string data_path(const std::string& name) { return std::string(MODALPF_DATA_DIR) + "/" + name; }

inline double rel(cplx a, cplx b, double floor = 1e-300) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Random real system with Gaussian A and a few tensor terms per order.
inline modalpf::PolynomialSystem random_system(std::mt19937_64& rng, int n, int max_order, int terms_per_order = 4) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, n - 1);
  Eigen::MatrixXd A(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) A(r, c) = g(rng);
  A.diagonal().array() -= 1.0;
  modalpf::PolynomialSystem sys(A);
  for (int d = 2; d <= max_order; ++d) {
    for (int t = 0; t < terms_per_order; ++t) {
      modalpf::MultiIndex idx;
      for (int j = 0; j < d; ++j) idx.push_back(pick(rng));
      sys.add_term(pick(rng), idx, g(rng));
    }
  }
  return sys;
}

/// Conjugate-consistent random complex vector with magnitudes in [e^-1, e].
inline Eigen::VectorXcd random_factors(const modalpf::ModalBasis& b, std::mt19937_64& rng,
                                       bool real_for_complex_modes = false) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  Eigen::VectorXcd s(b.n());
  for (int i = 0; i < b.n(); ++i) {
    const int mate = b.conjugate_mate(i);
    if (mate < i) {
      s[i] = std::conj(s[mate]);
      continue;
    }
    const double mag = std::exp(u(rng));
    if (real_for_complex_modes && mate != i) {
      s[i] = u(rng) < 0 ? -mag : mag;
    } else {
      s[i] = std::polar(mag, ang(rng));
    }
  }
  return s;
}

/// A basis with the given theta but random (sigma, xi) split.
inline modalpf::ModalBasis refactor(const modalpf::ModalBasis& refs, const Eigen::VectorXcd& theta,
                                    std::mt19937_64& rng) {
  const Eigen::VectorXcd sigma = random_factors(refs, rng);
  const Eigen::VectorXcd xi = theta.cwiseQuotient(sigma.cwiseProduct(refs.cos_delta));
  return modalpf::apply_scaling(refs, sigma, xi);
}

/// Order-d nonlinearity evaluated at a complex state, straight from the
/// stored monomials.
inline Eigen::VectorXcd g_complex(const modalpf::PolynomialSystem& sys, int order, const Eigen::VectorXcd& x) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(sys.n());
  for (const auto& [key, coeff] : sys.tensor(order)) {
    cplx m = coeff;
    for (int v : key.index) m *= x[v];
    out[key.row] += m;
  }
  return out;
}

/// Coefficients of a homogeneous quadratic Q: C^n -> C^n by polarization.
template <class Q>
modalpf::CoefficientTable quadratic_coefficients(int n, Q&& q) {
  modalpf::CoefficientTable table;
  auto e = [n](int r) { return Eigen::VectorXcd(Eigen::VectorXcd::Unit(n, r)); };
  for (int r = 0; r < n; ++r) {
    const Eigen::VectorXcd qr = q(e(r));
    for (int i = 0; i < n; ++i) table[{i, {r, r}}] = qr[i];
    for (int s = r + 1; s < n; ++s) {
      const Eigen::VectorXcd qs = q(e(s));
      const Eigen::VectorXcd qrs = q(Eigen::VectorXcd(e(r) + e(s)));
      for (int i = 0; i < n; ++i) table[{i, {r, s}}] = qrs[i] - qr[i] - qs[i];
    }
  }
  return table;
}

/// Result of substituting y = z + H(z), dz/dt = Lambda z into the quadratic
/// y-dynamics. Keys that are not resonant must vanish.
struct CancellationCheck {
  double worst_nonresonant = 0.0;  // max |residual| over non-resonant keys
  double worst_simple = 0.0;       // max |C - defect h| over non-resonant keys
  double c_norm = 0.0;             // max |C| from the independent extraction
  double c_agreement = 0.0;        // max |C_lib - C_oracle|
  int nonresonant_keys = 0;
};

inline CancellationCheck cancellation(const modalpf::PolynomialSystem& sys, const modalpf::ModalBasis& basis,
                                      const modalpf::NormalFormExpansion& exp) {
  const int n = basis.n();
  const Eigen::MatrixXcd Phi = basis.Phi();
  const Eigen::MatrixXcd Psi = basis.Psi();
  const Eigen::VectorXcd& lam = basis.eigenvalues;

  auto projected = [&](const Eigen::VectorXcd& z) {
    return Eigen::VectorXcd(Psi * g_complex(sys, 2, Phi * z));
  };
  auto residual = [&](const Eigen::VectorXcd& z) {
    const Eigen::VectorXcd lz = lam.cwiseProduct(z);
    // H is quadratic, so the central difference is its exact derivative along Lambda z.
    const Eigen::VectorXcd dH = 0.5 * (exp.nonlinear_part(z + lz) - exp.nonlinear_part(z - lz));
    return Eigen::VectorXcd(projected(z) + lam.cwiseProduct(exp.nonlinear_part(z)) - dH);
  };
  const auto c_oracle = quadratic_coefficients(n, projected);
  const auto r_table = quadratic_coefficients(n, residual);

  CancellationCheck out;
  for (const auto& [key, c] : c_oracle) out.c_norm = std::max(out.c_norm, std::abs(c));
  const auto lib = exp.C.count(2) ? exp.C.at(2) : modalpf::CoefficientTable{};
  for (const auto& [key, c] : c_oracle) {
    const auto it = lib.find(key);
    const cplx cl = it == lib.end() ? cplx(0) : it->second;
    out.c_agreement = std::max(out.c_agreement, std::abs(cl - c));
    if (exp.find_resonant(key.row, key.index)) continue;
    ++out.nonresonant_keys;
    out.worst_nonresonant = std::max(out.worst_nonresonant, std::abs(r_table.at(key)));
    const cplx defect = lam[key.index[0]] + lam[key.index[1]] - lam[key.row];
    const cplx h = exp.h(key.row, key.index).value_or(cplx(0));
    out.worst_simple = std::max(out.worst_simple, std::abs(cl - defect * h));
  }
  return out;
}

}  // namespace testsupport
