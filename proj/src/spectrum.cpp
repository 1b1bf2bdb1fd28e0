#include "modalpf/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "modalpf/errors.hpp"

namespace modalpf {

double vector_norm(const Eigen::VectorXcd& v, ReferenceNorm norm) {
  switch (norm) {
    case ReferenceNorm::one:
      return v.cwiseAbs().sum();
    case ReferenceNorm::two:
      return v.norm();
    case ReferenceNorm::inf:
      return v.cwiseAbs().maxCoeff();
  }
  return v.norm();
}

std::string to_string(ReferenceNorm norm) {
  switch (norm) {
    case ReferenceNorm::one:
      return "1";
    case ReferenceNorm::two:
      return "2";
    case ReferenceNorm::inf:
      return "inf";
  }
  return "?";
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::I:
      return "I";
    case Scheme::II:
      return "II";
    case Scheme::III:
      return "III";
  }
  return "?";
}

ReferenceNorm parse_norm(const std::string& s) {
  if (s == "1" || s == "one") return ReferenceNorm::one;
  if (s == "2" || s == "two") return ReferenceNorm::two;
  if (s == "inf" || s == "max") return ReferenceNorm::inf;
  throw ParseError("unknown norm '" + s + "' (expected 1, 2 or inf)");
}

Scheme parse_scheme(const std::string& s) {
  if (s == "I" || s == "1") return Scheme::I;
  if (s == "II" || s == "2") return Scheme::II;
  if (s == "III" || s == "3") return Scheme::III;
  throw ParseError("unknown scheme '" + s + "' (expected I, II or III)");
}

Eigen::MatrixXcd ModalBasis::Phi() const { return phi_hat * sigma.asDiagonal(); }

Eigen::MatrixXcd ModalBasis::Psi() const { return xi.asDiagonal() * psi_hat; }

int ModalBasis::conjugate_mate(int i) const {
  if (eigenvalues[i].imag() == 0.0) return i;
  const cplx target = std::conj(eigenvalues[i]);
  int best = i;
  double best_dist = std::abs(eigenvalues[i] - target);
  for (int j = 0; j < n(); ++j) {
    const double d = std::abs(eigenvalues[j] - target);
    if (d < best_dist) {
      best = j;
      best_dist = d;
    }
  }
  return best;
}

namespace {

// Index of the first component within a relative 1e-9 of the largest
// magnitude; ties resolve identically for a vector and its conjugate.
Eigen::Index pivot_index(const Eigen::VectorXcd& v) {
  const double top = v.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (std::abs(v[j]) >= top * (1.0 - 1e-9)) return j;
  }
  return 0;
}

Eigen::VectorXcd make_reference(Eigen::VectorXcd v, ReferenceNorm norm, bool real_mode) {
  v /= vector_norm(v, norm);
  const cplx pivot = v[pivot_index(v)];
  v *= std::abs(pivot) / pivot;
  if (real_mode) v = v.real().cast<cplx>();
  return v;
}

bool mode_before(const cplx& a, const cplx& b) {
  constexpr double eps = 1e-12;
  const double ia = std::abs(a.imag()), ib = std::abs(b.imag());
  if (std::abs(ia - ib) > eps * std::max(1.0, std::max(ia, ib))) return ia > ib;
  if (std::abs(a.real() - b.real()) > eps * std::max(1.0, std::abs(a.real()))) {
    return a.real() > b.real();
  }
  return a.imag() > b.imag();
}

}  // namespace

ModalBasis eigendecompose(const Eigen::MatrixXd& A, const EigOptions& opts) {
  const Eigen::Index n = A.rows();
  if (n == 0 || A.cols() != n) throw ParseError("matrix must be square and nonempty");

  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, true);
  if (solver.info() != Eigen::Success) throw EigenSolverError("eigensolver did not converge");
  const Eigen::VectorXcd raw_values = solver.eigenvalues();
  const Eigen::MatrixXcd raw_vectors = solver.eigenvectors();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return mode_before(raw_values[a], raw_values[b]);
  });

  const double scale = A.norm() > 0.0 ? A.norm() : 1.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      if (std::abs(raw_values[a] - raw_values[b]) < opts.repeat_tol * scale) {
        throw StrongResonanceError("repeated eigenvalue (strong resonance) near " +
                                   std::to_string(raw_values[a].real()) + "+" +
                                   std::to_string(raw_values[a].imag()) + "j");
      }
    }
  }

  ModalBasis basis;
  basis.norm = opts.norm;
  basis.eigenvalues.resize(n);
  Eigen::MatrixXcd Phi(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    basis.eigenvalues[i] = raw_values[order[static_cast<std::size_t>(i)]];
    Phi.col(i) = raw_vectors.col(order[static_cast<std::size_t>(i)]);
  }
  // Exact conjugate pairs: the negative-imaginary member mirrors its mate,
  // which the ordering places immediately before it.
  for (Eigen::Index i = 1; i < n; ++i) {
    if (basis.eigenvalues[i].imag() < 0.0 && basis.eigenvalues[i - 1].imag() > 0.0 &&
        std::abs(basis.eigenvalues[i] - std::conj(basis.eigenvalues[i - 1])) <=
            1e-10 * std::max(1.0, std::abs(basis.eigenvalues[i]))) {
      basis.eigenvalues[i] = std::conj(basis.eigenvalues[i - 1]);
      Phi.col(i) = Phi.col(i - 1).conjugate();
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Phi);
  const Eigen::MatrixXcd Psi = lu.inverse();
  if (!Psi.allFinite()) throw EigenSolverError("eigenvector matrix is singular");

  basis.phi_hat.resize(n, n);
  basis.psi_hat.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool real_mode = basis.eigenvalues[i].imag() == 0.0;
    basis.phi_hat.col(i) = make_reference(Phi.col(i), opts.norm, real_mode);
    basis.psi_hat.row(i) = make_reference(Psi.row(i).transpose(), opts.norm, real_mode).transpose();
  }
  basis.cos_delta.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    basis.cos_delta[i] = (basis.psi_hat.row(i) * basis.phi_hat.col(i))(0, 0);
  }
  basis.sigma = Eigen::VectorXcd::Ones(n);
  basis.xi = Eigen::VectorXcd::Ones(n);
  basis.theta = basis.cos_delta;
  return basis;
}

ModalBasis eigendecompose(const PolynomialSystem& sys, const EigOptions& opts) {
  return eigendecompose(sys.A(), opts);
}

namespace {

void require_nondegenerate(const ModalBasis& basis) {
  for (int i = 0; i < basis.n(); ++i) {
    if (std::abs(basis.cos_delta[i]) < 1e-12) {
      throw DegenerateModeError("mode " + std::to_string(i + 1) +
                                " has |cos delta| < 1e-12 (shape orthogonal to composition)");
    }
  }
}

}  // namespace

ModalBasis apply_scaling(const ModalBasis& basis, const Eigen::VectorXcd& sigma,
                         const Eigen::VectorXcd& xi) {
  if (sigma.size() != basis.n() || xi.size() != basis.n()) {
    throw ParseError("scaling vectors have wrong length");
  }
  ModalBasis out = basis;
  out.sigma = sigma;
  out.xi = xi;
  out.theta = xi.cwiseProduct(sigma).cwiseProduct(basis.cos_delta);
  return out;
}

ModalBasis apply_scheme(const ModalBasis& basis, Scheme scheme) {
  require_nondegenerate(basis);
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(basis.n());
  const Eigen::VectorXcd inv_cos = basis.cos_delta.cwiseInverse();
  ModalBasis out;
  switch (scheme) {
    case Scheme::I:
      out = apply_scaling(basis, ones, ones);
      break;
    case Scheme::II:
      out = apply_scaling(basis, ones, inv_cos);
      out.theta = ones;
      break;
    case Scheme::III:
      out = apply_scaling(basis, inv_cos, ones);
      out.theta = ones;
      break;
  }
  return out;
}

ModalBasis apply_theta(const ModalBasis& basis, const Eigen::VectorXcd& theta) {
  require_nondegenerate(basis);
  if (theta.size() != basis.n()) throw ParseError("theta vector has wrong length");
  ModalBasis out = apply_scaling(basis, Eigen::VectorXcd::Ones(basis.n()),
                                 theta.cwiseQuotient(basis.cos_delta));
  out.theta = theta;
  return out;
}

namespace {

// Least-squares factor c with v ~= c * ref, and the relative residual.
std::pair<cplx, double> proportional_factor(const Eigen::VectorXcd& v, const Eigen::VectorXcd& ref) {
  const cplx c = ref.dot(v) / ref.squaredNorm();  // dot conjugates the left operand
  const double vn = v.norm();
  if (vn == 0.0) return {cplx(0.0), 1.0};
  return {c, (v - c * ref).norm() / vn};
}

}  // namespace

ScalingFactors extract_scaling(const ModalBasis& basis, const Eigen::MatrixXcd& Phi,
                               const Eigen::MatrixXcd& Psi) {
  const int n = basis.n();
  if (Phi.rows() != n || Phi.cols() != n || Psi.rows() != n || Psi.cols() != n) {
    throw ParseError("eigenvector matrices have wrong size");
  }
  ScalingFactors f;
  f.sigma.resize(n);
  f.xi.resize(n);
  f.theta.resize(n);
  for (int i = 0; i < n; ++i) {
    auto [s, rs] = proportional_factor(Phi.col(i), basis.phi_hat.col(i));
    auto [x, rx] = proportional_factor(Psi.row(i).transpose(), basis.psi_hat.row(i).transpose());
    if (rs > 1e-8) {
      throw NotAnEigenvectorError("column " + std::to_string(i + 1) +
                                  " of Phi is not proportional to its reference");
    }
    if (rx > 1e-8) {
      throw NotAnEigenvectorError("row " + std::to_string(i + 1) +
                                  " of Psi is not proportional to its reference");
    }
    f.sigma[i] = s;
    f.xi[i] = x;
    f.theta[i] = (Psi.row(i) * Phi.col(i))(0, 0);
    const cplx expected = x * s * basis.cos_delta[i];
    const double mag = std::abs(x * s);
    const double allowed = std::max(1e-10, 2.0 * (rs + rx)) * std::max(mag, 1e-300);
    if (std::abs(f.theta[i] - expected) > allowed) {
      throw NotAnEigenvectorError("theta inconsistent with xi*sigma*cos(delta) for mode " +
                                  std::to_string(i + 1));
    }
  }
  return f;
}

bool ResonanceSet::contains(const MultiIndex& tuple, int target) const {
  const MultiIndex c = canonical(tuple);
  return std::any_of(entries.begin(), entries.end(),
                     [&](const Entry& e) { return e.target == target && e.tuple == c; });
}

double default_resonance_tol(const Eigen::VectorXcd& lambdas) {
  const double top = lambdas.size() ? lambdas.cwiseAbs().maxCoeff() : 0.0;
  return std::max(1e-6 * top, 1e-12);
}

ResonanceSet detect_resonances(const Eigen::VectorXcd& lambdas, int order, double tol) {
  if (order < 2) throw ParseError("resonance order must be >= 2");
  if (!(tol > 0.0)) throw ParseError("resonance tolerance must be positive");
  ResonanceSet set;
  set.order = order;
  set.tolerance = tol;
  const int n = static_cast<int>(lambdas.size());
  for_each_canonical(n, order, [&](const MultiIndex& tuple) {
    cplx sum = 0.0;
    for (int v : tuple) sum += lambdas[v];
    for (int i = 0; i < n; ++i) {
      const cplx defect = sum - lambdas[i];
      if (std::abs(defect) <= tol) set.entries.push_back({tuple, i, defect});
    }
  });
  return set;
}

}  // namespace modalpf
