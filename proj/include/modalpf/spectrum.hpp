#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modalpf/model.hpp"
#include "modalpf/multi_index.hpp"

namespace modalpf {

using cplx = std::complex<double>;

/// Norm used to make the reference eigenvectors unique.
enum class ReferenceNorm { one, two, inf };

/// Eigenvector scaling conventions:
///  I   sigma = xi = 1 (theta = cos delta)
///  II  sigma = 1, psi_i phi_i = 1
///  III xi = 1, psi_i phi_i = 1
enum class Scheme { I, II, III };

double vector_norm(const Eigen::VectorXcd& v, ReferenceNorm norm);
std::string to_string(ReferenceNorm norm);
std::string to_string(Scheme scheme);
ReferenceNorm parse_norm(const std::string& s);
Scheme parse_scheme(const std::string& s);

/// Eigenvalues, unit-norm reference right/left eigenvectors and the per-mode
/// scaling factors relating them to the eigenvectors actually in use:
///   Phi_i = sigma_i * phi_hat_i,  Psi_i = xi_i * psi_hat_i,
///   theta_i = Psi_i Phi_i = xi_i sigma_i cos_delta_i.
struct ModalBasis {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd phi_hat;  // columns
  Eigen::MatrixXcd psi_hat;  // rows
  Eigen::VectorXcd sigma;
  Eigen::VectorXcd xi;
  Eigen::VectorXcd theta;
  /// psi_hat_i * phi_hat_i (row times column, no conjugation).
  Eigen::VectorXcd cos_delta;
  ReferenceNorm norm = ReferenceNorm::one;

  int n() const { return static_cast<int>(eigenvalues.size()); }

  /// Scaled right eigenvectors (columns).
  Eigen::MatrixXcd Phi() const;
  /// Scaled left eigenvectors (rows).
  Eigen::MatrixXcd Psi() const;

  /// Index of the eigenvalue conjugate to mode i (i itself for real modes).
  int conjugate_mate(int i) const;
};

struct EigOptions {
  ReferenceNorm norm = ReferenceNorm::one;
  /// Relative separation (times ||A||_F) below which two eigenvalues count
  /// as repeated.
  double repeat_tol = 1e-8;
};

/// Eigendecomposition with deterministic references. Modes are ordered by
/// descending |Im|, then descending Re, with the positive-imaginary member
/// of each conjugate pair first. Each reference is rotated so that its
/// largest-magnitude component is real and positive.
ModalBasis eigendecompose(const Eigen::MatrixXd& A, const EigOptions& opts = {});
ModalBasis eigendecompose(const PolynomialSystem& sys, const EigOptions& opts = {});

/// Returns the basis with the scheme's sigma/xi/theta installed.
ModalBasis apply_scheme(const ModalBasis& basis, Scheme scheme);

/// Installs explicit scaling factors; theta is recomputed.
ModalBasis apply_scaling(const ModalBasis& basis, const Eigen::VectorXcd& sigma,
                         const Eigen::VectorXcd& xi);

/// Picks sigma = 1, xi = theta / cos_delta so that the basis carries the
/// requested theta-vector.
ModalBasis apply_theta(const ModalBasis& basis, const Eigen::VectorXcd& theta);

struct ScalingFactors {
  Eigen::VectorXcd sigma;
  Eigen::VectorXcd xi;
  Eigen::VectorXcd theta;
};

/// Recovers the unique factors with Phi_i = sigma_i phi_hat_i and
/// Psi_i = xi_i psi_hat_i. Throws NotAnEigenvectorError when a column or
/// row is not proportional to its reference.
ScalingFactors extract_scaling(const ModalBasis& basis, const Eigen::MatrixXcd& Phi,
                               const Eigen::MatrixXcd& Psi);

/// Resonant (source tuple; target) combinations of order M.
struct ResonanceSet {
  struct Entry {
    MultiIndex tuple;  // canonical, 0-based modes
    int target = 0;
    cplx defect;  // sum(lambda_tuple) - lambda_target

    bool operator==(const Entry& o) const { return tuple == o.tuple && target == o.target; }
  };
  int order = 2;
  double tolerance = 0.0;
  std::vector<Entry> entries;

  bool contains(const MultiIndex& tuple, int target) const;
};

/// 1e-6 * max|lambda| (floored at 1e-12).
double default_resonance_tol(const Eigen::VectorXcd& lambdas);

/// Exhaustive scan of canonical M-tuples against every target mode.
ResonanceSet detect_resonances(const Eigen::VectorXcd& lambdas, int order, double tol);

}  // namespace modalpf
