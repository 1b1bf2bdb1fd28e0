#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modalpf/spectrum.hpp"

namespace modalpf {

/// Snapshot pairs stacked as columns: Y[:, j] follows X[:, j] by dt.
struct SnapshotSet {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;
  double dt = 0.0;
  std::size_t members = 0;
  std::size_t diverged = 0;

  std::size_t pairs() const { return static_cast<std::size_t>(X.cols()); }
};

struct KoopmanOptions {
  /// Relative singular-value floor for the rank check on X.
  double rank_tol = 1e-10;
  /// Fraction of trailing pairs held out from the fit.
  double holdout_fraction = 0.1;
  /// When set, a held-out relative error above this throws.
  std::optional<double> holdout_bound;
};

/// Finite-dimensional Koopman approximation on the identity dictionary
/// gamma(x) = x. Rows of `u` are left eigenvectors of the one-step
/// operator K (unit 2-norm); columns of `v` are the modes
/// [v_1 ... v_l] = B [u_1; ...; u_l]^{-1}, so that x = sum_i v_i (u_i gamma).
struct KoopmanBasis {
  Eigen::MatrixXd K;
  Eigen::VectorXcd discrete_eigenvalues;
  Eigen::VectorXcd eigenvalues;  // log(mu) / dt
  Eigen::MatrixXcd u;
  Eigen::MatrixXcd v;
  Eigen::MatrixXd B;
  std::string dictionary = "identity";
  double dt = 0.0;
  std::size_t snapshot_count = 0;
  double holdout_rel_error = 0.0;

  int n() const { return static_cast<int>(eigenvalues.size()); }
};

/// Least-squares one-step operator and its eigendecomposition. Modes use
/// the same ordering rule as eigendecompose. Throws RankDeficientError.
KoopmanBasis fit_koopman(const SnapshotSet& snapshots, const KoopmanOptions& opts = {});

/// For every model mode, the Koopman mode whose continuous eigenvalue lies
/// within `tol`. Throws ModeMatchError if some mode has no partner.
std::vector<int> match_modes(const KoopmanBasis& basis, const Eigen::VectorXcd& lambdas,
                             double tol);

/// Reorders modes so that mode i of the result is `order[i]` of the input.
KoopmanBasis reorder(const KoopmanBasis& basis, const std::vector<int>& order);

}  // namespace modalpf
