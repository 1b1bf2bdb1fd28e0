#include "modalpf/koopman.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "modalpf/errors.hpp"

namespace modalpf {

namespace {

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

KoopmanBasis fit_koopman(const SnapshotSet& snapshots, const KoopmanOptions& opts) {
  const Eigen::Index n = snapshots.X.rows();
  const Eigen::Index m = snapshots.X.cols();
  if (n == 0 || m == 0 || snapshots.Y.rows() != n || snapshots.Y.cols() != m) {
    throw ParseError("snapshot matrices are empty or mismatched");
  }
  if (!(snapshots.dt > 0.0)) throw ParseError("snapshot dt must be positive");

  Eigen::Index held = static_cast<Eigen::Index>(std::floor(opts.holdout_fraction * static_cast<double>(m)));
  if (m - held < n) held = 0;
  const Eigen::Index fit = m - held;
  const Eigen::MatrixXd X = snapshots.X.leftCols(fit);
  const Eigen::MatrixXd Y = snapshots.Y.leftCols(fit);

  // K = Y X^+ via the SVD of X.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s.size() < n || s[n - 1] <= opts.rank_tol * s[0]) {
    throw RankDeficientError("snapshot matrix is rank deficient");
  }
  const Eigen::MatrixXd K =
      Y * svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();

  KoopmanBasis basis;
  basis.K = K;
  basis.dt = snapshots.dt;
  basis.snapshot_count = static_cast<std::size_t>(m);
  basis.B = Eigen::MatrixXd::Identity(n, n);
  if (held > 0) {
    const Eigen::MatrixXd pred = K * snapshots.X.rightCols(held);
    const double denom = snapshots.Y.rightCols(held).norm();
    basis.holdout_rel_error = denom > 0.0 ? (pred - snapshots.Y.rightCols(held)).norm() / denom : 0.0;
    if (opts.holdout_bound && basis.holdout_rel_error > *opts.holdout_bound) {
      throw RankDeficientError("Koopman operator misses held-out snapshots (relative error " +
                               std::to_string(basis.holdout_rel_error) + ")");
    }
  }

  Eigen::EigenSolver<Eigen::MatrixXd> solver(K, true);
  if (solver.info() != Eigen::Success) throw EigenSolverError("Koopman eigensolver failed");
  const Eigen::VectorXcd mu = solver.eigenvalues();
  const Eigen::MatrixXcd W = solver.eigenvectors();
  Eigen::VectorXcd lambda(n);
  for (Eigen::Index j = 0; j < n; ++j) lambda[j] = std::log(mu[j]) / snapshots.dt;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return mode_before(lambda[a], lambda[b]); });

  Eigen::MatrixXcd right(n, n);
  basis.discrete_eigenvalues.resize(n);
  basis.eigenvalues.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto src = order[static_cast<std::size_t>(j)];
    basis.discrete_eigenvalues[j] = mu[src];
    basis.eigenvalues[j] = lambda[src];
    right.col(j) = W.col(src);
  }
  Eigen::MatrixXcd U = right.inverse();  // rows: left eigenvectors of K
  for (Eigen::Index j = 0; j < n; ++j) U.row(j) /= U.row(j).norm();
  basis.u = U;
  basis.v = basis.B.cast<cplx>() * U.inverse();
  return basis;
}

std::vector<int> match_modes(const KoopmanBasis& basis, const Eigen::VectorXcd& lambdas, double tol) {
  std::vector<int> out;
  std::vector<bool> used(static_cast<std::size_t>(basis.n()), false);
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    int best = -1;
    double best_dist = tol;
    for (int j = 0; j < basis.n(); ++j) {
      const double d = std::abs(basis.eigenvalues[j] - lambdas[i]);
      if (!used[static_cast<std::size_t>(j)] && d <= best_dist) {
        best = j;
        best_dist = d;
      }
    }
    if (best < 0) {
      throw ModeMatchError("no Koopman eigenvalue within tolerance of model mode " +
                               std::to_string(i + 1));
    }
    used[static_cast<std::size_t>(best)] = true;
    out.push_back(best);
  }
  return out;
}

KoopmanBasis reorder(const KoopmanBasis& basis, const std::vector<int>& order) {
  KoopmanBasis out = basis;
  const auto m = static_cast<Eigen::Index>(order.size());
  out.discrete_eigenvalues.resize(m);
  out.eigenvalues.resize(m);
  out.u.resize(m, basis.u.cols());
  out.v.resize(basis.v.rows(), m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const int src = order[static_cast<std::size_t>(j)];
    out.discrete_eigenvalues[j] = basis.discrete_eigenvalues[src];
    out.eigenvalues[j] = basis.eigenvalues[src];
    out.u.row(j) = basis.u.row(src);
    out.v.col(j) = basis.v.col(src);
  }
  return out;
}

}  // namespace modalpf
