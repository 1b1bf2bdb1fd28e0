#include "modalpf/variants.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "modalpf/errors.hpp"

namespace modalpf {

namespace {

constexpr double kRealModeTol = 1e-9;

void check_indices(int n, int i, int k) {
  if (i < 0 || i >= n) throw ParseError("mode index out of range");
  if (k < 0 || k >= n) throw ParseError("state index out of range");
}

// Mean and standard error of per-sample values; nullopt samples are
// rejections.
Estimate run_estimator(const InitialDistribution& dist, int n,
                       const std::function<std::optional<cplx>(const Eigen::VectorXd&)>& sample) {
  if (dist.samples == 0) throw EstimationError("no samples requested");
  if (!(dist.guard > 0.0)) throw ParseError("guard must be positive");
  std::vector<cplx> values;
  values.reserve(dist.samples);
  Estimate e;
  e.seed = dist.seed;
  for (std::size_t s = 0; s < dist.samples; ++s) {
    if (auto v = sample(dist.draw(n, s))) {
      values.push_back(*v);
    } else {
      ++e.rejected;
    }
  }
  e.admitted = values.size();
  if (values.empty()) throw EstimationError("every sample was rejected by the guard");
  const double count = static_cast<double>(values.size());
  e.value = pairwise_sum(std::span<const cplx>(values)) / count;
  if (values.size() > 1) {
    std::vector<double> sq;
    sq.reserve(values.size());
    for (const cplx& v : values) sq.push_back(std::norm(v - e.value));
    const double var = pairwise_sum(std::span<const double>(sq)) / (count - 1.0);
    e.std_error = std::sqrt(var / count);
  }
  return e;
}

cplx z_component(const ModalBasis& basis, const Eigen::MatrixXcd& Psi,
                 const NormalFormExpansion* expansion, const Eigen::VectorXd& x0, int i) {
  if (expansion) return z_from_state(*expansion, Psi, x0.cast<cplx>())[i];
  (void)basis;
  return (Psi.row(i) * x0.cast<cplx>())(0, 0);
}

}  // namespace

double Estimate::rejection_rate() const {
  const std::size_t total = admitted + rejected;
  return total ? static_cast<double>(rejected) / static_cast<double>(total) : 0.0;
}

Estimate pmispf(const ModalBasis& basis, const InitialDistribution& dist, int i, int k) {
  const int n = basis.n();
  check_indices(n, i, k);
  const Eigen::MatrixXcd Phi = basis.Phi();
  const Eigen::RowVectorXcd psi_i = basis.Psi().row(i);
  const cplx phi_ki = Phi(k, i);
  return run_estimator(dist, n, [&](const Eigen::VectorXd& x0) -> std::optional<cplx> {
    if (std::abs(x0[k]) < dist.guard * x0.norm()) return std::nullopt;
    const cplx modal = (psi_i * x0.cast<cplx>())(0, 0);
    return modal * phi_ki / x0[k];
  });
}

Estimate psimpf(const ModalBasis& basis, const NormalFormExpansion* expansion,
                const InitialDistribution& dist, int i, int k) {
  const int n = basis.n();
  check_indices(n, i, k);
  const Eigen::MatrixXcd Psi = basis.Psi();
  const cplx psi_ik = Psi(i, k);
  const double row_scale = Psi.row(i).norm();
  const bool real_mode = std::abs(basis.eigenvalues[i].imag()) <= kRealModeTol;
  return run_estimator(dist, n, [&](const Eigen::VectorXd& x0) -> std::optional<cplx> {
    const cplx z = z_component(basis, Psi, expansion, x0, i);
    const double floor = dist.guard * x0.norm() * row_scale;
    if (real_mode) {
      if (std::abs(z) < floor) return std::nullopt;
      return psi_ik * x0[k] / z;
    }
    const cplx denom = z + std::conj(z);
    if (std::abs(denom) < floor) return std::nullopt;
    return (psi_ik + std::conj(psi_ik)) * x0[k] / denom;
  });
}

Estimate nonlinear_pmispf(const ModalBasis& basis, const NormalFormExpansion& expansion,
                          const InitialDistribution& dist, int i, int k) {
  const int n = basis.n();
  check_indices(n, i, k);
  if (expansion.order < 2) throw ParseError("nonlinear PMISPF needs a normal form of order >= 2");
  const Eigen::MatrixXcd Psi = basis.Psi();
  const cplx phi_ki = basis.Phi()(k, i);
  return run_estimator(dist, n, [&](const Eigen::VectorXd& x0) -> std::optional<cplx> {
    if (std::abs(x0[k]) < dist.guard * x0.norm()) return std::nullopt;
    const cplx z = z_from_state(expansion, Psi, x0.cast<cplx>())[i];
    return z * phi_ki / x0[k];
  });
}

Estimate modified_psimpf(const ModalBasis& basis, const NormalFormExpansion* expansion,
                         const InitialDistribution& dist, int i, int k) {
  const int n = basis.n();
  check_indices(n, i, k);
  if (dist.samples == 0) throw EstimationError("no samples requested");
  const Eigen::MatrixXcd Psi = basis.Psi();
  const cplx psi_ik = Psi(i, k);
  std::vector<double> num, den;
  num.reserve(dist.samples);
  den.reserve(dist.samples);
  for (std::size_t s = 0; s < dist.samples; ++s) {
    const Eigen::VectorXd x0 = dist.draw(n, s);
    const cplx z = z_component(basis, Psi, expansion, x0, i);
    const cplx state_part = psi_ik * x0[k];
    num.push_back(2.0 * (std::conj(state_part) * z).real());
    den.push_back(2.0 * std::norm(z));
  }
  const double count = static_cast<double>(dist.samples);
  const double mean_num = pairwise_sum(std::span<const double>(num)) / count;
  const double mean_den = pairwise_sum(std::span<const double>(den)) / count;
  if (mean_den < 1e-14) throw EstimationError("mode energy estimate is below 1e-14");
  Estimate e;
  e.seed = dist.seed;
  e.admitted = dist.samples;
  e.value = mean_num / mean_den;
  if (dist.samples > 1) {
    // Delta method for a ratio of means.
    const double ratio = e.value.real();
    std::vector<double> resid;
    resid.reserve(dist.samples);
    for (std::size_t s = 0; s < dist.samples; ++s) {
      const double r = num[s] - ratio * den[s];
      resid.push_back(r * r);
    }
    const double var = pairwise_sum(std::span<const double>(resid)) / (count - 1.0);
    e.std_error = std::sqrt(var / count) / mean_den;
  }
  return e;
}

Estimate datadriven_pf(const KoopmanBasis& koopman, const InitialDistribution& dist, int i, int k) {
  const int n = koopman.n();
  check_indices(n, i, k);
  const Eigen::RowVectorXcd u_i = koopman.u.row(i);
  const cplx v_ki = koopman.v(k, i);
  return run_estimator(dist, n, [&](const Eigen::VectorXd& gamma0) -> std::optional<cplx> {
    if (std::abs(gamma0[k]) < dist.guard * gamma0.norm()) return std::nullopt;
    return (u_i * gamma0.cast<cplx>())(0, 0) * v_ki / gamma0[k];
  });
}

std::string estimate_json(const Estimate& e, const std::string& which, int i, int k) {
  nlohmann::json doc{{"which", which},
                     {"mode", i + 1},
                     {"state", k + 1},
                     {"estimate", {e.value.real(), e.value.imag()}},
                     {"stderr", e.std_error},
                     {"admitted", e.admitted},
                     {"rejected", e.rejected},
                     {"rejection_rate", e.rejection_rate()},
                     {"seed", e.seed}};
  return doc.dump();
}

}  // namespace modalpf
