#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "modalpf/koopman.hpp"
#include "modalpf/model.hpp"
#include "modalpf/sampling.hpp"
#include "modalpf/trajectory.hpp"

namespace modalpf {

/// Classical fixed-step RK4 from x0 over [0, T]. Throws DivergenceError when
/// the state norm exceeds 1e12 or becomes non-finite.
Trajectory integrate(const PolynomialSystem& sys, const Eigen::VectorXd& x0, double dt, double T);

/// alpha * e_k (k 0-based).
Eigen::VectorXd perturb_state(int n, int k, double alpha);

/// Integrates one member per sample of `dist` for `steps` steps and records
/// every (x_t, x_{t+dt}) pair. Divergent members are skipped and counted.
SnapshotSet ensemble(const PolynomialSystem& sys, const InitialDistribution& dist, double dt,
                     std::size_t steps);

}  // namespace modalpf
