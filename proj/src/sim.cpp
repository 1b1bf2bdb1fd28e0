#include "modalpf/sim.hpp"

#include <cmath>
#include <vector>

#include "modalpf/errors.hpp"

namespace modalpf {

namespace {

constexpr double kDivergenceNorm = 1e12;

Eigen::VectorXd rk4_step(const PolynomialSystem& sys, const Eigen::VectorXd& x, double dt) {
  const Eigen::VectorXd k1 = sys.evaluate_rhs(x);
  const Eigen::VectorXd k2 = sys.evaluate_rhs(x + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = sys.evaluate_rhs(x + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = sys.evaluate_rhs(x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

bool diverged(const Eigen::VectorXd& x) {
  return !x.allFinite() || x.norm() > kDivergenceNorm;
}

// Advances with RK4, invoking on_step(j, x_j) for j = 1..steps.
template <typename OnStep>
void march(const PolynomialSystem& sys, Eigen::VectorXd x, double dt, std::size_t steps,
           OnStep&& on_step) {
  for (std::size_t j = 1; j <= steps; ++j) {
    Eigen::VectorXd next;
    try {
      next = rk4_step(sys, x, dt);
    } catch (const ParseError&) {
      // evaluate_rhs rejects non-finite intermediate stages
      throw DivergenceError("integration produced a non-finite state", j - 1);
    }
    if (diverged(next)) {
      throw DivergenceError("state norm exceeded 1e12 after step " + std::to_string(j), j - 1);
    }
    on_step(j, next);
    x = std::move(next);
  }
}

}  // namespace

Trajectory integrate(const PolynomialSystem& sys, const Eigen::VectorXd& x0, double dt, double T) {
  if (!(dt > 0.0)) throw ParseError("dt must be positive");
  if (!(T >= dt)) throw ParseError("T must be at least dt");
  if (x0.size() != sys.n() || !x0.allFinite()) throw ParseError("invalid initial state");
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  Trajectory traj;
  traj.t0 = 0.0;
  traj.dt = dt;
  traj.provenance = Provenance::integrated;
  traj.samples.reserve(steps + 1);
  traj.samples.push_back(x0);
  march(sys, x0, dt, steps, [&](std::size_t, const Eigen::VectorXd& x) { traj.samples.push_back(x); });
  return traj;
}

Eigen::VectorXd perturb_state(int n, int k, double alpha) {
  if (k < 0 || k >= n) throw ParseError("perturbed state index out of range");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  x[k] = alpha;
  return x;
}

SnapshotSet ensemble(const PolynomialSystem& sys, const InitialDistribution& dist, double dt,
                     std::size_t steps) {
  if (!(dt > 0.0)) throw ParseError("dt must be positive");
  if (steps == 0) throw ParseError("steps must be positive");
  const int n = sys.n();
  std::vector<Eigen::VectorXd> xs, ys;
  SnapshotSet set;
  set.dt = dt;
  for (std::size_t member = 0; member < dist.samples; ++member) {
    const Eigen::VectorXd x0 = dist.draw(n, member);
    std::vector<Eigen::VectorXd> path{x0};
    try {
      march(sys, x0, dt, steps, [&](std::size_t, const Eigen::VectorXd& x) { path.push_back(x); });
    } catch (const DivergenceError&) {
      ++set.diverged;
      continue;
    }
    for (std::size_t j = 0; j < steps; ++j) {
      xs.push_back(path[j]);
      ys.push_back(path[j + 1]);
    }
  }
  set.members = dist.samples - set.diverged;
  set.X.resize(n, static_cast<Eigen::Index>(xs.size()));
  set.Y.resize(n, static_cast<Eigen::Index>(ys.size()));
  for (std::size_t j = 0; j < xs.size(); ++j) {
    set.X.col(static_cast<Eigen::Index>(j)) = xs[j];
    set.Y.col(static_cast<Eigen::Index>(j)) = ys[j];
  }
  return set;
}

}  // namespace modalpf
