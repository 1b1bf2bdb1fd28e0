#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace modalpf {

/// Uniform time grid t_j = t0 + j * dt, j = 0..count-1.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 1e-3;
  std::size_t count = 0;

  double at(std::size_t j) const { return t0 + static_cast<double>(j) * dt; }

  /// Grid covering [0, T] with step dt (count = round(T/dt) + 1).
  static TimeGrid span(double dt, double T);
};

enum class Provenance { integrated, reconstructed, mode_component };

std::string to_string(Provenance p);

struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<Eigen::VectorXd> samples;
  Provenance provenance = Provenance::integrated;

  std::size_t size() const { return samples.size(); }
  double time(std::size_t j) const { return t0 + static_cast<double>(j) * dt; }
};

/// CSV with header `t,x1,...,xn`, 17 significant digits.
std::string trajectory_csv(const Trajectory& traj);

/// Max over samples and states of |a - b|. Trajectories must share the grid.
double max_abs_difference(const Trajectory& a, const Trajectory& b);

}  // namespace modalpf
