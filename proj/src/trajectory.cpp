#include "modalpf/trajectory.hpp"

#include <cmath>
#include <sstream>

#include "modalpf/errors.hpp"
#include "modalpf/io.hpp"

namespace modalpf {

TimeGrid TimeGrid::span(double dt, double T) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw ParseError("time grid needs dt > 0 and T >= 0");
  return TimeGrid{0.0, dt, static_cast<std::size_t>(std::llround(T / dt)) + 1};
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::integrated:
      return "integrated";
    case Provenance::reconstructed:
      return "reconstructed";
    case Provenance::mode_component:
      return "mode-component";
  }
  return "?";
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  const Eigen::Index n = traj.samples.empty() ? 0 : traj.samples.front().size();
  out << 't';
  for (Eigen::Index k = 0; k < n; ++k) out << ",x" << k + 1;
  out << '\n';
  for (std::size_t j = 0; j < traj.samples.size(); ++j) {
    out << format_real(traj.time(j));
    for (Eigen::Index k = 0; k < n; ++k) out << ',' << format_real(traj.samples[j][k]);
    out << '\n';
  }
  return out.str();
}

double max_abs_difference(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) throw ParseError("trajectories have different lengths");
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    worst = std::max(worst, (a.samples[j] - b.samples[j]).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace modalpf
