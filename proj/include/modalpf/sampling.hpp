#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>

#include <Eigen/Dense>

namespace modalpf {

/// SplitMix64, used as a counter-based stream: stream(seed, i) gives sample i
/// its own generator, so results do not depend on evaluation order.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal (Box-Muller on two uniforms).
  double normal();

 private:
  std::uint64_t state_;
};

enum class DistributionKind {
  uniform_sphere,         // uniform on the sphere of `radius`
  componentwise_uniform,  // uniform in [-radius, radius]^n
  point,                  // always `point` (degenerate; for checks)
};

std::string to_string(DistributionKind kind);
DistributionKind parse_distribution(const std::string& s);

struct InitialDistribution {
  DistributionKind kind = DistributionKind::uniform_sphere;
  double radius = 1.0;
  /// Ratio estimators reject samples whose denominator magnitude is below
  /// guard * (scale of the sample).
  double guard = 0.1;
  std::uint64_t seed = 0;
  std::size_t samples = 10000;
  Eigen::VectorXd point;

  /// Sample `index` of an n-dimensional draw. Symmetric about the origin
  /// except for the `point` kind.
  Eigen::VectorXd draw(int n, std::size_t index) const;
};

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);
std::complex<double> pairwise_sum(std::span<const std::complex<double>> values);

}  // namespace modalpf
