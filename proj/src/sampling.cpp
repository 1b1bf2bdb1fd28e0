#include "modalpf/sampling.hpp"

#include <cmath>
#include <numbers>

#include "modalpf/errors.hpp"

namespace modalpf {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

SplitMix64 SplitMix64::stream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(mix64(seed) ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

SplitMix64::result_type SplitMix64::operator()() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

double SplitMix64::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double SplitMix64::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::uniform_sphere:
      return "uniform-sphere";
    case DistributionKind::componentwise_uniform:
      return "componentwise-uniform";
    case DistributionKind::point:
      return "point";
  }
  return "?";
}

DistributionKind parse_distribution(const std::string& s) {
  if (s == "uniform-sphere" || s == "sphere") return DistributionKind::uniform_sphere;
  if (s == "componentwise-uniform" || s == "cube") return DistributionKind::componentwise_uniform;
  if (s == "point") return DistributionKind::point;
  throw ParseError("unknown distribution '" + s + "'");
}

Eigen::VectorXd InitialDistribution::draw(int n, std::size_t index) const {
  SplitMix64 rng = SplitMix64::stream(seed, index);
  Eigen::VectorXd x(n);
  switch (kind) {
    case DistributionKind::uniform_sphere: {
      double norm = 0.0;
      do {
        for (int j = 0; j < n; ++j) x[j] = rng.normal();
        norm = x.norm();
      } while (norm == 0.0);
      return x * (radius / norm);
    }
    case DistributionKind::componentwise_uniform:
      for (int j = 0; j < n; ++j) x[j] = radius * (2.0 * rng.uniform() - 1.0);
      return x;
    case DistributionKind::point:
      if (point.size() != n) throw ParseError("point distribution has wrong dimension");
      return point;
  }
  return x;
}

namespace {

template <typename T>
T pairwise(std::span<const T> v) {
  if (v.size() <= 8) {
    T s{};
    for (const T& x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise(v.first(half)) + pairwise(v.subspan(half));
}

}  // namespace

double pairwise_sum(std::span<const double> values) { return pairwise(values); }

std::complex<double> pairwise_sum(std::span<const std::complex<double>> values) {
  return pairwise(values);
}

}  // namespace modalpf
