#include <doctest.h>

#include <numeric>
#include <random>

#include <json.hpp>

#include "modalpf/errors.hpp"
#include "modalpf/koopman.hpp"
#include "modalpf/pf.hpp"
#include "modalpf/sampling.hpp"
#include "modalpf/sim.hpp"
#include "modalpf/variants.hpp"
#include "support.hpp"

using namespace modalpf;

namespace {

InitialDistribution sphere(std::uint64_t seed, std::size_t samples = 20000) {
  InitialDistribution d;
  d.seed = seed;
  d.samples = samples;
  return d;
}

InitialDistribution point(const Eigen::VectorXd& x) {
  InitialDistribution d;
  d.kind = DistributionKind::point;
  d.point = x;
  d.samples = 5;
  return d;
}

Eigen::MatrixXd diag12() {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  return A;
}

}  // namespace

TEST_SUITE("variants") {

TEST_CASE("sampling streams and draws") {
  auto a = SplitMix64::stream(9, 3);
  auto b = SplitMix64::stream(9, 3);
  auto c = SplitMix64::stream(9, 4);
  const auto va = a();
  CHECK(va == b());
  CHECK(va != c());
  for (int t = 0; t < 1000; ++t) {
    const double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }

  InitialDistribution d = sphere(1);
  d.radius = 2.5;
  for (std::size_t j = 0; j < 200; ++j) CHECK(d.draw(5, j).norm() == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(d.draw(5, 17) == d.draw(5, 17));
  d.kind = DistributionKind::componentwise_uniform;
  for (std::size_t j = 0; j < 200; ++j) CHECK(d.draw(3, j).cwiseAbs().maxCoeff() <= 2.5);

  CHECK(parse_distribution("sphere") == DistributionKind::uniform_sphere);
  CHECK(parse_distribution("componentwise-uniform") == DistributionKind::componentwise_uniform);
  CHECK_THROWS_AS(parse_distribution("gauss"), ParseError);
}

TEST_CASE("pairwise summation") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(100001);
  for (auto& x : v) x = u(rng) * 1e3;
  long double exact = 0.0L;
  for (double x : v) exact += x;
  CHECK(std::abs(pairwise_sum(v) - static_cast<double>(exact)) <= 1e-9);
  std::vector<std::complex<double>> w(1000, {0.5, -0.25});
  CHECK(std::abs(pairwise_sum(w) - std::complex<double>(500, -250)) <= 1e-12);
}

TEST_CASE("degenerate distribution gives the PF itself") {
  const auto b = apply_scheme(eigendecompose(testsupport::example_a()), Scheme::I);
  const Eigen::MatrixXcd P = linear_pf(b.Phi(), b.Psi());
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 4; ++i) {
      const auto e = pmispf(b, point(Eigen::VectorXd::Unit(4, k)), i, k);
      CHECK(std::abs(e.value - P(k, i)) <= 1e-15);
      CHECK(e.std_error <= 1e-15);
      CHECK(e.admitted == 5);
    }
  }
}

TEST_CASE("decoupled system") {
  const auto b = apply_scheme(eigendecompose(diag12()), Scheme::II);
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      const bool own = std::abs(b.Psi()(i, k)) > 0.5;
      const double expect = own ? 1.0 : 0.0;
      const auto ps = psimpf(b, nullptr, sphere(3, 2000), i, k);
      CHECK(std::abs(ps.value - expect) <= 1e-12);
      const auto mp = modified_psimpf(b, nullptr, sphere(3, 2000), i, k);
      CHECK(std::abs(mp.value - expect) <= 1e-12);
      CHECK(mp.value.imag() == 0.0);
    }
  }
}

TEST_CASE("pmispf doubles with theta") {
  const auto refs = eigendecompose(testsupport::example_a());
  const auto b1 = apply_scheme(refs, Scheme::II);
  const auto b2 = apply_theta(refs, Eigen::VectorXcd::Constant(4, 2.0));
  for (int i = 0; i < 4; ++i) {
    const auto e1 = pmispf(b1, sphere(5), i, 0);
    const auto e2 = pmispf(b2, sphere(5), i, 0);
    CHECK(std::abs(e2.value - 2.0 * e1.value) <= 1e-12 * std::abs(e1.value));
  }
}

TEST_CASE("psimpf ignores xi rescaling") {
  const auto refs = eigendecompose(testsupport::example_a());
  const auto base = apply_scheme(refs, Scheme::I);
  std::mt19937_64 rng(67);
  // Real modes accept any complex c; conjugate pairs only real c (the paired-
  // conjugate ratio is not invariant under a phase rotation of xi).
  const Eigen::VectorXcd c = testsupport::random_factors(refs, rng, true);
  const auto scaled = apply_scaling(refs, base.sigma, base.xi.cwiseProduct(c));
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) {
      const auto a = psimpf(base, nullptr, sphere(7, 5000), i, k);
      const auto s = psimpf(scaled, nullptr, sphere(7, 5000), i, k);
      CHECK(testsupport::rel(a.value, s.value, 1e-300) <= 1e-12);
      CHECK(a.admitted == s.admitted);
    }
  }
  // Modified PSIMPF also tolerates complex c on conjugate pairs.
  const Eigen::VectorXcd cc = testsupport::random_factors(refs, rng);
  const auto scaled2 = apply_scaling(refs, base.sigma, base.xi.cwiseProduct(cc));
  for (int i = 0; i < 4; ++i) {
    const auto a = modified_psimpf(base, nullptr, sphere(7, 5000), i, 1);
    const auto s = modified_psimpf(scaled2, nullptr, sphere(7, 5000), i, 1);
    CHECK(std::abs(a.value - s.value) <= 1e-12 * std::max(1.0, std::abs(a.value)));
  }
}

TEST_CASE("nonlinear pmispf") {
  // Linear system: no correction, so it is the plain PMISPF.
  const auto lin = testsupport::example1();
  const auto lb = apply_scheme(eigendecompose(lin), Scheme::II);
  const auto lexp = build_expansion(lin, lb);
  for (int i = 0; i < 4; ++i) {
    const auto a = pmispf(lb, sphere(11, 5000), i, 2);
    const auto n = nonlinear_pmispf(lb, lexp, sphere(11, 5000), i, 2);
    CHECK(std::abs(a.value - n.value) <= 1e-14);
  }

  // Degenerate draw at e_k reproduces the first-order nonlinear PF with alpha = 1.
  const auto sys = testsupport::example2();
  const auto b = apply_scheme(eigendecompose(sys), Scheme::II);
  const auto exp = build_expansion(sys, b);
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 4; ++i) {
      const auto e = nonlinear_pmispf(b, exp, point(Eigen::VectorXd::Unit(4, k)), i, k);
      const cplx p = nonlinear_pf(exp, b.Phi(), b.Psi(), k, {i}, 1.0).value;
      CHECK(std::abs(e.value - p) <= 1e-14);
    }
  }
}

TEST_CASE("estimators are reproducible and report rejections") {
  const auto b = apply_scheme(eigendecompose(testsupport::example_a()), Scheme::II);
  const auto a = psimpf(b, nullptr, sphere(99, 3000), 0, 1);
  const auto c = psimpf(b, nullptr, sphere(99, 3000), 0, 1);
  CHECK(a.value == c.value);
  CHECK(a.std_error == c.std_error);
  CHECK(a.admitted + a.rejected == 3000);
  CHECK(a.rejection_rate() == doctest::Approx(static_cast<double>(a.rejected) / 3000.0));
  const auto d = psimpf(b, nullptr, sphere(100, 3000), 0, 1);
  CHECK(a.value != d.value);

  InitialDistribution harsh = sphere(1, 100);
  harsh.guard = 2.0;
  CHECK_THROWS_AS(pmispf(b, harsh, 0, 0), EstimationError);
  harsh.guard = 0.0;
  CHECK_THROWS_AS(pmispf(b, harsh, 0, 0), ParseError);

  const auto doc = nlohmann::json::parse(estimate_json(a, "psimpf", 0, 1));
  CHECK(doc.contains("stderr"));
  CHECK(doc["admitted"] == a.admitted);
  CHECK(doc["seed"] == 99);
}

TEST_CASE("koopman fit on exact exponentials") {
  const PolynomialSystem sys(diag12());
  InitialDistribution d = sphere(13, 20);
  const auto snaps = ensemble(sys, d, 0.01, 10);
  CHECK(snaps.pairs() == 200);
  const auto kb = fit_koopman(snaps);
  Eigen::VectorXcd lam(2);
  lam << 2.0, 1.0;
  CHECK(std::abs(kb.eigenvalues[0] - lam[0]) <= 1e-8);
  CHECK(std::abs(kb.eigenvalues[1] - lam[1]) <= 1e-8);
  CHECK(kb.holdout_rel_error <= 1e-10);
  for (int i = 0; i < 2; ++i) {
    CHECK(kb.u.row(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs((kb.u.row(i) * kb.v.col(i))(0, 0) - 1.0) <= 1e-10);
  }

  Eigen::VectorXcd swapped(2);
  swapped << 1.0, 2.0;
  const auto order = match_modes(kb, swapped, 1e-6);
  CHECK(order == std::vector<int>{1, 0});
  const auto re = reorder(kb, order);
  CHECK(std::abs(re.eigenvalues[0] - 1.0) <= 1e-8);
  Eigen::VectorXcd far(2);
  far << 1.0, 5.0;
  CHECK_THROWS_AS(match_modes(kb, far, 1e-6), ModeMatchError);

  SnapshotSet tiny;
  tiny.X = Eigen::MatrixXd::Ones(2, 3);
  tiny.Y = Eigen::MatrixXd::Ones(2, 3);
  tiny.dt = 0.1;
  CHECK_THROWS_AS(fit_koopman(tiny), RankDeficientError);
}

TEST_CASE("datadriven PF ignores reciprocal u, v rescaling") {
  const PolynomialSystem sys(testsupport::example_a());
  const auto snaps = ensemble(sys, sphere(17, 50), 0.01, 20);
  const auto kb = fit_koopman(snaps);
  KoopmanBasis scaled = kb;
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int i = 0; i < kb.n(); ++i) {
    const cplx c = std::polar(u(rng), u(rng));
    scaled.u.row(i) *= c;
    scaled.v.col(i) /= c;
  }
  for (int i = 0; i < 4; ++i) {
    const auto a = datadriven_pf(kb, sphere(19, 5000), i, 0);
    const auto b = datadriven_pf(scaled, sphere(19, 5000), i, 0);
    CHECK(std::abs(a.value - b.value) <= 1e-12 * std::max(1.0, std::abs(a.value)));
  }
}

}
