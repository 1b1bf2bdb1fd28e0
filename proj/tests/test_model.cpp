#include <doctest.h>

#include <random>

#include "modalpf/errors.hpp"
#include "modalpf/model.hpp"
#include "modalpf/multi_index.hpp"
#include "support.hpp"

using namespace modalpf;

TEST_SUITE("model") {

TEST_CASE("canonical multi-index helpers") {
  CHECK(canonical({2, 0, 1}) == MultiIndex{0, 1, 2});
  CHECK(is_canonical({0, 0, 3}));
  CHECK_FALSE(is_canonical({1, 0}));
  CHECK(ordering_count({0, 1}) == 2);
  CHECK(ordering_count({0, 0}) == 1);
  CHECK(ordering_count({0, 1, 1}) == 3);
  CHECK(ordering_count({0, 1, 2}) == 6);
  CHECK(canonical_count(4, 2) == 10);
  CHECK(canonical_count(3, 3) == 10);

  std::vector<MultiIndex> seen;
  for_each_canonical(3, 2, [&](const MultiIndex& t) { seen.push_back(t); });
  REQUIRE(seen.size() == 6);
  CHECK(seen.front() == MultiIndex{0, 0});
  CHECK(seen.back() == MultiIndex{2, 2});
  CHECK(std::is_sorted(seen.begin(), seen.end()));
  CHECK(format_one_based({0, 2}) == "1+3");
}

TEST_CASE("parse example models") {
  const auto ex1 = load_model(testsupport::data_path("ex1.json"));
  CHECK(ex1.n() == 4);
  CHECK(ex1.max_order() == 1);
  CHECK(ex1.A().isApprox(testsupport::example_a()));

  const auto ex2 = load_model(testsupport::data_path("ex2.json"));
  CHECK(ex2.max_order() == 2);
  REQUIRE(ex2.tensor(2).size() == 1);
  CHECK(ex2.tensor(2).at({2, {0, 2}}) == -2.0);
  CHECK(ex2 == testsupport::example2());
}

TEST_CASE("symmetric entries fold by summation") {
  const auto sys = parse_model(R"({"n": 4, "A": )" + std::string(testsupport::kExampleA) + R"(,
    "tensors": [{"order": 2, "entries": [
      {"k": 3, "index": [1, 3], "coeff": -1},
      {"k": 3, "index": [3, 1], "coeff": -1}]}]})");
  REQUIRE(sys.tensor(2).size() == 1);
  CHECK(sys.tensor(2).at({2, {0, 2}}) == -2.0);
}

TEST_CASE("evaluate_rhs") {
  const auto ex2 = testsupport::example2();
  Eigen::VectorXd x(4);
  x << 1, 0, 1, 0;
  Eigen::VectorXd expect(4);
  expect << 1, 0, -23, 5;
  CHECK((ex2.evaluate_rhs(x) - expect).norm() == 0.0);
  CHECK(ex2.evaluate_rhs(Eigen::VectorXd::Zero(4)).norm() == 0.0);

  const auto ex1 = testsupport::example1();
  Eigen::VectorXd col(4);
  col << 0, 0, -20, 5;
  CHECK(ex1.evaluate_rhs(Eigen::VectorXd::Unit(4, 0)) == col);

  CHECK_THROWS_AS(ex1.evaluate_rhs(Eigen::VectorXd::Constant(4, NAN)), ParseError);
  CHECK_THROWS_AS(ex1.evaluate_rhs(Eigen::VectorXd::Zero(3)), ParseError);
}

TEST_CASE("linear systems evaluate to A x exactly") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(5, 5);
  for (int i = 0; i < 25; ++i) A.data()[i] = g(rng);
  const PolynomialSystem sys(A);
  for (int t = 0; t < 1000; ++t) {
    Eigen::VectorXd x(5);
    for (int i = 0; i < 5; ++i) x[i] = g(rng);
    const Eigen::VectorXd ref = A * x;
    REQUIRE((sys.evaluate_rhs(x) - ref).cwiseAbs().maxCoeff() <= 1e-15 * (1 + ref.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("rhs is linear in each coefficient") {
  std::mt19937_64 rng(3);
  const auto sys = testsupport::random_system(rng, 3, 3);
  Eigen::VectorXd x(3);
  x << 0.3, -0.7, 1.1;
  for (const auto& [order, table] : sys.tensors()) {
    for (const auto& [key, coeff] : table) {
      PolynomialSystem doubled = sys;
      doubled.add_term(key.row, key.index, coeff);
      double mono = coeff;
      for (int v : key.index) mono *= x[v];
      const Eigen::VectorXd delta = doubled.evaluate_rhs(x) - sys.evaluate_rhs(x);
      CHECK(delta[key.row] == doctest::Approx(mono).epsilon(1e-12));
      CHECK(delta.norm() == doctest::Approx(std::abs(mono)).epsilon(1e-12));
    }
  }
}

TEST_CASE("serialize round trip is idempotent") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto sys = testsupport::random_system(rng, 4, 3);
    const auto once = parse_model(serialize_model(sys));
    CHECK(once == sys);
    CHECK(parse_model(serialize_model(once)) == once);
  }
}

TEST_CASE("malformed models are rejected") {
  const std::string A = testsupport::kExampleA;
  CHECK_THROWS_AS(parse_model("{not json"), ParseError);
  CHECK_THROWS_AS(parse_model(R"({"n": 3, "A": )" + A + "}"), ParseError);
  CHECK_THROWS_AS(parse_model(R"({"n": 2, "A": [[1, 2], [3]]})"), ParseError);
  CHECK_THROWS_AS(parse_model(R"({"n": 1, "A": [[1]], "tensors": [{"order": 2, "entries": [
      {"k": 1, "index": [1, 2], "coeff": 1}]}]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_model(R"({"n": 1, "A": [[1]], "tensors": [{"order": 2, "entries": [
      {"k": 0, "index": [1, 1], "coeff": 1}]}]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_model(R"({"n": 1, "A": [[1]], "tensors": [{"order": 3, "entries": [
      {"k": 1, "index": [1, 1], "coeff": 1}]}]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_model(R"({"n": 1, "A": [[1]], "tensors": [{"order": 2, "entries": [
      {"k": 1, "index": [1, 1], "coeff": "x"}]}]})"),
                  ParseError);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), ParseError);

  PolynomialSystem sys(Eigen::MatrixXd::Identity(2, 2));
  CHECK_THROWS_AS(sys.add_term(0, {0, 1}, NAN), ParseError);
  CHECK_THROWS_AS(sys.add_term(0, {0}, 1.0), ParseError);
  CHECK_THROWS_AS(PolynomialSystem(Eigen::MatrixXd::Zero(2, 3)), ParseError);
}

}
