#include <cmath>

#include "cfoed/errors.hpp"
#include "cfoed/prior.hpp"
#include "doctest.h"

using namespace cfoed;

TEST_CASE("legendre rule integrates polynomials up to degree 2n-1") {
  for (int n : {1, 2, 5, 16}) {
    auto [x, w] = gauss_legendre_rule(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += w[i] * std::pow(x[i], k);
      const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
      CHECK(acc == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("hermite rule reproduces gaussian moments") {
  auto [x, w] = gauss_hermite_rule(12);
  double m0 = 0.0, m2 = 0.0, m4 = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    m0 += w[i];
    m2 += w[i] * x[i] * x[i];
    m4 += w[i] * std::pow(x[i], 4);
  }
  const double sqrt_pi = std::sqrt(M_PI);
  CHECK(m0 == doctest::Approx(sqrt_pi).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(0.5 * sqrt_pi).epsilon(1e-13));
  CHECK(m4 == doctest::Approx(0.75 * sqrt_pi).epsilon(1e-13));
}

TEST_CASE("uniform prior expectations") {
  const PriorSpec prior = PriorSpec::uniform(2.0, 5.0);
  const QuadratureRule rule = QuadratureRule::for_prior(prior, 8);
  CHECK(rule.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
  const double mean = rule.expectation([](const Eigen::VectorXd& e) { return e[0]; });
  CHECK(mean == doctest::Approx(3.5).epsilon(1e-13));
  const double second =
      rule.expectation([](const Eigen::VectorXd& e) { return e[0] * e[0]; });
  // E[x^2] over U(2,5) = (5^3 - 2^3) / (3 * 3)
  CHECK(second == doctest::Approx(117.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("gaussian prior expectations") {
  const PriorSpec prior = PriorSpec::gaussian(1.5, 0.25);
  const QuadratureRule rule = QuadratureRule::for_prior(prior, 10);
  const double mean = rule.expectation([](const Eigen::VectorXd& e) { return e[0]; });
  const double second =
      rule.expectation([](const Eigen::VectorXd& e) { return e[0] * e[0]; });
  CHECK(mean == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(second == doctest::Approx(1.5 * 1.5 + 0.0625).epsilon(1e-12));
}

TEST_CASE("point prior collapses to a single node") {
  const QuadratureRule rule =
      QuadratureRule::for_prior(PriorSpec::point(2.25), 16);
  REQUIRE(rule.point_count() == 1);
  CHECK(rule.nodes(0, 0) == 2.25);
  CHECK(rule.weights[0] == 1.0);
}

TEST_CASE("tensor product over independent marginals") {
  PriorSpec prior = PriorSpec::uniform(0.0, 1.0).and_gaussian(2.0, 0.5);
  const QuadratureRule rule = QuadratureRule::for_prior(prior, 6);
  REQUIRE(rule.point_count() == 36);
  REQUIRE(rule.dimension() == 2);
  CHECK(rule.weights.sum() == doctest::Approx(1.0).epsilon(1e-13));
  const double mixed = rule.expectation(
      [](const Eigen::VectorXd& e) { return e[0] * e[1]; });
  CHECK(mixed == doctest::Approx(0.5 * 2.0).epsilon(1e-12));
}

TEST_CASE("prior validation") {
  CHECK_THROWS_AS(PriorSpec::uniform(2.0, 1.0).validate(), domain_error);
  CHECK_THROWS_AS(PriorSpec::gaussian(0.0, 0.0).validate(), domain_error);
  CHECK_NOTHROW(PriorSpec::point(-3.0).validate());
  CHECK_THROWS_AS(QuadratureRule::for_prior(PriorSpec::uniform(0, 1), 0),
                  domain_error);
}
