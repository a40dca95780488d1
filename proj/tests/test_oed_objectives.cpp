#include <cmath>
#include <random>

#include "cfoed/analytic_oracle.hpp"
#include "cfoed/errors.hpp"
#include <Eigen/Eigenvalues>

#include "cfoed/oed_objectives.hpp"
#include "cfoed/sensitivity.hpp"
#include "doctest.h"
#include "support/synthetic.hpp"

using namespace cfoed;

namespace {

ExperimentDesign single(double beta) {
  ExperimentDesign d;
  d.positions = {beta};
  return d;
}

}  // namespace

TEST_CASE("prediction-sensitivity criterion examples") {
  const Mesh1D mesh = Mesh1D::uniform(16);
  const ModelProblemSpec spec{1.0, 0.0, 1.0};
  const AffineParameterizedSystem sys =
      build_case_system(CaseKind::ParameterizedBC, spec, mesh);
  const PriorSpec prior = PriorSpec::uniform(0.5, 1.5);
  const QuadratureRule quad = QuadratureRule::for_prior(prior, 8);

  const CriterionResult at_end = fisher_matrix(sys, single(1.0), prior, quad);
  CHECK(at_end.J.rows() == 1);
  CHECK(at_end.min_eig == doctest::Approx(1.0).epsilon(1e-12));

  ExperimentDesign empty;
  const CriterionResult none = fisher_matrix(sys, empty, prior, quad);
  CHECK(none.J.rows() == 1);
  CHECK(none.J(0, 0) == 0.0);
  CHECK(none.min_eig == 0.0);
}

TEST_CASE("coincident measurements leave a rank-one matrix") {
  const Mesh1D mesh = Mesh1D::uniform(12);
  const ModelProblemSpec spec{1.0, 1.0, 0.5};
  const AffineParameterizedSystem sys =
      testing::two_parameter_system(spec, mesh);
  const PriorSpec prior = testing::two_parameter_prior();
  const QuadratureRule quad = QuadratureRule::for_prior(prior, 4);

  ExperimentDesign coincident;
  coincident.positions = {0.6, 0.6, 0.6};
  coincident.min_separation = 0.0;
  const CriterionResult r = fisher_matrix(sys, coincident, prior, quad);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.J);
  CHECK(std::abs(es.eigenvalues()[0]) < 1e-12);  // rank 1 regardless of count
  CHECK(es.eigenvalues()[1] > 1e-6);

  // spread measurements make both directions identifiable
  ExperimentDesign spread;
  spread.positions = {0.35, 0.9};
  const CriterionResult r2 = fisher_matrix(sys, spread, prior, quad);
  CHECK(min_eigenpair(r2.J).mu > 1e-6);
}

TEST_CASE("constraint-force criterion examples") {
  const Mesh1D mesh = Mesh1D::uniform(16);
  const ModelProblemSpec spec{1.0, 1.0, 1.0};
  const PriorSpec prior = PriorSpec::uniform(0.5, 1.5);
  const QuadratureRule quad = QuadratureRule::for_prior(prior, 8);

  const AffineParameterizedSystem bc =
      build_case_system(CaseKind::ParameterizedBC, spec, mesh);
  const CriterionResult rb = ecfm_hessian(bc, single(0.5), prior, quad);
  CHECK(rb.min_eig == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(rb.grad_beta[0]) < 1e-8);

  const AffineParameterizedSystem source =
      build_case_system(CaseKind::ParameterizedSource, spec, mesh);
  const CriterionResult rs = ecfm_hessian(source, single(1.0), prior, quad);
  CHECK(rs.min_eig == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("integrand does not vary across quadrature nodes") {
  const Mesh1D mesh = Mesh1D::uniform(16);
  const ModelProblemSpec spec{1.2, 0.7, -0.4};
  const PriorSpec prior = PriorSpec::uniform(0.6, 1.8);
  const QuadratureRule quad = QuadratureRule::for_prior(prior, 12);
  for (CaseKind kind :
       {CaseKind::ParameterizedBC, CaseKind::ParameterizedSource,
        CaseKind::ParameterizedMaterial, CaseKind::MisspecifiedSource}) {
    const AffineParameterizedSystem sys = build_case_system(kind, spec, mesh);
    const CriterionResult r = ecfm_hessian(sys, single(0.4375), prior, quad);
    double lo = r.node_integrands.front()(0, 0);
    double hi = lo;
    for (const Eigen::MatrixXd& node : r.node_integrands) {
      lo = std::min(lo, node(0, 0));
      hi = std::max(hi, node(0, 0));
    }
    CHECK(hi - lo < 1e-10);
  }
}

TEST_CASE("data model averages the forward response") {
  const Mesh1D mesh = Mesh1D::uniform(8);
  const ModelProblemSpec spec{1.0, 0.5, 2.0};
  const AffineParameterizedSystem sys =
      build_case_system(CaseKind::ParameterizedBC, spec, mesh);

  // point prior at the consistent value reproduces the noiseless data
  const PriorSpec point = PriorSpec::point(spec.p);
  const QuadratureRule one = QuadratureRule::for_prior(point, 1);
  const DataVector exact = data_model(sys, single(0.5), point, one);
  CHECK(exact.values[0] ==
        doctest::Approx(oracle::data_at(spec, 0.5)).epsilon(1e-12));

  // traction averaged over U(1,3) with k=1, b=0: response at 1 averages to 2
  const ModelProblemSpec plain{1.0, 0.0, 0.0};
  const AffineParameterizedSystem bc =
      build_case_system(CaseKind::ParameterizedBC, plain, mesh);
  const PriorSpec uniform = PriorSpec::uniform(1.0, 3.0);
  const QuadratureRule quad = QuadratureRule::for_prior(uniform, 8);
  const DataVector averaged = data_model(bc, single(1.0), uniform, quad);
  CHECK(averaged.values[0] == doctest::Approx(2.0).epsilon(1e-12));

  ExperimentDesign empty;
  CHECK(data_model(bc, empty, uniform, quad).values.size() == 0);
}

TEST_CASE("both criteria match the closed forms at nodal positions") {
  const Mesh1D mesh = Mesh1D::uniform(32);
  const ModelProblemSpec spec{1.3, -0.8, 0.9};
  for (CaseKind kind :
       {CaseKind::ParameterizedBC, CaseKind::ParameterizedSource,
        CaseKind::ParameterizedMaterial, CaseKind::MisspecifiedSource}) {
    const AffineParameterizedSystem sys = build_case_system(kind, spec, mesh);
    // the material case needs the data model centered on the true stiffness
    const PriorSpec prior =
        kind == CaseKind::ParameterizedMaterial
            ? PriorSpec::point(spec.k)
            : PriorSpec::uniform(0.4, 1.6);
    const QuadratureRule quad = QuadratureRule::for_prior(
        prior, prior.marginals[0].kind == PriorSpec::Kind::Point ? 1 : 8);
    const CriterionEvaluator evaluator(sys, prior, quad);
    for (double beta : {0.25, 0.5, 0.8125, 1.0}) {
      const double ecfm_expected =
          oracle::ecfm_design_objective(kind, spec, prior, beta);
      const double fisher_expected =
          oracle::fisher_design_objective(kind, spec, prior, beta);
      CHECK(std::abs(evaluator.ecfm(single(beta), false).min_eig -
                     ecfm_expected) < 1e-8);
      CHECK(std::abs(evaluator.fisher(single(beta), false).min_eig -
                     fisher_expected) < 1e-8);
    }
  }
}

TEST_CASE("material sensitivity criterion with a uniform prior") {
  const Mesh1D mesh = Mesh1D::uniform(32);
  const ModelProblemSpec spec{1.0, 1.0, 1.0};
  const AffineParameterizedSystem sys =
      build_case_system(CaseKind::ParameterizedMaterial, spec, mesh);
  const PriorSpec prior = PriorSpec::uniform(1.0, 3.0);
  const QuadratureRule quad = QuadratureRule::for_prior(prior, 16);
  const CriterionEvaluator evaluator(sys, prior, quad);
  for (double beta : {0.25, 0.75, 1.0}) {
    CHECK(std::abs(evaluator.fisher(single(beta), false).min_eig -
                   oracle::fisher_design_objective(
                       CaseKind::ParameterizedMaterial, spec, prior, beta)) <
          1e-8);
  }
}

TEST_CASE("criterion matrix is positive semidefinite") {
  std::mt19937_64 gen(53);
  const Mesh1D mesh = Mesh1D::uniform(16);
  const ModelProblemSpec spec{1.0, 1.0, 0.5};
  const AffineParameterizedSystem sys =
      testing::two_parameter_system(spec, mesh);
  const double h = mesh.min_element_width();
  std::uniform_int_distribution<int> count(1, 4);
  for (int rep = 0; rep < 100; ++rep) {
    const PriorSpec prior = (rep % 2 == 0)
                                ? testing::two_parameter_prior()
                                : PriorSpec::gaussian(1.1, 0.05)
                                      .and_gaussian(1.0, 0.2);
    const QuadratureRule quad = QuadratureRule::for_prior(prior, 4);
    const ExperimentDesign design =
        testing::random_design(gen, count(gen), h, 1.0, h);
    const CriterionResult r = fisher_matrix(sys, design, prior, quad);
    CHECK(r.min_eig >= -1e-12);
    CHECK((r.J - r.J.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("criterion gradients match value differences") {
  const Mesh1D mesh = Mesh1D::uniform(16);
  const ModelProblemSpec spec{1.0, 1.0, 1.0};
  const PriorSpec prior = PriorSpec::uniform(0.7, 1.3);
  const QuadratureRule quad = QuadratureRule::for_prior(prior, 8);
  const double delta = 1e-6;

  for (CaseKind kind :
       {CaseKind::ParameterizedSource, CaseKind::ParameterizedMaterial}) {
    const PriorSpec used =
        kind == CaseKind::ParameterizedMaterial ? PriorSpec::point(1.0) : prior;
    const QuadratureRule used_quad = QuadratureRule::for_prior(
        used, used.marginals[0].kind == PriorSpec::Kind::Point ? 1 : 8);
    const AffineParameterizedSystem sys = build_case_system(kind, spec, mesh);
    const CriterionEvaluator evaluator(sys, used, used_quad);
    for (double beta : {0.28125, 0.656250}) {  // mid-element positions
      for (bool fisher : {true, false}) {
        auto value = [&](double b) {
          return fisher ? evaluator.fisher(single(b), false).min_eig
                        : evaluator.ecfm(single(b), false).min_eig;
        };
        const CriterionResult r = fisher
                                      ? evaluator.fisher(single(beta), true)
                                      : evaluator.ecfm(single(beta), true);
        const double fd = (value(beta + delta) - value(beta - delta)) /
                          (2.0 * delta);
        const double denom = std::max({std::abs(fd), std::abs(r.grad_beta[0]),
                                       1e-6});
        CHECK(std::abs(r.grad_beta[0] - fd) / denom < 1e-6);
      }
    }
  }

  // two measurements, two parameters: full gradient vector
  const AffineParameterizedSystem two =
      testing::two_parameter_system(spec, mesh);
  const PriorSpec tp = testing::two_parameter_prior();
  const QuadratureRule tq = QuadratureRule::for_prior(tp, 4);
  const CriterionEvaluator evaluator(two, tp, tq);
  ExperimentDesign design;
  design.positions = {0.28125, 0.656250};
  for (bool fisher : {true, false}) {
    const CriterionResult r = fisher ? evaluator.fisher(design, true)
                                     : evaluator.ecfm(design, true);
    for (int K = 0; K < 2; ++K) {
      auto value = [&](double shift) {
        ExperimentDesign d = design;
        d.positions[static_cast<std::size_t>(K)] += shift;
        return fisher ? evaluator.fisher(d, false).min_eig
                      : evaluator.ecfm(d, false).min_eig;
      };
      const double fd = (value(delta) - value(-delta)) / (2.0 * delta);
      const double denom =
          std::max({std::abs(fd), std::abs(r.grad_beta[K]), 1e-6});
      CHECK(std::abs(r.grad_beta[K] - fd) / denom < 1e-6);
    }
  }
}

TEST_CASE("criterion value does not depend on the prior") {
  const Mesh1D mesh = Mesh1D::uniform(16);
  const ModelProblemSpec spec{1.1, 0.9, -0.3};
  // load-parameterized cases: any two priors agree
  for (CaseKind kind :
       {CaseKind::ParameterizedBC, CaseKind::ParameterizedSource,
        CaseKind::MisspecifiedSource}) {
    const AffineParameterizedSystem sys = build_case_system(kind, spec, mesh);
    const PriorSpec a = PriorSpec::uniform(-1.0, 2.0);
    const PriorSpec b = PriorSpec::gaussian(0.4, 0.7);
    const CriterionResult ra =
        ecfm_hessian(sys, single(0.59), a, QuadratureRule::for_prior(a, 12));
    const CriterionResult rb =
        ecfm_hessian(sys, single(0.59), b, QuadratureRule::for_prior(b, 12));
    CHECK(std::abs(ra.min_eig - rb.min_eig) < 1e-10);
  }
  // the material case's data model scales with E[1/eps]; match the
  // harmonic mean and the values coincide
  {
    const AffineParameterizedSystem sys =
        build_case_system(CaseKind::ParameterizedMaterial, spec, mesh);
    const double lo = 0.8, hi = 2.0;
    const PriorSpec a = PriorSpec::uniform(lo, hi);
    const double harmonic = (hi - lo) / std::log(hi / lo);
    const PriorSpec b = PriorSpec::point(harmonic);
    const CriterionResult ra =
        ecfm_hessian(sys, single(0.59), a, QuadratureRule::for_prior(a, 32));
    const CriterionResult rb =
        ecfm_hessian(sys, single(0.59), b, QuadratureRule::for_prior(b, 1));
    CHECK(std::abs(ra.min_eig - rb.min_eig) < 1e-10);
  }
}

TEST_CASE("infeasible quadrature nodes are reported by index") {
  const Mesh1D mesh = Mesh1D::uniform(8);
  const ModelProblemSpec spec{1.0, 1.0, 1.0};
  const AffineParameterizedSystem sys =
      build_case_system(CaseKind::ParameterizedMaterial, spec, mesh);
  const PriorSpec bad = PriorSpec::uniform(-1.0, 1.0);  // crosses zero
  const QuadratureRule quad = QuadratureRule::for_prior(bad, 6);
  CHECK_THROWS_WITH_AS(
      (void)CriterionEvaluator(sys, bad, quad),
      doctest::Contains("quadrature node"), assembly_error);
}
