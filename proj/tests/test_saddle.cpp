#include <cmath>
#include <random>

#include "cfoed/analytic_oracle.hpp"
#include "cfoed/errors.hpp"
#include "cfoed/saddle.hpp"
#include "doctest.h"

using namespace cfoed;

namespace {

Eigen::VectorXd scalar_eps(double v) { return Eigen::VectorXd::Constant(1, v); }

DataVector measured(const AffineParameterizedSystem& sys,
                    const ExperimentDesign& design,
                    const Eigen::VectorXd& theta) {
  DataVector data;
  data.values = measurement_operator(design, sys.mesh).rows * theta;
  return data;
}

}  // namespace

TEST_CASE("saddle matrix is symmetric") {
  const Mesh1D mesh = Mesh1D::uniform(10);
  const ModelProblemSpec spec{1.0, 1.0, 1.0};
  const AffineParameterizedSystem sys =
      build_case_system(CaseKind::ParameterizedSource, spec, mesh);
  ExperimentDesign design;
  design.positions = {0.23, 0.77};
  DataVector data;
  data.values = Eigen::VectorXd::Zero(2);
  const SaddleSystem s = build_saddle(sys, scalar_eps(1.0), design, data);
  CHECK((s.D - s.D.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("data from the same parameter gives zero force") {
  const Mesh1D mesh = Mesh1D::uniform(12);
  const ModelProblemSpec spec{1.0, 0.5, 2.0};
  for (CaseKind kind :
       {CaseKind::ParameterizedBC, CaseKind::ParameterizedSource,
        CaseKind::ParameterizedMaterial, CaseKind::MisspecifiedSource}) {
    const AffineParameterizedSystem sys = build_case_system(kind, spec, mesh);
    const double eps = kind == CaseKind::MisspecifiedSource ? 1.3 : 0.8;
    ExperimentDesign design;
    design.positions = {0.31, 0.67};
    const Eigen::VectorXd theta = forward_solve(sys, scalar_eps(eps));
    const SaddleSolution sol = solve_constrained(
        sys, scalar_eps(eps), design, measured(sys, design, theta));
    CHECK(sol.lambda.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(sol.objective < 1e-20);
  }
}

TEST_CASE("traction mismatch example") {
  // true traction 2 observed, model assumes 0.5: force 1.5 restores the data
  const Mesh1D mesh = Mesh1D::uniform(16);
  const ModelProblemSpec spec{1.0, 0.0, 2.0};
  const AffineParameterizedSystem sys =
      build_case_system(CaseKind::ParameterizedBC, spec, mesh);
  ExperimentDesign design;
  design.positions = {0.5};
  DataVector data;
  data.values = Eigen::VectorXd::Constant(1, oracle::data_at(spec, 0.5));
  const SaddleSolution sol =
      solve_constrained(sys, scalar_eps(0.5), design, data);
  CHECK(std::abs(sol.lambda[0] - 1.5) < 1e-8);
  CHECK(sol.objective == doctest::Approx(0.5 * 1.5 * 1.5).epsilon(1e-8));
}

TEST_CASE("solved force matches the closed forms at nodal positions") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  const Mesh1D mesh = Mesh1D::uniform(32);
  const ModelProblemSpec spec{1.3, -0.7, 1.1};
  for (CaseKind kind :
       {CaseKind::ParameterizedBC, CaseKind::ParameterizedSource,
        CaseKind::ParameterizedMaterial, CaseKind::MisspecifiedSource}) {
    const AffineParameterizedSystem sys = build_case_system(kind, spec, mesh);
    for (int rep = 0; rep < 5; ++rep) {
      const int node = 1 + static_cast<int>(
          std::uniform_real_distribution<double>(0, 1)(gen) * 31);
      const double beta =
          mesh.node_positions[static_cast<std::size_t>(node)];
      const double eps = kind == CaseKind::ParameterizedMaterial
                             ? 0.4 + std::abs(coef(gen))
                             : coef(gen);
      ExperimentDesign design;
      design.positions = {beta};
      DataVector data;
      data.values = Eigen::VectorXd::Constant(1, oracle::data_at(spec, beta));
      const SaddleSolution sol =
          solve_constrained(sys, scalar_eps(eps), design, data);
      const double expected =
          oracle::constraint_force(kind, spec, eps, beta).lambda;
      CHECK(std::abs(sol.lambda[0] - expected) < 1e-8);
    }
  }
}

TEST_CASE("both block equations hold after the solve") {
  std::mt19937_64 gen(37);
  const Mesh1D mesh = Mesh1D::from_nodes({0.0, 0.1, 0.27, 0.5, 0.66, 0.85, 1.0});
  const ModelProblemSpec spec{1.0, 1.0, -0.5};
  const AffineParameterizedSystem sys =
      build_case_system(CaseKind::ParameterizedSource, spec, mesh);
  for (int rep = 0; rep < 20; ++rep) {
    std::uniform_real_distribution<double> pick(0.05, 0.95);
    ExperimentDesign design;
    design.min_separation = 0.0;
    design.positions = {pick(gen), pick(gen)};
    if (std::abs(design.positions[0] - design.positions[1]) < 0.05) continue;
    std::uniform_real_distribution<double> dv(-1.0, 1.0);
    DataVector data;
    data.values.resize(2);
    data.values[0] = dv(gen);
    data.values[1] = dv(gen);
    const Eigen::VectorXd eps = scalar_eps(dv(gen));
    const SaddleOperator op(sys, eps, design, data);
    const ReducedSystem rs = assemble(sys, eps);
    const MeasurementOperator M = measurement_operator(design, mesh);
    Eigen::MatrixXd Mf(2, rs.free_dofs.size());
    for (std::size_t j = 0; j < rs.free_dofs.size(); ++j)
      Mf.col(static_cast<Eigen::Index>(j)) = M.rows.col(rs.free_dofs[j]);
    const Eigen::VectorXd theta_f = op.theta_free();
    const Eigen::VectorXd lambda = op.lambda();
    const double r1 = (rs.K * theta_f - Mf.transpose() * lambda - rs.F)
                          .cwiseAbs()
                          .maxCoeff() /
                      std::max(1.0, rs.F.cwiseAbs().maxCoeff());
    const double r2 = (Mf * theta_f - data.values).cwiseAbs().maxCoeff() /
                      std::max(1.0, data.values.cwiseAbs().maxCoeff());
    CHECK(r1 < 1e-10);
    CHECK(r2 < 1e-10);
  }
}

TEST_CASE("degenerate designs fail loudly") {
  const Mesh1D mesh = Mesh1D::uniform(8);
  const ModelProblemSpec spec{1.0, 0.0, 1.0};
  const AffineParameterizedSystem sys =
      build_case_system(CaseKind::ParameterizedBC, spec, mesh);
  ExperimentDesign design;
  design.positions = {0.5, 0.5};
  design.min_separation = 0.0;  // sneaks past validation on purpose
  DataVector data;
  data.values = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(solve_constrained(sys, scalar_eps(1.0), design, data),
                  design_degeneracy_error);

  // a measurement on the eliminated Dirichlet node zeroes its row
  ExperimentDesign at_root;
  at_root.positions = {0.0};
  DataVector one;
  one.values = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(solve_constrained(sys, scalar_eps(1.0), at_root, one),
                  design_degeneracy_error);
}

TEST_CASE("objective is half the squared force magnitude") {
  const Mesh1D mesh = Mesh1D::uniform(8);
  const ModelProblemSpec spec{1.0, 1.0, 1.0};
  const AffineParameterizedSystem sys =
      build_case_system(CaseKind::ParameterizedSource, spec, mesh);
  ExperimentDesign design;
  design.positions = {0.25, 0.875};
  DataVector data;
  data.values = Eigen::VectorXd::Constant(2, 0.4);
  const SaddleSolution sol = solve_constrained(sys, scalar_eps(0.3), design, data);
  CHECK(sol.objective == doctest::Approx(0.5 * sol.lambda.squaredNorm()));
  CHECK(sol.objective >= 0.0);
}
