#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "cfoed/analytic_oracle.hpp"
#include "cfoed/errors.hpp"
#include "cfoed/finite_difference.hpp"
#include "cfoed/sensitivity.hpp"
#include "doctest.h"
#include "support/cascade_fd.hpp"
#include "support/synthetic.hpp"

using namespace cfoed;

namespace {

struct Instance {
  AffineParameterizedSystem system;
  Eigen::VectorXd eps;
  std::vector<double> betas;
  Eigen::VectorXd data_source;  // nodal field generating the data
};

void check_instance(const Instance& inst) {
  ExperimentDesign design;
  design.positions = inst.betas;
  design.min_separation = 0.0;
  DataVector data;
  data.values =
      measurement_operator(design, inst.system.mesh).rows * inst.data_source;

  const SaddleOperator op(inst.system, inst.eps, design, data);
  const SystemDerivatives sd =
      build_saddle_derivatives(inst.system, design, &inst.data_source);
  const SolutionDerivatives sol =
      solve_sensitivity_cascade(sd, op, op.solution());

  const testing::FdBlocks fd = testing::cascade_fd_blocks(
      inst.system, inst.eps, inst.betas, inst.data_source);

  CHECK(relative_block_error(sol.dy_deps, fd.dy_deps) < 1e-6);
  CHECK(relative_block_error(sol.dy_dbeta, fd.dy_dbeta) < 1e-6);
  for (std::size_t i = 0; i < fd.d2y_deps2.size(); ++i)
    CHECK(relative_block_error(sol.d2y_deps2[i], fd.d2y_deps2[i]) < 1e-4);
  for (std::size_t i = 0; i < fd.d2y_depsdbeta.size(); ++i)
    CHECK(relative_block_error(sol.d2y_depsdbeta[i], fd.d2y_depsdbeta[i]) <
          1e-4);
  for (std::size_t i = 0; i < fd.d3y.size(); ++i)
    CHECK(relative_block_error(sol.d3y_depsdepsdbeta[i], fd.d3y[i]) < 1e-4);

  const CascadeResiduals res =
      cascade_residuals(sd, op.system().D, op.solution(), sol);
  CHECK(res.max() < 1e-10);
}

}  // namespace

TEST_CASE("cascade matches re-solve differences on the four cases") {
  const Mesh1D mesh = Mesh1D::uniform(12);
  const ModelProblemSpec spec{1.2, 0.8, -0.6};
  const Eigen::VectorXd source_field =
      forward_solve(build_true_system(spec, mesh), Eigen::VectorXd());
  const double h = 1.0 / 12.0;
  for (CaseKind kind :
       {CaseKind::ParameterizedBC, CaseKind::ParameterizedSource,
        CaseKind::ParameterizedMaterial, CaseKind::MisspecifiedSource}) {
    Instance inst;
    inst.system = build_case_system(kind, spec, mesh);
    inst.eps = Eigen::VectorXd::Constant(
        1, kind == CaseKind::ParameterizedMaterial ? 1.4 : 0.6);
    inst.betas = {3 * h + 0.45 * h, 8 * h + 0.55 * h};
    inst.data_source = source_field;
    check_instance(inst);
  }
}

TEST_CASE("cascade matches re-solve differences with two parameters") {
  const Mesh1D mesh = Mesh1D::uniform(10);
  const ModelProblemSpec spec{1.0, 1.0, 0.7};
  Instance inst;
  inst.system = testing::two_parameter_system(spec, mesh);
  inst.eps = Eigen::VectorXd(2);
  inst.eps << 1.1, 0.9;
  const double h = 0.1;
  inst.betas = {2 * h + 0.5 * h, 6 * h + 0.42 * h};
  inst.data_source =
      forward_solve(build_true_system(spec, mesh), Eigen::VectorXd());
  check_instance(inst);
}

TEST_CASE("parameter Hessian blocks are exchange-symmetric") {
  const Mesh1D mesh = Mesh1D::uniform(8);
  const ModelProblemSpec spec{1.0, 1.0, 0.5};
  const AffineParameterizedSystem sys =
      testing::two_parameter_system(spec, mesh);
  ExperimentDesign design;
  design.positions = {0.4375, 0.8125};
  DataVector data;
  data.values = Eigen::VectorXd::Constant(2, 0.3);
  Eigen::VectorXd eps(2);
  eps << 1.2, 0.8;
  const SaddleOperator op(sys, eps, design, data);
  const SystemDerivatives sd = build_saddle_derivatives(sys, design, nullptr);
  const SolutionDerivatives sol =
      solve_sensitivity_cascade(sd, op, op.solution());
  CHECK((sol.d2y_deps2[1] - sol.d2y_deps2[2]).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("affine systems have no higher operator derivatives") {
  const Mesh1D mesh = Mesh1D::uniform(8);
  const ModelProblemSpec spec{1.0, 1.0, 1.0};
  for (CaseKind kind :
       {CaseKind::ParameterizedBC, CaseKind::ParameterizedSource,
        CaseKind::ParameterizedMaterial, CaseKind::MisspecifiedSource}) {
    const AffineParameterizedSystem sys = build_case_system(kind, spec, mesh);
    ExperimentDesign design;
    design.positions = {0.3};
    const SystemDerivatives sd = build_saddle_derivatives(sys, design, nullptr);
    for (const auto& m : sd.d2D_deps2) CHECK(m.size() == 0);
    for (const auto& m : sd.d2D_depsdbeta) CHECK(m.size() == 0);
    for (const auto& m : sd.d3D_depsdepsdbeta) CHECK(m.size() == 0);
    for (const auto& v : sd.d2Q_deps2) CHECK(v.size() == 0);
  }
}

TEST_CASE("force sensitivities match the closed forms at nodes") {
  const Mesh1D mesh = Mesh1D::uniform(16);
  const ModelProblemSpec spec{1.4, -0.9, 0.8};
  for (CaseKind kind :
       {CaseKind::ParameterizedBC, CaseKind::ParameterizedSource,
        CaseKind::ParameterizedMaterial, CaseKind::MisspecifiedSource}) {
    const AffineParameterizedSystem sys = build_case_system(kind, spec, mesh);
    for (double beta : {0.25, 0.5, 0.9375}) {
      ExperimentDesign design;
      design.positions = {beta};
      DataVector data;
      data.values = Eigen::VectorXd::Constant(1, oracle::data_at(spec, beta));
      const double eps = kind == CaseKind::ParameterizedMaterial ? 0.9 : 0.4;
      const ConstrainedDerivatives cd = constrained_derivatives(
          sys, Eigen::VectorXd::Constant(1, eps), design, data, nullptr,
          false);
      const oracle::OracleEvaluation expected =
          oracle::constraint_force(kind, spec, eps, beta);
      CHECK(std::abs(cd.dlambda_deps(0, 0) - expected.dlambda_deps) < 1e-8);
      CHECK(std::abs(cd.d2lambda_deps2[0][0]) < 1e-8);
      if (kind == CaseKind::ParameterizedBC)
        CHECK(cd.dlambda_deps(0, 0) == doctest::Approx(-1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("minimum-eigenvalue gradient") {
  SUBCASE("diagonal example") {
    Eigen::MatrixXd J(2, 2);
    J << 1.0, 0.0, 0.0, 2.0;
    std::vector<Eigen::MatrixXd> dJ(1, Eigen::MatrixXd::Zero(2, 2));
    dJ[0](0, 0) = 1.0;  // J = diag(beta, 2) differentiated in beta
    const Eigen::VectorXd grad = min_eigenvalue_gradient(J, dJ);
    CHECK(grad[0] == doctest::Approx(1.0));
  }
  SUBCASE("repeated eigenvalues are rejected") {
    const Eigen::MatrixXd J = 3.0 * Eigen::MatrixXd::Identity(3, 3);
    std::vector<Eigen::MatrixXd> dJ(1, Eigen::MatrixXd::Identity(3, 3));
    CHECK_THROWS_AS(min_eigenvalue_gradient(J, dJ),
                    degenerate_eigenvalue_error);
  }
  SUBCASE("random parameterized matrices against differences") {
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    int accepted = 0;
    while (accepted < 20) {
      Eigen::MatrixXd J0(5, 5), A(5, 5), B(5, 5);
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
          J0(i, j) = coef(gen);
          A(i, j) = coef(gen);
          B(i, j) = coef(gen);
        }
      J0 = (0.5 * (J0 + J0.transpose())).eval();
      A = (0.5 * (A + A.transpose())).eval();
      B = (0.5 * (B + B.transpose())).eval();
      Eigen::VectorXd beta(2);
      beta << coef(gen), coef(gen);
      auto J_at = [&](const Eigen::VectorXd& b) {
        return Eigen::MatrixXd(J0 + b[0] * A + b[1] * B);
      };
      if (min_eigenpair(J_at(beta)).gap < 1e-3) continue;
      ++accepted;
      const Eigen::VectorXd grad =
          min_eigenvalue_gradient(J_at(beta), {A, B});
      const Eigen::MatrixXd fd = central_difference_jacobian(
          [&](const Eigen::VectorXd& b) {
            return Eigen::VectorXd::Constant(1, min_eigenpair(J_at(b)).mu);
          },
          beta, 1e-6);
      CHECK(relative_block_error(grad.transpose(), fd) < 1e-7);
    }
  }
}

TEST_CASE("difference harness calibration") {
  SUBCASE("linear maps are differentiated exactly") {
    Eigen::MatrixXd A(2, 3);
    A << 1.0, -2.0, 0.5, 3.0, 0.25, -1.0;
    const VectorFn f = [&](const Eigen::VectorXd& x) {
      return Eigen::VectorXd(A * x);
    };
    const FdReport report =
        finite_difference_check(f, A, Eigen::VectorXd::Zero(3));
    CHECK(report.max_abs_error < 1e-10);
  }
  SUBCASE("central differences are exact for quadratics") {
    const VectorFn f = [](const Eigen::VectorXd& x) {
      return Eigen::VectorXd::Constant(1, 3.0 * x[0] * x[0] - 2.0 * x[0]);
    };
    const Eigen::VectorXd point = Eigen::VectorXd::Constant(1, 0.7);
    Eigen::MatrixXd claimed(1, 1);
    claimed << 6.0 * 0.7 - 2.0;
    const FdReport report = finite_difference_check(f, claimed, point);
    CHECK(report.max_abs_error < 1e-9);
  }
  SUBCASE("constraint force derivative cross-check") {
    const Mesh1D mesh = Mesh1D::uniform(16);
    const ModelProblemSpec spec{1.0, 1.0, 0.5};
    const AffineParameterizedSystem sys =
        build_case_system(CaseKind::ParameterizedSource, spec, mesh);
    ExperimentDesign design;
    design.positions = {0.40625};
    DataVector data;
    data.values =
        Eigen::VectorXd::Constant(1, oracle::data_at(spec, 0.40625));
    const Eigen::VectorXd eps0 = Eigen::VectorXd::Constant(1, 0.8);
    const ConstrainedDerivatives cd =
        constrained_derivatives(sys, eps0, design, data, nullptr, false);
    const VectorFn lambda_of = [&](const Eigen::VectorXd& e) {
      return Eigen::VectorXd(
          solve_constrained(sys, e, design, data).lambda);
    };
    const FdReport report =
        finite_difference_check(lambda_of, cd.dlambda_deps, eps0);
    CHECK(report.max_rel_error < 1e-6);
  }
}

TEST_CASE("cascade rejects mismatched dimensions") {
  const Mesh1D mesh = Mesh1D::uniform(4);
  const ModelProblemSpec spec{1.0, 0.0, 1.0};
  const AffineParameterizedSystem sys =
      build_case_system(CaseKind::ParameterizedBC, spec, mesh);
  ExperimentDesign design;
  design.positions = {0.5};
  DataVector data;
  data.values = Eigen::VectorXd::Zero(1);
  const SaddleOperator op(sys, Eigen::VectorXd::Constant(1, 1.0), design, data);
  SystemDerivatives sd = build_saddle_derivatives(sys, design, nullptr);
  sd.dQ_deps.pop_back();
  CHECK_THROWS_AS(solve_sensitivity_cascade(sd, op, op.solution()),
                  contract_error);
}
