#include "cfoed/oed_objectives.hpp"

#include <string>
#include <utility>

#include "cfoed/errors.hpp"
#include "cfoed/sensitivity.hpp"

namespace cfoed {

namespace {

Eigen::MatrixXd restrict_columns(const Eigen::MatrixXd& rows,
                                 const std::vector<int>& dofs) {
  Eigen::MatrixXd out(rows.rows(), static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t j = 0; j < dofs.size(); ++j)
    out.col(static_cast<Eigen::Index>(j)) = rows.col(dofs[j]);
  return out;
}

CriterionNode fisher_core(const AffineParameterizedSystem& system,
                          const Eigen::VectorXd& eps,
                          const ReducedSystem& reduced,
                          const Eigen::VectorXd& theta_free,
                          const Eigen::MatrixXd& Mf,
                          const std::vector<Eigen::RowVectorXd>& dM_free,
                          bool with_gradient) {
  const int P = system.parameter_count();
  const int C = static_cast<int>(Mf.rows());
  const Eigen::MatrixXd dtheta =
      state_sensitivities(system, eps, reduced, theta_free);
  const Eigen::MatrixXd S = Mf * dtheta;  // C x P

  CriterionNode node;
  node.integrand = S.transpose() * S;
  if (with_gradient) {
    node.dintegrand_dbeta.assign(static_cast<std::size_t>(C),
                                 Eigen::MatrixXd::Zero(P, P));
    for (int K = 0; K < C; ++K) {
      const Eigen::RowVectorXd r =
          dM_free[static_cast<std::size_t>(K)] * dtheta;  // 1 x P
      const Eigen::RowVectorXd m = S.row(K);
      node.dintegrand_dbeta[static_cast<std::size_t>(K)] =
          r.transpose() * m + m.transpose() * r;
    }
  }
  return node;
}

std::vector<Eigen::RowVectorXd> restricted_row_derivatives(
    const AffineParameterizedSystem& system, const ExperimentDesign& design,
    const std::vector<int>& free) {
  std::vector<Eigen::RowVectorXd> dM_free;
  dM_free.reserve(static_cast<std::size_t>(design.count()));
  for (double x : design.positions) {
    dM_free.push_back(
        restrict_columns(measurement_row_derivative(system.mesh, x), free));
  }
  return dM_free;
}

CriterionResult reduce_nodes(const QuadratureRule& quad,
                             std::vector<CriterionNode>&& nodes, int n_params,
                             int n_controls, bool with_gradient) {
  CriterionResult result;
  result.J = Eigen::MatrixXd::Zero(n_params, n_params);
  std::vector<Eigen::MatrixXd> dJ(
      static_cast<std::size_t>(n_controls),
      Eigen::MatrixXd::Zero(n_params, n_params));
  result.node_integrands.reserve(nodes.size());
  for (int q = 0; q < quad.point_count(); ++q) {
    CriterionNode& c = nodes[static_cast<std::size_t>(q)];
    result.J += quad.weights[q] * c.integrand;
    if (with_gradient) {
      for (int K = 0; K < n_controls; ++K)
        dJ[static_cast<std::size_t>(K)] +=
            quad.weights[q] * c.dintegrand_dbeta[static_cast<std::size_t>(K)];
    }
    result.node_integrands.push_back(std::move(c.integrand));
  }
  result.J = 0.5 * (result.J + result.J.transpose()).eval();
  if (n_params > 0) {
    result.min_eig = min_eigenpair(result.J).mu;
    if (with_gradient)
      result.grad_beta = min_eigenvalue_gradient(result.J, dJ);
    else
      result.grad_beta = Eigen::VectorXd();
  }
  return result;
}

}  // namespace

CriterionNode fisher_criterion_node(const AffineParameterizedSystem& system,
                                    const Eigen::VectorXd& eps,
                                    const ExperimentDesign& design,
                                    bool with_gradient) {
  const MeasurementOperator M = measurement_operator(design, system.mesh);
  const std::vector<int> free = system.free_dofs();
  const Eigen::MatrixXd Mf = restrict_columns(M.rows, free);
  std::vector<Eigen::RowVectorXd> dM_free;
  if (with_gradient) dM_free = restricted_row_derivatives(system, design, free);
  const ReducedSystem rs = assemble(system, eps);
  const Eigen::VectorXd theta_free = rs.llt.solve(rs.F);
  return fisher_core(system, eps, rs, theta_free, Mf, dM_free, with_gradient);
}

CriterionNode ecfm_criterion_node(const AffineParameterizedSystem& system,
                                  const Eigen::VectorXd& eps,
                                  const ExperimentDesign& design,
                                  const DataVector& data,
                                  const Eigen::VectorXd& mean_theta,
                                  bool with_gradient) {
  const int P = system.parameter_count();
  const int C = design.count();
  const std::size_t Pz = static_cast<std::size_t>(P);
  const std::size_t Cz = static_cast<std::size_t>(C);

  const ConstrainedDerivatives cd = constrained_derivatives(
      system, eps, design, data, &mean_theta, with_gradient);
  const Eigen::VectorXd& lambda = cd.solution.lambda;
  const Eigen::MatrixXd& dl = cd.dlambda_deps;  // C x P

  CriterionNode node;
  node.integrand = dl.transpose() * dl;
  for (int a = 0; a < P; ++a)
    for (int g = 0; g < P; ++g)
      node.integrand(a, g) +=
          lambda.dot(cd.d2lambda_deps2[static_cast<std::size_t>(a) * Pz +
                                       static_cast<std::size_t>(g)]);

  if (with_gradient) {
    node.dintegrand_dbeta.assign(Cz, Eigen::MatrixXd::Zero(P, P));
    for (int K = 0; K < C; ++K) {
      Eigen::MatrixXd& dJ = node.dintegrand_dbeta[static_cast<std::size_t>(K)];
      for (int a = 0; a < P; ++a) {
        const Eigen::VectorXd& mix_a =
            cd.d2lambda_depsdbeta[static_cast<std::size_t>(a) * Cz +
                                  static_cast<std::size_t>(K)];
        for (int g = 0; g < P; ++g) {
          const Eigen::VectorXd& mix_g =
              cd.d2lambda_depsdbeta[static_cast<std::size_t>(g) * Cz +
                                    static_cast<std::size_t>(K)];
          const std::size_t ag = static_cast<std::size_t>(a) * Pz +
                                 static_cast<std::size_t>(g);
          dJ(a, g) =
              mix_a.dot(dl.col(g)) + dl.col(a).dot(mix_g) +
              cd.dlambda_dbeta.col(K).dot(cd.d2lambda_deps2[ag]) +
              lambda.dot(cd.d3lambda_depsdepsdbeta[ag * Cz +
                                                   static_cast<std::size_t>(K)]);
        }
      }
    }
  }
  return node;
}

CriterionEvaluator::CriterionEvaluator(const AffineParameterizedSystem& system,
                                       PriorSpec prior, QuadratureRule quad,
                                       ExecPolicy policy)
    : system_(&system),
      prior_(std::move(prior)),
      quad_(std::move(quad)),
      policy_(policy) {
  system_->validate();
  prior_.validate();
  quad_.validate();
  if (prior_.dimension() != system_->parameter_count())
    throw contract_error("prior dimension must match the parameter count");
  if (quad_.dimension() != system_->parameter_count())
    throw contract_error(
        "quadrature dimension must match the parameter count");

  const int Q = quad_.point_count();
  node_systems_.resize(static_cast<std::size_t>(Q));
  node_theta_full_.resize(static_cast<std::size_t>(Q));
  parallel_for(Q, policy_, [&](int q) {
    const Eigen::VectorXd eps = quad_.nodes.row(q);
    try {
      node_systems_[static_cast<std::size_t>(q)] = assemble(*system_, eps);
    } catch (const assembly_error& e) {
      throw assembly_error("quadrature node " + std::to_string(q) +
                           " is infeasible: " + e.what());
    }
    const ReducedSystem& rs = node_systems_[static_cast<std::size_t>(q)];
    node_theta_full_[static_cast<std::size_t>(q)] =
        full_from_free(*system_, rs.llt.solve(rs.F));
  });

  mean_theta_ = Eigen::VectorXd::Zero(system_->mesh.node_count());
  for (int q = 0; q < Q; ++q)
    mean_theta_ +=
        quad_.weights[q] * node_theta_full_[static_cast<std::size_t>(q)];
}

DataVector CriterionEvaluator::data_model(
    const ExperimentDesign& design) const {
  const MeasurementOperator M = measurement_operator(design, system_->mesh);
  DataVector data;
  data.values = M.rows * mean_theta_;
  return data;
}

CriterionResult CriterionEvaluator::fisher(const ExperimentDesign& design,
                                           bool with_gradient) const {
  const MeasurementOperator M = measurement_operator(design, system_->mesh);
  const std::vector<int> free = system_->free_dofs();
  const Eigen::MatrixXd Mf = restrict_columns(M.rows, free);
  std::vector<Eigen::RowVectorXd> dM_free;
  if (with_gradient)
    dM_free = restricted_row_derivatives(*system_, design, free);

  const int Q = quad_.point_count();
  std::vector<CriterionNode> nodes(static_cast<std::size_t>(Q));
  parallel_for(Q, policy_, [&](int q) {
    const std::size_t qz = static_cast<std::size_t>(q);
    const Eigen::VectorXd eps = quad_.nodes.row(q);
    Eigen::VectorXd theta_free(static_cast<Eigen::Index>(free.size()));
    for (std::size_t i = 0; i < free.size(); ++i)
      theta_free[static_cast<Eigen::Index>(i)] = node_theta_full_[qz][free[i]];
    nodes[qz] = fisher_core(*system_, eps, node_systems_[qz], theta_free, Mf,
                            dM_free, with_gradient);
  });
  return reduce_nodes(quad_, std::move(nodes), system_->parameter_count(),
                      design.count(), with_gradient);
}

CriterionResult CriterionEvaluator::ecfm(const ExperimentDesign& design,
                                         bool with_gradient) const {
  const DataVector data = data_model(design);
  const int Q = quad_.point_count();
  std::vector<CriterionNode> nodes(static_cast<std::size_t>(Q));
  parallel_for(Q, policy_, [&](int q) {
    const std::size_t qz = static_cast<std::size_t>(q);
    const Eigen::VectorXd eps = quad_.nodes.row(q);
    nodes[qz] = ecfm_criterion_node(*system_, eps, design, data, mean_theta_,
                                    with_gradient);
  });
  return reduce_nodes(quad_, std::move(nodes), system_->parameter_count(),
                      design.count(), with_gradient);
}

DataVector data_model(const AffineParameterizedSystem& system,
                      const ExperimentDesign& design, const PriorSpec& prior,
                      const QuadratureRule& quad, const ExecPolicy& policy) {
  return CriterionEvaluator(system, prior, quad, policy).data_model(design);
}

CriterionResult fisher_matrix(const AffineParameterizedSystem& system,
                              const ExperimentDesign& design,
                              const PriorSpec& prior,
                              const QuadratureRule& quad,
                              const ExecPolicy& policy) {
  return CriterionEvaluator(system, prior, quad, policy).fisher(design);
}

CriterionResult ecfm_hessian(const AffineParameterizedSystem& system,
                             const ExperimentDesign& design,
                             const PriorSpec& prior, const QuadratureRule& quad,
                             const ExecPolicy& policy) {
  return CriterionEvaluator(system, prior, quad, policy).ecfm(design);
}

}  // namespace cfoed
