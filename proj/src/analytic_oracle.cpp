#include "cfoed/analytic_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "cfoed/errors.hpp"

namespace cfoed::oracle {

namespace {

void check_position(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0))
    throw domain_error(std::string(name) + " must lie in [0,1]");
}

// E[eps^-4] over a scalar prior; needed only by the material-case
// prediction sensitivity. Uniform supports have a closed form; Gaussian
// supports are integrated with a high-order Hermite rule and must stay
// strictly positive at the quadrature nodes (operator definiteness).
double inverse_fourth_moment(const PriorSpec& prior) {
  prior.validate();
  if (prior.dimension() != 1)
    throw domain_error("closed-form objectives take a scalar prior");
  const PriorSpec::Marginal& m = prior.marginals.front();
  switch (m.kind) {
    case PriorSpec::Kind::Point:
      if (!(m.a > 0.0))
        throw domain_error("material prior support must be positive");
      return 1.0 / (m.a * m.a * m.a * m.a);
    case PriorSpec::Kind::Uniform: {
      if (!(m.a > 0.0))
        throw domain_error("material prior support must be positive");
      const double lo3 = m.a * m.a * m.a;
      const double hi3 = m.b * m.b * m.b;
      return (1.0 / lo3 - 1.0 / hi3) / (3.0 * (m.b - m.a));
    }
    case PriorSpec::Kind::Gaussian: {
      auto [t, w] = gauss_hermite_rule(64);
      double acc = 0.0;
      const double norm = 1.0 / std::sqrt(M_PI);
      for (int i = 0; i < t.size(); ++i) {
        const double eps = m.a + std::sqrt(2.0) * m.b * t[i];
        if (!(eps > 0.0))
          throw domain_error(
              "gaussian prior support reaches a non-positive stiffness");
        acc += norm * w[i] / (eps * eps * eps * eps);
      }
      return acc;
    }
  }
  throw domain_error("unknown prior kind");
}

}  // namespace

double true_solution(const ModelProblemSpec& spec, double x) {
  spec.validate();
  check_position(x, "x");
  return -(spec.b / (2.0 * spec.k)) * x * x + ((spec.p + spec.b) / spec.k) * x;
}

double data_at(const ModelProblemSpec& spec, double beta) {
  check_position(beta, "beta");
  return true_solution(spec, beta);
}

OracleEvaluation constraint_force(CaseKind kind, const ModelProblemSpec& spec,
                                  double eps, double beta) {
  spec.validate();
  check_position(beta, "beta");

  OracleEvaluation ev;
  switch (kind) {
    case CaseKind::ParameterizedBC:
      ev.lambda = spec.p - eps;
      ev.dlambda_deps = -1.0;
      break;
    case CaseKind::ParameterizedSource:
      ev.lambda = 0.5 * beta * (eps - spec.b) + spec.b - eps;
      ev.dlambda_deps = 0.5 * beta - 1.0;
      break;
    case CaseKind::ParameterizedMaterial:
      if (!(eps > 0.0))
        throw domain_error("material parameter must be positive");
      ev.lambda =
          (0.5 * spec.b * beta - spec.p - spec.b) * (1.0 - eps / spec.k);
      ev.dlambda_deps = (spec.p + spec.b - 0.5 * spec.b * beta) / spec.k;
      break;
    case CaseKind::MisspecifiedSource:
      // Derived from w(beta) = v(beta) with the traction term absent from
      // the model; the true traction p survives only through the data.
      ev.lambda = 0.5 * beta * (eps - spec.b) + spec.p + spec.b - eps;
      ev.dlambda_deps = 0.5 * beta - 1.0;
      break;
  }
  ev.d2lambda_deps2 = 0.0;  // the force is affine in eps in every case
  ev.objective_integrand =
      ev.dlambda_deps * ev.dlambda_deps + ev.lambda * ev.d2lambda_deps2;
  return ev;
}

double ecfm_design_objective(CaseKind kind, const ModelProblemSpec& spec,
                             const PriorSpec& prior, double beta) {
  spec.validate();
  prior.validate();
  check_position(beta, "beta");
  switch (kind) {
    case CaseKind::ParameterizedBC:
      return 1.0;
    case CaseKind::ParameterizedSource:
    case CaseKind::MisspecifiedSource: {
      const double s = 0.5 * beta - 1.0;
      return s * s;
    }
    case CaseKind::ParameterizedMaterial: {
      const double s = (spec.p + spec.b * (1.0 - 0.5 * beta)) / spec.k;
      return s * s;
    }
  }
  throw domain_error("unknown case kind");
}

double fisher_design_objective(CaseKind kind, const ModelProblemSpec& spec,
                               const PriorSpec& prior, double beta) {
  spec.validate();
  prior.validate();
  check_position(beta, "beta");
  switch (kind) {
    case CaseKind::ParameterizedBC: {
      const double s = beta / spec.k;
      return s * s;
    }
    case CaseKind::ParameterizedSource:
    case CaseKind::MisspecifiedSource: {
      const double s = (beta - 0.5 * beta * beta) / spec.k;
      return s * s;
    }
    case CaseKind::ParameterizedMaterial: {
      const double m = (spec.p + spec.b) * beta - 0.5 * spec.b * beta * beta;
      return inverse_fourth_moment(prior) * m * m;
    }
  }
  throw domain_error("unknown case kind");
}

namespace {

// Collect the argmax set of values evaluated at candidate positions;
// near-exact ties (1e-12 relative) are reported together.
OptimalBetaSet argmax_of_candidates(const std::vector<double>& candidates,
                                    const std::vector<double>& values) {
  double best = values.front();
  for (double v : values) best = std::max(best, v);
  const double tol = 1e-12 * std::max(1.0, std::abs(best));
  OptimalBetaSet set;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (values[i] >= best - tol) set.points.push_back(candidates[i]);
  }
  std::sort(set.points.begin(), set.points.end());
  set.points.erase(std::unique(set.points.begin(), set.points.end()),
                   set.points.end());
  return set;
}

}  // namespace

OptimalBetaSet optimal_beta_analytic(CaseKind kind,
                                     const ModelProblemSpec& spec,
                                     Criterion criterion) {
  spec.validate();
  if (kind == CaseKind::ParameterizedMaterial && spec.b == 0.0)
    throw domain_error(
        "material case with b = 0 is degenerate (objective constant in "
        "beta)");

  if (criterion == Criterion::Ecfm) {
    switch (kind) {
      case CaseKind::ParameterizedBC: {
        OptimalBetaSet set;
        set.entire_interval = true;
        set.points = {0.0, 1.0};
        return set;
      }
      case CaseKind::ParameterizedSource:
      case CaseKind::MisspecifiedSource:
        return OptimalBetaSet{false, {0.0}};
      case CaseKind::ParameterizedMaterial: {
        // convex quadratic with vertex at beta_star; the farther endpoint
        // of [0,1] wins, both on the knife edge
        const double beta_star = 2.0 * (spec.p / spec.b + 1.0);
        if (std::abs(beta_star - 0.5) < 1e-14)
          return OptimalBetaSet{false, {0.0, 1.0}};
        return beta_star > 0.5 ? OptimalBetaSet{false, {0.0}}
                               : OptimalBetaSet{false, {1.0}};
      }
    }
    throw domain_error("unknown case kind");
  }

  // prediction-sensitivity criterion
  switch (kind) {
    case CaseKind::ParameterizedBC:
    case CaseKind::ParameterizedSource:
    case CaseKind::MisspecifiedSource:
      // sensitivity magnitude grows monotonically toward the free end
      return OptimalBetaSet{false, {1.0}};
    case CaseKind::ParameterizedMaterial: {
      // |m(beta)| with m quadratic, m(0) = 0: compare the interior critical
      // point of m (when inside) against the right endpoint
      const PriorSpec unit = PriorSpec::point(std::max(spec.k, 1.0));
      std::vector<double> candidates = {0.0, 1.0};
      const double beta_c = (spec.p + spec.b) / spec.b;
      if (beta_c > 0.0 && beta_c < 1.0) candidates.push_back(beta_c);
      std::vector<double> values;
      values.reserve(candidates.size());
      for (double c : candidates)
        values.push_back(fisher_design_objective(kind, spec, unit, c));
      return argmax_of_candidates(candidates, values);
    }
  }
  throw domain_error("unknown case kind");
}

}  // namespace cfoed::oracle
