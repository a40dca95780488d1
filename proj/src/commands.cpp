#include "cfoed/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cfoed/analytic_oracle.hpp"
#include "cfoed/csv.hpp"
#include "cfoed/design_optimizer.hpp"
#include "cfoed/errors.hpp"
#include "cfoed/inverse.hpp"
#include "cfoed/noise_study.hpp"
#include "cfoed/oed_objectives.hpp"
#include "cfoed/rng.hpp"
#include "cfoed/sensitivity.hpp"

namespace cfoed {

namespace {

void ensure_out_dir(const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw error("cannot create output directory: " + out_dir.string());
}

ExecPolicy policy_of(const RunConfig& config) {
  return ExecPolicy::with_threads(config.threads);
}

ExperimentDesign design_of(const RunConfig& config, const Mesh1D& mesh) {
  ExperimentDesign design;
  design.positions = config.design_positions;
  design.bounds = config.design_bounds;
  design.min_separation = config.min_separation;
  design.validate_against(mesh);
  return design;
}

// Default estimation box: centered on the case's consistent value (source
// magnitude for the misspecified case), wide enough for noisy estimates,
// clamped positive for the material case.
std::array<double, 2> default_support(const RunConfig& config) {
  const double center =
      consistent_parameter(config.kind, config.model).value_or(config.model.b);
  double lo = center - 5.0;
  const double hi = center + 5.0;
  if (config.kind == CaseKind::ParameterizedMaterial)
    lo = std::max(lo, 0.05 * std::max(center, 1.0));
  return {lo, hi};
}

DataVector load_data_file(const std::filesystem::path& path,
                          const ExperimentDesign& design) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open data file: " + path.string());
  std::vector<std::array<double, 2>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double beta = 0.0, value = 0.0;
    char comma = ',';
    if (!(ls >> beta >> comma >> value)) {
      if (rows.empty()) continue;  // header row
      throw config_error("malformed data file line: " + line);
    }
    rows.push_back({beta, value});
  }
  if (rows.size() != design.positions.size())
    throw config_error("data file has " + std::to_string(rows.size()) +
                       " measurements, design has " +
                       std::to_string(design.positions.size()));
  DataVector data;
  data.values.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (std::abs(rows[i][0] - design.positions[i]) > 1e-9)
      throw config_error("data file positions do not match the design");
    data.values[static_cast<Eigen::Index>(i)] = rows[i][1];
  }
  return data;
}

}  // namespace

double cmd_forward(const RunConfig& config,
                   const std::filesystem::path& out_dir) {
  config.validate();
  ensure_out_dir(out_dir);
  const Mesh1D mesh = Mesh1D::uniform(config.elements);
  const AffineParameterizedSystem sys = build_true_system(config.model, mesh);
  const Eigen::VectorXd u_fem = forward_solve(sys, Eigen::VectorXd());

  csv::Writer out(out_dir / "forward.csv", {"x", "u_true", "u_fem"});
  double max_err = 0.0;
  for (int i = 0; i < mesh.node_count(); ++i) {
    const double x = mesh.node_positions[static_cast<std::size_t>(i)];
    const double u_true = oracle::true_solution(config.model, x);
    max_err = std::max(max_err, std::abs(u_fem[i] - u_true));
    out.row({csv::num(x), csv::num(u_true), csv::num(u_fem[i])});
  }
  std::cout << "forward: " << (out_dir / "forward.csv").string()
            << " max_nodal_error=" << csv::num(max_err) << '\n';
  return max_err;
}

void cmd_inverse(const RunConfig& config,
                 const std::filesystem::path& out_dir) {
  config.validate();
  ensure_out_dir(out_dir);
  const Mesh1D mesh = Mesh1D::uniform(config.elements);
  const AffineParameterizedSystem sys =
      build_case_system(config.kind, config.model, mesh);
  const ExperimentDesign design = design_of(config, mesh);

  DataVector data;
  if (config.inverse.data_source == "file") {
    data = load_data_file(config.inverse.data_file, design);
  } else {
    data.values.resize(design.count());
    for (int i = 0; i < design.count(); ++i)
      data.values[i] = oracle::data_at(
          config.model, design.positions[static_cast<std::size_t>(i)]);
  }

  const std::array<double, 2> support =
      config.inverse.support.value_or(default_support(config));
  const double eps0 = config.inverse.eps0.value_or(
      std::clamp(config.prior.mean()[0], support[0], support[1]));

  csv::Writer out(out_dir / "inverse.csv",
                  {"method", "eps_star", "objective_star", "iterations"});
  const bool run_standard =
      config.inverse.method == "standard" || config.inverse.method == "both";
  const bool run_ecfm =
      config.inverse.method == "ecfm" || config.inverse.method == "both";
  if (run_standard) {
    const InverseResult r =
        standard_inverse(sys, design, data,
                         Eigen::VectorXd::Constant(1, eps0), {support});
    out.row({"standard", csv::num(r.eps[0]), csv::num(r.objective),
             csv::num(r.iterations)});
  }
  if (run_ecfm) {
    const InverseResult r = ecfm_inverse(
        sys, design, data, Eigen::VectorXd::Constant(1, eps0), {support});
    out.row({"ecfm", csv::num(r.eps[0]), csv::num(r.objective),
             csv::num(r.iterations)});
  }
  std::cout << "inverse: " << (out_dir / "inverse.csv").string() << '\n';
}

namespace {

// Candidate positions for design selection on the discretized path: mesh
// nodes inside the bounds, evenly subsampled to at most max_points.
// Between-node candidates are excluded on purpose: the interpolated
// point-load self-response under-resolves the constraint stiffness there
// (an O(h) artifact, worst next to the Dirichlet wall), while nodal values
// match the closed forms exactly.
std::vector<double> nodal_candidates(const Mesh1D& mesh,
                                     const std::array<double, 2>& bounds,
                                     int max_points) {
  std::vector<double> nodes;
  for (double x : mesh.node_positions) {
    if (x >= bounds[0] - 1e-15 && x <= bounds[1] + 1e-15) nodes.push_back(x);
  }
  if (nodes.empty()) throw config_error("no mesh nodes inside the design bounds");
  if (static_cast<int>(nodes.size()) <= max_points) return nodes;
  std::vector<double> picked;
  picked.reserve(static_cast<std::size_t>(max_points));
  const double span = static_cast<double>(nodes.size() - 1);
  int prev = -1;
  for (int i = 0; i < max_points; ++i) {
    const int idx =
        static_cast<int>(std::lround(span * i / (max_points - 1)));
    if (idx != prev) picked.push_back(nodes[static_cast<std::size_t>(idx)]);
    prev = idx;
  }
  return picked;
}

struct NodalSweep {
  std::vector<double> positions;
  std::vector<double> values;
  std::vector<int> argmax_indices;
};

NodalSweep nodal_sweep(const CriterionEvaluator& evaluator, Criterion which,
                       const std::vector<double>& positions,
                       const ExecPolicy& policy) {
  NodalSweep sweep;
  sweep.positions = positions;
  sweep.values.assign(positions.size(), 0.0);
  parallel_for(static_cast<int>(positions.size()), policy, [&](int i) {
    ExperimentDesign d;
    d.positions = {positions[static_cast<std::size_t>(i)]};
    sweep.values[static_cast<std::size_t>(i)] =
        which == Criterion::Fisher ? evaluator.fisher(d, false).min_eig
                                   : evaluator.ecfm(d, false).min_eig;
  });
  double best = sweep.values.front();
  for (double v : sweep.values) best = std::max(best, v);
  for (std::size_t i = 0; i < sweep.values.size(); ++i)
    if (sweep.values[i] >= best - 1e-10)
      sweep.argmax_indices.push_back(static_cast<int>(i));
  return sweep;
}

}  // namespace

void cmd_design(const RunConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  ensure_out_dir(out_dir);
  if (config.design_positions.size() != 1)
    throw config_error("the design command sweeps a single measurement");

  const Mesh1D mesh = Mesh1D::uniform(config.elements);
  const AffineParameterizedSystem sys =
      build_case_system(config.kind, config.model, mesh);
  const ExecPolicy policy = policy_of(config);
  const QuadratureRule quad =
      QuadratureRule::for_prior(config.prior, config.quadrature_nodes);
  const CriterionEvaluator evaluator(sys, config.prior, quad, policy);

  ExperimentDesign base = design_of(config, mesh);
  const std::array<double, 2> bounds = resolved_bounds(base, mesh)[0];
  const std::vector<double> candidates =
      nodal_candidates(mesh, bounds, config.sweep.resolution);

  const NodalSweep fisher_sweep =
      nodal_sweep(evaluator, Criterion::Fisher, candidates, policy);
  const NodalSweep ecfm_sweep =
      nodal_sweep(evaluator, Criterion::Ecfm, candidates, policy);

  {
    csv::Writer out(out_dir / "design_sweep.csv",
                    {"beta", "fisher_value", "ecfm_value"});
    for (std::size_t r = 0; r < candidates.size(); ++r) {
      out.row({csv::num(candidates[r]), csv::num(fisher_sweep.values[r]),
               csv::num(ecfm_sweep.values[r])});
    }
  }

  {
    csv::Writer out(out_dir / "design_opt.csv",
                    {"criterion", "beta_opt", "value", "candidates",
                     "selection", "one_of_many"});
    auto emit = [&](const char* name, const NodalSweep& sweep) {
      const int best = sweep.argmax_indices.front();
      out.row({name,
               csv::num(sweep.positions[static_cast<std::size_t>(best)]),
               csv::num(sweep.values[static_cast<std::size_t>(best)]),
               csv::num(static_cast<int>(sweep.positions.size())),
               "nodal_argmax",
               sweep.argmax_indices.size() > 1 ? "yes" : "no"});
    };
    if (config.criterion == "both" || config.criterion == "fisher")
      emit("fisher", fisher_sweep);
    if (config.criterion == "both" || config.criterion == "ecfm")
      emit("ecfm", ecfm_sweep);
  }
  std::cout << "design: " << (out_dir / "design_sweep.csv").string() << ", "
            << (out_dir / "design_opt.csv").string() << '\n';
}

void cmd_noise_study(const RunConfig& config,
void cmd_noise_study(const RunConfig& config,
                     const std::filesystem::path& out_dir) {
  config.validate();
  ensure_out_dir(out_dir);
  const Mesh1D mesh = Mesh1D::uniform(config.elements);
  const AffineParameterizedSystem sys =
      build_case_system(config.kind, config.model, mesh);
  const ExecPolicy policy = policy_of(config);
  const QuadratureRule quad =
      QuadratureRule::for_prior(config.prior, config.quadrature_nodes);
  const CriterionEvaluator evaluator(sys, config.prior, quad, policy);

  ExperimentDesign base;
  base.positions = {0.5};
  base.min_separation = config.min_separation;
  const std::vector<std::array<double, 2>> bounds =
      resolved_bounds(base, mesh);

  // the three designs under test: each criterion's optimum plus a midpoint
  // control
  auto optimum_for = [&](Criterion which) {
    const SweepResult sweep = grid_sweep(
        [&, which](const Eigen::VectorXd& beta) {
          ExperimentDesign d = base;
          d.positions.assign(beta.data(), beta.data() + beta.size());
          return which == Criterion::Fisher ? evaluator.fisher(d, false).min_eig
                                            : evaluator.ecfm(d, false).min_eig;
        },
        bounds, config.sweep.resolution, policy);
    const DesignOptRow row = optimize_criterion(evaluator, which, base, bounds,
                                                sweep, policy);
    return row.report.best_beta[0];
  };
  const double beta_ecfm = optimum_for(Criterion::Ecfm);
  const double beta_fisher = optimum_for(Criterion::Fisher);
  const double beta_mid = 0.5 * (bounds[0][0] + bounds[0][1]);

  auto labeled = [&](const std::string& label, double beta) {
    LabeledDesign ld;
    ld.label = label;
    ld.design = base;
    ld.design.positions = {beta};
    return ld;
  };
  const std::vector<LabeledDesign> designs = {
      labeled("ecfm_opt", beta_ecfm), labeled("fisher_opt", beta_fisher),
      labeled("midpoint", beta_mid)};

  NoiseStudyConfig study;
  study.noise.sigma = config.noise.sigma;
  study.trials = config.noise.trials;
  study.seed = config.seed;
  study.support = config.noise.support.value_or(default_support(config));
  study.eps0 =
      consistent_parameter(config.kind, config.model).value_or(config.model.b);
  const NoiseStudyResult result =
      run_noise_study(sys, config.model, designs, study, policy);

  {
    csv::Writer out(out_dir / "noise_trials.csv",
                    {"design_label", "trial", "eps_hat"});
    for (const TrialRecord& rec : result.trials) {
      out.row({rec.design_label, csv::num(rec.trial),
               rec.failed ? "failed" : csv::num(rec.eps_hat)});
    }
  }
  {
    csv::Writer out(out_dir / "noise_summary.csv",
                    {"design_label", "mean", "stddev", "failures"});
    for (const DesignSummary& s : result.summary) {
      out.row({s.label, csv::num(s.mean),
               s.stddev_available ? csv::num(s.stddev) : "na",
               csv::num(s.failures)});
    }
  }
  std::cout << "noise-study: " << (out_dir / "noise_trials.csv").string()
            << ", " << (out_dir / "noise_summary.csv").string() << '\n';
}

void cmd_verify(const RunConfig& config) {
  config.validate();
  const ExecPolicy policy = policy_of(config);
  const Mesh1D mesh = Mesh1D::uniform(config.elements);
  int failures = 0;
  auto report = [&](bool ok, const std::string& name, double worst,
                    double tol) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << " (max "
              << csv::num(worst) << ", tol " << csv::num(tol) << ")\n";
    if (!ok) ++failures;
  };

  const CaseKind cases[] = {
      CaseKind::ParameterizedBC, CaseKind::ParameterizedSource,
      CaseKind::ParameterizedMaterial, CaseKind::MisspecifiedSource};
  const ModelProblemSpec spec = config.model;

  for (CaseKind kind : cases) {
    const AffineParameterizedSystem sys = build_case_system(kind, spec, mesh);
    rng::Stream stream(config.seed, static_cast<std::uint64_t>(kind));

    // constraint force at nodal measurement positions against closed forms
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      const int node = 1 + static_cast<int>(stream.next_uniform() *
                                            (mesh.node_count() - 1));
      const double beta =
          mesh.node_positions[static_cast<std::size_t>(
              std::min(node, mesh.node_count() - 1))];
      const double eps = kind == CaseKind::ParameterizedMaterial
                             ? stream.next_uniform(0.5, 2.0)
                             : stream.next_uniform(-2.0, 2.0);
      ExperimentDesign d;
      d.positions = {beta};
      DataVector data;
      data.values = Eigen::VectorXd::Constant(1, oracle::data_at(spec, beta));
      const SaddleSolution sol =
          solve_constrained(sys, Eigen::VectorXd::Constant(1, eps), d, data);
      const double lam =
          oracle::constraint_force(kind, spec, eps, beta).lambda;
      worst = std::max(worst, std::abs(sol.lambda[0] - lam));
    }
    report(worst < 1e-8,
           std::string("constraint force vs closed form, ") + to_string(kind),
           worst, 1e-8);

    // both criteria at nodal positions against closed forms
    const double consistent =
        consistent_parameter(kind, spec).value_or(spec.b);
    const PriorSpec prior = PriorSpec::point(consistent);
    const QuadratureRule quad = QuadratureRule::for_prior(prior, 1);
    const CriterionEvaluator evaluator(sys, prior, quad, policy);
    double worst_e = 0.0, worst_f = 0.0;
    for (int node = 8; node < mesh.node_count(); node += 16) {
      const double beta = mesh.node_positions[static_cast<std::size_t>(node)];
      ExperimentDesign d;
      d.positions = {beta};
      worst_e = std::max(
          worst_e, std::abs(evaluator.ecfm(d, false).min_eig -
                            oracle::ecfm_design_objective(kind, spec, prior,
                                                          beta)));
      worst_f = std::max(
          worst_f, std::abs(evaluator.fisher(d, false).min_eig -
                            oracle::fisher_design_objective(kind, spec, prior,
                                                            beta)));
    }
    report(worst_e < 1e-8,
           std::string("constraint-force criterion vs closed form, ") +
               to_string(kind),
           worst_e, 1e-8);
    report(worst_f < 1e-8,
           std::string("sensitivity criterion vs closed form, ") +
               to_string(kind),
           worst_f, 1e-8);

    // consistency: both estimators agree on data the model can reproduce
    const double eps_true = kind == CaseKind::ParameterizedMaterial
                                ? stream.next_uniform(0.5, 2.0)
                                : stream.next_uniform(-1.5, 1.5);
    ExperimentDesign d;
    d.positions = {0.25, 0.75};
    const Eigen::VectorXd theta =
        forward_solve(sys, Eigen::VectorXd::Constant(1, eps_true));
    DataVector data;
    data.values = measurement_operator(d, mesh).rows * theta;
    const std::array<double, 2> support =
        kind == CaseKind::ParameterizedMaterial
            ? std::array<double, 2>{0.1, 5.0}
            : std::array<double, 2>{-5.0, 5.0};
    const double eps0 = 0.5 * (support[0] + support[1]);
    const InverseResult ecfm_r = ecfm_inverse(
        sys, d, data, Eigen::VectorXd::Constant(1, eps0), {support});
    const InverseResult std_r = standard_inverse(
        sys, d, data, Eigen::VectorXd::Constant(1, eps0), {support});
    const double gap = std::abs(ecfm_r.eps[0] - std_r.eps[0]);
    report(gap < 1e-6 && ecfm_r.objective < 1e-12 && std_r.objective < 1e-12,
           std::string("estimator agreement on consistent data, ") +
               to_string(kind),
           std::max({gap, ecfm_r.objective, std_r.objective}), 1e-6);
  }

  if (failures > 0)
    throw error("verification failed: " + std::to_string(failures) +
                " checks");
  std::cout << "verify: all checks passed\n";
}

}  // namespace cfoed
