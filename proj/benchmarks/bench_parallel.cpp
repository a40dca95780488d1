// Timing comparison between the serial reference kernels and the
// OpenMP-parallel ones, with a max-difference column as a sanity check
// (slot-ordered reductions make the two paths bit-identical).
//
// Usage: bench_parallel [threads]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "cfoed/design_optimizer.hpp"
#include "cfoed/noise_study.hpp"
#include "cfoed/oed_objectives.hpp"
#include "cfoed/reference.hpp"

using namespace cfoed;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

void report(const char* name, double serial_s, double parallel_s,
            double max_diff) {
  std::printf("%-34s %9.3f ms %9.3f ms %7.2fx   max|d| %.1e\n", name,
              1e3 * serial_s, 1e3 * parallel_s, serial_s / parallel_s,
              max_diff);
}

}  // namespace

int main(int argc, char** argv) {
  const int threads =
      argc > 1 ? std::atoi(argv[1]) : ExecPolicy::hardware().threads;
  const ExecPolicy policy = ExecPolicy::with_threads(threads);
  std::printf("threads: %d\n", threads);
  std::printf("%-34s %12s %12s %9s\n", "kernel", "serial", "parallel",
              "speedup");

  const ModelProblemSpec spec{1.0, 1.0, 1.0};
  const PriorSpec prior = PriorSpec::uniform(0.5, 1.5);

  {
    // force-criterion sweep: saddle solve + cascade per (node, point)
    const Mesh1D mesh = Mesh1D::uniform(256);
    const AffineParameterizedSystem sys =
        build_case_system(CaseKind::ParameterizedSource, spec, mesh);
    const QuadratureRule quad = QuadratureRule::for_prior(prior, 16);
    const std::vector<std::array<double, 2>> bounds = {
        {mesh.min_element_width(), 1.0}};
    const int resolution = 81;

    const CriterionFn serial_fn = [&](const Eigen::VectorXd& beta) {
      ExperimentDesign d;
      d.positions = {beta[0]};
      return reference::ecfm_hessian(sys, d, prior, quad, false).min_eig;
    };
    auto t0 = std::chrono::steady_clock::now();
    const SweepResult serial =
        reference::grid_sweep(serial_fn, bounds, resolution);
    const double serial_s = seconds_since(t0);

    const CriterionEvaluator evaluator(sys, prior, quad, policy);
    const CriterionFn parallel_fn = [&](const Eigen::VectorXd& beta) {
      ExperimentDesign d;
      d.positions = {beta[0]};
      return evaluator.ecfm(d, false).min_eig;
    };
    t0 = std::chrono::steady_clock::now();
    const SweepResult parallel =
        grid_sweep(parallel_fn, bounds, resolution, policy);
    const double parallel_s = seconds_since(t0);

    double max_diff = 0.0;
    for (int i = 0; i < serial.values.size(); ++i)
      max_diff = std::max(max_diff,
                          std::abs(serial.values[i] - parallel.values[i]));
    report("force-criterion sweep", serial_s, parallel_s, max_diff);
  }

  {
    // sensitivity-criterion matrix with gradients at a batch of designs
    const Mesh1D mesh = Mesh1D::uniform(512);
    const AffineParameterizedSystem sys =
        build_case_system(CaseKind::ParameterizedMaterial, spec, mesh);
    const PriorSpec mat_prior = PriorSpec::uniform(0.8, 1.6);
    const QuadratureRule quad = QuadratureRule::for_prior(mat_prior, 32);

    ExperimentDesign design;
    design.positions = {0.33, 0.66, 0.99};

    auto t0 = std::chrono::steady_clock::now();
    const CriterionResult serial =
        reference::fisher_matrix(sys, design, mat_prior, quad, true);
    const double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const CriterionEvaluator evaluator(sys, mat_prior, quad, policy);
    const CriterionResult parallel = evaluator.fisher(design, true);
    const double parallel_s = seconds_since(t0);

    report("sensitivity criterion (512 dof)", serial_s, parallel_s,
           std::abs(serial.min_eig - parallel.min_eig));
  }

  {
    // noise study: one standard inverse solve per trial
    const Mesh1D mesh = Mesh1D::uniform(64);
    const AffineParameterizedSystem sys =
        build_case_system(CaseKind::ParameterizedSource, spec, mesh);
    std::vector<LabeledDesign> designs(2);
    designs[0].label = "left";
    designs[0].design.positions = {mesh.min_element_width()};
    designs[1].label = "right";
    designs[1].design.positions = {1.0};
    NoiseStudyConfig cfg;
    cfg.noise.sigma = 0.01;
    cfg.trials = 2000;
    cfg.seed = 7;
    cfg.support = {-60.0, 62.0};
    cfg.eps0 = 1.0;

    auto t0 = std::chrono::steady_clock::now();
    const NoiseStudyResult serial =
        reference::noise_study(sys, spec, designs, cfg);
    const double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const NoiseStudyResult parallel =
        run_noise_study(sys, spec, designs, cfg, policy);
    const double parallel_s = seconds_since(t0);

    double max_diff = 0.0;
    for (std::size_t i = 0; i < serial.summary.size(); ++i)
      max_diff = std::max(max_diff, std::abs(serial.summary[i].stddev -
                                             parallel.summary[i].stddev));
    report("noise study (4000 trials)", serial_s, parallel_s, max_diff);
  }

  return 0;
}
