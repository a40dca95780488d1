#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cfoed/fem_system.hpp"
#include "cfoed/measurement.hpp"
#include "cfoed/model_problem.hpp"
#include "cfoed/parallel.hpp"

namespace cfoed {

/// Additive zero-mean iid Gaussian noise per measurement.
struct NoiseModel {
  double sigma = 0.0;

  void validate() const;
};

struct LabeledDesign {
  std::string label;
  ExperimentDesign design;
};

struct NoiseStudyConfig {
  NoiseModel noise;
  int trials = 1;
  std::uint64_t seed = 0;
  std::array<double, 2> support{0.0, 1.0};
  double eps0 = 0.0;
};

struct TrialRecord {
  std::string design_label;
  int trial = 0;
  double eps_hat = 0.0;
  bool failed = false;
};

struct DesignSummary {
  std::string label;
  double mean = 0.0;
  double stddev = 0.0;
  bool stddev_available = false;
  int failures = 0;
};

struct NoiseStudyResult {
  std::vector<TrialRecord> trials;
  std::vector<DesignSummary> summary;
};

/// Monte Carlo estimator-spread study: for every design, draw noisy data
/// from the true model, solve the standard inverse problem, and record the
/// estimate. The standard estimator is used for every design on purpose:
/// designs, not estimators, are the variable under test. Noise streams are
/// derived per (design, trial) from the seed, so the result is identical at
/// any thread count.
NoiseStudyResult run_noise_study(const AffineParameterizedSystem& system,
                                 const ModelProblemSpec& truth,
                                 const std::vector<LabeledDesign>& designs,
                                 const NoiseStudyConfig& config,
                                 const ExecPolicy& policy = {});

}  // namespace cfoed
