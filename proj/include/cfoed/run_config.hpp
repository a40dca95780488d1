#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cfoed/model_problem.hpp"
#include "cfoed/prior.hpp"

namespace cfoed {

struct SweepConfig {
  int resolution = 101;
};

struct InverseConfig {
  std::string method = "both";         // "standard" | "ecfm" | "both"
  std::string data_source = "analytic";  // "analytic" | "file"
  std::string data_file;
  std::optional<double> eps0;
  std::optional<std::array<double, 2>> support;
};

struct NoiseConfig {
  double sigma = 0.01;
  int trials = 100;
  std::optional<std::array<double, 2>> support;
};

/// One experiment definition; see configs/ for examples and the README for
/// the schema. The seed fixes every stochastic choice.
struct RunConfig {
  CaseKind kind = CaseKind::ParameterizedSource;
  ModelProblemSpec model;
  int elements = 64;
  PriorSpec prior = PriorSpec::uniform(0.5, 1.5);
  int quadrature_nodes = 16;
  std::vector<double> design_positions = {0.5};
  std::vector<std::array<double, 2>> design_bounds;  // empty -> [h, 1]
  double min_separation = -1.0;
  std::string criterion = "both";  // for the design optimization report
  SweepConfig sweep;
  InverseConfig inverse;
  NoiseConfig noise;
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace cfoed
