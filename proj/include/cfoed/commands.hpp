#pragma once

#include <filesystem>

#include "cfoed/run_config.hpp"

namespace cfoed {

// CLI command bodies. Each writes its CSV outputs under out_dir (created if
// missing) and throws typed errors; the CLI front end maps those to exit
// codes (config/domain -> 2, numerical -> 3).

/// forward.csv: x,u_true,u_fem over the mesh nodes. Returns the maximum
/// nodal error |u_fem - u_true|.
double cmd_forward(const RunConfig& config,
                   const std::filesystem::path& out_dir);

/// inverse.csv: method,eps_star,objective_star,iterations. Data comes from
/// the closed-form true response or from a file per config.
void cmd_inverse(const RunConfig& config,
                 const std::filesystem::path& out_dir);

/// design_sweep.csv: beta,fisher_value,ecfm_value over the sweep grid;
/// design_opt.csv: per-criterion optimization summary.
void cmd_design(const RunConfig& config, const std::filesystem::path& out_dir);

/// noise_trials.csv: design_label,trial,eps_hat;
/// noise_summary.csv: design_label,mean,stddev,failures.
void cmd_noise_study(const RunConfig& config,
                     const std::filesystem::path& out_dir);

/// Closed-form-versus-discretization verification suite; prints one line
/// per check and throws on failure.
void cmd_verify(const RunConfig& config);

}  // namespace cfoed
