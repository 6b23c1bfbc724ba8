#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sqg/config.hpp"
#include "sqg/pseudo.hpp"
#include "sqg/report.hpp"

namespace sqg {

enum class ExperimentKind { approx_rates, norm_inflation, pseudo_error, radial_decay, compose_translates, constants };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& s);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::constants;
  PseudoParams params;
  int grid_n = 1024;
  double grid_L = 1.5;
  double commutator_L = 6.0;  // commutator grid half-width times lambda
  std::string base = "smooth";  // smooth | explicit
  std::vector<int> N_values;
  std::vector<double> alphas;
  std::vector<double> times;
  std::vector<double> separations;
  std::vector<double> rescalings;
  int J = 2;
  double cfl = 0.5;
  double dt_max = 2e-3;
  double t_end = 0.0;  // 0: experiment default
  int n_quad = 16;
  int samples = 32;
  double r0_min = 4.0, r0_max = 16.0;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  Config resolved;  // every parameter, defaults filled in
  std::string hash;
};

// Fills defaults for the experiment, validates ranges, and records the resolved config.
ExperimentConfig resolve_config(ExperimentKind kind, const Config& raw);

using ProgressFn = std::function<void(const std::string&)>;

ExperimentReport run_constants(const ExperimentConfig& c, const ProgressFn& progress = {});
ExperimentReport run_approx_rates(const ExperimentConfig& c, const ProgressFn& progress = {});
ExperimentReport run_pseudo_error(const ExperimentConfig& c, const ProgressFn& progress = {});
ExperimentReport run_norm_inflation(const ExperimentConfig& c, const ProgressFn& progress = {});
ExperimentReport run_radial_decay(const ExperimentConfig& c, const ProgressFn& progress = {});
ExperimentReport run_compose_translates(const ExperimentConfig& c, const ProgressFn& progress = {});

ExperimentReport run_experiment(const ExperimentConfig& c, const ProgressFn& progress = {});

// Writes the resolved config next to the report as <experiment>.config.
std::string write_resolved_config(const ExperimentConfig& c, const std::string& dir);

}  // namespace sqg
