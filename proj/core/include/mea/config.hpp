#pragma once

#include "mea/drivers.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mea {

// Experiment description: flat key = value text with [sections], every knob
// overridable from the command line. Unknown keys are rejected by name.
struct ExperimentConfig {
  std::string mode = "run";  // run | stability | sweep | oracles
  std::uint64_t seed = 1;
  int trials = 8;
  std::string out;       // CSV path; empty prints a summary only
  std::string json_out;  // optional JSON mirror
  bool timing = true;    // wall_ms column; disable for byte-stable output

  // [data]
  Eigen::Index d = 10;
  std::vector<std::size_t> n_list = {1000};
  std::string distribution = "gaussian_std";

  // [loss]
  std::string loss_name = "l1";
  double loss_epsilon = 0.1;      // adv_linear attack radius
  double loss_data_bound = 3.0;   // adv_linear ||x|| bound
  double loss_weak_convexity = 0.5;  // max_quad modulus l
  int loss_pieces = 3;               // max_quad piece count (d > 1 family)
  std::uint64_t loss_seed = 42;      // max_quad piece generation

  // [domain]
  double radius = 10.0;  // D_W / 2

  // [algo]
  std::vector<AlgoKind> algos = {AlgoKind::me_a};
  double p = 1.0;
  int T = 50;
  OuterSchedule outer{OuterSchedule::Kind::inverse_t, 0.1, 1.0};
  InnerKind inner_kind = InnerKind::sgd;
  std::int64_t inner_n = 0;  // 0 = epoch mode, N = n
  double inner_c0 = 1.0;
  InnerScheduleKind inner_schedule = InnerScheduleKind::strongly_convex_decay;
  double accuracy_eps = 0.0;  // > 0 switches to accuracy mode, N = ceil(C1^2/eps^2)
  StepSchedule sgd{StepSchedule::Kind::fixed, 0.05};  // SGD/GD/ERM and the SWA w-chain
  TauSchedule swa_tau;
  FinalMode final_mode = FinalMode::last_u;

  // [stability]
  int probe_count = 10000;
  std::int64_t neighbor_index = -1;  // -1 = n - 1

  // [gengap]
  std::int64_t mc_samples = 1'000'000;  // Monte Carlo population-risk fallback
  double mc_ci = 0.01;                  // requested half-width at 95%

  // Re-validates every stepsize constraint; throws std::invalid_argument.
  void validate() const;
};

ExperimentConfig load_config_file(const std::string& path);

// Applies `key = value` to the config; key uses the section.name form.
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);

}  // namespace mea
