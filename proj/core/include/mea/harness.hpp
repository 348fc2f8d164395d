#pragma once

#include "mea/config.hpp"
#include "mea/envelope.hpp"
#include "mea/losses.hpp"

#include <iosfwd>
#include <optional>

namespace mea {

LossPtr make_loss(const ExperimentConfig& cfg);

// Seeded random max-of-quadratics family for d > 1: k pieces with curvature
// floor exactly -l and data-coupled offsets.
MaxQuadLoss make_max_quad_random(Eigen::Index d, int pieces, double weak_convexity,
                                 double domain_radius, std::uint64_t seed);

// n samples from the loss's data distribution on the (seed, "data", trial) stream.
Dataset draw_dataset(const LossModel& loss, std::size_t n, std::uint64_t seed,
                     std::uint64_t trial);

// One configured trajectory; the index stream supplies every per-step sample
// draw, so coupled runs pass two streams built from the same triple.
Trajectory run_configured(const ExperimentConfig& cfg, const LossModel& loss, const Dataset& s,
                          AlgoKind algo, RngStream& index_stream);

struct MonteCarloRisk {
  double value = 0.0;
  double half_width = 0.0;  // 95% CI half-width
  std::int64_t samples = 0;
};
MonteCarloRisk population_risk_mc(const LossModel& loss, const ParamVec& w,
                                  std::int64_t samples, RngStream& rng);

// One coupled neighbor trial: parameter divergence, its Lipschitz loss-gap
// certificate, the probe lower bound on the worst-case loss gap, and the
// analytic bound when one is certified for the algorithm.
struct StabilityTrial {
  std::uint64_t seed = 0;
  double delta_u = 0.0;
  double lip_bound = 0.0;      // L * delta_u
  double probe_sup_gap = 0.0;  // max over m fresh probes
  std::optional<double> analytic_bound;
  bool order_level = false;  // bound is an order-level reference, not a gate
  std::optional<bool> bound_pass;
  double wall_ms = 0.0;
};

struct StabilityReport {
  std::vector<StabilityTrial> trials;
  double mean_delta_u = 0.0;
  double mean_lip_bound = 0.0;
  double mean_probe_sup_gap = 0.0;
};

StabilityReport coupled_stability_run(const ExperimentConfig& cfg, AlgoKind algo, std::size_t n);

struct GenGapRecord {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double emp_risk = 0.0;
  double pop_risk = 0.0;
  double gap = 0.0;
  std::optional<double> opt_err;  // R_S(out) - R_S(w_bar), when w_bar is exact
  std::string warning;
  double wall_ms = 0.0;
};

std::vector<GenGapRecord> gengap_run(const ExperimentConfig& cfg, AlgoKind algo, std::size_t n);

// One CSV row. Result fields stay empty when the mode or an error leaves
// them unset; `error` travels in the JSON mirror only.
struct ResultRow {
  std::string mode;
  std::string algo;
  std::string loss;
  Eigen::Index d = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  int T = 0;
  std::int64_t N = 0;
  double p = 0.0;
  double alpha_or_c = 0.0;
  std::string tau_schedule;
  std::optional<double> delta_u, lip_bound, probe_sup_gap, analytic_bound;
  std::optional<int> bound_pass;
  std::optional<double> emp_risk, pop_risk, gen_gap, opt_err;
  std::optional<double> wall_ms;
  std::string error;
};

extern const char* const kCsvHeader;

std::vector<ResultRow> rows_from_stability(const ExperimentConfig& cfg, AlgoKind algo,
                                           std::size_t n, const StabilityReport& report);
std::vector<ResultRow> rows_from_gengap(const ExperimentConfig& cfg, AlgoKind algo,
                                        std::size_t n, const std::vector<GenGapRecord>& records);

// Full factorial (n x algo x seed); each cell runs the coupled stability
// pair and reuses the S-trajectory for the generalization gap. Cells run
// concurrently up to MEA_WORKERS; row order is (n, algo, seed) regardless
// of scheduling, and per-cell failures become rows with empty results.
std::vector<ResultRow> sweep(const ExperimentConfig& cfg);

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_csv(const std::string& path, const std::vector<ResultRow>& rows);
void write_json(const std::string& path, const std::vector<ResultRow>& rows);

std::size_t worker_count(std::size_t cells);

int cli_main(int argc, const char* const* argv);

}  // namespace mea
