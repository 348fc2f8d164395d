#include "mea/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace mea {

namespace {

struct Flags {
  std::string config;
  std::string n;
  std::string algo;
  std::uint64_t seed = 0;
  std::string out;
  double p = 0.0;
  double alpha = 0.0;
  int t = 0;
  std::int64_t inner_n = 0;
  double epsilon = 0.0;
  std::string json;
  int trials = 0;
  bool no_timing = false;
};

void add_common_options(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "configuration file (key = value with [sections])");
  sub->add_option("--n", f.n, "sample count, or comma list for sweeps");
  sub->add_option("--algo", f.algo, "algorithm (me_a|sgd|gd|swa|ppm|erm), or comma list");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--out", f.out, "CSV output path (stdout when omitted)");
  sub->add_option("--p", f.p, "envelope parameter p");
  sub->add_option("--alpha", f.alpha, "fixed outer stepsize (selects the fixed schedule)");
  sub->add_option("--T", f.t, "outer step count");
  sub->add_option("--inner-N", f.inner_n, "inner steps per outer step (0 = one epoch)");
  sub->add_option("--epsilon", f.epsilon,
                  "inner accuracy target eps(A); picks N = ceil(C1^2/eps^2)");
  sub->add_option("--json", f.json, "JSON mirror output path");
  sub->add_option("--trials", f.trials, "number of trial seeds");
  sub->add_flag("--no-timing", f.no_timing, "omit wall_ms values for byte-stable output");
}

int run_oracles(const ExperimentConfig& cfg) {
  const std::vector<CheckResult> results = run_oracle_battery(cfg.seed);
  bool all_pass = true;
  std::printf("%-42s %-5s %13s %13s %8s\n", "check", "pass", "measured", "allowed", "samples");
  for (const CheckResult& r : results) {
    all_pass = all_pass && r.pass;
    std::printf("%-42s %-5s %13.3e %13.3e %8d\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                r.measured, r.allowed, r.samples);
  }
  std::printf("%s: %zu checks\n", all_pass ? "ALL PASS" : "FAILURES PRESENT", results.size());
  return all_pass ? 0 : 2;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Moreau-envelope solvers and a uniform-stability measurement harness"};
  app.require_subcommand(1);
  Flags f;
  CLI::App* cmd_run = app.add_subcommand("run", "per-seed generalization-gap runs");
  CLI::App* cmd_stability =
      app.add_subcommand("stability", "coupled neighbor runs with bound certification");
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "full factorial n x algo x seed study");
  CLI::App* cmd_oracles =
      app.add_subcommand("check-oracles", "run the envelope verification battery");
  for (CLI::App* sub : {cmd_run, cmd_stability, cmd_sweep, cmd_oracles})
    add_common_options(sub, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    ExperimentConfig cfg;
    if (!f.config.empty()) cfg = load_config_file(f.config);
    if (sub->count("--n")) apply_config_entry(cfg, "data.n", f.n);
    if (sub->count("--algo")) apply_config_entry(cfg, "algo.list", f.algo);
    if (sub->count("--seed")) cfg.seed = f.seed;
    if (sub->count("--out")) cfg.out = f.out;
    if (sub->count("--p")) cfg.p = f.p;
    if (sub->count("--alpha")) {
      cfg.outer.kind = OuterSchedule::Kind::fixed;
      cfg.outer.alpha = f.alpha;
    }
    if (sub->count("--T")) cfg.T = f.t;
    if (sub->count("--inner-N")) cfg.inner_n = f.inner_n;
    if (sub->count("--epsilon")) cfg.accuracy_eps = f.epsilon;
    if (sub->count("--json")) cfg.json_out = f.json;
    if (sub->count("--trials")) cfg.trials = f.trials;
    if (f.no_timing) cfg.timing = false;
    cfg.mode = sub->get_name() == "check-oracles" ? "oracles" : sub->get_name();

    if (cfg.mode == "oracles") return run_oracles(cfg);

    cfg.validate();
    std::vector<ResultRow> rows;
    if (cfg.mode == "sweep") {
      rows = sweep(cfg);
    } else if (cfg.mode == "stability") {
      for (std::size_t n : cfg.n_list)
        for (AlgoKind algo : cfg.algos) {
          const StabilityReport report = coupled_stability_run(cfg, algo, n);
          auto part = rows_from_stability(cfg, algo, n, report);
          rows.insert(rows.end(), part.begin(), part.end());
        }
    } else {  // run
      for (std::size_t n : cfg.n_list)
        for (AlgoKind algo : cfg.algos) {
          const auto records = gengap_run(cfg, algo, n);
          auto part = rows_from_gengap(cfg, algo, n, records);
          rows.insert(rows.end(), part.begin(), part.end());
        }
    }

    if (cfg.out.empty())
      write_csv(std::cout, rows);
    else
      write_csv(cfg.out, rows);
    if (!cfg.json_out.empty()) write_json(cfg.json_out, rows);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mea
