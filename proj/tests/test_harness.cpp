#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mea/harness.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace mea;

namespace {

ExperimentConfig small_cfg() {
  ExperimentConfig cfg;
  cfg.seed = 7;
  cfg.trials = 3;
  cfg.timing = false;
  cfg.d = 4;
  cfg.n_list = {20};
  cfg.T = 8;
  cfg.probe_count = 200;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config: unknown keys are rejected by name") {
  ExperimentConfig cfg;
  CHECK_THROWS_WITH_AS(apply_config_entry(cfg, "algo.warp_factor", "9"),
                       doctest::Contains("warp_factor"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(apply_config_entry(cfg, "frobnicate", "1"),
                       doctest::Contains("frobnicate"), std::invalid_argument);
}

TEST_CASE("config: value parsing and constraint revalidation") {
  ExperimentConfig cfg;
  apply_config_entry(cfg, "data.n", "10, 100 ,1000");
  CHECK(cfg.n_list == std::vector<std::size_t>{10, 100, 1000});
  apply_config_entry(cfg, "algo.list", "sgd,me_a");
  CHECK(cfg.algos.size() == 2);
  CHECK_THROWS_AS(apply_config_entry(cfg, "algo.p", "fast"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_entry(cfg, "mode", "dance"), std::invalid_argument);

  apply_config_entry(cfg, "algo.alpha", "0.9");
  apply_config_entry(cfg, "algo.p", "2.0");
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // alpha > 1/p
  apply_config_entry(cfg, "algo.alpha", "0.4");
  cfg.validate();
}

TEST_CASE("config file: sections, comments and overrides") {
  const char* path = "/tmp/mea_test_cfg.cfg";
  {
    std::ofstream out(path);
    out << "# toy study\n"
        << "mode = sweep\n"
        << "seed = 11\n"
        << "[data]\n"
        << "d = 6\n"
        << "n = 10,20\n"
        << "[algo]\n"
        << "list = me_a\n"
        << "p = 0.5  # envelope parameter\n"
        << "T = 5\n";
  }
  const ExperimentConfig cfg = load_config_file(path);
  CHECK(cfg.mode == "sweep");
  CHECK(cfg.seed == 11);
  CHECK(cfg.d == 6);
  CHECK(cfg.n_list == std::vector<std::size_t>{10, 20});
  CHECK(cfg.p == 0.5);
  CHECK(cfg.T == 5);
  std::remove(path);

  CHECK_THROWS_AS(load_config_file("/tmp/definitely_missing.cfg"), std::invalid_argument);
}

TEST_CASE("coupled runs with S' = S produce bitwise-identical outputs") {
  ExperimentConfig cfg = small_cfg();
  const LossPtr loss = make_loss(cfg);
  const Dataset s = draw_dataset(*loss, 20, cfg.seed, 0);
  const Dataset s_same = make_neighbor(s, 19, s[19]);
  RngStream idx_a(cfg.seed, "idx", 0);
  RngStream idx_b(cfg.seed, "idx", 0);
  const Trajectory a = run_configured(cfg, *loss, s, AlgoKind::me_a, idx_a);
  const Trajectory b = run_configured(cfg, *loss, s_same, AlgoKind::me_a, idx_b);
  CHECK(a.final_u() == b.final_u());
}

TEST_CASE("stability report: probe gap dominated by L * delta_u, bound arithmetic") {
  ExperimentConfig cfg = small_cfg();
  cfg.d = 10;
  cfg.n_list = {100};
  cfg.T = 100;
  cfg.trials = 4;
  cfg.inner_kind = InnerKind::exact;
  cfg.outer.kind = OuterSchedule::Kind::fixed;
  cfg.outer.alpha = 0.01;
  const StabilityReport rep = coupled_stability_run(cfg, AlgoKind::me_a, 100);
  const double expected_bound = 2.0 * std::sqrt(10.0) * (100 * 0.01) / 100.0;
  for (const StabilityTrial& t : rep.trials) {
    CHECK(t.probe_sup_gap <= t.lip_bound + 1e-9);
    REQUIRE(t.analytic_bound.has_value());
    // exact inner: the 2p sum(alpha) eps term only adds ~1e-12
    CHECK(*t.analytic_bound == doctest::Approx(expected_bound).epsilon(1e-9));
    REQUIRE(t.bound_pass.has_value());
    CHECK(*t.bound_pass);
    CHECK(t.delta_u <= expected_bound + 1e-12);
  }
}

TEST_CASE("stability: weakly-convex mode rejects a fixed outer schedule by name") {
  ExperimentConfig cfg = small_cfg();
  cfg.loss_name = "max_quad";
  cfg.d = 1;
  cfg.p = 1.0;
  cfg.outer.kind = OuterSchedule::Kind::fixed;
  cfg.outer.alpha = 0.5;
  cfg.inner_kind = InnerKind::exact;
  CHECK_THROWS_WITH_AS(static_cast<void>(coupled_stability_run(cfg, AlgoKind::me_a, 20)),
                       doctest::Contains("fixed stepsize"), std::invalid_argument);
}

TEST_CASE("stability: weakly-convex inverse_t emits an order-level reference bound") {
  ExperimentConfig cfg = small_cfg();
  cfg.loss_name = "max_quad";
  cfg.d = 1;
  cfg.p = 1.0;  // l = 0.5 -> beta = 1
  cfg.outer.kind = OuterSchedule::Kind::inverse_t;
  cfg.outer.c = 0.5;  // q = 0.5 < 1
  cfg.inner_kind = InnerKind::exact;
  const StabilityReport rep = coupled_stability_run(cfg, AlgoKind::me_a, 20);
  for (const StabilityTrial& t : rep.trials) {
    REQUIRE(t.analytic_bound.has_value());
    CHECK(t.order_level);
    CHECK(!t.bound_pass.has_value());  // reference curve, not a gate
  }
}

TEST_CASE("stability: sgd rows are measurement-only") {
  ExperimentConfig cfg = small_cfg();
  const StabilityReport rep = coupled_stability_run(cfg, AlgoKind::sgd, 20);
  for (const StabilityTrial& t : rep.trials) {
    CHECK(!t.analytic_bound.has_value());
    CHECK(t.probe_sup_gap <= t.lip_bound + 1e-9);
  }
}

TEST_CASE("sgd coupled loss-gap exceeds me_a at small n over 32 seeds") {
  ExperimentConfig cfg = small_cfg();
  cfg.d = 10;
  cfg.trials = 32;
  cfg.T = 20;
  cfg.probe_count = 100;
  cfg.sgd.kind = StepSchedule::Kind::inv_sqrt;
  cfg.sgd.c = 0.5;
  const StabilityReport sgd = coupled_stability_run(cfg, AlgoKind::sgd, 10);
  const StabilityReport me = coupled_stability_run(cfg, AlgoKind::me_a, 10);
  CHECK(sgd.mean_lip_bound > me.mean_lip_bound);
}

TEST_CASE("sweep: the five-decade two-algorithm study yields 80 rows in order") {
  ExperimentConfig cfg;
  cfg.mode = "sweep";
  cfg.seed = 7;
  cfg.trials = 8;
  cfg.timing = false;
  cfg.d = 10;
  cfg.n_list = {10, 100, 1000, 10000, 100000};
  cfg.algos = {AlgoKind::sgd, AlgoKind::me_a};
  cfg.T = 2;  // cardinality and ordering do not depend on the step budget
  cfg.probe_count = 10;
  const auto rows = sweep(cfg);
  REQUIRE(rows.size() == 80);
  std::size_t i = 0;
  for (std::size_t n : cfg.n_list)
    for (AlgoKind algo : cfg.algos)
      for (int trial = 0; trial < 8; ++trial, ++i) {
        CHECK(rows[i].n == n);
        CHECK(rows[i].algo == to_string(algo));
        CHECK(rows[i].error.empty());
      }
}

TEST_CASE("sweep: a failing cell becomes a row with empty results, sweep continues") {
  ExperimentConfig cfg = small_cfg();
  cfg.mode = "sweep";
  cfg.loss_name = "adv_linear";  // no exact prox, so ppm cells fail
  cfg.algos = {AlgoKind::ppm, AlgoKind::sgd};
  cfg.trials = 2;
  const auto rows = sweep(cfg);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(rows[i].algo == "ppm");
    CHECK(!rows[i].error.empty());
    CHECK(!rows[i].delta_u.has_value());
    CHECK(!rows[i].gen_gap.has_value());
  }
  for (std::size_t i = 2; i < 4; ++i) {
    CHECK(rows[i].algo == "sgd");
    CHECK(rows[i].error.empty());
    CHECK(rows[i].gen_gap.has_value());
  }
}

TEST_CASE("multi-dimensional max_quad family: probes pass and me_a runs") {
  ExperimentConfig cfg = small_cfg();
  cfg.loss_name = "max_quad";
  cfg.d = 3;
  cfg.loss_weak_convexity = 0.4;
  cfg.p = 1.0;
  cfg.inner_kind = InnerKind::sgd;
  const LossPtr loss = make_loss(cfg);
  CHECK(loss->weak_convexity() == 0.4);
  CHECK(loss->dim() == 3);
  CHECK(!loss->has_exact_prox());

  const DomainBall ball(cfg.radius);
  RngStream rng(61, "mq-multi");
  CHECK(lipschitz_probe(*loss, ball, 1000, rng).pass);
  CHECK(weak_convexity_probe(*loss, ball, 1000, rng).pass);
  CHECK(subgradient_inequality_probe(*loss, ball, 1000, rng).pass);

  const Dataset s = draw_dataset(*loss, 12, cfg.seed, 0);
  RngStream idx(cfg.seed, "idx", 0);
  const Trajectory traj = run_configured(cfg, *loss, s, AlgoKind::me_a, idx);
  CHECK(traj.records.size() == static_cast<std::size_t>(cfg.T) + 1);
  CHECK(is_finite(traj.final_u()));
}

TEST_CASE("accuracy mode resolves the row's inner step count from eps(A)") {
  ExperimentConfig cfg = small_cfg();
  cfg.accuracy_eps = 2.0;
  cfg.T = 2;
  const auto records = gengap_run(cfg, AlgoKind::me_a, 20);
  const auto rows = rows_from_gengap(cfg, AlgoKind::me_a, 20, records);
  const double c1 = inner_sgd_constant(2.0, cfg.p, 2.0 * cfg.radius, 0.0);  // L = sqrt(4)
  const auto expected = static_cast<std::int64_t>(std::ceil(c1 * c1 / 4.0));
  for (const auto& row : rows) CHECK(row.N == expected);
}

TEST_CASE("gengap in prox-output mode fits the training set at least as well") {
  ExperimentConfig cfg = small_cfg();
  cfg.trials = 2;
  const auto last_u = gengap_run(cfg, AlgoKind::me_a, 20);
  cfg.final_mode = FinalMode::prox_of_last_u;
  const auto proxed = gengap_run(cfg, AlgoKind::me_a, 20);
  for (std::size_t i = 0; i < last_u.size(); ++i)
    CHECK(proxed[i].emp_risk <= last_u[i].emp_risk + 1e-9);
}

TEST_CASE("gengap: records are internally consistent and reproducible") {
  ExperimentConfig cfg = small_cfg();
  cfg.trials = 4;
  const auto records = gengap_run(cfg, AlgoKind::me_a, 20);
  REQUIRE(records.size() == 4);
  for (const GenGapRecord& rec : records) {
    CHECK(rec.gap == rec.pop_risk - rec.emp_risk);
    REQUIRE(rec.opt_err.has_value());
    CHECK(*rec.opt_err >= -1e-12);  // w_bar is the exact empirical minimizer
    CHECK(rec.warning.empty());    // closed-form population risk, no MC
  }
  const auto again = gengap_run(cfg, AlgoKind::me_a, 20);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].emp_risk == again[i].emp_risk);
    CHECK(records[i].pop_risk == again[i].pop_risk);
  }
}

TEST_CASE("gengap: single sample at the origin reproduces the closed-form gap") {
  // out = origin on S = {0}: R_S = 0 and R_D = d sqrt(2/pi).
  L1Loss loss(10);
  std::vector<Sample> samples{Sample(ParamVec::Zero(10))};
  const Dataset s(samples);
  const ParamVec origin = ParamVec::Zero(10);
  CHECK(loss.empirical_risk(origin, s) == 0.0);
  CHECK(*loss.population_risk(origin) ==
        doctest::Approx(10.0 * std::sqrt(2.0 / M_PI)).epsilon(1e-12));
}

TEST_CASE("monte carlo population risk brackets the closed form") {
  L1Loss loss(3);
  RngStream rng(5, "mc-test");
  const ParamVec w = ParamVec::Constant(3, 0.3);
  const MonteCarloRisk mc = population_risk_mc(loss, w, 200000, rng);
  CHECK(std::abs(mc.value - *loss.population_risk(w)) <= 3.0 * mc.half_width);
}

TEST_CASE("sweep: cardinality, row order, determinism and the CSV schema") {
  ExperimentConfig cfg = small_cfg();
  cfg.mode = "sweep";
  cfg.n_list = {10, 20};
  cfg.algos = {AlgoKind::sgd, AlgoKind::me_a};
  cfg.trials = 2;
  const auto rows = sweep(cfg);
  REQUIRE(rows.size() == 8);  // 2 n x 2 algos x 2 seeds

  std::size_t i = 0;
  for (std::size_t n : {10, 20})
    for (const char* algo : {"sgd", "me_a"})
      for (int trial = 0; trial < 2; ++trial, ++i) {
        CHECK(rows[i].n == n);
        CHECK(rows[i].algo == algo);
        CHECK(rows[i].seed == cfg.seed + trial);
        CHECK(rows[i].error.empty());
        CHECK(rows[i].delta_u.has_value());
        CHECK(rows[i].gen_gap.has_value());
        CHECK(!rows[i].wall_ms.has_value());  // timing off
      }

  std::ostringstream a;
  write_csv(a, rows);
  std::ostringstream b;
  write_csv(b, sweep(cfg));
  CHECK(a.str() == b.str());
  CHECK(a.str().substr(0, a.str().find('\n')) ==
        "mode,algo,loss,d,n,seed,T,N,p,alpha_or_c,tau_schedule,delta_u,lip_bound,"
        "probe_sup_gap,analytic_bound,bound_pass,emp_risk,pop_risk,gen_gap,opt_err,wall_ms");
}

TEST_CASE("sweep results do not depend on the worker count") {
  ExperimentConfig cfg = small_cfg();
  cfg.mode = "sweep";
  cfg.n_list = {10, 15};
  cfg.algos = {AlgoKind::me_a};
  cfg.trials = 2;
  setenv("MEA_WORKERS", "1", 1);
  const auto serial = sweep(cfg);
  setenv("MEA_WORKERS", "4", 1);
  const auto parallel = sweep(cfg);
  unsetenv("MEA_WORKERS");
  REQUIRE(serial.size() == parallel.size());
  std::ostringstream a;
  std::ostringstream b;
  write_csv(a, serial);
  write_csv(b, parallel);
  CHECK(a.str() == b.str());
}

TEST_CASE("cli: stability subcommand writes the report CSV") {
  const char* out = "/tmp/mea_cli_r.csv";
  const char* argv[] = {"mea",  "stability", "--algo",      "me_a", "--n",   "50",
                        "--seed", "7",       "--T",         "5",    "--trials", "2",
                        "--no-timing", "--out", out};
  CHECK(cli_main(static_cast<int>(std::size(argv)), argv) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.substr(0, 4) == "mode");
  CHECK(csv.find("stability,me_a,l1,10,50,7,5,") != std::string::npos);
  std::remove(out);
}

TEST_CASE("cli: run subcommand with a JSON mirror") {
  const char* out = "/tmp/mea_cli_g.csv";
  const char* json = "/tmp/mea_cli_g.json";
  const char* argv[] = {"mea", "run",  "--algo", "sgd",      "--n",  "30",  "--seed", "3",
                        "--T", "4",    "--trials", "2",      "--no-timing", "--out", out,
                        "--json", json};
  CHECK(cli_main(static_cast<int>(std::size(argv)), argv) == 0);
  const std::string mirrored = slurp(json);
  CHECK(mirrored.find("\"gen_gap\"") != std::string::npos);
  CHECK(mirrored.find("\"error\": \"\"") != std::string::npos);
  std::remove(out);
  std::remove(json);
}

TEST_CASE("cli: config errors exit with code 1 and name the problem") {
  const char* argv[] = {"mea", "run", "--algo", "gradient_unicorn"};
  CHECK(cli_main(static_cast<int>(std::size(argv)), argv) == 1);
  const char* argv2[] = {"mea", "run", "--p", "2.0", "--alpha", "0.9"};
  CHECK(cli_main(static_cast<int>(std::size(argv2)), argv2) == 1);
}

TEST_CASE("cli: check-oracles exits zero when the battery passes") {
  const char* argv[] = {"mea", "check-oracles", "--seed", "5"};
  CHECK(cli_main(static_cast<int>(std::size(argv)), argv) == 0);
}

TEST_CASE("worker_count honors MEA_WORKERS and the cell count") {
  setenv("MEA_WORKERS", "3", 1);
  CHECK(worker_count(10) == 3);
  CHECK(worker_count(2) == 2);
  unsetenv("MEA_WORKERS");
  CHECK(worker_count(1) == 1);
}
