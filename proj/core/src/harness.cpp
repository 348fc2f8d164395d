#include "mea/harness.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace mea {

const char* const kCsvHeader =
    "mode,algo,loss,d,n,seed,T,N,p,alpha_or_c,tau_schedule,delta_u,lip_bound,"
    "probe_sup_gap,analytic_bound,bound_pass,emp_risk,pop_risk,gen_gap,opt_err,wall_ms";

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt_double(double v, const char* format = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::int64_t resolved_inner_steps(const ExperimentConfig& cfg, const LossModel& loss,
                                  std::size_t n) {
  if (cfg.inner_kind == InnerKind::sgd && cfg.accuracy_eps > 0.0) {
    const double c1 = inner_sgd_constant(loss.lipschitz(), cfg.p, 2.0 * cfg.radius,
                                         loss.weak_convexity());
    return static_cast<std::int64_t>(std::ceil(c1 * c1 / (cfg.accuracy_eps * cfg.accuracy_eps)));
  }
  return cfg.inner_n == 0 ? static_cast<std::int64_t>(n) : cfg.inner_n;
}

std::int64_t row_inner_steps(const ExperimentConfig& cfg, const LossModel& loss, AlgoKind algo,
                             std::size_t n) {
  switch (algo) {
    case AlgoKind::ppm:
      return 0;
    case AlgoKind::me_a:
      return cfg.inner_kind == InnerKind::exact ? 0 : resolved_inner_steps(cfg, loss, n);
    default:
      return cfg.inner_n == 0 ? static_cast<std::int64_t>(n) : cfg.inner_n;
  }
}

double row_alpha_or_c(const ExperimentConfig& cfg, AlgoKind algo) {
  switch (algo) {
    case AlgoKind::me_a:
      return cfg.outer.kind == OuterSchedule::Kind::fixed ? cfg.outer.alpha : cfg.outer.c;
    case AlgoKind::ppm:
      return 1.0 / cfg.p;
    default:
      return cfg.sgd.c;
  }
}

std::string row_tau_schedule(const ExperimentConfig& cfg, AlgoKind algo, double weak_conv) {
  switch (algo) {
    case AlgoKind::me_a:
      if (cfg.outer.kind == OuterSchedule::Kind::fixed)
        return "fixed:tau=" + fmt_double(1.0 - cfg.outer.alpha * cfg.p, "%.6g");
      if (cfg.outer.c == 1.0 && weak_conv == 0.0) return "(t-1)/t";
      return "inv_t:c=" + fmt_double(cfg.outer.c, "%.6g");
    case AlgoKind::ppm:
      return "const:0";
    case AlgoKind::swa:
      return cfg.swa_tau.running_mean ? "(t-1)/t"
                                      : "fixed:tau=" + fmt_double(cfg.swa_tau.tau, "%.6g");
    default:
      return "";
  }
}

ResultRow base_row(const ExperimentConfig& cfg, const LossModel& loss, AlgoKind algo,
                   std::size_t n, std::uint64_t trial) {
  ResultRow row;
  row.mode = cfg.mode;
  row.algo = to_string(algo);
  row.loss = loss.name();
  row.d = loss.dim();
  row.n = n;
  row.seed = cfg.seed + trial;
  row.T = cfg.T;
  row.N = row_inner_steps(cfg, loss, algo, n);
  row.p = cfg.p;
  row.alpha_or_c = row_alpha_or_c(cfg, algo);
  row.tau_schedule = row_tau_schedule(cfg, algo, loss.weak_convexity());
  return row;
}

struct BoundInfo {
  std::optional<double> value;
  bool order_level = false;
};

// Parameter-space stability bound for the envelope family: the convex case
// gates at (2L/n + 2p eps(A)) sum alpha_t; the weakly-convex T^q/n form is
// an order-level reference curve only.
BoundInfo analytic_stability_bound(const ExperimentConfig& cfg, const LossModel& loss,
                                   const Trajectory& traj, std::size_t n) {
  if (traj.algo != AlgoKind::me_a && traj.algo != AlgoKind::ppm) return {};
  const double l = loss.weak_convexity();
  const double lip = loss.lipschitz();
  const auto dn = static_cast<double>(n);
  if (l == 0.0) {
    BoundInfo info;
    info.value = 2.0 * lip * traj.sum_alpha / dn +
                 2.0 * cfg.p * traj.sum_alpha * traj.max_inner_eps;
    return info;
  }
  if (traj.algo == AlgoKind::ppm) return {};  // no weakly-convex certificate
  if (cfg.outer.kind != OuterSchedule::Kind::inverse_t)
    throw std::invalid_argument(
        "stability: the weakly-convex bound requires the diminishing schedule "
        "alpha_t = c/(beta t); a fixed stepsize violates that precondition");
  const double beta = stability_beta(cfg.p, l);
  const double q = beta * cfg.outer.c;
  if (!(q < 1.0))
    throw std::invalid_argument(
        "stability: the weakly-convex bound requires q = beta*c < 1");
  const auto steps = static_cast<double>(traj.records.size() - 1);
  BoundInfo info;
  info.value = (cfg.p / beta) *
               (2.0 * lip / ((cfg.p - l) * dn) + 2.0 * traj.max_inner_eps) *
               std::pow(std::max(steps, 1.0), q);
  info.order_level = true;
  return info;
}

}  // namespace

MaxQuadLoss make_max_quad_random(Eigen::Index d, int pieces, double weak_convexity,
                                 double domain_radius, std::uint64_t seed) {
  if (pieces < 1) throw std::invalid_argument("make_max_quad_random: pieces >= 1 required");
  RngStream rng(seed, "max_quad_pieces");
  std::vector<QuadPiece> out(static_cast<std::size_t>(pieces));
  for (auto& piece : out) {
    piece.a = rng.normal_vector(d);
    piece.a /= std::max(piece.a.norm(), 1e-12);
    Eigen::MatrixXd m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) m(i, j) = rng.normal();
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd eigs(d);
    eigs[0] = -weak_convexity;  // pin the curvature floor
    for (Eigen::Index i = 1; i < d; ++i)
      eigs[i] = -weak_convexity + rng.uniform() * 1.5 * weak_convexity;
    piece.B = q * eigs.asDiagonal() * q.transpose();
    piece.c = rng.normal() * 0.3;
    piece.g = piece.a;
  }
  return MaxQuadLoss(std::move(out), weak_convexity, domain_radius);
}

LossPtr make_loss(const ExperimentConfig& cfg) {
  if (cfg.loss_name == "l1") return std::make_shared<L1Loss>(cfg.d);
  if (cfg.loss_name == "adv_linear")
    return std::make_shared<AdvLinearAbsLoss>(cfg.d, cfg.loss_epsilon, cfg.loss_data_bound);
  if (cfg.loss_name == "max_quad") {
    if (cfg.d == 1)
      return std::make_shared<MaxQuadLoss>(make_max_quad_1d(cfg.loss_weak_convexity, cfg.radius));
    return std::make_shared<MaxQuadLoss>(make_max_quad_random(
        cfg.d, cfg.loss_pieces, cfg.loss_weak_convexity, cfg.radius, cfg.loss_seed));
  }
  throw std::invalid_argument("unknown loss: " + cfg.loss_name);
}

Dataset draw_dataset(const LossModel& loss, std::size_t n, std::uint64_t seed,
                     std::uint64_t trial) {
  RngStream rng(seed, "data", trial);
  std::vector<Sample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) samples.push_back(loss.draw_sample(rng));
  return Dataset(std::move(samples), seed);
}

Trajectory run_configured(const ExperimentConfig& cfg, const LossModel& loss, const Dataset& s,
                          AlgoKind algo, RngStream& index_stream) {
  const DomainBall ball(cfg.radius);
  const ParamVec zero = ParamVec::Zero(loss.dim());
  const std::int64_t n_steps = cfg.inner_n == 0 ? static_cast<std::int64_t>(s.size()) : cfg.inner_n;

  switch (algo) {
    case AlgoKind::me_a: {
      InnerConfig inner;
      inner.steps = n_steps;
      inner.schedule = cfg.inner_schedule;
      inner.c0 = cfg.inner_c0;
      std::optional<double> accuracy;
      if (cfg.inner_kind == InnerKind::sgd && cfg.accuracy_eps > 0.0)
        accuracy = cfg.accuracy_eps;
      return run_me_a(loss, s, cfg.p, cfg.outer, cfg.inner_kind, inner, cfg.T, zero, zero, ball,
                      index_stream, accuracy);
    }
    case AlgoKind::sgd:
      return run_sgd(loss, s, cfg.sgd, cfg.T * n_steps, zero, ball, index_stream, false, 0.0,
                     n_steps);
    case AlgoKind::gd:
      return run_sgd(loss, s, cfg.sgd, cfg.T * n_steps, zero, ball, index_stream, true, 0.0,
                     n_steps);
    case AlgoKind::erm:
      return run_erm(loss, s, cfg.p, cfg.sgd, cfg.T * n_steps, zero, ball, index_stream);
    case AlgoKind::swa:
      return run_swa(loss, s, cfg.swa_tau, cfg.sgd, n_steps, cfg.T, zero, zero, ball,
                     index_stream);
    case AlgoKind::ppm:
      return run_ppm(loss, s, cfg.p, cfg.T, zero, ball);
  }
  throw std::logic_error("run_configured: unreachable");
}

MonteCarloRisk population_risk_mc(const LossModel& loss, const ParamVec& w,
                                  std::int64_t samples, RngStream& rng) {
  if (samples < 2) throw std::invalid_argument("population_risk_mc: samples >= 2 required");
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t i = 1; i <= samples; ++i) {
    const double v = loss.eval(w, loss.draw_sample(rng));
    const double delta = v - mean;
    mean += delta / static_cast<double>(i);
    m2 += delta * (v - mean);
  }
  MonteCarloRisk out;
  out.value = mean;
  const double var = m2 / static_cast<double>(samples - 1);
  out.half_width = 1.96 * std::sqrt(var / static_cast<double>(samples));
  out.samples = samples;
  return out;
}

namespace {

StabilityTrial stability_trial(const ExperimentConfig& cfg, const LossModel& loss,
                               AlgoKind algo, std::size_t n, std::uint64_t trial,
                               Trajectory* traj_out = nullptr, Dataset* data_out = nullptr) {
  const auto t0 = Clock::now();
  Dataset s = draw_dataset(loss, n, cfg.seed, trial);

  RngStream neighbor_rng(cfg.seed, "neighbor", trial);
  const std::size_t idx =
      cfg.neighbor_index < 0 ? n - 1 : static_cast<std::size_t>(cfg.neighbor_index);
  if (idx >= n) throw std::invalid_argument("stability: neighbor index out of range");
  Dataset s_prime = make_neighbor(s, idx, loss.draw_sample(neighbor_rng));

  RngStream idx_a(cfg.seed, "idx", trial);
  RngStream idx_b(cfg.seed, "idx", trial);
  Trajectory traj_a = run_configured(cfg, loss, s, algo, idx_a);
  const Trajectory traj_b = run_configured(cfg, loss, s_prime, algo, idx_b);

  const ParamVec& out_a = traj_a.final_u();
  const ParamVec& out_b = traj_b.final_u();

  StabilityTrial t;
  t.seed = cfg.seed + trial;
  t.delta_u = (out_a - out_b).norm();
  t.lip_bound = loss.lipschitz() * t.delta_u;

  RngStream probe_rng(cfg.seed, "probe", trial);
  double sup = 0.0;
  for (int i = 0; i < cfg.probe_count; ++i) {
    const Sample z = loss.draw_sample(probe_rng);
    sup = std::max(sup, std::abs(loss.eval(out_a, z) - loss.eval(out_b, z)));
  }
  t.probe_sup_gap = sup;

  const BoundInfo bound = analytic_stability_bound(cfg, loss, traj_a, n);
  t.analytic_bound = bound.value;
  t.order_level = bound.order_level;
  if (bound.value && !bound.order_level) t.bound_pass = t.delta_u <= *bound.value + 1e-12;
  t.wall_ms = elapsed_ms(t0);

  if (traj_out) *traj_out = std::move(traj_a);
  if (data_out) *data_out = std::move(s);
  return t;
}

GenGapRecord gengap_from_output(const ExperimentConfig& cfg, const LossModel& loss,
                                const Dataset& s, const ParamVec& out, std::uint64_t trial) {
  GenGapRecord rec;
  rec.seed = cfg.seed + trial;
  rec.n = s.size();
  rec.emp_risk = loss.empirical_risk(out, s);
  if (auto closed = loss.population_risk(out)) {
    rec.pop_risk = *closed;
  } else {
    RngStream mc_rng(cfg.seed, "mc", trial);
    const MonteCarloRisk mc = population_risk_mc(loss, out, cfg.mc_samples, mc_rng);
    rec.pop_risk = mc.value;
    if (mc.half_width > cfg.mc_ci)
      rec.warning = "mc_ci_not_met:" + fmt_double(mc.half_width, "%.3g") + ">" +
                    fmt_double(cfg.mc_ci, "%.3g");
  }
  rec.gap = rec.pop_risk - rec.emp_risk;
  if (auto w_bar = loss.empirical_minimizer(s))
    rec.opt_err = rec.emp_risk - loss.empirical_risk(*w_bar, s);
  return rec;
}

}  // namespace

StabilityReport coupled_stability_run(const ExperimentConfig& cfg, AlgoKind algo,
                                      std::size_t n) {
  const LossPtr loss = make_loss(cfg);
  StabilityReport report;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    report.trials.push_back(
        stability_trial(cfg, *loss, algo, n, static_cast<std::uint64_t>(trial)));
    const StabilityTrial& t = report.trials.back();
    report.mean_delta_u += t.delta_u;
    report.mean_lip_bound += t.lip_bound;
    report.mean_probe_sup_gap += t.probe_sup_gap;
  }
  const auto k = static_cast<double>(cfg.trials);
  report.mean_delta_u /= k;
  report.mean_lip_bound /= k;
  report.mean_probe_sup_gap /= k;
  return report;
}

std::vector<GenGapRecord> gengap_run(const ExperimentConfig& cfg, AlgoKind algo,
                                     std::size_t n) {
  const LossPtr loss = make_loss(cfg);
  const DomainBall ball(cfg.radius);
  std::vector<GenGapRecord> records;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    const auto t0 = Clock::now();
    const auto tr = static_cast<std::uint64_t>(trial);
    const Dataset s = draw_dataset(*loss, n, cfg.seed, tr);
    RngStream idx(cfg.seed, "idx", tr);
    const Trajectory traj = run_configured(cfg, *loss, s, algo, idx);
    const ParamVec out = cfg.final_mode == FinalMode::last_u
                             ? traj.final_u()
                             : final_output(traj, FinalMode::prox_of_last_u, *loss, s, cfg.p, ball);
    GenGapRecord rec = gengap_from_output(cfg, *loss, s, out, tr);
    rec.wall_ms = elapsed_ms(t0);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ResultRow> rows_from_stability(const ExperimentConfig& cfg, AlgoKind algo,
                                           std::size_t n, const StabilityReport& report) {
  const LossPtr loss = make_loss(cfg);
  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < report.trials.size(); ++i) {
    const StabilityTrial& t = report.trials[i];
    ResultRow row = base_row(cfg, *loss, algo, n, static_cast<std::uint64_t>(i));
    row.delta_u = t.delta_u;
    row.lip_bound = t.lip_bound;
    row.probe_sup_gap = t.probe_sup_gap;
    row.analytic_bound = t.analytic_bound;
    if (t.bound_pass) row.bound_pass = *t.bound_pass ? 1 : 0;
    if (cfg.timing) row.wall_ms = t.wall_ms;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ResultRow> rows_from_gengap(const ExperimentConfig& cfg, AlgoKind algo,
                                        std::size_t n,
                                        const std::vector<GenGapRecord>& records) {
  const LossPtr loss = make_loss(cfg);
  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const GenGapRecord& rec = records[i];
    ResultRow row = base_row(cfg, *loss, algo, n, static_cast<std::uint64_t>(i));
    row.emp_risk = rec.emp_risk;
    row.pop_risk = rec.pop_risk;
    row.gen_gap = rec.gap;
    row.opt_err = rec.opt_err;
    if (cfg.timing) row.wall_ms = rec.wall_ms;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t worker_count(std::size_t cells) {
  std::size_t workers = std::max<std::size_t>(std::thread::hardware_concurrency(), 1);
  if (const char* env = std::getenv("MEA_WORKERS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1) workers = static_cast<std::size_t>(parsed);
  }
  return std::max<std::size_t>(std::min(workers, cells), 1);
}

std::vector<ResultRow> sweep(const ExperimentConfig& cfg) {
  struct Cell {
    std::size_t n;
    AlgoKind algo;
    std::uint64_t trial;
  };
  std::vector<Cell> cells;
  for (std::size_t n : cfg.n_list)
    for (AlgoKind algo : cfg.algos)
      for (int trial = 0; trial < cfg.trials; ++trial)
        cells.push_back({n, algo, static_cast<std::uint64_t>(trial)});

  std::vector<ResultRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&]() {
    const LossPtr loss = make_loss(cfg);
    const DomainBall ball(cfg.radius);
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) break;
      const Cell& cell = cells[i];
      ResultRow row = base_row(cfg, *loss, cell.algo, cell.n, cell.trial);
      try {
        const auto t0 = Clock::now();
        Trajectory traj_s;
        Dataset data;
        const StabilityTrial t =
            stability_trial(cfg, *loss, cell.algo, cell.n, cell.trial, &traj_s, &data);
        row.delta_u = t.delta_u;
        row.lip_bound = t.lip_bound;
        row.probe_sup_gap = t.probe_sup_gap;
        row.analytic_bound = t.analytic_bound;
        if (t.bound_pass) row.bound_pass = *t.bound_pass ? 1 : 0;

        // The S-side trajectory doubles as the generalization-gap run: same
        // data and index streams as a standalone gengap trial.
        const ParamVec out =
            cfg.final_mode == FinalMode::last_u
                ? traj_s.final_u()
                : final_output(traj_s, FinalMode::prox_of_last_u, *loss, data, cfg.p, ball);
        const GenGapRecord rec = gengap_from_output(cfg, *loss, data, out, cell.trial);
        row.emp_risk = rec.emp_risk;
        row.pop_risk = rec.pop_risk;
        row.gen_gap = rec.gap;
        row.opt_err = rec.opt_err;
        if (cfg.timing) row.wall_ms = elapsed_ms(t0);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      rows[i] = std::move(row);
    }
  };

  const std::size_t workers = worker_count(cells.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i + 1 < workers; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  return rows;
}

namespace {

std::string cell_or_empty(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string();
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << "\n";
  for (const ResultRow& row : rows) {
    out << row.mode << ',' << row.algo << ',' << row.loss << ',' << row.d << ',' << row.n << ','
        << row.seed << ',' << row.T << ',' << row.N << ',' << fmt_double(row.p) << ','
        << fmt_double(row.alpha_or_c) << ',' << row.tau_schedule << ','
        << cell_or_empty(row.delta_u) << ',' << cell_or_empty(row.lip_bound) << ','
        << cell_or_empty(row.probe_sup_gap) << ',' << cell_or_empty(row.analytic_bound) << ','
        << (row.bound_pass ? std::to_string(*row.bound_pass) : std::string()) << ','
        << cell_or_empty(row.emp_risk) << ',' << cell_or_empty(row.pop_risk) << ','
        << cell_or_empty(row.gen_gap) << ',' << cell_or_empty(row.opt_err) << ','
        << cell_or_empty(row.wall_ms) << "\n";
  }
}

void write_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_csv(out, rows);
}

void write_json(const std::string& path, const std::vector<ResultRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  const auto put = [](nlohmann::json& j, const char* key, const std::optional<double>& v) {
    if (v)
      j[key] = *v;
    else
      j[key] = nullptr;
  };
  for (const ResultRow& row : rows) {
    nlohmann::json j;
    j["mode"] = row.mode;
    j["algo"] = row.algo;
    j["loss"] = row.loss;
    j["d"] = row.d;
    j["n"] = row.n;
    j["seed"] = row.seed;
    j["T"] = row.T;
    j["N"] = row.N;
    j["p"] = row.p;
    j["alpha_or_c"] = row.alpha_or_c;
    j["tau_schedule"] = row.tau_schedule;
    put(j, "delta_u", row.delta_u);
    put(j, "lip_bound", row.lip_bound);
    put(j, "probe_sup_gap", row.probe_sup_gap);
    put(j, "analytic_bound", row.analytic_bound);
    if (row.bound_pass)
      j["bound_pass"] = *row.bound_pass;
    else
      j["bound_pass"] = nullptr;
    put(j, "emp_risk", row.emp_risk);
    put(j, "pop_risk", row.pop_risk);
    put(j, "gen_gap", row.gen_gap);
    put(j, "opt_err", row.opt_err);
    put(j, "wall_ms", row.wall_ms);
    j["error"] = row.error;
    arr.push_back(std::move(j));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << arr.dump(2) << "\n";
}

}  // namespace mea
