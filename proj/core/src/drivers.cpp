#include "mea/drivers.hpp"

#include <cmath>

namespace mea {

AlgoKind parse_algo(const std::string& name) {
  if (name == "me_a") return AlgoKind::me_a;
  if (name == "sgd") return AlgoKind::sgd;
  if (name == "gd") return AlgoKind::gd;
  if (name == "swa") return AlgoKind::swa;
  if (name == "ppm") return AlgoKind::ppm;
  if (name == "erm") return AlgoKind::erm;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::string to_string(AlgoKind algo) {
  switch (algo) {
    case AlgoKind::me_a: return "me_a";
    case AlgoKind::sgd: return "sgd";
    case AlgoKind::gd: return "gd";
    case AlgoKind::swa: return "swa";
    case AlgoKind::ppm: return "ppm";
    case AlgoKind::erm: return "erm";
  }
  return "?";
}

InnerKind parse_inner_kind(const std::string& name) {
  if (name == "exact") return InnerKind::exact;
  if (name == "sgd") return InnerKind::sgd;
  if (name == "subgrad_fixed") return InnerKind::subgrad_fixed;
  throw std::invalid_argument("unknown inner solver: " + name);
}

std::string to_string(InnerKind kind) {
  switch (kind) {
    case InnerKind::exact: return "exact";
    case InnerKind::sgd: return "sgd";
    case InnerKind::subgrad_fixed: return "subgrad_fixed";
  }
  return "?";
}

void OuterSchedule::validate(double p, double beta) const {
  if (kind == Kind::fixed) {
    if (!(alpha > 0.0) || alpha > 1.0 / p)
      throw std::invalid_argument("outer schedule: fixed alpha must satisfy 0 < alpha <= 1/p");
  } else {
    // alpha_t = c/(beta t) <= 1/p for all t iff c <= beta/p.
    if (!(c > 0.0) || c > beta / p)
      throw std::invalid_argument("outer schedule: inverse_t requires 0 < c <= beta/p so alpha_t <= 1/p");
  }
}

Trajectory run_me_a(const LossModel& loss, const Dataset& s, double p,
                    const OuterSchedule& schedule, InnerKind inner_kind,
                    const InnerConfig& inner, int outer_steps, ParamVec u0, ParamVec w0,
                    const DomainBall& ball, RngStream& index_stream,
                    std::optional<double> accuracy_target) {
  const double l = loss.weak_convexity();
  if (!(p > l)) throw std::invalid_argument("run_me_a: p > l required");
  const double beta = stability_beta(p, l);
  schedule.validate(p, beta);

  InnerConfig inner_cfg = inner;
  if (accuracy_target) {
    const double c1 = inner_sgd_constant(loss.lipschitz(), p, ball.diameter(), l);
    inner_cfg.steps =
        static_cast<std::int64_t>(std::ceil(c1 * c1 / (*accuracy_target * *accuracy_target)));
  }

  Trajectory traj;
  traj.algo = AlgoKind::me_a;
  ParamVec u = project(std::move(u0), ball);
  ParamVec w = project(std::move(w0), ball);

  TrajectoryRecord rec;
  rec.t = 0;
  rec.u = u;
  rec.emp_risk = loss.empirical_risk(u, s);
  traj.records.push_back(rec);

  for (int t = 1; t <= outer_steps; ++t) {
    InnerProblem problem(loss, s, u, p, ball);
    InnerResult inner_res;
    switch (inner_kind) {
      case InnerKind::exact:
        inner_res = inner_exact(problem);
        break;
      case InnerKind::sgd:
        inner_res = inner_sgd(problem, inner_cfg, w, index_stream);
        break;
      case InnerKind::subgrad_fixed:
        inner_res = inner_subgrad_fixed(problem, inner_cfg.c0, inner_cfg.steps, w);
        break;
    }
    const double alpha = schedule.alpha_at(t, beta);
    traj.records.back().w_next = inner_res.w_out;
    traj.records.back().inner_eps = inner_res.certified_eps;
    traj.records.back().alpha = alpha;
    traj.sum_alpha += alpha;
    traj.max_inner_eps = std::max(traj.max_inner_eps, inner_res.certified_eps);

    u = u + alpha * p * (inner_res.w_out - u);
    w = inner_res.w_out;

    TrajectoryRecord next;
    next.t = t;
    next.u = u;
    next.emp_risk = loss.empirical_risk(u, s);
    traj.records.push_back(std::move(next));
  }
  return traj;
}

Trajectory run_sgd(const LossModel& loss, const Dataset& s, const StepSchedule& schedule,
                   std::int64_t total_steps, ParamVec w0, const DomainBall& ball,
                   RngStream& index_stream, bool full_batch, double ridge,
                   std::int64_t record_every) {
  if (total_steps < 0) throw std::invalid_argument("run_sgd: steps must be >= 0");
  if (record_every <= 0) record_every = std::max<std::int64_t>(total_steps, 1);

  Trajectory traj;
  traj.algo = full_batch ? AlgoKind::gd : (ridge > 0.0 ? AlgoKind::erm : AlgoKind::sgd);
  ParamVec w = project(std::move(w0), ball);

  const auto push_record = [&](int t) {
    TrajectoryRecord rec;
    rec.t = t;
    rec.u = w;
    rec.emp_risk = loss.empirical_risk(w, s);
    traj.records.push_back(std::move(rec));
  };
  push_record(0);

  const std::size_t n = s.size();
  int block = 0;
  for (std::int64_t step = 1; step <= total_steps; ++step) {
    ParamVec g = full_batch ? loss.empirical_subgrad(w, s)
                            : loss.subgrad(w, s[index_stream.uniform_index(n)]);
    if (ridge != 0.0) g += ridge * w;
    w = project(w - schedule.step_at(step) * g, ball);
    if (step % record_every == 0 || step == total_steps) push_record(++block);
  }
  return traj;
}

Trajectory run_swa(const LossModel& loss, const Dataset& s, const TauSchedule& tau,
                   const StepSchedule& inner_schedule, std::int64_t inner_steps,
                   int outer_steps, ParamVec u0, ParamVec w0, const DomainBall& ball,
                   RngStream& index_stream) {
  Trajectory traj;
  traj.algo = AlgoKind::swa;
  ParamVec u = project(std::move(u0), ball);
  ParamVec w = project(std::move(w0), ball);

  TrajectoryRecord rec;
  rec.t = 0;
  rec.u = u;
  rec.emp_risk = loss.empirical_risk(u, s);
  traj.records.push_back(rec);

  const std::size_t n = s.size();
  for (int t = 1; t <= outer_steps; ++t) {
    for (std::int64_t step = 1; step <= inner_steps; ++step) {
      const ParamVec g = loss.subgrad(w, s[index_stream.uniform_index(n)]);
      w = project(w - inner_schedule.step_at(step) * g, ball);
    }
    const double tau_t = tau.tau_at(t);
    if (tau_t < 0.0 || tau_t >= 1.0)
      throw std::invalid_argument("run_swa: tau_t must be in [0, 1)");
    traj.records.back().w_next = w;
    traj.records.back().alpha = 1.0 - tau_t;
    u = tau_t * u + (1.0 - tau_t) * w;

    TrajectoryRecord next;
    next.t = t;
    next.u = u;
    next.emp_risk = loss.empirical_risk(u, s);
    traj.records.push_back(std::move(next));
  }
  return traj;
}

Trajectory run_ppm(const LossModel& loss, const Dataset& s, double p, int outer_steps,
                   ParamVec u0, const DomainBall& ball) {
  if (!loss.has_exact_prox()) throw std::logic_error("run_ppm: exact prox required");
  if (!(p > loss.weak_convexity())) throw std::invalid_argument("run_ppm: p > l required");

  Trajectory traj;
  traj.algo = AlgoKind::ppm;
  ParamVec u = project(std::move(u0), ball);

  TrajectoryRecord rec;
  rec.t = 0;
  rec.u = u;
  rec.emp_risk = loss.empirical_risk(u, s);
  traj.records.push_back(rec);

  for (int t = 1; t <= outer_steps; ++t) {
    ParamVec w = loss.exact_prox(u, p, s);
    traj.records.back().w_next = w;
    traj.records.back().inner_eps = 1e-12;
    traj.records.back().alpha = 1.0 / p;
    traj.sum_alpha += 1.0 / p;
    u = std::move(w);

    TrajectoryRecord next;
    next.t = t;
    next.u = u;
    next.emp_risk = loss.empirical_risk(u, s);
    traj.records.push_back(std::move(next));
  }
  return traj;
}

Trajectory run_erm(const LossModel& loss, const Dataset& s, double p,
                   const StepSchedule& schedule, std::int64_t total_steps, ParamVec w0,
                   const DomainBall& ball, RngStream& index_stream) {
  if (p < 0.0) throw std::invalid_argument("run_erm: p >= 0 required");
  Trajectory traj =
      run_sgd(loss, s, schedule, total_steps, std::move(w0), ball, index_stream, false, p);
  traj.algo = AlgoKind::erm;
  if (loss.weak_convexity() > 0.0 && p <= loss.weak_convexity())
    traj.warnings.push_back(
        "erm: p <= l, the regularized objective is not strongly convex; "
        "no stability certificate in the weakly-convex regime");
  return traj;
}

ParamVec final_output(const Trajectory& traj, FinalMode mode) {
  if (traj.records.empty()) throw std::invalid_argument("final_output: empty trajectory");
  if (mode != FinalMode::last_u)
    throw std::invalid_argument("final_output: prox mode needs the problem context overload");
  return traj.final_u();
}

ParamVec final_output(const Trajectory& traj, FinalMode mode, const LossModel& loss,
                      const Dataset& s, double p, const DomainBall& ball, double tol) {
  if (traj.records.empty()) throw std::invalid_argument("final_output: empty trajectory");
  if (mode == FinalMode::last_u) return traj.final_u();
  InnerProblem problem(loss, s, traj.final_u(), p, ball);
  return inner_to_tolerance(problem, tol).w_out;
}

}  // namespace mea
