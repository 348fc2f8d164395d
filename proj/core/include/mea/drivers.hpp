#pragma once

#include "mea/inner.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mea {

enum class AlgoKind { me_a, sgd, gd, swa, ppm, erm };

AlgoKind parse_algo(const std::string& name);
std::string to_string(AlgoKind algo);

// Outer stepsize for the u-update. Fixed alpha requires 0 < alpha <= 1/p;
// inverse_t uses alpha_t = c / (beta t).
struct OuterSchedule {
  enum class Kind { fixed, inverse_t };
  Kind kind = Kind::fixed;
  double alpha = 0.1;  // fixed case
  double c = 1.0;      // inverse_t case

  double alpha_at(int t, double beta) const {
    return kind == Kind::fixed ? alpha : c / (beta * static_cast<double>(t));
  }
  void validate(double p, double beta) const;
};

// Per-step schedule for direct subgradient methods (SGD/GD/ERM and the SWA
// w-chain).
struct StepSchedule {
  enum class Kind { fixed, inv_sqrt };
  Kind kind = Kind::fixed;
  double c = 0.1;

  double step_at(std::int64_t s) const {
    return kind == Kind::fixed ? c : c / std::sqrt(static_cast<double>(s));
  }
};

enum class InnerKind { exact, sgd, subgrad_fixed };

InnerKind parse_inner_kind(const std::string& name);
std::string to_string(InnerKind kind);

struct TrajectoryRecord {
  int t = 0;
  ParamVec u;       // u^t (the current iterate for direct methods)
  ParamVec w_next;  // inner output produced from u^t; empty on the final record
  double inner_eps = 0.0;
  double emp_risk = 0.0;
  double alpha = 0.0;  // outer step leaving this record
};

struct Trajectory {
  AlgoKind algo = AlgoKind::me_a;
  std::vector<TrajectoryRecord> records;  // length T + 1
  std::vector<std::string> warnings;
  double sum_alpha = 0.0;      // sum of outer steps actually taken
  double max_inner_eps = 0.0;  // worst certified inner accuracy across steps

  const ParamVec& final_u() const { return records.back().u; }
};

// ME-A: alternate a warm-started inner solve of K(., u^t; S) with the
// outer gradient step u^{t+1} = u^t + alpha_t p (w^{t+1} - u^t).
// accuracy_target, when set, overrides the inner step count with
// N = ceil(C_1^2 / target^2).
Trajectory run_me_a(const LossModel& loss, const Dataset& s, double p,
                    const OuterSchedule& schedule, InnerKind inner_kind,
                    const InnerConfig& inner, int outer_steps, ParamVec u0, ParamVec w0,
                    const DomainBall& ball, RngStream& index_stream,
                    std::optional<double> accuracy_target = std::nullopt);

// Projected (stochastic) subgradient descent directly on R_S. full_batch
// uses the exact empirical subgradient (the `gd` algorithm); ridge > 0 adds
// the l2 term of the regularized-ERM objective. A record is written every
// record_every steps.
Trajectory run_sgd(const LossModel& loss, const Dataset& s, const StepSchedule& schedule,
                   std::int64_t total_steps, ParamVec w0, const DomainBall& ball,
                   RngStream& index_stream, bool full_batch = false, double ridge = 0.0,
                   std::int64_t record_every = 0);

struct TauSchedule {
  bool running_mean = true;  // tau_t = (t-1)/t
  double tau = 0.9;          // fixed value otherwise

  double tau_at(int t) const {
    return running_mean ? (static_cast<double>(t) - 1.0) / static_cast<double>(t) : tau;
  }
};

// Stochastic weight averaging: same skeleton as ME-A, but the w-chain runs
// plain SGD on R_S (p = 0 in the inner objective) and u is a passive
// average, never fed back.
Trajectory run_swa(const LossModel& loss, const Dataset& s, const TauSchedule& tau,
                   const StepSchedule& inner_schedule, std::int64_t inner_steps,
                   int outer_steps, ParamVec u0, ParamVec w0, const DomainBall& ball,
                   RngStream& index_stream);

// Proximal point method: u^{t+1} = w(u^t; S) via the exact prox.
Trajectory run_ppm(const LossModel& loss, const Dataset& s, double p, int outer_steps,
                   ParamVec u0, const DomainBall& ball);

// SGD on the regularized objective h(w;z) + p ||w||^2 / 2 (u pinned at 0).
Trajectory run_erm(const LossModel& loss, const Dataset& s, double p,
                   const StepSchedule& schedule, std::int64_t total_steps, ParamVec w0,
                   const DomainBall& ball, RngStream& index_stream);

enum class FinalMode { last_u, prox_of_last_u };

// Algorithm output: u^T, or w(u^T; S) via one exact/accurate inner solve.
ParamVec final_output(const Trajectory& traj, FinalMode mode);
ParamVec final_output(const Trajectory& traj, FinalMode mode, const LossModel& loss,
                      const Dataset& s, double p, const DomainBall& ball, double tol = 1e-10);

}  // namespace mea
