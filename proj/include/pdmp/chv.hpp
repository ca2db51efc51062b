#pragma once

// Change-of-variables (CHV) simulation: the jump-time integral equation is
// replaced by integrating
//
//   dy/ds   = F(y, tau) / R_tot(y, tau)
//   dtau/ds = 1 / R_tot(y, tau)
//
// over s in [0, S_n], S_n ~ E(1). Then (y(S_n), tau(S_n)) = (X(T_n-), T_n).

#include <cstddef>
#include <limits>

#include "pdmp/model.hpp"
#include "pdmp/ode.hpp"

namespace pdmp {

struct ChvState {
  Vec y;         // continuous state in the time-changed variable
  double tau = 0.0;  // physical time
  IVec discrete;
};

struct ChvOptions {
  double rate_floor = 1e-300;
  /// Rate of the added sampling Poisson process; 0 disables phantom samples.
  double sample_rate = 0.0;
  double t_horizon = std::numeric_limits<double>::infinity();
  std::size_t max_jumps = 1'000'000;
};

enum class SegmentOutcome { jump_reached, horizon_reached };

/// Which time is handed to F and R_tot inside a segment.
enum class TimeArgument {
  segment_start,  // T_{n-1}; valid for autonomous models only
  tau,            // tau(s); required when F or R_tot depend on time
};

struct ChvSegmentResult {
  ChvState end;
  SegmentOutcome outcome = SegmentOutcome::jump_reached;
  ode::DenseSolution dense;  // over s, state layout (y..., tau - start.tau)
};

/// Integrates one inter-jump interval in the s variable up to s_target.
/// Stops at the level crossing tau(s) = t_horizon if that comes first.
/// Throws RateFloorHit when R_tot (+ sample_rate) collapses to rate_floor or
/// the s-integration stalls.
ChvSegmentResult chv_segment(const PdmpModel& model, const ChvState& start, double s_target,
                             const ode::SolverConfig& config, const ChvOptions& opts,
                             TimeArgument time_arg = TimeArgument::tau);

/// Full CHV recursion until t_end or opts.max_jumps true jumps. Models with
/// time_dependent set are routed through chv_simulate_timedep.
Trajectory chv_simulate(const PdmpModel& model, double t_end, ExpStream& stream,
                        const ode::SolverConfig& config, ChvOptions opts = {});

/// As chv_simulate, always passing tau(s) as the time argument.
Trajectory chv_simulate_timedep(const PdmpModel& model, double t_end, ExpStream& stream,
                                const ode::SolverConfig& config, ChvOptions opts = {});

}  // namespace pdmp
