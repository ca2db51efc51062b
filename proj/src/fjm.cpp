#include "pdmp/fjm.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pdmp/error.hpp"
#include "pdmp/flow.hpp"

namespace pdmp {

RateBound RateBound::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidArgument, "rate bound must be positive and finite");
  }
  RateBound b;
  b.kind_ = Kind::constant;
  b.value_ = value;
  return b;
}

RateBound RateBound::per_segment(BoundFn fn) {
  if (!fn) throw Error(ErrorCode::InvalidArgument, "per-segment bound needs a function");
  RateBound b;
  b.kind_ = Kind::per_segment;
  b.fn_ = std::move(fn);
  return b;
}

double RateBound::at(const HybridState& state, double t) const {
  const double v = kind_ == Kind::constant ? value_ : fn_(state, t);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument, "rate bound evaluated to " + std::to_string(v));
  }
  return v;
}

Trajectory fjm_simulate(const PdmpModel& model, const RateBound& bound, double t_end,
                        ExpStream& stream, const ode::SolverConfig& config, FjmOptions opts) {
  if (!(t_end > model.initial_time)) {
    throw Error(ErrorCode::InvalidArgument, "t_end must exceed the initial time");
  }
  Trajectory traj;
  traj.t_end = t_end;
  traj.model_id = model.name;
  traj.seed = stream.seed();
  traj.realization = stream.realization();
  traj.method = Method::fjm;
  traj.atol = config.atol;
  traj.rtol = config.rtol;

  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  HybridState state = model.initial_state();
  double t = model.initial_time;
  UniformSource uniform(stream);
  std::size_t jumps = 0;
  std::size_t events = 0;

  while (jumps < opts.max_jumps && events < opts.max_events) {
    const double lambda = bound.at(state, t);
    const double s = stream.exp_draw();
    const double candidate = t + s / lambda;
    if (candidate > t_end) {
      HybridState end{flow_to(model, state, t, t_end, config), state.discrete};
      traj.push(t_end, end, end, RecordKind::horizon_end, kNaN);
      return traj;
    }

    HybridState before{flow_to(model, state, t, candidate, config), state.discrete};
    t = candidate;
    ++events;
    const double ratio = checked_rate(model, before.continuous, before.discrete, t) / lambda;
    if (ratio > 1.0 + kBoundSlack) {
      throw Error(ErrorCode::BoundViolated, "R_tot/lambda=" + std::to_string(ratio) +
                                                " at t=" + std::to_string(t));
    }
    if (uniform() < ratio) {
      HybridState after = model.jump_kernel(before.continuous, before.discrete, t, uniform);
      traj.push(t, before, after, RecordKind::true_jump, s);
      state = std::move(after);
      ++jumps;
    } else {
      traj.push(t, before, before, RecordKind::fictitious, s);
      state = std::move(before);
    }
    if (t >= t_end) break;
  }
  return traj;
}

std::size_t count_fictitious(const Trajectory& traj) { return traj.count(RecordKind::fictitious); }

}  // namespace pdmp
