#include "pdmp/chv.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pdmp/error.hpp"
#include "pdmp/flow.hpp"

namespace pdmp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Trajectory run_chv(const PdmpModel& model, double t_end, ExpStream& stream,
                   const ode::SolverConfig& config, ChvOptions opts, TimeArgument time_arg) {
  if (!(t_end > model.initial_time)) {
    throw Error(ErrorCode::InvalidArgument, "t_end must exceed the initial time");
  }
  if (!(opts.sample_rate >= 0.0) || !std::isfinite(opts.sample_rate)) {
    throw Error(ErrorCode::InvalidArgument, "sample_rate must be finite and non-negative");
  }
  opts.t_horizon = t_end;

  Trajectory traj;
  traj.t_end = t_end;
  traj.model_id = model.name;
  traj.seed = stream.seed();
  traj.realization = stream.realization();
  traj.method = Method::chv;
  traj.atol = config.atol;
  traj.rtol = config.rtol;

  HybridState state = model.initial_state();
  double t = model.initial_time;
  UniformSource uniform(stream);
  std::size_t jumps = 0;

  while (jumps < opts.max_jumps) {
    const double s = stream.exp_draw();
    ChvSegmentResult seg;
    try {
      seg = chv_segment(model, {state.continuous, t, state.discrete}, s, config, opts, time_arg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RateFloorHit) throw;
      // The remaining s-mass is unreachable: the next jump time is infinite.
      if (!std::isfinite(t_end)) {
        throw Error(ErrorCode::RateFloorHit,
                    "next jump time is infinite and the horizon is unbounded");
      }
      HybridState end{flow_to(model, state, t, t_end, config), state.discrete};
      traj.push(t_end, end, end, RecordKind::horizon_end, kNaN);
      return traj;
    }

    if (seg.outcome == SegmentOutcome::horizon_reached) {
      HybridState end{std::move(seg.end.y), state.discrete};
      traj.push(t_end, end, end, RecordKind::horizon_end, kNaN);
      return traj;
    }

    t = seg.end.tau;
    HybridState before{std::move(seg.end.y), state.discrete};

    if (opts.sample_rate > 0.0) {
      const double rate = checked_rate(model, before.continuous, before.discrete, t);
      if (uniform() * (rate + opts.sample_rate) < opts.sample_rate) {
        traj.push(t, before, before, RecordKind::phantom_sample, s);
        state = std::move(before);
        if (t >= t_end) return traj;
        continue;
      }
    }

    HybridState after = model.jump_kernel(before.continuous, before.discrete, t, uniform);
    traj.push(t, before, after, RecordKind::true_jump, s);
    state = std::move(after);
    ++jumps;
    if (t >= t_end) break;
  }
  return traj;
}

}  // namespace

ChvSegmentResult chv_segment(const PdmpModel& model, const ChvState& start, double s_target,
                             const ode::SolverConfig& config, const ChvOptions& opts,
                             TimeArgument time_arg) {
  if (!(s_target > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "s_target must be positive");
  }
  if (!(opts.t_horizon > start.tau)) {
    throw Error(ErrorCode::InvalidArgument, "horizon must lie after the segment start");
  }
  const std::size_t d = model.dim_continuous;
  const double rate0 =
      checked_rate(model, start.y, start.discrete, start.tau) + opts.sample_rate;
  if (!(rate0 > opts.rate_floor)) {
    throw Error(ErrorCode::RateFloorHit, "R_tot=" + std::to_string(rate0) + " at segment start");
  }

  bool floor_hit = false;
  const IVec& xd = start.discrete;
  const double t_frozen = start.tau;

  ode::OdeProblem problem;
  problem.dimension = d + 1;
  problem.initial_state = start.y;
  // Elapsed time tau - T_{n-1} is integrated instead of tau itself so that the
  // relative tolerance applies to the inter-jump interval, not to |T_{n-1}|.
  problem.initial_state.push_back(0.0);
  problem.t_start = 0.0;
  problem.t_end = s_target;
  problem.rhs = [&](std::span<const double> z, double, std::span<double> dz) {
    const auto y = z.first(d);
    const double time = time_arg == TimeArgument::tau ? t_frozen + z[d] : t_frozen;
    const double rate = model.total_rate(y, xd, time) + opts.sample_rate;
    if (!(rate > opts.rate_floor)) {
      // Trial stage past the zero of R_tot: reject so the step shrinks.
      floor_hit = true;
      std::fill(dz.begin(), dz.end(), kNaN);
      return;
    }
    model.vector_field(y, xd, time, dz.first(d));
    const double inv = 1.0 / rate;
    for (std::size_t i = 0; i < d; ++i) dz[i] *= inv;
    dz[d] = inv;
  };

  const double horizon = opts.t_horizon;
  const double remaining = horizon - start.tau;
  ode::StepObserver stop_at_horizon;
  if (std::isfinite(horizon)) {
    stop_at_horizon = [d, remaining](double, std::span<const double> z) {
      return z[d] > remaining;
    };
  }

  ChvSegmentResult result;
  try {
    result.dense = ode::integrate(problem, config, stop_at_horizon);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::StepUnderflow ||
        (floor_hit && e.code() == ErrorCode::NonFiniteDerivative)) {
      throw Error(ErrorCode::RateFloorHit, std::string("s-integration collapsed (") +
                                               std::string(e.what()) + ")");
    }
    throw;
  }

  const auto& dense = result.dense;
  result.end.discrete = start.discrete;
  if (dense.stopped_by_observer()) {
    const double s_cross = ode::find_root(
        dense, [d, remaining](std::span<const double> z, double) { return z[d] - remaining; }, 0.0,
        dense.t_reached());
    Vec z = dense(s_cross);
    result.end.y.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(d));
    result.end.tau = horizon;
    result.outcome = SegmentOutcome::horizon_reached;
    return result;
  }
  const Vec& z = dense.endpoint_state();
  result.end.y.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(d));
  result.end.tau = start.tau + z[d];
  result.outcome = SegmentOutcome::jump_reached;
  return result;
}

Trajectory chv_simulate(const PdmpModel& model, double t_end, ExpStream& stream,
                        const ode::SolverConfig& config, ChvOptions opts) {
  const auto time_arg = model.time_dependent ? TimeArgument::tau : TimeArgument::segment_start;
  return run_chv(model, t_end, stream, config, opts, time_arg);
}

Trajectory chv_simulate_timedep(const PdmpModel& model, double t_end, ExpStream& stream,
                                const ode::SolverConfig& config, ChvOptions opts) {
  return run_chv(model, t_end, stream, config, opts, TimeArgument::tau);
}

}  // namespace pdmp
