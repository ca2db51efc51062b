#include "pdmp/tjm_event.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pdmp/error.hpp"

namespace pdmp {

Trajectory tjm_event_simulate(const PdmpModel& model, double t_end, ExpStream& stream,
                              const ode::SolverConfig& config, TjmOptions opts) {
  if (!(t_end > model.initial_time)) {
    throw Error(ErrorCode::InvalidArgument, "t_end must exceed the initial time");
  }
  Trajectory traj;
  traj.t_end = t_end;
  traj.model_id = model.name;
  traj.seed = stream.seed();
  traj.realization = stream.realization();
  traj.method = Method::tjm_event;
  traj.atol = config.atol;
  traj.rtol = config.rtol;

  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  const std::size_t d = model.dim_continuous;
  HybridState state = model.initial_state();
  double t = model.initial_time;
  UniformSource uniform(stream);
  std::size_t jumps = 0;

  while (jumps < opts.max_jumps) {
    const double s = stream.exp_draw();
    checked_rate(model, state.continuous, state.discrete, t);

    bool negative_stage = false;
    ode::OdeProblem problem;
    problem.dimension = d + 1;
    problem.initial_state = state.continuous;
    problem.initial_state.push_back(0.0);
    problem.t_start = t;
    problem.t_end = t_end;
    const IVec& xd = state.discrete;
    problem.rhs = [&](std::span<const double> z, double time, std::span<double> dz) {
      const auto x = z.first(d);
      const double rate = model.total_rate(x, xd, time);
      if (!(rate >= 0.0)) {
        negative_stage = true;
        std::fill(dz.begin(), dz.end(), kNaN);
        return;
      }
      model.vector_field(x, xd, time, dz.first(d));
      dz[d] = rate;
    };

    double g_prev = 0.0;
    auto observer = [&](double, std::span<const double> z) {
      if (z[d] < g_prev - 10.0 * config.atol) ++traj.warnings;
      g_prev = z[d];
      return z[d] >= s;
    };

    ode::DenseSolution sol;
    try {
      sol = ode::integrate(problem, config, observer);
    } catch (const Error& e) {
      if (negative_stage && (e.code() == ErrorCode::NonFiniteDerivative ||
                             e.code() == ErrorCode::StepUnderflow)) {
        throw Error(ErrorCode::NegativeRate, std::string("during flow: ") + e.what());
      }
      throw;
    }

    if (!sol.stopped_by_observer()) {
      // g(t_end) < S_n: no event before the horizon.
      const Vec& z = sol.endpoint_state();
      HybridState end{Vec(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(d)), state.discrete};
      traj.push(t_end, end, end, RecordKind::horizon_end, kNaN);
      return traj;
    }

    double t_jump = 0.0;
    try {
      t_jump = ode::find_root(
          sol, [d, s](std::span<const double> z, double) { return z[d] - s; }, sol.t_start(),
          sol.t_reached());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoSignChange) throw;
      throw Error(ErrorCode::EventMissed,
                  "g reached S_n=" + std::to_string(s) + " without a detected crossing");
    }

    const Vec z = sol(t_jump);
    HybridState before{Vec(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(d)), state.discrete};
    HybridState after = model.jump_kernel(before.continuous, before.discrete, t_jump, uniform);
    traj.push(t_jump, before, after, RecordKind::true_jump, s);
    state = std::move(after);
    t = t_jump;
    ++jumps;
    if (t >= t_end) break;
  }
  return traj;
}

}  // namespace pdmp
