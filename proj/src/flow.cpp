#include "pdmp/flow.hpp"

#include <cmath>

#include "pdmp/error.hpp"

namespace pdmp {

ode::OdeProblem flow_problem(const PdmpModel& model, const HybridState& start, double t0,
                             double t1) {
  ode::OdeProblem p;
  p.dimension = model.dim_continuous;
  p.initial_state = start.continuous;
  p.t_start = t0;
  p.t_end = t1;
  p.rhs = [&model, xd = start.discrete](std::span<const double> x, double t,
                                        std::span<double> dx) {
    model.vector_field(x, xd, t, dx);
  };
  return p;
}

Vec flow_to(const PdmpModel& model, const HybridState& start, double t0, double t1,
            const ode::SolverConfig& config) {
  if (t1 == t0) return start.continuous;
  if (!(t1 > t0) || !std::isfinite(t1)) {
    throw Error(ErrorCode::InvalidArgument, "flow target time must be finite and after start");
  }
  return ode::integrate(flow_problem(model, start, t0, t1), config).endpoint_state();
}

}  // namespace pdmp
