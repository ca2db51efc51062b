#pragma once

#include "pdmp/model.hpp"
#include "pdmp/ode.hpp"

namespace pdmp {

/// Physical-time flow dx/dt = F(x, x_d, t) with the discrete part frozen.
ode::OdeProblem flow_problem(const PdmpModel& model, const HybridState& start, double t0,
                             double t1);

/// Continuous state reached by flowing from (start, t0) to t1. Returns the
/// start state unchanged when t1 == t0.
Vec flow_to(const PdmpModel& model, const HybridState& start, double t0, double t1,
            const ode::SolverConfig& config);

}  // namespace pdmp
