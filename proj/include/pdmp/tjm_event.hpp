#pragma once

// Event-detection baseline of the True Jump Method: integrate
// (dx/dt = F, dg/dt = R_tot) in physical time with g(T_{n-1}) = 0 and locate
// g = S_n on the dense output. Steps are controlled by the flow only.

#include <cstddef>

#include "pdmp/model.hpp"
#include "pdmp/ode.hpp"

namespace pdmp {

struct TjmOptions {
  std::size_t max_jumps = 1'000'000;
};

/// Throws EventMissed when g passes S_n but no sign change is found.
Trajectory tjm_event_simulate(const PdmpModel& model, double t_end, ExpStream& stream,
                              const ode::SolverConfig& config, TjmOptions opts = {});

}  // namespace pdmp
