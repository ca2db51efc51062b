#pragma once

// Fictitious Jump Method: thinning of a dominating Poisson process of rate
// lambda. Candidates at T_{n-1} + S/lambda are accepted with probability
// R_tot(X(T_n-)) / lambda, otherwise recorded as fictitious.

#include <cstddef>
#include <functional>
#include <limits>

#include "pdmp/model.hpp"
#include "pdmp/ode.hpp"

namespace pdmp {

class RateBound {
 public:
  enum class Kind { constant, per_segment };
  using BoundFn = std::function<double(const HybridState& state, double t)>;

  static RateBound constant(double value);
  /// Bound re-evaluated at the state of every event (true or fictitious).
  static RateBound per_segment(BoundFn fn);

  Kind kind() const noexcept { return kind_; }
  double at(const HybridState& state, double t) const;

 private:
  Kind kind_ = Kind::constant;
  double value_ = 0.0;
  BoundFn fn_;
};

struct FjmOptions {
  std::size_t max_jumps = 1'000'000;    // true jumps
  std::size_t max_events = 100'000'000;  // all candidates
};

/// Acceptance ratios up to 1 + this are treated as round-off at tight bounds.
inline constexpr double kBoundSlack = 1e-12;

/// Throws BoundViolated when R_tot exceeds the bound at a candidate time.
Trajectory fjm_simulate(const PdmpModel& model, const RateBound& bound, double t_end,
                        ExpStream& stream, const ode::SolverConfig& config,
                        FjmOptions opts = {});

std::size_t count_fictitious(const Trajectory& traj);

}  // namespace pdmp
