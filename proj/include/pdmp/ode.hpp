#pragma once

// Adaptive Dormand-Prince 5(4) integrator with continuous output and
// bracketing root finding on the interpolant.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace pdmp::ode {

using Vec = std::vector<double>;

/// Right-hand side writes dx/dt into `dxdt`. Returning non-finite values
/// marks the stage as unusable; the step is then rejected and retried smaller.
using Rhs = std::function<void(std::span<const double> x, double t, std::span<double> dxdt)>;

/// Called after every accepted step with the new time and state. Returning
/// true stops the integration at that step.
using StepObserver = std::function<bool(double t, std::span<const double> x)>;

struct OdeProblem {
  std::size_t dimension = 0;
  Rhs rhs;
  Vec initial_state;
  double t_start = 0.0;
  double t_end = 0.0;  // may be +inf when an observer terminates the run
};

struct SolverConfig {
  double atol = 1e-10;
  double rtol = 1e-10;
  double h_init = 0.0;  // 0 selects the automatic initial step
  double h_min = 0.0;
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 1'000'000;

  static SolverConfig with_tolerance(double tol) {
    SolverConfig c;
    c.atol = tol;
    c.rtol = tol;
    return c;
  }
};

/// Piecewise quartic interpolant over the accepted steps of one integration.
class DenseSolution {
 public:
  struct Segment {
    double t_left;
    double t_right;
    std::size_t offset;  // into coefficient storage, 5 * dimension doubles
  };

  DenseSolution() = default;
  explicit DenseSolution(std::size_t dimension, double t_start, Vec initial_state);

  std::size_t dimension() const noexcept { return dim_; }
  double t_start() const noexcept { return t_start_; }
  /// Last time reached; equals t_end unless an observer stopped the run.
  double t_reached() const noexcept { return t_reached_; }
  const Vec& endpoint_state() const noexcept { return endpoint_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  std::size_t step_count() const noexcept { return segments_.size(); }
  std::size_t rejected_step_count() const noexcept { return rejected_; }
  bool stopped_by_observer() const noexcept { return stopped_; }

  /// Interpolates the full state at `t` into `out`.
  void evaluate(double t, std::span<double> out) const;
  Vec operator()(double t) const;
  /// One component only; cheaper for scalar event functions.
  double component(double t, std::size_t i) const;

 private:
  friend DenseSolution integrate(const OdeProblem&, const SolverConfig&, const StepObserver&);

  std::size_t locate(double t) const;
  void append_step(double t_left, double t_right, std::span<const double> coeffs,
                   std::span<const double> y_right);

  std::size_t dim_ = 0;
  double t_start_ = 0.0;
  double t_reached_ = 0.0;
  Vec initial_;
  Vec endpoint_;
  std::vector<Segment> segments_;
  Vec coeffs_;
  std::size_t rejected_ = 0;
  bool stopped_ = false;
};

/// Integrates `problem` from t_start towards t_end with per-step error control.
/// Throws pdmp::Error with MaxStepsExceeded, StepUnderflow or NonFiniteDerivative.
DenseSolution integrate(const OdeProblem& problem, const SolverConfig& config,
                        const StepObserver& observer = {});

/// Throws OutOfSpan when t lies outside [t_start, t_reached].
Vec interpolate(const DenseSolution& sol, double t);

using EventFunction = std::function<double(std::span<const double> x, double t)>;

/// Time tolerance used by find_root for a bracket of the given width.
double root_time_tolerance(double span);

/// Leftmost sign change of g along the interpolant inside [t_lo, t_hi].
/// Segments are scanned left to right; the first one whose endpoints bracket a
/// sign change is refined. Throws BracketInvalid or NoSignChange.
double find_root(const DenseSolution& sol, const EventFunction& g, double t_lo, double t_hi);

}  // namespace pdmp::ode
