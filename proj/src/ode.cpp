#include "pdmp/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "pdmp/error.hpp"

namespace pdmp::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
constexpr double a21 = 0.2;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension (Hairer & Wanner, order 4).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;  // h_new / h lower clamp
constexpr double kMaxFactor = 5.0;  // h_new / h upper clamp
constexpr double kBeta = 0.04;      // PI memory term
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kNonFiniteShrink = 0.25;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double initial_step(const OdeProblem& p, const SolverConfig& cfg, std::span<const double> f0,
                    double h_cap) {
  const std::size_t n = p.dimension;
  double dnf = 0.0, dny = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = cfg.atol + cfg.rtol * std::abs(p.initial_state[i]);
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (p.initial_state[i] / sk) * (p.initial_state[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, h_cap);

  Vec y1(n), f1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = p.initial_state[i] + h * f0[i];
  p.rhs(y1, p.t_start + h, f1);
  double der2 = 0.0;
  if (all_finite(f1)) {
    for (std::size_t i = 0; i < n; ++i) {
      const double sk = cfg.atol + cfg.rtol * std::abs(p.initial_state[i]);
      der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
    }
    der2 = std::sqrt(der2) / h;
  } else {
    return std::min(h, h_cap) * 1e-3;
  }
  const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
  return std::min({100.0 * h, h1, h_cap});
}

}  // namespace

DenseSolution::DenseSolution(std::size_t dimension, double t_start, Vec initial_state)
    : dim_(dimension),
      t_start_(t_start),
      t_reached_(t_start),
      initial_(std::move(initial_state)),
      endpoint_(initial_) {}

void DenseSolution::append_step(double t_left, double t_right, std::span<const double> coeffs,
                                std::span<const double> y_right) {
  segments_.push_back({t_left, t_right, coeffs_.size()});
  coeffs_.insert(coeffs_.end(), coeffs.begin(), coeffs.end());
  endpoint_.assign(y_right.begin(), y_right.end());
  t_reached_ = t_right;
}

std::size_t DenseSolution::locate(double t) const {
  if (!(t >= t_start_ && t <= t_reached_)) {
    throw Error(ErrorCode::OutOfSpan, "t=" + std::to_string(t) + " outside [" +
                                          std::to_string(t_start_) + ", " +
                                          std::to_string(t_reached_) + "]");
  }
  auto it = std::lower_bound(segments_.begin(), segments_.end(), t,
                             [](const Segment& s, double v) { return s.t_right < v; });
  return static_cast<std::size_t>(it - segments_.begin());
}

void DenseSolution::evaluate(double t, std::span<double> out) const {
  const std::size_t k = locate(t);
  if (segments_.empty() || t == t_start_) {
    std::copy(initial_.begin(), initial_.end(), out.begin());
    return;
  }
  const Segment& seg = segments_[k];
  if (t == seg.t_right) {
    // Exact stored state at the step boundary.
    if (k + 1 < segments_.size()) {
      const double* c = coeffs_.data() + segments_[k + 1].offset;
      std::copy(c, c + dim_, out.begin());
    } else {
      std::copy(endpoint_.begin(), endpoint_.end(), out.begin());
    }
    return;
  }
  const double theta = (t - seg.t_left) / (seg.t_right - seg.t_left);
  const double theta1 = 1.0 - theta;
  const double* c = coeffs_.data() + seg.offset;
  for (std::size_t i = 0; i < dim_; ++i) {
    out[i] = c[i] + theta * (c[dim_ + i] +
                             theta1 * (c[2 * dim_ + i] +
                                       theta * (c[3 * dim_ + i] + theta1 * c[4 * dim_ + i])));
  }
}

Vec DenseSolution::operator()(double t) const {
  Vec out(dim_);
  evaluate(t, out);
  return out;
}

double DenseSolution::component(double t, std::size_t i) const {
  Vec out(dim_);
  evaluate(t, out);
  return out[i];
}

DenseSolution integrate(const OdeProblem& p, const SolverConfig& cfg,
                        const StepObserver& observer) {
  const std::size_t n = p.dimension;
  if (n == 0 || p.initial_state.size() != n || !p.rhs) {
    throw Error(ErrorCode::InvalidArgument, "ill-formed ODE problem");
  }
  if (!(p.t_end > p.t_start)) {
    throw Error(ErrorCode::InvalidArgument, "t_end must exceed t_start");
  }
  if (!(cfg.atol > 0.0 && cfg.rtol > 0.0 && cfg.h_max > 0.0 && cfg.h_min >= 0.0 &&
        cfg.h_min <= cfg.h_max && cfg.max_steps > 0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid solver configuration");
  }

  DenseSolution sol(n, p.t_start, p.initial_state);

  Vec y = p.initial_state;
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ystage(n), ynew(n), coeffs(5 * n);

  p.rhs(y, p.t_start, k1);
  if (!all_finite(k1)) {
    throw Error(ErrorCode::NonFiniteDerivative, "at t=" + std::to_string(p.t_start));
  }

  const double span = p.t_end - p.t_start;
  const double h_cap = std::min(cfg.h_max, span);
  double h = cfg.h_init > 0.0 ? std::min(cfg.h_init, h_cap) : initial_step(p, cfg, k1, h_cap);
  double t = p.t_start;
  double facold = 1e-4;
  bool last_rejected = false;
  bool last_nonfinite = false;
  std::size_t attempts = 0;

  while (t < p.t_end) {
    if (attempts++ >= cfg.max_steps) {
      throw Error(ErrorCode::MaxStepsExceeded,
                  std::to_string(cfg.max_steps) + " steps, stopped at t=" + std::to_string(t));
    }
    if (h < cfg.h_min || t + 0.1 * h == t) {
      const auto code = last_nonfinite ? ErrorCode::NonFiniteDerivative : ErrorCode::StepUnderflow;
      throw Error(code, "h=" + std::to_string(h) + " at t=" + std::to_string(t));
    }
    bool last = false;
    if (t + 1.01 * h >= p.t_end) {
      h = p.t_end - t;
      last = true;
    }

    for (std::size_t i = 0; i < n; ++i) ystage[i] = y[i] + h * a21 * k1[i];
    p.rhs(ystage, t + c2 * h, k2);
    for (std::size_t i = 0; i < n; ++i) ystage[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    p.rhs(ystage, t + c3 * h, k3);
    for (std::size_t i = 0; i < n; ++i)
      ystage[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    p.rhs(ystage, t + c4 * h, k4);
    for (std::size_t i = 0; i < n; ++i)
      ystage[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    p.rhs(ystage, t + c5 * h, k5);
    for (std::size_t i = 0; i < n; ++i)
      ystage[i] =
          y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const double t_new = last ? p.t_end : t + h;
    p.rhs(ystage, t_new, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    p.rhs(ynew, t_new, k7);

    if (!all_finite(k2) || !all_finite(k3) || !all_finite(k4) || !all_finite(k5) ||
        !all_finite(k6) || !all_finite(k7) || !all_finite(ynew)) {
      h *= kNonFiniteShrink;
      last_rejected = true;
      last_nonfinite = true;
      ++sol.rejected_;
      continue;
    }
    last_nonfinite = false;

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                             e7 * k7[i]);
      const double sk = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (ei / sk) * (ei / sk);
    }
    err = std::sqrt(err / static_cast<double>(n));

    const double fac11 = std::pow(err, kExpo);
    if (err <= 1.0) {
      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::clamp(fac / kSafety, 1.0 / kMaxFactor, 1.0 / kMinFactor);
      double h_new = h / fac;
      facold = std::max(err, 1e-4);

      for (std::size_t i = 0; i < n; ++i) {
        const double ydiff = ynew[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        coeffs[i] = y[i];
        coeffs[n + i] = ydiff;
        coeffs[2 * n + i] = bspl;
        coeffs[3 * n + i] = ydiff - h * k7[i] - bspl;
        coeffs[4 * n + i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                 d6 * k6[i] + d7 * k7[i]);
      }
      sol.append_step(t, t_new, coeffs, ynew);
      t = t_new;
      y.swap(ynew);
      k1.swap(k7);

      if (observer && observer(t, y)) {
        sol.stopped_ = true;
        break;
      }
      if (last_rejected) h_new = std::min(h_new, h);
      last_rejected = false;
      h = std::min(h_new, cfg.h_max);
    } else {
      h /= std::min(1.0 / kMinFactor, fac11 / kSafety);
      last_rejected = true;
      ++sol.rejected_;
    }
  }
  return sol;
}

Vec interpolate(const DenseSolution& sol, double t) { return sol(t); }

double root_time_tolerance(double span) {
  return std::max(1e-14, 1e-12 * std::abs(span));
}

double find_root(const DenseSolution& sol, const EventFunction& g, double t_lo, double t_hi) {
  if (!(t_lo < t_hi) || t_lo < sol.t_start() || t_hi > sol.t_reached()) {
    throw Error(ErrorCode::BracketInvalid,
                "[" + std::to_string(t_lo) + ", " + std::to_string(t_hi) + "]");
  }
  Vec x(sol.dimension());
  auto eval = [&](double t) {
    sol.evaluate(t, x);
    return g(x, t);
  };

  double a = t_lo;
  double ga = eval(a);
  if (ga == 0.0) return a;

  auto refine = [&](double lo, double hi, double glo, double ghi) {
    const double tol = std::max(root_time_tolerance(hi - lo),
                                4.0 * std::numeric_limits<double>::epsilon() *
                                    std::max(std::abs(lo), std::abs(hi)));
    boost::uintmax_t max_iter = 200;
    auto [r_lo, r_hi] = boost::math::tools::toms748_solve(
        eval, lo, hi, glo, ghi, [tol](double u, double v) { return std::abs(v - u) <= tol; },
        max_iter);
    const double root = std::abs(eval(r_lo)) <= std::abs(eval(r_hi)) ? r_lo : r_hi;
    return std::clamp(root, lo, hi);
  };

  const auto& segs = sol.segments();
  auto it = std::upper_bound(segs.begin(), segs.end(), t_lo,
                             [](double v, const DenseSolution::Segment& s) { return v < s.t_right; });
  for (; it != segs.end(); ++it) {
    const double b = std::min(it->t_right, t_hi);
    const double gb = eval(b);
    if (gb == 0.0) return b;
    if (std::signbit(ga) != std::signbit(gb)) return refine(a, b, ga, gb);
    a = b;
    ga = gb;
    if (b >= t_hi) break;
  }
  throw Error(ErrorCode::NoSignChange,
              "over [" + std::to_string(t_lo) + ", " + std::to_string(t_hi) + "]");
}

}  // namespace pdmp::ode
