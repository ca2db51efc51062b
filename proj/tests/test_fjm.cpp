#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "pdmp/chv.hpp"
#include "pdmp/error.hpp"
#include "pdmp/examples.hpp"
#include "pdmp/fjm.hpp"
#include "support/stats.hpp"

using namespace pdmp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PdmpModel constant_rate(double r) {
  auto m = examples::poisson_model(r);
  m.name = "const";
  return m;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected pdmp::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("rate bounds reject non-positive values") {
  CHECK_THROWS_AS(RateBound::constant(0.0), Error);
  CHECK_THROWS_AS(RateBound::constant(-1.0), Error);
  CHECK_THROWS_AS(RateBound::constant(kInf), Error);
  const auto b = RateBound::per_segment([](const HybridState& s, double) { return s.continuous[0]; });
  CHECK(b.kind() == RateBound::Kind::per_segment);
  CHECK(b.at({{2.5}, {0}}, 0.0) == 2.5);
  CHECK_THROWS_AS(b.at({{-1.0}, {0}}, 0.0), Error);
}

TEST_CASE("R = 0.5 under lambda = 1: inter-jump mean 2") {
  const auto model = constant_rate(0.5);
  ExpStream stream(9);
  FjmOptions opts;
  opts.max_jumps = 5000;
  const auto traj = fjm_simulate(model, RateBound::constant(1.0), kInf, stream,
                                 ode::SolverConfig{}, opts);
  const auto jumps = traj.true_jumps();
  REQUIRE(jumps.size() == 5000);
  std::vector<double> gaps;
  double prev = 0.0;
  for (const auto* j : jumps) {
    gaps.push_back(j->time - prev);
    prev = j->time;
  }
  CHECK(std::abs(testing::mean(gaps) - 2.0) <= 3.0 * 2.0 / std::sqrt(5000.0));
  CHECK(testing::ks_one_sample(gaps, [](double x) { return 1.0 - std::exp(-0.5 * x); }) <
        testing::ks_one_sample_critical_01(gaps.size()));
  // About half of all candidates are fictitious.
  const double frac = static_cast<double>(count_fictitious(traj)) /
                      static_cast<double>(traj.records.size());
  CHECK(frac == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("tight bound equal to the rate never produces fictitious events") {
  ExpStream stream(2);
  FjmOptions opts;
  opts.max_jumps = 200;
  const auto traj = fjm_simulate(constant_rate(2.0), RateBound::constant(2.0), kInf, stream,
                                 ode::SolverConfig{}, opts);
  CHECK(count_fictitious(traj) == 0);
  CHECK(traj.true_jumps().size() == 200);
}

TEST_CASE("candidate times follow S / lambda") {
  ExpStream stream(13), replay(13);
  FjmOptions opts;
  opts.max_events = 30;
  const auto traj = fjm_simulate(constant_rate(0.3), RateBound::constant(3.0), kInf, stream,
                                 ode::SolverConfig{}, opts);
  REQUIRE(traj.records.size() == 30);
  double t = 0.0;
  for (const auto& r : traj.records) {
    const double s = replay.exp_draw();
    t += s / 3.0;
    CHECK(r.time == doctest::Approx(t).epsilon(1e-14));
    CHECK(r.draw == s);
  }
}

TEST_CASE("bound violation is reported") {
  // Example 1 grows x_c (= R_tot) past 1 almost immediately on the even branch.
  ExpStream stream(0);
  CHECK(code_of([&] {
          fjm_simulate(examples::example1_model(), RateBound::constant(1.0), 10.0, stream,
                       ode::SolverConfig{});
        }) == ErrorCode::BoundViolated);
}

TEST_CASE("horizon_end closes a bounded run on the flow") {
  ExpStream stream(21);
  const ode::SolverConfig cfg;
  const auto traj =
      fjm_simulate(examples::example3_model(), RateBound::constant(1.1), 2.0, stream, cfg);
  REQUIRE(traj.reached_horizon());
  CHECK(traj.records.back().time == 2.0);
  // Reconstruct the final state from the last true jump.
  double t0 = 0.0, x0 = 0.05;
  std::int64_t xd = 0;
  for (const auto& r : traj.records) {
    if (r.kind == RecordKind::true_jump) {
      t0 = r.time;
      x0 = r.before.continuous[0];
      xd = r.after.discrete[0];
    }
  }
  const double k = xd % 2 == 0 ? 3.0 : -4.0;
  const double exact = x0 * std::exp(k * (2.0 - t0));
  CHECK(std::abs(traj.records.back().after.continuous[0] - exact) <=
        100 * cfg.atol * std::max(1.0, exact));
}

TEST_CASE("fictitious events do not change the state") {
  ExpStream stream(3);
  FjmOptions opts;
  opts.max_jumps = 20;
  const auto traj = fjm_simulate(examples::example3_model(), RateBound::constant(1.1), kInf,
                                 stream, ode::SolverConfig{}, opts);
  CHECK(count_fictitious(traj) > 0);
  for (const auto& r : traj.records) {
    if (r.kind == RecordKind::fictitious) CHECK(r.before == r.after);
  }
}

TEST_CASE("per-segment bound is evaluated at each event") {
  // Odd branch of example 3 decays, so the rate at the event bounds the future rate.
  auto model = examples::example3_model();
  model.initial_discrete = {1};
  model.initial_continuous = {5.0};
  int calls = 0;
  const auto bound = RateBound::per_segment([&](const HybridState& s, double) {
    ++calls;
    return s.discrete[0] % 2 == 1 ? examples::example3_rate(s.continuous[0]) : 1.1;
  });
  ExpStream stream(17);
  FjmOptions opts;
  opts.max_jumps = 5;
  const auto traj = fjm_simulate(model, bound, kInf, stream, ode::SolverConfig{}, opts);
  CHECK(calls == static_cast<int>(traj.records.size()));
}

TEST_CASE("first jump law agrees with CHV on example 3") {
  const auto model = examples::example3_model();
  const auto bound = RateBound::constant(1.1);
  std::vector<double> fjm, chv;
  for (std::uint64_t k = 0; k < 2000; ++k) {
    ExpStream a(41, k), b(42, k);
    FjmOptions fo;
    fo.max_jumps = 1;
    ChvOptions co;
    co.max_jumps = 1;
    fjm.push_back(fjm_simulate(model, bound, kInf, a, ode::SolverConfig{}, fo).true_jumps()[0]->time);
    chv.push_back(chv_simulate(model, kInf, b, ode::SolverConfig{}, co).true_jumps()[0]->time);
  }
  CHECK(testing::ks_two_sample(fjm, chv) <
        testing::ks_two_sample_critical_01(fjm.size(), chv.size()));
}

TEST_CASE("same seed gives identical FJM trajectories") {
  ExpStream a(5, 2), b(5, 2);
  FjmOptions opts;
  opts.max_jumps = 10;
  const auto ta = fjm_simulate(examples::example3_model(), RateBound::constant(1.1), kInf, a,
                               ode::SolverConfig{}, opts);
  const auto tb = fjm_simulate(examples::example3_model(), RateBound::constant(1.1), kInf, b,
                               ode::SolverConfig{}, opts);
  REQUIRE(ta.records.size() == tb.records.size());
  for (std::size_t i = 0; i < ta.records.size(); ++i) {
    CHECK(ta.records[i].time == tb.records[i].time);
    CHECK(ta.records[i].kind == tb.records[i].kind);
  }
}
