#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "pdmp/chv.hpp"
#include "pdmp/error.hpp"
#include "pdmp/examples.hpp"
#include "support/quadrature.hpp"
#include "support/stats.hpp"

using namespace pdmp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PdmpModel rate_only(std::function<double(double)> rate_of_t, bool time_dependent) {
  PdmpModel m = examples::poisson_model();
  m.name = "rate_of_t";
  m.time_dependent = time_dependent;
  m.total_rate = [rate_of_t](std::span<const double>, std::span<const std::int64_t>, double t) {
    return rate_of_t(t);
  };
  return m;
}

void check_trajectory_invariants(const Trajectory& traj) {
  double last = -kInf;
  for (const auto& r : traj.records) {
    CHECK(r.time <= traj.t_end);
    if (r.kind == RecordKind::true_jump) {
      CHECK(r.time > last);
      last = r.time;
    }
    if (r.kind != RecordKind::true_jump) CHECK(r.before == r.after);
  }
  for (std::size_t i = 0; i + 1 < traj.records.size(); ++i) {
    CHECK(traj.records[i].kind != RecordKind::horizon_end);
  }
}

}  // namespace

TEST_CASE("example 1 segment matches the closed form") {
  const auto model = examples::example1_model();
  ChvOptions opts;
  opts.t_horizon = 10.0;
  const ode::SolverConfig cfg = ode::SolverConfig::with_tolerance(1e-12);
  const auto seg = chv_segment(model, {{1.0}, 0.0, {0}}, 0.5, cfg, opts);
  CHECK(seg.outcome == SegmentOutcome::jump_reached);
  // (1/100) log(1 + 100 * 0.5 / 1)
  CHECK(seg.end.tau == doctest::Approx(0.039318256327243256).epsilon(1e-10));
  CHECK(seg.end.y[0] == doctest::Approx(51.0).epsilon(1e-10));
}

TEST_CASE("zero flow with unit rate: tau advances by S") {
  const auto model = examples::poisson_model(1.0);
  const auto seg = chv_segment(model, {{0.0}, 0.0, {0}}, 2.3, ode::SolverConfig{}, ChvOptions{});
  CHECK(seg.end.tau == doctest::Approx(2.3).epsilon(1e-12));
  CHECK(seg.end.y[0] == 0.0);
}

TEST_CASE("example 2 odd-branch segment matches the closed form") {
  const auto model = examples::example2_model();
  const auto seg = chv_segment(model, {{2.0}, 0.0, {1}}, 1.0,
                               ode::SolverConfig::with_tolerance(1e-12), ChvOptions{});
  CHECK(seg.end.y[0] == doctest::Approx(0.09957413673572789).epsilon(1e-10));   // 2 e^-3
  CHECK(seg.end.tau == doctest::Approx(3.180922820531278).epsilon(1e-10));      // (e^3-1)/6
}

TEST_CASE("segment stops at the horizon crossing") {
  const auto model = examples::example3_model();
  ChvOptions opts;
  opts.t_horizon = 0.2;
  // Large S: the jump would come long after t = 0.2.
  const auto seg = chv_segment(model, {{0.05}, 0.0, {0}}, 5.0, ode::SolverConfig{}, opts);
  CHECK(seg.outcome == SegmentOutcome::horizon_reached);
  CHECK(seg.end.tau == 0.2);
  CHECK(seg.end.y[0] == doctest::Approx(0.05 * std::exp(0.6)).epsilon(1e-8));
}

TEST_CASE("tau increases at every accepted step") {
  const auto model = examples::example3_model();
  const auto seg = chv_segment(model, {{4.0}, 1.0, {1}}, 3.0, ode::SolverConfig{}, ChvOptions{});
  double prev = -kInf;
  for (const auto& s : seg.dense.segments()) {
    const double tau = seg.dense.component(s.t_right, 1);
    CHECK(tau > prev);
    prev = tau;
  }
}

TEST_CASE("collapsing rate raises RateFloorHit from a segment") {
  // Odd branch of example 1 with S beyond x_c / 100: the rate reaches zero.
  const auto model = examples::example1_model();
  ChvOptions opts;
  opts.t_horizon = 10.0;
  CHECK_THROWS_WITH_AS(chv_segment(model, {{1.0}, 0.0, {1}}, 0.5, ode::SolverConfig{}, opts),
                       doctest::Contains("RateFloorHit"), Error);

  auto zero = examples::poisson_model(0.0);
  CHECK_THROWS_AS(chv_segment(zero, {{0.0}, 0.0, {0}}, 1.0, ode::SolverConfig{}, ChvOptions{}),
                  Error);
}

TEST_CASE("infinite next jump time flows to the horizon") {
  auto model = examples::example1_model();
  model.initial_discrete = {1};  // odd branch, a = -100
  ExpStream stream(3);
  REQUIRE(stream.exp_at(0) > 0.01);  // 1 - 100 S / 1 < 0
  const auto cfg = ode::SolverConfig::with_tolerance(1e-12);
  const auto traj = chv_simulate(model, 0.25, stream, cfg);
  REQUIRE(traj.records.size() == 1);
  CHECK(traj.reached_horizon());
  CHECK(traj.records[0].time == 0.25);
  CHECK(std::abs(traj.records[0].after.continuous[0] - std::exp(-25.0)) <= 100 * cfg.atol);

  ExpStream again(3);
  CHECK_THROWS_AS(chv_simulate(model, kInf, again, cfg), Error);
}

TEST_CASE("constant rate 2: inter-jump times have mean 1/2") {
  auto model = examples::poisson_model(2.0);
  ExpStream stream(77);
  ChvOptions opts;
  opts.max_jumps = 1000;
  const auto traj = chv_simulate(model, kInf, stream, ode::SolverConfig{}, opts);
  const auto jumps = traj.true_jumps();
  REQUIRE(jumps.size() == 1000);
  std::vector<double> gaps;
  double prev = 0.0;
  for (const auto* j : jumps) {
    gaps.push_back(j->time - prev);
    prev = j->time;
  }
  const double tol = 0.5 * 3.0 / std::sqrt(1000.0);
  CHECK(std::abs(testing::mean(gaps) - 0.5) <= tol);
  CHECK(jumps.back()->after.discrete[0] == 1000);
  check_trajectory_invariants(traj);
}

TEST_CASE("example 2 always has finite jump times") {
  ExpStream stream(20);
  ChvOptions opts;
  opts.max_jumps = 20;
  const auto traj = chv_simulate(examples::example2_model(), kInf, stream,
                                 ode::SolverConfig::with_tolerance(1e-12), opts);
  CHECK(traj.count(RecordKind::true_jump) == 20);
  CHECK_FALSE(traj.reached_horizon());
  check_trajectory_invariants(traj);
}

TEST_CASE("trajectory ends with horizon_end when t_end comes first") {
  ExpStream stream(8);
  const auto traj = chv_simulate(examples::example3_model(), 6.0, stream, ode::SolverConfig{});
  CHECK(traj.reached_horizon());
  CHECK(traj.records.back().time == 6.0);
  check_trajectory_invariants(traj);
}

TEST_CASE("time-dependent rate: piecewise constant") {
  const auto model = rate_only([](double t) { return t < 1.0 ? 1.0 : 2.0; }, true);
  const auto seg = chv_segment(model, {{0.0}, 0.0, {0}}, 1.5, ode::SolverConfig{}, ChvOptions{});
  // 1 * 1 + 2 * (T - 1) = 1.5
  CHECK(seg.end.tau == doctest::Approx(1.25).epsilon(1e-8));
}

TEST_CASE("time-dependent rate: linear 1 + t") {
  const auto model = rate_only([](double t) { return 1.0 + t; }, true);
  for (double s : {0.1, 0.8, 2.5}) {
    const auto seg = chv_segment(model, {{0.0}, 0.0, {0}}, s, ode::SolverConfig{}, ChvOptions{});
    CHECK(seg.end.tau == doctest::Approx(std::sqrt(1.0 + 2.0 * s) - 1.0).epsilon(1e-9));
  }
  // Through the full simulation entry point, first jump only.
  ExpStream stream(4);
  const double s1 = stream.exp_at(0);
  ChvOptions opts;
  opts.max_jumps = 1;
  const auto traj = chv_simulate_timedep(model, kInf, stream, ode::SolverConfig{}, opts);
  CHECK(traj.records.at(0).time == doctest::Approx(std::sqrt(1.0 + 2.0 * s1) - 1.0).epsilon(1e-9));
}

TEST_CASE("time-dependent rate is routed through tau by chv_simulate") {
  const auto model = rate_only([](double t) { return 1.0 + t; }, true);
  ExpStream a(6), b(6);
  ChvOptions opts;
  opts.max_jumps = 5;
  const auto ta = chv_simulate(model, kInf, a, ode::SolverConfig{}, opts);
  const auto tb = chv_simulate_timedep(model, kInf, b, ode::SolverConfig{}, opts);
  REQUIRE(ta.records.size() == tb.records.size());
  for (std::size_t i = 0; i < ta.records.size(); ++i) CHECK(ta.records[i].time == tb.records[i].time);
}

TEST_CASE("autonomous model gives the same trajectory through the time-dependent path") {
  const auto model = examples::example3_model();
  ExpStream a(31), b(31);
  ChvOptions opts;
  opts.max_jumps = 10;
  const auto ta = chv_simulate(model, kInf, a, ode::SolverConfig{}, opts);
  const auto tb = chv_simulate_timedep(model, kInf, b, ode::SolverConfig{}, opts);
  REQUIRE(ta.records.size() == tb.records.size());
  for (std::size_t i = 0; i < ta.records.size(); ++i) {
    CHECK(ta.records[i].time == tb.records[i].time);
    CHECK(ta.records[i].after == tb.records[i].after);
  }
}

TEST_CASE("time-change identity on example 3 segments") {
  const auto model = examples::example3_model();
  const ode::SolverConfig cfg;
  ExpStream stream(555);
  for (int i = 0; i < 20; ++i) {
    const double xc = 0.02 + 8.0 * stream.uniform();
    const std::int64_t xd = stream.uniform() < 0.5 ? 0 : 1;
    const double t0 = 3.0 * stream.uniform();
    const double s = stream.exp_draw();
    const auto seg = chv_segment(model, {{xc}, t0, {xd}}, s, cfg, ChvOptions{});
    const double k = xd == 0 ? 3.0 : -4.0;
    const double mass = testing::integrate_gk(
        [&](double t) { return examples::example3_rate(xc * std::exp(k * (t - t0))); }, t0,
        seg.end.tau);
    CHECK(std::abs(mass - s) <= 100.0 * std::max(cfg.atol, cfg.rtol * s));
  }
}

TEST_CASE("phantom samples leave the state on the flow") {
  const auto model = examples::example3_model();
  const ode::SolverConfig cfg;
  ExpStream stream(12);
  ChvOptions opts;
  opts.sample_rate = 5.0;
  opts.max_jumps = 6;
  const auto traj = chv_simulate(model, kInf, stream, cfg, opts);
  REQUIRE(traj.count(RecordKind::phantom_sample) > 10);
  check_trajectory_invariants(traj);

  double t_ref = 0.0;
  double x_ref = 0.05;
  std::int64_t xd = 0;
  for (const auto& r : traj.records) {
    const double k = xd % 2 == 0 ? 3.0 : -4.0;
    const double exact = x_ref * std::exp(k * (r.time - t_ref));
    CHECK(std::abs(r.before.continuous[0] - exact) <= 100 * cfg.atol * std::max(1.0, exact));
    if (r.kind == RecordKind::true_jump) {
      t_ref = r.time;
      x_ref = r.before.continuous[0];
      xd = r.after.discrete[0];
    }
  }
}

TEST_CASE("phantom sampling does not change the law of the first true jump") {
  const auto model = examples::example3_model();
  std::vector<double> plain, sampled;
  ChvOptions opts;
  opts.max_jumps = 1;
  ChvOptions with = opts;
  with.sample_rate = 2.0;
  for (std::uint64_t k = 0; k < 2000; ++k) {
    ExpStream a(100, k), b(200, k);
    plain.push_back(chv_simulate(model, kInf, a, ode::SolverConfig{}, opts).true_jumps()[0]->time);
    sampled.push_back(chv_simulate(model, kInf, b, ode::SolverConfig{}, with).true_jumps()[0]->time);
  }
  CHECK(testing::ks_two_sample(plain, sampled) <
        testing::ks_two_sample_critical_01(plain.size(), sampled.size()));
}

TEST_CASE("invalid arguments") {
  const auto model = examples::example3_model();
  ExpStream stream(1);
  CHECK_THROWS_AS(chv_simulate(model, 0.0, stream, ode::SolverConfig{}), Error);
  ChvOptions bad;
  bad.sample_rate = -1.0;
  CHECK_THROWS_AS(chv_simulate(model, 1.0, stream, ode::SolverConfig{}, bad), Error);
  CHECK_THROWS_AS(chv_segment(model, {{0.05}, 0.0, {0}}, 0.0, ode::SolverConfig{}, ChvOptions{}),
                  Error);
}
