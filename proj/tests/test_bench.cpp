#include <cmath>
#include <numeric>

#include "doctest.h"
#include "pdmp/bench.hpp"
#include "pdmp/error.hpp"
#include "pdmp/examples.hpp"

using namespace pdmp;
using namespace pdmp::bench;

namespace {

BenchResult fake(Method m, double seconds, bool ok = true) {
  BenchResult r;
  r.method = m;
  r.seconds = seconds;
  if (!ok) r.error = "RateFloorHit";
  return r;
}

}  // namespace

TEST_CASE("argument checks") {
  const auto model = examples::example3_model();
  const auto bound = RateBound::constant(1.1);
  CHECK_THROWS_WITH_AS(run_bench(model, {Method::chv}, 0, 5, 1, ode::SolverConfig{}, bound),
                       doctest::Contains("InvalidJumpCount"), Error);
  CHECK_THROWS_AS(run_bench(model, {Method::chv}, 1, 0, 1, ode::SolverConfig{}, bound), Error);
  CHECK_THROWS_AS(run_bench(model, {}, 1, 5, 1, ode::SolverConfig{}, bound), Error);
  CHECK_THROWS_AS(run_bench(model, {Method::fjm}, 1, 5, 1, ode::SolverConfig{}, std::nullopt),
                  Error);
}

TEST_CASE("one result per (realization, method), jumps counted") {
  const auto results = run_bench(examples::example3_model(), {Method::chv, Method::fjm}, 3, 10, 7,
                                 ode::SolverConfig{}, RateBound::constant(1.1));
  REQUIRE(results.size() == 20);
  for (const auto& r : results) {
    CHECK(r.ok());
    CHECK(r.jumps == 3);
    CHECK(r.jump_times.size() == 3);
    CHECK(r.seconds > 0.0);
    CHECK(r.seed == 7);
    if (r.method == Method::chv) CHECK(r.fictitious == 0);
  }
  const std::size_t fict = std::accumulate(results.begin(), results.end(), std::size_t{0},
                                           [](std::size_t a, const BenchResult& r) {
                                             return a + (r.method == Method::fjm ? r.fictitious : 0);
                                           });
  CHECK(fict > 0);
}

TEST_CASE("results do not depend on the thread count") {
  const auto model = examples::example3_model();
  BenchOptions serial;
  serial.warm_up = false;
  BenchOptions parallel = serial;
  parallel.threads = 4;
  const auto a = run_bench(model, {Method::chv, Method::fjm}, 2, 16, 3, ode::SolverConfig{},
                           RateBound::constant(1.1), serial);
  const auto b = run_bench(model, {Method::chv, Method::fjm}, 2, 16, 3, ode::SolverConfig{},
                           RateBound::constant(1.1), parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].method == b[i].method);
    CHECK(a[i].realization == b[i].realization);
    CHECK(a[i].jump_times == b[i].jump_times);
    CHECK(a[i].final_continuous == b[i].final_continuous);
  }
}

TEST_CASE("sink sees every result") {
  std::size_t seen = 0;
  BenchOptions opts;
  opts.threads = 3;
  opts.sink = [&](const BenchResult&) { ++seen; };
  run_bench(examples::poisson_model(), {Method::chv, Method::tjm_event}, 2, 9, 1,
            ode::SolverConfig{}, std::nullopt, opts);
  CHECK(seen == 18);
}

TEST_CASE("engine errors are recorded per realization") {
  // Example 1 overruns a bound of 1 right away.
  const auto results = run_bench(examples::example1_model(), {Method::fjm}, 5, 3, 0,
                                 ode::SolverConfig{}, RateBound::constant(1.0));
  for (const auto& r : results) {
    CHECK_FALSE(r.ok());
    CHECK(r.error == "BoundViolated");
  }
}

TEST_CASE("histogram binning") {
  std::vector<BenchResult> rs{fake(Method::chv, 1.0), fake(Method::chv, 2.0),
                              fake(Method::fjm, 3.0), fake(Method::fjm, 5.0),
                              fake(Method::fjm, 100.0, false)};
  const auto h = histogram(rs, 4);
  CHECK(h.lo == 1.0);
  CHECK(h.hi == 5.0);
  CHECK(h.bin_lo(1) == 2.0);
  CHECK(h.bin_hi(3) == 5.0);
  CHECK(h.for_method(Method::chv) == std::vector<std::size_t>{1, 1, 0, 0});
  CHECK(h.for_method(Method::fjm) == std::vector<std::size_t>{0, 0, 1, 1});
  CHECK_THROWS_AS(h.for_method(Method::tjm_event), Error);
}

TEST_CASE("histogram edge cases") {
  CHECK_THROWS_AS(histogram({fake(Method::chv, 1.0)}, 1), Error);
  CHECK_THROWS_WITH_AS(histogram({}, 10), doctest::Contains("EmptyResults"), Error);
  CHECK_THROWS_AS(histogram({fake(Method::chv, 1.0, false)}, 10), Error);
  const auto same = histogram({fake(Method::chv, 2.0), fake(Method::chv, 2.0)}, 5);
  CHECK(same.for_method(Method::chv)[0] == 2);
}

TEST_CASE("median of successful results") {
  std::vector<BenchResult> rs{fake(Method::chv, 3.0), fake(Method::chv, 1.0),
                              fake(Method::chv, 2.0), fake(Method::chv, 50.0, false),
                              fake(Method::fjm, 1.0), fake(Method::fjm, 4.0)};
  CHECK(median_seconds(rs, Method::chv) == 2.0);
  CHECK(median_seconds(rs, Method::fjm) == 2.5);
  CHECK_THROWS_AS(median_seconds(rs, Method::tjm_event), Error);
}
