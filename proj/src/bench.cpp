#include "pdmp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include "pdmp/chv.hpp"
#include "pdmp/error.hpp"
#include "pdmp/tjm_event.hpp"

namespace pdmp::bench {

namespace {

constexpr std::uint64_t kWarmUpRealization = std::numeric_limits<std::uint64_t>::max();

BenchResult run_one(const PdmpModel& model, Method method, std::size_t n_jumps,
                    std::uint64_t realization, std::uint64_t base_seed,
                    const ode::SolverConfig& config, const std::optional<RateBound>& bound,
                    double t_end) {
  BenchResult r;
  r.method = method;
  r.realization = realization;
  r.seed = base_seed;
  ExpStream stream(base_seed, realization);
  Trajectory traj;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (method) {
      case Method::chv: {
        ChvOptions opts;
        opts.max_jumps = n_jumps;
        traj = chv_simulate(model, t_end, stream, config, opts);
        break;
      }
      case Method::fjm: {
        FjmOptions opts;
        opts.max_jumps = n_jumps;
        traj = fjm_simulate(model, *bound, t_end, stream, config, opts);
        break;
      }
      case Method::tjm_event: {
        TjmOptions opts;
        opts.max_jumps = n_jumps;
        traj = tjm_event_simulate(model, t_end, stream, config, opts);
        break;
      }
    }
  } catch (const Error& e) {
    r.error = std::string(e.name());
  }
  const auto stop = std::chrono::steady_clock::now();
  r.seconds = std::chrono::duration<double>(stop - start).count();
  if (r.ok()) {
    for (const JumpRecord* j : traj.true_jumps()) r.jump_times.push_back(j->time);
    r.jumps = r.jump_times.size();
    r.fictitious = traj.count(RecordKind::fictitious);
    if (!traj.records.empty()) r.final_continuous = traj.records.back().after.continuous;
  }
  return r;
}

}  // namespace

std::vector<BenchResult> run_bench(const PdmpModel& model, const std::vector<Method>& methods,
                                   std::size_t n_jumps, std::size_t realizations,
                                   std::uint64_t base_seed, const ode::SolverConfig& config,
                                   const std::optional<RateBound>& bound,
                                   const BenchOptions& options) {
  if (n_jumps == 0) throw Error(ErrorCode::InvalidJumpCount, "n_jumps must be at least 1");
  if (realizations == 0) throw Error(ErrorCode::InvalidArgument, "realizations must be >= 1");
  if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "no methods selected");
  if (!bound && std::find(methods.begin(), methods.end(), Method::fjm) != methods.end()) {
    throw Error(ErrorCode::InvalidArgument, "the rejection method needs a rate bound");
  }

  if (options.warm_up) {
    for (Method m : methods) {
      run_one(model, m, n_jumps, kWarmUpRealization, base_seed, config, bound, options.t_end);
    }
  }

  std::vector<BenchResult> results(realizations * methods.size());
  std::atomic<std::size_t> next{0};
  std::mutex sink_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < realizations; k = next++) {
      for (std::size_t m = 0; m < methods.size(); ++m) {
        BenchResult r =
            run_one(model, methods[m], n_jumps, k, base_seed, config, bound, options.t_end);
        if (options.sink) {
          std::lock_guard lock(sink_mutex);
          options.sink(r);
        }
        results[k * methods.size() + m] = std::move(r);
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, realizations);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return results;
}

double Histogram::bin_lo(std::size_t b) const {
  return lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
}

double Histogram::bin_hi(std::size_t b) const {
  return b + 1 == bins ? hi : bin_lo(b + 1);
}

const std::vector<std::size_t>& Histogram::for_method(Method m) const {
  const auto it = std::find(methods.begin(), methods.end(), m);
  if (it == methods.end()) {
    throw Error(ErrorCode::InvalidArgument, "method not present in histogram");
  }
  return counts[static_cast<std::size_t>(it - methods.begin())];
}

Histogram histogram(const std::vector<BenchResult>& results, std::size_t bins) {
  if (bins < 2) throw Error(ErrorCode::InvalidArgument, "histogram needs at least 2 bins");
  Histogram h;
  h.bins = bins;
  h.lo = std::numeric_limits<double>::infinity();
  h.hi = -h.lo;
  for (const auto& r : results) {
    if (!r.ok()) continue;
    h.lo = std::min(h.lo, r.seconds);
    h.hi = std::max(h.hi, r.seconds);
    if (std::find(h.methods.begin(), h.methods.end(), r.method) == h.methods.end()) {
      h.methods.push_back(r.method);
    }
  }
  if (h.methods.empty()) throw Error(ErrorCode::EmptyResults, "no successful results to bin");

  h.counts.assign(h.methods.size(), std::vector<std::size_t>(bins, 0));
  const double width = h.hi - h.lo;
  for (const auto& r : results) {
    if (!r.ok()) continue;
    std::size_t b = 0;
    if (width > 0.0) {
      b = static_cast<std::size_t>((r.seconds - h.lo) / width * static_cast<double>(bins));
      b = std::min(b, bins - 1);
    }
    const auto m = static_cast<std::size_t>(
        std::find(h.methods.begin(), h.methods.end(), r.method) - h.methods.begin());
    ++h.counts[m][b];
  }
  return h;
}

double median_seconds(const std::vector<BenchResult>& results, Method method) {
  std::vector<double> times;
  for (const auto& r : results) {
    if (r.ok() && r.method == method) times.push_back(r.seconds);
  }
  if (times.empty()) throw Error(ErrorCode::EmptyResults, "no results for method");
  const auto mid = times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2);
  std::nth_element(times.begin(), mid, times.end());
  if (times.size() % 2 == 1) return *mid;
  const double upper = *mid;
  return 0.5 * (upper + *std::max_element(times.begin(), mid));
}

}  // namespace pdmp::bench
