#pragma once

// Monte Carlo timing harness: per-realization wall time of each engine on a
// stream derived from (base_seed, realization).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pdmp/fjm.hpp"
#include "pdmp/model.hpp"
#include "pdmp/ode.hpp"

namespace pdmp::bench {

struct BenchResult {
  Method method = Method::chv;
  std::uint64_t realization = 0;
  double seconds = 0.0;
  std::size_t jumps = 0;
  std::size_t fictitious = 0;
  std::uint64_t seed = 0;
  std::vector<double> jump_times;
  Vec final_continuous;
  std::string error;  // engine error name; empty on success

  bool ok() const noexcept { return error.empty(); }
};

struct BenchOptions {
  std::size_t threads = 1;
  double t_end = std::numeric_limits<double>::infinity();
  bool warm_up = true;
  /// Receives each result as soon as it is produced (serialized).
  std::function<void(const BenchResult&)> sink;
};

std::vector<BenchResult> run_bench(const PdmpModel& model, const std::vector<Method>& methods,
                                   std::size_t n_jumps, std::size_t realizations,
                                   std::uint64_t base_seed, const ode::SolverConfig& config,
                                   const std::optional<RateBound>& bound,
                                   const BenchOptions& options = {});

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t bins = 0;
  std::vector<Method> methods;
  std::vector<std::vector<std::size_t>> counts;  // [method][bin]

  double bin_lo(std::size_t b) const;
  double bin_hi(std::size_t b) const;
  const std::vector<std::size_t>& for_method(Method m) const;
};

/// Equal-width bins over the pooled range of successful results.
Histogram histogram(const std::vector<BenchResult>& results, std::size_t bins);

double median_seconds(const std::vector<BenchResult>& results, Method method);

}  // namespace pdmp::bench
