// pdmp: simulate / compare / bench front end over the built-in models.
//
// Exit codes: 0 success, 1 engine failure, 2 usage error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pdmp/bench.hpp"
#include "pdmp/chv.hpp"
#include "pdmp/error.hpp"
#include "pdmp/examples.hpp"
#include "pdmp/fjm.hpp"
#include "pdmp/io.hpp"
#include "pdmp/tjm_event.hpp"

namespace {

using namespace pdmp;

constexpr int kExitEngine = 1;
constexpr int kExitUsage = 2;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::uint64_t seed = 0;
  double atol = 1e-10;
  double rtol = 1e-10;

  ode::SolverConfig solver() const {
    ode::SolverConfig c;
    c.atol = atol;
    c.rtol = rtol;
    return c;
  }
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "Random seed")->envname("PDMP_SEED");
  cmd->add_option("--atol", f.atol, "Absolute tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--rtol", f.rtol, "Relative tolerance")->check(CLI::PositiveNumber);
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  std::istringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_method(item));
    } catch (const Error&) {
      throw UsageError("unknown method '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("no methods given");
  return out;
}

examples::RegistryEntry registry_model(const std::string& name) {
  auto entry = examples::lookup(name);
  if (!entry) throw UsageError("unknown model '" + name + "'");
  return std::move(*entry);
}

/// Writes to `path`, or standard output for "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  fn(out);
}

void announce(const io::Metadata& meta) { std::cerr << io::provenance_line(meta) << '\n'; }

// ---------------------------------------------------------------------------

struct SimulateFlags {
  CommonFlags common;
  std::string model;
  std::string method = "chv";
  std::optional<double> t_end;
  std::optional<std::size_t> n_jumps;
  double sample_rate = 0.0;
  std::optional<double> bound;
  std::string out = "-";
  std::string format = "csv";
};

int cmd_simulate(const SimulateFlags& f) {
  auto entry = registry_model(f.model);
  const Method method = parse_methods(f.method).front();
  if (!f.t_end && !f.n_jumps) throw UsageError("give --t-end or --n-jumps");
  if (f.n_jumps && *f.n_jumps == 0) throw UsageError("--n-jumps must be positive");
  if (f.sample_rate != 0.0 && method != Method::chv) {
    throw UsageError("--sample-rate applies to the chv method only");
  }
  const double t_end = f.t_end.value_or(kInf);
  const std::size_t max_jumps = f.n_jumps.value_or(1'000'000);
  const auto config = f.common.solver();

  announce({{"command", "simulate"},
            {"model", f.model},
            {"method", std::string(to_string(method))},
            {"seed", std::to_string(f.common.seed)},
            {"atol", io::format_real(config.atol)},
            {"rtol", io::format_real(config.rtol)}});

  ExpStream stream(f.common.seed);
  Trajectory traj;
  switch (method) {
    case Method::chv: {
      ChvOptions opts;
      opts.max_jumps = max_jumps;
      opts.sample_rate = f.sample_rate;
      traj = chv_simulate(entry.model, t_end, stream, config, opts);
      break;
    }
    case Method::fjm: {
      const auto bound = f.bound ? f.bound : entry.default_bound;
      if (!bound) throw UsageError("model '" + f.model + "' needs --bound for fjm");
      FjmOptions opts;
      opts.max_jumps = max_jumps;
      traj = fjm_simulate(entry.model, RateBound::constant(*bound), t_end, stream, config, opts);
      break;
    }
    case Method::tjm_event: {
      TjmOptions opts;
      opts.max_jumps = max_jumps;
      traj = tjm_event_simulate(entry.model, t_end, stream, config, opts);
      break;
    }
  }

  with_output(f.out, [&](std::ostream& os) {
    if (f.format == "json") {
      io::write_trajectory_json(os, traj);
    } else {
      io::write_trajectory_csv(os, traj);
    }
  });
  return 0;
}

// ---------------------------------------------------------------------------

struct CompareFlags {
  CommonFlags common;
  int example = 0;
  std::size_t jumps = 20;
  std::string methods = "chv,tjm-event";
  std::string out = "-";
};

int cmd_compare(const CompareFlags& f) {
  if (f.example != 1 && f.example != 2) {
    throw UsageError("--example must be 1 or 2 (closed forms exist only for those)");
  }
  if (f.jumps == 0) throw UsageError("--jumps must be positive");
  const auto methods = parse_methods(f.methods);
  for (Method m : methods) {
    if (m == Method::fjm) throw UsageError("compare supports chv and tjm-event");
  }
  const auto config = f.common.solver();
  const PdmpModel model = f.example == 1 ? examples::example1_model() : examples::example2_model();

  ExpStream oracle_stream(f.common.seed);
  const auto oracle = f.example == 1 ? examples::example1_oracle(oracle_stream, f.jumps)
                                     : examples::example2_oracle(oracle_stream, f.jumps);
  // A terminated oracle has an infinite next jump; close the numeric run one
  // time unit after its last finite jump.
  double t_end = kInf;
  if (oracle.terminated) t_end = (oracle.jumps.empty() ? 0.0 : oracle.jumps.back().time) + 1.0;

  const io::Metadata meta{{"command", "compare"},
                          {"model", model.name},
                          {"methods", f.methods},
                          {"seed", std::to_string(f.common.seed)},
                          {"atol", io::format_real(config.atol)},
                          {"rtol", io::format_real(config.rtol)}};
  announce(meta);

  examples::ErrorTable all;
  for (Method m : methods) {
    ExpStream stream(f.common.seed);
    Trajectory traj;
    if (m == Method::chv) {
      ChvOptions opts;
      opts.max_jumps = f.jumps;
      traj = chv_simulate(model, t_end, stream, config, opts);
    } else {
      TjmOptions opts;
      opts.max_jumps = f.jumps;
      traj = tjm_event_simulate(model, t_end, stream, config, opts);
    }
    const auto table = examples::compare_to_oracle(traj, oracle);
    std::cerr << to_string(m) << ": rows=" << table.rows.size()
              << " max_err_t=" << io::format_real(table.max_err_t())
              << " max_err_x=" << io::format_real(table.max_err_x()) << '\n';
    all.rows.insert(all.rows.end(), table.rows.begin(), table.rows.end());
  }
  with_output(f.out, [&](std::ostream& os) { io::write_error_table_csv(os, all, meta); });
  return 0;
}

// ---------------------------------------------------------------------------

struct BenchFlags {
  CommonFlags common;
  std::string model;
  std::string methods = "chv,fjm";
  std::size_t jumps = 1;
  std::size_t realizations = 1000;
  std::size_t bins = 50;
  std::size_t threads = 1;
  std::optional<double> bound;
  std::string out_dir = ".";
};

int cmd_bench(const BenchFlags& f) {
  auto entry = registry_model(f.model);
  const auto methods = parse_methods(f.methods);
  if (f.realizations == 0) throw UsageError("--realizations must be at least 1");
  if (f.jumps == 0) throw UsageError("--jumps must be at least 1");
  if (f.bins < 2) throw UsageError("--bins must be at least 2");
  std::optional<RateBound> bound;
  if (const auto b = f.bound ? f.bound : entry.default_bound) bound = RateBound::constant(*b);
  for (Method m : methods) {
    if (m == Method::fjm && !bound) throw UsageError("fjm needs --bound for this model");
  }
  const auto config = f.common.solver();
  const io::Metadata meta{{"command", "bench"},
                          {"model", f.model},
                          {"methods", f.methods},
                          {"seed", std::to_string(f.common.seed)},
                          {"jumps", std::to_string(f.jumps)},
                          {"realizations", std::to_string(f.realizations)},
                          {"atol", io::format_real(config.atol)},
                          {"rtol", io::format_real(config.rtol)}};
  announce(meta);

  std::filesystem::create_directories(f.out_dir);
  bench::BenchOptions opts;
  opts.threads = f.threads;
  const auto results =
      bench::run_bench(entry.model, methods, f.jumps, f.realizations, f.common.seed, config,
                       bound, opts);
  const auto hist = bench::histogram(results, f.bins);

  std::size_t failures = 0;
  for (Method m : methods) {
    std::vector<bench::BenchResult> mine;
    for (const auto& r : results) {
      if (r.method == m) mine.push_back(r);
      if (r.method == m && !r.ok()) ++failures;
    }
    const std::string tag(to_string(m));
    const auto dir = std::filesystem::path(f.out_dir);
    with_output((dir / ("results_" + tag + ".csv")).string(),
                [&](std::ostream& os) { io::write_bench_csv(os, mine, meta); });
    with_output((dir / ("histogram_" + tag + ".csv")).string(),
                [&](std::ostream& os) { io::write_histogram_csv(os, hist, m, meta); });
    std::cerr << tag << ": median_seconds=" << io::format_real(bench::median_seconds(results, m))
              << '\n';
  }
  if (failures > 0) {
    std::cerr << "error: " << failures << " realizations failed (see results files)\n";
    return kExitEngine;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact simulation of piecewise deterministic Markov processes"};
  app.require_subcommand(1);

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate one trajectory");
  simulate->add_option("--model", sim.model, "Built-in model name")->required();
  simulate->add_option("--method", sim.method, "chv | fjm | tjm-event");
  simulate->add_option("--t-end", sim.t_end, "Simulation horizon");
  simulate->add_option("--n-jumps", sim.n_jumps, "Number of true jumps");
  simulate->add_option("--sample-rate", sim.sample_rate, "Rate of phantom sampling events (chv)")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--bound", sim.bound, "Constant rate bound (fjm)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim.out, "Output path, - for stdout");
  simulate->add_option("--format", sim.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  add_common(simulate, sim.common);

  CompareFlags cmp;
  auto* compare = app.add_subcommand("compare", "Per-jump errors against the closed form");
  compare->add_option("--example", cmp.example, "1 or 2")->required();
  compare->add_option("--jumps", cmp.jumps, "Number of jumps");
  compare->add_option("--methods", cmp.methods, "Comma-separated: chv,tjm-event");
  compare->add_option("--out", cmp.out, "Output path, - for stdout");
  add_common(compare, cmp.common);

  BenchFlags bf;
  auto* benchmark = app.add_subcommand("bench", "Timing histograms over many realizations");
  benchmark->add_option("--model", bf.model, "Built-in model name")->required();
  benchmark->add_option("--methods", bf.methods, "Comma-separated methods");
  benchmark->add_option("--jumps", bf.jumps, "True jumps per realization");
  benchmark->add_option("--realizations", bf.realizations, "Number of realizations");
  benchmark->add_option("--bins", bf.bins, "Histogram bins");
  benchmark->add_option("--threads", bf.threads, "Worker threads");
  benchmark->add_option("--bound", bf.bound, "Constant rate bound (fjm)")
      ->check(CLI::PositiveNumber);
  benchmark->add_option("--out-dir", bf.out_dir, "Directory for result files");
  add_common(benchmark, bf.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*compare) return cmd_compare(cmp);
    if (*benchmark) return cmd_bench(bf);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEngine;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEngine;
  }
  return kExitUsage;
}
