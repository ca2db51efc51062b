#include "pdmp/examples.hpp"

#include <algorithm>
#include <cmath>

#include "pdmp/error.hpp"

namespace pdmp::examples {

namespace {

bool is_odd(std::int64_t v) { return (v % 2) != 0; }

PdmpModel::JumpKernel increment_discrete() {
  return [](std::span<const double> xc, std::span<const std::int64_t> xd, double,
            UniformSource&) {
    HybridState next{Vec(xc.begin(), xc.end()), IVec(xd.begin(), xd.end())};
    next.discrete[0] += 1;
    return next;
  };
}

PdmpModel switching_model(std::string name, double xc0) {
  PdmpModel m;
  m.name = std::move(name);
  m.dim_continuous = 1;
  m.dim_discrete = 1;
  m.initial_continuous = {xc0};
  m.initial_discrete = {0};
  m.jump_kernel = increment_discrete();
  return m;
}

template <typename Step>
OracleTrajectory iterate_oracle(ExpStream& stream, std::size_t n_jumps, double xc0, Step step) {
  if (n_jumps == 0) throw Error(ErrorCode::InvalidJumpCount, "oracle needs n_jumps >= 1");
  OracleTrajectory out;
  out.seed = stream.seed();
  out.realization = stream.realization();
  double t = 0.0;
  double xc = xc0;
  std::int64_t xd = 0;
  for (std::size_t n = 0; n < n_jumps; ++n) {
    const double s = stream.exp_draw();
    const std::optional<ClosedFormStep> next = step(xc, xd, s);
    if (!next) {
      out.terminated = true;
      break;
    }
    t += next->dt;
    xc = next->xc;
    out.jumps.push_back({t, xc, xd, s});
    ++xd;
  }
  return out;
}

}  // namespace

PdmpModel example1_model() {
  PdmpModel m = switching_model("example1", 1.0);
  m.vector_field = [](std::span<const double> xc, std::span<const std::int64_t> xd, double,
                      std::span<double> dx) {
    const double a = is_odd(xd[0]) ? -100.0 : 100.0;
    dx[0] = a * xc[0];
  };
  m.total_rate = [](std::span<const double> xc, std::span<const std::int64_t>, double) {
    return xc[0];
  };
  return m;
}

PdmpModel example2_model() {
  PdmpModel m = switching_model("example2", 1.0);
  m.vector_field = [](std::span<const double> xc, std::span<const std::int64_t> xd, double,
                      std::span<double> dx) {
    dx[0] = is_odd(xd[0]) ? -3.0 * xc[0] * xc[0] : 10.0 * xc[0];
  };
  m.total_rate = [](std::span<const double> xc, std::span<const std::int64_t>, double) {
    return xc[0];
  };
  return m;
}

double example3_rate(double xc) { return 1.0 / (1.0 + std::exp(-xc + 5.0)) + 0.1; }

PdmpModel example3_model() {
  PdmpModel m = switching_model("example3", 0.05);
  m.vector_field = [](std::span<const double> xc, std::span<const std::int64_t> xd, double,
                      std::span<double> dx) {
    dx[0] = is_odd(xd[0]) ? -4.0 * xc[0] : 3.0 * xc[0];
  };
  m.total_rate = [](std::span<const double> xc, std::span<const std::int64_t>, double) {
    return example3_rate(xc[0]);
  };
  return m;
}

PdmpModel poisson_model(double rate) {
  PdmpModel m = switching_model("poisson", 0.0);
  m.vector_field = [](std::span<const double>, std::span<const std::int64_t>, double,
                      std::span<double> dx) { dx[0] = 0.0; };
  m.total_rate = [rate](std::span<const double>, std::span<const std::int64_t>, double) {
    return rate;
  };
  return m;
}

std::optional<ClosedFormStep> example1_step(double xc, std::int64_t xd, double s) {
  const double a = is_odd(xd) ? -100.0 : 100.0;
  const double arg = a * s / xc;
  if (1.0 + arg <= 0.0) return std::nullopt;
  return ClosedFormStep{std::log1p(arg) / a, xc + a * s};
}

ClosedFormStep example2_step(double xc, std::int64_t xd, double s) {
  if (is_odd(xd)) return {std::expm1(3.0 * s) / (3.0 * xc), xc * std::exp(-3.0 * s)};
  return {std::log1p(10.0 * s / xc) / 10.0, xc + 10.0 * s};
}

OracleTrajectory example1_oracle(ExpStream& stream, std::size_t n_jumps) {
  return iterate_oracle(stream, n_jumps, 1.0, example1_step);
}

OracleTrajectory example2_oracle(ExpStream& stream, std::size_t n_jumps) {
  return iterate_oracle(stream, n_jumps, 1.0,
                        [](double xc, std::int64_t xd, double s) -> std::optional<ClosedFormStep> {
                          return example2_step(xc, xd, s);
                        });
}

double ErrorTable::max_err_t() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.err_t);
  return m;
}

double ErrorTable::max_err_x() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.err_x);
  return m;
}

ErrorTable compare_to_oracle(const Trajectory& numeric, const OracleTrajectory& oracle) {
  if (numeric.seed != oracle.seed || numeric.realization != oracle.realization) {
    throw Error(ErrorCode::StreamMismatch,
                "numeric seed " + std::to_string(numeric.seed) + " vs oracle seed " +
                    std::to_string(oracle.seed));
  }
  const auto jumps = numeric.true_jumps();
  const std::size_t n = std::min(jumps.size(), oracle.jumps.size());
  ErrorTable table;
  table.rows.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const JumpRecord& r = *jumps[k];
    const OracleJump& o = oracle.jumps[k];
    table.rows.push_back({k + 1, o.time, r.time, std::abs(r.time - o.time),
                          std::abs(r.before.continuous.at(0) - o.xc),
                          std::string(to_string(numeric.method)), numeric.atol, numeric.rtol});
  }
  return table;
}

std::vector<std::string> model_names() { return {"example1", "example2", "example3", "poisson"}; }

std::optional<RegistryEntry> lookup(std::string_view name) {
  if (name == "example1") return RegistryEntry{"example1", example1_model(), std::nullopt};
  if (name == "example2") return RegistryEntry{"example2", example2_model(), std::nullopt};
  if (name == "example3") return RegistryEntry{"example3", example3_model(), 1.1};
  if (name == "poisson") {
    constexpr double kRate = 2.0;
    return RegistryEntry{"poisson", poisson_model(kRate), kRate};
  }
  return std::nullopt;
}

}  // namespace pdmp::examples
