#pragma once

// Benchmark switching models with closed-form jump recursions, plus the
// registry used by the command-line tool.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdmp/model.hpp"

namespace pdmp::examples {

/// x' = a x_c with a = +100 on even x_d, -100 on odd; R_tot = x_c; x_d -> x_d + 1.
PdmpModel example1_model();
/// x' = 10 x_c on even x_d, -3 x_c^2 on odd; R_tot = x_c; x_d -> x_d + 1.
PdmpModel example2_model();
/// x' = 3 x_c on even x_d, -4 x_c on odd; R_tot = 1/(1 + exp(5 - x_c)) + 0.1.
PdmpModel example3_model();
/// F = 0, constant rate, x_d counts jumps.
PdmpModel poisson_model(double rate = 2.0);

double example3_rate(double xc);

struct OracleJump {
  double time;
  double xc;       // continuous state at the jump (unchanged by the kernel)
  std::int64_t xd_before;
  double draw;
};

struct OracleTrajectory {
  std::vector<OracleJump> jumps;
  /// Example 1 only: the next jump time is infinite.
  bool terminated = false;
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;
};

/// Iterates the closed-form recursion of example 1 from (x_c, x_d) = (1, 0).
OracleTrajectory example1_oracle(ExpStream& stream, std::size_t n_jumps);
/// Iterates the two-branch closed form of example 2 from (x_c, x_d) = (1, 0).
OracleTrajectory example2_oracle(ExpStream& stream, std::size_t n_jumps);

/// One closed-form step: time increment and post-flow x_c. nullopt when the
/// jump time is infinite.
struct ClosedFormStep {
  double dt;
  double xc;
};
std::optional<ClosedFormStep> example1_step(double xc, std::int64_t xd, double s);
ClosedFormStep example2_step(double xc, std::int64_t xd, double s);

struct ErrorRow {
  std::size_t jump_index;
  double t_oracle;
  double t_numeric;
  double err_t;
  double err_x;
  std::string method;
  double atol;
  double rtol;
};

struct ErrorTable {
  std::vector<ErrorRow> rows;

  double max_err_t() const;
  double max_err_x() const;
};

/// Pairs the k-th true jump of `numeric` with the k-th oracle jump. Throws
/// StreamMismatch when the two were not driven by the same stream.
ErrorTable compare_to_oracle(const Trajectory& numeric, const OracleTrajectory& oracle);

struct RegistryEntry {
  std::string name;
  PdmpModel model;
  std::optional<double> default_bound;  // for the rejection method
};

std::vector<std::string> model_names();
/// nullopt for unknown names.
std::optional<RegistryEntry> lookup(std::string_view name);

}  // namespace pdmp::examples
