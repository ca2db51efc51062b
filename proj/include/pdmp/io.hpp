#pragma once

// CSV / JSON serialization. Reals are written with 17 significant digits so
// that reading a file back recovers the exact binary values.

#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pdmp/bench.hpp"
#include "pdmp/examples.hpp"
#include "pdmp/model.hpp"

namespace pdmp::io {

using Metadata = std::vector<std::pair<std::string, std::string>>;

std::string format_real(double value);
/// "# key=value key=value ..."
std::string provenance_line(const Metadata& meta);
Metadata parse_provenance_line(const std::string& line);

Metadata trajectory_metadata(const Trajectory& traj);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& is);
void write_trajectory_json(std::ostream& os, const Trajectory& traj);

inline constexpr const char* kErrorTableHeader =
    "jump_index,t_oracle,t_numeric,err_t,err_x,method,atol,rtol";
inline constexpr const char* kBenchHeader = "method,realization,seconds,jumps,fictitious,seed";
inline constexpr const char* kHistogramHeader = "method,bin_lo,bin_hi,count";

void write_error_table_csv(std::ostream& os, const examples::ErrorTable& table,
                           const Metadata& meta);
void write_bench_csv(std::ostream& os, const std::vector<bench::BenchResult>& results,
                     const Metadata& meta);
/// Rows of a single method.
void write_histogram_csv(std::ostream& os, const bench::Histogram& hist, Method method,
                         const Metadata& meta);

}  // namespace pdmp::io
