#include "pdmp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "pdmp/error.hpp"

namespace pdmp::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument, "bad real '" + s + "'");
  }
  return v;
}

std::string lookup(const Metadata& meta, const std::string& key) {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  return {};
}

nlohmann::json state_json(const HybridState& s) {
  nlohmann::json continuous = nlohmann::json::array();
  for (double v : s.continuous) {
    continuous.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(format_real(v)));
  }
  return {{"continuous", continuous}, {"discrete", s.discrete}};
}

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string provenance_line(const Metadata& meta) {
  std::string line = "#";
  for (const auto& [k, v] : meta) line += " " + k + "=" + v;
  return line;
}

Metadata parse_provenance_line(const std::string& line) {
  Metadata meta;
  if (line.empty() || line.front() != '#') return meta;
  std::istringstream ss(line.substr(1));
  std::string token;
  while (ss >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    meta.emplace_back(token.substr(0, eq), token.substr(eq + 1));
  }
  return meta;
}

Metadata trajectory_metadata(const Trajectory& traj) {
  return {{"model", traj.model_id},
          {"method", std::string(to_string(traj.method))},
          {"seed", std::to_string(traj.seed)},
          {"realization", std::to_string(traj.realization)},
          {"atol", format_real(traj.atol)},
          {"rtol", format_real(traj.rtol)},
          {"t_end", format_real(traj.t_end)},
          {"warnings", std::to_string(traj.warnings)}};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t dc = traj.records.empty() ? 0 : traj.records.front().before.continuous.size();
  const std::size_t dd = traj.records.empty() ? 0 : traj.records.front().before.discrete.size();
  os << provenance_line(trajectory_metadata(traj)) << '\n';
  os << "index,kind,time,draw";
  for (const char* side : {"before", "after"}) {
    for (std::size_t i = 0; i < dc; ++i) os << ",xc_" << side << '_' << i;
    for (std::size_t i = 0; i < dd; ++i) os << ",xd_" << side << '_' << i;
  }
  os << '\n';
  for (const auto& r : traj.records) {
    os << r.index << ',' << to_string(r.kind) << ',' << format_real(r.time) << ','
       << format_real(r.draw);
    for (const HybridState* s : {&r.before, &r.after}) {
      for (double v : s->continuous) os << ',' << format_real(v);
      for (auto v : s->discrete) os << ',' << v;
    }
    os << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& is) {
  Trajectory traj;
  std::string line;
  if (!std::getline(is, line) || line.empty() || line.front() != '#') {
    throw Error(ErrorCode::InvalidArgument, "trajectory file lacks a provenance line");
  }
  const Metadata meta = parse_provenance_line(line);
  traj.model_id = lookup(meta, "model");
  traj.method = parse_method(lookup(meta, "method"));
  traj.seed = std::stoull(lookup(meta, "seed"));
  traj.realization = std::stoull(lookup(meta, "realization"));
  traj.atol = parse_real(lookup(meta, "atol"));
  traj.rtol = parse_real(lookup(meta, "rtol"));
  traj.t_end = parse_real(lookup(meta, "t_end"));
  traj.warnings = std::stoull(lookup(meta, "warnings"));

  if (!std::getline(is, line)) throw Error(ErrorCode::InvalidArgument, "missing header row");
  const auto header = split(line, ',');
  std::size_t dc = 0, dd = 0;
  for (const auto& h : header) {
    if (h.rfind("xc_before_", 0) == 0) ++dc;
    if (h.rfind("xd_before_", 0) == 0) ++dd;
  }
  const std::size_t expected = 4 + 2 * (dc + dd);
  if (header.size() != expected) throw Error(ErrorCode::InvalidArgument, "malformed header row");

  while (std::getline(is, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto f = split(line, ',');
    if (f.size() != expected) throw Error(ErrorCode::InvalidArgument, "malformed row: " + line);
    JumpRecord r;
    r.index = std::stoull(f[0]);
    r.kind = parse_record_kind(f[1]);
    r.time = parse_real(f[2]);
    r.draw = parse_real(f[3]);
    std::size_t col = 4;
    for (HybridState* s : {&r.before, &r.after}) {
      for (std::size_t i = 0; i < dc; ++i) s->continuous.push_back(parse_real(f[col++]));
      for (std::size_t i = 0; i < dd; ++i) s->discrete.push_back(std::stoll(f[col++]));
    }
    traj.records.push_back(std::move(r));
  }
  return traj;
}

void write_trajectory_json(std::ostream& os, const Trajectory& traj) {
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [k, v] : trajectory_metadata(traj)) meta[k] = v;
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : traj.records) {
    records.push_back({{"index", r.index},
                       {"kind", to_string(r.kind)},
                       {"time", format_real(r.time)},
                       {"draw", format_real(r.draw)},
                       {"before", state_json(r.before)},
                       {"after", state_json(r.after)}});
  }
  // Times as 17-digit strings keep the binary round-trip independent of the
  // JSON number printer.
  os << nlohmann::json{{"metadata", meta}, {"records", records}}.dump(2) << '\n';
}

void write_error_table_csv(std::ostream& os, const examples::ErrorTable& table,
                           const Metadata& meta) {
  os << provenance_line(meta) << '\n' << kErrorTableHeader << '\n';
  for (const auto& r : table.rows) {
    os << r.jump_index << ',' << format_real(r.t_oracle) << ',' << format_real(r.t_numeric) << ','
       << format_real(r.err_t) << ',' << format_real(r.err_x) << ',' << r.method << ','
       << format_real(r.atol) << ',' << format_real(r.rtol) << '\n';
  }
}

void write_bench_csv(std::ostream& os, const std::vector<bench::BenchResult>& results,
                     const Metadata& meta) {
  os << provenance_line(meta) << '\n' << kBenchHeader << '\n';
  for (const auto& r : results) {
    if (!r.ok()) {
      os << "# realization " << r.realization << ' ' << to_string(r.method)
         << " failed: " << r.error << '\n';
      continue;
    }
    os << to_string(r.method) << ',' << r.realization << ',' << format_real(r.seconds) << ','
       << r.jumps << ',' << r.fictitious << ',' << r.seed << '\n';
  }
}

void write_histogram_csv(std::ostream& os, const bench::Histogram& hist, Method method,
                         const Metadata& meta) {
  os << provenance_line(meta) << '\n' << kHistogramHeader << '\n';
  const auto& counts = hist.for_method(method);
  for (std::size_t b = 0; b < hist.bins; ++b) {
    os << to_string(method) << ',' << format_real(hist.bin_lo(b)) << ','
       << format_real(hist.bin_hi(b)) << ',' << counts[b] << '\n';
  }
}

}  // namespace pdmp::io
