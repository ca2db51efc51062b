#include "pdmp/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdmp/error.hpp"

namespace pdmp {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kExpChannel = 0;
constexpr std::uint64_t kUniformChannel = 1;

}  // namespace

ExpStream::ExpStream(std::uint64_t seed, std::uint64_t realization)
    : seed_(seed), realization_(realization), key_(mix64(seed ^ mix64(realization + kGamma))) {}

double ExpStream::uniform_at(std::uint64_t channel, std::uint64_t index) const {
  const std::uint64_t base = mix64(key_ ^ (channel * 0xD1B54A32D192ED03ULL));
  const std::uint64_t bits = mix64(base + (index + 1) * kGamma);
  // 53 random bits, shifted by half an ulp: never 0, never 1.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double ExpStream::exp_at(std::uint64_t index) const {
  return -std::log(uniform_at(kExpChannel, index));
}

double ExpStream::exp_draw() { return exp_at(exp_cursor_++); }

double ExpStream::uniform() { return uniform_at(kUniformChannel, uniform_cursor_++); }

double checked_rate(const PdmpModel& model, std::span<const double> xc,
                    std::span<const std::int64_t> xd, double t) {
  const double r = model.total_rate(xc, xd, t);
  if (!(r >= 0.0)) {
    throw Error(ErrorCode::NegativeRate,
                "R_tot=" + std::to_string(r) + " at t=" + std::to_string(t));
  }
  return r;
}

std::string_view to_string(IssueKind kind) {
  switch (kind) {
    case IssueKind::MissingFunction: return "MissingFunction";
    case IssueKind::DimensionMismatch: return "DimensionMismatch";
    case IssueKind::NegativeRate: return "NegativeRate";
    case IssueKind::NonFinite: return "NonFinite";
  }
  return "Unknown";
}

bool ValidationReport::has(IssueKind kind) const {
  return std::any_of(issues.begin(), issues.end(),
                     [kind](const ValidationIssue& i) { return i.kind == kind; });
}

ValidationReport validate_model(const PdmpModel& model) {
  ValidationReport report;
  auto flag = [&](IssueKind kind, std::string msg) {
    report.issues.push_back({kind, std::move(msg)});
  };

  if (!model.vector_field || !model.total_rate || !model.jump_kernel) {
    flag(IssueKind::MissingFunction, "vector_field, total_rate and jump_kernel are required");
    return report;
  }
  if (model.dim_continuous == 0) {
    flag(IssueKind::DimensionMismatch, "dim_continuous must be positive");
    return report;
  }
  if (model.initial_continuous.size() != model.dim_continuous ||
      model.initial_discrete.size() != model.dim_discrete) {
    flag(IssueKind::DimensionMismatch, "initial state does not match declared dimensions");
    return report;
  }

  const auto& xc = model.initial_continuous;
  const auto& xd = model.initial_discrete;
  const double t = model.initial_time;

  // Oversized buffer with a sentinel: F must write exactly dim_continuous slots.
  constexpr double kSentinel = -0x1.234p1000;
  constexpr std::size_t kPad = 8;
  Vec buffer(model.dim_continuous + kPad, kSentinel);
  model.vector_field(xc, xd, t, buffer);
  const auto written_end = buffer.begin() + static_cast<std::ptrdiff_t>(model.dim_continuous);
  const bool under = std::any_of(buffer.begin(), written_end, [](double v) { return v == kSentinel; });
  const bool over = std::any_of(written_end, buffer.end(), [](double v) { return v != kSentinel; });
  if (under || over) {
    flag(IssueKind::DimensionMismatch, "vector_field output dimension differs from dim_continuous");
  } else if (!std::all_of(buffer.begin(), written_end, [](double v) { return std::isfinite(v); })) {
    flag(IssueKind::NonFinite, "vector_field is not finite at the initial state");
  }

  const double rate = model.total_rate(xc, xd, t);
  report.initial_rate = rate;
  if (std::isnan(rate) || std::isinf(rate)) {
    flag(IssueKind::NonFinite, "total_rate is not finite at the initial state");
  } else if (rate < 0.0) {
    flag(IssueKind::NegativeRate, "total_rate=" + std::to_string(rate) + " at the initial state");
  }

  ExpStream scratch(0);
  UniformSource uniform(scratch);
  const HybridState next = model.jump_kernel(xc, xd, t, uniform);
  if (next.continuous.size() != model.dim_continuous ||
      next.discrete.size() != model.dim_discrete) {
    flag(IssueKind::DimensionMismatch, "jump_kernel returns a state of the wrong dimension");
  } else if (!std::all_of(next.continuous.begin(), next.continuous.end(),
                          [](double v) { return std::isfinite(v); })) {
    flag(IssueKind::NonFinite, "jump_kernel returns a non-finite state");
  }
  return report;
}

std::string_view to_string(RecordKind kind) {
  switch (kind) {
    case RecordKind::true_jump: return "true_jump";
    case RecordKind::phantom_sample: return "phantom_sample";
    case RecordKind::fictitious: return "fictitious";
    case RecordKind::horizon_end: return "horizon_end";
  }
  return "unknown";
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::chv: return "chv";
    case Method::fjm: return "fjm";
    case Method::tjm_event: return "tjm-event";
  }
  return "unknown";
}

RecordKind parse_record_kind(std::string_view text) {
  for (auto k : {RecordKind::true_jump, RecordKind::phantom_sample, RecordKind::fictitious,
                 RecordKind::horizon_end}) {
    if (to_string(k) == text) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown record kind '" + std::string(text) + "'");
}

Method parse_method(std::string_view text) {
  for (auto m : {Method::chv, Method::fjm, Method::tjm_event}) {
    if (to_string(m) == text) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(text) + "'");
}

std::size_t Trajectory::count(RecordKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [kind](const JumpRecord& r) { return r.kind == kind; }));
}

std::vector<const JumpRecord*> Trajectory::true_jumps() const {
  std::vector<const JumpRecord*> out;
  for (const auto& r : records) {
    if (r.kind == RecordKind::true_jump) out.push_back(&r);
  }
  return out;
}

void Trajectory::push(double time, HybridState before, HybridState after, RecordKind kind,
                      double draw) {
  records.push_back(
      {records.size() + 1, time, std::move(before), std::move(after), kind, draw});
}

}  // namespace pdmp
