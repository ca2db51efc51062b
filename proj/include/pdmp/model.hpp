#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pdmp {

using Vec = std::vector<double>;
using IVec = std::vector<std::int64_t>;

class ExpStream;

/// Uniform(0,1) draws handed to jump kernels. Backed by the uniform channel of
/// an ExpStream, so kernels never consume the exponential sequence.
class UniformSource {
 public:
  explicit UniformSource(ExpStream& stream) : stream_(&stream) {}
  double operator()();

 private:
  ExpStream* stream_;
};

/// Reproducible randomness for one realization.
///
/// Draw i of a channel is a pure function of (seed, realization, channel, i),
/// so realization k of a batch is independent of how many draws the other
/// realizations consumed.
class ExpStream {
 public:
  explicit ExpStream(std::uint64_t seed, std::uint64_t realization = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t realization() const noexcept { return realization_; }
  std::uint64_t cursor() const noexcept { return exp_cursor_; }

  /// Next unit-exponential S_n = -log(U), U uniform on (0,1).
  double exp_draw();
  /// Exponential with the given rate, obtained as S / rate from the unit stream.
  double exp_draw(double rate) { return exp_draw() / rate; }
  /// The i-th unit-exponential draw (0-based) without moving the cursor.
  double exp_at(std::uint64_t index) const;
  double uniform();

  void reset() noexcept {
    exp_cursor_ = 0;
    uniform_cursor_ = 0;
  }

 private:
  double uniform_at(std::uint64_t channel, std::uint64_t index) const;

  std::uint64_t seed_;
  std::uint64_t realization_;
  std::uint64_t key_;
  std::uint64_t exp_cursor_ = 0;
  std::uint64_t uniform_cursor_ = 0;
};

inline double UniformSource::operator()() { return stream_->uniform(); }

struct HybridState {
  Vec continuous;
  IVec discrete;

  friend bool operator==(const HybridState&, const HybridState&) = default;
};

/// Continuous flow F, total jump rate R_tot and jump kernel of a PDMP.
struct PdmpModel {
  using VectorField =
      std::function<void(std::span<const double> xc, std::span<const std::int64_t> xd, double t,
                         std::span<double> dxdt)>;
  using TotalRate =
      std::function<double(std::span<const double> xc, std::span<const std::int64_t> xd, double t)>;
  using JumpKernel = std::function<HybridState(std::span<const double> xc,
                                               std::span<const std::int64_t> xd, double t,
                                               UniformSource& uniform)>;

  std::string name;
  std::size_t dim_continuous = 0;
  std::size_t dim_discrete = 0;
  VectorField vector_field;
  TotalRate total_rate;
  JumpKernel jump_kernel;
  Vec initial_continuous;
  IVec initial_discrete;
  double initial_time = 0.0;
  /// F or R_tot depend on t explicitly.
  bool time_dependent = false;

  HybridState initial_state() const { return {initial_continuous, initial_discrete}; }
};

/// Evaluates R_tot and throws NegativeRate on a negative or NaN result.
double checked_rate(const PdmpModel& model, std::span<const double> xc,
                    std::span<const std::int64_t> xd, double t);

enum class IssueKind { MissingFunction, DimensionMismatch, NegativeRate, NonFinite };

std::string_view to_string(IssueKind kind);

struct ValidationIssue {
  IssueKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  double initial_rate = std::numeric_limits<double>::quiet_NaN();

  bool ok() const noexcept { return issues.empty(); }
  bool has(IssueKind kind) const;
};

/// Evaluates F, R_tot and the kernel once at the initial state.
ValidationReport validate_model(const PdmpModel& model);

enum class RecordKind { true_jump, phantom_sample, fictitious, horizon_end };
enum class Method { chv, fjm, tjm_event };

std::string_view to_string(RecordKind kind);
std::string_view to_string(Method method);
RecordKind parse_record_kind(std::string_view text);
Method parse_method(std::string_view text);

struct JumpRecord {
  std::uint64_t index = 0;  // 1-based position in the trajectory
  double time = 0.0;
  HybridState before;
  HybridState after;
  RecordKind kind = RecordKind::true_jump;
  /// The exponential draw that produced this event (NaN for horizon_end).
  double draw = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
  std::vector<JumpRecord> records;
  double t_end = 0.0;
  std::string model_id;
  std::uint64_t seed = 0;
  std::uint64_t realization = 0;
  Method method = Method::chv;
  double atol = 0.0;
  double rtol = 0.0;
  /// Integrator anomalies that did not abort the run (e.g. accumulated-rate
  /// coordinate decreasing in the event baseline).
  std::size_t warnings = 0;

  std::size_t count(RecordKind kind) const;
  std::vector<const JumpRecord*> true_jumps() const;
  bool reached_horizon() const {
    return !records.empty() && records.back().kind == RecordKind::horizon_end;
  }
  void push(double time, HybridState before, HybridState after, RecordKind kind, double draw);
};

}  // namespace pdmp
