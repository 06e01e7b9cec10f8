#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "headpred/motion_classifier.hpp"
#include "headpred/pose.hpp"
#include "headpred/predictors.hpp"

namespace headpred {

// ---------------------------------------------------------------------------
// Trace files: CSV with the header below, t in seconds, p in meters,
// q scalar-first.

inline constexpr std::string_view kTraceHeader = "t,px,py,pz,qw,qx,qy,qz";

/// Malformed trace content; the message names the offending line.
class TraceFormatError : public std::runtime_error {
 public:
  TraceFormatError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parse a trace. Quaternions with norm in [0.5, 1.5] are renormalized and
/// flipped into the hemisphere of their predecessor; timestamps must
/// increase with spacing within 10% of 1/sample_hz.
std::vector<Pose> parse_trace(std::istream& in, double sample_hz = 100.0);
std::vector<Pose> load_trace(const std::filesystem::path& path, double sample_hz = 100.0);
void save_trace(const std::filesystem::path& path, std::span<const Pose> trace);

// ---------------------------------------------------------------------------
// Synthetic head motion standing in for recorded headset traces.

enum class SynthKind { Easy, Medium, Hard };

SynthKind synth_kind_from_string(std::string_view name);
std::string_view to_string(SynthKind kind);

struct SynthProfile {
  SynthKind kind = SynthKind::Easy;
  double duration = 60.0;  // s
  double sample_hz = 100.0;
  std::uint64_t seed = 1;
};

/// Deterministic in the profile (including seed).
///  easy:   slow sinusoids, at most 0.5 Hz, 5 cm and 10 degrees.
///  medium: mixed sinusoids up to 2 Hz plus a smooth random walk.
///  hard:   piecewise head turns up to 90 degrees with abrupt reversals and
///          content up to 4 Hz.
std::vector<Pose> generate_synthetic_trace(const SynthProfile& profile);

// ---------------------------------------------------------------------------
// Packet loss

/// Seeded uniform source for the drop gate.
class DropRng {
 public:
  explicit DropRng(std::uint64_t seed);
  /// Uniform on the open interval (0, 1).
  double uniform();

 private:
  std::uint64_t state_;
};

/// Draws r uniform in (0, 1); the packet is received iff r > drop_rate.
/// Throws std::invalid_argument unless drop_rate lies in [0, 1].
bool simulate_drop(DropRng& rng, double drop_rate);

/// Order-independent seed for one experiment cell.
std::uint64_t cell_seed(std::uint64_t master_seed, Variant model, int horizon_ms,
                        double drop_rate, int repeat, std::size_t trace_index);

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentConfig {
  std::vector<Variant> models{Variant::KF, Variant::ESKF, Variant::P2O2, Variant::P2O3,
                              Variant::P3O3};
  std::vector<int> horizons_ms{20, 40, 60, 80, 100};
  std::vector<double> drop_rates{0.0, 0.1, 0.3, 0.5};
  int repeats = 10;
  std::uint64_t master_seed = 1;
  std::size_t chunk_len = 200;
  ClassifierConfig classifier;
  double cutoff_hz = 5.0;
  int filter_order = 2;
  double sample_hz = 100.0;
  double confidence = 0.95;
  bool keep_samples = true;
  int threads = 1;

  void validate() const;
};

struct ErrorSample {
  Variant model = Variant::KF;
  MotionClass motion_class = MotionClass::Easy;
  int horizon_ms = 0;
  double drop_rate = 0.0;
  int repeat = 0;
  std::size_t trace = 0;
  std::size_t tick = 0;
  double t = 0.0;
  double e_pos = 0.0;  // mm
  double e_ori = 0.0;  // deg
};

/// Statistics of one (model, class, horizon, drop rate, repeat) cell.
struct RepeatRow {
  Variant model = Variant::KF;
  MotionClass motion_class = MotionClass::Easy;
  int horizon_ms = 0;
  double drop_rate = 0.0;
  int repeat = 0;
  std::size_t n = 0;
  bool failed = false;
  double pos_median_mm = 0.0;
  double pos_mean_mm = 0.0;
  double ori_median_deg = 0.0;
  double ori_mean_deg = 0.0;
};

/// Aggregate across repeats: CI fields describe the per-repeat means,
/// medians are taken over the pooled per-tick samples.
struct AggregateRow {
  Variant model = Variant::KF;
  MotionClass motion_class = MotionClass::Easy;
  int horizon_ms = 0;
  double drop_rate = 0.0;
  int repeats = 0;
  int failed_repeats = 0;
  double pos_mean_mm = 0.0;
  double pos_mean_ci_low = 0.0;
  double pos_mean_ci_high = 0.0;
  double pos_median_mm = 0.0;
  double ori_mean_deg = 0.0;
  double ori_mean_ci_low = 0.0;
  double ori_mean_ci_high = 0.0;
  double ori_median_deg = 0.0;
};

struct ChunkInfo {
  std::size_t trace = 0;
  std::size_t first_tick = 0;
  std::size_t length = 0;
  double entropy = 0.0;
  MotionClass motion_class = MotionClass::Easy;
};

struct ExperimentReport {
  std::vector<ChunkInfo> chunks;
  std::vector<RepeatRow> repeat_rows;
  std::vector<AggregateRow> aggregate_rows;
  std::vector<ErrorSample> samples;
};

/// Per-tick errors of one filter run over a trace.
///
/// filtered is the low-passed stream fed to the predictor, truth the raw
/// trace used as ground truth. tick_class[k] is the class of the chunk
/// holding tick k, or nullopt for ticks outside any chunk (no sample).
/// The first tick initializes the filter and never passes through the drop
/// gate. Throws NumericalDegeneracy if the filter fails.
std::vector<ErrorSample> run_filter_on_trace(std::span<const Pose> filtered,
                                             std::span<const Pose> truth,
                                             std::span<const std::optional<MotionClass>> tick_class,
                                             const FilterConfig& filter, double drop_rate,
                                             std::uint64_t seed);

/// Low-pass, chunk, classify, then run every (model, horizon, drop rate,
/// repeat) cell over every trace and summarize.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                std::span<const std::vector<Pose>> traces);

/// Writes summary.csv, samples.csv, repeats.csv, chunks.csv and table.txt.
void emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir);

inline constexpr std::string_view kSummaryHeader =
    "model,class,horizon_ms,drop_rate,pos_mean_mm,pos_mean_ci_low,pos_mean_ci_high,"
    "pos_median_mm,ori_mean_deg,ori_mean_ci_low,ori_mean_ci_high,ori_median_deg,repeats,"
    "failed_repeats";
inline constexpr std::string_view kRepeatsHeader =
    "model,class,horizon_ms,drop_rate,repeat,n,status,pos_median_mm,pos_mean_mm,"
    "ori_median_deg,ori_mean_deg";
inline constexpr std::string_view kSamplesHeader =
    "model,class,horizon_ms,drop_rate,repeat,trace,tick,t,pos_err_mm,ori_err_deg";
inline constexpr std::string_view kChunksHeader = "trace,first_tick,length,entropy_bits,class";

}  // namespace headpred
