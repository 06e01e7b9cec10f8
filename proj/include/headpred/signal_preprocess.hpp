#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "headpred/pose.hpp"

namespace headpred {

/// One second-order section, normalized so that a0 = 1:
///   y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct BiquadCoeffs {
  double b0 = 1.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;

  /// Both poles strictly inside the unit circle.
  bool stable() const;
};

using BiquadCascade = std::vector<BiquadCoeffs>;

/// Digital Butterworth low-pass via the bilinear transform with frequency
/// prewarping. order must be 2 or 4; 0 < cutoff_hz < sample_hz / 2.
BiquadCascade design_butterworth_lowpass(int order, double cutoff_hz, double sample_hz);

/// |H(e^{j 2 pi f / fs})| of a cascade.
double magnitude_response(const BiquadCascade& cascade, double freq_hz, double sample_hz);

/// Transposed direct-form II filter over one scalar channel.
class ScalarLowPass {
 public:
  explicit ScalarLowPass(BiquadCascade cascade);

  double step(double x);
  /// Load the delay registers with the steady state for a constant input x.
  void prime(double x);
  void reset();

 private:
  BiquadCascade cascade_;
  std::vector<std::array<double, 2>> registers_;
};

/// Causal low-pass over the 7 pose channels (3 position + 4 quaternion).
///
/// Each incoming quaternion is flipped to the hemisphere of its predecessor
/// before filtering and the output quaternion is renormalized. Registers are
/// zero at construction and primed to the steady state of the first sample
/// so the stream does not start with a ramp from the origin.
class PoseLowPass {
 public:
  explicit PoseLowPass(const BiquadCascade& cascade);

  Pose filter(const Pose& pose);
  void reset();

 private:
  std::array<ScalarLowPass, 7> channels_;
  std::optional<Quaternion> last_input_q_;
};

/// Filter a whole trace with a fresh PoseLowPass.
std::vector<Pose> filter_trace(std::span<const Pose> trace, const BiquadCascade& cascade);

/// Fixed-length, non-overlapping segment of a trace.
struct MotionChunk {
  std::size_t first_index = 0;  // index of poses.front() in the source trace
  double start_time = 0.0;
  std::vector<Pose> poses;
};

/// Split into consecutive chunks of chunk_len samples; a trailing remainder
/// shorter than chunk_len is dropped. chunk_len must be at least 16.
std::vector<MotionChunk> chunk_trace(std::span<const Pose> trace, std::size_t chunk_len);

}  // namespace headpred
