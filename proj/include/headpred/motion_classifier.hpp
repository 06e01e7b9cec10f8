#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "headpred/pose.hpp"

namespace headpred {

using SymbolSequence = std::vector<std::uint32_t>;

enum class MotionClass { Easy = 0, Medium = 1, Hard = 2 };

std::string_view to_string(MotionClass c);
MotionClass motion_class_from_string(std::string_view name);

struct ClassifierConfig {
  double cell_size_pos = 0.05;  // m
  double cell_size_rot = 0.1;   // rad; infinity gives position-only symbols
  double h_low = 5.0;           // bits/sample
  double h_high = 6.3;          // bits/sample

  /// Throws std::invalid_argument on non-positive cells or unordered thresholds.
  void validate() const;
};

/// Map each pose to a grid cell over (position, rotation vector) and label
/// cells by order of first appearance.
SymbolSequence discretize_chunk(std::span<const Pose> poses, const ClassifierConfig& config);

/// lambda_t for every t (0-based): one more than the longest prefix of the
/// suffix at t that also starts at some earlier index. lambda_0 = 1.
std::vector<std::size_t> lz_match_lengths(std::span<const std::uint32_t> s);

/// Lempel-Ziv entropy estimate in bits per sample:
///   H = (1/T) * sum_t log2(T / lambda_t)
/// Requires T >= 2.
double lz_entropy(std::span<const std::uint32_t> s);

MotionClass classify(double entropy, const ClassifierConfig& config);

/// Convenience: discretize, score and classify one chunk.
struct ChunkLabel {
  double entropy = 0.0;
  MotionClass motion_class = MotionClass::Easy;
};
ChunkLabel label_chunk(std::span<const Pose> poses, const ClassifierConfig& config);

}  // namespace headpred
