#include "headpred/motion_classifier.hpp"

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace headpred {

std::string_view to_string(MotionClass c) {
  switch (c) {
    case MotionClass::Easy:
      return "easy";
    case MotionClass::Medium:
      return "medium";
    case MotionClass::Hard:
      return "hard";
  }
  return "unknown";
}

MotionClass motion_class_from_string(std::string_view name) {
  if (name == "easy") return MotionClass::Easy;
  if (name == "medium") return MotionClass::Medium;
  if (name == "hard") return MotionClass::Hard;
  throw std::invalid_argument("unknown motion class '" + std::string(name) + "'");
}

void ClassifierConfig::validate() const {
  if (!(cell_size_pos > 0.0) || !(cell_size_rot > 0.0)) {
    throw std::invalid_argument("cell sizes must be positive");
  }
  if (!(h_low > 0.0) || !(h_low < h_high)) {
    throw std::invalid_argument("entropy thresholds must satisfy 0 < h_low < h_high");
  }
}

SymbolSequence discretize_chunk(std::span<const Pose> poses, const ClassifierConfig& config) {
  config.validate();
  using Cell = std::array<std::int64_t, 6>;
  auto bin = [](double value, double size) {
    return static_cast<std::int64_t>(std::floor(value / size));
  };

  std::map<Cell, std::uint32_t> ids;
  SymbolSequence symbols;
  symbols.reserve(poses.size());
  for (const auto& pose : poses) {
    const RotVec r = quat_log(pose.q);
    const Cell cell{bin(pose.p.x(), config.cell_size_pos), bin(pose.p.y(), config.cell_size_pos),
                    bin(pose.p.z(), config.cell_size_pos), bin(r.x(), config.cell_size_rot),
                    bin(r.y(), config.cell_size_rot),      bin(r.z(), config.cell_size_rot)};
    const auto [it, inserted] = ids.try_emplace(cell, static_cast<std::uint32_t>(ids.size()));
    symbols.push_back(it->second);
  }
  return symbols;
}

std::vector<std::size_t> lz_match_lengths(std::span<const std::uint32_t> s) {
  const std::size_t n = s.size();
  // Row i of the longest-common-extension table, built from the back:
  // lce[j] = length of the common prefix of the suffixes at i and j.
  std::vector<std::size_t> next(n + 1, 0);
  std::vector<std::size_t> cur(n + 1, 0);
  std::vector<std::size_t> lambda(n, 1);
  for (std::size_t i = n; i-- > 0;) {
    std::size_t longest = 0;
    for (std::size_t j = 0; j < i; ++j) {
      cur[j] = (s[i] == s[j]) ? next[j + 1] + 1 : 0;
      longest = std::max(longest, cur[j]);
    }
    lambda[i] = longest + 1;
    std::swap(cur, next);
  }
  return lambda;
}

double lz_entropy(std::span<const std::uint32_t> s) {
  if (s.size() < 2) {
    throw std::invalid_argument("lz_entropy needs at least 2 symbols");
  }
  const double t = static_cast<double>(s.size());
  double sum = 0.0;
  for (const std::size_t lambda : lz_match_lengths(s)) {
    sum += std::log2(t / static_cast<double>(lambda));
  }
  return sum / t;
}

MotionClass classify(double entropy, const ClassifierConfig& config) {
  if (entropy < config.h_low) return MotionClass::Easy;
  if (entropy < config.h_high) return MotionClass::Medium;
  return MotionClass::Hard;
}

ChunkLabel label_chunk(std::span<const Pose> poses, const ClassifierConfig& config) {
  ChunkLabel label;
  label.entropy = lz_entropy(discretize_chunk(poses, config));
  label.motion_class = classify(label.entropy, config);
  return label;
}

}  // namespace headpred
