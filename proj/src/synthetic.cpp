#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "headpred/harness.hpp"

namespace headpred {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Sinusoid {
  double amplitude = 0.0;
  double freq_hz = 0.0;
  double phase = 0.0;

  double operator()(double t) const { return amplitude * std::sin(kTwoPi * freq_hz * t + phase); }
};

struct SinusoidSum {
  std::vector<Sinusoid> terms;

  double operator()(double t) const {
    double s = 0.0;
    for (const auto& term : terms) s += term(t);
    return s;
  }
};

// `count` sinusoids with total amplitude max_total and frequencies in [f_lo, f_hi].
SinusoidSum random_sinusoids(std::mt19937_64& rng, int count, double max_total, double f_lo,
                             double f_hi) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SinusoidSum sum;
  std::vector<double> weights;
  double total = 0.0;
  for (int i = 0; i < count; ++i) {
    weights.push_back(0.3 + 0.7 * unit(rng));
    total += weights.back();
  }
  const double scale = max_total * (0.6 + 0.4 * unit(rng)) / total;
  for (int i = 0; i < count; ++i) {
    Sinusoid s;
    s.amplitude = weights[i] * scale;
    s.freq_hz = f_lo + (f_hi - f_lo) * unit(rng);
    s.phase = kTwoPi * unit(rng);
    sum.terms.push_back(s);
  }
  return sum;
}

// Yaw about z, then pitch about y, then roll about x, all in the body frame.
Quaternion from_euler(double yaw, double pitch, double roll) {
  return (quat_exp({0.0, 0.0, yaw}) * quat_exp({0.0, pitch, 0.0}) * quat_exp({roll, 0.0, 0.0}))
      .normalized()
      .canonical();
}

// Smooth bounded random walk sampled on the trace grid: an Ornstein-Uhlenbeck
// velocity integrated into a weakly mean-reverting position.
std::vector<double> smooth_random_walk(std::mt19937_64& rng, std::size_t n, double dt,
                                       double sigma_v, double tau_v, double tau_x) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(n, 0.0);
  double vel = 0.0;
  double pos = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = pos;
    vel += -vel / tau_v * dt + sigma_v * std::sqrt(dt) * normal(rng);
    pos += vel * dt - pos / tau_x * dt;
  }
  return x;
}

// Minimum-jerk blend 0 -> 1 over s in [0, 1].
double min_jerk(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

// Sequence of minimum-jerk moves between random targets with alternating
// direction, evaluated on the sample grid.
std::vector<double> piecewise_moves(std::mt19937_64& rng, std::size_t n, double dt,
                                    double min_step, double max_step, double limit,
                                    double min_dur, double max_dur) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(n, 0.0);
  double from = 0.0;
  double direction = unit(rng) < 0.5 ? -1.0 : 1.0;
  std::size_t i = 0;
  while (i < n) {
    const double duration = min_dur + (max_dur - min_dur) * unit(rng);
    double step = direction * (min_step + (max_step - min_step) * unit(rng));
    if (std::abs(from + step) > limit) step = -step;
    const double to = std::clamp(from + step, -limit, limit);
    const auto len = static_cast<std::size_t>(std::max(1.0, std::round(duration / dt)));
    for (std::size_t k = 0; k < len && i < n; ++k, ++i) {
      x[i] = from + (to - from) * min_jerk(static_cast<double>(k) / static_cast<double>(len));
    }
    from = to;
    direction = -direction;
  }
  return x;
}

}  // namespace

SynthKind synth_kind_from_string(std::string_view name) {
  if (name == "easy") return SynthKind::Easy;
  if (name == "medium") return SynthKind::Medium;
  if (name == "hard") return SynthKind::Hard;
  throw std::invalid_argument("unknown profile '" + std::string(name) + "'");
}

std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::Easy:
      return "easy";
    case SynthKind::Medium:
      return "medium";
    case SynthKind::Hard:
      return "hard";
  }
  return "unknown";
}

std::vector<Pose> generate_synthetic_trace(const SynthProfile& profile) {
  if (!(profile.duration > 0.0) || !(profile.sample_hz > 0.0)) {
    throw std::invalid_argument("synthetic profile needs positive duration and rate");
  }
  const auto n = static_cast<std::size_t>(std::llround(profile.duration * profile.sample_hz));
  const double dt = 1.0 / profile.sample_hz;
  std::mt19937_64 rng(profile.seed * 0x9E3779B97F4A7C15ULL + static_cast<int>(profile.kind));

  std::vector<Pose> trace(n);
  for (std::size_t i = 0; i < n; ++i) trace[i].t = static_cast<double>(i) * dt;

  switch (profile.kind) {
    case SynthKind::Easy: {
      std::array<SinusoidSum, 3> pos;
      std::array<SinusoidSum, 3> rot;
      for (auto& s : pos) s = random_sinusoids(rng, 2, 0.05, 0.05, 0.5);
      for (auto& s : rot) s = random_sinusoids(rng, 2, 10.0 * kDeg, 0.05, 0.5);
      for (auto& pose : trace) {
        const double t = pose.t;
        pose.p = {pos[0](t), pos[1](t), pos[2](t)};
        pose.q = from_euler(rot[0](t), rot[1](t), rot[2](t));
      }
      break;
    }
    case SynthKind::Medium: {
      std::array<SinusoidSum, 3> pos;
      std::array<SinusoidSum, 3> rot;
      for (auto& s : pos) s = random_sinusoids(rng, 3, 0.03, 0.3, 2.0);
      for (auto& s : rot) s = random_sinusoids(rng, 3, 8.0 * kDeg, 0.3, 2.0);
      std::array<std::vector<double>, 6> walk;
      for (int a = 0; a < 3; ++a) walk[a] = smooth_random_walk(rng, n, dt, 0.15, 0.2, 3.0);
      for (int a = 3; a < 6; ++a) walk[a] = smooth_random_walk(rng, n, dt, 0.8, 0.2, 3.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = trace[i].t;
        trace[i].p = {pos[0](t) + walk[0][i], pos[1](t) + walk[1][i], pos[2](t) + walk[2][i]};
        trace[i].q = from_euler(rot[0](t) + walk[3][i], rot[1](t) + walk[4][i],
                                rot[2](t) + walk[5][i]);
      }
      break;
    }
    case SynthKind::Hard: {
      const auto yaw = piecewise_moves(rng, n, dt, 30.0 * kDeg, 90.0 * kDeg, 90.0 * kDeg, 0.15, 0.5);
      const auto pitch = piecewise_moves(rng, n, dt, 10.0 * kDeg, 35.0 * kDeg, 40.0 * kDeg, 0.15, 0.5);
      const auto lateral = piecewise_moves(rng, n, dt, 0.05, 0.2, 0.25, 0.15, 0.5);
      const auto forward = piecewise_moves(rng, n, dt, 0.03, 0.12, 0.15, 0.15, 0.5);
      std::array<SinusoidSum, 3> jitter_pos;
      std::array<SinusoidSum, 3> jitter_rot;
      for (auto& s : jitter_pos) s = random_sinusoids(rng, 2, 0.004, 2.0, 4.0);
      for (auto& s : jitter_rot) s = random_sinusoids(rng, 2, 2.0 * kDeg, 2.0, 4.0);
      // The head rotates about the neck, 10 cm below and behind its center.
      const Eigen::Vector3d neck_offset(0.08, 0.0, 0.06);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = trace[i].t;
        const Quaternion q = from_euler(yaw[i] + jitter_rot[0](t), pitch[i] + jitter_rot[1](t),
                                        jitter_rot[2](t));
        const Eigen::Vector3d base(forward[i] + jitter_pos[0](t), lateral[i] + jitter_pos[1](t),
                                   jitter_pos[2](t));
        trace[i].p = base + q.to_matrix() * neck_offset - neck_offset;
        trace[i].q = q;
      }
      break;
    }
  }
  return trace;
}

}  // namespace headpred
