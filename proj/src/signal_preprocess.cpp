#include "headpred/signal_preprocess.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace headpred {

bool BiquadCoeffs::stable() const { return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2; }

BiquadCascade design_butterworth_lowpass(int order, double cutoff_hz, double sample_hz) {
  if (order != 2 && order != 4) {
    throw std::invalid_argument("Butterworth order must be 2 or 4");
  }
  if (!(sample_hz > 0.0) || !(cutoff_hz > 0.0) || !(cutoff_hz < sample_hz / 2.0)) {
    throw std::invalid_argument("cutoff must lie strictly between 0 and the Nyquist frequency");
  }
  // Prewarped analog cutoff, normalized so the bilinear map is s = (z-1)/(z+1).
  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_hz);
  const double k2 = k * k;

  BiquadCascade cascade;
  for (int i = 1; i <= order / 2; ++i) {
    // Quality factor of the i-th conjugate pole pair of the analog prototype.
    const double q = 1.0 / (2.0 * std::sin((2 * i - 1) * std::numbers::pi / (2.0 * order)));
    const double norm = 1.0 / (1.0 + k / q + k2);
    BiquadCoeffs c;
    c.b0 = k2 * norm;
    c.b1 = 2.0 * c.b0;
    c.b2 = c.b0;
    c.a1 = 2.0 * (k2 - 1.0) * norm;
    c.a2 = (1.0 - k / q + k2) * norm;
    cascade.push_back(c);
  }
  return cascade;
}

double magnitude_response(const BiquadCascade& cascade, double freq_hz, double sample_hz) {
  const std::complex<double> z1 =
      std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / sample_hz);  // z^-1
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h = 1.0;
  for (const auto& c : cascade) {
    h *= (c.b0 + c.b1 * z1 + c.b2 * z2) / (1.0 + c.a1 * z1 + c.a2 * z2);
  }
  return std::abs(h);
}

ScalarLowPass::ScalarLowPass(BiquadCascade cascade)
    : cascade_(std::move(cascade)), registers_(cascade_.size(), {0.0, 0.0}) {}

double ScalarLowPass::step(double x) {
  for (std::size_t i = 0; i < cascade_.size(); ++i) {
    const auto& c = cascade_[i];
    auto& s = registers_[i];
    const double y = c.b0 * x + s[0];
    s[0] = c.b1 * x - c.a1 * y + s[1];
    s[1] = c.b2 * x - c.a2 * y;
    x = y;
  }
  return x;
}

void ScalarLowPass::prime(double x) {
  for (std::size_t i = 0; i < cascade_.size(); ++i) {
    const auto& c = cascade_[i];
    const double y = x * (c.b0 + c.b1 + c.b2) / (1.0 + c.a1 + c.a2);
    registers_[i][1] = c.b2 * x - c.a2 * y;
    registers_[i][0] = (c.b1 + c.b2) * x - (c.a1 + c.a2) * y;
    x = y;
  }
}

void ScalarLowPass::reset() {
  for (auto& s : registers_) s = {0.0, 0.0};
}

PoseLowPass::PoseLowPass(const BiquadCascade& cascade)
    : channels_{ScalarLowPass(cascade), ScalarLowPass(cascade), ScalarLowPass(cascade),
                ScalarLowPass(cascade), ScalarLowPass(cascade), ScalarLowPass(cascade),
                ScalarLowPass(cascade)} {}

Pose PoseLowPass::filter(const Pose& pose) {
  Quaternion q = pose.q;
  if (last_input_q_ && last_input_q_->dot(q) < 0.0) q = q.negated();

  const std::array<double, 7> in{pose.p.x(), pose.p.y(), pose.p.z(), q.w, q.x, q.y, q.z};
  if (!last_input_q_) {
    for (std::size_t i = 0; i < in.size(); ++i) channels_[i].prime(in[i]);
  }
  last_input_q_ = q;

  std::array<double, 7> out;
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = channels_[i].step(in[i]);

  Pose result;
  result.t = pose.t;
  result.p = {out[0], out[1], out[2]};
  result.q = Quaternion{out[3], out[4], out[5], out[6]}.normalized();
  return result;
}

void PoseLowPass::reset() {
  for (auto& c : channels_) c.reset();
  last_input_q_.reset();
}

std::vector<Pose> filter_trace(std::span<const Pose> trace, const BiquadCascade& cascade) {
  PoseLowPass lp(cascade);
  std::vector<Pose> out;
  out.reserve(trace.size());
  for (const auto& pose : trace) out.push_back(lp.filter(pose));
  return out;
}

std::vector<MotionChunk> chunk_trace(std::span<const Pose> trace, std::size_t chunk_len) {
  if (chunk_len < 16) {
    throw std::invalid_argument("chunk length must be at least 16 samples");
  }
  std::vector<MotionChunk> chunks;
  for (std::size_t start = 0; start + chunk_len <= trace.size(); start += chunk_len) {
    MotionChunk chunk;
    chunk.first_index = start;
    chunk.start_time = trace[start].t;
    chunk.poses.assign(trace.begin() + static_cast<std::ptrdiff_t>(start),
                       trace.begin() + static_cast<std::ptrdiff_t>(start + chunk_len));
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

}  // namespace headpred
