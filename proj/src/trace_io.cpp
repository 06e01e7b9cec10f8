#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "headpred/harness.hpp"

namespace headpred {

namespace {

constexpr double kUnitTolerance = 0.5;
constexpr double kSpacingTolerance = 0.10;

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_field(const std::string& field, std::size_t line) {
  const std::string f = trim(field);
  if (f.empty()) throw TraceFormatError(line, "empty field");
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(f.c_str(), &end);
  if (end != f.c_str() + f.size() || errno == ERANGE || !std::isfinite(value)) {
    throw TraceFormatError(line, "not a finite number: '" + f + "'");
  }
  return value;
}

}  // namespace

TraceFormatError::TraceFormatError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::vector<Pose> parse_trace(std::istream& in, double sample_hz) {
  std::string text;
  std::size_t line_no = 1;
  if (!std::getline(in, text) || trim(text) != kTraceHeader) {
    throw TraceFormatError(line_no, "expected header '" + std::string(kTraceHeader) + "'");
  }
  const double nominal = 1.0 / sample_hz;

  std::vector<Pose> poses;
  while (std::getline(in, text)) {
    ++line_no;
    if (trim(text).empty()) continue;

    std::vector<double> v;
    std::stringstream row(text);
    std::string field;
    while (std::getline(row, field, ',')) v.push_back(parse_field(field, line_no));
    if (v.size() != 8) {
      throw TraceFormatError(line_no, "expected 8 fields, got " + std::to_string(v.size()));
    }

    Pose pose;
    pose.t = v[0];
    pose.p = {v[1], v[2], v[3]};
    Quaternion q{v[4], v[5], v[6], v[7]};
    if (std::abs(q.norm() - 1.0) > kUnitTolerance) {
      throw TraceFormatError(line_no, "quaternion norm " + std::to_string(q.norm()) +
                                          " is too far from 1 to renormalize");
    }
    q = q.normalized();

    if (!poses.empty()) {
      const double gap = pose.t - poses.back().t;
      if (!(gap > 0.0)) throw TraceFormatError(line_no, "timestamp does not increase");
      if (std::abs(gap - nominal) > kSpacingTolerance * nominal) {
        throw TraceFormatError(line_no, "sample spacing " + std::to_string(gap) +
                                            " s is off the nominal rate");
      }
      if (poses.back().q.dot(q) < 0.0) q = q.negated();
    } else if (pose.t < 0.0) {
      throw TraceFormatError(line_no, "negative timestamp");
    }
    pose.q = q;
    poses.push_back(pose);
  }
  return poses;
}

std::vector<Pose> load_trace(const std::filesystem::path& path, double sample_hz) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace '" + path.string() + "'");
  try {
    return parse_trace(in, sample_hz);
  } catch (const TraceFormatError& e) {
    throw TraceFormatError(e.line(), path.string() + ": " + e.what());
  }
}

void save_trace(const std::filesystem::path& path, std::span<const Pose> trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace '" + path.string() + "'");
  out << kTraceHeader << '\n';
  char buf[256];
  for (const auto& pose : trace) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", pose.t,
                  pose.p.x(), pose.p.y(), pose.p.z(), pose.q.w, pose.q.x, pose.q.y, pose.q.z);
    out << buf;
  }
  if (!out) throw std::runtime_error("failed writing trace '" + path.string() + "'");
}

}  // namespace headpred
