#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "headpred/harness.hpp"

namespace headpred {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

void write_table(std::ostream& out, const ExperimentReport& report) {
  std::set<std::pair<int, double>> settings;
  std::vector<Variant> models;
  std::set<MotionClass> classes;
  for (const auto& row : report.aggregate_rows) {
    settings.emplace(row.horizon_ms, row.drop_rate);
    classes.insert(row.motion_class);
    if (std::find(models.begin(), models.end(), row.model) == models.end()) {
      models.push_back(row.model);
    }
  }
  std::map<std::tuple<Variant, MotionClass, int, double>, const AggregateRow*> index;
  for (const auto& row : report.aggregate_rows) {
    index[{row.model, row.motion_class, row.horizon_ms, row.drop_rate}] = &row;
  }

  char buf[128];
  for (const auto& [horizon, drop] : settings) {
    out << "horizon " << horizon << " ms, drop rate " << num(drop) << "\n";
    for (const bool position : {true, false}) {
      out << (position ? "  position error (mm)\n" : "  orientation error (deg)\n");
      std::snprintf(buf, sizeof buf, "  %-8s", "model");
      out << buf;
      for (const MotionClass c : classes) {
        std::snprintf(buf, sizeof buf, " %10s-med %9s-mean", std::string(to_string(c)).c_str(),
                      std::string(to_string(c)).c_str());
        out << buf;
      }
      out << "\n";
      for (const Variant m : models) {
        std::snprintf(buf, sizeof buf, "  %-8s", std::string(to_string(m)).c_str());
        out << buf;
        for (const MotionClass c : classes) {
          const auto it = index.find({m, c, horizon, drop});
          double median = std::numeric_limits<double>::quiet_NaN();
          double mean = median;
          if (it != index.end()) {
            median = position ? it->second->pos_median_mm : it->second->ori_median_deg;
            mean = position ? it->second->pos_mean_mm : it->second->ori_mean_deg;
          }
          std::snprintf(buf, sizeof buf, " %14.3f %14.3f", median, mean);
          out << buf;
        }
        out << "\n";
      }
    }
    out << "\n";
  }
}

}  // namespace

void emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + out_dir.string() + "': " + ec.message());

  {
    const auto path = out_dir / "summary.csv";
    auto out = open_output(path);
    out << kSummaryHeader << "\n";
    for (const auto& r : report.aggregate_rows) {
      out << to_string(r.model) << ',' << to_string(r.motion_class) << ',' << r.horizon_ms << ','
          << num(r.drop_rate) << ',' << num(r.pos_mean_mm) << ',' << num(r.pos_mean_ci_low) << ','
          << num(r.pos_mean_ci_high) << ',' << num(r.pos_median_mm) << ','
          << num(r.ori_mean_deg) << ',' << num(r.ori_mean_ci_low) << ','
          << num(r.ori_mean_ci_high) << ',' << num(r.ori_median_deg) << ',' << r.repeats << ','
          << r.failed_repeats << "\n";
    }
    finish(out, path);
  }
  {
    const auto path = out_dir / "repeats.csv";
    auto out = open_output(path);
    out << kRepeatsHeader << "\n";
    for (const auto& r : report.repeat_rows) {
      out << to_string(r.model) << ',' << to_string(r.motion_class) << ',' << r.horizon_ms << ','
          << num(r.drop_rate) << ',' << r.repeat << ',' << r.n << ','
          << (r.failed ? "failed" : "ok") << ',' << num(r.pos_median_mm) << ','
          << num(r.pos_mean_mm) << ',' << num(r.ori_median_deg) << ',' << num(r.ori_mean_deg)
          << "\n";
    }
    finish(out, path);
  }
  {
    const auto path = out_dir / "samples.csv";
    auto out = open_output(path);
    out << kSamplesHeader << "\n";
    for (const auto& s : report.samples) {
      out << to_string(s.model) << ',' << to_string(s.motion_class) << ',' << s.horizon_ms << ','
          << num(s.drop_rate) << ',' << s.repeat << ',' << s.trace << ',' << s.tick << ','
          << num(s.t) << ',' << num(s.e_pos) << ',' << num(s.e_ori) << "\n";
    }
    finish(out, path);
  }
  {
    const auto path = out_dir / "chunks.csv";
    auto out = open_output(path);
    out << kChunksHeader << "\n";
    for (const auto& c : report.chunks) {
      out << c.trace << ',' << c.first_tick << ',' << c.length << ',' << num(c.entropy) << ','
          << to_string(c.motion_class) << "\n";
    }
    finish(out, path);
  }
  {
    const auto path = out_dir / "table.txt";
    auto out = open_output(path);
    write_table(out, report);
    finish(out, path);
  }
}

}  // namespace headpred
