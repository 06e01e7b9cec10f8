#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "headpred/harness.hpp"
#include "headpred/metrics.hpp"
#include "headpred/signal_preprocess.hpp"

namespace headpred {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t value) {
  std::uint64_t s = h ^ value;
  return splitmix64(s);
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int horizon_steps(int horizon_ms, double sample_hz) {
  const double steps = horizon_ms * sample_hz / 1000.0;
  const double rounded = std::round(steps);
  if (rounded < 1.0 || std::abs(steps - rounded) > 1e-6) {
    throw std::invalid_argument("horizon " + std::to_string(horizon_ms) +
                                " ms is not a positive whole number of samples");
  }
  return static_cast<int>(rounded);
}

// Run fn(i) for i in [0, count) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct JobResult {
  bool failed = false;
  std::vector<ErrorSample> samples;
};

}  // namespace

DropRng::DropRng(std::uint64_t seed) : state_(seed) {}

double DropRng::uniform() {
  // 53 random bits mapped to bin centers, so 0 and 1 are never produced.
  const std::uint64_t bits = splitmix64(state_) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

bool simulate_drop(DropRng& rng, double drop_rate) {
  if (!(drop_rate >= 0.0 && drop_rate <= 1.0)) {
    throw std::invalid_argument("drop rate must lie in [0, 1]");
  }
  return rng.uniform() > drop_rate;
}

std::uint64_t cell_seed(std::uint64_t master_seed, Variant model, int horizon_ms,
                        double drop_rate, int repeat, std::size_t trace_index) {
  std::uint64_t h = mix(0x6A09E667F3BCC909ULL, master_seed);
  h = mix(h, static_cast<std::uint64_t>(model));
  h = mix(h, static_cast<std::uint64_t>(horizon_ms));
  h = mix(h, std::bit_cast<std::uint64_t>(drop_rate));
  h = mix(h, static_cast<std::uint64_t>(repeat));
  return mix(h, trace_index);
}

void ExperimentConfig::validate() const {
  if (models.empty()) throw std::invalid_argument("no models selected");
  if (horizons_ms.empty()) throw std::invalid_argument("no horizons selected");
  if (drop_rates.empty()) throw std::invalid_argument("no drop rates selected");
  if (repeats < 1) throw std::invalid_argument("repeats must be at least 1");
  for (const double d : drop_rates) {
    if (!(d >= 0.0 && d <= 1.0)) throw std::invalid_argument("drop rate must lie in [0, 1]");
  }
  for (const int h : horizons_ms) horizon_steps(h, sample_hz);
  if (chunk_len < 16) throw std::invalid_argument("chunk length must be at least 16 samples");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence level must lie in (0, 1)");
  }
  classifier.validate();
}

std::vector<ErrorSample> run_filter_on_trace(std::span<const Pose> filtered,
                                             std::span<const Pose> truth,
                                             std::span<const std::optional<MotionClass>> tick_class,
                                             const FilterConfig& filter, double drop_rate,
                                             std::uint64_t seed) {
  if (filtered.size() != truth.size() || tick_class.size() != truth.size()) {
    throw std::invalid_argument("filtered stream, ground truth and labels must align");
  }
  const auto predictor = make_predictor(filter);
  DropRng rng(seed);
  const auto n = truth.size();
  const auto steps = static_cast<std::size_t>(filter.horizon_steps);
  const int horizon_ms = static_cast<int>(std::lround(filter.horizon_steps * filter.dt * 1000.0));

  std::vector<ErrorSample> samples;
  for (std::size_t k = 0; k < n; ++k) {
    const bool received = (k == 0) || simulate_drop(rng, drop_rate);
    predictor->step(filtered[k], received);
    if (k + steps >= n || !tick_class[k]) continue;

    const Pose predicted = predictor->predict();
    const Pose& actual = truth[k + steps];
    ErrorSample s;
    s.model = filter.variant;
    s.motion_class = *tick_class[k];
    s.horizon_ms = horizon_ms;
    s.drop_rate = drop_rate;
    s.tick = k;
    s.t = truth[k].t;
    s.e_pos = position_error(predicted.p, actual.p);
    s.e_ori = orientation_error(predicted.q, actual.q);
    samples.push_back(s);
  }
  return samples;
}

ExperimentReport run_experiment(const ExperimentConfig& config,
                                std::span<const std::vector<Pose>> traces) {
  config.validate();
  if (traces.empty()) throw std::invalid_argument("run_experiment needs at least one trace");

  const BiquadCascade cascade =
      design_butterworth_lowpass(config.filter_order, config.cutoff_hz, config.sample_hz);

  ExperimentReport report;
  std::vector<std::vector<Pose>> filtered;
  std::vector<std::vector<std::optional<MotionClass>>> labels;
  bool present[3] = {false, false, false};
  for (std::size_t ti = 0; ti < traces.size(); ++ti) {
    filtered.push_back(filter_trace(traces[ti], cascade));
    std::vector<std::optional<MotionClass>> tick_class(traces[ti].size());
    for (const auto& chunk : chunk_trace(filtered.back(), config.chunk_len)) {
      const ChunkLabel label = label_chunk(chunk.poses, config.classifier);
      report.chunks.push_back(
          {ti, chunk.first_index, chunk.poses.size(), label.entropy, label.motion_class});
      present[static_cast<int>(label.motion_class)] = true;
      for (std::size_t k = 0; k < chunk.poses.size(); ++k) {
        tick_class[chunk.first_index + k] = label.motion_class;
      }
    }
    labels.push_back(std::move(tick_class));
  }
  std::vector<MotionClass> classes;
  for (int c = 0; c < 3; ++c) {
    if (present[c]) classes.push_back(static_cast<MotionClass>(c));
  }

  const double dt = 1.0 / config.sample_hz;
  const auto n_traces = traces.size();
  const auto n_repeats = static_cast<std::size_t>(config.repeats);

  // One group per (model, horizon, drop rate); its jobs are repeats x traces.
  for (const Variant model : config.models) {
    for (const int horizon_ms : config.horizons_ms) {
      for (const double drop_rate : config.drop_rates) {
        FilterConfig fc;
        fc.variant = model;
        fc.dt = dt;
        fc.horizon_steps = horizon_steps(horizon_ms, config.sample_hz);

        std::vector<JobResult> jobs(n_repeats * n_traces);
        parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
          const auto repeat = static_cast<int>(j / n_traces);
          const std::size_t ti = j % n_traces;
          const auto seed = cell_seed(config.master_seed, model, horizon_ms, drop_rate, repeat, ti);
          try {
            jobs[j].samples =
                run_filter_on_trace(filtered[ti], traces[ti], labels[ti], fc, drop_rate, seed);
            for (auto& s : jobs[j].samples) {
              s.repeat = repeat;
              s.trace = ti;
            }
          } catch (const NumericalDegeneracy&) {
            jobs[j].failed = true;
          }
        });

        for (const MotionClass cls : classes) {
          std::vector<double> repeat_pos_means;
          std::vector<double> repeat_ori_means;
          std::vector<double> pooled_pos;
          std::vector<double> pooled_ori;
          int failed_repeats = 0;
          for (std::size_t r = 0; r < n_repeats; ++r) {
            RepeatRow row;
            row.model = model;
            row.motion_class = cls;
            row.horizon_ms = horizon_ms;
            row.drop_rate = drop_rate;
            row.repeat = static_cast<int>(r);
            std::vector<double> pos;
            std::vector<double> ori;
            for (std::size_t ti = 0; ti < n_traces; ++ti) {
              const JobResult& job = jobs[r * n_traces + ti];
              row.failed = row.failed || job.failed;
              for (const auto& s : job.samples) {
                if (s.motion_class != cls) continue;
                pos.push_back(s.e_pos);
                ori.push_back(s.e_ori);
              }
            }
            row.n = row.failed ? 0 : pos.size();
            if (row.failed || pos.empty()) {
              row.pos_median_mm = row.pos_mean_mm = row.ori_median_deg = row.ori_mean_deg = kNaN;
              if (row.failed) ++failed_repeats;
            } else {
              const SummaryStats ps = summarize(pos, config.confidence);
              const SummaryStats os = summarize(ori, config.confidence);
              row.pos_median_mm = ps.median;
              row.pos_mean_mm = ps.mean;
              row.ori_median_deg = os.median;
              row.ori_mean_deg = os.mean;
              repeat_pos_means.push_back(ps.mean);
              repeat_ori_means.push_back(os.mean);
              pooled_pos.insert(pooled_pos.end(), pos.begin(), pos.end());
              pooled_ori.insert(pooled_ori.end(), ori.begin(), ori.end());
            }
            report.repeat_rows.push_back(row);
          }

          AggregateRow agg;
          agg.model = model;
          agg.motion_class = cls;
          agg.horizon_ms = horizon_ms;
          agg.drop_rate = drop_rate;
          agg.repeats = config.repeats;
          agg.failed_repeats = failed_repeats;
          if (repeat_pos_means.empty()) {
            agg.pos_mean_mm = agg.pos_mean_ci_low = agg.pos_mean_ci_high = agg.pos_median_mm = kNaN;
            agg.ori_mean_deg = agg.ori_mean_ci_low = agg.ori_mean_ci_high = agg.ori_median_deg = kNaN;
          } else {
            const SummaryStats pm = summarize(repeat_pos_means, config.confidence);
            const SummaryStats om = summarize(repeat_ori_means, config.confidence);
            agg.pos_mean_mm = pm.mean;
            agg.pos_mean_ci_low = pm.ci_low;
            agg.pos_mean_ci_high = pm.ci_high;
            agg.ori_mean_deg = om.mean;
            agg.ori_mean_ci_low = om.ci_low;
            agg.ori_mean_ci_high = om.ci_high;
            agg.pos_median_mm = summarize(pooled_pos, config.confidence).median;
            agg.ori_median_deg = summarize(pooled_ori, config.confidence).median;
          }
          report.aggregate_rows.push_back(agg);
        }

        if (config.keep_samples) {
          for (auto& job : jobs) {
            report.samples.insert(report.samples.end(), job.samples.begin(), job.samples.end());
          }
        }
      }
    }
  }
  return report;
}

}  // namespace headpred
