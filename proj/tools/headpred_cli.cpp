#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "headpred/harness.hpp"
#include "headpred/metrics.hpp"
#include "headpred/signal_preprocess.hpp"

namespace {

using namespace headpred;

struct FilterOptions {
  double cutoff_hz = 5.0;
  int order = 2;
};

void add_filter_options(CLI::App* cmd, FilterOptions& opts) {
  cmd->add_option("--cutoff-hz", opts.cutoff_hz, "Butterworth cutoff frequency in Hz");
  cmd->add_option("--order", opts.order, "Butterworth order")->check(CLI::IsMember({2, 4}));
}

int run_synth(const std::string& profile, double duration, std::uint64_t seed,
              const std::string& out) {
  SynthProfile p;
  p.kind = synth_kind_from_string(profile);
  p.duration = duration;
  p.seed = seed;
  save_trace(out, generate_synthetic_trace(p));
  return 0;
}

int run_classify(const std::string& input, const ClassifierConfig& cc, std::size_t chunk_len,
                 const FilterOptions& fo) {
  cc.validate();
  const auto trace = load_trace(input);
  const auto filtered = filter_trace(trace, design_butterworth_lowpass(fo.order, fo.cutoff_hz, 100.0));
  std::printf("first_tick,start_time,entropy_bits,class\n");
  for (const auto& chunk : chunk_trace(filtered, chunk_len)) {
    const ChunkLabel label = label_chunk(chunk.poses, cc);
    std::printf("%zu,%.9g,%.9g,%s\n", chunk.first_index, chunk.start_time, label.entropy,
                std::string(to_string(label.motion_class)).c_str());
  }
  return 0;
}

int run_predict(const std::string& input, const std::string& model, int horizon_ms,
                double drop_rate, std::uint64_t seed, const FilterOptions& fo) {
  const auto trace = load_trace(input);
  const auto filtered = filter_trace(trace, design_butterworth_lowpass(fo.order, fo.cutoff_hz, 100.0));
  FilterConfig fc;
  fc.variant = variant_from_string(model);
  if (horizon_ms <= 0 || horizon_ms % 10 != 0) {
    throw std::invalid_argument("horizon must be a positive multiple of 10 ms");
  }
  fc.horizon_steps = horizon_ms / 10;
  const auto predictor = make_predictor(fc);
  DropRng rng(seed);

  std::vector<double> pos_err;
  std::vector<double> ori_err;
  std::printf("t,target_t,px,py,pz,qw,qx,qy,qz,received,pos_err_mm,ori_err_deg\n");
  for (std::size_t k = 0; k < filtered.size(); ++k) {
    const bool received = k == 0 || simulate_drop(rng, drop_rate);
    predictor->step(filtered[k], received);
    const Pose p = predictor->predict();
    const std::size_t target = k + static_cast<std::size_t>(fc.horizon_steps);
    double ep = std::numeric_limits<double>::quiet_NaN();
    double eo = ep;
    if (target < trace.size()) {
      ep = position_error(p.p, trace[target].p);
      eo = orientation_error(p.q, trace[target].q);
      pos_err.push_back(ep);
      ori_err.push_back(eo);
    }
    std::printf("%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%d,%.9g,%.9g\n", filtered[k].t, p.t,
                p.p.x(), p.p.y(), p.p.z(), p.q.w, p.q.x, p.q.y, p.q.z, received ? 1 : 0, ep, eo);
  }
  if (!pos_err.empty()) {
    const auto ps = summarize(pos_err);
    const auto os = summarize(ori_err);
    std::fprintf(stderr, "%s %d ms: position mean %.3f mm median %.3f mm, orientation mean %.3f deg median %.3f deg\n",
                 std::string(to_string(fc.variant)).c_str(), horizon_ms, ps.mean, ps.median, os.mean,
                 os.median);
  }
  return 0;
}

std::vector<Variant> parse_models(const std::vector<std::string>& names) {
  std::vector<Variant> models;
  for (const auto& n : names) models.push_back(variant_from_string(n));
  return models;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Head pose prediction benchmark"};
  app.require_subcommand(1);

  std::string profile;
  double duration = 60.0;
  std::uint64_t seed = 1;
  std::string out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic head-motion trace");
  synth->add_option("--profile", profile, "easy, medium or hard")
      ->required()
      ->check(CLI::IsMember({"easy", "medium", "hard"}));
  synth->add_option("--duration", duration, "Duration in seconds")->check(CLI::PositiveNumber);
  synth->add_option("--seed", seed, "Random seed");
  synth->add_option("--out", out, "Output trace file")->required();

  std::string input;
  ClassifierConfig cc;
  std::size_t chunk_len = 200;
  FilterOptions classify_filter;
  auto* classify_cmd = app.add_subcommand("classify", "Label trace chunks by LZ entropy");
  classify_cmd->add_option("--input", input, "Trace file")->required()->check(CLI::ExistingFile);
  classify_cmd->add_option("--h-low", cc.h_low, "Easy/Medium threshold in bits per sample");
  classify_cmd->add_option("--h-high", cc.h_high, "Medium/Hard threshold in bits per sample");
  classify_cmd->add_option("--cell-pos", cc.cell_size_pos, "Position cell size in meters");
  classify_cmd->add_option("--cell-rot", cc.cell_size_rot, "Rotation cell size in radians");
  classify_cmd->add_option("--chunk-len", chunk_len, "Chunk length in samples");
  add_filter_options(classify_cmd, classify_filter);

  std::string model = "p3o3";
  int horizon_ms = 100;
  double drop_rate = 0.0;
  std::uint64_t predict_seed = 1;
  FilterOptions predict_filter;
  auto* predict = app.add_subcommand("predict", "Run one predictor over a trace");
  predict->add_option("--input", input, "Trace file")->required()->check(CLI::ExistingFile);
  predict->add_option("--model", model, "kf, eskf, p2o2, p2o3 or p3o3")->required();
  predict->add_option("--horizon-ms", horizon_ms, "Prediction horizon in ms")->required();
  predict->add_option("--drop-rate", drop_rate, "Packet drop probability")
      ->check(CLI::Range(0.0, 1.0));
  predict->add_option("--seed", predict_seed, "Drop simulation seed");
  add_filter_options(predict, predict_filter);

  std::vector<std::string> inputs;
  std::vector<std::string> model_names{"kf", "eskf", "p2o2", "p2o3", "p3o3"};
  ExperimentConfig ec;
  std::string out_dir;
  bool no_samples = false;
  auto* bench = app.add_subcommand("bench", "Run the full benchmark grid");
  bench->add_option("--input", inputs, "Trace files")->required()->check(CLI::ExistingFile);
  bench->add_option("--models", model_names, "Models to evaluate")->delimiter(',');
  bench->add_option("--horizons", ec.horizons_ms, "Horizons in ms")->delimiter(',');
  bench->add_option("--drop-rates", ec.drop_rates, "Packet drop rates")->delimiter(',');
  bench->add_option("--repeats", ec.repeats, "Repeats per cell")->check(CLI::PositiveNumber);
  bench->add_option("--seed", ec.master_seed, "Master seed");
  bench->add_option("--out", out_dir, "Output directory")->required();
  bench->add_option("--cutoff-hz", ec.cutoff_hz, "Butterworth cutoff frequency in Hz");
  bench->add_option("--order", ec.filter_order, "Butterworth order")->check(CLI::IsMember({2, 4}));
  bench->add_option("--chunk-len", ec.chunk_len, "Chunk length in samples");
  bench->add_option("--h-low", ec.classifier.h_low, "Easy/Medium threshold in bits per sample");
  bench->add_option("--h-high", ec.classifier.h_high, "Medium/Hard threshold in bits per sample");
  bench->add_option("--threads", ec.threads, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_flag("--no-samples", no_samples, "Skip per-tick samples.csv rows");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return run_synth(profile, duration, seed, out);
    if (classify_cmd->parsed()) return run_classify(input, cc, chunk_len, classify_filter);
    if (predict->parsed()) {
      return run_predict(input, model, horizon_ms, drop_rate, predict_seed, predict_filter);
    }
    if (bench->parsed()) {
      ec.models = parse_models(model_names);
      ec.keep_samples = !no_samples;
      std::vector<std::vector<Pose>> traces;
      for (const auto& path : inputs) traces.push_back(load_trace(path));
      emit_report(run_experiment(ec, traces), out_dir);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "headpred: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
