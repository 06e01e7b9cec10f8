#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "headpred/harness.hpp"
#include "headpred/metrics.hpp"
#include "headpred/motion_classifier.hpp"
#include "headpred/predictors.hpp"
#include "headpred/signal_preprocess.hpp"
#include "headpred/so3.hpp"

namespace py = pybind11;
using namespace headpred;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Eigen::Vector4d to_vec(const Quaternion& q) { return {q.w, q.x, q.y, q.z}; }
Quaternion to_quat(const Eigen::Vector4d& v) { return {v(0), v(1), v(2), v(3)}; }

Array poses_to_array(const std::vector<Pose>& poses) {
  Array out({static_cast<py::ssize_t>(poses.size()), py::ssize_t{8}});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const auto& p = poses[i];
    const double row[8] = {p.t, p.p.x(), p.p.y(), p.p.z(), p.q.w, p.q.x, p.q.y, p.q.z};
    for (int c = 0; c < 8; ++c) a(static_cast<py::ssize_t>(i), c) = row[c];
  }
  return out;
}

std::vector<Pose> array_to_poses(const Array& arr) {
  if (arr.ndim() != 2 || arr.shape(1) != 8) {
    throw std::invalid_argument("trace array must have shape (n, 8): t, px, py, pz, qw, qx, qy, qz");
  }
  const auto a = arr.unchecked<2>();
  std::vector<Pose> poses(static_cast<std::size_t>(arr.shape(0)));
  for (py::ssize_t i = 0; i < arr.shape(0); ++i) {
    auto& p = poses[static_cast<std::size_t>(i)];
    p.t = a(i, 0);
    p.p = {a(i, 1), a(i, 2), a(i, 3)};
    p.q = Quaternion{a(i, 4), a(i, 5), a(i, 6), a(i, 7)}.normalized();
  }
  return poses;
}

Pose make_pose(double t, const Eigen::Vector3d& p, const Eigen::Vector4d& q) {
  return {t, p, to_quat(q).normalized()};
}

py::dict aggregate_to_dict(const AggregateRow& r) {
  py::dict d;
  d["model"] = std::string(to_string(r.model));
  d["class"] = std::string(to_string(r.motion_class));
  d["horizon_ms"] = r.horizon_ms;
  d["drop_rate"] = r.drop_rate;
  d["pos_mean_mm"] = r.pos_mean_mm;
  d["pos_mean_ci"] = py::make_tuple(r.pos_mean_ci_low, r.pos_mean_ci_high);
  d["pos_median_mm"] = r.pos_median_mm;
  d["ori_mean_deg"] = r.ori_mean_deg;
  d["ori_mean_ci"] = py::make_tuple(r.ori_mean_ci_low, r.ori_mean_ci_high);
  d["ori_median_deg"] = r.ori_median_deg;
  d["repeats"] = r.repeats;
  d["failed_repeats"] = r.failed_repeats;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Head-pose prediction filters, preprocessing and benchmark harness";

  py::register_exception<NumericalDegeneracy>(m, "NumericalDegeneracy", PyExc_RuntimeError);
  py::register_exception<ClockError>(m, "ClockError", PyExc_RuntimeError);
  py::register_exception<TraceFormatError>(m, "TraceFormatError", PyExc_ValueError);

  m.def("quat_exp", [](const Eigen::Vector3d& v) { return to_vec(quat_exp(v)); },
        py::arg("rotvec"), "Unit quaternion (w, x, y, z) of a rotation vector");
  m.def("quat_log", [](const Eigen::Vector4d& q) { return Eigen::Vector3d(quat_log(to_quat(q))); },
        py::arg("q"), "Rotation vector of a unit quaternion (w, x, y, z)");
  m.def("geodesic_distance",
        [](const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
          return geodesic_distance(to_quat(a), to_quat(b));
        },
        py::arg("q_pred"), py::arg("q_true"));
  m.def("right_jacobian", [](const Eigen::Vector3d& v) { return Eigen::Matrix3d(right_jacobian(v)); },
        py::arg("theta"));
  m.def("right_jacobian_inv",
        [](const Eigen::Vector3d& v) { return Eigen::Matrix3d(right_jacobian_inv(v)); },
        py::arg("theta"));

  m.def("position_error", &position_error, py::arg("p_pred"), py::arg("p_true"),
        "Euclidean position error in mm");
  m.def("orientation_error",
        [](const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
          return orientation_error(to_quat(a), to_quat(b));
        },
        py::arg("q_pred"), py::arg("q_true"), "Geodesic orientation error in degrees");

  m.def("butterworth_magnitude",
        [](int order, double cutoff_hz, double sample_hz, double freq_hz) {
          return magnitude_response(design_butterworth_lowpass(order, cutoff_hz, sample_hz),
                                    freq_hz, sample_hz);
        },
        py::arg("order"), py::arg("cutoff_hz"), py::arg("sample_hz"), py::arg("freq_hz"));
  m.def("filter_trace",
        [](const Array& trace, double cutoff_hz, int order, double sample_hz) {
          return poses_to_array(filter_trace(
              array_to_poses(trace), design_butterworth_lowpass(order, cutoff_hz, sample_hz)));
        },
        py::arg("trace"), py::arg("cutoff_hz") = 5.0, py::arg("order") = 2,
        py::arg("sample_hz") = 100.0);

  m.def("lz_entropy",
        [](const std::vector<std::uint32_t>& s) { return lz_entropy(s); }, py::arg("symbols"),
        "Lempel-Ziv entropy estimate in bits per sample");
  m.def("classify",
        [](double entropy, double h_low, double h_high) {
          ClassifierConfig c;
          c.h_low = h_low;
          c.h_high = h_high;
          return std::string(to_string(classify(entropy, c)));
        },
        py::arg("entropy"), py::arg("h_low") = ClassifierConfig{}.h_low,
        py::arg("h_high") = ClassifierConfig{}.h_high);
  m.def("label_chunk",
        [](const Array& chunk) {
          const auto label = label_chunk(array_to_poses(chunk), ClassifierConfig{});
          return py::make_tuple(label.entropy, std::string(to_string(label.motion_class)));
        },
        py::arg("chunk"), "(entropy, class) of a pose chunk with the default classifier");

  m.def("synthetic_trace",
        [](const std::string& profile, double duration, std::uint64_t seed) {
          return poses_to_array(
              generate_synthetic_trace({synth_kind_from_string(profile), duration, 100.0, seed}));
        },
        py::arg("profile"), py::arg("duration") = 60.0, py::arg("seed") = 1,
        "Synthetic 100 Hz trace as an (n, 8) array");
  m.def("load_trace", [](const std::filesystem::path& p) { return poses_to_array(load_trace(p)); },
        py::arg("path"));
  m.def("save_trace",
        [](const std::filesystem::path& p, const Array& trace) {
          save_trace(p, array_to_poses(trace));
        },
        py::arg("path"), py::arg("trace"));

  py::class_<Predictor>(m, "Predictor")
      .def(py::init([](const std::string& model, int horizon_ms) {
             FilterConfig c;
             c.variant = variant_from_string(model);
             if (horizon_ms <= 0 || horizon_ms % 10 != 0) {
               throw std::invalid_argument("horizon_ms must be a positive multiple of 10");
             }
             c.horizon_steps = horizon_ms / 10;
             return make_predictor(c);
           }),
           py::arg("model"), py::arg("horizon_ms") = 100)
      .def("step",
           [](Predictor& self, double t, const Eigen::Vector3d& p, const Eigen::Vector4d& q,
              bool received) { self.step(make_pose(t, p, q), received); },
           py::arg("t"), py::arg("p"), py::arg("q"), py::arg("received") = true)
      .def("predict",
           [](const Predictor& self) {
             const Pose p = self.predict();
             return py::make_tuple(p.t, Eigen::Vector3d(p.p), to_vec(p.q));
           },
           "(t, p, q) predicted horizon_ms past the filter time")
      .def_property_readonly("initialized", &Predictor::initialized)
      .def_property_readonly("healthy", &Predictor::healthy);

  m.def("bench",
        [](const std::vector<Array>& traces, const std::vector<std::string>& models,
           const std::vector<int>& horizons_ms, const std::vector<double>& drop_rates,
           int repeats, std::uint64_t seed) {
          ExperimentConfig c;
          c.models.clear();
          for (const auto& name : models) c.models.push_back(variant_from_string(name));
          c.horizons_ms = horizons_ms;
          c.drop_rates = drop_rates;
          c.repeats = repeats;
          c.master_seed = seed;
          c.keep_samples = false;
          std::vector<std::vector<Pose>> poses;
          for (const auto& t : traces) poses.push_back(array_to_poses(t));
          ExperimentReport report;
          {
            py::gil_scoped_release release;
            report = run_experiment(c, poses);
          }
          py::list rows;
          for (const auto& r : report.aggregate_rows) rows.append(aggregate_to_dict(r));
          return rows;
        },
        py::arg("traces"), py::arg("models") = std::vector<std::string>{"kf", "p3o3"},
        py::arg("horizons_ms") = std::vector<int>{100},
        py::arg("drop_rates") = std::vector<double>{0.0}, py::arg("repeats") = 1,
        py::arg("seed") = 1, "Aggregate rows of a benchmark grid as a list of dicts");
}
