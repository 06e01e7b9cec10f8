#pragma once

#include <Eigen/Dense>

#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>

#include "headpred/pose.hpp"
#include "headpred/so3.hpp"

namespace headpred {

/// Filter family under comparison. The PsudoESKF variants are named by the
/// highest derivative carried for position (p) and orientation (o).
enum class Variant { KF, ESKF, P2O2, P2O3, P3O3 };

std::string_view to_string(Variant v);
/// Accepts "kf", "eskf", "p2o2", "p2o3", "p3o3" in any case.
Variant variant_from_string(std::string_view name);

/// Innovation covariance too ill-conditioned to invert.
class NumericalDegeneracy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Measurement timestamp does not advance the filter clock.
class ClockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FilterConfig {
  Variant variant = Variant::P3O3;
  double dt = 0.01;        // s
  int horizon_steps = 10;  // N, published pose is N*dt ahead
  int diff_window = 0;     // samples for pseudo-derivatives; 0 means order + 1
  bool exact_reset = false;  // use G = I - 0.5[dtheta]x when resetting P

  int pos_order() const;
  int rot_order() const;
  /// Error-state dimension 3(1 + pos_order) + 3(1 + rot_order).
  int error_dim() const;
  bool uses_pseudo_measurements() const;
  int window_size() const;
  void validate() const;
};

/// Kinematic state with derivative chains up to jerk. Fields above the
/// variant's order stay zero.
struct NominalState {
  double t = 0.0;
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  Eigen::Vector3d j = Eigen::Vector3d::Zero();
  Quaternion q;
  Eigen::Vector3d w = Eigen::Vector3d::Zero();         // rad/s, body frame
  Eigen::Vector3d alpha = Eigen::Vector3d::Zero();     // rad/s^2
  Eigen::Vector3d jerk_ang = Eigen::Vector3d::Zero();  // rad/s^3

  Pose pose() const { return {t, p, q}; }
};

/// Derivatives estimated from poses alone.
struct PseudoDerivatives {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  Eigen::Vector3d j = Eigen::Vector3d::Zero();
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  Eigen::Vector3d alpha = Eigen::Vector3d::Zero();
  Eigen::Vector3d jerk_ang = Eigen::Vector3d::Zero();
};

/// Backward-looking polynomial fits over the most recent received poses.
///
/// Positions are fit with a polynomial of degree pos_order in time and
/// differentiated at the newest sample. Orientations enter as rotation
/// vectors relative to the newest sample, r_i = log(q_newest^-1 q_i), fit with
/// degree rot_order; the cubic coefficient is corrected for the w x alpha
/// commutator term of the rotation flow. With window = order + 1 the fits
/// interpolate, so the estimates are exact on polynomials of matching
/// degree. Sample times need not be uniform, which lets the window skip
/// dropped packets.
class DerivativeEstimator {
 public:
  DerivativeEstimator(int pos_order, int rot_order, int window, double dt);

  int window() const { return window_; }
  /// window.size() must equal window() with strictly increasing times;
  /// returns nullopt otherwise.
  std::optional<PseudoDerivatives> estimate(std::span<const Pose> window) const;

 private:
  int pos_order_;
  int rot_order_;
  int window_;
  double dt_;  // time scale used to condition the fit
};

/// Returns nullopt while fewer than config.window_size() poses are available
/// (the caller keeps accumulating). Only the newest window_size() poses are used.
std::optional<PseudoDerivatives> estimate_pseudo_derivatives(std::span<const Pose> window,
                                                             const FilterConfig& config);

struct CovMatrices {
  Eigen::MatrixXd P;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
};

struct FilterInit {
  NominalState x;
  Eigen::VectorXd dx;
  CovMatrices cov;
};

/// Nominal state at the first pose with zero derivatives, dx = 0, P = Q = I_D, R = I_6.
FilterInit init_filter(const FilterConfig& config, const Pose& first);

/// One step of the Taylor-chain kinematics. Orientation uses Zed23 when the
/// rotational order is 3, Zed12 otherwise.
NominalState propagate_nominal(const NominalState& x, double dt, const FilterConfig& config);

/// N chained propagate_nominal steps on a copy of x.
Pose predict_horizon(const NominalState& x, double dt, int steps, const FilterConfig& config);

/// Error-state transition for one step of length dt.
Eigen::MatrixXd error_transition_matrix(const NominalState& x, double dt,
                                        const FilterConfig& config);

/// F P F^T + Q, symmetrized.
Eigen::MatrixXd propagate_covariance(const Eigen::MatrixXd& P, const Eigen::MatrixXd& F,
                                     const Eigen::MatrixXd& Q);

/// Index of the first column of each error-state block.
struct ErrorLayout {
  int pos = 0;    // dp; dv, da, dj follow in steps of 3
  int theta = 0;  // dtheta; dw, dalpha, djerk_ang follow in steps of 3
  int dim = 0;

  explicit ErrorLayout(const FilterConfig& config);
};

/// 6 x D measurement Jacobian for the innovation rotation vector y_rot.
Eigen::MatrixXd measurement_jacobian(const Eigen::Vector3d& y_rot, const FilterConfig& config);

struct Correction {
  NominalState x;
  Eigen::MatrixXd P;
  Eigen::VectorXd innovation;  // [dp; log(q_prior^-1 q_meas)]
  Eigen::VectorXd dx;          // injected error state before reset
};

/// Kalman correction with the pose measurement z, followed by error-state
/// injection and reset. Throws NumericalDegeneracy when the innovation
/// covariance has condition number above 1e12.
Correction correct(const NominalState& x, const Eigen::MatrixXd& P, const Pose& z,
                   const Eigen::MatrixXd& R, const FilterConfig& config);

/// Common interface of all pose predictors driven tick by tick.
class Predictor {
 public:
  virtual ~Predictor() = default;

  /// Advance one tick to z.t. The first call initializes from z. When
  /// received is false the correction is skipped and only prediction and
  /// covariance propagation run. Throws ClockError if z.t does not advance
  /// and NumericalDegeneracy if the correction fails (the predictor is then
  /// unhealthy).
  virtual void step(const Pose& z, bool received) = 0;

  /// Pose predicted horizon_steps * dt past the current filter time.
  virtual Pose predict() const = 0;
  /// Current (posterior) pose estimate.
  virtual Pose current() const = 0;

  virtual bool initialized() const = 0;
  bool healthy() const { return healthy_; }
  const FilterConfig& config() const { return config_; }

 protected:
  explicit Predictor(FilterConfig config);
  void check_clock(double t_prev, double t_next) const;

  FilterConfig config_;
  bool healthy_ = true;
};

/// ESKF and the PsudoESKF variants.
class EskfPredictor final : public Predictor {
 public:
  explicit EskfPredictor(FilterConfig config);

  void step(const Pose& z, bool received) override;
  Pose predict() const override;
  Pose current() const override { return x_.pose(); }
  bool initialized() const override { return initialized_; }

  const NominalState& nominal() const { return x_; }
  const Eigen::MatrixXd& covariance() const { return cov_.P; }
  /// Overwrite the nominal state, e.g. to seed exact derivatives in tests.
  void set_nominal(const NominalState& x) { x_ = x; }

 private:
  void apply_pseudo_measurements();

  bool initialized_ = false;
  NominalState x_;
  CovMatrices cov_;
  std::optional<DerivativeEstimator> estimator_;
  std::deque<Pose> window_;
};

/// Linear KF baseline over [p, v, q, dq/dt] (14 states) with additive
/// quaternion integration and renormalization after every step.
class KfBaseline final : public Predictor {
 public:
  explicit KfBaseline(FilterConfig config);

  void step(const Pose& z, bool received) override;
  Pose predict() const override;
  Pose current() const override;
  bool initialized() const override { return initialized_; }

  const Eigen::Matrix<double, 14, 1>& state() const { return x_; }
  const Eigen::Matrix<double, 14, 14>& covariance() const { return P_; }

 private:
  Eigen::Matrix<double, 14, 14> transition(double dt) const;

  bool initialized_ = false;
  double t_ = 0.0;
  Eigen::Matrix<double, 14, 1> x_;
  Eigen::Matrix<double, 14, 14> P_;
};

/// KF baseline tick: step with z (always received) and return the N-step prediction.
Pose kf_baseline_step(KfBaseline& state, const Pose& z);

std::unique_ptr<Predictor> make_predictor(const FilterConfig& config);

}  // namespace headpred
