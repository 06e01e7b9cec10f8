#include "headpred/predictors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

namespace headpred {

namespace {

constexpr double kMaxConditionNumber = 1e12;
constexpr double kJacobianFallbackAngle = 1e-4;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Rows map samples to derivatives 0..degree at time 0. times are relative
// to the evaluation point and scaled by `scale` for conditioning.
Eigen::MatrixXd derivative_weights(const Eigen::VectorXd& times, int degree, double scale) {
  const auto m = times.size();
  Eigen::MatrixXd vandermonde(m, degree + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    double s = 1.0;
    for (int k = 0; k <= degree; ++k) {
      vandermonde(i, k) = s;
      s *= times(i) / scale;
    }
  }
  const Eigen::MatrixXd pinv =
      m == degree + 1 ? Eigen::MatrixXd(vandermonde.partialPivLu().inverse())
                      : Eigen::MatrixXd(vandermonde.colPivHouseholderQr().solve(
                            Eigen::MatrixXd::Identity(m, m)));
  Eigen::MatrixXd weights(degree + 1, m);
  for (int k = 0; k <= degree; ++k) {
    weights.row(k) = pinv.row(k) * (factorial(k) / std::pow(scale, k));
  }
  return weights;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::KF:
      return "kf";
    case Variant::ESKF:
      return "eskf";
    case Variant::P2O2:
      return "p2o2";
    case Variant::P2O3:
      return "p2o3";
    case Variant::P3O3:
      return "p3o3";
  }
  return "unknown";
}

Variant variant_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const Variant v : {Variant::KF, Variant::ESKF, Variant::P2O2, Variant::P2O3, Variant::P3O3}) {
    if (lower == to_string(v)) return v;
  }
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

int FilterConfig::pos_order() const {
  switch (variant) {
    case Variant::P2O2:
    case Variant::P2O3:
      return 2;
    case Variant::P3O3:
      return 3;
    default:
      return 1;
  }
}

int FilterConfig::rot_order() const {
  switch (variant) {
    case Variant::P2O2:
      return 2;
    case Variant::P2O3:
    case Variant::P3O3:
      return 3;
    default:
      return 1;
  }
}

int FilterConfig::error_dim() const { return 3 * (1 + pos_order()) + 3 * (1 + rot_order()); }

bool FilterConfig::uses_pseudo_measurements() const {
  return variant != Variant::KF && variant != Variant::ESKF;
}

int FilterConfig::window_size() const {
  return diff_window > 0 ? diff_window : std::max(pos_order(), rot_order()) + 1;
}

void FilterConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (horizon_steps < 1) throw std::invalid_argument("horizon must be at least one step");
  if (diff_window != 0 && diff_window < std::max(pos_order(), rot_order()) + 1) {
    throw std::invalid_argument("diff_window must cover order + 1 samples");
  }
}

// ---------------------------------------------------------------------------
// Pseudo-measurements

DerivativeEstimator::DerivativeEstimator(int pos_order, int rot_order, int window, double dt)
    : pos_order_(pos_order), rot_order_(rot_order), window_(window), dt_(dt) {
  if (window < std::max(pos_order, rot_order) + 1) {
    throw std::invalid_argument("derivative window too short for the requested order");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
}

std::optional<PseudoDerivatives> DerivativeEstimator::estimate(std::span<const Pose> window) const {
  if (static_cast<int>(window.size()) != window_) return std::nullopt;
  const Pose& newest = window.back();
  Eigen::VectorXd times(window_);
  Eigen::MatrixXd positions(window_, 3);
  Eigen::MatrixXd rotations(window_, 3);
  const Quaternion inv_newest = newest.q.conjugate();
  for (int i = 0; i < window_; ++i) {
    times(i) = window[i].t - newest.t;
    if (i > 0 && !(window[i].t > window[i - 1].t)) return std::nullopt;
    positions.row(i) = (window[i].p - newest.p).transpose();
    rotations.row(i) = quat_log((inv_newest * window[i].q).normalized()).transpose();
  }

  const Eigen::MatrixXd pos_d = derivative_weights(times, pos_order_, dt_) * positions;
  const Eigen::MatrixXd rot_d = derivative_weights(times, rot_order_, dt_) * rotations;

  PseudoDerivatives d;
  d.v = pos_d.row(1).transpose();
  if (pos_order_ >= 2) d.a = pos_d.row(2).transpose();
  if (pos_order_ >= 3) d.j = pos_d.row(3).transpose();
  d.w = rot_d.row(1).transpose();
  if (rot_order_ >= 2) d.alpha = rot_d.row(2).transpose();
  // The relative rotation expands as w t + alpha t^2/2 + (w''/6 + (w x alpha)/12) t^3.
  if (rot_order_ >= 3) d.jerk_ang = rot_d.row(3).transpose() - d.w.cross(d.alpha) / 2.0;
  return d;
}

std::optional<PseudoDerivatives> estimate_pseudo_derivatives(std::span<const Pose> window,
                                                             const FilterConfig& config) {
  const int n = config.window_size();
  if (static_cast<int>(window.size()) < n) return std::nullopt;
  const DerivativeEstimator estimator(config.pos_order(), config.rot_order(), n, config.dt);
  return estimator.estimate(window.last(static_cast<std::size_t>(n)));
}

// ---------------------------------------------------------------------------
// Filter primitives

ErrorLayout::ErrorLayout(const FilterConfig& config)
    : pos(0), theta(3 * (1 + config.pos_order())), dim(config.error_dim()) {}

FilterInit init_filter(const FilterConfig& config, const Pose& first) {
  config.validate();
  const int d = config.error_dim();
  FilterInit init;
  init.x.t = first.t;
  init.x.p = first.p;
  init.x.q = first.q.normalized().canonical();
  init.dx = Eigen::VectorXd::Zero(d);
  init.cov.P = Eigen::MatrixXd::Identity(d, d);
  init.cov.Q = Eigen::MatrixXd::Identity(d, d);
  init.cov.R = Eigen::MatrixXd::Identity(6, 6);
  return init;
}

NominalState propagate_nominal(const NominalState& x, double dt, const FilterConfig& config) {
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  NominalState n = x;
  n.t = x.t + dt;
  n.p = x.p + x.v * dt + x.a * (dt2 / 2.0) + x.j * (dt3 / 6.0);
  n.v = x.v + x.a * dt + x.j * (dt2 / 2.0);
  n.a = x.a + x.j * dt;
  switch (config.rot_order()) {
    case 3:
      n.q = zed23_step(x.q, x.w, x.alpha, x.jerk_ang / 2.0, dt);
      break;
    case 2:
      n.q = zed12_step(x.q, x.w, x.alpha, dt);
      break;
    default:
      n.q = zed12_step(x.q, x.w, Eigen::Vector3d::Zero(), dt);
      break;
  }
  n.w = x.w + x.alpha * dt + x.jerk_ang * (dt2 / 2.0);
  n.alpha = x.alpha + x.jerk_ang * dt;
  return n;
}

Pose predict_horizon(const NominalState& x, double dt, int steps, const FilterConfig& config) {
  if (steps < 1) throw std::invalid_argument("horizon must be at least one step");
  NominalState y = x;
  for (int i = 0; i < steps; ++i) y = propagate_nominal(y, dt, config);
  return y.pose();
}

Eigen::MatrixXd error_transition_matrix(const NominalState& x, double dt,
                                        const FilterConfig& config) {
  const ErrorLayout layout(config);
  Eigen::MatrixXd f = Eigen::MatrixXd::Identity(layout.dim, layout.dim);
  auto chain = [&](int base, int order) {
    for (int i = 0; i <= order; ++i) {
      for (int k = i + 1; k <= order; ++k) {
        f.block<3, 3>(base + 3 * i, base + 3 * k) =
            Eigen::Matrix3d::Identity() * (std::pow(dt, k - i) / factorial(k - i));
      }
    }
  };
  chain(layout.pos, config.pos_order());
  chain(layout.theta, config.rot_order());
  f.block<3, 3>(layout.theta, layout.theta) = quat_exp(x.w * dt).to_matrix().transpose();
  return f;
}

Eigen::MatrixXd propagate_covariance(const Eigen::MatrixXd& P, const Eigen::MatrixXd& F,
                                     const Eigen::MatrixXd& Q) {
  if (P.rows() != P.cols() || F.rows() != F.cols() || Q.rows() != Q.cols() ||
      P.rows() != F.rows() || P.rows() != Q.rows()) {
    throw std::invalid_argument("propagate_covariance: dimension mismatch");
  }
  const Eigen::MatrixXd fp = F.lazyProduct(P);
  const Eigen::MatrixXd next = fp.lazyProduct(F.transpose()) + Q;
  return 0.5 * (next + next.transpose());
}

Eigen::MatrixXd measurement_jacobian(const Eigen::Vector3d& y_rot, const FilterConfig& config) {
  const ErrorLayout layout(config);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(6, layout.dim);
  h.block<3, 3>(0, layout.pos).setIdentity();
  if (y_rot.norm() < kJacobianFallbackAngle) {
    h.block<3, 3>(3, layout.theta).setIdentity();
  } else {
    h.block<3, 3>(3, layout.theta) = right_jacobian_inv(y_rot).transpose();
  }
  return h;
}

Correction correct(const NominalState& x, const Eigen::MatrixXd& P, const Pose& z,
                   const Eigen::MatrixXd& R, const FilterConfig& config) {
  const ErrorLayout layout(config);
  if (P.rows() != layout.dim || P.cols() != layout.dim || R.rows() != 6 || R.cols() != 6) {
    throw std::invalid_argument("correct: covariance dimensions do not match the variant");
  }

  Eigen::VectorXd y(6);
  y.head<3>() = z.p - x.p;
  y.tail<3>() = quat_log((x.q.conjugate() * z.q).normalized());
  if (!(y.tail<3>().norm() < std::numbers::pi)) {
    throw NumericalDegeneracy("orientation innovation reached a half turn");
  }

  const Eigen::MatrixXd h = measurement_jacobian(y.tail<3>(), config);
  const Eigen::MatrixXd hp = h.lazyProduct(P);
  Eigen::MatrixXd s = hp.lazyProduct(h.transpose()) + R;
  s = 0.5 * (s + s.transpose());

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxConditionNumber) {
    throw NumericalDegeneracy("innovation covariance is singular or ill-conditioned");
  }

  // K = P H^T S^-1, computed as (S^-1 H P)^T since S and P are symmetric.
  const Eigen::MatrixXd gain = s.ldlt().solve(hp).transpose();
  const Eigen::VectorXd dx = gain * y;

  Correction out;
  out.innovation = y;
  out.dx = dx;
  NominalState& n = out.x;
  n = x;
  const int tp = layout.pos;
  const int tr = layout.theta;
  n.p += dx.segment<3>(tp);
  n.v += dx.segment<3>(tp + 3);
  if (config.pos_order() >= 2) n.a += dx.segment<3>(tp + 6);
  if (config.pos_order() >= 3) n.j += dx.segment<3>(tp + 9);
  n.q = (x.q * quat_exp(dx.segment<3>(tr))).normalized().canonical();
  n.w += dx.segment<3>(tr + 3);
  if (config.rot_order() >= 2) n.alpha += dx.segment<3>(tr + 6);
  if (config.rot_order() >= 3) n.jerk_ang += dx.segment<3>(tr + 9);

  const Eigen::MatrixXd ikh = Eigen::MatrixXd::Identity(layout.dim, layout.dim) - gain.lazyProduct(h);
  Eigen::MatrixXd p_post = ikh.lazyProduct(P);
  if (config.exact_reset) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(layout.dim, layout.dim);
    g.block<3, 3>(tr, tr) -= 0.5 * skew(dx.segment<3>(tr));
    const Eigen::MatrixXd gp = g.lazyProduct(p_post);
    p_post = gp.lazyProduct(g.transpose());
  }
  out.P = 0.5 * (p_post + p_post.transpose());
  return out;
}

// ---------------------------------------------------------------------------
// Predictors

Predictor::Predictor(FilterConfig config) : config_(config) { config_.validate(); }

void Predictor::check_clock(double t_prev, double t_next) const {
  if (!(t_next > t_prev)) {
    throw ClockError("measurement time " + std::to_string(t_next) +
                     " does not advance past filter time " + std::to_string(t_prev));
  }
}

EskfPredictor::EskfPredictor(FilterConfig config) : Predictor(config) {
  if (config_.variant == Variant::KF) {
    throw std::invalid_argument("EskfPredictor does not implement the KF baseline");
  }
  if (config_.uses_pseudo_measurements()) {
    estimator_.emplace(config_.pos_order(), config_.rot_order(), config_.window_size(),
                       config_.dt);
  }
}

void EskfPredictor::step(const Pose& z, bool received) {
  if (!initialized_) {
    FilterInit init = init_filter(config_, z);
    x_ = init.x;
    cov_ = std::move(init.cov);
    if (estimator_) window_.assign(1, z);
    initialized_ = true;
    return;
  }
  check_clock(x_.t, z.t);
  const double dt = z.t - x_.t;

  const Eigen::MatrixXd f = error_transition_matrix(x_, dt, config_);
  x_ = propagate_nominal(x_, dt, config_);
  cov_.P = propagate_covariance(cov_.P, f, cov_.Q);

  if (received) {
    Correction c;
    try {
      c = correct(x_, cov_.P, z, cov_.R, config_);
    } catch (const NumericalDegeneracy&) {
      healthy_ = false;
      throw;
    }
    x_ = c.x;
    cov_.P = std::move(c.P);
    if (estimator_) {
      window_.push_back(z);
      while (static_cast<int>(window_.size()) > estimator_->window()) window_.pop_front();
      apply_pseudo_measurements();
    }
  }
}

void EskfPredictor::apply_pseudo_measurements() {
  const std::vector<Pose> recent(window_.begin(), window_.end());
  const auto d = estimator_->estimate(recent);
  if (!d) return;
  x_.v = d->v;
  x_.a = d->a;
  x_.j = d->j;
  x_.w = d->w;
  x_.alpha = d->alpha;
  x_.jerk_ang = d->jerk_ang;
}

Pose EskfPredictor::predict() const {
  return predict_horizon(x_, config_.dt, config_.horizon_steps, config_);
}

// ---------------------------------------------------------------------------
// Linear KF baseline. State layout: p(0..2) v(3..5) q(6..9) dq/dt(10..13).

namespace {

Quaternion quat_from(const Eigen::Matrix<double, 14, 1>& x) {
  return Quaternion{x(6), x(7), x(8), x(9)};
}

void store_quat(Eigen::Matrix<double, 14, 1>& x, const Quaternion& q) {
  x(6) = q.w;
  x(7) = q.x;
  x(8) = q.y;
  x(9) = q.z;
}

}  // namespace

KfBaseline::KfBaseline(FilterConfig config) : Predictor(config) {
  x_.setZero();
  P_.setIdentity();
}

Eigen::Matrix<double, 14, 14> KfBaseline::transition(double dt) const {
  Eigen::Matrix<double, 14, 14> f = Eigen::Matrix<double, 14, 14>::Identity();
  f.block<3, 3>(0, 3) = Eigen::Matrix3d::Identity() * dt;
  f.block<4, 4>(6, 10) = Eigen::Matrix4d::Identity() * dt;
  return f;
}

void KfBaseline::step(const Pose& z, bool received) {
  if (!initialized_) {
    x_.setZero();
    x_.head<3>() = z.p;
    store_quat(x_, z.q.normalized());
    P_.setIdentity();
    t_ = z.t;
    initialized_ = true;
    return;
  }
  check_clock(t_, z.t);
  const double dt = z.t - t_;
  t_ = z.t;

  const auto f = transition(dt);
  x_ = f * x_;
  P_ = f * P_ * f.transpose() + Eigen::Matrix<double, 14, 14>::Identity();
  store_quat(x_, quat_from(x_).normalized());

  if (received) {
    Eigen::Matrix<double, 7, 14> h = Eigen::Matrix<double, 7, 14>::Zero();
    h.block<3, 3>(0, 0).setIdentity();
    h.block<4, 4>(3, 6).setIdentity();

    Quaternion zq = z.q.normalized();
    if (zq.dot(quat_from(x_)) < 0.0) zq = zq.negated();
    Eigen::Matrix<double, 7, 1> meas;
    meas << z.p, zq.w, zq.x, zq.y, zq.z;

    const Eigen::Matrix<double, 7, 1> y = meas - h * x_;
    Eigen::Matrix<double, 7, 7> s = h * P_ * h.transpose() + Eigen::Matrix<double, 7, 7>::Identity();
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 7, 7>> eig(s, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0.0) ||
        eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff() > kMaxConditionNumber) {
      healthy_ = false;
      throw NumericalDegeneracy("KF innovation covariance is singular or ill-conditioned");
    }
    const Eigen::Matrix<double, 14, 7> gain = s.ldlt().solve(h * P_).transpose();
    x_ += gain * y;
    const Eigen::Matrix<double, 14, 14> p_post =
        (Eigen::Matrix<double, 14, 14>::Identity() - gain * h) * P_;
    P_ = 0.5 * (p_post + p_post.transpose());
    store_quat(x_, quat_from(x_).normalized());
  }
}

Pose KfBaseline::current() const { return {t_, x_.head<3>(), quat_from(x_).canonical()}; }

Pose KfBaseline::predict() const {
  const auto f = transition(config_.dt);
  Eigen::Matrix<double, 14, 1> x = x_;
  for (int i = 0; i < config_.horizon_steps; ++i) {
    x = f * x;
    store_quat(x, quat_from(x).normalized());
  }
  return {t_ + config_.horizon_steps * config_.dt, x.head<3>(), quat_from(x).canonical()};
}

Pose kf_baseline_step(KfBaseline& state, const Pose& z) {
  state.step(z, true);
  return state.predict();
}

std::unique_ptr<Predictor> make_predictor(const FilterConfig& config) {
  if (config.variant == Variant::KF) return std::make_unique<KfBaseline>(config);
  return std::make_unique<EskfPredictor>(config);
}

}  // namespace headpred
