#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "headpred/predictors.hpp"
#include "oracles.hpp"

using namespace headpred;

namespace {

constexpr Variant kEskfFamily[] = {Variant::ESKF, Variant::P2O2, Variant::P2O3, Variant::P3O3};
constexpr Variant kPseudo[] = {Variant::P2O2, Variant::P2O3, Variant::P3O3};

FilterConfig config_for(Variant v, int horizon_steps = 10) {
  FilterConfig c;
  c.variant = v;
  c.horizon_steps = horizon_steps;
  return c;
}

double min_eigenvalue(const Eigen::MatrixXd& p) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(p, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

// Smooth test motion: position and body-rate profiles with bounded derivatives.
Pose wavy_pose(double t) {
  Pose p;
  p.t = t;
  p.p = {0.1 * std::sin(1.3 * t), 0.05 * std::cos(0.7 * t), 0.02 * t};
  p.q = quat_exp({0.3 * std::sin(0.9 * t), 0.2 * std::sin(1.7 * t + 0.4), 0.4 * std::cos(0.5 * t)});
  return p;
}

}  // namespace

TEST(FilterConfig, OrdersAndDimensions) {
  EXPECT_EQ(config_for(Variant::ESKF).error_dim(), 12);
  EXPECT_EQ(config_for(Variant::P2O2).error_dim(), 18);
  EXPECT_EQ(config_for(Variant::P2O3).error_dim(), 21);
  EXPECT_EQ(config_for(Variant::P3O3).error_dim(), 24);
  EXPECT_EQ(config_for(Variant::P2O3).pos_order(), 2);
  EXPECT_EQ(config_for(Variant::P2O3).rot_order(), 3);
  EXPECT_FALSE(config_for(Variant::ESKF).uses_pseudo_measurements());
  EXPECT_TRUE(config_for(Variant::P2O2).uses_pseudo_measurements());
  EXPECT_EQ(config_for(Variant::P3O3).window_size(), 4);
  FilterConfig bad = config_for(Variant::P3O3, 0);
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = config_for(Variant::P3O3);
  bad.diff_window = 2;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(VariantNames, Roundtrip) {
  for (const auto v : {Variant::KF, Variant::ESKF, Variant::P2O2, Variant::P2O3, Variant::P3O3}) {
    EXPECT_EQ(variant_from_string(to_string(v)), v);
  }
  EXPECT_EQ(variant_from_string("P3O3"), Variant::P3O3);
  EXPECT_THROW(variant_from_string("p4o4"), std::invalid_argument);
}

TEST(InitFilter, IdentityCovariancesAndZeroError) {
  const Pose first = wavy_pose(0.3);
  const auto init = init_filter(config_for(Variant::P3O3), first);
  EXPECT_EQ(init.dx.size(), 24);
  EXPECT_EQ(init.dx.norm(), 0.0);
  EXPECT_TRUE(init.cov.P.isIdentity(0.0));
  EXPECT_TRUE(init.cov.Q.isIdentity(0.0));
  EXPECT_EQ(init.cov.R.rows(), 6);
  EXPECT_TRUE(init.cov.R.isIdentity(0.0));
  EXPECT_EQ(init.x.p, first.p);
  EXPECT_EQ(init.x.v.norm() + init.x.w.norm() + init.x.jerk_ang.norm(), 0.0);
  EXPECT_EQ(init_filter(config_for(Variant::ESKF), first).cov.P.rows(), 12);
}

TEST(PropagateNominal, PositionChain) {
  const auto cfg = config_for(Variant::P3O3);
  NominalState x;
  EXPECT_EQ(propagate_nominal(x, 0.01, cfg).p, x.p);
  x.v = {1.0, 0.0, 0.0};
  EXPECT_NEAR(propagate_nominal(x, 0.01, cfg).p.x(), 0.01, 1e-15);
  x.a = {2.0, 0.0, 0.0};
  x.j = {6.0, 0.0, 0.0};
  const NominalState n = propagate_nominal(x, 0.1, cfg);
  EXPECT_NEAR(n.p.x(), 0.111, 1e-15);
  EXPECT_NEAR(n.v.x(), 1.0 + 0.2 + 0.03, 1e-15);
  EXPECT_NEAR(n.a.x(), 2.6, 1e-15);
  EXPECT_EQ(n.j.x(), 6.0);
  EXPECT_NEAR(n.t, 0.1, 1e-15);
}

TEST(PredictHorizon, CompositionAndLinearMotion) {
  const auto cfg = config_for(Variant::P2O3);
  NominalState x;
  x.p = {0.1, 0.2, 0.3};
  x.v = {0.5, -0.4, 0.3};
  x.w = {0.2, 0.1, -0.3};
  x.alpha = {0.05, 0.0, 0.1};
  const Pose one = predict_horizon(x, 0.01, 1, cfg);
  const NominalState step = propagate_nominal(x, 0.01, cfg);
  EXPECT_EQ(one.p, step.p);
  EXPECT_EQ(one.q.w, step.q.w);

  NominalState lin;
  lin.v = {0.5, -0.4, 0.3};
  const Pose ten = predict_horizon(lin, 0.01, 10, config_for(Variant::ESKF));
  EXPECT_LE((ten.p - 0.1 * lin.v).norm(), 1e-15);
  EXPECT_THROW(predict_horizon(x, 0.01, 0, cfg), std::invalid_argument);
}

TEST(PredictHorizon, CubicTrajectoryIsExact) {
  // p(t) = t^3 along x starting at t0 = 0.5 with true derivatives.
  const double t0 = 0.5;
  NominalState x;
  x.t = t0;
  x.p = {t0 * t0 * t0, 0.0, 0.0};
  x.v = {3.0 * t0 * t0, 0.0, 0.0};
  x.a = {6.0 * t0, 0.0, 0.0};
  x.j = {6.0, 0.0, 0.0};
  const Pose p = predict_horizon(x, 0.01, 10, config_for(Variant::P3O3));
  EXPECT_NEAR(p.p.x(), std::pow(t0 + 0.1, 3), 1e-9);
}

TEST(PredictHorizon, PolynomialExactnessPerOrder) {
  for (const auto v : kEskfFamily) {
    const auto cfg = config_for(v);
    const int ord = cfg.pos_order();
    // p(t) = sum_k c_k t^k up to the variant order, t from 0.
    const Eigen::Vector3d c1(0.3, -0.2, 0.1);
    const Eigen::Vector3d c2(0.5, 0.4, -0.6);
    const Eigen::Vector3d c3(-0.7, 0.2, 0.9);
    NominalState x;
    x.v = c1;
    if (ord >= 2) x.a = 2.0 * c2;
    if (ord >= 3) x.j = 6.0 * c3;
    const double t = 0.1;
    Eigen::Vector3d expected = c1 * t;
    if (ord >= 2) expected += c2 * t * t;
    if (ord >= 3) expected += c3 * t * t * t;
    EXPECT_LE((predict_horizon(x, 0.01, 10, cfg).p - expected).norm(), 1e-9) << to_string(v);

    NominalState spin;
    spin.w = {0.4, -1.2, 0.8};
    const Pose r = predict_horizon(spin, 0.01, 10, cfg);
    EXPECT_LE(geodesic_distance(r.q, quat_exp(spin.w * 0.1)), 1e-9) << to_string(v);
  }
}

TEST(ErrorTransition, StructureAndEntries) {
  for (const auto v : kEskfFamily) {
    const auto cfg = config_for(v);
    NominalState x;
    x.w = {0.3, -0.5, 0.2};
    EXPECT_TRUE(error_transition_matrix(x, 0.0, cfg).isIdentity(1e-15)) << to_string(v);

    const double dt = 0.01;
    const Eigen::MatrixXd f = error_transition_matrix(x, dt, cfg);
    const ErrorLayout layout(cfg);
    EXPECT_EQ(f(0, 3), dt);
    if (cfg.pos_order() >= 2) EXPECT_DOUBLE_EQ(f(0, 6), dt * dt / 2.0);
    if (cfg.pos_order() >= 3) EXPECT_DOUBLE_EQ(f(0, 9), dt * dt * dt / 6.0);
    EXPECT_EQ(f(layout.theta, layout.theta + 3), dt);
    for (int blk_r = 0; blk_r < layout.dim / 3; ++blk_r) {
      for (int blk_c = 0; blk_c < blk_r; ++blk_c) {
        EXPECT_EQ((f.block<3, 3>(3 * blk_r, 3 * blk_c).norm()), 0.0);
      }
    }
    const Eigen::Matrix3d rot = f.block<3, 3>(layout.theta, layout.theta);
    EXPECT_LE((rot - oracle::rodrigues(x.w * dt).transpose()).norm(), 1e-14);
  }
}

TEST(PropagateCovariance, IdentityCases) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Random(12, 12);
  p = p * p.transpose();
  const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(12, 12);
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(12, 12);
  EXPECT_LE((propagate_covariance(p, i, z) - p).norm(), 1e-14);
  EXPECT_LE((propagate_covariance(p, i, i) - (p + i)).norm(), 1e-14);
  EXPECT_NEAR(propagate_covariance(p, i, i).trace(), p.trace() + 12.0, 1e-12);
  EXPECT_THROW(propagate_covariance(p, Eigen::MatrixXd::Identity(6, 6), i), std::invalid_argument);
}

TEST(MeasurementJacobian, BlocksAndFallback) {
  const auto cfg = config_for(Variant::P2O3);
  const ErrorLayout layout(cfg);
  const Eigen::MatrixXd small = measurement_jacobian({1e-5, 0.0, 0.0}, cfg);
  EXPECT_EQ(small.rows(), 6);
  EXPECT_EQ(small.cols(), 21);
  EXPECT_TRUE(small.block(0, 0, 3, 3).isIdentity(0.0));
  EXPECT_TRUE(small.block(3, layout.theta, 3, 3).isIdentity(0.0));
  const Eigen::Vector3d y(0.2, -0.1, 0.3);
  const Eigen::MatrixXd h = measurement_jacobian(y, cfg);
  EXPECT_LE((h.block(3, layout.theta, 3, 3) - right_jacobian_inv(y).transpose()).norm(), 1e-15);
  EXPECT_EQ((h.block(0, 3, 6, layout.theta - 3)).norm(), 0.0);
}

TEST(Correct, InfiniteMeasurementNoiseIgnoresMeasurement) {
  for (const auto v : kEskfFamily) {
    const auto cfg = config_for(v);
    const auto init = init_filter(cfg, wavy_pose(0.0));
    const Pose z = wavy_pose(0.4);
    const auto c = correct(init.x, init.cov.P, z, init.cov.R * 1e12, cfg);
    EXPECT_LE((c.x.p - init.x.p).norm(), 1e-6);
    EXPECT_LE(geodesic_distance(c.x.q, init.x.q), 1e-6);
  }
}

TEST(Correct, InfinitePriorUncertaintyFollowsMeasurement) {
  for (const auto v : kEskfFamily) {
    const auto cfg = config_for(v);
    const auto init = init_filter(cfg, wavy_pose(0.0));
    const Pose z = wavy_pose(0.4);
    const auto c = correct(init.x, init.cov.P * 1e12, z, init.cov.R, cfg);
    EXPECT_LE((c.x.p - z.p).norm(), 1e-6) << to_string(v);
    EXPECT_LE(geodesic_distance(c.x.q, z.q), 1e-6) << to_string(v);
  }
}

TEST(Correct, ScalarKalmanHalfway) {
  const auto cfg = config_for(Variant::ESKF);
  const auto init = init_filter(cfg, Pose{});
  Pose z;
  z.p = {1.0, 0.0, 0.0};
  const auto c = correct(init.x, init.cov.P, z, init.cov.R, cfg);
  EXPECT_NEAR(c.x.p.x(), 0.5, 1e-15);
  EXPECT_NEAR(c.P(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(c.innovation(0), 1.0, 1e-15);
}

TEST(Correct, InjectsRotationOnTheRight) {
  const auto cfg = config_for(Variant::ESKF);
  NominalState x;
  x.q = quat_exp({0.3, 0.2, -0.1});
  const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(12, 12) * 1e9;
  Pose z;
  z.q = (x.q * quat_exp({0.0, 0.0, 0.05})).normalized();
  const auto c = correct(x, p, z, Eigen::MatrixXd::Identity(6, 6), cfg);
  EXPECT_LE((c.innovation.tail<3>() - Eigen::Vector3d(0.0, 0.0, 0.05)).norm(), 1e-12);
  EXPECT_LE(geodesic_distance(c.x.q, z.q), 1e-8);
}

TEST(Correct, DegenerateInnovationCovarianceThrows) {
  const auto cfg = config_for(Variant::ESKF);
  const auto init = init_filter(cfg, Pose{});
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(12, 12);
  p.topLeftCorner<3, 3>() *= 1e13;
  EXPECT_THROW(correct(init.x, p, Pose{}, init.cov.R, cfg), NumericalDegeneracy);
  EXPECT_THROW(correct(init.x, Eigen::MatrixXd::Identity(6, 6), Pose{}, init.cov.R, cfg),
               std::invalid_argument);
}

TEST(Correct, InnovationIsFrameConsistent) {
  const auto cfg = config_for(Variant::P2O2);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 100; ++i) {
    NominalState x;
    x.q = quat_exp({normal(rng), normal(rng), normal(rng)});
    Pose z;
    z.q = quat_exp({normal(rng), normal(rng), normal(rng)});
    if (geodesic_distance(x.q, z.q) > 3.0) continue;
    const Quaternion r = quat_exp({normal(rng), normal(rng), normal(rng)});
    const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(18, 18);
    const auto a = correct(x, p, z, Eigen::MatrixXd::Identity(6, 6), cfg);
    NominalState xr = x;
    xr.q = (r * x.q).normalized();
    Pose zr = z;
    zr.q = (r * z.q).normalized();
    const auto b = correct(xr, p, zr, Eigen::MatrixXd::Identity(6, 6), cfg);
    EXPECT_NEAR(a.innovation.tail<3>().norm(), b.innovation.tail<3>().norm(), 1e-10);
  }
}

TEST(Correct, ExactResetKeepsCovarianceSymmetricPsd) {
  auto cfg = config_for(Variant::P3O3);
  cfg.exact_reset = true;
  EskfPredictor f(cfg);
  for (int k = 0; k < 500; ++k) f.step(wavy_pose(0.01 * k), true);
  const Eigen::MatrixXd& p = f.covariance();
  EXPECT_LE((p - p.transpose()).norm(), 0.0);
  EXPECT_GE(min_eigenvalue(p), -1e-9);
}

TEST(PseudoDerivatives, StationaryLinearAndSpin) {
  for (const auto v : kPseudo) {
    const auto cfg = config_for(v);
    const int n = cfg.window_size();
    std::vector<Pose> still(n);
    std::vector<Pose> line(n);
    std::vector<Pose> spin(n);
    for (int i = 0; i < n; ++i) {
      const double t = 0.01 * i;
      still[i].t = line[i].t = spin[i].t = t;
      still[i].p = {0.3, 0.1, -0.2};
      still[i].q = quat_exp({0.2, 0.1, 0.0});
      line[i].p = {1.0 * t, 0.0, 0.0};
      spin[i].q = quat_exp({0.0, 0.0, 1.0 * t});
    }
    const auto ds = estimate_pseudo_derivatives(still, cfg);
    ASSERT_TRUE(ds);
    EXPECT_LE(ds->v.norm() + ds->a.norm() + ds->j.norm() + ds->w.norm() + ds->alpha.norm() +
                  ds->jerk_ang.norm(),
              1e-12);
    const auto dl = estimate_pseudo_derivatives(line, cfg);
    EXPECT_LE((dl->v - Eigen::Vector3d(1.0, 0.0, 0.0)).norm(), 1e-9);
    EXPECT_LE(dl->a.norm() + dl->j.norm(), 1e-9);
    const auto dw = estimate_pseudo_derivatives(spin, cfg);
    EXPECT_LE((dw->w - Eigen::Vector3d(0.0, 0.0, 1.0)).norm(), 1e-9);
    EXPECT_LE(dw->alpha.norm(), 1e-9);
    EXPECT_FALSE(estimate_pseudo_derivatives(std::span(line).first(n - 1), cfg));
  }
}

TEST(PseudoDerivatives, ExactOnCubicPositionEvenWithGaps) {
  const auto cfg = config_for(Variant::P3O3);
  const DerivativeEstimator est(3, 3, 4, 0.01);
  auto cubic = [](double t) { return Eigen::Vector3d(t * t * t, 2.0 * t * t - t, 0.5 * t); };
  for (const auto& times : {std::vector<double>{0.97, 0.98, 0.99, 1.0},
                            std::vector<double>{0.93, 0.96, 0.99, 1.0}}) {
    std::vector<Pose> w(4);
    for (int i = 0; i < 4; ++i) {
      w[i].t = times[i];
      w[i].p = cubic(times[i]);
    }
    const auto d = est.estimate(w);
    ASSERT_TRUE(d);
    EXPECT_LE((d->v - Eigen::Vector3d(3.0, 3.0, 0.5)).norm(), 1e-9);
    EXPECT_LE((d->a - Eigen::Vector3d(6.0, 4.0, 0.0)).norm(), 1e-7);
    EXPECT_LE((d->j - Eigen::Vector3d(6.0, 0.0, 0.0)).norm(), 1e-5);
  }
  std::vector<Pose> unordered(4);
  for (int i = 0; i < 4; ++i) unordered[i].t = 1.0 - 0.01 * i;
  EXPECT_FALSE(est.estimate(unordered));
  (void)cfg;
}

TEST(PseudoDerivatives, AngularAccelerationAboutFixedAxis) {
  // theta(t) = 0.5 * 2 t^2 about a fixed axis: w = 2 t, alpha = 2.
  const Eigen::Vector3d axis = Eigen::Vector3d(1.0, 2.0, 2.0) / 3.0;
  std::vector<Pose> w(3);
  for (int i = 0; i < 3; ++i) {
    w[i].t = 0.5 + 0.01 * i;
    w[i].q = quat_exp(axis * (w[i].t * w[i].t));
  }
  const auto d = estimate_pseudo_derivatives(w, config_for(Variant::P2O2));
  ASSERT_TRUE(d);
  EXPECT_LE((d->w - axis * 2.0 * 0.52).norm(), 1e-9);
  EXPECT_LE((d->alpha - axis * 2.0).norm(), 1e-6);
}

TEST(VariantNesting, P3O3WithZeroJerkMatchesP2O2) {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 50; ++i) {
    NominalState x;
    x.p = {normal(rng), normal(rng), normal(rng)};
    x.v = {normal(rng), normal(rng), normal(rng)};
    x.a = {normal(rng), normal(rng), normal(rng)};
    x.q = quat_exp({normal(rng), normal(rng), normal(rng)});
    x.w = {normal(rng), normal(rng), normal(rng)};
    // alpha parallel to w: the Zed23 commutator w x alpha vanishes.
    x.alpha = x.w * normal(rng);
    const Pose a = predict_horizon(x, 0.01, 10, config_for(Variant::P3O3));
    const Pose b = predict_horizon(x, 0.01, 10, config_for(Variant::P2O2));
    EXPECT_LE((a.p - b.p).norm(), 1e-9);
    EXPECT_LE(geodesic_distance(a.q, b.q), 1e-9);
  }
}

TEST(VariantNesting, PositionNestsForAnyRotation) {
  NominalState x;
  x.v = {0.3, 0.1, -0.2};
  x.a = {1.0, -2.0, 0.5};
  x.w = {0.5, 0.0, 0.0};
  x.alpha = {0.0, 0.7, 0.0};
  const Pose a = predict_horizon(x, 0.01, 10, config_for(Variant::P3O3));
  const Pose b = predict_horizon(x, 0.01, 10, config_for(Variant::P2O2));
  EXPECT_LE((a.p - b.p).norm(), 1e-12);
}

TEST(EskfPredictor, FirstStepInitializesAndClockMustAdvance) {
  for (const auto v : kEskfFamily) {
    EskfPredictor f(config_for(v));
    EXPECT_FALSE(f.initialized());
    const Pose z = wavy_pose(1.0);
    f.step(z, false);
    EXPECT_TRUE(f.initialized());
    EXPECT_EQ(f.current().p, z.p);
    EXPECT_THROW(f.step(z, true), ClockError);
    EXPECT_THROW(f.step(wavy_pose(0.5), true), ClockError);
  }
  EXPECT_THROW(EskfPredictor(config_for(Variant::KF)), std::invalid_argument);
}

TEST(EskfPredictor, DroppedTicksEqualOpenLoopPropagation) {
  for (const auto v : kEskfFamily) {
    const auto cfg = config_for(v);
    EskfPredictor f(cfg);
    int k = 0;
    for (; k < 300; ++k) f.step(wavy_pose(0.01 * k), true);
    NominalState oracle_state = f.nominal();
    Eigen::MatrixXd oracle_p = f.covariance();
    for (; k < 400; ++k) {
      f.step(wavy_pose(0.01 * k), false);
      const Eigen::MatrixXd fm = error_transition_matrix(oracle_state, 0.01 * k - oracle_state.t, cfg);
      oracle_p = propagate_covariance(oracle_p, fm, Eigen::MatrixXd::Identity(cfg.error_dim(), cfg.error_dim()));
      oracle_state = propagate_nominal(oracle_state, 0.01 * k - oracle_state.t, cfg);
      ASSERT_LE((f.nominal().p - oracle_state.p).norm(), 1e-12) << to_string(v);
      ASSERT_LE(geodesic_distance(f.nominal().q, oracle_state.q), 1e-12) << to_string(v);
    }
    EXPECT_LE((f.covariance() - oracle_p).norm(), 1e-9 * oracle_p.norm());
  }
}

TEST(EskfPredictor, StaysHealthyUnderLoss) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto v : kEskfFamily) {
    EskfPredictor f(config_for(v));
    for (int k = 0; k < 5000; ++k) {
      f.step(wavy_pose(0.01 * k), k == 0 || unit(rng) > 0.3);
      ASSERT_NEAR(f.nominal().q.norm(), 1.0, 1e-9);
    }
    const Eigen::MatrixXd& p = f.covariance();
    EXPECT_LE((p - p.transpose()).norm(), 0.0);
    EXPECT_GE(min_eigenvalue(p), -1e-9) << to_string(v);
    EXPECT_TRUE(f.healthy());
  }
}

TEST(EskfPredictor, PseudoVariantsTrackSmoothMotion) {
  for (const auto v : kPseudo) {
    EskfPredictor f(config_for(v));
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      f.step(wavy_pose(0.01 * k), true);
      if (k > 100 && k + 10 < 1000) {
        worst = std::max(worst, (f.predict().p - wavy_pose(0.01 * (k + 10)).p).norm());
      }
    }
    EXPECT_LT(worst, 1e-3) << to_string(v);
  }
}

TEST(KfBaseline, StationaryInputIsFixedPoint) {
  KfBaseline kf(config_for(Variant::KF));
  Pose z;
  z.p = {0.2, -0.1, 1.6};
  z.q = quat_exp({0.1, 0.4, -0.2});
  Pose pred;
  for (int k = 0; k < 2000; ++k) {
    z.t = 0.01 * k;
    pred = kf_baseline_step(kf, z);
  }
  EXPECT_LE((pred.p - z.p).norm(), 1e-6);
  EXPECT_LE(geodesic_distance(pred.q, z.q), 1e-6);
}

TEST(KfBaseline, ConstantVelocityIsExact) {
  KfBaseline kf(config_for(Variant::KF));
  const Eigen::Vector3d vel(0.5, 0.0, 0.0);
  Pose pred;
  Pose z;
  for (int k = 0; k < 2000; ++k) {
    z.t = 0.01 * k;
    z.p = vel * z.t;
    pred = kf_baseline_step(kf, z);
  }
  EXPECT_LT(1000.0 * (pred.p - vel * (z.t + 0.1)).norm(), 1.0);
}

TEST(KfBaseline, ConstantAccelerationLagMatchesRiccatiOracle) {
  // With Q = I and R = I the velocity estimate averages over about a second,
  // so the lag is far above the pure extrapolation term 0.5 a (N dt)^2 = 5 mm.
  KfBaseline kf(config_for(Variant::KF));
  Pose pred;
  Pose z;
  for (int k = 0; k < 3000; ++k) {
    z.t = 0.01 * k;
    z.p = {0.5 * z.t * z.t, 0.0, 0.0};
    pred = kf_baseline_step(kf, z);
  }
  const double target = 0.5 * (z.t + 0.1) * (z.t + 0.1);
  const double lag = target - pred.p.x();
  const double expected = oracle::cv_kalman_lag(0.01, 10, 1.0);
  EXPECT_NEAR(lag, expected, 1e-9);
  EXPECT_GT(lag, 0.1);
}

TEST(KfBaseline, DropsSkipCorrectionOnly) {
  KfBaseline a(config_for(Variant::KF));
  for (int k = 0; k < 100; ++k) a.step(wavy_pose(0.01 * k), true);
  Eigen::Matrix<double, 14, 1> x = a.state();
  for (int k = 100; k < 130; ++k) {
    a.step(wavy_pose(0.01 * k), false);
    x.segment<3>(0) += 0.01 * x.segment<3>(3);
    x.segment<4>(6) += 0.01 * x.segment<4>(10);
    x.segment<4>(6).normalize();
  }
  EXPECT_LE((a.state() - x).norm(), 1e-12);
  EXPECT_THROW(a.step(wavy_pose(0.5), true), ClockError);
}

TEST(MakePredictor, DispatchesByVariant) {
  EXPECT_NE(dynamic_cast<KfBaseline*>(make_predictor(config_for(Variant::KF)).get()), nullptr);
  for (const auto v : kEskfFamily) {
    EXPECT_NE(dynamic_cast<EskfPredictor*>(make_predictor(config_for(v)).get()), nullptr);
  }
}
