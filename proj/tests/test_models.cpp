#include "afckf/models.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace afckf {
namespace {

constexpr double kPi = std::numbers::pi;

Vector state(double px, double vx, double py, double vy) {
  return Eigen::Vector4d(px, vx, py, vy);
}

TEST(CvTransition, OneStep) {
  EXPECT_EQ(cv_transition(state(0, 1, 0, 1), 0.1), state(0.1, 1, 0.1, 1));
}

TEST(CvTransition, ZeroVelocityIsFixedPoint) {
  const Vector x = state(3, 0, -7, 0);
  EXPECT_EQ(cv_transition(x, 0.1), x);
}

TEST(CvTransition, TenSteps) {
  Vector x = state(0, 1, 0, 0);
  for (int k = 0; k < 10; ++k) x = cv_transition(x, 0.1);
  EXPECT_NEAR(x(0), 1.0, 1e-15);
  EXPECT_EQ(x(1), 1.0);
}

TEST(CvTransition, MatrixForm) {
  Matrix expected = Matrix::Identity(4, 4);
  expected(0, 1) = expected(2, 3) = 0.25;
  EXPECT_EQ(cv_transition_matrix(0.25), expected);
}

TEST(RangeBearing, Axes) {
  EXPECT_EQ(range_bearing(state(100, 0, 0, 0)), Vector(Eigen::Vector2d(100, 0)));
  const Vector up = range_bearing(state(0, 0, 50, 0));
  EXPECT_DOUBLE_EQ(up(0), 50.0);
  EXPECT_DOUBLE_EQ(up(1), kPi / 2);
  const Vector back = range_bearing(state(-10, 0, 0, 0));
  EXPECT_DOUBLE_EQ(back(0), 10.0);
  EXPECT_EQ(back(1), kPi);
}

TEST(RangeBearing, NegativeZeroStillWrapsToPlusPi) {
  EXPECT_EQ(range_bearing(state(-10, 0, -0.0, 0))(1), kPi);
}

TEST(RangeBearing, AtOrigin) {
  EXPECT_THROW(range_bearing(state(0, 1, 0, 1)), AtOriginError);
  EXPECT_THROW(range_bearing(state(1e-12, 0, 0, 0)), AtOriginError);
  EXPECT_NO_THROW(range_bearing(state(1e-6, 0, 0, 0)));
}

TEST(WrapAngle, Examples) {
  EXPECT_EQ(wrap_angle(0.0), 0.0);
  EXPECT_EQ(wrap_angle(kPi), kPi);
  EXPECT_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-15);
  EXPECT_NEAR(wrap_angle(-3 * kPi / 2), kPi / 2, 1e-15);
  EXPECT_NEAR(wrap_angle(20 * kPi + 0.5), 0.5, 1e-12);
}

TEST(RangeBearingDifference, WrapsBearingOnly) {
  const Vector d =
      range_bearing_difference(Eigen::Vector2d(10, kPi - 0.1), Eigen::Vector2d(4, -kPi + 0.1));
  EXPECT_EQ(d(0), 6.0);
  EXPECT_NEAR(d(1), -0.2, 1e-12);
}

TEST(TrackingModel, Shape) {
  const SystemModel model = make_tracking_model(0.1);
  EXPECT_EQ(model.n, 4);
  EXPECT_EQ(model.m, 2);
  EXPECT_EQ(model.ts, 0.1);
  EXPECT_EQ(model.f(state(0, 1, 0, 1)), state(0.1, 1, 0.1, 1));
  EXPECT_EQ(model.h(state(100, 0, 0, 0)), Vector(Eigen::Vector2d(100, 0)));
}

TEST(LinearTrackingModel, MeasuresPositions) {
  const SystemModel model = make_linear_tracking_model(0.1);
  EXPECT_EQ(model.m, 2);
  EXPECT_EQ(model.h(state(1, 2, 3, 4)), Vector(Eigen::Vector2d(1, 3)));
}

TEST(LinearModel, AppliesMatrices) {
  Matrix f(2, 2), h(1, 2);
  f << 1, 2, 3, 4;
  h << 1, -1;
  const SystemModel model = make_linear_model(f, h, 0.5);
  EXPECT_EQ(model.n, 2);
  EXPECT_EQ(model.m, 1);
  EXPECT_EQ(model.f(Eigen::Vector2d(1, 1)), Vector(Eigen::Vector2d(3, 7)));
  EXPECT_EQ(model.h(Eigen::Vector2d(5, 2))(0), 3.0);
}

TEST(Defaults, InitializationMatrices) {
  EXPECT_EQ(default_q0(), Matrix(Eigen::Vector4d(0, 0.2, 0, 0.2).asDiagonal()));
  EXPECT_EQ(default_r0(), Matrix(Eigen::Vector2d(100, 3e-4).asDiagonal()));
}

TEST(CaseId, Names) {
  EXPECT_EQ(to_string(CaseId::A), "A");
  EXPECT_EQ(to_string(CaseId::B), "B");
  EXPECT_EQ(parse_case("B"), CaseId::B);
  EXPECT_FALSE(parse_case("C").has_value());
}

TEST(DefaultInflation, MiddleThird) {
  const InflationSchedule s = default_inflation(500);
  EXPECT_EQ(s.gamma, 5.0);
  EXPECT_EQ(s.start_epoch, 166);
  EXPECT_EQ(s.end_epoch, 333);
}

TEST(NoiseCase, CaseAAnyEpoch) {
  const NoiseCase c = make_noise_case(CaseId::A, default_r0(), default_q0(), default_inflation(500));
  for (int epoch : {0, 1, 200, 499, 100000}) {
    EXPECT_EQ(c.r_at(epoch), default_r0());
    EXPECT_FALSE(c.inflated(epoch));
  }
  EXPECT_EQ(c.q_true(), default_q0());
}

TEST(NoiseCase, CaseBInsideAndOutside) {
  const NoiseCase c = make_noise_case(CaseId::B, default_r0(), default_q0(), default_inflation(500));
  EXPECT_EQ(c.r_at(200), Matrix(5.0 * default_r0()));
  EXPECT_EQ(c.r_at(166), Matrix(5.0 * default_r0()));
  EXPECT_EQ(c.r_at(165), default_r0());
  EXPECT_EQ(c.r_at(333), default_r0());
  EXPECT_EQ(c.r_at(10), default_r0());
}

TEST(NoiseCase, RejectsBadInputs) {
  const InflationSchedule s = default_inflation(500);
  Matrix indefinite(2, 2);
  indefinite << 1, 0, 0, -1;
  EXPECT_THROW(make_noise_case(CaseId::A, indefinite, default_q0(), s), std::invalid_argument);
  EXPECT_THROW(make_noise_case(CaseId::A, Matrix::Zero(2, 2), default_q0(), s),
               std::invalid_argument);
  Matrix asym(2, 2);
  asym << 1, 0.5, 0, 1;
  EXPECT_THROW(make_noise_case(CaseId::A, asym, default_q0(), s), std::invalid_argument);
  EXPECT_THROW(make_noise_case(CaseId::A, default_r0(), -default_q0(), s), std::invalid_argument);
  EXPECT_THROW(make_noise_case(CaseId::B, default_r0(), default_q0(), {0.0, 1, 2}),
               std::invalid_argument);
  EXPECT_THROW(make_noise_case(CaseId::B, default_r0(), default_q0(), {5.0, 10, 2}),
               std::invalid_argument);
}

}  // namespace
}  // namespace afckf
