#include "afckf/models.hpp"

#include "afckf/cubature.hpp"

#include <cmath>
#include <numbers>

namespace afckf {

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(angle, two_pi);  // [-pi, pi]
  if (wrapped <= -std::numbers::pi) {
    wrapped += two_pi;
  }
  return wrapped;
}

Vector cv_transition(const Vector& x, double ts) {
  Vector out = x;
  out(0) += ts * x(1);
  out(2) += ts * x(3);
  return out;
}

Matrix cv_transition_matrix(double ts) {
  Matrix f = Matrix::Identity(4, 4);
  f(0, 1) = ts;
  f(2, 3) = ts;
  return f;
}

Vector range_bearing(const Vector& x) {
  const double range = std::hypot(x(0), x(2));
  if (range < kMinRange) {
    throw AtOriginError("range_bearing: position coincides with the sensor origin");
  }
  Vector z(2);
  z << range, wrap_angle(std::atan2(x(2), x(0)));
  return z;
}

Vector range_bearing_difference(const Vector& a, const Vector& b) {
  Vector d = a - b;
  d(1) = wrap_angle(d(1));
  return d;
}

SystemModel make_tracking_model(double ts) {
  SystemModel model;
  model.n = 4;
  model.m = 2;
  model.ts = ts;
  model.f = [ts](const Vector& x) { return cv_transition(x, ts); };
  model.h = [](const Vector& x) { return range_bearing(x); };
  model.diff = range_bearing_difference;
  return model;
}

SystemModel make_linear_tracking_model(double ts) {
  Matrix h = Matrix::Zero(2, 4);
  h(0, 0) = 1.0;
  h(1, 2) = 1.0;
  SystemModel model = make_linear_model(cv_transition_matrix(ts), h, ts);
  // cv_transition is cheaper than the generic product and gives the same values.
  model.f = [ts](const Vector& x) { return cv_transition(x, ts); };
  return model;
}

SystemModel make_linear_model(const Matrix& f, const Matrix& h, double ts) {
  SystemModel model;
  model.n = static_cast<int>(f.rows());
  model.m = static_cast<int>(h.rows());
  model.ts = ts;
  model.f = [f](const Vector& x) -> Vector { return f * x; };
  model.h = [h](const Vector& x) -> Vector { return h * x; };
  return model;
}

std::string to_string(CaseId id) { return id == CaseId::A ? "A" : "B"; }

std::optional<CaseId> parse_case(std::string_view text) {
  if (text == "A" || text == "a") return CaseId::A;
  if (text == "B" || text == "b") return CaseId::B;
  return std::nullopt;
}

InflationSchedule default_inflation(int steps) { return {5.0, steps / 3, (2 * steps) / 3}; }

NoiseCase::NoiseCase(CaseId id, Matrix base_r, Matrix q_true, InflationSchedule schedule)
    : id_(id),
      base_r_(std::move(base_r)),
      inflated_r_(schedule.gamma * base_r_),
      q_true_(std::move(q_true)),
      schedule_(schedule) {}

bool NoiseCase::inflated(int epoch) const {
  return id_ == CaseId::B && epoch >= schedule_.start_epoch && epoch < schedule_.end_epoch;
}

const Matrix& NoiseCase::r_at(int epoch) const { return inflated(epoch) ? inflated_r_ : base_r_; }

namespace {

bool symmetric(const Matrix& a) {
  return a.rows() == a.cols() && (a - a.transpose()).cwiseAbs().maxCoeff() <=
                                     1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff());
}

}  // namespace

NoiseCase make_noise_case(CaseId id, const Matrix& base_r, const Matrix& q_true,
                          const InflationSchedule& schedule) {
  if (base_r.size() == 0 || !symmetric(base_r)) {
    throw std::invalid_argument("measurement covariance must be square and symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(base_r, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("measurement covariance must be positive definite");
  }
  if (q_true.size() == 0 || !symmetric(q_true) || !is_psd(q_true)) {
    throw std::invalid_argument("process covariance must be symmetric positive semi-definite");
  }
  if (!(schedule.gamma > 0.0) || schedule.start_epoch > schedule.end_epoch) {
    throw std::invalid_argument("inflation schedule needs gamma > 0 and start <= end");
  }
  return NoiseCase(id, base_r, q_true, schedule);
}

Matrix default_q0() { return Eigen::Vector4d(0.0, 0.2, 0.0, 0.2).asDiagonal(); }

Matrix default_r0() { return Eigen::Vector2d(100.0, 3e-4).asDiagonal(); }

}  // namespace afckf
