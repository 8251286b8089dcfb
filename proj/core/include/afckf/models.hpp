#pragma once

#include "afckf/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace afckf {

/// x_k = f(x_{k-1}) + w_{k-1},  z_k = h(x_k) + v_k.
struct SystemModel {
  int n = 0;
  int m = 0;
  double ts = 0.0;  // seconds
  VectorFunction f;
  VectorFunction h;
  MeasurementDifference diff = plain_difference;
};

/// Minimum range accepted by range_bearing before it reports AtOriginError.
inline constexpr double kMinRange = 1e-9;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

/// Constant-velocity step for x = [pos_x, vel_x, pos_y, vel_y].
Vector cv_transition(const Vector& x, double ts);

/// 4 x 4 matrix F with cv_transition(x, ts) == F x.
Matrix cv_transition_matrix(double ts);

/// [range (m), bearing (rad, wrapped to (-pi, pi])] of the position as seen
/// from a sensor at the origin.
Vector range_bearing(const Vector& x);

/// Range-bearing difference with the bearing channel wrapped.
Vector range_bearing_difference(const Vector& a, const Vector& b);

/// Constant-velocity target observed by a range-bearing sensor at the origin.
SystemModel make_tracking_model(double ts);

/// Constant-velocity target with direct position measurements [pos_x, pos_y].
SystemModel make_linear_tracking_model(double ts);

/// Generic linear model x' = F x, z = H x.
SystemModel make_linear_model(const Matrix& f, const Matrix& h, double ts);

enum class CaseId { A, B };

std::string to_string(CaseId id);
std::optional<CaseId> parse_case(std::string_view text);

/// Multiplicative inflation of the base measurement covariance over epochs
/// [start_epoch, end_epoch).
struct InflationSchedule {
  double gamma = 5.0;
  int start_epoch = 0;
  int end_epoch = 0;
};

/// Default Case B schedule: gamma = 5 over the middle third of a run.
InflationSchedule default_inflation(int steps);

/// True measurement-noise profile of a benchmark case.
class NoiseCase {
 public:
  NoiseCase(CaseId id, Matrix base_r, Matrix q_true, InflationSchedule schedule);

  CaseId id() const { return id_; }
  const Matrix& q_true() const { return q_true_; }
  const Matrix& base_r() const { return base_r_; }
  const InflationSchedule& schedule() const { return schedule_; }

  bool inflated(int epoch) const;

  /// True measurement covariance at the epoch. Case A returns a reference to
  /// the same matrix every time.
  const Matrix& r_at(int epoch) const;

 private:
  CaseId id_;
  Matrix base_r_;
  Matrix inflated_r_;
  Matrix q_true_;
  InflationSchedule schedule_;
};

/// Throws std::invalid_argument if base_r is not symmetric PD or q_true is
/// not symmetric PSD, or if the schedule is malformed.
NoiseCase make_noise_case(CaseId id, const Matrix& base_r, const Matrix& q_true,
                          const InflationSchedule& schedule);

/// Default process (filter Q0) and measurement (R0) covariances of the
/// tracking benchmark.
Matrix default_q0();
Matrix default_r0();

}  // namespace afckf
