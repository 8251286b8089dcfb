#pragma once

// Third-degree spherical-radial cubature machinery: point generation,
// nonlinear propagation, and the covariance-form time and measurement
// updates of the cubature Kalman filter.

#include "afckf/types.hpp"

namespace afckf {

/// Mean and covariance of the state at one epoch.
struct StateEstimate {
  Vector mean;
  Matrix cov;
};

/// Process (q, n x n, PSD) and measurement (r, m x m, PD) noise covariances.
struct NoiseCovariances {
  Matrix q;
  Matrix r;
};

/// The 2L signed-axis cubature points sqrt(L) * (+/- e_i), all weighted 1/(2L).
///
/// Points are stored column-wise; column i and column i + L are negatives of
/// each other.
class CubatureRule {
 public:
  explicit CubatureRule(int dimension);

  int dimension() const { return dimension_; }
  int size() const { return 2 * dimension_; }
  double weight() const { return weight_; }

  /// L x 2L matrix of unit points.
  const Matrix& points() const { return points_; }
  Vector point(int i) const { return points_.col(i); }

 private:
  int dimension_;
  double weight_;
  Matrix points_;
};

/// Throws std::invalid_argument for dimension < 1.
CubatureRule make_cubature_rule(int dimension);

/// Returns (P + P^T) / 2, which is exactly symmetric in floating point.
Matrix symmetrize(const Matrix& p);

/// Lower-triangular S with S S^T = P.
///
/// Falls back to P + delta s I for delta = 1e-12, 1e-11, ..., 1e-6 when plain
/// Cholesky fails, where s is the mean absolute diagonal of P (1 if zero). Throws NonPsdError if P is not square, not finite, or still
/// not factorizable at the largest jitter.
Matrix factor_psd(const Matrix& p);

/// True when the smallest eigenvalue of the symmetric matrix is at least
/// -tolerance * trace(P).
bool is_psd(const Matrix& p, double tolerance = 1e-9);

/// Cubature points drawn from N(mean, cov), as columns (n x 2L).
Matrix cubature_points(const StateEstimate& estimate, const CubatureRule& rule);

/// Applies fn to every column.
Matrix propagate_points(const Matrix& points, const VectorFunction& fn);

/// Weighted mean of point columns.
Vector point_mean(const Matrix& points, const CubatureRule& rule);

/// Weighted spread sum_i w (X_i - mean)(X_i - mean)^T, symmetrized.
Matrix point_spread(const Matrix& points, const Vector& mean, const CubatureRule& rule);

/// Propagated cubature point cloud through the state transition, before any
/// process noise is added.
struct PropagatedState {
  Vector mean;
  Matrix spread;
  Matrix points;
};

PropagatedState propagate_state(const StateEstimate& prior, const VectorFunction& f,
                                const CubatureRule& rule);

/// Predicted mean and covariance: spread of f-propagated points plus q.
StateEstimate time_update(const StateEstimate& prior, const VectorFunction& f, const Matrix& q,
                          const CubatureRule& rule);

struct MeasurementPrediction {
  Vector mean;          // predicted measurement
  Matrix points;        // h applied to each state point (m x 2L)
  Matrix state_points;  // state points drawn from the predicted estimate (n x 2L)
};

MeasurementPrediction predict_measurement(const StateEstimate& predicted, const VectorFunction& h,
                                          const CubatureRule& rule,
                                          const MeasurementDifference& diff = plain_difference);

/// sum_i w d_i d_i^T with d_i = diff(Z_i, z_pred), symmetrized.
Matrix measurement_spread(const Matrix& z_points, const Vector& z_pred, const CubatureRule& rule,
                          const MeasurementDifference& diff = plain_difference);

/// Spread of the measurement points around z_pred plus r_scaled.
/// Throws SingularError if the result is not invertible to working precision.
Matrix innovation_covariance(const Matrix& z_points, const Vector& z_pred, const Matrix& r_scaled,
                             const CubatureRule& rule,
                             const MeasurementDifference& diff = plain_difference);

/// sum_i w (X_i - x_pred)(Z_i - z_pred)^T.
Matrix cross_covariance(const Matrix& x_points, const Vector& x_pred, const Matrix& z_points,
                        const Vector& z_pred, const CubatureRule& rule,
                        const MeasurementDifference& diff = plain_difference);

struct UpdateResult {
  StateEstimate posterior;
  Vector innovation;
  Matrix gain;
};

/// Kalman gain, posterior and innovation z - z_pred.
/// Throws SingularError if p_zz cannot be inverted and NonPsdError when the
/// posterior covariance falls below the PSD floor.
UpdateResult measurement_update(const StateEstimate& predicted, const Matrix& p_zz,
                                const Matrix& p_xz, const Vector& z, const Vector& z_pred,
                                const MeasurementDifference& diff = plain_difference);

}  // namespace afckf
