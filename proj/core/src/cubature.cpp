#include "afckf/cubature.hpp"

#include <cmath>
#include <string>

namespace afckf {

CubatureRule::CubatureRule(int dimension) : dimension_(dimension) {
  if (dimension < 1) {
    throw std::invalid_argument("cubature rule dimension must be >= 1, got " +
                                std::to_string(dimension));
  }
  weight_ = 1.0 / (2.0 * dimension);
  const double scale = std::sqrt(static_cast<double>(dimension));
  points_ = Matrix::Zero(dimension, 2 * dimension);
  for (int i = 0; i < dimension; ++i) {
    points_(i, i) = scale;
    points_(i, i + dimension) = -scale;
  }
}

CubatureRule make_cubature_rule(int dimension) { return CubatureRule(dimension); }

Matrix symmetrize(const Matrix& p) { return 0.5 * (p + p.transpose()); }

Matrix factor_psd(const Matrix& p) {
  if (p.rows() != p.cols() || p.rows() == 0) {
    throw NonPsdError("factor_psd: matrix must be square and non-empty");
  }
  if (!p.allFinite()) {
    throw NonPsdError("factor_psd: matrix has non-finite entries");
  }
  Eigen::LLT<Matrix> llt(p);
  if (llt.info() == Eigen::Success) {
    return llt.matrixL();
  }
  // Jitter is relative to the mean diagonal so the repair is unit-free.
  const double mean_diag = p.diagonal().cwiseAbs().mean();
  const double scale = mean_diag > 0.0 ? mean_diag : 1.0;
  const auto identity = Matrix::Identity(p.rows(), p.cols());
  for (double delta = 1e-12; delta <= 1.0000001e-6; delta *= 10.0) {
    llt.compute(p + delta * scale * identity);
    if (llt.info() == Eigen::Success) {
      return llt.matrixL();
    }
  }
  throw NonPsdError("factor_psd: factorization failed at maximum jitter 1e-6");
}

bool is_psd(const Matrix& p, double tolerance) {
  if (!p.allFinite()) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(p, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    return false;
  }
  const double trace = p.trace();
  return eig.eigenvalues().minCoeff() >= -tolerance * std::abs(trace);
}

Matrix cubature_points(const StateEstimate& estimate, const CubatureRule& rule) {
  const Matrix sqrt_cov = factor_psd(estimate.cov);
  Matrix points = sqrt_cov * rule.points();
  points.colwise() += estimate.mean;
  return points;
}

Matrix propagate_points(const Matrix& points, const VectorFunction& fn) {
  Vector first = fn(points.col(0));
  Matrix out(first.size(), points.cols());
  out.col(0) = first;
  for (Eigen::Index i = 1; i < points.cols(); ++i) {
    out.col(i) = fn(points.col(i));
  }
  return out;
}

Vector point_mean(const Matrix& points, const CubatureRule& rule) {
  return rule.weight() * points.rowwise().sum();
}

Matrix point_spread(const Matrix& points, const Vector& mean, const CubatureRule& rule) {
  const Matrix centered = points.colwise() - mean;
  return symmetrize(rule.weight() * centered * centered.transpose());
}

namespace {

// Deviations of each point from the reference, taken through diff so angular
// channels stay wrapped.
Matrix deviations(const Matrix& points, const Vector& ref, const MeasurementDifference& diff) {
  Matrix out(points.rows(), points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    out.col(i) = diff(points.col(i), ref);
  }
  return out;
}

}  // namespace

PropagatedState propagate_state(const StateEstimate& prior, const VectorFunction& f,
                                const CubatureRule& rule) {
  PropagatedState out;
  out.points = propagate_points(cubature_points(prior, rule), f);
  out.mean = point_mean(out.points, rule);
  out.spread = point_spread(out.points, out.mean, rule);
  return out;
}

StateEstimate time_update(const StateEstimate& prior, const VectorFunction& f, const Matrix& q,
                          const CubatureRule& rule) {
  PropagatedState prop = propagate_state(prior, f, rule);
  return {std::move(prop.mean), symmetrize(prop.spread + q)};
}

MeasurementPrediction predict_measurement(const StateEstimate& predicted, const VectorFunction& h,
                                          const CubatureRule& rule,
                                          const MeasurementDifference& diff) {
  MeasurementPrediction out;
  out.state_points = cubature_points(predicted, rule);
  out.points = propagate_points(out.state_points, h);
  // Average deviations from the first point, then map back through diff
  // against zero; for plain subtraction both steps reduce to the arithmetic
  // mean, for angles they keep the mean on the principal branch.
  const Vector ref = out.points.col(0);
  const Vector offset = rule.weight() * deviations(out.points, ref, diff).rowwise().sum();
  out.mean = diff(ref + offset, Vector::Zero(ref.size()));
  return out;
}

Matrix measurement_spread(const Matrix& z_points, const Vector& z_pred, const CubatureRule& rule,
                          const MeasurementDifference& diff) {
  const Matrix dz = deviations(z_points, z_pred, diff);
  return symmetrize(rule.weight() * dz * dz.transpose());
}

Matrix innovation_covariance(const Matrix& z_points, const Vector& z_pred, const Matrix& r_scaled,
                             const CubatureRule& rule, const MeasurementDifference& diff) {
  Matrix p_zz = symmetrize(measurement_spread(z_points, z_pred, rule, diff) + r_scaled);
  if (!p_zz.allFinite()) {
    throw SingularError("innovation covariance has non-finite entries");
  }
  Eigen::LDLT<Matrix> ldlt(p_zz);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-14) {
    throw SingularError("innovation covariance is not invertible");
  }
  return p_zz;
}

Matrix cross_covariance(const Matrix& x_points, const Vector& x_pred, const Matrix& z_points,
                        const Vector& z_pred, const CubatureRule& rule,
                        const MeasurementDifference& diff) {
  const Matrix dx = x_points.colwise() - x_pred;
  const Matrix dz = deviations(z_points, z_pred, diff);
  return rule.weight() * dx * dz.transpose();
}

UpdateResult measurement_update(const StateEstimate& predicted, const Matrix& p_zz,
                                const Matrix& p_xz, const Vector& z, const Vector& z_pred,
                                const MeasurementDifference& diff) {
  Eigen::LDLT<Matrix> ldlt(p_zz);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-14) {
    throw SingularError("measurement update: innovation covariance is singular");
  }
  UpdateResult out;
  // K = P_xz P_zz^{-1}, solved as P_zz K^T = P_xz^T.
  out.gain = ldlt.solve(p_xz.transpose()).transpose();
  out.innovation = diff(z, z_pred);
  out.posterior.mean = predicted.mean + out.gain * out.innovation;
  out.posterior.cov = symmetrize(predicted.cov - out.gain * p_zz * out.gain.transpose());
  if (!is_psd(out.posterior.cov)) {
    throw NonPsdError("measurement update: posterior covariance is not PSD");
  }
  return out;
}

}  // namespace afckf
