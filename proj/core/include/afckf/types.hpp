#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace afckf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Maps a state (or measurement) vector to another vector.
using VectorFunction = std::function<Vector(const Vector&)>;

/// Difference a - b in measurement space. Models with angular channels
/// override it to wrap angles into (-pi, pi].
using MeasurementDifference = std::function<Vector(const Vector&, const Vector&)>;

inline Vector plain_difference(const Vector& a, const Vector& b) { return a - b; }

class FilterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A covariance could not be factorized, or an updated covariance left the
/// positive semi-definite cone.
class NonPsdError : public FilterError {
 public:
  using FilterError::FilterError;
};

/// The innovation covariance could not be inverted.
class SingularError : public FilterError {
 public:
  using FilterError::FilterError;
};

/// Range-bearing measurement requested at the sensor origin.
class AtOriginError : public FilterError {
 public:
  using FilterError::FilterError;
};

}  // namespace afckf
