#pragma once

// Innovation/residual windows, the transitive (fading) factors a1 and a2,
// windowed Q*/R* estimators, and the per-epoch adaptive filter step.

#include "afckf/cubature.hpp"
#include "afckf/models.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace afckf {

enum class Variant { CKF, ACKF, AFCKF_single, AFCKF_P, AFCKF_R };

std::string to_string(Variant variant);
std::optional<Variant> parse_variant(std::string_view text);
const std::vector<Variant>& all_variants();

struct AdaptiveConfig {
  int window = 30;        // N_w, epochs
  double a_max = 25.0;    // upper clamp of both transitive factors
  double eps_r = 1e-8;    // relative eigenvalue floor of R*
  bool estimate_q = false;
};

/// Fixed-width history of innovation and residual vectors, oldest first.
class SlidingWindow {
 public:
  explicit SlidingWindow(int width);

  void push(Vector innovation, Vector residual);

  int width() const { return width_; }
  int size() const { return static_cast<int>(innovations_.size()); }
  bool empty() const { return innovations_.empty(); }
  bool full() const { return size() == width_; }

  std::span<const Vector> innovations() const { return innovations_; }
  std::span<const Vector> residuals() const { return residuals_; }

 private:
  int width_;
  std::vector<Vector> innovations_;
  std::vector<Vector> residuals_;
};

enum class Centering { Uncentered, Centered };

/// Uncentered: (1/N) sum v v^T. Centered: (1/(N-1)) sum (v - mean)(v - mean)^T.
/// Throws std::invalid_argument on an empty window, or N < 2 when centered.
Matrix windowed_covariance(std::span<const Vector> samples, Centering centering);

/// z - h(x_posterior).
Vector residual(const Vector& z, const Vector& h_of_posterior,
                const MeasurementDifference& diff = plain_difference);

struct FactorResult {
  double value = 1.0;
  bool degenerate = false;  // denominator trace was <= eps; value forced to 1
};

/// P-adaption factor. 1 when tr(c_hat) <= tr(p_zz); otherwise
/// tr(c_hat - r) / tr(p_zz - r) clamped to [1, a_max].
FactorResult compute_a1(const Matrix& c_hat, const Matrix& p_zz, const Matrix& r, double a_max);

/// R-adaption factor. 1 when tr(c_hat) <= tr(c_theory); otherwise
/// tr(c_hat) / tr(c_theory) clamped to [1, a_max].
FactorResult compute_a2(const Matrix& c_hat, const Matrix& c_theory, double a_max);

/// a1 * spread + q, symmetrized.
Matrix apply_p_adaption(const Matrix& spread, const Matrix& q, double a1);

/// a2 * r.
Matrix apply_r_adaption(const Matrix& r, double a2);

struct FlooredMatrix {
  Matrix value;
  bool floored = false;
};

/// Raises every eigenvalue below `floor` to `floor`. Returns the symmetrized
/// input untouched when nothing needs raising.
FlooredMatrix floor_eigenvalues(const Matrix& a, double floor);

/// Innovation-based measurement-noise estimate
/// (1/N) sum v v^T - hph, eigenvalue-floored at eps_r * max(tr(C), tr(hph)).
FlooredMatrix estimate_r_star(const SlidingWindow& window, const Matrix& hph, double eps_r);

/// Measurement-space process-noise estimate h Q* h^T from paired
/// innovation/residual samples:
/// (1/N) sum (v - e)(v - e)^T - h S h^T + h P h^T,
/// where S is the propagated spread that entered the prediction and P the
/// posterior covariance. Throws std::invalid_argument on an empty window.
Matrix estimate_q_star(const SlidingWindow& window, const Matrix& hsh_prev,
                       const Matrix& hph_post);

struct StateSpaceQ {
  Matrix q;
  bool rank_deficient = false;
};

/// Maps h Q h^T back to state space with the (pseudo-)inverse of the m x n
/// measurement Jacobian. Only the observable part is recovered when
/// rank(H) < n, which is flagged.
StateSpaceQ recover_state_q(const Matrix& hqh, const Matrix& h_jacobian);

/// Current transitive factors and noise estimates of a filter session.
struct AdaptiveState {
  double a1 = 1.0;
  double a2 = 1.0;
  Matrix q_star;  // measurement space (m x m); empty until estimated
  Matrix r_star;  // empty until the window first fills
};

/// One record per epoch.
struct EpochTelemetry {
  int epoch = 0;
  Variant variant = Variant::CKF;
  double a1 = 1.0;
  double a2 = 1.0;
  double tr_c_hat = 0.0;  // 0 during warm-up
  double tr_pzz = 0.0;
  double tr_r_star = 0.0;  // 0 until R* exists
  double tr_q_star = 0.0;  // 0 unless Q* estimation is enabled
  bool floored = false;
  bool degenerate = false;
  bool failed = false;
};

/// The filter's own model: dynamics plus assumed noise covariances.
struct FilterModel {
  SystemModel system;
  Matrix q;  // assumed process noise
  Matrix r;  // nominal measurement noise
};

/// Everything that evolves across epochs for one filter instance.
struct FilterSession {
  Variant variant = Variant::CKF;
  StateEstimate state;
  SlidingWindow window{30};
  AdaptiveState adaptive;
  int epoch = 0;  // number of completed epochs
};

FilterSession make_session(Variant variant, StateEstimate initial, const AdaptiveConfig& config);

struct StepOutcome {
  FilterSession session;
  EpochTelemetry telemetry;
};

/// One full epoch: time update, P-adaption, measurement prediction,
/// R-adaption, gain and update, window push and R* refresh, per the variant.
///
/// Factors stay at 1 while fewer than N_w epochs have completed. Throws
/// NonPsdError / SingularError / AtOriginError on numerical failure; the input
/// session is never modified.
StepOutcome step_afckf(const FilterSession& session, const FilterModel& model,
                       const AdaptiveConfig& config, const Vector& z);

}  // namespace afckf
