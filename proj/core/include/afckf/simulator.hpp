#pragma once

// Truth generation, per-variant filter runs, Monte Carlo aggregation and
// RMSE reporting for the target-tracking benchmark.

#include "afckf/adaptive.hpp"
#include "afckf/models.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace afckf {

enum class MeasurementKind { RangeBearing, Position };

std::string to_string(MeasurementKind kind);
std::optional<MeasurementKind> parse_measurement_kind(std::string_view text);

struct ModelParams {
  MeasurementKind measurement = MeasurementKind::RangeBearing;
  double ts = 0.1;
  Matrix q0 = default_q0();      // filter's process noise
  Matrix r0 = default_r0();      // filter's nominal R, and the true R outside inflation
  Matrix q_true = default_q0();  // truth process noise
  Vector x0 = Eigen::Vector4d(100.0, 10.0, 100.0, 5.0);
  Matrix p0 = Eigen::Vector4d(100.0, 1.0, 100.0, 1.0).asDiagonal();
};

struct RunConfig {
  std::uint64_t seed = 1;
  int runs = 50;
  int steps = 500;
  std::vector<CaseId> cases{CaseId::A, CaseId::B};
  std::vector<Variant> variants = all_variants();
  ModelParams model;
  double inflation_gamma = 5.0;
  std::optional<int> inflation_start;  // epoch; default steps / 3
  std::optional<int> inflation_end;    // epoch, exclusive; default 2 * steps / 3
  AdaptiveConfig adaptive;
  int threads = 0;  // 0 = hardware concurrency
};

/// Throws std::invalid_argument naming the first violated constraint.
void validate(const RunConfig& config);

SystemModel make_system(const ModelParams& params);
FilterModel make_filter_model(const ModelParams& params);
InflationSchedule inflation_schedule(const RunConfig& config);
NoiseCase make_case(const RunConfig& config, CaseId id);

/// Per-run seed from the master seed. Distinct run indices always give
/// distinct seeds, and earlier runs do not depend on the run count.
std::uint64_t derive_seed(std::uint64_t master, int run_index);

/// Truth trajectory x_1..x_steps, measurements z_1..z_steps, and the filter's
/// initial estimate (x0 perturbed by a draw from P0, with covariance P0).
struct Truth {
  std::vector<Vector> states;
  std::vector<Vector> measurements;
  StateEstimate initial;
};

Truth generate_truth(const RunConfig& config, const NoiseCase& noise, int run_index);

struct VariantRun {
  Variant variant = Variant::CKF;
  std::vector<Vector> estimates;  // posterior mean per epoch
  std::vector<EpochTelemetry> telemetry;
  int failed_epochs = 0;
  bool aborted = false;  // more than 10% of epochs failed
};

/// Runs one filter variant over a truth record. A failed epoch holds the
/// previous posterior and is counted; the run stops once failures exceed 10%
/// of the epochs.
VariantRun run_variant(Variant variant, const Truth& truth, const FilterModel& model,
                       const AdaptiveConfig& adaptive);

/// Same as above with an explicit initial session (used to fix factors or to
/// resume).
VariantRun run_variant(FilterSession session, const Truth& truth, const FilterModel& model,
                       const AdaptiveConfig& adaptive);

struct ErrorSeries {
  std::vector<double> per_epoch;
  double average = 0.0;
};

inline constexpr int kPositionComponents[] = {0, 2};
inline constexpr int kVelocityComponents[] = {1, 3};

/// Per-epoch sqrt(mean over runs of |e_k|^2) over the selected components, and
/// its mean over epochs. estimates[r][k] pairs with truth[r][k].
ErrorSeries rmse(std::span<const std::vector<Vector>> estimates,
                 std::span<const std::vector<Vector>> truth, std::span<const int> components);

struct VariantReport {
  Variant variant = Variant::CKF;
  ErrorSeries position;  // m
  ErrorSeries velocity;  // m/s
  std::vector<double> run_position_average;  // per-run average position RMSE
  int failed_epochs = 0;
  int aborted_runs = 0;
  std::vector<std::vector<EpochTelemetry>> telemetry;  // [run][epoch]
};

struct CaseReport {
  CaseId id = CaseId::A;
  std::vector<VariantReport> variants;

  const VariantReport& at(Variant v) const;
};

struct RunReport {
  std::vector<CaseReport> cases;

  const CaseReport& at(CaseId id) const;
};

CaseReport monte_carlo_case(const RunConfig& config, CaseId id);
RunReport monte_carlo(const RunConfig& config);

}  // namespace afckf
