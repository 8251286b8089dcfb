#include "afckf/simulator.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace afckf {

std::string to_string(MeasurementKind kind) {
  return kind == MeasurementKind::RangeBearing ? "range_bearing" : "position";
}

std::optional<MeasurementKind> parse_measurement_kind(std::string_view text) {
  if (text == "range_bearing") return MeasurementKind::RangeBearing;
  if (text == "position") return MeasurementKind::Position;
  return std::nullopt;
}

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) {
    throw std::invalid_argument(message);
  }
}

bool square_of(const Matrix& a, Eigen::Index n) { return a.rows() == n && a.cols() == n; }

// V sqrt(max(lambda, 0)) so that zero-variance channels draw exactly zero.
Matrix sampling_factor(const Matrix& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Vector draw(const Matrix& factor, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector e(factor.cols());
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    e(i) = normal(rng);
  }
  return factor * e;
}

}  // namespace

void validate(const RunConfig& config) {
  require(config.runs > 0, "runs must be positive");
  require(config.steps > 0, "steps must be positive");
  require(!config.cases.empty(), "at least one case is required");
  require(!config.variants.empty(), "at least one variant is required");
  require(config.model.ts > 0.0, "model.ts must be positive");
  require(config.adaptive.window >= 2, "adaptive.window must be >= 2");
  require(config.adaptive.a_max >= 1.0, "adaptive.a_max must be >= 1");
  require(config.adaptive.eps_r > 0.0, "adaptive.eps_r must be positive");
  require(config.inflation_gamma > 0.0, "case_b.gamma must be positive");
  require(config.threads >= 0, "threads must be >= 0");
  const ModelParams& m = config.model;
  require(m.x0.size() == 4, "model.x0 must have 4 entries");
  require(square_of(m.q0, 4), "model.q0 must be 4x4");
  require(square_of(m.q_true, 4), "model.q_true must be 4x4");
  require(square_of(m.p0, 4), "model.p0 must be 4x4");
  require(square_of(m.r0, 2), "model.r0 must be 2x2");
  require(is_psd(m.q0), "model.q0 must be positive semi-definite");
  require(is_psd(m.p0), "model.p0 must be positive semi-definite");
  const InflationSchedule schedule = inflation_schedule(config);
  require(schedule.start_epoch <= schedule.end_epoch,
          "case_b.start_epoch must not exceed case_b.end_epoch");
  // Remaining covariance checks (r0 PD, q_true PSD) live in make_noise_case.
  make_noise_case(CaseId::A, m.r0, m.q_true, schedule);
}

SystemModel make_system(const ModelParams& params) {
  return params.measurement == MeasurementKind::RangeBearing
             ? make_tracking_model(params.ts)
             : make_linear_tracking_model(params.ts);
}

FilterModel make_filter_model(const ModelParams& params) {
  return {make_system(params), params.q0, params.r0};
}

InflationSchedule inflation_schedule(const RunConfig& config) {
  InflationSchedule schedule = default_inflation(config.steps);
  schedule.gamma = config.inflation_gamma;
  if (config.inflation_start) schedule.start_epoch = *config.inflation_start;
  if (config.inflation_end) schedule.end_epoch = *config.inflation_end;
  return schedule;
}

NoiseCase make_case(const RunConfig& config, CaseId id) {
  return make_noise_case(id, config.model.r0, config.model.q_true, inflation_schedule(config));
}

std::uint64_t derive_seed(std::uint64_t master, int run_index) {
  // splitmix64 finalizer over a Weyl sequence; both steps are bijections.
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(run_index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Truth generate_truth(const RunConfig& config, const NoiseCase& noise, int run_index) {
  const SystemModel system = make_system(config.model);
  std::mt19937_64 rng(derive_seed(config.seed, run_index));

  Truth truth;
  truth.initial.cov = config.model.p0;
  truth.initial.mean = config.model.x0 + draw(sampling_factor(config.model.p0), rng);

  const Matrix q_factor = sampling_factor(noise.q_true());
  const Matrix r_factor = sampling_factor(noise.base_r());
  const Matrix r_inflated_factor = sampling_factor(noise.base_r() * noise.schedule().gamma);

  truth.states.reserve(config.steps);
  truth.measurements.reserve(config.steps);
  Vector x = config.model.x0;
  for (int k = 1; k <= config.steps; ++k) {
    x = system.f(x) + draw(q_factor, rng);
    const Matrix& rf = noise.inflated(k) ? r_inflated_factor : r_factor;
    Vector z = system.h(x) + draw(rf, rng);
    if (config.model.measurement == MeasurementKind::RangeBearing) {
      z(1) = wrap_angle(z(1));
    }
    truth.states.push_back(x);
    truth.measurements.push_back(std::move(z));
  }
  return truth;
}

VariantRun run_variant(Variant variant, const Truth& truth, const FilterModel& model,
                       const AdaptiveConfig& adaptive) {
  return run_variant(make_session(variant, truth.initial, adaptive), truth, model, adaptive);
}

VariantRun run_variant(FilterSession session, const Truth& truth, const FilterModel& model,
                       const AdaptiveConfig& adaptive) {
  VariantRun run;
  run.variant = session.variant;
  const auto steps = static_cast<int>(truth.measurements.size());
  run.estimates.reserve(steps);
  run.telemetry.reserve(steps);
  const int max_failures = steps / 10;
  for (int k = 0; k < steps; ++k) {
    try {
      StepOutcome outcome = step_afckf(session, model, adaptive, truth.measurements[k]);
      session = std::move(outcome.session);
      run.telemetry.push_back(outcome.telemetry);
    } catch (const FilterError&) {
      EpochTelemetry failed;
      failed.epoch = session.epoch + 1;
      failed.variant = session.variant;
      failed.a1 = session.adaptive.a1;
      failed.a2 = session.adaptive.a2;
      failed.failed = true;
      run.telemetry.push_back(failed);
      ++session.epoch;
      if (++run.failed_epochs > max_failures) {
        run.aborted = true;
        run.estimates.push_back(session.state.mean);
        break;
      }
    }
    run.estimates.push_back(session.state.mean);
  }
  return run;
}

ErrorSeries rmse(std::span<const std::vector<Vector>> estimates,
                 std::span<const std::vector<Vector>> truth, std::span<const int> components) {
  if (estimates.size() != truth.size()) {
    throw std::invalid_argument("rmse: estimate and truth run counts differ");
  }
  ErrorSeries out;
  if (estimates.empty()) {
    return out;
  }
  const std::size_t epochs = truth.front().size();
  out.per_epoch.assign(epochs, 0.0);
  for (std::size_t r = 0; r < estimates.size(); ++r) {
    if (estimates[r].size() != epochs || truth[r].size() != epochs) {
      throw std::invalid_argument("rmse: sequences are not aligned");
    }
    for (std::size_t k = 0; k < epochs; ++k) {
      double sq = 0.0;
      for (int c : components) {
        const double e = estimates[r][k](c) - truth[r][k](c);
        sq += e * e;
      }
      out.per_epoch[k] += sq;
    }
  }
  double total = 0.0;
  for (double& v : out.per_epoch) {
    v = std::sqrt(v / static_cast<double>(estimates.size()));
    total += v;
  }
  out.average = epochs == 0 ? 0.0 : total / static_cast<double>(epochs);
  return out;
}

const VariantReport& CaseReport::at(Variant v) const {
  for (const auto& report : variants) {
    if (report.variant == v) return report;
  }
  throw std::out_of_range("variant not in case report: " + to_string(v));
}

const CaseReport& RunReport::at(CaseId id) const {
  for (const auto& report : cases) {
    if (report.id == id) return report;
  }
  throw std::out_of_range("case not in run report: " + to_string(id));
}

namespace {

struct RunSlot {
  std::vector<Vector> truth;
  std::vector<VariantRun> variants;
};

RunSlot execute_run(const RunConfig& config, const NoiseCase& noise, const FilterModel& model,
                    int run_index) {
  Truth truth = generate_truth(config, noise, run_index);
  RunSlot slot;
  slot.variants.reserve(config.variants.size());
  for (Variant v : config.variants) {
    slot.variants.push_back(run_variant(v, truth, model, config.adaptive));
  }
  slot.truth = std::move(truth.states);
  return slot;
}

}  // namespace

CaseReport monte_carlo_case(const RunConfig& config, CaseId id) {
  validate(config);
  const NoiseCase noise = make_case(config, id);
  const FilterModel model = make_filter_model(config.model);

  std::vector<RunSlot> slots(config.runs);
  unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, config.runs);
  if (threads <= 1) {
    for (int r = 0; r < config.runs; ++r) {
      slots[r] = execute_run(config, noise, model, r);
    }
  } else {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    {
      std::vector<std::jthread> workers;
      workers.reserve(threads);
      for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back([&] {
          for (int r = next++; r < config.runs && !failed; r = next++) {
            try {
              slots[r] = execute_run(config, noise, model, r);
            } catch (...) {
              if (!failed.exchange(true)) error = std::current_exception();
            }
          }
        });
      }
    }
    if (error) std::rethrow_exception(error);
  }

  // Reduce in run order so the result does not depend on scheduling.
  CaseReport report;
  report.id = id;
  for (std::size_t vi = 0; vi < config.variants.size(); ++vi) {
    VariantReport vr;
    vr.variant = config.variants[vi];
    std::vector<std::vector<Vector>> estimates;
    std::vector<std::vector<Vector>> truths;
    for (auto& slot : slots) {
      VariantRun& run = slot.variants[vi];
      vr.failed_epochs += run.failed_epochs;
      vr.telemetry.push_back(std::move(run.telemetry));
      if (run.aborted) {
        ++vr.aborted_runs;
        continue;
      }
      vr.run_position_average.push_back(rmse(std::span(&run.estimates, 1),
                                             std::span(&slot.truth, 1), kPositionComponents)
                                            .average);
      estimates.push_back(std::move(run.estimates));
      truths.push_back(slot.truth);
    }
    if (estimates.empty()) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      vr.position.average = nan;
      vr.velocity.average = nan;
    } else {
      vr.position = rmse(estimates, truths, kPositionComponents);
      vr.velocity = rmse(estimates, truths, kVelocityComponents);
    }
    report.variants.push_back(std::move(vr));
  }
  return report;
}

RunReport monte_carlo(const RunConfig& config) {
  RunReport report;
  for (CaseId id : config.cases) {
    report.cases.push_back(monte_carlo_case(config, id));
  }
  return report;
}

}  // namespace afckf
