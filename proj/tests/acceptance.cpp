#include "afckf/simulator.hpp"
#include "properties.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace afckf::test {
namespace {

constexpr std::uint64_t kSeed = 2026;

struct Verdict {
  bool passed;
  std::string detail;
};

std::string num(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", value);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Matrix position_selector() {
  Matrix h = Matrix::Zero(2, 4);
  h(0, 0) = h(1, 2) = 1.0;
  return h;
}

Verdict linear_oracle() {
  const auto start = std::chrono::steady_clock::now();
  const double ts = 0.1;
  const Matrix f = cv_transition_matrix(ts);
  const Matrix h = position_selector();
  const Matrix q = default_q0();
  const Matrix r = Eigen::Vector2d(4.0, 9.0).asDiagonal();
  const StateEstimate initial{Eigen::Vector4d(100, 10, 100, 5),
                              Eigen::Vector4d(100, 1, 100, 1).asDiagonal()};
  Rng rng(kSeed);
  const LinearSimulation sim = simulate_linear(f, h, q, r, initial.mean, 200, rng);

  const FilterModel model{make_linear_tracking_model(ts), q, r};
  const AdaptiveConfig config;
  FilterSession session = make_session(Variant::CKF, initial, config);
  LinearKalman oracle{f, h, q, r, initial.mean, initial.cov};
  double worst = 0.0;
  for (const Vector& z : sim.measurements) {
    session = step_afckf(session, model, config, z).session;
    oracle.step(z);
    worst = std::max({worst, max_abs_diff(session.state.mean, oracle.x),
                      max_abs_diff(session.state.cov, oracle.p)});
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-9 && elapsed < 1.0,
          "max abs error " + num(worst) + " over 200 epochs, " + num(elapsed) + " s"};
}

Verdict cubature_exactness() {
  Rng rng(kSeed);
  constexpr int kDims[] = {1, 2, 4, 8};
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int n = kDims[i % 4];
    const Matrix a = rng.matrix(n, n);
    const Vector b = rng.vector(n);
    const StateEstimate prior{rng.vector(n), i % 2 ? rng.spd(n) : rng.psd(n, rng.integer(1, n))};
    const Matrix q = rng.psd(n, rng.integer(1, n));
    const VectorFunction fn = [&](const Vector& x) -> Vector { return a * x + b; };
    const StateEstimate out = time_update(prior, fn, q, CubatureRule(n));
    worst = std::max({worst, relative_frobenius(out.mean, a * prior.mean + b),
                      relative_frobenius(out.cov, a * prior.cov * a.transpose() + q)});
  }
  return {worst <= 1e-11, "worst relative Frobenius error " + num(worst) + " over 100 cases"};
}

Verdict neutrality() {
  RunConfig config;
  config.adaptive.a_max = 1.0;
  const FilterModel model = make_filter_model(config.model);
  int compared = 0;
  for (CaseId id : {CaseId::A, CaseId::B}) {
    config.seed = kSeed;
    const NoiseCase noise = make_case(config, id);
    for (int run = 0; run < 5; ++run) {
      const Truth truth = generate_truth(config, noise, run);
      const VariantRun ckf = run_variant(Variant::CKF, truth, model, config.adaptive);
      for (Variant v : {Variant::AFCKF_P, Variant::AFCKF_R}) {
        const VariantRun other = run_variant(v, truth, model, config.adaptive);
        ++compared;
        if (other.estimates.size() != ckf.estimates.size()) {
          return {false, to_string(v) + " trajectory length differs"};
        }
        for (std::size_t k = 0; k < ckf.estimates.size(); ++k) {
          if (other.estimates[k] != ckf.estimates[k] ||
              other.telemetry[k].tr_pzz != ckf.telemetry[k].tr_pzz) {
            return {false, to_string(v) + " case " + to_string(id) + " run " +
                               std::to_string(run) + " differs at epoch " +
                               std::to_string(k + 1)};
          }
        }
      }
    }
  }
  return {true, std::to_string(compared) + " trajectories bit-identical to CKF, 500 epochs each"};
}

Verdict matched_noise_factors() {
  RunConfig config;
  const FilterModel model = make_filter_model(config.model);
  const int from = config.adaptive.window - 1;  // telemetry index of epoch N_w
  bool ok = true;
  std::string detail;
  for (Variant v : {Variant::AFCKF_single, Variant::AFCKF_P, Variant::AFCKF_R}) {
    double a1 = 0.0, a2 = 0.0;
    for (int seed = 0; seed < 20; ++seed) {
      config.seed = kSeed + seed;
      const Truth truth = generate_truth(config, make_case(config, CaseId::A), 0);
      const auto tel = run_variant(v, truth, model, config.adaptive).telemetry;
      double s1 = 0.0, s2 = 0.0;
      for (std::size_t k = from; k < tel.size(); ++k) {
        s1 += tel[k].a1;
        s2 += tel[k].a2;
      }
      a1 += s1 / static_cast<double>(tel.size() - from) / 20.0;
      a2 += s2 / static_cast<double>(tel.size() - from) / 20.0;
    }
    ok = ok && a1 >= 0.9 && a1 <= 1.3 && a2 >= 0.9 && a2 <= 1.3;
    detail += (detail.empty() ? "" : "; ") + to_string(v) + " a1 " + num(a1) + " a2 " + num(a2);
  }
  return {ok, detail};
}

Verdict mismatch_response() {
  RunConfig config;
  config.seed = kSeed;
  config.variants = {Variant::AFCKF_R};
  const InflationSchedule sched = inflation_schedule(config);
  const int nw = config.adaptive.window;
  const CaseReport report = monte_carlo_case(config, CaseId::B);
  const auto& runs = report.at(Variant::AFCKF_R).telemetry;
  int good = 0;
  double inside_total = 0.0;
  for (const auto& tel : runs) {
    // Telemetry index e - 1 holds epoch e.
    double inside = 0.0;
    for (int e = sched.start_epoch; e < sched.end_epoch; ++e) inside += tel[e - 1].a2;
    inside /= sched.end_epoch - sched.start_epoch;
    inside_total += inside;
    bool recovered = false;
    const int last = std::min(sched.end_epoch + 2 * nw, static_cast<int>(tel.size()));
    for (int e = sched.end_epoch + 1; e <= last && !recovered; ++e) {
      double trailing = 0.0;
      for (int j = e - nw + 1; j <= e; ++j) trailing += tel[j - 1].a2;
      recovered = trailing / nw < 1.2;
    }
    if (inside > 1.5 && recovered) ++good;
  }
  const int total = static_cast<int>(runs.size());
  return {10 * good >= 9 * total, std::to_string(good) + "/" + std::to_string(total) +
                                      " runs respond and recover, mean in-window a2 " +
                                      num(inside_total / total)};
}

Verdict r_star_consistency() {
  RunConfig config;
  config.seed = kSeed;
  config.runs = 1;
  config.model.measurement = MeasurementKind::Position;
  config.model.r0 = Eigen::Vector2d(2.0, 0.5).asDiagonal();
  config.adaptive.window = 30;
  const Truth truth = generate_truth(config, make_case(config, CaseId::A), 0);
  const auto tel =
      run_variant(Variant::ACKF, truth, make_filter_model(config.model), config.adaptive).telemetry;
  double sum = 0.0;
  for (std::size_t k = tel.size() - 100; k < tel.size(); ++k) sum += tel[k].tr_r_star;
  const double mean = sum / 100.0;
  const double rel = std::abs(mean - 2.5) / 2.5;
  return {rel <= 0.2, "mean tr R* " + num(mean) + " vs true 2.5 (" + num(100 * rel) + "% off)"};
}

Verdict benchmark_ordering() {
  RunConfig config;
  config.seed = kSeed;
  const auto start = std::chrono::steady_clock::now();
  const RunReport report = monte_carlo(config);
  const double elapsed = seconds_since(start);
  bool ok = elapsed < 60.0;
  std::string detail;
  for (const CaseReport& c : report.cases) {
    auto pos = [&](Variant v) { return c.at(v).position.average; };
    const double ckf = pos(Variant::CKF), ackf = pos(Variant::ACKF),
                 single = pos(Variant::AFCKF_single), p = pos(Variant::AFCKF_P),
                 r = pos(Variant::AFCKF_R);
    const bool ordered = ckf > ackf && ackf >= single && single >= p && p >= r;
    const bool halved = r <= 0.5 * ckf;
    ok = ok && ordered && halved;
    detail += "case " + to_string(c.id) + " CKF " + num(ckf) + " ACKF " + num(ackf) +
              " single " + num(single) + " P " + num(p) + " R " + num(r) +
              (ordered ? "" : " (order violated)") + (halved ? "" : " (improvement < 50%)") +
              "; ";
  }
  return {ok, detail + num(elapsed) + " s"};
}

Verdict innovation_residual_identity() {
  const double a = 0.9, qv = 0.5, rv = 1.0;
  const Matrix f = Matrix::Constant(1, 1, a);
  const Matrix h = Matrix::Identity(1, 1);
  const Matrix q = Matrix::Constant(1, 1, qv);
  const Matrix r = Matrix::Constant(1, 1, rv);
  const StateEstimate initial{Vector::Zero(1), Matrix::Identity(1, 1)};
  constexpr int kEpochs = 100000;
  constexpr int kBurnIn = 200;
  Rng rng(kSeed);
  const LinearSimulation sim = simulate_linear(f, h, q, r, initial.mean, kEpochs, rng);
  const FilterModel model{make_linear_model(f, h, 1.0), q, r};
  const AdaptiveConfig config;
  FilterSession session = make_session(Variant::CKF, initial, config);
  double sum = 0.0, sum_sq = 0.0, hph_pred = 0.0;
  for (int k = 0; k < kEpochs; ++k) {
    const StepOutcome out = step_afckf(session, model, config, sim.measurements[k]);
    session = out.session;
    if (k < kBurnIn) continue;
    const double d = session.window.innovations().back()(0) - session.window.residuals().back()(0);
    sum += d * d;
    sum_sq += d * d * d * d;
    hph_pred = out.telemetry.tr_pzz - rv;
  }
  const int used = kEpochs - kBurnIn;
  const double mean = sum / used;
  const double se = std::sqrt((sum_sq / used - mean * mean) / used);
  const double expected = hph_pred - session.state.cov(0, 0);
  const double z = (mean - expected) / se;
  return {std::abs(z) <= 3.0, "sample " + num(mean) + " vs steady state " + num(expected) + " (" +
                                  num(z) + " SE)"};
}

Verdict invariant_suite() {
  int failed = 0;
  std::string names;
  const auto& checks = all_property_checks();
  for (const PropertyCheck& check : checks) {
    const PropertyResult result = check.run(20260419);
    if (!result.passed) {
      ++failed;
      names += " " + check.name;
    }
  }
  const int total = static_cast<int>(checks.size());
  return {failed == 0, std::to_string(total - failed) + "/" + std::to_string(total) +
                           " property checks pass" + (failed ? ", failing:" + names : "")};
}

}  // namespace
}  // namespace afckf::test

int main() {
  using namespace afckf::test;
  struct Criterion {
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {"linear oracle equivalence", linear_oracle},
      {"cubature exactness", cubature_exactness},
      {"neutrality", neutrality},
      {"matched-noise factors", matched_noise_factors},
      {"mismatch response", mismatch_response},
      {"R* consistency", r_star_consistency},
      {"benchmark ordering", benchmark_ordering},
      {"innovation-residual identity", innovation_residual_identity},
      {"invariant suite", invariant_suite},
  };
  int failures = 0;
  int index = 1;
  for (const Criterion& c : criteria) {
    Verdict v{false, ""};
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.passed) ++failures;
    std::printf("criterion %d %s: %s (%s)\n", index++, v.passed ? "PASS" : "FAIL", c.name,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
