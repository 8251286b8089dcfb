#include "afckf/adaptive.hpp"

#include <algorithm>
#include <cmath>

namespace afckf {

std::string to_string(Variant variant) {
  switch (variant) {
    case Variant::CKF: return "CKF";
    case Variant::ACKF: return "ACKF";
    case Variant::AFCKF_single: return "AFCKF_single";
    case Variant::AFCKF_P: return "AFCKF_P";
    case Variant::AFCKF_R: return "AFCKF_R";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view text) {
  for (Variant v : all_variants()) {
    if (text == to_string(v)) return v;
  }
  return std::nullopt;
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> variants{Variant::CKF, Variant::ACKF, Variant::AFCKF_single,
                                             Variant::AFCKF_P, Variant::AFCKF_R};
  return variants;
}

SlidingWindow::SlidingWindow(int width) : width_(width) {
  if (width < 1) {
    throw std::invalid_argument("sliding window width must be >= 1");
  }
  innovations_.reserve(width);
  residuals_.reserve(width);
}

void SlidingWindow::push(Vector innovation, Vector residual) {
  if (full()) {
    innovations_.erase(innovations_.begin());
    residuals_.erase(residuals_.begin());
  }
  innovations_.push_back(std::move(innovation));
  residuals_.push_back(std::move(residual));
}

Matrix windowed_covariance(std::span<const Vector> samples, Centering centering) {
  if (samples.empty()) {
    throw std::invalid_argument("windowed_covariance: empty window");
  }
  const auto count = static_cast<double>(samples.size());
  const auto dim = samples.front().size();
  Matrix sum = Matrix::Zero(dim, dim);
  if (centering == Centering::Uncentered) {
    for (const Vector& v : samples) {
      sum.noalias() += v * v.transpose();
    }
    return sum / count;
  }
  if (samples.size() < 2) {
    throw std::invalid_argument("windowed_covariance: centered estimate needs at least 2 samples");
  }
  Vector mean = Vector::Zero(dim);
  for (const Vector& v : samples) {
    mean += v;
  }
  mean /= count;
  for (const Vector& v : samples) {
    const Vector d = v - mean;
    sum.noalias() += d * d.transpose();
  }
  return sum / (count - 1.0);
}

Vector residual(const Vector& z, const Vector& h_of_posterior, const MeasurementDifference& diff) {
  return diff(z, h_of_posterior);
}

FactorResult compute_a1(const Matrix& c_hat, const Matrix& p_zz, const Matrix& r, double a_max) {
  const double tr_c = c_hat.trace();
  const double tr_pzz = p_zz.trace();
  // Equality up to rounding counts as "no mismatch".
  if (tr_c <= tr_pzz * (1.0 + 1e-12)) {
    return {};
  }
  const double denominator = tr_pzz - r.trace();
  if (denominator <= 1e-12 * std::abs(tr_pzz)) {
    return {1.0, true};
  }
  return {std::clamp((tr_c - r.trace()) / denominator, 1.0, a_max), false};
}

FactorResult compute_a2(const Matrix& c_hat, const Matrix& c_theory, double a_max) {
  const double tr_c = c_hat.trace();
  const double tr_theory = c_theory.trace();
  if (!(tr_theory > 1e-12 * std::abs(tr_c)) || tr_theory <= 0.0) {
    return {1.0, true};
  }
  if (tr_c <= tr_theory * (1.0 + 1e-12)) {
    return {};
  }
  return {std::clamp(tr_c / tr_theory, 1.0, a_max), false};
}

Matrix apply_p_adaption(const Matrix& spread, const Matrix& q, double a1) {
  return symmetrize(a1 * spread + q);
}

Matrix apply_r_adaption(const Matrix& r, double a2) { return a2 * r; }

FlooredMatrix floor_eigenvalues(const Matrix& a, double floor) {
  const Matrix sym = symmetrize(a);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.eigenvalues().minCoeff() >= floor) {
    return {sym, false};
  }
  const Vector clipped = eig.eigenvalues().cwiseMax(floor);
  const Matrix& basis = eig.eigenvectors();
  return {symmetrize(basis * clipped.asDiagonal() * basis.transpose()), true};
}

FlooredMatrix estimate_r_star(const SlidingWindow& window, const Matrix& hph, double eps_r) {
  const Matrix c_hat = windowed_covariance(window.innovations(), Centering::Uncentered);
  double scale = std::max(c_hat.trace(), hph.trace());
  if (!(scale > 0.0)) {
    scale = 1.0;
  }
  return floor_eigenvalues(c_hat - hph, eps_r * scale);
}

Matrix estimate_q_star(const SlidingWindow& window, const Matrix& hsh_prev,
                       const Matrix& hph_post) {
  if (window.empty()) {
    throw std::invalid_argument("estimate_q_star: empty window");
  }
  const auto innovations = window.innovations();
  const auto residuals = window.residuals();
  std::vector<Vector> differences;
  differences.reserve(innovations.size());
  for (std::size_t j = 0; j < innovations.size(); ++j) {
    differences.push_back(innovations[j] - residuals[j]);
  }
  return symmetrize(windowed_covariance(differences, Centering::Uncentered) - hsh_prev +
                    hph_post);
}

StateSpaceQ recover_state_q(const Matrix& hqh, const Matrix& h_jacobian) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(h_jacobian);
  const Matrix pinv = cod.pseudoInverse();
  return {symmetrize(pinv * hqh * pinv.transpose()), cod.rank() < h_jacobian.cols()};
}

FilterSession make_session(Variant variant, StateEstimate initial, const AdaptiveConfig& config) {
  FilterSession session;
  session.variant = variant;
  session.state = std::move(initial);
  session.window = SlidingWindow(config.window);
  return session;
}

namespace {

bool uses_factors(Variant v) {
  return v == Variant::AFCKF_single || v == Variant::AFCKF_P || v == Variant::AFCKF_R;
}

bool refreshes_r_star(Variant v) { return v == Variant::ACKF || v == Variant::AFCKF_R; }

// Predicted covariance for a given a1. AFCKF_single fades the whole predicted
// covariance, the P-adaptive variants only the propagated spread.
Matrix predicted_covariance(Variant v, const PropagatedState& prop, const Matrix& q, double a1) {
  if (v == Variant::AFCKF_single && a1 != 1.0) {
    return apply_p_adaption(prop.spread + q, Matrix::Zero(q.rows(), q.cols()), a1);
  }
  return apply_p_adaption(prop.spread, q, a1);
}

Matrix spread_through(const StateEstimate& estimate, const SystemModel& sys,
                      const CubatureRule& rule) {
  const MeasurementPrediction mp = predict_measurement(estimate, sys.h, rule, sys.diff);
  return measurement_spread(mp.points, mp.mean, rule, sys.diff);
}

}  // namespace

StepOutcome step_afckf(const FilterSession& session, const FilterModel& model,
                       const AdaptiveConfig& config, const Vector& z) {
  const SystemModel& sys = model.system;
  const CubatureRule rule(sys.n);
  const Variant variant = session.variant;

  EpochTelemetry tel;
  tel.epoch = session.epoch + 1;
  tel.variant = variant;

  const bool use_r_star = variant == Variant::ACKF && session.adaptive.r_star.size() > 0;
  const Matrix& r_base = use_r_star ? session.adaptive.r_star : model.r;

  const PropagatedState prop = propagate_state(session.state, sys.f, rule);
  StateEstimate predicted{prop.mean, predicted_covariance(variant, prop, model.q, 1.0)};
  MeasurementPrediction mp = predict_measurement(predicted, sys.h, rule, sys.diff);
  Matrix hph = measurement_spread(mp.points, mp.mean, rule, sys.diff);

  Matrix r_used = r_base;
  double a1 = 1.0;
  double a2 = 1.0;
  if (uses_factors(variant) && session.epoch >= config.window) {
    // Window estimate over the newest N_w - 1 stored innovations plus the
    // current one.
    const auto stored = session.window.innovations();
    const std::size_t keep = std::min<std::size_t>(stored.size(), config.window - 1);
    std::vector<Vector> samples(stored.end() - static_cast<std::ptrdiff_t>(keep), stored.end());
    samples.push_back(sys.diff(z, mp.mean));
    const Centering centering =
        variant == Variant::AFCKF_P ? Centering::Centered : Centering::Uncentered;
    const Matrix c_hat = windowed_covariance(samples, centering);
    tel.tr_c_hat = c_hat.trace();

    if (variant == Variant::AFCKF_R) {
      const FactorResult f2 = compute_a2(c_hat, hph + r_base, config.a_max);
      a2 = f2.value;
      tel.degenerate = tel.degenerate || f2.degenerate;
      r_used = apply_r_adaption(r_base, a2);
    }
    // With a2 from the trace ratio, tr(c_hat - a2 R) / tr(hph) equals a2, so
    // after R-adaption the P factor only takes up excess a clamped a2 left.
    if (variant != Variant::AFCKF_R || a2 >= config.a_max) {
      const FactorResult f1 = compute_a1(c_hat, hph + r_used, r_used, config.a_max);
      a1 = f1.value;
      tel.degenerate = tel.degenerate || f1.degenerate;
    }

    if (a1 != 1.0) {
      predicted.cov = predicted_covariance(variant, prop, model.q, a1);
      mp = predict_measurement(predicted, sys.h, rule, sys.diff);
      hph = measurement_spread(mp.points, mp.mean, rule, sys.diff);
    }
  }

  const Matrix p_zz = innovation_covariance(mp.points, mp.mean, r_used, rule, sys.diff);
  const Matrix p_xz =
      cross_covariance(mp.state_points, predicted.mean, mp.points, mp.mean, rule, sys.diff);
  UpdateResult update = measurement_update(predicted, p_zz, p_xz, z, mp.mean, sys.diff);

  StepOutcome out{session, tel};
  FilterSession& next = out.session;
  Vector eta = residual(z, sys.h(update.posterior.mean), sys.diff);
  next.window.push(update.innovation, std::move(eta));

  if (refreshes_r_star(variant) && next.window.full()) {
    FlooredMatrix r_star = estimate_r_star(next.window, hph, config.eps_r);
    next.adaptive.r_star = std::move(r_star.value);
    out.telemetry.floored = r_star.floored;
  }
  if (config.estimate_q && next.window.full()) {
    const Matrix hsh_prev = spread_through({prop.mean, a1 * prop.spread}, sys, rule);
    const Matrix hph_post = spread_through(update.posterior, sys, rule);
    next.adaptive.q_star = estimate_q_star(next.window, hsh_prev, hph_post);
    out.telemetry.tr_q_star = next.adaptive.q_star.trace();
  }

  next.state = std::move(update.posterior);
  next.adaptive.a1 = a1;
  next.adaptive.a2 = a2;
  next.epoch = session.epoch + 1;

  out.telemetry.a1 = a1;
  out.telemetry.a2 = a2;
  out.telemetry.tr_pzz = p_zz.trace();
  if (next.adaptive.r_star.size() > 0) {
    out.telemetry.tr_r_star = next.adaptive.r_star.trace();
  }
  return out;
}

}  // namespace afckf
