#pragma once

// End-to-end runs: simulate, measure, detect, and compare every recovered
// inner product with its theoretical bound.

#include "dynsamp/bounds.hpp"
#include "dynsamp/core.hpp"
#include "dynsamp/detector.hpp"
#include "dynsamp/sampling.hpp"
#include "dynsamp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace dynsamp {

struct ExperimentSetup {
  Scenario scenario;
  SamplerSet samplers;
  Algorithm algorithm = Algorithm::Alg1;
  ThresholdExponent exponent = ThresholdExponent::RhoBeta;
  /// truth[j][k] = <h_j, g_k>; when empty the discrete inner product is used.
  std::vector<std::vector<Real>> truth;
};

/// One (burst, sampler) comparison.
struct BoundRow {
  std::size_t burst_id = 0;
  std::size_t sampler_id = 0;
  Real t_true = 0;
  bool detected = false;
  std::optional<std::size_t> event_id;
  Real t_hat = 0;
  Real truth = 0;
  Real f_hat = 0;          ///< 0 for a missed burst
  Real empirical_error = 0;  ///< |f_hat - truth|, or |truth| for a missed burst
  Real bound = 0;
  Real margin() const { return bound - empirical_error; }
};

struct ExperimentResult {
  ValidationReport validation;
  MeasurementSeries series;
  DetectionResult detection;
  ThresholdParams params;
  std::vector<Real> g_norms;
  std::vector<Real> thresholds;  ///< Q (Alg1) or Q1 (Alg2) per sampler
  std::optional<Real> eps;       ///< only for Alg2
  std::vector<std::vector<Real>> truth;
  std::vector<BoundRow> rows;
  std::vector<std::optional<std::size_t>> burst_event;  ///< matched event per burst
  std::vector<std::size_t> unmatched_events;            ///< events with no burst within beta
  std::vector<std::size_t> undetectable;                ///< bursts within 4 beta of the horizon

  bool all_detected() const {
    for (std::size_t j = 0; j < burst_event.size(); ++j) {
      if (!burst_event[j] && std::find(undetectable.begin(), undetectable.end(), j) == undetectable.end()) {
        return false;
      }
    }
    return true;
  }
  Real max_error() const {
    Real m = 0;
    for (const auto& r : rows) {
      if (r.detected) m = std::max(m, r.empirical_error);
    }
    return m;
  }
  Real max_bound() const {
    Real m = 0;
    for (const auto& r : rows) m = std::max(m, r.bound);
    return m;
  }
  bool within_bounds() const {
    return std::all_of(rows.begin(), rows.end(), [](const BoundRow& r) { return r.margin() >= 0; });
  }
};

/// <h_j, g_k> in the scenario's own discretization.
inline std::vector<std::vector<Real>> discrete_truth(const BurstTrain& bursts, const SamplerSet& samplers) {
  std::vector<std::vector<Real>> t;
  for (const auto& b : bursts.events()) {
    std::vector<Real> row;
    for (const auto& g : samplers.samplers()) row.push_back(inner(b.shape, g));
    t.push_back(std::move(row));
  }
  return t;
}

/// Theoretical recovery bound for burst shape h and sampler g.
inline Real recovery_bound(const ExperimentSetup& s, const ThresholdParams& p, const SpaceElement& h,
                           const SpaceElement& g) {
  BoundInputs b;
  b.p = p;
  b.g_norm = norm(g);
  b.h_norm = norm(h);
  const Real modulus = semigroup_modulus(s.scenario.semigroup, h, p.beta);
  b.modulus = [modulus](Real) { return modulus; };
  if (s.algorithm == Algorithm::Alg1) return bound_thm1(b);
  return bound_thm2(b, s.scenario.bursts.decay());
}

inline std::vector<Real> sampler_norms(const SamplerSet& samplers) {
  std::vector<Real> n;
  for (const auto& g : samplers.samplers()) n.push_back(norm(g));
  return n;
}

inline ExperimentResult run_experiment(const ExperimentSetup& s) {
  const Scenario& sc = s.scenario;
  sc.check_compatible();
  ExperimentResult r;
  r.validation = validate_scenario(sc, s.samplers, s.algorithm);
  r.params = threshold_params(sc, s.samplers, s.exponent);
  r.g_norms = sampler_norms(s.samplers);
  r.thresholds = thresholds_for(r.params, r.g_norms, s.algorithm);
  if (s.algorithm == Algorithm::Alg2) r.eps = epsilon(r.params);

  r.series = generate_series(sc, s.samplers);
  r.detection = s.algorithm == Algorithm::Alg1
                    ? detect_alg1(r.series, r.params, r.g_norms, sc.params.horizon)
                    : detect_alg2(r.series, r.params, r.g_norms, sc.params.horizon);

  r.truth = s.truth.empty() ? discrete_truth(sc.bursts, s.samplers) : s.truth;
  if (r.truth.size() != sc.bursts.size()) throw DimensionError("truth table needs one row per burst");

  const Real beta = sc.params.beta;
  const auto& events = r.detection.events;
  const auto& bursts = sc.bursts.events();
  std::vector<bool> used(events.size(), false);
  r.burst_event.assign(bursts.size(), std::nullopt);
  for (std::size_t j = 0; j < bursts.size(); ++j) {
    if (bursts[j].time > sc.params.horizon - 4 * beta) r.undetectable.push_back(j);
    Real best = std::numeric_limits<Real>::infinity();
    for (std::size_t e = 0; e < events.size(); ++e) {
      const Real d = std::abs(events[e].t_hat - bursts[j].time);
      if (!used[e] && d <= beta * (1 + 1e-9) && d < best) {
        best = d;
        r.burst_event[j] = e;
      }
    }
    if (r.burst_event[j]) used[*r.burst_event[j]] = true;
  }
  for (std::size_t e = 0; e < events.size(); ++e) {
    if (!used[e]) r.unmatched_events.push_back(e);
  }

  for (std::size_t j = 0; j < bursts.size(); ++j) {
    if (r.truth[j].size() != s.samplers.size()) throw DimensionError("truth table needs one column per sampler");
    for (std::size_t k = 0; k < s.samplers.size(); ++k) {
      BoundRow row;
      row.burst_id = j;
      row.sampler_id = k;
      row.t_true = bursts[j].time;
      row.truth = r.truth[j][k];
      row.bound = recovery_bound(s, r.params, bursts[j].shape, s.samplers[k]);
      if (const auto e = r.burst_event[j]) {
        row.detected = true;
        row.event_id = *e;
        row.t_hat = events[*e].t_hat;
        row.f_hat = events[*e].f_hat[k];
        row.empirical_error = std::abs(row.f_hat - row.truth);
      } else {
        row.empirical_error = std::abs(row.truth);
      }
      r.rows.push_back(row);
    }
  }
  return r;
}

/// Same setup with a different sampling step.
inline ExperimentSetup with_beta(ExperimentSetup s, Real beta) {
  s.scenario.params.beta = beta;
  return s;
}

struct SweepRow {
  Real beta = 0;
  Real max_error = 0;
  Real bound = 0;
  bool all_detected = false;
};

/// One run per beta. Runs are independent and may execute concurrently; the
/// rows come back in the order of `betas`.
inline std::vector<SweepRow> sweep_beta(const ExperimentSetup& base, const std::vector<Real>& betas,
                                        bool concurrent = true) {
  auto one = [&base](Real beta) {
    const ExperimentResult r = run_experiment(with_beta(base, beta));
    return SweepRow{beta, r.max_error(), r.max_bound(), r.all_detected()};
  };
  std::vector<SweepRow> rows;
  if (!concurrent) {
    for (Real b : betas) rows.push_back(one(b));
    return rows;
  }
  std::vector<std::future<SweepRow>> jobs;
  for (Real b : betas) jobs.push_back(std::async(std::launch::async, one, b));
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

/// Worst-case bound over all (burst, sampler) pairs as a function of beta,
/// suitable for certify_small_beta.
inline std::function<Real(Real)> worst_bound_fn(const ExperimentSetup& s) {
  return [s](Real beta) {
    ThresholdParams p = threshold_params(s.scenario, s.samplers, s.exponent);
    p.beta = beta;
    Real worst = 0;
    for (const auto& b : s.scenario.bursts.events()) {
      for (const auto& g : s.samplers.samplers()) worst = std::max(worst, recovery_bound(s, p, b.shape, g));
    }
    return worst;
  };
}

}  // namespace dynsamp
