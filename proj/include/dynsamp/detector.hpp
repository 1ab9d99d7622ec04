#pragma once

// Burst detection thresholds, scenario validation and the two scan
// algorithms (exponential decay / general decay with a minimum gap D).

#include "dynsamp/core.hpp"
#include "dynsamp/forcing.hpp"
#include "dynsamp/sampling.hpp"
#include "dynsamp/semigroup.hpp"
#include "dynsamp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace dynsamp {

enum class Algorithm { Alg1, Alg2 };

inline const char* to_string(Algorithm a) { return a == Algorithm::Alg1 ? "alg1" : "alg2"; }

/// Which factor multiplies the background bound K in the threshold:
/// RhoBeta uses (e^{rho beta} - 1), Beta uses (e^{beta} - 1).
enum class ThresholdExponent { RhoBeta, Beta };

struct ThresholdParams {
  Real M = 1;
  Real a = 0;
  Real rho = 1;
  Real beta = 0.01;
  Real sigma = 0;
  Real K = 0;  ///< sup ||eta||
  Real L = 0;  ///< Lipschitz constant of eta
  Real H = 0;  ///< sup ||h_j||
  Real R = 0;  ///< sup ||g||
  Real D = 0;
  ThresholdExponent exponent = ThresholdExponent::RhoBeta;

  Real C() const { return step_bound({M, a}, beta); }

  void check() const {
    if (!(M >= 1)) throw DomainError("threshold params: M must be >= 1");
    if (!(rho > 0) || !(beta > 0)) throw DomainError("threshold params: rho and beta must be > 0");
    if (sigma < 0 || K < 0 || L < 0 || H < 0 || R < 0 || D < 0) {
      throw DomainError("threshold params: sigma, K, L, H, R, D must be >= 0");
    }
  }
};

/// Collects the constants of a scenario and its sampler set.
inline ThresholdParams threshold_params(const Scenario& sc, const SamplerSet& samplers,
                                        ThresholdExponent exponent = ThresholdExponent::RhoBeta) {
  const GrowthBound gb = sc.semigroup.growth_bound();
  ThresholdParams p;
  p.M = gb.M;
  p.a = gb.a;
  p.rho = sc.rho();
  p.beta = sc.params.beta;
  p.sigma = sc.noise.sigma();
  p.K = sc.background.sup_bound();
  p.L = sc.background.lipschitz();
  p.H = sc.bursts.h_bound();
  p.R = samplers.R();
  p.D = sc.params.D;
  p.exponent = exponent;
  return p;
}

/// Q(g, beta) = e^{rho beta} C L ||g|| beta + (e^{x beta} - 1) C K ||g|| + 4 e^{rho beta} sigma,
/// with C = M e^{a beta} and x = rho (default) or 1.
inline Real threshold_Q(const ThresholdParams& p, Real g_norm) {
  p.check();
  if (g_norm < 0) throw DomainError("threshold_Q: negative sampler norm");
  const Real C = p.C();
  const Real growth = std::exp(p.rho * p.beta);
  const Real middle = p.exponent == ThresholdExponent::RhoBeta ? std::expm1(p.rho * p.beta)
                                                                : std::expm1(p.beta);
  return growth * C * p.L * g_norm * p.beta + middle * C * p.K * g_norm + 4 * growth * p.sigma;
}

/// Residual influence of bursts at least D in the past: 2 C H R / (e^{rho D} - 1).
inline Real epsilon(const ThresholdParams& p) {
  p.check();
  if (!(p.D > 0)) throw DomainError("epsilon requires D > 0");
  return 2 * p.C() * p.H * p.R / std::expm1(p.rho * p.D);
}

inline Real threshold_Q1(const ThresholdParams& p, Real g_norm) { return threshold_Q(p, g_norm) + epsilon(p); }

// --------------------------------------------------------------------------
// Validation

struct ValidationItem {
  std::string name;
  bool passed = true;
  Real measured = 0;  ///< the probed quantity
  Real limit = 0;     ///< what it is compared against
  Real slack = 0;     ///< signed margin; negative on failure
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationItem> items;

  bool passed() const {
    return std::all_of(items.begin(), items.end(), [](const auto& i) { return i.passed; });
  }
  const ValidationItem* find(const std::string& name) const {
    for (const auto& i : items) {
      if (i.name == name) return &i;
    }
    return nullptr;
  }
  std::string describe() const {
    std::string s;
    for (const auto& i : items) {
      s += (i.passed ? "[pass] " : "[FAIL] ") + i.name + ": measured " + format_real(i.measured) +
           ", limit " + format_real(i.limit) + ", slack " + format_real(i.slack);
      if (!i.detail.empty()) s += " (" + i.detail + ")";
      s += '\n';
    }
    return s;
  }
};

namespace detail {
/// "upper" check: measured <= limit within a relative tolerance.
inline ValidationItem upper_item(std::string name, Real measured, Real limit, Real rel_tol,
                                 std::string detail = {}) {
  ValidationItem it;
  it.name = std::move(name);
  it.measured = measured;
  it.limit = limit;
  it.slack = limit - measured;
  it.passed = measured <= limit + rel_tol * std::max(Real(1), std::abs(limit));
  it.detail = std::move(detail);
  return it;
}
/// "lower" check: measured >= limit.
inline ValidationItem lower_item(std::string name, Real measured, Real limit, Real abs_tol,
                                 std::string detail = {}) {
  ValidationItem it;
  it.name = std::move(name);
  it.measured = measured;
  it.limit = limit;
  it.slack = measured - limit;
  it.passed = measured >= limit - abs_tol;
  it.detail = std::move(detail);
  return it;
}
}  // namespace detail

/// Checks the structural assumptions a scenario must satisfy for the chosen
/// algorithm. Failures are reported, never thrown.
inline ValidationReport validate_scenario(const Scenario& sc, const SamplerSet& samplers, Algorithm mode) {
  ValidationReport r;
  const Real beta = sc.params.beta;
  const Real horizon = sc.params.horizon;
  const auto& events = sc.bursts.events();

  // (i) burst gaps
  {
    const Real required = mode == Algorithm::Alg1 ? 4 * beta : sc.params.D + 4 * beta;
    Real min_gap = std::numeric_limits<Real>::infinity();
    for (std::size_t j = 1; j < events.size(); ++j) min_gap = std::min(min_gap, events[j].time - events[j - 1].time);
    auto item = detail::lower_item("burst_gap", min_gap, required, 1e-12 * std::max(Real(1), required),
                                   mode == Algorithm::Alg1 ? "t_{j+1} - t_j >= 4 beta"
                                                           : "t_{j+1} - t_j >= D + 4 beta");
    if (events.size() < 2) {
      item.measured = item.slack = std::numeric_limits<Real>::infinity();
      item.passed = true;
      item.detail += "; fewer than two bursts";
    }
    r.items.push_back(item);
    if (mode == Algorithm::Alg2) {
      r.items.push_back(detail::lower_item("gap_parameter_positive", sc.params.D, 0, 0, "D > 0"));
      r.items.back().passed = sc.params.D > 0;
    }
  }

  // (ii) burst shapes bounded by H
  {
    Real max_norm = 0;
    for (const auto& e : events) max_norm = std::max(max_norm, norm(e.shape));
    r.items.push_back(detail::upper_item("burst_norm_bound", max_norm, sc.bursts.h_bound(), 1e-12, "||h_j|| <= H"));
  }

  // (iii) background bounded by K and Lipschitz with constant L on a probe grid
  {
    constexpr int kProbes = 2000;
    Real sup = 0, lip = 0;
    SpaceElement prev = sc.background.value(0);
    sup = norm(prev);
    for (int k = 1; k <= kProbes; ++k) {
      const Real t = horizon * k / kProbes;
      SpaceElement cur = sc.background.value(t);
      sup = std::max(sup, norm(cur));
      lip = std::max(lip, norm(cur - prev) / (horizon / kProbes));
      prev = std::move(cur);
    }
    r.items.push_back(detail::upper_item("background_sup", sup, sc.background.sup_bound(), 1e-9, "sup ||eta(t)|| <= K"));
    r.items.push_back(detail::upper_item("background_lipschitz", lip, sc.background.lipschitz(), 1e-6,
                                         "||eta(t+s) - eta(t)|| <= L s"));
  }

  // (iv) decay profile: phi(0) = 1 and 0 < phi(t) <= e^{-rho t}
  {
    const auto& d = sc.bursts.decay();
    const Real rho = d.rho();
    constexpr int kProbes = 10000;
    Real worst_ratio = 0;
    Real min_value = std::numeric_limits<Real>::infinity();
    for (int k = 0; k <= kProbes; ++k) {
      const Real t = horizon * k / kProbes;
      const Real v = d(t);
      min_value = std::min(min_value, v);
      worst_ratio = std::max(worst_ratio, v * std::exp(rho * t));
    }
    auto at0 = detail::upper_item("decay_at_zero", std::abs(d(0) - 1), 0, 1e-12, "phi(0) = 1");
    r.items.push_back(at0);
    r.items.push_back(detail::upper_item("decay_domination", worst_ratio, 1, 1e-12, "phi(t) e^{rho t} <= 1"));
    auto pos = detail::lower_item("decay_positive", min_value, 0, 0, "phi(t) > 0");
    pos.passed = min_value > 0;
    r.items.push_back(pos);
    if (mode == Algorithm::Alg1) {
      ValidationItem it;
      it.name = "decay_exponential";
      it.passed = d.is_exponential();
      it.measured = it.passed ? 1 : 0;
      it.limit = 1;
      it.slack = it.measured - 1;
      it.detail = "exponential-decay scan needs phi(t) = e^{-rho t}";
      r.items.push_back(it);
    }
  }

  // (v) samplers bounded by R
  {
    Real max_norm = 0;
    for (const auto& g : samplers.samplers()) max_norm = std::max(max_norm, norm(g));
    r.items.push_back(detail::upper_item("sampler_norm_bound", max_norm, samplers.R(), 1e-12, "||g|| <= R"));
  }

  // growth bound of the semigroup on t in {0, 0.1, ..., 2}
  {
    const GrowthBound gb = sc.semigroup.growth_bound();
    Real worst = 0;
    for (int k = 0; k <= 20; ++k) {
      const Real t = Real(0.1) * k;
      worst = std::max(worst, sc.semigroup.operator_norm(t, sc.u0.representation(), sc.u0.size()) /
                                  (gb.M * std::exp(gb.a * t)));
    }
    auto it = detail::upper_item("growth_bound", worst, 1, 1e-10, "||T(t)|| <= M e^{a t}");
    it.passed = it.passed && gb.M >= 1;
    r.items.push_back(it);
  }
  return r;
}

// --------------------------------------------------------------------------
// Detection

struct DetectionEvent {
  Real t_hat = 0;                 ///< detected burst time, a multiple of beta
  std::size_t index = 0;          ///< grid index with t_hat = index * beta
  std::vector<Real> f_hat;        ///< estimated <h_j, g> per sampler
  Real trigger_delta = 0;         ///< Delta of the sampler with the largest |Delta| / threshold
  std::size_t trigger_sampler = 0;
  Algorithm algorithm = Algorithm::Alg1;
};

struct DetectionResult {
  std::vector<DetectionEvent> events;
  std::vector<std::size_t> examined;  ///< scan indices i in visiting order
  Real scan_end = 0;                  ///< i * beta where the scan stopped
  bool truncated = false;             ///< stopped for lack of data before the horizon
};

/// Shared scan: checks |Delta_i| then |Delta_{i+1}| against the per-sampler
/// thresholds; a crossing by any sampler is an event. After an event the
/// index advances by `skip`, otherwise by one.
inline DetectionResult scan_for_bursts(const MeasurementSeries& series, std::span<const Real> thresholds,
                                       Real horizon, std::size_t skip, Algorithm algorithm) {
  if (thresholds.size() != series.samplers()) {
    throw DimensionError("one threshold per sampler is required");
  }
  DetectionResult out;
  const Real beta = series.beta;
  const Real growth3 = std::exp(3 * series.rho * beta);
  const std::size_t nF = series.length() > 0 ? series.length() - 1 : 0;

  // Largest |Delta_m| / Q over samplers if some sampler crosses, else -1.
  auto crossing = [&](std::size_t m, std::size_t& who) {
    Real best = -1;
    for (std::size_t k = 0; k < series.samplers(); ++k) {
      const Real d = std::abs(series.per_sampler[k].delta[m]);
      if (d > thresholds[k]) {
        const Real ratio = thresholds[k] > 0 ? d / thresholds[k] : std::numeric_limits<Real>::infinity();
        if (ratio > best) {
          best = ratio;
          who = k;
        }
      }
    }
    return best;
  };
  auto record = [&](std::size_t trigger, std::size_t who, std::size_t hi, std::size_t lo) {
    DetectionEvent e;
    e.index = trigger + 1;
    e.t_hat = grid_time(static_cast<Index>(e.index), beta);
    e.trigger_sampler = who;
    e.trigger_delta = series.per_sampler[who].delta[trigger];
    e.algorithm = algorithm;
    for (const auto& s : series.per_sampler) e.f_hat.push_back(growth3 * s.F[hi] - s.F[lo]);
    out.events.push_back(std::move(e));
  };

  std::size_t i = 1;
  while (grid_time(static_cast<Index>(i), beta) < horizon) {
    if (i + 3 >= nF) {
      out.truncated = true;
      break;
    }
    out.examined.push_back(i);
    std::size_t who = 0;
    if (crossing(i, who) >= 0) {
      record(i, who, i + 2, i - 1);
      i += skip;
    } else if (crossing(i + 1, who) >= 0) {
      record(i + 1, who, i + 3, i);
      i += skip;
    } else {
      i += 1;
    }
  }
  out.scan_end = grid_time(static_cast<Index>(i), beta);
  return out;
}

inline std::vector<Real> thresholds_for(const ThresholdParams& p, std::span<const Real> g_norms, Algorithm alg) {
  std::vector<Real> q;
  q.reserve(g_norms.size());
  for (Real g : g_norms) q.push_back(alg == Algorithm::Alg1 ? threshold_Q(p, g) : threshold_Q1(p, g));
  return q;
}

/// Scan for bursts with exponential decay, threshold Q, skip 3.
inline DetectionResult detect_alg1(const MeasurementSeries& series, const ThresholdParams& p,
                                   std::span<const Real> g_norms, Real horizon) {
  const auto q = thresholds_for(p, g_norms, Algorithm::Alg1);
  return scan_for_bursts(series, q, horizon, 3, Algorithm::Alg1);
}

/// Number of extra indices skipped after a detection under general decay: floor(D / beta).
inline std::size_t gap_skip(Real D, Real beta) {
  return static_cast<std::size_t>(std::floor(D / beta + 1e-9));
}

/// Scan for bursts with general decay, threshold Q1 = Q + epsilon, skip 3 + floor(D / beta).
inline DetectionResult detect_alg2(const MeasurementSeries& series, const ThresholdParams& p,
                                   std::span<const Real> g_norms, Real horizon) {
  if (!(p.D > 0)) throw DomainError("detect_alg2 requires D > 0");
  const auto q = thresholds_for(p, g_norms, Algorithm::Alg2);
  return scan_for_bursts(series, q, horizon, 3 + gap_skip(p.D, p.beta), Algorithm::Alg2);
}

}  // namespace dynsamp
