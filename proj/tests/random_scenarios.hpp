#pragma once

// Randomized scenarios that satisfy every model assumption, and the
// burst-free-window checks used by the soundness tests.

#include "dynsamp/dynsamp.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace dynsamp::testing {

inline Vector random_direction(std::mt19937_64& rng, Index n, Real length) {
  std::normal_distribution<double> nd(0, 1);
  Vector v(n);
  for (Index k = 0; k < n; ++k) v[k] = nd(rng);
  const Real nv = v.norm();
  return nv > 0 ? Vector(v * (length / nv)) : Vector::Zero(n);
}

struct RandomScenario {
  ExperimentSetup setup;
  int semigroup_kind = 0;  // 0 scalar, 1 diagonal, 2 matrix
};

/// A scenario on the abstract space R^d with d in [1, 4].
inline RandomScenario random_scenario(std::mt19937_64& rng, Algorithm alg) {
  auto unif = [&](double a, double b) { return Real(std::uniform_real_distribution<double>(a, b)(rng)); };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const Representation rep = Representation::Abstract;
  const Index d = pick(1, 4);
  auto elem = [&](Real len) { return SpaceElement(rep, random_direction(rng, d, len)); };

  RandomScenario out{.setup = {Scenario{SemigroupModel::scalar(0), SpaceElement::zero(rep, d),
                                        BurstTrain({}, DecayProfile::exponential(1)),
                                        BackgroundSource::zero(rep, d), NoiseModel(), ModelParams{}},
                               SamplerSet({elem(1)}), alg, ThresholdExponent::RhoBeta, {}}};
  Scenario& sc = out.setup.scenario;

  // Matrix generators are kept to the exponential-decay case, where their
  // quadrature cost is lowest.
  out.semigroup_kind = alg == Algorithm::Alg1 ? pick(0, 2) : pick(0, 1);
  if (out.semigroup_kind == 0) {
    sc.semigroup = SemigroupModel::scalar(unif(-1, 1));
  } else if (out.semigroup_kind == 1) {
    Vector lambda(d);
    for (Index k = 0; k < d; ++k) lambda[k] = unif(-2, 1);
    sc.semigroup = SemigroupModel::diagonal(lambda);
  } else {
    std::normal_distribution<double> nd(0, 0.5);
    Matrix A(d, d);
    for (Index r = 0; r < d; ++r) {
      for (Index c = 0; c < d; ++c) A(r, c) = nd(rng);
    }
    // ||e^{tA}|| <= e^{mu t} with mu the largest eigenvalue of the symmetric part.
    const Matrix sym = (A + A.transpose()) / 2;
    const Real mu = Eigen::SelfAdjointEigenSolver<Matrix>(sym).eigenvalues().maxCoeff();
    sc.semigroup = SemigroupModel::matrix(A, {1, mu + Real(1e-9)}, rep);
  }

  const Real rho = unif(0.5, 2);
  const Real beta = unif(0.01, 0.05);
  const Real D = alg == Algorithm::Alg2 ? unif(0.3, 1.5) : 0;
  DecayProfile decay = DecayProfile::exponential(rho);
  if (alg == Algorithm::Alg2) {
    const int m = pick(1, 2);
    std::vector<Real> w, r;
    Real total = 0;
    for (int k = 0; k < m; ++k) {
      w.push_back(unif(0.1, 1));
      r.push_back(rho * unif(1, 3));
      total += w.back();
    }
    for (Real& x : w) x /= total;
    decay = DecayProfile::mixture(rho, w, r);
  }

  const int n_bursts = pick(1, 3);
  const Real gap = alg == Algorithm::Alg1 ? 4 * beta : D + 4 * beta;
  std::vector<Burst> bursts;
  Real t = unif(0.05, 0.3);
  for (int j = 0; j < n_bursts; ++j) {
    bursts.push_back({t, elem(unif(0.1, 3))});
    t += gap * (1 + 1e-6) + unif(0, 0.5);
  }
  sc.bursts = BurstTrain(std::move(bursts), decay);
  sc.u0 = elem(unif(0, 2));

  const int bg = pick(0, 2);
  if (bg == 1) sc.background = BackgroundSource::exp_profile(elem(unif(0, 1)), unif(0, 2));
  if (bg == 2) sc.background = BackgroundSource::sin_profile(elem(unif(0, 1)), unif(0, 2));
  sc.noise = NoiseModel(std::exp(unif(std::log(1e-6), std::log(1e-2))), rng());

  sc.params.beta = beta;
  sc.params.D = D;
  sc.params.horizon = sc.bursts.events().back().time + unif(0.1, 1);
  sc.params.quad.panels = 8;

  std::vector<SpaceElement> g;
  const int n_samplers = pick(1, 3);
  for (int k = 0; k < n_samplers; ++k) g.push_back(elem(unif(0.2, 2)));
  out.setup.samplers = SamplerSet(std::move(g));
  return out;
}

/// True when no burst starts in [n beta, (n+2) beta) and, for general decay,
/// every earlier burst is at least D in the past.
inline bool burst_free_window(const Scenario& sc, std::size_t n, Algorithm alg) {
  const Real lo = grid_time(static_cast<Index>(n), sc.params.beta);
  const Real hi = grid_time(static_cast<Index>(n + 2), sc.params.beta);
  for (const auto& b : sc.bursts.events()) {
    if (b.time >= lo && b.time < hi) return false;
    if (alg == Algorithm::Alg2 && b.time < lo && lo - b.time < sc.params.D) return false;
  }
  return true;
}

struct SoundnessCount {
  std::size_t windows = 0;         // burst-free (n, sampler) pairs checked
  std::size_t exceedances = 0;     // |Delta_n| > threshold in a burst-free window
  std::size_t false_triggers = 0;  // detector events triggered in a burst-free window
  Real worst_ratio = 0;            // max |Delta_n| / threshold over burst-free windows
};

inline SoundnessCount check_soundness(const ExperimentSetup& s, const ExperimentResult& r) {
  SoundnessCount c;
  const Scenario& sc = s.scenario;
  for (std::size_t k = 0; k < r.series.samplers(); ++k) {
    const auto& delta = r.series.per_sampler[k].delta;
    for (std::size_t n = 0; n < delta.size(); ++n) {
      if (!burst_free_window(sc, n, s.algorithm)) continue;
      ++c.windows;
      const Real ratio = std::abs(delta[n]) / r.thresholds[k];
      c.worst_ratio = std::max(c.worst_ratio, ratio);
      if (ratio > 1) ++c.exceedances;
    }
  }
  for (const auto& e : r.detection.events) {
    if (burst_free_window(sc, e.index - 1, s.algorithm)) ++c.false_triggers;
  }
  return c;
}

}  // namespace dynsamp::testing
