#pragma once

// Closed-form error bounds for the recovered burst inner products.

#include "dynsamp/core.hpp"
#include "dynsamp/detector.hpp"
#include "dynsamp/forcing.hpp"
#include "dynsamp/semigroup.hpp"
#include "dynsamp/space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace dynsamp {

struct BoundInputs {
  ThresholdParams p;
  Real g_norm = 0;
  Real h_norm = 0;
  /// beta -> sup_{s in [0, beta]} ||T(s) h - h||; empty means zero.
  std::function<Real(Real)> modulus;

  Real modulus_at(Real beta) const { return modulus ? modulus(beta) : 0; }
};

/// sup_{s in [0, beta]} ||T(s) h - h||. Exact for spectral kinds, where the
/// per-coordinate |e^{lambda s} - 1| is monotone in s; otherwise a grid max
/// over 128 uniform and 128 geometric points plus the endpoint.
inline Real semigroup_modulus(const SemigroupModel& S, const SpaceElement& h, Real beta) {
  if (!(beta >= 0)) throw DomainError("semigroup_modulus: beta must be >= 0");
  if (beta == 0) return 0;
  if (S.is_spectral()) return norm(S.apply(beta, h) - h);
  Real best = norm(S.apply(beta, h) - h);
  for (int k = 1; k < 128; ++k) {
    const Real s = beta * k / 128;
    best = std::max(best, norm(S.apply(s, h) - h));
    const Real geo = beta * std::pow(Real(2), -Real(k) / 8);
    best = std::max(best, norm(S.apply(geo, h) - h));
  }
  return best;
}

/// Modulus callable bound to (S, h), for use in BoundInputs.
inline std::function<Real(Real)> modulus_of(const SemigroupModel& S, const SpaceElement& h) {
  return [S, h](Real beta) { return semigroup_modulus(S, h, beta); };
}

/// v_k = ||g|| (M ||h|| (e^{(k+2) rho beta} - 1) e(a beta) + modulus(beta)),  k in {0, 1}.
inline Real v_bound(int k, const BoundInputs& b) {
  if (k != 0 && k != 1) throw DomainError("v_bound: k must be 0 or 1");
  const auto& p = b.p;
  const Real first = p.M * b.h_norm * std::expm1((k + 2) * p.rho * p.beta) * e_func(p.a * p.beta);
  return b.g_norm * (first + b.modulus_at(p.beta));
}

/// max over a 1001-point grid of [(i-2) beta, i beta] of |e^{k rho beta} phi(s) - 1|.
inline Real decay_deviation(int k, int i, const DecayProfile& phi, Real rho, Real beta, int points = 1001) {
  const Real lo = (i - 2) * beta;
  const Real hi = i * beta;
  const Real growth = std::exp(k * rho * beta);
  Real best = 0;
  for (int m = 0; m < points; ++m) {
    const Real s = lo + (hi - lo) * m / (points - 1);
    best = std::max(best, std::abs(growth * phi(s) - 1));
  }
  return best;
}

/// v_{k,i} = ||g|| (||h|| M max_s |e^{k rho beta} phi(s) - 1| e(a beta) + modulus(beta)),  k, i in {2, 3}.
inline Real v_bound_general(int k, int i, const DecayProfile& phi, const BoundInputs& b) {
  if ((k != 2 && k != 3) || (i != 2 && i != 3)) throw DomainError("v_bound_general: k and i must be 2 or 3");
  const auto& p = b.p;
  const Real dev = decay_deviation(k, i, phi, p.rho, p.beta);
  return b.g_norm * (b.h_norm * p.M * dev * e_func(p.a * p.beta) + b.modulus_at(p.beta));
}

namespace detail {
/// Terms shared by both error bounds, without the v part.
inline Real common_bound_terms(const BoundInputs& b, Real threshold) {
  const auto& p = b.p;
  const Real C = p.C();
  const Real g3 = std::exp(3 * p.rho * p.beta);
  return 3 * g3 * C * p.L * b.g_norm * p.beta + std::expm1(3 * p.rho * p.beta) * C * p.K * b.g_norm +
         4 * g3 * p.sigma + 2 * std::exp(p.rho * p.beta) * threshold;
}
}  // namespace detail

/// Error bound for exponential decay; `Q` is threshold_Q at the same inputs.
inline Real bound_thm1(const BoundInputs& b, Real Q) {
  return detail::common_bound_terms(b, Q) + std::max(v_bound(0, b), v_bound(1, b));
}

/// Error bound for general decay; `Q1` is threshold_Q1 at the same inputs.
inline Real bound_thm2(const BoundInputs& b, Real Q1, const DecayProfile& phi) {
  const Real v = std::max({v_bound_general(3, 2, phi, b), v_bound_general(3, 3, phi, b),
                           v_bound_general(2, 2, phi, b)});
  return epsilon(b.p) + detail::common_bound_terms(b, Q1) + v;
}

inline Real bound_thm1(const BoundInputs& b) { return bound_thm1(b, threshold_Q(b.p, b.g_norm)); }
inline Real bound_thm2(const BoundInputs& b, const DecayProfile& phi) {
  return bound_thm2(b, threshold_Q1(b.p, b.g_norm), phi);
}

struct SmallBetaCertificate {
  bool certified = false;
  Real beta = 0;   ///< largest beta found with bound(beta) <= target
  Real bound = 0;  ///< bound at that beta
  Real target = 0;
};

/// Largest beta <= beta_max with bound(beta) <= target: halve from beta_max
/// until the bound holds, then bisect between the last failing and the first
/// passing value.
inline SmallBetaCertificate certify_small_beta(const std::function<Real(Real)>& bound, Real target,
                                               Real beta_max = 0.1, int halvings = 60, int bisections = 60) {
  SmallBetaCertificate c;
  c.target = target;
  if (Real v = bound(beta_max); v <= target) {
    c.certified = true;
    c.beta = beta_max;
    c.bound = v;
    return c;
  }
  Real fail = beta_max;
  Real pass = beta_max;
  bool found = false;
  for (int k = 0; k < halvings; ++k) {
    pass /= 2;
    if (bound(pass) <= target) {
      found = true;
      break;
    }
    fail = pass;
  }
  if (!found) return c;
  for (int k = 0; k < bisections; ++k) {
    const Real mid = (pass + fail) / 2;
    if (bound(mid) <= target) {
      pass = mid;
    } else {
      fail = mid;
    }
  }
  c.certified = true;
  c.beta = pass;
  c.bound = bound(pass);
  return c;
}

}  // namespace dynsamp
