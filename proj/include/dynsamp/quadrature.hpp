#pragma once

// Composite 8-point Gauss-Legendre quadrature with panel doubling.

#include "dynsamp/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace dynsamp {

struct QuadratureConfig {
  Real tol = 1e-10;          ///< relative tolerance against the L1 size of the integrand
  int panels = 64;           ///< panels per sampling step
  int max_refinements = 4;   ///< panel doublings before giving up
};

namespace gauss8 {
inline constexpr std::array<Real, 4> kNodes = {
    0.18343464249564980493947614236018398, 0.52553240991632898581773904918924635,
    0.79666647741362673959155393647583044, 0.96028985649753623168356086856947299};
inline constexpr std::array<Real, 4> kWeights = {
    0.36268378337836198296515044927719561, 0.31370664587788728733796220198660131,
    0.22238103445337447054435599442624088, 0.10122853629037625915253135430996219};
}  // namespace gauss8

/// Feeds every node of `panels` equal panels of [a,b] to `acc(weight, f(x))`.
template <class F, class Acc>
void gauss8_composite(const F& f, Real a, Real b, int panels, Acc& acc) {
  const Real width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const Real lo = a + width * p;
    const Real mid = lo + width / 2;
    const Real half = width / 2;
    for (std::size_t k = 0; k < gauss8::kNodes.size(); ++k) {
      const Real w = gauss8::kWeights[k] * half;
      acc(w, f(mid - half * gauss8::kNodes[k]));
      acc(w, f(mid + half * gauss8::kNodes[k]));
    }
  }
}

struct ScalarQuadratureResult {
  Real value = 0;
  Real abs_integral = 0;
  Real achieved = 0;  ///< last |I_2P - I_P| relative to abs_integral
  int panels = 0;
};

/// Integrates a scalar function over [a,b], doubling panels until two
/// successive estimates agree to cfg.tol relative to the integral of |f|.
template <class F>
ScalarQuadratureResult integrate(const F& f, Real a, Real b, const QuadratureConfig& cfg,
                                 int initial_panels) {
  if (b < a) throw DomainError("integrate: upper limit below lower limit");
  ScalarQuadratureResult r;
  if (b == a) return r;
  auto pass = [&](int panels, Real& value, Real& l1) {
    value = 0;
    l1 = 0;
    auto acc = [&](Real w, Real y) {
      value += w * y;
      l1 += w * std::abs(y);
    };
    gauss8_composite(f, a, b, panels, acc);
  };
  int panels = std::max(1, initial_panels);
  Real coarse = 0, l1 = 0;
  pass(panels, coarse, l1);
  for (int k = 0; k <= cfg.max_refinements; ++k) {
    Real fine = 0, fine_l1 = 0;
    pass(2 * panels, fine, fine_l1);
    const Real diff = std::abs(fine - coarse);
    const Real scale = fine_l1;
    r = {fine, fine_l1, scale > 0 ? diff / scale : 0, 2 * panels};
    if (diff <= cfg.tol * scale) return r;
    coarse = fine;
    panels *= 2;
  }
  throw QuadratureError("composite Gauss-Legendre did not converge on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "]",
                        r.achieved, cfg.tol);
}

/// Panel count for an interval of the given length when `cfg.panels` panels
/// cover one sampling step `beta`.
inline int panels_for(Real length, Real beta, const QuadratureConfig& cfg) {
  if (!(beta > 0) || length <= 0) return 1;
  return std::max(1, static_cast<int>(std::ceil(cfg.panels * (length / beta) - 1e-9)));
}

}  // namespace dynsamp
