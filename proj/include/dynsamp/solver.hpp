#pragma once

// Mild solution u(t) = T(t)u0 + int_0^t T(t-s) F(s) ds of  u' = Au + F.
//
// The solution is advanced interval by interval using the flow property
//   u(t1) = T(t1 - t0) u(t0) + int_{t0}^{t1} T(t1 - s) F(s) ds,
// so a sweep over the sampling grid costs O(horizon / beta) convolutions.
// Spectral semigroups with exponential decay use closed forms; everything
// else goes through composite Gauss-Legendre with panels aligned to the
// burst times.

#include "dynsamp/core.hpp"
#include "dynsamp/forcing.hpp"
#include "dynsamp/quadrature.hpp"
#include "dynsamp/semigroup.hpp"
#include "dynsamp/space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>

namespace dynsamp {

struct ModelParams {
  Real beta = 0.01;     ///< time sampling step
  Real horizon = 1;     ///< the scan runs while i*beta < horizon
  Real D = 0;           ///< burst gap parameter for general decay
  QuadratureConfig quad;
};

struct Scenario {
  SemigroupModel semigroup;
  SpaceElement u0;
  BurstTrain bursts;
  BackgroundSource background;
  NoiseModel noise;
  ModelParams params;

  Real rho() const noexcept { return bursts.decay().rho(); }
  Real beta() const noexcept { return params.beta; }

  /// Largest grid index n with n*beta <= horizon.
  Index last_index() const {
    return static_cast<Index>(std::floor(params.horizon / params.beta + 1e-9));
  }

  /// Throws DimensionError / DomainError when the parts cannot be combined.
  void check_compatible() const {
    if (!(params.beta > 0) || !(params.horizon > 0)) {
      throw DomainError("beta and horizon must be > 0");
    }
    if (!(params.beta < params.horizon)) throw DomainError("beta must be smaller than the horizon");
    if (params.D < 0) throw DomainError("gap parameter D must be >= 0");
    const Index d = semigroup.dimension();
    if (d != 0 && d != u0.size()) {
      throw DimensionError("semigroup dimension does not match the initial state");
    }
    for (const auto& b : bursts.events()) b.shape.require_compatible(u0);
    if (background.is_separable()) background.shape().require_compatible(u0);
  }
};

/// Grid time n*beta, computed the same way everywhere so that noise draws and
/// solver states line up bit for bit.
inline Real grid_time(Index n, Real beta) { return static_cast<Real>(n) * beta; }

namespace detail {

/// int_{t0}^{t1} e^{lambda (t1 - s)} p(s) ds
template <class P>
Real spectral_convolution(Real lambda, const P& p, Real t0, Real t1, Real beta,
                          const QuadratureConfig& q) {
  auto f = [&](Real s) { return std::exp(lambda * (t1 - s)) * p(s); };
  return integrate(f, t0, t1, q, panels_for(t1 - t0, beta, q)).value;
}

/// Vector-valued composite Gauss-Legendre with panel doubling.
template <class F>
Vector integrate_vector(const F& f, Index n, Real a, Real b, Real beta, const QuadratureConfig& q) {
  if (b <= a) return Vector::Zero(n);
  auto pass = [&](int panels, Vector& value, Vector& l1) {
    value = Vector::Zero(n);
    l1 = Vector::Zero(n);
    auto acc = [&](Real w, const Vector& y) {
      value += w * y;
      l1 += w * y.cwiseAbs();
    };
    auto g = [&](Real s) -> Vector { return f(s); };
    gauss8_composite(g, a, b, panels, acc);
  };
  int panels = panels_for(b - a, beta, q);
  Vector coarse, l1;
  pass(panels, coarse, l1);
  Real achieved = 0;
  for (int k = 0; k <= q.max_refinements; ++k) {
    Vector fine, fine_l1;
    pass(2 * panels, fine, fine_l1);
    const Real diff = (fine - coarse).cwiseAbs().maxCoeff();
    const Real scale = fine_l1.maxCoeff();
    achieved = scale > 0 ? diff / scale : 0;
    if (diff <= q.tol * scale) return fine;
    coarse = std::move(fine);
    panels *= 2;
  }
  throw QuadratureError("vector quadrature did not converge", achieved, q.tol);
}

/// Applies a per-eigenvalue scalar factor to x for a spectral semigroup,
/// caching the factor for repeated eigenvalues.
template <class Factor>
SpaceElement spectral_scale(const SemigroupModel& S, const SpaceElement& x, const Factor& factor) {
  if (S.kind() == SemigroupModel::Kind::Scalar) return factor(S.eigenvalue(0)) * x;
  std::map<Real, Real> cache;
  Vector out(x.size());
  for (Index k = 0; k < x.size(); ++k) {
    const Real lambda = S.eigenvalue(k);
    auto it = cache.find(lambda);
    if (it == cache.end()) it = cache.emplace(lambda, factor(lambda)).first;
    out[k] = it->second * x[k];
  }
  return {x.representation(), std::move(out)};
}

}  // namespace detail

/// int_{max(t0, t_j)}^{t1} T(t1 - s) h phi(s - t_j) ds.
inline SpaceElement convolve_burst(const SemigroupModel& S, const SpaceElement& h, const DecayProfile& d,
                                   Real t_j, Real t0, Real t1, Real beta, const QuadratureConfig& q) {
  if (t1 < t_j) throw DomainError("convolve_burst: t < t_j");
  if (t1 < t0) throw DomainError("convolve_burst: interval reversed");
  const Real start = std::max(t0, t_j);
  const Real tau = t1 - start;
  if (tau <= 0) return SpaceElement::zero(h.representation(), h.size());

  if (S.is_spectral() && d.is_exponential()) {
    const Real rho = d.rho();
    const Real decay_at_start = std::exp(-rho * (start - t_j));
    // int_0^tau e^{lambda (tau - r)} e^{-rho r} dr = e^{lambda tau} tau e(-(lambda + rho) tau)
    auto factor = [&](Real lambda) {
      return decay_at_start * std::exp(lambda * tau) * tau * e_func(-(lambda + rho) * tau);
    };
    return detail::spectral_scale(S, h, factor);
  }
  auto profile = [&](Real s) { return d(std::max(Real(0), s - t_j)); };
  if (S.is_spectral()) {
    auto factor = [&](Real lambda) {
      return detail::spectral_convolution(lambda, profile, start, t1, beta, q);
    };
    return detail::spectral_scale(S, h, factor);
  }
  auto f = [&](Real s) -> Vector { return profile(s) * (S.propagator(t1 - s) * h.coeffs()); };
  return {h.representation(), detail::integrate_vector(f, h.size(), start, t1, beta, q)};
}

/// Burst convolution over the whole active interval [t_j, t].
inline SpaceElement convolve_burst(const SemigroupModel& S, const SpaceElement& h, const DecayProfile& d,
                                   Real t_j, Real t, Real beta, const QuadratureConfig& q = {}) {
  return convolve_burst(S, h, d, t_j, t_j, t, beta, q);
}

/// int_{t0}^{t1} T(t1 - s) eta(s) ds
inline SpaceElement convolve_background(const SemigroupModel& S, const BackgroundSource& bg, Real t0,
                                        Real t1, Real beta, const QuadratureConfig& q = {}) {
  if (t1 < t0) throw DomainError("convolve_background: interval reversed");
  const SpaceElement& like = bg.shape();
  if (bg.kind() == BackgroundSource::Kind::Zero || t1 == t0) {
    return SpaceElement::zero(like.representation(), like.size());
  }
  if (bg.is_separable() && S.is_spectral()) {
    auto profile = [&](Real s) { return bg.profile(s); };
    auto factor = [&](Real lambda) {
      return detail::spectral_convolution(lambda, profile, t0, t1, beta, q);
    };
    return detail::spectral_scale(S, like, factor);
  }
  auto f = [&](Real s) -> Vector { return S.apply(t1 - s, bg.value(s)).coeffs(); };
  return {like.representation(), detail::integrate_vector(f, like.size(), t0, t1, beta, q)};
}

/// Incremental evaluator of the mild solution.
class MildSolver {
 public:
  explicit MildSolver(const Scenario& sc) : sc_(&sc), t_(0), u_(sc.u0) { sc.check_compatible(); }

  Real time() const noexcept { return t_; }
  const SpaceElement& state() const noexcept { return u_; }

  /// Advances the state from time() to t1 >= time().
  void advance_to(Real t1) {
    const Scenario& sc = *sc_;
    if (t1 < t_) throw DomainError("MildSolver cannot move backwards in time");
    if (t1 > sc.params.horizon * (1 + 1e-12)) {
      throw DomainError("time " + std::to_string(t1) + " lies beyond the horizon " +
                        std::to_string(sc.params.horizon));
    }
    if (t1 == t_) return;
    const Real beta = sc.params.beta;
    SpaceElement next = sc.semigroup.apply(t1 - t_, u_);
    for (const auto& b : sc.bursts.events()) {
      if (b.time >= t1) break;
      next += convolve_burst(sc.semigroup, b.shape, sc.bursts.decay(), b.time, t_, t1, beta, sc.params.quad);
    }
    next += convolve_background(sc.semigroup, sc.background, t_, t1, beta, sc.params.quad);
    u_ = std::move(next);
    t_ = t1;
  }

  /// Advances to the grid point n*beta.
  void advance_to_index(Index n) { advance_to(grid_time(n, sc_->params.beta)); }

 private:
  const Scenario* sc_;
  Real t_;
  SpaceElement u_;
};

/// u(t) for 0 <= t <= horizon, marching along the sampling grid.
inline SpaceElement mild_solution(const Scenario& sc, Real t) {
  if (!(t >= 0) || t > sc.params.horizon * (1 + 1e-12)) {
    throw DomainError("mild_solution: t = " + std::to_string(t) + " outside [0, horizon]");
  }
  MildSolver solver(sc);
  const Index n = static_cast<Index>(std::floor(t / sc.params.beta + 1e-12));
  for (Index k = 1; k <= n; ++k) {
    const Real tk = grid_time(k, sc.params.beta);
    if (tk > t) break;
    solver.advance_to(tk);
  }
  solver.advance_to(t);
  return solver.state();
}

}  // namespace dynsamp
