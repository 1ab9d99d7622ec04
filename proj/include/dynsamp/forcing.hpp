#pragma once

// Forcing F = h + eta and the measurement noise nu.
//
// h(t) = sum_j h_j phi(t - t_j) 1_{[t_j, inf)}(t) is a train of bursts with a
// common decay profile phi; eta is a bounded Lipschitz background source.

#include "dynsamp/core.hpp"
#include "dynsamp/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace dynsamp {

class DecayProfile {
 public:
  enum class Kind { Exponential, GeneralBounded };

  /// phi(t) = e^{-rho t}
  static DecayProfile exponential(Real rho) {
    if (!(rho > 0)) throw DomainError("decay rate rho must be > 0");
    DecayProfile d;
    d.kind_ = Kind::Exponential;
    d.rho_ = rho;
    d.label_ = "exp(-" + std::to_string(rho) + " t)";
    return d;
  }

  /// Any continuous phi with phi(0) = 1 and 0 < phi(t) <= e^{-rho t}; the
  /// domination is checked by validate_scenario, not here.
  static DecayProfile general(Real rho, std::function<Real(Real)> phi, std::string label) {
    if (!(rho > 0)) throw DomainError("decay rate rho must be > 0");
    if (!phi) throw DomainError("general decay profile needs a callable");
    DecayProfile d;
    d.kind_ = Kind::GeneralBounded;
    d.rho_ = rho;
    d.phi_ = std::move(phi);
    d.label_ = std::move(label);
    return d;
  }

  /// phi(t) = sum_k w_k e^{-r_k t}; the profile used with general decay is
  /// (e^{-2t} + e^{-t}) / 2, i.e. weights {0.5, 0.5} and rates {2, 1}.
  static DecayProfile mixture(Real rho, std::vector<Real> weights, std::vector<Real> rates) {
    if (weights.size() != rates.size() || weights.empty()) {
      throw DomainError("mixture decay needs matching non-empty weights and rates");
    }
    std::string label;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (k) label += " + ";
      label += std::to_string(weights[k]) + "*exp(-" + std::to_string(rates[k]) + " t)";
    }
    auto phi = [w = std::move(weights), r = std::move(rates)](Real t) {
      Real acc = 0;
      for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * std::exp(-r[k] * t);
      return acc;
    };
    return general(rho, std::move(phi), std::move(label));
  }

  Kind kind() const noexcept { return kind_; }
  bool is_exponential() const noexcept { return kind_ == Kind::Exponential; }
  Real rho() const noexcept { return rho_; }
  const std::string& label() const noexcept { return label_; }

  Real operator()(Real t) const {
    if (!(t >= 0)) throw DomainError("decay profile evaluated at negative time");
    return kind_ == Kind::Exponential ? std::exp(-rho_ * t) : phi_(t);
  }

 private:
  DecayProfile() = default;

  Kind kind_ = Kind::Exponential;
  Real rho_ = 1;
  std::function<Real(Real)> phi_;
  std::string label_;
};

inline Real phi(const DecayProfile& d, Real t) { return d(t); }

struct Burst {
  Real time;
  SpaceElement shape;
};

class BurstTrain {
 public:
  /// `h_bound` < 0 means "use max ||h_j||".
  BurstTrain(std::vector<Burst> events, DecayProfile decay, Real h_bound = -1)
      : events_(std::move(events)), decay_(std::move(decay)) {
    Real max_norm = 0;
    for (std::size_t j = 0; j < events_.size(); ++j) {
      if (!(events_[j].time > 0)) throw ValidationError("burst times must be > 0");
      if (j > 0 && !(events_[j].time > events_[j - 1].time)) {
        throw ValidationError("burst times must be strictly increasing");
      }
      if (j > 0) events_[j].shape.require_compatible(events_[0].shape);
      max_norm = std::max(max_norm, norm(events_[j].shape));
    }
    h_bound_ = h_bound < 0 ? max_norm : h_bound;
    if (max_norm > h_bound_ * (1 + 1e-12)) {
      throw ValidationError("burst shape norm " + std::to_string(max_norm) + " exceeds H = " +
                            std::to_string(h_bound_));
    }
  }

  const std::vector<Burst>& events() const noexcept { return events_; }
  const DecayProfile& decay() const noexcept { return decay_; }
  Real h_bound() const noexcept { return h_bound_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }

 private:
  std::vector<Burst> events_;
  DecayProfile decay_;
  Real h_bound_ = 0;
};

/// h(t) = sum_{t_j <= t} phi(t - t_j) h_j. `like` fixes the representation of
/// the zero element returned before the first burst.
inline SpaceElement burst_value(const BurstTrain& b, Real t, const SpaceElement& like) {
  SpaceElement acc = SpaceElement::zero(like.representation(), like.size());
  for (const auto& e : b.events()) {
    if (e.time <= t) acc += b.decay()(t - e.time) * e.shape;
  }
  return acc;
}

class BackgroundSource {
 public:
  enum class Kind { Zero, ExpProfile, SinProfile, Custom };

  static BackgroundSource zero(Representation rep, Index n) {
    BackgroundSource s;
    s.kind_ = Kind::Zero;
    s.shape_ = SpaceElement::zero(rep, n);
    return s;
  }

  /// eta(t) = shape e^{-rate t}; sup ||eta|| = ||shape||, Lipschitz rate*||shape||.
  static BackgroundSource exp_profile(SpaceElement shape, Real rate) {
    return separable(Kind::ExpProfile, std::move(shape), rate);
  }

  /// eta(t) = shape sin(rate t); bounded by ||shape||, Lipschitz rate*||shape||.
  static BackgroundSource sin_profile(SpaceElement shape, Real rate) {
    return separable(Kind::SinProfile, std::move(shape), rate);
  }

  /// Arbitrary eta with caller-supplied bound K and Lipschitz constant L.
  static BackgroundSource custom(std::function<SpaceElement(Real)> eta, SpaceElement like, Real K,
                                 Real L) {
    if (!eta) throw DomainError("custom background needs a callable");
    if (K < 0 || L < 0) throw DomainError("background constants must be >= 0");
    BackgroundSource s;
    s.kind_ = Kind::Custom;
    s.custom_ = std::move(eta);
    s.shape_ = SpaceElement::zero(like.representation(), like.size());
    s.K_ = K;
    s.L_ = L;
    return s;
  }

  Kind kind() const noexcept { return kind_; }
  /// True for the shape-times-scalar-profile kinds (Zero, ExpProfile, SinProfile).
  bool is_separable() const noexcept { return kind_ != Kind::Custom; }
  const SpaceElement& shape() const noexcept { return shape_; }
  Real rate() const noexcept { return rate_; }
  Real sup_bound() const noexcept { return K_; }
  Real lipschitz() const noexcept { return L_; }

  /// Scalar time profile of a separable source.
  Real profile(Real t) const {
    switch (kind_) {
      case Kind::Zero: return 0;
      case Kind::ExpProfile: return std::exp(-rate_ * t);
      case Kind::SinProfile: return std::sin(rate_ * t);
      case Kind::Custom: break;
    }
    throw DomainError("custom background has no scalar profile");
  }

  SpaceElement value(Real t) const {
    if (kind_ == Kind::Custom) return custom_(t);
    return profile(t) * shape_;
  }

  std::string label() const {
    switch (kind_) {
      case Kind::Zero: return "zero";
      case Kind::ExpProfile: return "x*exp(-L t)";
      case Kind::SinProfile: return "x*sin(L t)";
      case Kind::Custom: return "custom";
    }
    return "";
  }

 private:
  BackgroundSource() = default;

  static BackgroundSource separable(Kind kind, SpaceElement shape, Real rate) {
    if (rate < 0) throw DomainError("background rate must be >= 0");
    BackgroundSource s;
    s.kind_ = kind;
    s.rate_ = rate;
    s.K_ = norm(shape);
    s.L_ = rate * s.K_;
    s.shape_ = std::move(shape);
    return s;
  }

  Kind kind_ = Kind::Zero;
  SpaceElement shape_;
  Real rate_ = 0;
  Real K_ = 0;
  Real L_ = 0;
  std::function<SpaceElement(Real)> custom_;
};

inline SpaceElement eta_value(const BackgroundSource& s, Real t) { return s.value(t); }

/// Bounded measurement noise, uniform on [-sigma, sigma]. Each draw is a pure
/// function of (seed, t, channel) via a counter-based hash, so measurement
/// streams can be regenerated in any order.
class NoiseModel {
 public:
  NoiseModel() = default;
  NoiseModel(Real sigma, std::uint64_t seed) : sigma_(sigma), seed_(seed) {
    if (!(sigma >= 0)) throw DomainError("noise level sigma must be >= 0");
  }

  Real sigma() const noexcept { return sigma_; }
  std::uint64_t seed() const noexcept { return seed_; }

  Real draw(Real t, std::uint64_t channel) const {
    if (sigma_ == 0) return 0;
    std::uint64_t bits = 0;
    static_assert(sizeof(double) == sizeof(bits));
    const double td = static_cast<double>(t);
    std::memcpy(&bits, &td, sizeof(bits));
    std::uint64_t h = mix(seed_ ^ 0x9e3779b97f4a7c15ULL);
    h = mix(h ^ bits);
    h = mix(h ^ (channel * 0xd1b54a32d192ed03ULL));
    // 53 random bits -> [0,1), then to [-1,1)
    const Real u = static_cast<Real>(h >> 11) * Real(0x1.0p-53);
    return sigma_ * (2 * u - 1);
  }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  Real sigma_ = 0;
  std::uint64_t seed_ = 0;
};

inline Real noise_draw(const NoiseModel& n, Real t, std::uint64_t channel) { return n.draw(t, channel); }

}  // namespace dynsamp
