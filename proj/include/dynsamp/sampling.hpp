#pragma once

// Two-channel space-time measurements and the predictor differences.
//
// For each sampler g and grid index n:
//   m_state[n] = <u(n beta), g / beta>            + nu(n beta, state channel)
//   m_pred[n]  = <u(n beta), T*(beta) g / beta>   + nu(n beta, pred channel)
//   F[n]       = m_state[n+1] - m_pred[n]
//   Delta[n]   = e^{rho beta} F[n+1] - F[n]
// In the noiseless, background-free case Delta[n] vanishes unless a burst
// starts in [n beta, (n+2) beta).

#include "dynsamp/core.hpp"
#include "dynsamp/solver.hpp"
#include "dynsamp/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace dynsamp {

class SamplerSet {
 public:
  explicit SamplerSet(std::vector<SpaceElement> gtilde) : gtilde_(std::move(gtilde)) {
    if (gtilde_.empty()) throw DomainError("sampler set must not be empty");
    for (const auto& g : gtilde_) {
      g.require_compatible(gtilde_.front());
      R_ = std::max(R_, norm(g));
    }
  }

  const std::vector<SpaceElement>& samplers() const noexcept { return gtilde_; }
  const SpaceElement& operator[](std::size_t k) const { return gtilde_[k]; }
  std::size_t size() const noexcept { return gtilde_.size(); }
  /// sup of ||g|| over the set
  Real R() const noexcept { return R_; }

 private:
  std::vector<SpaceElement> gtilde_;
  Real R_ = 0;
};

enum class Channel : std::uint64_t { State = 0, Pred = 1 };

/// Noise channel of (sampler, channel); every sampler owns two channels.
inline std::uint64_t channel_id(std::size_t sampler, Channel c) {
  return 2 * static_cast<std::uint64_t>(sampler) + static_cast<std::uint64_t>(c);
}

struct SamplerSeries {
  std::vector<Real> m_state;
  std::vector<Real> m_pred;
  std::vector<Real> F;      ///< size m_state.size() - 1
  std::vector<Real> delta;  ///< size m_state.size() - 2
};

struct MeasurementSeries {
  Real beta = 0;
  Real rho = 0;
  std::vector<SamplerSeries> per_sampler;

  /// Number of grid samples n = 0 .. length()-1.
  std::size_t length() const { return per_sampler.empty() ? 0 : per_sampler.front().m_state.size(); }
  std::size_t samplers() const { return per_sampler.size(); }

  /// max(1, max_n |m_state[n]|) over all samplers; the scale used for
  /// round-off floors.
  Real scale() const {
    Real s = 1;
    for (const auto& ss : per_sampler) {
      for (Real v : ss.m_state) s = std::max(s, std::abs(v));
    }
    return s;
  }
};

/// Fills F and Delta from the raw measurement channels.
inline void derive_differences(SamplerSeries& s, Real rho, Real beta) {
  if (s.m_state.size() != s.m_pred.size()) {
    throw DimensionError("state and predictor channels differ in length");
  }
  const std::size_t n = s.m_state.size();
  s.F.assign(n > 0 ? n - 1 : 0, 0);
  for (std::size_t i = 0; i + 1 < n; ++i) s.F[i] = s.m_state[i + 1] - s.m_pred[i];
  const Real growth = std::exp(rho * beta);
  s.delta.assign(n > 1 ? n - 2 : 0, 0);
  for (std::size_t i = 0; i + 2 < n; ++i) s.delta[i] = growth * s.F[i + 1] - s.F[i];
}

/// The measurement pair (m_state, m_pred) at grid index n for sampler g.
inline std::pair<Real, Real> measure(const Scenario& sc, Index n, const SpaceElement& g,
                                     std::size_t sampler_index = 0) {
  if (n < 0 || n > sc.last_index()) {
    throw DomainError("measurement index " + std::to_string(n) + " outside the horizon");
  }
  const Real beta = sc.params.beta;
  const Real t = grid_time(n, beta);
  const SpaceElement u = mild_solution(sc, t);
  const SpaceElement g_pred = sc.semigroup.apply_adjoint(beta, g);
  return {inner(u, g) / beta + sc.noise.draw(t, channel_id(sampler_index, Channel::State)),
          inner(u, g_pred) / beta + sc.noise.draw(t, channel_id(sampler_index, Channel::Pred))};
}

/// All measurements for n = 0 .. last_index(), marching the solver once.
inline MeasurementSeries generate_series(const Scenario& sc, const SamplerSet& samplers) {
  sc.check_compatible();
  const Real beta = sc.params.beta;
  const Index last = sc.last_index();
  std::vector<SpaceElement> pred;
  pred.reserve(samplers.size());
  for (const auto& g : samplers.samplers()) {
    g.require_compatible(sc.u0);
    pred.push_back(sc.semigroup.apply_adjoint(beta, g));
  }

  MeasurementSeries out;
  out.beta = beta;
  out.rho = sc.rho();
  out.per_sampler.resize(samplers.size());
  for (auto& s : out.per_sampler) {
    s.m_state.reserve(static_cast<std::size_t>(last + 1));
    s.m_pred.reserve(static_cast<std::size_t>(last + 1));
  }

  MildSolver solver(sc);
  for (Index n = 0; n <= last; ++n) {
    solver.advance_to_index(n);
    const Real t = grid_time(n, beta);
    const SpaceElement& u = solver.state();
    for (std::size_t k = 0; k < samplers.size(); ++k) {
      auto& s = out.per_sampler[k];
      s.m_state.push_back(inner(u, samplers[k]) / beta + sc.noise.draw(t, channel_id(k, Channel::State)));
      s.m_pred.push_back(inner(u, pred[k]) / beta + sc.noise.draw(t, channel_id(k, Channel::Pred)));
    }
  }
  for (auto& s : out.per_sampler) derive_differences(s, out.rho, beta);
  return out;
}

inline Real compute_F(const MeasurementSeries& series, std::size_t sampler, std::size_t n) {
  const auto& s = series.per_sampler.at(sampler);
  if (n + 1 >= s.m_state.size()) throw DomainError("compute_F: index out of range");
  return s.m_state[n + 1] - s.m_pred[n];
}

inline Real compute_delta(const MeasurementSeries& series, std::size_t sampler, std::size_t n, Real rho,
                          Real beta) {
  const auto& s = series.per_sampler.at(sampler);
  if (n + 2 >= s.m_state.size()) throw DomainError("compute_delta: index out of range");
  return std::exp(rho * beta) * compute_F(series, sampler, n + 1) - compute_F(series, sampler, n);
}

/// CSV columns: n,t,sampler_id,m_state,m_pred,F,Delta. F and Delta are left
/// empty where they are undefined (last one or two rows).
inline void write_measurements_csv(std::ostream& os, const MeasurementSeries& series) {
  os << "n,t,sampler_id,m_state,m_pred,F,Delta\n";
  for (std::size_t n = 0; n < series.length(); ++n) {
    for (std::size_t k = 0; k < series.samplers(); ++k) {
      const auto& s = series.per_sampler[k];
      os << n << ',' << format_real(grid_time(static_cast<Index>(n), series.beta)) << ',' << k << ','
         << format_real(s.m_state[n]) << ',' << format_real(s.m_pred[n]) << ',';
      if (n < s.F.size()) os << format_real(s.F[n]);
      os << ',';
      if (n < s.delta.size()) os << format_real(s.delta[n]);
      os << '\n';
    }
  }
}

/// Rebuilds a series from a measurement CSV (only the m_state and m_pred
/// columns are read; F and Delta are recomputed).
inline MeasurementSeries read_measurements_csv(std::istream& is, Real rho, Real beta) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("empty measurement file");
  std::map<std::size_t, std::map<std::size_t, std::pair<Real, Real>>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (cols.size() < 5) throw DomainError("malformed measurement row: " + line);
    rows[std::stoul(cols[2])][std::stoul(cols[0])] = {static_cast<Real>(std::stold(cols[3])), static_cast<Real>(std::stold(cols[4]))};
  }
  MeasurementSeries out;
  out.beta = beta;
  out.rho = rho;
  for (const auto& [k, by_n] : rows) {
    SamplerSeries s;
    std::size_t expected = 0;
    for (const auto& [n, v] : by_n) {
      if (n != expected++) throw DomainError("measurement file has a gap in n");
      s.m_state.push_back(v.first);
      s.m_pred.push_back(v.second);
    }
    derive_differences(s, rho, beta);
    out.per_sampler.push_back(std::move(s));
  }
  return out;
}

}  // namespace dynsamp
