#pragma once

// Finite-dimensional stand-in for the Hilbert space in which the state,
// burst shapes, samplers and background source live.
//
// Two representations are supported:
//   GridL2   - samples of a function on a uniform grid of [0,1]; the inner
//              product is the composite trapezoid rule.
//   Abstract - plain Euclidean coordinates.

#include "dynsamp/core.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dynsamp {

enum class Representation { GridL2, Abstract };

inline const char* to_string(Representation r) {
  return r == Representation::GridL2 ? "grid_l2" : "abstract";
}

inline constexpr Index kDefaultGridPoints = 1025;

class SpaceElement {
 public:
  SpaceElement() = default;

  SpaceElement(Representation rep, Vector coeffs) : rep_(rep), coeffs_(std::move(coeffs)) {
    if (rep_ == Representation::GridL2 && coeffs_.size() < 2) {
      throw DimensionError("GridL2 element needs at least 2 grid points");
    }
    if (coeffs_.size() < 1) {
      throw DimensionError("space element must have at least one coordinate");
    }
  }

  static SpaceElement zero(Representation rep, Index n) { return {rep, Vector::Zero(n)}; }

  Representation representation() const noexcept { return rep_; }
  Index size() const noexcept { return coeffs_.size(); }
  const Vector& coeffs() const noexcept { return coeffs_; }
  Real operator[](Index i) const { return coeffs_[i]; }

  bool compatible(const SpaceElement& other) const noexcept {
    return rep_ == other.rep_ && size() == other.size();
  }

  /// Grid abscissa of coordinate i (GridL2 only).
  Real grid_point(Index i) const {
    return static_cast<Real>(i) / static_cast<Real>(size() - 1);
  }

  SpaceElement& operator+=(const SpaceElement& o) {
    require_compatible(o);
    coeffs_ += o.coeffs_;
    return *this;
  }
  SpaceElement& operator-=(const SpaceElement& o) {
    require_compatible(o);
    coeffs_ -= o.coeffs_;
    return *this;
  }
  SpaceElement& operator*=(Real c) {
    coeffs_ *= c;
    return *this;
  }

  friend SpaceElement operator+(SpaceElement a, const SpaceElement& b) { return a += b; }
  friend SpaceElement operator-(SpaceElement a, const SpaceElement& b) { return a -= b; }
  friend SpaceElement operator*(Real c, SpaceElement a) { return a *= c; }
  friend SpaceElement operator*(SpaceElement a, Real c) { return a *= c; }

  void require_compatible(const SpaceElement& o) const {
    if (!compatible(o)) {
      throw DimensionError("space elements differ in representation or length (" +
                           std::to_string(size()) + " vs " + std::to_string(o.size()) + ")");
    }
  }

 private:
  Representation rep_ = Representation::Abstract;
  Vector coeffs_;
};

/// Trapezoid quadrature weights for a uniform grid of [0,1] with n points.
inline Vector trapezoid_weights(Index n) {
  const Real h = Real(1) / static_cast<Real>(n - 1);
  Vector w = Vector::Constant(n, h);
  w[0] = w[n - 1] = h / 2;
  return w;
}

/// Quadrature weights realizing the inner product of the representation.
inline Vector inner_weights(Representation rep, Index n) {
  return rep == Representation::GridL2 ? trapezoid_weights(n) : Vector::Ones(n);
}

inline Real inner(const SpaceElement& x, const SpaceElement& y) {
  x.require_compatible(y);
  const Vector& a = x.coeffs();
  const Vector& b = y.coeffs();
  if (x.representation() == Representation::Abstract) {
    return a.dot(b);
  }
  const Index n = a.size();
  const Real h = Real(1) / static_cast<Real>(n - 1);
  const Real ends = (a[0] * b[0] + a[n - 1] * b[n - 1]) / 2;
  return h * (a.dot(b) - ends);
}

inline Real norm(const SpaceElement& x) {
  // Guard against tiny negative values from cancellation in the trapezoid form.
  return std::sqrt(std::max(Real(0), inner(x, x)));
}

// Closed-form functions on [0,1] used for burst shapes, samplers and
// background profiles.
namespace fn {
struct Sin {
  Real scale = 1;  ///< scale * sin(x)
};
struct Cos {
  Real scale = 1;  ///< scale * cos(x)
};
struct Poly {
  std::vector<Real> coeffs;  ///< c0 + c1 x + c2 x^2 + ...
};
struct Const {
  Real value = 0;
};
}  // namespace fn

using FunctionExpr = std::variant<fn::Sin, fn::Cos, fn::Poly, fn::Const>;

inline Real evaluate(const FunctionExpr& expr, Real x) {
  struct Visitor {
    Real x;
    Real operator()(const fn::Sin& f) const { return f.scale * std::sin(x); }
    Real operator()(const fn::Cos& f) const { return f.scale * std::cos(x); }
    Real operator()(const fn::Const& f) const { return f.value; }
    Real operator()(const fn::Poly& f) const {
      Real acc = 0;
      for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it) acc = acc * x + *it;
      return acc;
    }
  };
  return std::visit(Visitor{x}, expr);
}

inline std::string describe(const FunctionExpr& expr) {
  struct Visitor {
    std::string operator()(const fn::Sin& f) const { return std::to_string(f.scale) + "*sin(x)"; }
    std::string operator()(const fn::Cos& f) const { return std::to_string(f.scale) + "*cos(x)"; }
    std::string operator()(const fn::Const& f) const { return std::to_string(f.value); }
    std::string operator()(const fn::Poly& f) const {
      std::string s;
      for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
        if (k) s += " + ";
        s += std::to_string(f.coeffs[k]);
        if (k == 1) s += "*x";
        if (k > 1) s += "*x^" + std::to_string(k);
      }
      return s.empty() ? "0" : s;
    }
  };
  return std::visit(Visitor{}, expr);
}

/// Samples a closed-form function on the uniform GridL2 grid of [0,1].
inline SpaceElement make_function(const FunctionExpr& expr, Index grid_points = kDefaultGridPoints) {
  if (grid_points < 2) throw DimensionError("make_function needs at least 2 grid points");
  Vector v(grid_points);
  for (Index i = 0; i < grid_points; ++i) {
    v[i] = evaluate(expr, static_cast<Real>(i) / static_cast<Real>(grid_points - 1));
  }
  return {Representation::GridL2, std::move(v)};
}

inline SpaceElement make_vector(std::vector<Real> coords) {
  Vector v = Eigen::Map<const Vector>(coords.data(), static_cast<Index>(coords.size()));
  return {Representation::Abstract, std::move(v)};
}

}  // namespace dynsamp
