#pragma once

// Realizations of a strongly continuous semigroup T(t) on the discretized
// space: scalar multiples of the identity, diagonal (spectral) operators and
// dense matrix exponentials.

#include "dynsamp/core.hpp"
#include "dynsamp/space.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace dynsamp {

/// Constants with ||T(t)|| <= M e^{a t} for all t >= 0.
struct GrowthBound {
  Real M = 1;
  Real a = 0;
};

/// C = sup_{0 <= s <= beta} M e^{a s} = M e^{max(a,0) beta}, which bounds
/// ||T(s)|| and ||T*(s)|| on a sampling step.
inline Real step_bound(const GrowthBound& g, Real beta) {
  return g.M * std::exp(std::max(g.a, Real(0)) * beta);
}

class SemigroupModel {
 public:
  enum class Kind { Scalar, Diagonal, Matrix };

  /// T(t) = e^{a t} I on any space.
  static SemigroupModel scalar(Real a) {
    SemigroupModel s;
    s.kind_ = Kind::Scalar;
    s.scalar_ = a;
    s.bound_ = {1, a};
    return s;
  }

  /// T(t) multiplies coordinate k by e^{lambda_k t}.
  static SemigroupModel diagonal(Vector lambda) {
    if (lambda.size() < 1) throw DimensionError("diagonal semigroup needs at least one eigenvalue");
    SemigroupModel s;
    s.kind_ = Kind::Diagonal;
    s.bound_ = {1, lambda.maxCoeff()};
    s.lambda_ = std::move(lambda);
    return s;
  }

  /// T(t) = exp(tA). The growth constants are supplied by the caller and
  /// checked against the operator norm on t in {0, 0.1, ..., 2}.
  static SemigroupModel matrix(Matrix generator, GrowthBound bound,
                               Representation rep = Representation::Abstract) {
    if (generator.rows() != generator.cols() || generator.rows() < 1) {
      throw DimensionError("matrix generator must be square and non-empty");
    }
    if (rep == Representation::GridL2 && generator.rows() < 2) {
      throw DimensionError("GridL2 matrix generator needs at least 2 grid points");
    }
    SemigroupModel s;
    s.kind_ = Kind::Matrix;
    s.generator_ = std::move(generator);
    s.bound_ = bound;
    s.rep_ = rep;
    s.validate_growth();
    return s;
  }

  Kind kind() const noexcept { return kind_; }
  GrowthBound growth_bound() const noexcept { return bound_; }

  /// Required coordinate count, or 0 when the model acts on any space.
  Index dimension() const noexcept {
    switch (kind_) {
      case Kind::Scalar: return 0;
      case Kind::Diagonal: return lambda_.size();
      case Kind::Matrix: return generator_.rows();
    }
    return 0;
  }

  /// True when T(t) is diagonal in the coordinate basis.
  bool is_spectral() const noexcept { return kind_ != Kind::Matrix; }

  /// Eigenvalue acting on coordinate k (spectral kinds only).
  Real eigenvalue(Index k) const {
    if (kind_ == Kind::Scalar) return scalar_;
    if (kind_ == Kind::Diagonal) return lambda_[k];
    throw DomainError("eigenvalue() is only defined for scalar and diagonal semigroups");
  }

  const Matrix& generator() const noexcept { return generator_; }

  SpaceElement apply(Real t, const SpaceElement& x) const {
    check(t, x);
    switch (kind_) {
      case Kind::Scalar:
        return std::exp(scalar_ * t) * x;
      case Kind::Diagonal:
        return {x.representation(), ((lambda_ * t).array().exp() * x.coeffs().array()).matrix()};
      case Kind::Matrix:
        return {x.representation(), propagator(t) * x.coeffs()};
    }
    return x;
  }

  /// T*(t) with respect to the inner product of g's representation.
  SpaceElement apply_adjoint(Real t, const SpaceElement& g) const {
    check(t, g);
    if (kind_ != Kind::Matrix) return apply(t, g);
    const Matrix E = propagator(t);
    if (g.representation() == Representation::Abstract) {
      return {g.representation(), E.transpose() * g.coeffs()};
    }
    // <Ex, y>_W = <x, W^{-1} E^T W y>_W
    const Vector w = inner_weights(g.representation(), g.size());
    Vector y = E.transpose() * (w.array() * g.coeffs().array()).matrix();
    return {g.representation(), (y.array() / w.array()).matrix()};
  }

  /// exp(tA) for the matrix kind.
  Matrix propagator(Real t) const {
    if (kind_ != Kind::Matrix) throw DomainError("propagator() requires the matrix kind");
    if (t == 0) return Matrix::Identity(generator_.rows(), generator_.cols());
    return Matrix((t * generator_).exp());
  }

  /// Operator norm of T(t) induced by the inner product of `rep` on n coordinates.
  Real operator_norm(Real t, Representation rep, Index n) const {
    if (t < 0) throw DomainError("operator_norm: negative time");
    switch (kind_) {
      case Kind::Scalar:
        return std::exp(scalar_ * t);
      case Kind::Diagonal:
        return std::exp(lambda_.maxCoeff() * t);
      case Kind::Matrix: {
        const Vector sw = inner_weights(rep, n).array().sqrt();
        const Matrix E = propagator(t);
        const Matrix scaled = sw.asDiagonal() * E * sw.cwiseInverse().asDiagonal();
        return Eigen::JacobiSVD<Matrix>(scaled).singularValues()[0];
      }
    }
    return 0;
  }

 private:
  SemigroupModel() = default;

  void check(Real t, const SpaceElement& x) const {
    if (!(t >= 0)) throw DomainError("semigroup time must be >= 0, got " + std::to_string(t));
    const Index d = dimension();
    if (d != 0 && d != x.size()) {
      throw DimensionError("semigroup of dimension " + std::to_string(d) +
                           " applied to element of length " + std::to_string(x.size()));
    }
    if (kind_ == Kind::Matrix && x.representation() != rep_) {
      throw DimensionError("matrix semigroup applied to element of another representation");
    }
  }

  void validate_growth() const {
    if (!(bound_.M >= 1)) throw ValidationError("growth bound requires M >= 1");
    for (int k = 0; k <= 20; ++k) {
      const Real t = Real(0.1) * k;
      const Real actual = operator_norm(t, rep_, generator_.rows());
      const Real allowed = bound_.M * std::exp(bound_.a * t);
      if (actual > allowed * (1 + 1e-10)) {
        throw ValidationError("growth bound violated at t=" + std::to_string(t) + ": ||T(t)|| = " +
                              std::to_string(actual) + " > M e^{at} = " + std::to_string(allowed));
      }
    }
  }

  Kind kind_ = Kind::Scalar;
  Real scalar_ = 0;
  Vector lambda_;
  Matrix generator_;
  GrowthBound bound_;
  Representation rep_ = Representation::Abstract;
};

}  // namespace dynsamp
