#include "test_util.hpp"

#include <random>

using namespace dynsamp;
using namespace dynsamp::testing;

namespace {

Scenario scalar_burst(Real tj, Real rho = 1, Real a = 1, Real horizon = 2) {
  ModelParams p;
  p.beta = 0.1;
  p.horizon = horizon;
  return Scenario{SemigroupModel::scalar(a), make_vector({0}),
                  BurstTrain({{tj, make_vector({1})}}, DecayProfile::exponential(rho)),
                  BackgroundSource::zero(Representation::Abstract, 1), NoiseModel(), p};
}

}  // namespace

TEST_CASE("mild solution without forcing is the semigroup orbit") {
  ModelParams p;
  p.beta = 0.1;
  p.horizon = 2;
  const Scenario sc{SemigroupModel::scalar(1), make_vector({1}), BurstTrain({}, DecayProfile::exponential(1)),
                    BackgroundSource::zero(Representation::Abstract, 1), NoiseModel(), p};
  CHECK_THAT(d(mild_solution(sc, 1)[0]), WithinAbs(2.718282, 1e-6));
  CHECK_THAT(d(mild_solution(sc, 1.234)[0]), WithinRel(std::exp(1.234), 1e-14));
}

TEST_CASE("single scalar burst follows sinh") {
  const Scenario sc = scalar_burst(0.25);
  for (Real t : {Real(0.25), Real(0.3), Real(0.55), Real(1.0), Real(1.999)}) {
    CHECK_THAT(d(mild_solution(sc, t)[0]), WithinAbs(std::sinh(d(t) - 0.25), 1e-14));
    if (t > 0.25) CHECK_THAT(d(mild_solution(sc, t)[0]), WithinRel(std::sinh(d(t) - 0.25), 1e-10));
  }
  CHECK_THROWS_AS(mild_solution(sc, -0.1), DomainError);
  CHECK_THROWS_AS(mild_solution(sc, 2.5), DomainError);
}

TEST_CASE("closed-form burst convolutions") {
  const auto s1 = SemigroupModel::scalar(1);
  const SpaceElement h = make_vector({1});
  const auto e1 = DecayProfile::exponential(1);
  CHECK(d(convolve_burst(s1, h, e1, 0.3, 0.3, 0.1)[0]) == 0.0);
  CHECK_THAT(d(convolve_burst(s1, h, e1, 0.3, 0.4, 0.1)[0]), WithinAbs(0.100167, 1e-6));
  CHECK_THAT(d(convolve_burst(s1, h, e1, 0.3, 0.4, 0.1)[0]), WithinRel(std::sinh(0.1), 1e-13));
  // lambda + rho = 0
  const auto sm = SemigroupModel::scalar(-1);
  CHECK_THAT(d(convolve_burst(sm, h, e1, 0, 0.5, 0.1)[0]), WithinAbs(0.303265, 1e-6));
  CHECK_THAT(d(convolve_burst(sm, h, e1, 0, 0.5, 0.1)[0]), WithinRel(0.5 * std::exp(-0.5), 1e-14));
  CHECK_THROWS_AS(convolve_burst(s1, h, e1, 0.3, 0.2, 0.1), DomainError);
}

TEST_CASE("quadrature agrees with the closed form") {
  // A general profile that equals e^{-rho t} forces the quadrature path.
  const Real rho = 1.3;
  const auto exact = DecayProfile::exponential(rho);
  const auto general = DecayProfile::general(rho, [rho](Real t) { return std::exp(-rho * t); }, "exp");
  const auto diag = SemigroupModel::diagonal((Vector(3) << -2, 0.4, 1).finished());
  const SpaceElement h = make_vector({1, -2, 0.5});
  const QuadratureConfig q;
  for (Real t1 : {Real(0.31), Real(0.5), Real(1.2)}) {
    for (Real t0 : {Real(0.2), Real(0.3)}) {
      const SpaceElement a = convolve_burst(diag, h, exact, 0.2, t0, t1, 0.1, q);
      const SpaceElement b = convolve_burst(diag, h, general, 0.2, t0, t1, 0.1, q);
      CHECK(d(norm(a - b)) <= 1e-9 * d(norm(a)));
    }
  }
}

TEST_CASE("matrix kind agrees with the diagonal kind") {
  Vector lambda(2);
  lambda << -1, 0.5;
  const Matrix A = lambda.asDiagonal();
  const auto mat = SemigroupModel::matrix(A, {1, 0.5});
  const auto diag = SemigroupModel::diagonal(lambda);
  const SpaceElement h = make_vector({1, 2});
  const auto e = DecayProfile::exponential(1);
  const SpaceElement a = convolve_burst(mat, h, e, 0.1, 0.1, 0.6, 0.1, {});
  const SpaceElement b = convolve_burst(diag, h, e, 0.1, 0.1, 0.6, 0.1, {});
  CHECK(d(norm(a - b)) <= 1e-10 * d(norm(b)));
}

TEST_CASE("background convolutions") {
  const auto rep = Representation::Abstract;
  CHECK(d(norm(convolve_background(SemigroupModel::scalar(1), BackgroundSource::zero(rep, 2), 0, 1, 0.1))) == 0.0);
  // identity semigroup and a (nearly) constant profile
  const auto flat = BackgroundSource::exp_profile(make_vector({2, -1}), 0);
  const SpaceElement c = convolve_background(SemigroupModel::scalar(0), flat, 0.3, 0.8, 0.1);
  CHECK_THAT(d(c[0]), WithinRel(1.0, 1e-13));
  CHECK_THAT(d(c[1]), WithinRel(-0.5, 1e-13));
  // int_{t0}^{t1} e^{t1 - s} e^{-L s} ds = e^{t1} (e^{-(1+L) t0} - e^{-(1+L) t1}) / (1 + L)
  const Real L = 0.01;
  const auto ex = BackgroundSource::exp_profile(x_fn(), L);
  const Real t0 = 0.2, t1 = 0.35;
  const SpaceElement v = convolve_background(SemigroupModel::scalar(1), ex, t0, t1, 0.1);
  const Real factor = std::exp(t1) * (std::exp(-(1 + L) * t0) - std::exp(-(1 + L) * t1)) / (1 + L);
  CHECK(d(norm(v - factor * x_fn())) <= 1e-10 * d(norm(v)));
}

TEST_CASE("flow property of the mild solution") {
  ModelParams p;
  p.beta = 0.05;
  p.horizon = 2;
  const Scenario sc{SemigroupModel::diagonal((Vector(2) << -0.5, 0.8).finished()), make_vector({1, -1}),
                    BurstTrain({{0.33, make_vector({1, 2})}, {0.91, make_vector({-1, 0.5})}},
                               DecayProfile::mixture(1, {0.3, 0.7}, {1, 4})),
                    BackgroundSource::sin_profile(make_vector({0.2, 0.1}), 3), NoiseModel(), p};
  for (auto [t, s] : {std::pair<Real, Real>{0.2, 0.5}, {0.5, 0.77}, {1.0, 0.4}}) {
    const SpaceElement ut = mild_solution(sc, t);
    SpaceElement step = sc.semigroup.apply(s, ut);
    for (const auto& b : sc.bursts.events()) {
      if (b.time < t + s) step += convolve_burst(sc.semigroup, b.shape, sc.bursts.decay(), b.time, t, t + s, p.beta, p.quad);
    }
    step += convolve_background(sc.semigroup, sc.background, t, t + s, p.beta, p.quad);
    const SpaceElement direct = mild_solution(sc, t + s);
    CHECK(d(norm(step - direct)) <= 1e-9 * std::max(1.0, d(norm(direct))));
  }
}

TEST_CASE("Gauss-Legendre refinement converges at high order") {
  auto f = [](Real s) { return std::exp(3 * s) * std::cos(5 * s); };
  // int_0^2 e^{3s} cos 5s ds
  const Real exact = (std::exp(6.0L) * (3 * std::cos(10.0L) + 5 * std::sin(10.0L)) - 3) / 34;
  Real previous = 0;
  for (int panels : {1, 2, 4}) {
    Real value = 0;
    auto acc = [&](Real w, Real y) { value += w * y; };
    gauss8_composite(f, 0, 2, panels, acc);
    const Real err = std::abs(value - exact);
    if (previous > 0 && err > 1e-14 * std::abs(exact)) CHECK(previous / err >= 64);
    previous = err;
  }
}

TEST_CASE("quadrature failure reports the achieved tolerance") {
  QuadratureConfig q;
  q.tol = 1e-30;
  q.panels = 1;
  q.max_refinements = 1;
  auto f = [](Real s) { return std::sqrt(std::abs(s - 0.3337)); };
  try {
    integrate(f, 0, 1, q, 1);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(e.achieved() > e.requested());
    CHECK(d(e.requested()) == 1e-30);
  }
}
