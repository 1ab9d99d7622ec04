#include "test_util.hpp"

#include <sstream>

using namespace dynsamp;
using namespace dynsamp::testing;

namespace {

Scenario scalar_scenario(std::vector<Burst> bursts, Real u0 = 0, Real sigma = 0, Real beta = 0.1, Real horizon = 2) {
  ModelParams p;
  p.beta = beta;
  p.horizon = horizon;
  return Scenario{SemigroupModel::scalar(1), make_vector({u0}), BurstTrain(std::move(bursts), DecayProfile::exponential(1)),
                  BackgroundSource::zero(Representation::Abstract, 1), NoiseModel(sigma, 99), p};
}

const SpaceElement g1 = make_vector({1});

}  // namespace

TEST_CASE("single measurement pairs") {
  const auto zero = measure(scalar_scenario({}), 3, g1);
  CHECK(d(zero.first) == 0.0);
  CHECK(d(zero.second) == 0.0);
  const auto unit = measure(scalar_scenario({}, 1), 0, g1);
  CHECK_THAT(d(unit.first), WithinRel(10.0, 1e-14));
  CHECK_THAT(d(unit.second), WithinAbs(11.05171, 1e-5));
  CHECK_THROWS_AS(measure(scalar_scenario({}), 21, g1), DomainError);
  CHECK_THROWS_AS(measure(scalar_scenario({}), -1, g1), DomainError);
}

TEST_CASE("noise moves each channel by at most sigma") {
  const Scenario clean = scalar_scenario({{0.33, make_vector({1})}}, 0.5);
  const Scenario noisy = scalar_scenario({{0.33, make_vector({1})}}, 0.5, 1e-3);
  const SamplerSet g({g1});
  const MeasurementSeries a = generate_series(clean, g), b = generate_series(noisy, g);
  Real largest = 0;
  for (std::size_t n = 0; n < a.length(); ++n) {
    for (auto [x, y] : {std::pair{a.per_sampler[0].m_state[n], b.per_sampler[0].m_state[n]},
                        std::pair{a.per_sampler[0].m_pred[n], b.per_sampler[0].m_pred[n]}}) {
      REQUIRE(std::abs(x - y) <= Real(1e-3) * (1 + 1e-9));
      largest = std::max(largest, std::abs(x - y));
    }
  }
  CHECK(d(largest) > 5e-4);
}

TEST_CASE("predictor differences in closed form") {
  const SamplerSet g({g1});
  // no bursts: the prediction is exact
  const MeasurementSeries none = generate_series(scalar_scenario({}, 1), g);
  for (Real f : none.per_sampler[0].F) CHECK(d(std::abs(f)) <= 1e-12 * d(none.scale()));

  // burst at 0.3 = 3 beta: F_3 = sinh(beta) / beta
  const MeasurementSeries at = generate_series(scalar_scenario({{0.3, make_vector({1})}}), g);
  CHECK_THAT(d(compute_F(at, 0, 3)), WithinAbs(1.001668, 1e-6));
  CHECK_THAT(d(compute_F(at, 0, 3)), WithinRel(std::sinh(0.1) / 0.1, 1e-12));
  // Delta_2 = e^{beta} F_3 with F_2 = 0
  CHECK_THAT(d(compute_delta(at, 0, 2, 1, 0.1)), WithinAbs(1.107014, 1e-6));
  CHECK_THAT(d(at.per_sampler[0].delta[2]), WithinRel(std::exp(0.1) * std::sinh(0.1) / 0.1, 1e-12));

  // only past bursts: F_n = sum e^{-rho (n beta - tau)} (1/beta) int_0^beta e^{beta - r} e^{-rho r} dr
  const std::vector<Real> taus = {0.25, 0.61};
  const MeasurementSeries past = generate_series(scalar_scenario({{taus[0], make_vector({1})}, {taus[1], make_vector({1})}}), g);
  const Real beta = 0.1, rho = 1;
  const Real kernel = std::exp(beta) * -std::expm1(-(1 + rho) * beta) / (1 + rho) / beta;
  for (std::size_t n = 7; n < 19; ++n) {
    const Real t = grid_time(static_cast<Index>(n), beta);
    Real expected = 0;
    for (Real tau : taus) {
      if (tau < t) expected += std::exp(-rho * (t - tau)) * kernel;
    }
    CHECK_THAT(d(past.per_sampler[0].F[n]), WithinRel(d(expected), 1e-10));
  }
}

TEST_CASE("old bursts cancel out of Delta under exponential decay") {
  const SamplerSet g({grid(fn::Const{1}, 65), grid(fn::Poly{{0, 1}}, 65)});
  auto build = [](bool with_old) {
    ModelParams p;
    p.beta = 0.02;
    p.horizon = 1;
    std::vector<Burst> b;
    if (with_old) b.push_back({0.1, grid(fn::Sin{4}, 65)});
    b.push_back({0.6, grid(fn::Cos{1}, 65)});
    return Scenario{SemigroupModel::scalar(0.7), grid(fn::Poly{{1, -1}}, 65),
                    BurstTrain(std::move(b), DecayProfile::exponential(1.5)),
                    BackgroundSource::zero(Representation::GridL2, 65), NoiseModel(), p};
  };
  const MeasurementSeries with = generate_series(build(true), g);
  const MeasurementSeries without = generate_series(build(false), g);
  const Real scale = std::max(with.scale(), without.scale());
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t n = 0; n < with.per_sampler[k].delta.size(); ++n) {
      // n beta >= 0.1 + 4 beta
      if (grid_time(static_cast<Index>(n), 0.02) < 0.18) continue;
      CHECK(d(std::abs(with.per_sampler[k].delta[n] - without.per_sampler[k].delta[n])) <= 1e-9 * d(scale));
    }
  }
}

TEST_CASE("predictor channel equals the pairing with T(beta) u") {
  Matrix A(3, 3);
  A << -1, 0.5, 0, -0.5, -0.2, 0.1, 0, 0.3, -0.4;
  const Real mu = Eigen::SelfAdjointEigenSolver<Matrix>((A + A.transpose()) / 2).eigenvalues().maxCoeff();
  ModelParams p;
  p.beta = 0.05;
  p.horizon = 0.5;
  const Scenario sc{SemigroupModel::matrix(A, {1, mu + 1e-12}), make_vector({1, 2, -1}),
                    BurstTrain({{0.12, make_vector({0, 1, 1})}}, DecayProfile::exponential(1)),
                    BackgroundSource::zero(Representation::Abstract, 3), NoiseModel(), p};
  const SpaceElement g = make_vector({0.3, -1, 0.2});
  const MeasurementSeries m = generate_series(sc, SamplerSet({g}));
  for (Index n = 0; n < 8; ++n) {
    const SpaceElement u = mild_solution(sc, grid_time(n, p.beta));
    const Real direct = inner(sc.semigroup.apply(p.beta, u), g) / p.beta;
    CHECK(d(std::abs(m.per_sampler[0].m_pred[static_cast<std::size_t>(n)] - direct)) <= 1e-10 * std::max(1.0, d(std::abs(direct))));
  }
}

TEST_CASE("measurement CSV round trip") {
  const Scenario sc = scalar_scenario({{0.33, make_vector({1})}}, 0.5, 1e-3);
  const MeasurementSeries m = generate_series(sc, SamplerSet({g1, make_vector({2})}));
  std::stringstream ss;
  write_measurements_csv(ss, m);
  const std::string text = ss.str();
  CHECK(text.rfind("n,t,sampler_id,m_state,m_pred,F,Delta\n", 0) == 0);
  const MeasurementSeries back = read_measurements_csv(ss, sc.rho(), sc.params.beta);
  REQUIRE(back.samplers() == 2);
  REQUIRE(back.length() == m.length());
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t n = 0; n < m.per_sampler[k].delta.size(); ++n) {
      CHECK(back.per_sampler[k].delta[n] == m.per_sampler[k].delta[n]);
    }
  }
}

TEST_CASE("sampler sets") {
  const SamplerSet s({make_vector({3, 4}), make_vector({1, 0})});
  CHECK(d(s.R()) == 5.0);
  CHECK_THROWS_AS(SamplerSet({}), DomainError);
  CHECK_THROWS_AS(SamplerSet({make_vector({1}), make_vector({1, 2})}), DimensionError);
}
