#pragma once

// JSON run configurations and the bundled reproduction scenarios.

#include "dynsamp/core.hpp"
#include "dynsamp/detector.hpp"
#include "dynsamp/experiment.hpp"
#include "dynsamp/forcing.hpp"
#include "dynsamp/semigroup.hpp"
#include "dynsamp/solver.hpp"
#include "dynsamp/space.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace dynsamp {

using Json = nlohmann::json;

/// A closed-form function on [0,1] (GridL2) or explicit coordinates (Abstract).
struct ElementSpec {
  std::optional<FunctionExpr> fn;
  std::vector<Real> coords;
};

struct SemigroupSpec {
  std::string kind = "scalar";  ///< scalar | diagonal | matrix
  Real a = 0;
  Real M = 1;
  std::vector<Real> eigenvalues;
  std::vector<std::vector<Real>> generator;
};

struct BurstSpec {
  Real time = 0;
  ElementSpec shape;
};

struct DecaySpec {
  std::string kind = "exponential";  ///< exponential | mixture
  Real rho = 1;
  std::vector<Real> weights;
  std::vector<Real> rates;
};

struct BackgroundSpec {
  std::string kind = "zero";  ///< zero | exp | sin
  ElementSpec shape;
  Real rate = 0;
};

struct RunConfig {
  std::string name = "run";
  Algorithm mode = Algorithm::Alg1;
  Representation representation = Representation::GridL2;
  Index grid_points = kDefaultGridPoints;
  SemigroupSpec semigroup;
  std::optional<ElementSpec> u0;
  std::vector<BurstSpec> bursts;
  std::optional<Real> H;
  DecaySpec decay;
  BackgroundSpec background;
  Real sigma = 0;
  std::uint64_t seed = 0;
  std::vector<ElementSpec> samplers;
  Real beta = 0.01;
  Real horizon = 1;
  Real D = 0;
  Real quad_tol = 1e-10;
  int quad_panels = 64;
  ThresholdExponent exponent = ThresholdExponent::RhoBeta;
  std::string output_dir;
};

// --------------------------------------------------------------------------
// JSON <-> RunConfig

namespace detail {

inline ValidationError config_error(const std::string& what) { return ValidationError("config: " + what); }

inline const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw config_error(std::string("missing key '") + key + "'");
  return j.at(key);
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw config_error(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return require(j, key).get<T>();
  } catch (const Json::exception& e) {
    throw config_error(std::string("bad value for '") + key + "': " + e.what());
  }
}

inline ElementSpec element_from_json(const Json& j) {
  ElementSpec e;
  if (j.is_array()) {
    e.coords = j.get<std::vector<Real>>();
    return e;
  }
  if (!j.is_object() || j.size() != 1) {
    throw config_error("an element is a coordinate array or one of {sin, cos, poly, const}: " + j.dump());
  }
  if (j.contains("sin")) e.fn = fn::Sin{j["sin"].get<Real>()};
  else if (j.contains("cos")) e.fn = fn::Cos{j["cos"].get<Real>()};
  else if (j.contains("poly")) e.fn = fn::Poly{j["poly"].get<std::vector<Real>>()};
  else if (j.contains("const")) e.fn = fn::Const{j["const"].get<Real>()};
  else throw config_error("unknown element kind: " + j.dump());
  return e;
}

inline Json element_to_json(const ElementSpec& e) {
  if (!e.fn) return Json(e.coords);
  struct Visitor {
    Json operator()(const fn::Sin& f) const { return {{"sin", f.scale}}; }
    Json operator()(const fn::Cos& f) const { return {{"cos", f.scale}}; }
    Json operator()(const fn::Poly& f) const { return {{"poly", f.coeffs}}; }
    Json operator()(const fn::Const& f) const { return {{"const", f.value}}; }
  };
  return std::visit(Visitor{}, *e.fn);
}

}  // namespace detail

inline RunConfig config_from_json(const Json& j) {
  using namespace detail;
  if (!j.is_object()) throw config_error("top level must be an object");
  RunConfig c;
  c.name = get_or<std::string>(j, "name", c.name);
  const auto mode = get_or<std::string>(j, "mode", "alg1");
  if (mode == "alg1") c.mode = Algorithm::Alg1;
  else if (mode == "alg2") c.mode = Algorithm::Alg2;
  else throw config_error("mode must be alg1 or alg2");

  if (j.contains("space")) {
    const Json& s = j["space"];
    const auto rep = get_or<std::string>(s, "representation", "grid");
    if (rep == "grid") c.representation = Representation::GridL2;
    else if (rep == "abstract") c.representation = Representation::Abstract;
    else throw config_error("space.representation must be grid or abstract");
    c.grid_points = get_or<Index>(s, "points", c.grid_points);
  }

  const Json& sg = require(j, "semigroup");
  c.semigroup.kind = get<std::string>(sg, "kind");
  c.semigroup.a = get_or<Real>(sg, "a", 0);
  c.semigroup.M = get_or<Real>(sg, "M", 1);
  c.semigroup.eigenvalues = get_or<std::vector<Real>>(sg, "eigenvalues", {});
  c.semigroup.generator = get_or<std::vector<std::vector<Real>>>(sg, "generator", {});

  if (j.contains("u0")) c.u0 = element_from_json(j["u0"]);
  for (const Json& b : get_or<Json>(j, "bursts", Json::array())) {
    c.bursts.push_back({get<Real>(b, "time"), element_from_json(require(b, "shape"))});
  }
  if (j.contains("H")) c.H = get<Real>(j, "H");

  const Json& d = require(j, "decay");
  c.decay.kind = get<std::string>(d, "kind");
  c.decay.rho = get<Real>(d, "rho");
  c.decay.weights = get_or<std::vector<Real>>(d, "weights", {});
  c.decay.rates = get_or<std::vector<Real>>(d, "rates", {});

  if (j.contains("background")) {
    const Json& bg = j["background"];
    c.background.kind = get<std::string>(bg, "kind");
    if (c.background.kind != "zero") {
      c.background.shape = element_from_json(require(bg, "shape"));
      c.background.rate = get<Real>(bg, "rate");
    }
  }
  if (j.contains("noise")) {
    c.sigma = get_or<Real>(j["noise"], "sigma", 0);
    c.seed = get_or<std::uint64_t>(j["noise"], "seed", 0);
  }
  for (const Json& g : require(j, "samplers")) c.samplers.push_back(element_from_json(g));
  c.beta = get<Real>(j, "beta");
  c.horizon = get<Real>(j, "horizon");
  c.D = get_or<Real>(j, "D", 0);
  if (j.contains("quadrature")) {
    c.quad_tol = get_or<Real>(j["quadrature"], "tol", c.quad_tol);
    c.quad_panels = get_or<int>(j["quadrature"], "panels", c.quad_panels);
  }
  const auto ex = get_or<std::string>(j, "threshold_exponent", "rho_beta");
  if (ex == "rho_beta") c.exponent = ThresholdExponent::RhoBeta;
  else if (ex == "beta") c.exponent = ThresholdExponent::Beta;
  else throw config_error("threshold_exponent must be rho_beta or beta");
  c.output_dir = get_or<std::string>(j, "output_dir", "");
  return c;
}

inline Json config_to_json(const RunConfig& c) {
  using detail::element_to_json;
  Json j;
  j["name"] = c.name;
  j["mode"] = to_string(c.mode);
  j["space"] = {{"representation", c.representation == Representation::GridL2 ? "grid" : "abstract"},
                {"points", c.grid_points}};
  Json sg = {{"kind", c.semigroup.kind}};
  if (c.semigroup.kind == "scalar") sg["a"] = c.semigroup.a;
  if (c.semigroup.kind == "diagonal") sg["eigenvalues"] = c.semigroup.eigenvalues;
  if (c.semigroup.kind == "matrix") {
    sg["generator"] = c.semigroup.generator;
    sg["M"] = c.semigroup.M;
    sg["a"] = c.semigroup.a;
  }
  j["semigroup"] = sg;
  if (c.u0) j["u0"] = element_to_json(*c.u0);
  j["bursts"] = Json::array();
  for (const auto& b : c.bursts) j["bursts"].push_back({{"time", b.time}, {"shape", element_to_json(b.shape)}});
  if (c.H) j["H"] = *c.H;
  Json d = {{"kind", c.decay.kind}, {"rho", c.decay.rho}};
  if (c.decay.kind == "mixture") {
    d["weights"] = c.decay.weights;
    d["rates"] = c.decay.rates;
  }
  j["decay"] = d;
  Json bg = {{"kind", c.background.kind}};
  if (c.background.kind != "zero") {
    bg["shape"] = element_to_json(c.background.shape);
    bg["rate"] = c.background.rate;
  }
  j["background"] = bg;
  j["noise"] = {{"sigma", c.sigma}, {"seed", c.seed}};
  j["samplers"] = Json::array();
  for (const auto& g : c.samplers) j["samplers"].push_back(element_to_json(g));
  j["beta"] = c.beta;
  j["horizon"] = c.horizon;
  j["D"] = c.D;
  j["quadrature"] = {{"tol", c.quad_tol}, {"panels", c.quad_panels}};
  j["threshold_exponent"] = c.exponent == ThresholdExponent::RhoBeta ? "rho_beta" : "beta";
  if (!c.output_dir.empty()) j["output_dir"] = c.output_dir;
  return j;
}

inline RunConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw detail::config_error(std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline const char* config_schema() {
  return R"(Run configuration (JSON object)

  name                string     run label, also the output subdirectory (default "run")
  mode                string     "alg1" (exponential decay) | "alg2" (general decay, needs D > 0)
  space.representation string    "grid" (samples on [0,1], trapezoid inner product) | "abstract"
  space.points        integer    grid size for "grid" (default 1025)
  semigroup.kind      string     "scalar" | "diagonal" | "matrix"
  semigroup.a         number     scalar: T(t) = e^{a t}; matrix: growth exponent
  semigroup.eigenvalues [number] diagonal: one eigenvalue per coordinate
  semigroup.generator [[number]] matrix: generator A, T(t) = exp(tA)
  semigroup.M         number     matrix: growth constant, ||T(t)|| <= M e^{a t}
  u0                  element    initial state (default zero)
  bursts              [{time, shape}]  strictly increasing times > 0
  H                   number     burst norm bound (default max ||h_j||)
  decay.kind          string     "exponential" | "mixture"
  decay.rho           number     phi(t) <= e^{-rho t}
  decay.weights/rates [number]   mixture: phi(t) = sum w_k e^{-r_k t}
  background.kind     string     "zero" | "exp" (shape e^{-rate t}) | "sin" (shape sin(rate t))
  background.shape    element
  background.rate     number
  noise.sigma         number     |nu| <= sigma, uniform
  noise.seed          integer
  samplers            [element]
  beta                number     sampling step
  horizon             number     scan runs while i beta < horizon
  D                   number     minimum burst gap for alg2
  quadrature.tol      number     relative tolerance (default 1e-10)
  quadrature.panels   integer    Gauss-Legendre panels per beta (default 64)
  threshold_exponent  string     "rho_beta" (default) | "beta": factor on K in Q
  output_dir          string     overrides the output directory

An element is one of {"sin": s}, {"cos": s}, {"poly": [c0, c1, ...]},
{"const": c} on [0,1], or a coordinate array for the abstract space.
)";
}

// --------------------------------------------------------------------------
// RunConfig -> ExperimentSetup

inline SpaceElement build_element(const ElementSpec& e, Representation rep, Index n) {
  if (rep == Representation::GridL2) {
    if (!e.fn) throw detail::config_error("grid elements must be closed-form functions");
    return make_function(*e.fn, n);
  }
  if (e.fn) throw detail::config_error("abstract elements must be coordinate arrays");
  if (static_cast<Index>(e.coords.size()) != n) throw detail::config_error("coordinate array has the wrong length");
  return make_vector(e.coords);
}

inline Index space_dimension(const RunConfig& c) {
  if (c.representation == Representation::GridL2) return c.grid_points;
  for (const auto& g : c.samplers) {
    if (!g.fn) return static_cast<Index>(g.coords.size());
  }
  throw detail::config_error("abstract space needs coordinate samplers");
}

inline SemigroupModel build_semigroup(const RunConfig& c, Index n) {
  const auto& s = c.semigroup;
  if (s.kind == "scalar") return SemigroupModel::scalar(s.a);
  if (s.kind == "diagonal") {
    if (static_cast<Index>(s.eigenvalues.size()) != n) throw detail::config_error("one eigenvalue per coordinate");
    return SemigroupModel::diagonal(Eigen::Map<const Vector>(s.eigenvalues.data(), n));
  }
  if (s.kind == "matrix") {
    if (static_cast<Index>(s.generator.size()) != n) throw detail::config_error("generator has the wrong size");
    Matrix A(n, n);
    for (Index r = 0; r < n; ++r) {
      if (static_cast<Index>(s.generator[r].size()) != n) throw detail::config_error("generator must be square");
      for (Index k = 0; k < n; ++k) A(r, k) = s.generator[r][k];
    }
    return SemigroupModel::matrix(A, {s.M, s.a}, c.representation);
  }
  throw detail::config_error("unknown semigroup kind '" + s.kind + "'");
}

inline DecayProfile build_decay(const DecaySpec& d) {
  if (d.kind == "exponential") return DecayProfile::exponential(d.rho);
  if (d.kind == "mixture") return DecayProfile::mixture(d.rho, d.weights, d.rates);
  throw detail::config_error("unknown decay kind '" + d.kind + "'");
}

inline std::vector<SpaceElement> build_samplers(const RunConfig& c, Index n) {
  std::vector<SpaceElement> g;
  for (const auto& e : c.samplers) g.push_back(build_element(e, c.representation, n));
  return g;
}

/// <h_j, g_k> by quadrature on a grid four times finer than the scenario
/// grid (exact discrete inner products in the abstract space).
inline std::vector<std::vector<Real>> ground_truth(const RunConfig& c) {
  const Index n = c.representation == Representation::GridL2 ? 4 * (c.grid_points - 1) + 1 : space_dimension(c);
  const auto g = build_samplers(c, n);
  std::vector<std::vector<Real>> t;
  for (const auto& b : c.bursts) {
    const SpaceElement h = build_element(b.shape, c.representation, n);
    std::vector<Real> row;
    for (const auto& gk : g) row.push_back(inner(h, gk));
    t.push_back(std::move(row));
  }
  return t;
}

inline ExperimentSetup build_setup(const RunConfig& c) {
  if (c.samplers.empty()) throw detail::config_error("at least one sampler is required");
  const Index n = space_dimension(c);
  const Representation rep = c.representation;

  std::vector<Burst> bursts;
  for (const auto& b : c.bursts) bursts.push_back({b.time, build_element(b.shape, rep, n)});

  BackgroundSource bg = BackgroundSource::zero(rep, n);
  if (c.background.kind == "exp") bg = BackgroundSource::exp_profile(build_element(c.background.shape, rep, n), c.background.rate);
  else if (c.background.kind == "sin") bg = BackgroundSource::sin_profile(build_element(c.background.shape, rep, n), c.background.rate);
  else if (c.background.kind != "zero") throw detail::config_error("unknown background kind '" + c.background.kind + "'");

  ModelParams params;
  params.beta = c.beta;
  params.horizon = c.horizon;
  params.D = c.D;
  params.quad.tol = c.quad_tol;
  params.quad.panels = c.quad_panels;

  ExperimentSetup s{
      Scenario{build_semigroup(c, n), c.u0 ? build_element(*c.u0, rep, n) : SpaceElement::zero(rep, n),
               BurstTrain(std::move(bursts), build_decay(c.decay), c.H.value_or(-1)), std::move(bg),
               NoiseModel(c.sigma, c.seed), params},
      SamplerSet(build_samplers(c, n)), c.mode, c.exponent, ground_truth(c)};
  s.scenario.check_compatible();
  return s;
}

// --------------------------------------------------------------------------
// Bundled scenarios

/// The numerical experiment setups: Scalar(1) semigroup on L2[0,1], bursts
/// 3 sin x, 2.5 cos x, x + 2, samplers 1, x, x^2, rho = 1, L = 0.01,
/// sigma = 0.001.
///   model: "exp-decay" | "general-decay" | "paper-alt"
///   background: "exp" | "sin"
inline RunConfig paper_config(const std::string& model, const std::string& background, Real beta) {
  RunConfig c;
  c.semigroup.kind = "scalar";
  c.semigroup.a = 1;
  c.samplers = {{fn::Const{1}, {}}, {fn::Poly{{0, 1}}, {}}, {fn::Poly{{0, 0, 1}}, {}}};
  const std::vector<ElementSpec> shapes = {{fn::Sin{3}, {}}, {fn::Cos{2.5}, {}}, {fn::Poly{{2, 1}}, {}}};
  std::vector<Real> times;
  if (model == "exp-decay") {
    c.mode = Algorithm::Alg1;
    times = {0.25, 0.54, 0.78};
    c.horizon = 1;
  } else if (model == "paper-alt") {
    c.mode = Algorithm::Alg1;
    times = {0.25, 0.76, 1.1};
    c.horizon = 1.25;
  } else if (model == "general-decay") {
    c.mode = Algorithm::Alg2;
    times = {1.1, 9.8, 19};
    c.horizon = 20;
    c.D = 8.6;
    c.decay = {"mixture", 1, {0.5, 0.5}, {2, 1}};
  } else {
    throw detail::config_error("model must be exp-decay, general-decay or paper-alt");
  }
  for (std::size_t j = 0; j < times.size(); ++j) c.bursts.push_back({times[j], shapes[j]});
  if (background != "exp" && background != "sin") throw detail::config_error("background must be exp or sin");
  c.background = {background, {fn::Poly{{0, 1}}, {}}, 0.01};
  c.sigma = 1e-3;
  c.seed = 20240601;
  c.beta = beta;
  c.name = (model == "paper-alt" ? std::string("paper_alt") : std::string(c.mode == Algorithm::Alg1 ? "alg1" : "alg2")) +
           "_" + background;
  return c;
}

}  // namespace dynsamp
