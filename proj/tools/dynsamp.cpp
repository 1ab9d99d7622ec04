// Command line front end: runs configured scenarios, reproduces the bundled
// numerical experiments, sweeps the sampling step and prints ground truth.
//
// Exit codes: 0 success, 2 invalid config or failed validation, 3 I/O
// failure, 4 quadrature failure.

#include "dynsamp/dynsamp.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace dynsamp;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitQuadrature = 4;

fs::path output_root() {
  const char* env = std::getenv("DYNSAMP_OUTPUT_ROOT");
  return env && *env ? fs::path(env) : fs::path("out");
}

fs::path run_dir(const RunConfig& c, const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  if (!c.output_dir.empty()) return c.output_dir;
  return output_root() / c.name;
}

std::string beta_tag(Real beta) {
  std::string s = format_real(beta);
  for (char& ch : s) {
    if (ch == '.') ch = 'p';
  }
  return "beta_" + s;
}

int run_config(const RunConfig& c, const fs::path& dir) {
  const ExperimentSetup setup = build_setup(c);
  const ExperimentResult r = run_experiment(setup);
  if (!r.validation.passed()) {
    std::cerr << "scenario failed validation:\n" << r.validation.describe();
    return kExitValidation;
  }
  write_run_outputs(dir, c, r);
  write_summary(std::cout, c, r);
  std::cout << "outputs written to " << dir.string() << "\n";
  return 0;
}

int validate_config(const RunConfig& c) {
  const ExperimentSetup setup = build_setup(c);
  const ValidationReport report = validate_scenario(setup.scenario, setup.samplers, setup.algorithm);
  std::cout << report.describe();
  std::cout << (report.passed() ? "valid\n" : "invalid\n");
  return report.passed() ? 0 : kExitValidation;
}

int sweep(const RunConfig& c, const std::vector<Real>& betas, const fs::path& dir) {
  if (betas.empty()) throw ValidationError("--betas needs at least one value");
  const ExperimentSetup setup = build_setup(c);
  for (Real b : betas) {
    const ExperimentSetup one = with_beta(setup, b);
    const ValidationReport v = validate_scenario(one.scenario, one.samplers, one.algorithm);
    if (!v.passed()) {
      std::cerr << "beta = " << format_real(b) << " fails validation:\n" << v.describe();
      return kExitValidation;
    }
  }
  const auto rows = sweep_beta(setup, betas);
  detail::ensure_dir(dir);
  auto f = detail::open_output(dir / "sweep.csv");
  write_sweep_csv(f, rows);
  write_sweep_csv(std::cout, rows);
  std::cout << "outputs written to " << (dir / "sweep.csv").string() << "\n";
  return 0;
}

int print_ground_truth(const RunConfig& c, const fs::path& dir, bool write) {
  const auto t = ground_truth(c);
  write_ground_truth_csv(std::cout, t);
  if (write) {
    detail::ensure_dir(dir);
    auto f = detail::open_output(dir / "ground_truth.csv");
    write_ground_truth_csv(f, t);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Burst detection and recovery from dynamical space-time samples"};
  app.require_subcommand(0, 1);
  bool print_schema = false;
  app.add_flag("--print-schema", print_schema, "Print the run configuration schema and exit");

  std::string config_path;
  std::string out_dir;

  auto* run = app.add_subcommand("run", "Simulate, detect and report one configuration");
  run->add_option("config", config_path, "JSON run configuration")->required();
  run->add_option("--out", out_dir, "Output directory (default $DYNSAMP_OUTPUT_ROOT/<name>)");

  std::string model = "exp-decay";
  std::string background = "exp";
  Real beta = 0.01;
  auto* repro = app.add_subcommand("reproduce-paper", "Run one of the bundled reproduction scenarios");
  repro->add_option("--model", model, "exp-decay | general-decay | paper-alt")
      ->check(CLI::IsMember({"exp-decay", "general-decay", "paper-alt"}));
  repro->add_option("--beta", beta, "Sampling step")->check(CLI::PositiveNumber);
  repro->add_option("--background", background, "exp | sin")->check(CLI::IsMember({"exp", "sin"}));
  repro->add_option("--out", out_dir, "Output directory");

  std::vector<Real> betas;
  auto* sw = app.add_subcommand("sweep-beta", "Maximum recovery error and bound for several sampling steps");
  sw->add_option("config", config_path, "JSON run configuration")->required();
  sw->add_option("--betas", betas, "Comma separated sampling steps")->delimiter(',')->required();
  sw->add_option("--out", out_dir, "Output directory");

  bool write_truth = false;
  auto* gt = app.add_subcommand("ground-truth", "Print <h_j, g_k> on a 4x refined grid");
  gt->add_option("config", config_path, "JSON run configuration")->required();
  gt->add_flag("--write", write_truth, "Also write ground_truth.csv to the output directory");
  gt->add_option("--out", out_dir, "Output directory");

  auto* val = app.add_subcommand("validate", "Check a configuration against the model assumptions");
  val->add_option("config", config_path, "JSON run configuration")->required();

  CLI11_PARSE(app, argc, argv);

  if (print_schema) {
    std::cout << config_schema();
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return 0;
  }

  try {
    if (*run) {
      const RunConfig c = load_config(config_path);
      return run_config(c, run_dir(c, out_dir));
    }
    if (*repro) {
      const RunConfig c = paper_config(model, background, beta);
      const fs::path dir = out_dir.empty() ? output_root() / (c.name + "_" + beta_tag(beta)) : fs::path(out_dir);
      return run_config(c, dir);
    }
    if (*sw) {
      const RunConfig c = load_config(config_path);
      const fs::path dir = out_dir.empty() ? output_root() / (c.name + "_sweep") : fs::path(out_dir);
      return sweep(c, betas, dir);
    }
    if (*gt) {
      const RunConfig c = load_config(config_path);
      return print_ground_truth(c, run_dir(c, out_dir), write_truth);
    }
    if (*val) return validate_config(load_config(config_path));
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const QuadratureError& e) {
    std::cerr << "quadrature error: " << e.what() << "\n";
    return kExitQuadrature;
  } catch (const ValidationError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DimensionError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
