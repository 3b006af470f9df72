#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "semimarkov/diffusion.hpp"
#include "semimarkov/inversion.hpp"
#include "semimarkov/montecarlo.hpp"
#include "semimarkov/process.hpp"
#include "semimarkov/solvers.hpp"

namespace semimarkov::cli {

enum class Command { Solve, Simulate, Compare, Diffusion, Aggregate };

Command command_from_string(const std::string& name);
std::string to_string(Command c);

/// Thrown for malformed configs and usage errors (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Method {
  Renewal,
  BackwardCaputo,
  ForwardRL,
  Laplace,
  BackwardVolterra,
  ForwardVolterra,
  MonteCarlo,
  MatrixExponential,
};

Method method_from_string(const std::string& name);
std::string to_string(Method m);

/// One solution route; `model` overrides the shared model when present.
struct MethodSpec {
  Method method = Method::BackwardCaputo;
  std::string label;
  std::optional<SemiMarkovModel> model;
};

struct Tolerances {
  double default_tol = 1e-2;
  std::map<std::string, double> pairs;  ///< key "a/b" in either order
  double mc_se_factor = 4.0;
  double lookup(const std::string& a, const std::string& b) const;
};

enum class DiffusionMode { Forward, Backward, Scaling };

struct DiffusionSettings {
  DiffusionMode mode = DiffusionMode::Forward;
  double anchor = 0.0;               ///< source (forward) or target (backward)
  int stride = 1;                    ///< time slices written to the density file
  std::optional<double> gaussian_tol;  ///< compare the final slice with the heat kernel
  ScalingConfig scaling;
  std::optional<double> scaling_final_tol;
};

struct AggregateSettings {
  double source = 0.0;
  double region_lo = 0.0;
  double region_hi = 0.0;
  std::vector<double> sample_times{1.0, 2.0, 4.0, 8.0};
  std::string expect = "none";  ///< none | increasing | decreasing | flat
  double flat_tol = 1e-3;
};

struct ExperimentConfig {
  std::optional<Command> command;
  std::optional<SemiMarkovModel> model;
  std::optional<LatticeSpec> lattice;
  nlohmann::json lattice_doc;  ///< raw lattice section, echoed into reports
  std::vector<MethodSpec> methods;
  DiscretizationConfig discretization;
  InversionConfig inversion;
  std::vector<double> report_times;  ///< compare/simulate evaluation times
  std::vector<int> start_states;     ///< rows to evaluate (empty = all)
  RngSpec rng;
  std::int64_t n_paths = 10000;
  Sampler sampler = Sampler::Ctrw;
  int threads = 1;
  int path_dump = 100;               ///< simulate: number of paths written out
  Tolerances tolerances;
  DiffusionSettings diffusion;
  AggregateSettings aggregate;
  std::string out_prefix = "out/run";
};

/// Parses a config document; relative file references resolve against base_dir.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

/// alpha(x) / k(x) profiles: a number, {"type": "two_region", "left", "right",
/// "interface"} or {"type": "constant", "value"}.
std::function<double(double)> parse_profile(const nlohmann::json& doc, const char* what);
LatticeSpec parse_lattice(const nlohmann::json& doc);

}  // namespace semimarkov::cli
