#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "semimarkov/errors.hpp"
#include "semimarkov/model_io.hpp"

namespace semimarkov::cli {

namespace {

using nlohmann::json;

void only_keys(const json& doc, const char* where, std::initializer_list<const char*> allowed) {
  if (!doc.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : doc.items()) {
    if (!ok.contains(key)) throw ConfigError(std::string(where) + ": unknown field '" + key + "'");
  }
}

double number(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return doc.at(key).get<double>();
}

std::int64_t integer(const json& doc, const char* key, std::int64_t fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_number_integer()) throw ConfigError(std::string("field '") + key + "' must be an integer");
  return doc.at(key).get<std::int64_t>();
}

std::vector<double> numbers(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_array()) throw ConfigError(std::string("field '") + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(std::string("field '") + key + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::string text(const json& doc, const char* key, const std::string& fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_string()) throw ConfigError(std::string("field '") + key + "' must be a string");
  return doc.at(key).get<std::string>();
}

SemiMarkovModel load_model(const json& doc, const std::filesystem::path& base) {
  if (doc.is_string()) {
    const auto path = base / doc.get<std::string>();
    std::ifstream in(path);
    if (!in) throw ConfigError("model file not found: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
  }
  return model_from_json(doc);
}

DiscretizationConfig parse_discretization(const json& doc) {
  only_keys(doc, "discretization", {"dt", "horizon", "n_steps", "scheme_backward", "scheme_forward"});
  DiscretizationConfig cfg;
  cfg.dt = number(doc, "dt", cfg.dt);
  if (doc.contains("horizon") && doc.contains("n_steps")) throw ConfigError("discretization: give horizon or n_steps, not both");
  if (doc.contains("horizon")) {
    cfg = DiscretizationConfig::for_horizon(number(doc, "horizon", 1.0), cfg.dt);
  } else {
    cfg.n_steps = static_cast<int>(integer(doc, "n_steps", cfg.n_steps));
  }
  const auto b = text(doc, "scheme_backward", "l1_midpoint");
  if (b == "l1_midpoint") cfg.scheme_backward = BackwardScheme::L1Midpoint;
  else if (b == "l1_caputo") cfg.scheme_backward = BackwardScheme::L1Caputo;
  else throw ConfigError("discretization.scheme_backward: expected l1_midpoint or l1_caputo, got '" + b + "'");
  const auto f = text(doc, "scheme_forward", "product_trapezoid");
  if (f == "product_trapezoid") cfg.scheme_forward = ForwardScheme::ProductTrapezoid;
  else if (f == "grunwald_letnikov") cfg.scheme_forward = ForwardScheme::GrunwaldLetnikov;
  else throw ConfigError("discretization.scheme_forward: expected product_trapezoid or grunwald_letnikov, got '" + f + "'");
  validate(cfg);
  return cfg;
}

InversionConfig parse_inversion(const json& doc) {
  only_keys(doc, "inversion", {"method", "gs_terms", "talbot_nodes", "t_min_guard"});
  InversionConfig cfg;
  const auto m = text(doc, "method", "talbot");
  if (m == "talbot") cfg.method = InversionMethod::Talbot;
  else if (m == "gaver_stehfest") cfg.method = InversionMethod::GaverStehfest;
  else throw ConfigError("inversion.method: expected talbot or gaver_stehfest, got '" + m + "'");
  cfg.gs_terms = static_cast<int>(integer(doc, "gs_terms", cfg.gs_terms));
  cfg.talbot_nodes = static_cast<int>(integer(doc, "talbot_nodes", cfg.talbot_nodes));
  cfg.t_min_guard = number(doc, "t_min_guard", cfg.t_min_guard);
  validate(cfg);
  return cfg;
}

ScalingConfig parse_scaling(const json& doc) {
  only_keys(doc, "diffusion.scaling",
            {"alpha", "k", "eps_list", "t_eval", "source", "half_width", "n_paths", "reference", "reference_refine", "dt"});
  ScalingConfig s;
  if (doc.contains("alpha")) s.alpha_fn = parse_profile(doc.at("alpha"), "alpha");
  if (doc.contains("k")) s.k_fn = parse_profile(doc.at("k"), "k");
  if (doc.contains("eps_list")) s.eps_list = numbers(doc, "eps_list");
  s.t_eval = number(doc, "t_eval", s.t_eval);
  s.source = number(doc, "source", s.source);
  s.half_width = number(doc, "half_width", s.half_width);
  s.n_paths = integer(doc, "n_paths", s.n_paths);
  const auto ref = text(doc, "reference", "pde");
  if (ref == "pde") s.reference = ScalingReference::Pde;
  else if (ref == "gaussian") s.reference = ScalingReference::Gaussian;
  else throw ConfigError("diffusion.scaling.reference: expected pde or gaussian, got '" + ref + "'");
  s.reference_refine = static_cast<int>(integer(doc, "reference_refine", s.reference_refine));
  s.dt = number(doc, "dt", s.dt);
  return s;
}

}  // namespace

Command command_from_string(const std::string& name) {
  if (name == "solve") return Command::Solve;
  if (name == "simulate") return Command::Simulate;
  if (name == "compare") return Command::Compare;
  if (name == "diffusion") return Command::Diffusion;
  if (name == "aggregate") return Command::Aggregate;
  throw ConfigError("unknown command '" + name + "' (expected solve, simulate, compare, diffusion or aggregate)");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::Solve: return "solve";
    case Command::Simulate: return "simulate";
    case Command::Compare: return "compare";
    case Command::Diffusion: return "diffusion";
    case Command::Aggregate: return "aggregate";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  static const std::map<std::string, Method> table{
      {"renewal", Method::Renewal},
      {"backward_caputo", Method::BackwardCaputo},
      {"forward_rl", Method::ForwardRL},
      {"laplace", Method::Laplace},
      {"backward_volterra", Method::BackwardVolterra},
      {"forward_volterra", Method::ForwardVolterra},
      {"monte_carlo", Method::MonteCarlo},
      {"matrix_exponential", Method::MatrixExponential},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown method '" + name + "'");
  return it->second;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Renewal: return "renewal";
    case Method::BackwardCaputo: return "backward_caputo";
    case Method::ForwardRL: return "forward_rl";
    case Method::Laplace: return "laplace";
    case Method::BackwardVolterra: return "backward_volterra";
    case Method::ForwardVolterra: return "forward_volterra";
    case Method::MonteCarlo: return "monte_carlo";
    case Method::MatrixExponential: return "matrix_exponential";
  }
  return "?";
}

double Tolerances::lookup(const std::string& a, const std::string& b) const {
  if (auto it = pairs.find(a + "/" + b); it != pairs.end()) return it->second;
  if (auto it = pairs.find(b + "/" + a); it != pairs.end()) return it->second;
  return default_tol;
}

std::function<double(double)> parse_profile(const json& doc, const char* what) {
  if (doc.is_number()) {
    const double v = doc.get<double>();
    return [v](double) { return v; };
  }
  if (!doc.is_object()) throw ConfigError(std::string(what) + ": expected a number or a profile object");
  const auto type = text(doc, "type", "");
  if (type == "constant") {
    only_keys(doc, what, {"type", "value"});
    const double v = number(doc, "value", 1.0);
    return [v](double) { return v; };
  }
  if (type == "two_region") {
    only_keys(doc, what, {"type", "left", "right", "interface"});
    if (!doc.contains("left") || !doc.contains("right")) throw ConfigError(std::string(what) + ": two_region needs left and right");
    const double l = number(doc, "left", 0.0), r = number(doc, "right", 0.0), x0 = number(doc, "interface", 0.0);
    return [l, r, x0](double x) { return x < x0 ? l : r; };
  }
  throw ConfigError(std::string(what) + ": unknown profile type '" + type + "'");
}

LatticeSpec parse_lattice(const json& doc) {
  only_keys(doc, "lattice", {"x_min", "x_max", "epsilon", "alpha", "k", "boundary", "time_scheme"});
  LatticeSpec spec;
  spec.x_min = number(doc, "x_min", spec.x_min);
  spec.x_max = number(doc, "x_max", spec.x_max);
  spec.epsilon = number(doc, "epsilon", spec.epsilon);
  if (doc.contains("alpha")) spec.alpha_fn = parse_profile(doc.at("alpha"), "lattice.alpha");
  if (doc.contains("k")) spec.k_fn = parse_profile(doc.at("k"), "lattice.k");
  const auto b = text(doc, "boundary", "reflecting");
  if (b == "reflecting") spec.boundary = Boundary::Reflecting;
  else if (b == "absorbing") spec.boundary = Boundary::Absorbing;
  else throw ConfigError("lattice.boundary: expected reflecting or absorbing, got '" + b + "'");
  const auto ts = text(doc, "time_scheme", "grunwald_letnikov");
  if (ts == "grunwald_letnikov") spec.time_scheme = ForwardScheme::GrunwaldLetnikov;
  else if (ts == "product_trapezoid") spec.time_scheme = ForwardScheme::ProductTrapezoid;
  else throw ConfigError("lattice.time_scheme: expected grunwald_letnikov or product_trapezoid, got '" + ts + "'");
  try {
    validate(spec);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

ExperimentConfig parse_config(const std::string& source, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(doc, "config",
            {"command", "model", "model_file", "lattice", "methods", "discretization", "inversion", "times",
             "start_states", "rng", "n_paths", "sampler", "threads", "path_dump", "tolerances", "diffusion",
             "aggregate", "out"});
  ExperimentConfig cfg;
  try {
    if (doc.contains("command")) cfg.command = command_from_string(text(doc, "command", ""));
    if (doc.contains("model") && doc.contains("model_file")) throw ConfigError("give model or model_file, not both");
    if (doc.contains("model")) cfg.model = load_model(doc.at("model"), base_dir);
    if (doc.contains("model_file")) cfg.model = load_model(json(text(doc, "model_file", "")), base_dir);
    if (doc.contains("lattice")) {
      cfg.lattice = parse_lattice(doc.at("lattice"));
      cfg.lattice_doc = doc.at("lattice");
    }
    if (doc.contains("discretization")) cfg.discretization = parse_discretization(doc.at("discretization"));
    if (doc.contains("inversion")) cfg.inversion = parse_inversion(doc.at("inversion"));
    if (doc.contains("methods")) {
      if (!doc.at("methods").is_array()) throw ConfigError("methods must be an array");
      std::set<std::string> labels;
      for (const auto& m : doc.at("methods")) {
        MethodSpec spec;
        if (m.is_string()) {
          spec.method = method_from_string(m.get<std::string>());
        } else {
          only_keys(m, "methods[]", {"method", "label", "model", "model_file"});
          spec.method = method_from_string(text(m, "method", ""));
          spec.label = text(m, "label", "");
          if (m.contains("model")) spec.model = load_model(m.at("model"), base_dir);
          if (m.contains("model_file")) spec.model = load_model(json(text(m, "model_file", "")), base_dir);
        }
        if (spec.label.empty()) spec.label = to_string(spec.method);
        if (!labels.insert(spec.label).second) throw ConfigError("duplicate method label '" + spec.label + "'");
        cfg.methods.push_back(std::move(spec));
      }
    }
    if (doc.contains("times")) {
      cfg.report_times = numbers(doc, "times");
      if (!std::is_sorted(cfg.report_times.begin(), cfg.report_times.end()) ||
          (!cfg.report_times.empty() && cfg.report_times.front() < 0.0)) {
        throw ConfigError("times must be sorted and nonnegative");
      }
    }
    if (doc.contains("start_states")) {
      for (double s : numbers(doc, "start_states")) cfg.start_states.push_back(static_cast<int>(s));
    }
    if (doc.contains("rng")) {
      const auto& r = doc.at("rng");
      only_keys(r, "rng", {"seed", "stream_id"});
      cfg.rng.seed = static_cast<std::uint64_t>(integer(r, "seed", 0));
      cfg.rng.stream_id = static_cast<std::uint64_t>(integer(r, "stream_id", 0));
    }
    cfg.n_paths = integer(doc, "n_paths", cfg.n_paths);
    if (cfg.n_paths < 1) throw ConfigError("n_paths must be >= 1");
    const auto sampler = text(doc, "sampler", "ctrw");
    if (sampler == "ctrw") cfg.sampler = Sampler::Ctrw;
    else if (sampler == "time_changed") cfg.sampler = Sampler::TimeChanged;
    else throw ConfigError("sampler: expected ctrw or time_changed, got '" + sampler + "'");
    cfg.threads = static_cast<int>(integer(doc, "threads", 1));
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    cfg.path_dump = static_cast<int>(integer(doc, "path_dump", cfg.path_dump));
    if (cfg.path_dump < 0) throw ConfigError("path_dump must be >= 0");
    if (doc.contains("tolerances")) {
      const auto& t = doc.at("tolerances");
      only_keys(t, "tolerances", {"default", "pairs", "mc_se_factor"});
      cfg.tolerances.default_tol = number(t, "default", cfg.tolerances.default_tol);
      cfg.tolerances.mc_se_factor = number(t, "mc_se_factor", cfg.tolerances.mc_se_factor);
      if (t.contains("pairs")) {
        if (!t.at("pairs").is_object()) throw ConfigError("tolerances.pairs must be an object");
        for (const auto& [k, v] : t.at("pairs").items()) {
          if (!v.is_number()) throw ConfigError("tolerances.pairs." + k + " must be a number");
          cfg.tolerances.pairs[k] = v.get<double>();
        }
      }
    }
    if (doc.contains("diffusion")) {
      const auto& d = doc.at("diffusion");
      only_keys(d, "diffusion", {"mode", "source", "target", "stride", "gaussian_tol", "scaling", "final_tol"});
      const auto mode = text(d, "mode", "forward");
      if (mode == "forward") cfg.diffusion.mode = DiffusionMode::Forward;
      else if (mode == "backward") cfg.diffusion.mode = DiffusionMode::Backward;
      else if (mode == "scaling") cfg.diffusion.mode = DiffusionMode::Scaling;
      else throw ConfigError("diffusion.mode: expected forward, backward or scaling, got '" + mode + "'");
      cfg.diffusion.anchor = number(d, cfg.diffusion.mode == DiffusionMode::Backward ? "target" : "source", 0.0);
      cfg.diffusion.stride = static_cast<int>(integer(d, "stride", 1));
      if (cfg.diffusion.stride < 1) throw ConfigError("diffusion.stride must be >= 1");
      if (d.contains("gaussian_tol")) cfg.diffusion.gaussian_tol = number(d, "gaussian_tol", 0.0);
      if (d.contains("scaling")) cfg.diffusion.scaling = parse_scaling(d.at("scaling"));
      if (d.contains("final_tol")) cfg.diffusion.scaling_final_tol = number(d, "final_tol", 0.0);
    }
    if (doc.contains("aggregate")) {
      const auto& a = doc.at("aggregate");
      only_keys(a, "aggregate", {"source", "region", "times", "expect", "flat_tol"});
      cfg.aggregate.source = number(a, "source", 0.0);
      const auto region = numbers(a, "region");
      if (region.size() != 2) throw ConfigError("aggregate.region must be [lo, hi]");
      cfg.aggregate.region_lo = region[0];
      cfg.aggregate.region_hi = region[1];
      if (a.contains("times")) cfg.aggregate.sample_times = numbers(a, "times");
      cfg.aggregate.expect = text(a, "expect", "none");
      if (cfg.aggregate.expect != "none" && cfg.aggregate.expect != "increasing" && cfg.aggregate.expect != "decreasing" &&
          cfg.aggregate.expect != "flat") {
        throw ConfigError("aggregate.expect: expected none, increasing, decreasing or flat");
      }
      cfg.aggregate.flat_tol = number(a, "flat_tol", cfg.aggregate.flat_tol);
    }
    cfg.out_prefix = text(doc, "out", cfg.out_prefix);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.diffusion.scaling.rng = cfg.rng;
  cfg.diffusion.scaling.threads = cfg.threads;
  return cfg;
}

}  // namespace semimarkov::cli
