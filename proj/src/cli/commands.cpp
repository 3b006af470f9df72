#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "output.hpp"
#include "semimarkov/errors.hpp"
#include "semimarkov/laplace.hpp"

namespace semimarkov::cli {

namespace {

using nlohmann::json;

struct Evaluated {
  std::string label;
  Method method;
  int n_states = 0;
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> values;
  std::vector<Eigen::MatrixXd> std_errors;  // empty unless Monte Carlo
};

const SemiMarkovModel& model_for(const MethodSpec& m, const ExperimentConfig& cfg) {
  if (m.model) return *m.model;
  if (!cfg.model) throw ConfigError("method '" + m.label + "' has no model (set model or model_file)");
  return *cfg.model;
}

std::vector<int> rows_for(const ExperimentConfig& cfg, int n) {
  if (cfg.start_states.empty()) {
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    return all;
  }
  for (int i : cfg.start_states) {
    if (i < 0 || i >= n) throw ConfigError("start state " + std::to_string(i) + " out of range");
  }
  return cfg.start_states;
}

// Grid indices of the requested times; they must lie on the dt grid.
std::vector<std::size_t> grid_indices(const std::vector<double>& times, const DiscretizationConfig& d) {
  std::vector<std::size_t> idx;
  for (double t : times) {
    const double r = t / d.dt;
    const long k = std::lround(r);
    if (std::abs(r - static_cast<double>(k)) > 1e-6 || k < 0 || k > d.n_steps) {
      std::ostringstream os;
      os << "time " << t << " is not on the solver grid (dt = " << d.dt << ", horizon = " << d.horizon() << ")";
      throw ConfigError(os.str());
    }
    idx.push_back(static_cast<std::size_t>(k));
  }
  return idx;
}

Evaluated evaluate(const MethodSpec& m, const ExperimentConfig& cfg) {
  const SemiMarkovModel& model = model_for(m, cfg);
  const auto& d = cfg.discretization;
  const std::vector<double> times = cfg.report_times.empty() ? uniform_times(d.dt, d.n_steps) : cfg.report_times;
  Evaluated ev;
  ev.label = m.label;
  ev.method = m.method;
  ev.n_states = model.n_states();
  ev.times = times;
  auto take = [&](const TransitionGrid& g) {
    for (std::size_t k : grid_indices(times, d)) ev.values.push_back(g.values[k]);
  };
  switch (m.method) {
    case Method::Renewal: take(solve_renewal(model, d)); break;
    case Method::BackwardCaputo: take(solve_backward_caputo(model, d)); break;
    case Method::ForwardRL: take(solve_forward_rl(model, d)); break;
    case Method::BackwardVolterra: take(solve_backward_volterra(model, d)); break;
    case Method::ForwardVolterra: take(solve_forward_volterra(model, d)); break;
    case Method::Laplace: ev.values = invert_laplace_matrix(model_laplace_transform(model), times, cfg.inversion).values; break;
    case Method::MatrixExponential: ev.values = matrix_exponential_grid(model, times).values; break;
    case Method::MonteCarlo: {
      const int n = model.n_states();
      ev.values.assign(times.size(), Eigen::MatrixXd::Zero(n, n));
      ev.std_errors.assign(times.size(), Eigen::MatrixXd::Zero(n, n));
      const auto nd = static_cast<double>(cfg.n_paths);
      for (int i : rows_for(cfg, n)) {
        const RngSpec row{cfg.rng.seed, cfg.rng.stream_id * 1000003ULL + static_cast<std::uint64_t>(i)};
        const auto occ = simulate_occupation(model, i, times, cfg.n_paths, row, cfg.threads, cfg.sampler);
        for (std::size_t k = 0; k < times.size(); ++k) {
          for (int j = 0; j < n; ++j) {
            const double p = static_cast<double>(occ.counts[k][static_cast<std::size_t>(j)]) / nd;
            ev.values[k](i, j) = p;
            ev.std_errors[k](i, j) = std::sqrt(p * (1.0 - p) / nd);
          }
        }
      }
      break;
    }
  }
  return ev;
}

void write_evaluated(ArtifactWriter& w, const Evaluated& ev, const std::vector<int>& rows) {
  const std::string name = ev.label + ".csv";
  auto os = w.open_table(name);
  const bool se = !ev.std_errors.empty();
  os << (se ? "t,i,j,p,se\n" : "t,i,j,p\n") << std::setprecision(17);
  for (std::size_t k = 0; k < ev.times.size(); ++k) {
    for (int i : rows) {
      for (int j = 0; j < ev.n_states; ++j) {
        os << ev.times[k] << ',' << i << ',' << j << ',' << ev.values[k](i, j);
        if (se) os << ',' << ev.std_errors[k](i, j);
        os << '\n';
      }
    }
  }
  w.close(os, name);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

RunResult run_solve(const ExperimentConfig& cfg, const std::string& digest) {
  if (cfg.methods.empty()) throw ConfigError("solve: list at least one method");
  ArtifactWriter w(cfg.out_prefix, digest);
  RunResult res;
  json report = json::array();
  for (const auto& m : cfg.methods) {
    const Evaluated ev = evaluate(m, cfg);
    const auto rows = rows_for(cfg, ev.n_states);
    write_evaluated(w, ev, rows);
    double worst = 0.0;
    for (const auto& p : ev.values) {
      for (int i : rows) worst = std::max(worst, std::abs(p.row(i).sum() - 1.0));
    }
    report.push_back({{"label", ev.label}, {"method", to_string(ev.method)}, {"max_row_sum_error", worst}});
    res.lines.push_back(ev.label + ": max |row sum - 1| = " + fmt(worst));
  }
  w.write_json("report.json", {{"command", "solve"}, {"methods", report}});
  return res;
}

RunResult run_simulate(const ExperimentConfig& cfg, const std::string& digest) {
  if (!cfg.model) throw ConfigError("simulate: model is required");
  if (cfg.report_times.empty()) throw ConfigError("simulate: times are required");
  const SemiMarkovModel& model = *cfg.model;
  require_valid(model);
  const int n = model.n_states();
  const auto rows = cfg.start_states.empty() ? std::vector<int>{0} : rows_for(cfg, n);
  ArtifactWriter w(cfg.out_prefix, digest);
  RunResult res;
  MethodSpec mc{Method::MonteCarlo, "monte_carlo", std::nullopt};
  ExperimentConfig local = cfg;
  local.start_states = rows;
  const Evaluated ev = evaluate(mc, local);

  auto hist = w.open_table("hist.csv");
  hist << "t,start,state,p,se\n" << std::setprecision(17);
  for (std::size_t k = 0; k < ev.times.size(); ++k) {
    for (int i : rows) {
      for (int j = 0; j < n; ++j) {
        hist << ev.times[k] << ',' << i << ',' << j << ',' << ev.values[k](i, j) << ',' << ev.std_errors[k](i, j) << '\n';
      }
    }
  }
  w.close(hist, "hist.csv");

  const double t_max = cfg.report_times.back();
  for (int i : rows) {
    std::vector<PathSample> paths;
    const RngSpec row{cfg.rng.seed, cfg.rng.stream_id * 1000003ULL + static_cast<std::uint64_t>(i)};
    const auto dump = std::min<std::int64_t>(cfg.path_dump, cfg.n_paths);
    for (std::int64_t p = 0; p < dump; ++p) {
      PathRng rng(row, static_cast<std::uint64_t>(p));
      paths.push_back(cfg.sampler == Sampler::Ctrw ? simulate_ctrw(model, i, t_max, rng)
                                                   : simulate_time_changed(model, i, t_max, rng));
    }
    const std::string name = "paths_s" + std::to_string(i) + ".csv";
    auto os = w.open_table(name);
    write_paths_csv(os, paths);
    w.close(os, name);
  }
  json sums = json::array();
  for (std::size_t k = 0; k < ev.times.size(); ++k) {
    for (int i : rows) sums.push_back({{"t", ev.times[k]}, {"start", i}, {"sum", ev.values[k].row(i).sum()}});
  }
  w.write_json("report.json", {{"command", "simulate"}, {"n_paths", cfg.n_paths}, {"column_sums", sums}});
  res.lines.push_back("simulated " + std::to_string(cfg.n_paths) + " paths per start state");
  return res;
}

RunResult run_compare(const ExperimentConfig& cfg, const std::string& digest) {
  if (cfg.methods.size() < 2) throw ConfigError("compare: list at least two methods");
  ArtifactWriter w(cfg.out_prefix, digest);
  std::vector<Evaluated> evs;
  for (const auto& m : cfg.methods) evs.push_back(evaluate(m, cfg));
  RunResult res;
  json pairs = json::array();
  auto table = w.open_table("report.csv");
  table << "a,b,sup_distance,tolerance,pass\n" << std::setprecision(17);
  for (const auto& ev : evs) write_evaluated(w, ev, rows_for(cfg, ev.n_states));
  for (std::size_t a = 0; a < evs.size(); ++a) {
    for (std::size_t b = a + 1; b < evs.size(); ++b) {
      const auto& x = evs[a];
      const auto& y = evs[b];
      const double tol = cfg.tolerances.lookup(x.label, y.label);
      double sup = 0.0;
      bool pass = true;
      std::string why;
      if (x.n_states != y.n_states) {
        pass = false;
        sup = std::numeric_limits<double>::infinity();
        why = "state counts differ (" + std::to_string(x.n_states) + " vs " + std::to_string(y.n_states) + ")";
      } else {
        for (std::size_t k = 0; k < x.times.size(); ++k) {
          for (int i : rows_for(cfg, x.n_states)) {
            for (int j = 0; j < x.n_states; ++j) {
              const double diff = std::abs(x.values[k](i, j) - y.values[k](i, j));
              double se = 0.0;
              if (!x.std_errors.empty()) se += x.std_errors[k](i, j) * x.std_errors[k](i, j);
              if (!y.std_errors.empty()) se += y.std_errors[k](i, j) * y.std_errors[k](i, j);
              const double allowed = std::max(cfg.tolerances.mc_se_factor * std::sqrt(se), tol);
              sup = std::max(sup, diff);
              if (!(diff <= allowed) && pass) {
                pass = false;
                std::ostringstream os;
                os << "|diff| = " << fmt(diff) << " > " << fmt(allowed) << " at t = " << x.times[k] << ", (" << i << ", " << j << ")";
                why = os.str();
              }
            }
          }
        }
      }
      pairs.push_back({{"a", x.label}, {"b", y.label}, {"sup_distance", std::isfinite(sup) ? json(sup) : json(nullptr)},
                       {"tolerance", tol}, {"pass", pass}});
      table << x.label << ',' << y.label << ',' << sup << ',' << tol << ',' << (pass ? "true" : "false") << '\n';
      const std::string line = (pass ? "PASS " : "FAIL ") + x.label + " vs " + y.label + ": sup = " + fmt(sup) +
                               ", tolerance = " + fmt(tol);
      res.lines.push_back(line);
      if (!pass) res.failures.push_back(x.label + " vs " + y.label + ": " + why);
    }
  }
  w.close(table, "report.csv");
  w.write_json("report.json", {{"command", "compare"}, {"pairs", pairs}, {"pass", res.failures.empty()}});
  if (!res.failures.empty()) res.exit_code = kToleranceFailure;
  return res;
}

RunResult run_diffusion(const ExperimentConfig& cfg, const std::string& digest) {
  ArtifactWriter w(cfg.out_prefix, digest);
  RunResult res;
  const auto& ds = cfg.diffusion;
  if (ds.mode == DiffusionMode::Scaling) {
    const ScalingReport rep = scaling_limit_experiment(ds.scaling);
    auto os = w.open_table("convergence.csv");
    os << "epsilon,l1_distance,mc_se\n" << std::setprecision(17);
    for (const auto& p : rep.points) os << p.epsilon << ',' << p.l1_distance << ',' << p.mc_se << '\n';
    w.close(os, "convergence.csv");
    w.write_json("convergence.json", json::parse(scaling_report_json(rep)));
    for (const auto& p : rep.points) res.lines.push_back("eps = " + fmt(p.epsilon) + ": L1 = " + fmt(p.l1_distance) + " (mc se " + fmt(p.mc_se) + ")");
    if (!rep.monotone) res.failures.push_back("scaling: L1 distance increased beyond 2 MC standard errors");
    if (ds.scaling_final_tol && !(rep.final_l1() <= *ds.scaling_final_tol)) {
      res.failures.push_back("scaling: final L1 " + fmt(rep.final_l1()) + " > " + fmt(*ds.scaling_final_tol));
    }
  } else {
    if (!cfg.lattice) throw ConfigError("diffusion: lattice is required");
    const LatticeSpec& spec = *cfg.lattice;
    const bool fwd = ds.mode == DiffusionMode::Forward;
    const DensityGrid g = fwd ? solve_vo_heat_forward(spec, ds.anchor, cfg.discretization)
                              : solve_vo_heat_backward(spec, ds.anchor, cfg.discretization);
    auto os = w.open_table("density.csv");
    write_density_csv(os, g, ds.stride);
    w.close(os, "density.csv");
    double drift = 0.0;
    for (std::size_t k = 1; k < g.mass.size(); ++k) drift = std::max(drift, std::abs(g.mass[k] - g.mass[k - 1]));
    json report{{"command", "diffusion"}, {"mode", fwd ? "forward" : "backward"}, {"final_mass", g.mass.back()},
                {"max_mass_drift_per_step", drift}, {"min_value", g.min_value}, {"negative_flag", g.negative}};
    if (fwd && spec.boundary == Boundary::Reflecting && drift > 1e-8) {
      res.failures.push_back("diffusion: mass drift " + fmt(drift) + " > 1e-8 per step");
    }
    if (g.negative) res.failures.push_back("diffusion: density below -1e-8 (min " + fmt(g.min_value) + ")");
    if (ds.gaussian_tol) {
      const double t = g.t.back();
      const double k = spec.k_fn(ds.anchor);
      double err = 0.0;
      for (std::size_t j = 0; j < g.x.size(); ++j) err = std::max(err, std::abs(g.values.back()[j] - gaussian_kernel(g.x[j] - ds.anchor, t, k)));
      report["gaussian_sup_error"] = err;
      res.lines.push_back("heat kernel sup error at t = " + fmt(t) + ": " + fmt(err));
      if (!(err <= *ds.gaussian_tol)) res.failures.push_back("diffusion: heat kernel error " + fmt(err) + " > " + fmt(*ds.gaussian_tol));
    }
    res.lines.push_back("final mass " + fmt(g.mass.back()) + ", max drift per step " + fmt(drift));
    w.write_json("report.json", report);
  }
  if (!res.failures.empty()) res.exit_code = kToleranceFailure;
  return res;
}

RunResult run_aggregate(const ExperimentConfig& cfg, const std::string& digest) {
  if (!cfg.lattice) throw ConfigError("aggregate: lattice is required");
  const auto& as = cfg.aggregate;
  const auto& d = cfg.discretization;
  for (double t : as.sample_times) {
    if (t < 0.0 || t > d.horizon() + 0.5 * d.dt) throw ConfigError("aggregate: sample time " + fmt(t) + " beyond the horizon");
  }
  const DensityGrid g = solve_vo_heat_forward(*cfg.lattice, as.source, d);
  const MassSeries ms = aggregation_diagnostic(g, as.region_lo, as.region_hi);
  ArtifactWriter w(cfg.out_prefix, digest);
  RunResult res;
  auto os = w.open_table("aggregate.csv");
  os << "t,mass\n" << std::setprecision(17);
  std::vector<double> m;
  for (double t : as.sample_times) {
    m.push_back(ms.at(t));
    os << t << ',' << m.back() << '\n';
    res.lines.push_back("M(" + fmt(t) + ") = " + fmt(m.back()));
  }
  w.close(os, "aggregate.csv");
  bool pass = true;
  for (std::size_t k = 1; k < m.size(); ++k) {
    if (as.expect == "increasing" && !(m[k] > m[k - 1])) pass = false;
    if (as.expect == "decreasing" && !(m[k] < m[k - 1])) pass = false;
  }
  if (as.expect == "flat" && !m.empty()) {
    for (double v : m) pass = pass && std::abs(v - m.front()) <= as.flat_tol;
  }
  if (!pass) res.failures.push_back("aggregate: mass series is not " + as.expect);
  w.write_json("report.json", {{"command", "aggregate"}, {"times", as.sample_times}, {"mass", m}, {"expect", as.expect}, {"pass", pass}});
  if (!pass) res.exit_code = kToleranceFailure;
  return res;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"semi-Markov process solvers and experiments"};
  app.require_subcommand(1);
  std::string config_path, out_prefix;
  int threads = 0;
  for (const char* name : {"solve", "simulate", "compare", "diffusion", "aggregate"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_prefix, "output path prefix");
    sub->add_option("--threads", threads, "worker threads (speed only)")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kPass : kUsageError;
  }
  const Command cmd = command_from_string(app.get_subcommands().front()->get_name());
  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    ExperimentConfig cfg = parse_config(bytes, std::filesystem::path(config_path).parent_path());
    if (cfg.command && *cfg.command != cmd) {
      throw ConfigError("config declares command '" + to_string(*cfg.command) + "' but '" + to_string(cmd) + "' was invoked");
    }
    if (!out_prefix.empty()) cfg.out_prefix = out_prefix;
    if (threads > 0) {
      cfg.threads = threads;
      cfg.diffusion.scaling.threads = threads;
    }
    const std::string digest = sha256_hex(bytes);
    RunResult res;
    switch (cmd) {
      case Command::Solve: res = run_solve(cfg, digest); break;
      case Command::Simulate: res = run_simulate(cfg, digest); break;
      case Command::Compare: res = run_compare(cfg, digest); break;
      case Command::Diffusion: res = run_diffusion(cfg, digest); break;
      case Command::Aggregate: res = run_aggregate(cfg, digest); break;
    }
    for (const auto& l : res.lines) out << l << '\n';
    for (const auto& f : res.failures) err << "FAIL " << f << '\n';
    return res.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace semimarkov::cli
