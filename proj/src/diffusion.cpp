#include "semimarkov/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "semimarkov/errors.hpp"
#include "semimarkov/kernels.hpp"
#include "solver_detail.hpp"

namespace semimarkov {

namespace {

constexpr double kNegativeFlag = -1e-8;

// Tridiagonal matrix: lo[j] = A(j, j-1), di[j] = A(j, j), up[j] = A(j, j+1).
struct Tridiag {
  std::vector<double> lo, di, up;
  explicit Tridiag(std::size_t n) : lo(n, 0.0), di(n, 0.0), up(n, 0.0) {}

  std::vector<double> apply(const std::vector<double>& x) const {
    const std::size_t n = di.size();
    std::vector<double> y(n);
    for (std::size_t j = 0; j < n; ++j) {
      double v = di[j] * x[j];
      if (j > 0) v += lo[j] * x[j - 1];
      if (j + 1 < n) v += up[j] * x[j + 1];
      y[j] = v;
    }
    return y;
  }

  Tridiag transpose() const {
    const std::size_t n = di.size();
    Tridiag t(n);
    t.di = di;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      t.up[j] = lo[j + 1];
      t.lo[j + 1] = up[j];
    }
    return t;
  }
};

// Thomas elimination, factored once and reused every step.
class ThomasSolver {
 public:
  ThomasSolver(const Tridiag& a, const char* op) : lo_(a.lo), cp_(a.di.size()), inv_(a.di.size()) {
    const std::size_t n = a.di.size();
    for (std::size_t j = 0; j < n; ++j) {
      const double piv = a.di[j] - (j > 0 ? a.lo[j] * cp_[j - 1] : 0.0);
      if (!(std::abs(piv) > 1e-300) || !std::isfinite(piv)) {
        throw NumericError(std::string(op) + ": linear solve failed (zero pivot at node " + std::to_string(j) + ")");
      }
      inv_[j] = 1.0 / piv;
      cp_[j] = (j + 1 < n) ? a.up[j] * inv_[j] : 0.0;
    }
  }

  void solve(std::vector<double>& d) const {
    const std::size_t n = d.size();
    for (std::size_t j = 0; j < n; ++j) d[j] = (d[j] - (j > 0 ? lo_[j] * d[j - 1] : 0.0)) * inv_[j];
    for (std::size_t j = n - 1; j-- > 0;) d[j] -= cp_[j] * d[j + 1];
  }

 private:
  std::vector<double> lo_, cp_, inv_;
};

struct Lattice {
  int n = 0;
  std::vector<double> x, alpha, lambda;
  Tridiag g{0};                  // generator lambda_i (h_ij - delta_ij)
  std::vector<bool> cemetery;
};

Lattice make_lattice(const LatticeSpec& spec) {
  validate(spec);
  Lattice l;
  l.n = spec.n_nodes();
  const auto n = static_cast<std::size_t>(l.n);
  l.g = Tridiag(n);
  l.cemetery.assign(n, false);
  const double inv_e2 = 1.0 / (spec.epsilon * spec.epsilon);
  for (std::size_t j = 0; j < n; ++j) {
    const double xj = spec.node(static_cast<int>(j));
    l.x.push_back(xj);
    l.alpha.push_back(spec.alpha_fn(xj));
    l.lambda.push_back(spec.k_fn(xj) * inv_e2);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double lam = l.lambda[j];
    const bool edge = j == 0 || j + 1 == n;
    if (edge && spec.boundary == Boundary::Absorbing) {
      l.cemetery[j] = true;
      continue;
    }
    l.g.di[j] = -lam;
    if (j == 0) {
      l.g.up[j] = lam;
    } else if (j + 1 == n) {
      l.g.lo[j] = lam;
    } else {
      l.g.lo[j] = 0.5 * lam;
      l.g.up[j] = 0.5 * lam;
    }
  }
  return l;
}

DensityGrid empty_grid(const Lattice& l, const LatticeSpec& spec, const DiscretizationConfig& cfg,
                       DensityGrid::Direction dir, double anchor) {
  DensityGrid grid;
  grid.direction = dir;
  grid.anchor = anchor;
  grid.epsilon = spec.epsilon;
  grid.x = l.x;
  grid.t = uniform_times(cfg.dt, cfg.n_steps);
  grid.values.reserve(grid.t.size());
  return grid;
}

void record(DensityGrid& grid, const Lattice& l, const std::vector<double>& p) {
  const double eps = grid.epsilon;
  std::vector<double> dens(p.size());
  double mass = 0.0, dead = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (l.cemetery[j] && grid.direction == DensityGrid::Direction::Forward) {
      dead += p[j];
      dens[j] = 0.0;
      continue;
    }
    dens[j] = p[j] / eps;
    mass += p[j];
    grid.min_value = std::min(grid.min_value, dens[j]);
  }
  if (grid.min_value < kNegativeFlag) grid.negative = true;
  grid.mass.push_back(mass);
  grid.absorbed.push_back(dead);
  grid.values.push_back(std::move(dens));
}

void check_finite(const std::vector<double>& p, int step, const char* op) {
  for (double v : p) {
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << op << ": non-finite solution at step " << step;
      throw NumericError(os.str());
    }
  }
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Probability of the cell [x_j - eps/2, x_j + eps/2] under a fine-lattice
// density, piecewise constant on the fine cells.
std::vector<double> coarse_cells(const DensityGrid& fine, std::size_t slice, const std::vector<double>& centers,
                                 double eps) {
  const auto& p = fine.values[slice];
  const double fe = fine.epsilon;
  std::vector<double> out(centers.size(), 0.0);
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double a = centers[c] - 0.5 * eps, b = centers[c] + 0.5 * eps;
    const auto first = static_cast<std::ptrdiff_t>(std::floor((a - fine.x.front()) / fe));
    const auto last = static_cast<std::ptrdiff_t>(std::ceil((b - fine.x.front()) / fe));
    double m = 0.0;
    for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(first - 1, 0);
         k <= std::min<std::ptrdiff_t>(last + 1, static_cast<std::ptrdiff_t>(p.size()) - 1); ++k) {
      const double lo = fine.x[static_cast<std::size_t>(k)] - 0.5 * fe, hi = lo + fe;
      const double ov = std::min(b, hi) - std::max(a, lo);
      if (ov > 0.0) m += ov * p[static_cast<std::size_t>(k)];
    }
    out[c] = m;
  }
  return out;
}

}  // namespace

int LatticeSpec::n_nodes() const {
  return static_cast<int>(std::lround((x_max - x_min) / epsilon)) + 1;
}

int LatticeSpec::node_index(double x) const {
  const double r = (x - x_min) / epsilon;
  const long j = std::lround(r);
  if (std::abs(r - static_cast<double>(j)) > 1e-8 || j < 0 || j >= n_nodes()) {
    std::ostringstream os;
    os << "point " << x << " is not a lattice node";
    throw DomainError(os.str());
  }
  return static_cast<int>(j);
}

void validate(const LatticeSpec& spec) {
  if (!(spec.epsilon > 0.0) || !std::isfinite(spec.epsilon)) throw ValidationError("LatticeSpec.epsilon must be > 0");
  if (!(spec.x_max > spec.x_min)) throw ValidationError("LatticeSpec: need x_max > x_min");
  const double cells = (spec.x_max - spec.x_min) / spec.epsilon;
  if (std::abs(cells - std::round(cells)) > 1e-8 * std::max(1.0, cells) || std::round(cells) < 4) {
    throw ValidationError("LatticeSpec: (x_max - x_min)/epsilon must be an integer >= 4");
  }
  if (!spec.alpha_fn || !spec.k_fn) throw ValidationError("LatticeSpec: alpha_fn and k_fn are required");
  for (int j = 0; j < spec.n_nodes(); ++j) {
    const double x = spec.node(j);
    const double a = spec.alpha_fn(x), k = spec.k_fn(x);
    if (!(a >= 0.1 && a <= 1.0)) {
      std::ostringstream os;
      os << "LatticeSpec: alpha(" << x << ") = " << a << " outside [0.1, 1]";
      throw ValidationError(os.str());
    }
    if (!(k > 0.0) || !std::isfinite(k)) {
      std::ostringstream os;
      os << "LatticeSpec: k(" << x << ") = " << k << " must be > 0";
      throw ValidationError(os.str());
    }
  }
}

SemiMarkovModel lattice_model(const LatticeSpec& spec) {
  const Lattice l = make_lattice(spec);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(l.n, l.n);
  Eigen::VectorXd rates(l.n);
  for (int j = 0; j < l.n; ++j) {
    const auto u = static_cast<std::size_t>(j);
    rates[j] = l.lambda[u];
    if (l.cemetery[u]) {
      h(j, j) = 1.0;
    } else if (j == 0) {
      h(j, 1) = 1.0;
    } else if (j + 1 == l.n) {
      h(j, j - 1) = 1.0;
    } else {
      h(j, j - 1) = 0.5;
      h(j, j + 1) = 0.5;
    }
  }
  auto m = ml_model(h, rates, l.alpha);
  m.diagonal_jumps_allowed = spec.boundary == Boundary::Absorbing;
  require_valid(m);
  return m;
}

DensityGrid solve_vo_heat_forward(const LatticeSpec& spec, double source, const DiscretizationConfig& cfg) {
  validate(cfg);
  const Lattice l = make_lattice(spec);
  const int src = spec.node_index(source);
  const auto n = static_cast<std::size_t>(l.n);
  const int steps = cfg.n_steps;
  const double h = cfg.dt;
  DensityGrid grid = empty_grid(l, spec, cfg, DensityGrid::Direction::Forward, source);
  std::vector<std::vector<double>> hist_p;  // probabilities p^m, m = 0..n
  hist_p.reserve(static_cast<std::size_t>(steps) + 1);
  hist_p.emplace_back(n, 0.0);
  hist_p[0][static_cast<std::size_t>(src)] = 1.0;
  record(grid, l, hist_p[0]);
  const Tridiag gt = l.g.transpose();

  // one weight table per distinct order
  std::map<double, std::size_t> order_slot;
  std::vector<std::size_t> slot(n);
  for (std::size_t j = 0; j < n; ++j) slot[j] = order_slot.emplace(l.alpha[j], order_slot.size()).first->second;
  std::vector<std::vector<double>> lag(order_slot.size()), start(order_slot.size());
  std::vector<double> scale(order_slot.size());

  const bool pt = spec.time_scheme == ForwardScheme::ProductTrapezoid;
  for (const auto& [a, s] : order_slot) {
    if (pt) {
      const auto w = convolution_weights(power_kernel_primitives(a, h, steps));
      lag[s] = w.lag;
      start[s] = w.start;
    } else {
      lag[s] = grunwald_weights(1.0 - a, steps);
      scale[s] = std::pow(h, a - 1.0);
    }
  }
  // pt: (I - G^T C0) p^n = e + G^T H^n; gl: (I - h G^T D) p^n = p^{n-1} + h G^T (D hist)
  Tridiag a = gt;
  for (std::size_t j = 0; j < n; ++j) {
    auto c = [&](std::size_t k) { return pt ? lag[slot[k]][0] : h * scale[slot[k]]; };
    a.di[j] = 1.0 - gt.di[j] * c(j);
    if (j > 0) a.lo[j] = -gt.lo[j] * c(j - 1);
    if (j + 1 < n) a.up[j] = -gt.up[j] * c(j + 1);
  }
  const ThomasSolver solver(a, "solve_vo_heat_forward");
  std::vector<double> acc(n), coef(n);
  for (int s = 1; s <= steps; ++s) {
    if (pt) {
      for (std::size_t j = 0; j < n; ++j) acc[j] = start[slot[j]][static_cast<std::size_t>(s)] * hist_p[0][j];
      for (int m = 1; m < s; ++m) {
        const auto& pm = hist_p[static_cast<std::size_t>(s - m)];
        for (std::size_t j = 0; j < n; ++j) acc[j] += lag[slot[j]][static_cast<std::size_t>(m)] * pm[j];
      }
    } else {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int m = 1; m <= s; ++m) {
        const auto& pm = hist_p[static_cast<std::size_t>(s - m)];
        for (std::size_t j = 0; j < n; ++j) acc[j] += lag[slot[j]][static_cast<std::size_t>(m)] * pm[j];
      }
      for (std::size_t j = 0; j < n; ++j) acc[j] *= h * scale[slot[j]];
    }
    std::vector<double> rhs = gt.apply(acc);
    if (pt) {
      rhs[static_cast<std::size_t>(src)] += 1.0;
    } else {
      for (std::size_t j = 0; j < n; ++j) rhs[j] += hist_p.back()[j];
    }
    solver.solve(rhs);
    check_finite(rhs, s, "solve_vo_heat_forward");
    record(grid, l, rhs);
    hist_p.push_back(std::move(rhs));
  }
  return grid;
}

DensityGrid solve_vo_heat_backward(const LatticeSpec& spec, double target, const DiscretizationConfig& cfg) {
  validate(cfg);
  const Lattice l = make_lattice(spec);
  const int tgt = spec.node_index(target);
  const auto n = static_cast<std::size_t>(l.n);
  const int steps = cfg.n_steps;
  const double h = cfg.dt;
  const double theta = cfg.scheme_backward == BackwardScheme::L1Midpoint ? 0.5 : 1.0;
  DensityGrid grid = empty_grid(l, spec, cfg, DensityGrid::Direction::Backward, target);

  std::map<double, std::size_t> order_slot;
  std::vector<std::size_t> slot(n);
  for (std::size_t j = 0; j < n; ++j) slot[j] = order_slot.emplace(l.alpha[j], order_slot.size()).first->second;
  std::vector<std::vector<double>> w(order_slot.size());
  for (const auto& [a, s] : order_slot) w[s] = detail::caputo_weights(a, h, steps, cfg.scheme_backward);

  Tridiag a(n);
  for (std::size_t j = 0; j < n; ++j) {
    a.di[j] = w[slot[j]][0] - theta * l.g.di[j];
    a.lo[j] = -theta * l.g.lo[j];
    a.up[j] = -theta * l.g.up[j];
  }
  const ThomasSolver solver(a, "solve_vo_heat_backward");
  std::vector<std::vector<double>> p;
  p.reserve(static_cast<std::size_t>(steps) + 1);
  p.emplace_back(n, 0.0);
  p[0][static_cast<std::size_t>(tgt)] = 1.0;
  record(grid, l, p[0]);
  for (int s = 1; s <= steps; ++s) {
    const auto& prev = p.back();
    std::vector<double> rhs(n);
    const std::vector<double> gp = l.g.apply(prev);
    for (std::size_t j = 0; j < n; ++j) rhs[j] = w[slot[j]][0] * prev[j] + (1.0 - theta) * gp[j];
    for (int m = 1; m < s; ++m) {
      const auto& hi = p[static_cast<std::size_t>(s - m)];
      const auto& lo = p[static_cast<std::size_t>(s - m - 1)];
      for (std::size_t j = 0; j < n; ++j) rhs[j] -= w[slot[j]][static_cast<std::size_t>(m)] * (hi[j] - lo[j]);
    }
    solver.solve(rhs);
    check_finite(rhs, s, "solve_vo_heat_backward");
    record(grid, l, rhs);
    p.push_back(std::move(rhs));
  }
  return grid;
}

double gaussian_kernel(double x, double t, double k) {
  if (!(t > 0.0) || !(k > 0.0)) throw DomainError("gaussian_kernel: need t > 0 and k > 0");
  const double var = k * t;
  return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

ScalingReport scaling_limit_experiment(const ScalingConfig& cfg) {
  if (cfg.eps_list.empty()) throw DomainError("scaling_limit_experiment: eps_list is empty");
  for (std::size_t k = 1; k < cfg.eps_list.size(); ++k) {
    if (!(cfg.eps_list[k] < cfg.eps_list[k - 1])) throw DomainError("scaling_limit_experiment: eps_list must be decreasing");
  }
  if (!(cfg.t_eval > 0.0)) throw DomainError("scaling_limit_experiment: need t_eval > 0");
  if (cfg.n_paths < 1) throw DomainError("scaling_limit_experiment: need n_paths >= 1");
  if (cfg.reference_refine < 1) throw DomainError("scaling_limit_experiment: reference_refine must be >= 1");

  auto spec_for = [&](double eps) {
    LatticeSpec s;
    s.x_min = cfg.source - cfg.half_width;
    s.x_max = cfg.source + cfg.half_width;
    s.epsilon = eps;
    s.alpha_fn = cfg.alpha_fn;
    s.k_fn = cfg.k_fn;
    s.boundary = Boundary::Reflecting;
    return s;
  };

  DensityGrid fine;
  if (cfg.reference == ScalingReference::Pde) {
    const double eps_ref = cfg.eps_list.back() / cfg.reference_refine;
    fine = solve_vo_heat_forward(spec_for(eps_ref), cfg.source, DiscretizationConfig::for_horizon(cfg.t_eval, cfg.dt));
  }

  ScalingReport report;
  for (double eps : cfg.eps_list) {
    const LatticeSpec spec = spec_for(eps);
    const SemiMarkovModel model = lattice_model(spec);
    const int src = spec.node_index(cfg.source);
    const double t_eval[] = {cfg.t_eval};
    const auto occ = simulate_occupation(model, src, t_eval, cfg.n_paths, cfg.rng, cfg.threads, Sampler::Ctrw);

    std::vector<double> centers;
    for (int j = 0; j < spec.n_nodes(); ++j) centers.push_back(spec.node(j));
    std::vector<double> ref;
    if (cfg.reference == ScalingReference::Pde) {
      ref = coarse_cells(fine, fine.values.size() - 1, centers, eps);
    } else {
      const double sd = std::sqrt(cfg.k_fn(cfg.source) * cfg.t_eval);
      for (double c : centers) ref.push_back(normal_cdf((c + 0.5 * eps - cfg.source) / sd) - normal_cdf((c - 0.5 * eps - cfg.source) / sd));
    }
    ScalingPoint pt;
    pt.epsilon = eps;
    const auto nd = static_cast<double>(cfg.n_paths);
    for (std::size_t j = 0; j < centers.size(); ++j) {
      const double ph = static_cast<double>(occ.counts[0][j]) / nd;
      pt.l1_distance += std::abs(ph - ref[j]);
      pt.mc_se += std::sqrt(ph * (1.0 - ph) / nd);
    }
    report.points.push_back(pt);
  }
  for (std::size_t k = 1; k < report.points.size(); ++k) {
    const auto& a = report.points[k - 1];
    const auto& b = report.points[k];
    if (b.l1_distance > a.l1_distance + 2.0 * std::max(a.mc_se, b.mc_se)) report.monotone = false;
  }
  return report;
}

double MassSeries::at(double time) const {
  if (t.empty()) throw DomainError("MassSeries::at: empty series");
  std::size_t best = 0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (std::abs(t[k] - time) < std::abs(t[best] - time)) best = k;
  }
  return mass[best];
}

MassSeries aggregation_diagnostic(const DensityGrid& grid, double region_lo, double region_hi) {
  if (grid.x.empty()) throw DomainError("aggregation_diagnostic: empty grid");
  const double eps = grid.epsilon;
  const double lo_dom = grid.x.front() - 0.5 * eps, hi_dom = grid.x.back() + 0.5 * eps;
  if (!(region_lo < region_hi) || region_hi <= lo_dom || region_lo >= hi_dom) {
    throw DomainError("aggregation_diagnostic: region outside the domain");
  }
  // a region reaching an edge node takes its whole cell
  const double lo = region_lo <= grid.x.front() ? lo_dom : region_lo;
  const double hi = region_hi >= grid.x.back() ? hi_dom : region_hi;
  std::vector<double> weight(grid.x.size());
  for (std::size_t j = 0; j < grid.x.size(); ++j) {
    const double ov = std::min(hi, grid.x[j] + 0.5 * eps) - std::max(lo, grid.x[j] - 0.5 * eps);
    weight[j] = std::max(0.0, ov);
  }
  MassSeries out;
  out.t = grid.t;
  for (const auto& slice : grid.values) {
    double m = 0.0;
    for (std::size_t j = 0; j < slice.size(); ++j) m += weight[j] * slice[j];
    out.mass.push_back(m);
  }
  return out;
}

void write_density_csv(std::ostream& os, const DensityGrid& grid, int stride) {
  if (stride < 1) throw DomainError("write_density_csv: stride must be >= 1");
  os << "t,y,p\n";
  os.precision(17);
  for (std::size_t k = 0; k < grid.t.size(); k += static_cast<std::size_t>(stride)) {
    for (std::size_t j = 0; j < grid.x.size(); ++j) os << grid.t[k] << ',' << grid.x[j] << ',' << grid.values[k][j] << '\n';
  }
}

std::string scaling_report_json(const ScalingReport& report) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : report.points) j.push_back({{"epsilon", p.epsilon}, {"l1_distance", p.l1_distance}, {"mc_se", p.mc_se}});
  return nlohmann::json{{"points", j}, {"monotone", report.monotone}}.dump(2);
}

}  // namespace semimarkov
