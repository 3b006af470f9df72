#include "semimarkov/solvers.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "semimarkov/errors.hpp"
#include "semimarkov/mlf.hpp"
#include "solver_detail.hpp"

namespace semimarkov {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

TransitionGrid start_grid(const DiscretizationConfig& cfg, int n, Provenance prov, double tol) {
  TransitionGrid grid;
  grid.provenance = prov;
  grid.row_sum_tolerance = tol;
  grid.times = uniform_times(cfg.dt, cfg.n_steps);
  grid.values.reserve(grid.times.size());
  grid.values.push_back(MatrixXd::Identity(n, n));
  return grid;
}

Eigen::PartialPivLU<MatrixXd> factor(const MatrixXd& a, const char* op) {
  Eigen::PartialPivLU<MatrixXd> lu(a);
  const double rc = lu.rcond();
  if (!(rc > 1e-14)) {
    std::ostringstream os;
    os << op << ": step matrix is singular or ill-conditioned (rcond = " << rc << ") at step 1";
    throw NumericError(os.str());
  }
  return lu;
}

void check_finite(const MatrixXd& p, int step, const char* op) {
  if (!p.allFinite()) {
    std::ostringstream os;
    os << op << ": non-finite solution at step " << step;
    throw NumericError(os.str());
  }
}

}  // namespace

namespace detail {

std::vector<double> fractional_orders(const SemiMarkovModel& model, const char* op) {
  std::vector<double> a;
  for (const auto& law : model.holding_laws) {
    if (is_general(law)) {
      throw HypothesisError(std::string(op) + ": needs Mittag-Leffler or Exponential holding laws");
    }
    a.push_back(fractional_order(law));
  }
  return a;
}

void check_forward_hypothesis(const SemiMarkovModel& model, const char* op) {
  for (int i = 0; i < model.n_states(); ++i) {
    const double hii = model.embedded_chain(i, i);
    if (hii != 0.0 && hii != 1.0) {
      std::ostringstream os;
      os << op << ": forward equations assume h_ii = 0, but h[" << i << "][" << i << "] = " << hii;
      throw HypothesisError(os.str());
    }
  }
}

std::vector<double> caputo_weights(double alpha, double h, int n_steps, BackwardScheme scheme) {
  const double e = 1.0 - alpha;
  const double c = std::pow(h, -alpha) * reciprocal_gamma(2.0 - alpha);
  std::vector<double> a(static_cast<std::size_t>(n_steps) + 1);
  for (int m = 0; m <= n_steps; ++m) {
    double v;
    if (scheme == BackwardScheme::L1Midpoint) {
      v = m == 0 ? std::pow(0.5, e) : std::pow(m + 0.5, e) - std::pow(m - 0.5, e);
    } else {
      v = m == 0 ? 1.0 : std::pow(m + 1.0, e) - std::pow(static_cast<double>(m), e);
    }
    a[static_cast<std::size_t>(m)] = c * v;
  }
  return a;
}

TransitionGrid forward_integral_form(const MatrixXd& g, const std::vector<ConvolutionWeights>& w,
                                     const DiscretizationConfig& cfg, Provenance provenance) {
  const auto n = static_cast<int>(g.rows());
  const int steps = cfg.n_steps;
  TransitionGrid grid = start_grid(cfg, n, provenance, 1e-9);
  VectorXd c0(n);
  for (int k = 0; k < n; ++k) c0[k] = w[static_cast<std::size_t>(k)].lag[0];
  // P^n (I - C0 G) = I + H^n G; solve the transposed system
  const MatrixXd a = MatrixXd::Identity(n, n) - c0.asDiagonal() * g;
  const auto lu = factor(a.transpose(), "solve_forward");
  MatrixXd lag(n, steps + 1), start(n, steps + 1);
  for (int k = 0; k < n; ++k) {
    for (int m = 0; m <= steps; ++m) {
      lag(k, m) = w[static_cast<std::size_t>(k)].lag[static_cast<std::size_t>(m)];
      start(k, m) = w[static_cast<std::size_t>(k)].start[static_cast<std::size_t>(m)];
    }
  }
  MatrixXd hist(n, n);
  for (int s = 1; s <= steps; ++s) {
    hist.noalias() = grid.values[0] * start.col(s).asDiagonal();
    for (int m = 1; m < s; ++m) hist.noalias() += grid.values[static_cast<std::size_t>(s - m)] * lag.col(m).asDiagonal();
    const MatrixXd rhs = MatrixXd::Identity(n, n) + hist * g;
    MatrixXd p = lu.solve(rhs.transpose()).transpose();
    check_finite(p, s, "solve_forward");
    grid.values.push_back(std::move(p));
  }
  return grid;
}

}  // namespace detail

DiscretizationConfig DiscretizationConfig::for_horizon(double horizon, double dt) {
  DiscretizationConfig cfg;
  cfg.dt = dt;
  cfg.n_steps = static_cast<int>(std::lround(horizon / dt));
  validate(cfg);
  if (std::abs(cfg.n_steps * dt - horizon) > 1e-9 * std::max(1.0, horizon)) {
    throw ValidationError("DiscretizationConfig: horizon must be a multiple of dt");
  }
  return cfg;
}

void validate(const DiscretizationConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ValidationError("DiscretizationConfig.dt must be > 0");
  if (cfg.n_steps < 1) throw ValidationError("DiscretizationConfig.n_steps must be >= 1");
}

TransitionGrid solve_renewal(const SemiMarkovModel& model, const DiscretizationConfig& cfg) {
  validate(cfg);
  require_valid(model);
  const int n = model.n_states();
  const int steps = cfg.n_steps;
  const double h = cfg.dt;
  // survival and its primitive on the grid, per state
  MatrixXd fbar(n, steps + 1), prim(n, steps + 1);
  for (int i = 0; i < n; ++i) {
    const auto& law = model.holding_laws[static_cast<std::size_t>(i)];
    const double lam = model.rates[i];
    if (is_general(law)) {
      throw HypothesisError("solve_renewal: holding law of state " + std::to_string(i) +
                            " has no closed-form density (singularity handling needs Mittag-Leffler or Exponential)");
    }
    const double a = fractional_order(law);
    for (int s = 0; s <= steps; ++s) {
      const double t = s * h;
      fbar(i, s) = ml_survival(a, lam, t);
      prim(i, s) = ml_integrated_survival(a, lam, t);
    }
  }
  // interval weights: p(t_n - s) linear between p^{n-k} and p^{n-k-1} on [t_k, t_k+1]
  MatrixXd wa(n, steps), wb(n, steps);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < steps; ++k) {
      const double m0 = fbar(i, k) - fbar(i, k + 1);
      const double m1 = prim(i, k + 1) - prim(i, k) - h * fbar(i, k + 1);
      wa(i, k) = m0 - m1 / h;
      wb(i, k) = m1 / h;
    }
  }
  const MatrixXd& hm = model.embedded_chain;
  TransitionGrid grid = start_grid(cfg, n, Provenance::Renewal, 1e-9);
  const auto lu = factor(MatrixXd::Identity(n, n) - wa.col(0).asDiagonal() * hm, "solve_renewal");
  std::vector<MatrixXd> q;  // Q^j = H P^j
  q.reserve(static_cast<std::size_t>(steps) + 1);
  q.push_back(hm);
  MatrixXd rhs(n, n);
  for (int s = 1; s <= steps; ++s) {
    rhs = fbar.col(s).asDiagonal();
    rhs.noalias() += wb.col(s - 1).asDiagonal() * q[0];
    for (int m = 1; m < s; ++m) {
      const VectorXd wm = wa.col(m) + wb.col(m - 1);
      rhs.noalias() += wm.asDiagonal() * q[static_cast<std::size_t>(s - m)];
    }
    MatrixXd p = lu.solve(rhs);
    check_finite(p, s, "solve_renewal");
    q.push_back(hm * p);
    grid.values.push_back(std::move(p));
  }
  return grid;
}

TransitionGrid solve_backward_caputo(const SemiMarkovModel& model, const DiscretizationConfig& cfg) {
  validate(cfg);
  const MatrixXd g = build_generator(model).g;
  const auto alpha = detail::fractional_orders(model, "solve_backward_caputo");
  const int n = model.n_states();
  const int steps = cfg.n_steps;
  const double h = cfg.dt;
  const bool midpoint = cfg.scheme_backward == BackwardScheme::L1Midpoint;
  const double theta = midpoint ? 0.5 : 1.0;
  MatrixXd a(n, steps + 1);
  for (int i = 0; i < n; ++i) {
    const auto w = detail::caputo_weights(alpha[static_cast<std::size_t>(i)], h, steps, cfg.scheme_backward);
    for (int m = 0; m <= steps; ++m) a(i, m) = w[static_cast<std::size_t>(m)];
  }
  TransitionGrid grid = start_grid(cfg, n, Provenance::BackwardCaputo, 1e-9);
  const VectorXd a0 = a.col(0);
  const auto lu = factor(MatrixXd(a0.asDiagonal()) - theta * g, "solve_backward_caputo");
  std::vector<MatrixXd> diff;  // D^k = P^k - P^{k-1}
  diff.reserve(static_cast<std::size_t>(steps) + 1);
  diff.push_back(MatrixXd::Zero(n, n));
  MatrixXd rhs(n, n);
  for (int s = 1; s <= steps; ++s) {
    const MatrixXd& prev = grid.values.back();
    rhs.noalias() = a0.asDiagonal() * prev;
    if (theta < 1.0) rhs.noalias() += (1.0 - theta) * (g * prev);
    for (int m = 1; m < s; ++m) rhs.noalias() -= a.col(m).asDiagonal() * diff[static_cast<std::size_t>(s - m)];
    MatrixXd p = lu.solve(rhs);
    check_finite(p, s, "solve_backward_caputo");
    diff.push_back(p - prev);
    grid.values.push_back(std::move(p));
  }
  return grid;
}

TransitionGrid solve_forward_rl(const SemiMarkovModel& model, const DiscretizationConfig& cfg) {
  validate(cfg);
  const MatrixXd g = build_generator(model).g;
  const auto alpha = detail::fractional_orders(model, "solve_forward_rl");
  detail::check_forward_hypothesis(model, "solve_forward_rl");
  const int n = model.n_states();
  const int steps = cfg.n_steps;
  const double h = cfg.dt;
  if (cfg.scheme_forward == ForwardScheme::ProductTrapezoid) {
    std::vector<ConvolutionWeights> w;
    for (double a : alpha) w.push_back(convolution_weights(power_kernel_primitives(a, h, steps)));
    return detail::forward_integral_form(g, w, cfg, Provenance::ForwardRL);
  }
  // (P^n - P^{n-1})/h = R^n G, R^n_{.k} = h^{alpha_k - 1} sum_j w_j^{(k)} P^{n-j}_{.k}
  MatrixXd gl(n, steps + 1);
  VectorXd scale(n);
  for (int k = 0; k < n; ++k) {
    const auto wk = grunwald_weights(1.0 - alpha[static_cast<std::size_t>(k)], steps);
    for (int j = 0; j <= steps; ++j) gl(k, j) = wk[static_cast<std::size_t>(j)];
    scale[k] = std::pow(h, alpha[static_cast<std::size_t>(k)] - 1.0);
  }
  TransitionGrid grid = start_grid(cfg, n, Provenance::ForwardRL, 1e-9);
  const MatrixXd a = MatrixXd::Identity(n, n) - h * scale.asDiagonal() * g;
  const auto lu = factor(a.transpose(), "solve_forward_rl");
  MatrixXd hist(n, n);
  for (int s = 1; s <= steps; ++s) {
    hist.setZero();
    for (int j = 1; j <= s; ++j) hist.noalias() += grid.values[static_cast<std::size_t>(s - j)] * gl.col(j).asDiagonal();
    const MatrixXd rhs = grid.values.back() + h * (hist * scale.asDiagonal()) * g;
    MatrixXd p = lu.solve(rhs.transpose()).transpose();
    check_finite(p, s, "solve_forward_rl");
    grid.values.push_back(std::move(p));
  }
  return grid;
}

TransitionGrid matrix_exponential_grid(const SemiMarkovModel& model, std::span<const double> times) {
  const MatrixXd g = build_generator(model).g;
  for (const auto& law : model.holding_laws) {
    if (!std::holds_alternative<ExponentialLaw>(law)) {
      throw HypothesisError("matrix_exponential_grid: every holding law must be exponential");
    }
  }
  TransitionGrid grid;
  grid.provenance = Provenance::MatrixExponential;
  grid.row_sum_tolerance = 1e-10;
  grid.times.assign(times.begin(), times.end());
  for (double t : times) grid.values.push_back(t == 0.0 ? MatrixXd::Identity(g.rows(), g.cols()) : MatrixXd((t * g).exp()));
  return grid;
}

std::function<double(double)> potential_density(const HoldingLaw& law) {
  if (std::holds_alternative<ExponentialLaw>(law)) return [](double) { return 1.0; };
  if (const auto* ml = std::get_if<MittagLefflerLaw>(&law)) {
    const double a = ml->alpha, rg = reciprocal_gamma(a);
    return [a, rg](double t) { return std::pow(t, a - 1.0) * rg; };
  }
  const auto& g = std::get<GeneralSubordinatedLaw>(law);
  if (!g.potential_density) throw ValidationError("missing potential density for general holding law");
  return g.potential_density;
}

double renewal_density(const SemiMarkovModel& model, int i, double t) {
  require_valid(model);
  if (i < 0 || i >= model.n_states()) throw DomainError("renewal_density: state index out of range");
  const auto& law = model.holding_laws[static_cast<std::size_t>(i)];
  if (std::holds_alternative<ExponentialLaw>(law)) {
    if (!(t >= 0.0)) throw DomainError("renewal_density: need t >= 0");
    return model.rates[i];
  }
  if (!(t > 0.0)) throw DomainError("renewal_density: need t > 0");
  return model.rates[i] * potential_density(law)(t);
}

FluxGrid outgoing_flux(const TransitionGrid& grid, const SemiMarkovModel& model) {
  require_valid(model);
  if (grid.provenance == Provenance::MonteCarlo) {
    throw ValidationError("outgoing_flux: provenance mismatch (needs a solver grid, got MonteCarlo)");
  }
  if (grid.n_states() != model.n_states() || grid.times.size() < 2) {
    throw ValidationError("outgoing_flux: grid does not match the model");
  }
  if (!check_grid(grid).empty()) throw ValidationError("outgoing_flux: grid is not uniform or not a transition grid");
  const int n = model.n_states();
  const int steps = static_cast<int>(grid.times.size()) - 1;
  const double h = grid.times[1] - grid.times[0];
  MatrixXd lag(n, steps + 1), start(n, steps + 1);
  for (int k = 0; k < n; ++k) {
    const auto& law = model.holding_laws[static_cast<std::size_t>(k)];
    const KernelPrimitives kp = is_general(law) ? numeric_kernel_primitives(potential_density(law), h, steps)
                                                : power_kernel_primitives(fractional_order(law), h, steps);
    const auto w = convolution_weights(kp);
    for (int m = 0; m <= steps; ++m) {
      lag(k, m) = w.lag[static_cast<std::size_t>(m)];
      start(k, m) = w.start[static_cast<std::size_t>(m)];
    }
  }
  const VectorXd lam = model.rates;
  FluxGrid out;
  MatrixXd phi_prev = MatrixXd::Zero(n, n), phi(n, n);
  for (int s = 1; s <= steps; ++s) {
    phi.noalias() = grid.values[0] * start.col(s).asDiagonal();
    for (int m = 0; m < s; ++m) phi.noalias() += grid.values[static_cast<std::size_t>(s - m)] * lag.col(m).asDiagonal();
    MatrixXd loss = (phi - phi_prev) / h * lam.asDiagonal();
    MatrixXd gain = loss * model.embedded_chain;
    MatrixXd dp = (grid.values[static_cast<std::size_t>(s)] - grid.values[static_cast<std::size_t>(s - 1)]) / h;
    out.balance_residual = std::max(out.balance_residual, (dp - (gain - loss)).cwiseAbs().maxCoeff());
    out.times.push_back(grid.times[static_cast<std::size_t>(s)] - 0.5 * h);
    out.outgoing.push_back(std::move(loss));
    out.incoming.push_back(std::move(gain));
    out.dpdt.push_back(std::move(dp));
    phi_prev = phi;
  }
  return out;
}

}  // namespace semimarkov
