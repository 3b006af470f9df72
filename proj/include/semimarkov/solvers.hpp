#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "semimarkov/grid.hpp"
#include "semimarkov/process.hpp"

namespace semimarkov {

/// L1Caputo: classic L1 quotient with implicit right-hand side (order 2 - alpha
/// for smooth data, first order at alpha = 1). L1Midpoint: L1 quotient
/// evaluated at t_{n-1/2} with the right-hand side averaged over the step
/// (Crank-Nicolson at alpha = 1).
enum class BackwardScheme { L1Caputo, L1Midpoint };

/// GrunwaldLetnikov: implicit Euler in time with GL weights for RL-D^{1-alpha}.
/// ProductTrapezoid: integrated form p = delta + sum_k g_ki I^{alpha_k} p_k
/// with exact kernel moments against piecewise-linear p.
enum class ForwardScheme { GrunwaldLetnikov, ProductTrapezoid };

enum class VolterraQuadrature { ProductTrapezoid };

struct DiscretizationConfig {
  double dt = 1e-3;
  int n_steps = 1000;
  BackwardScheme scheme_backward = BackwardScheme::L1Midpoint;
  ForwardScheme scheme_forward = ForwardScheme::ProductTrapezoid;
  VolterraQuadrature volterra_quadrature = VolterraQuadrature::ProductTrapezoid;

  double horizon() const { return dt * n_steps; }
  static DiscretizationConfig for_horizon(double horizon, double dt);
};

void validate(const DiscretizationConfig& cfg);

/// Markov renewal equation by product integration of the holding densities
/// against piecewise-linear p (the t^{alpha-1} singularity is integrated
/// exactly through differences of the survival and its primitive).
TransitionGrid solve_renewal(const SemiMarkovModel& model, const DiscretizationConfig& cfg);

/// D_t^{alpha_i} p_ij = sum_k g_ik p_kj (Caputo, order alpha_i on row i).
TransitionGrid solve_backward_caputo(const SemiMarkovModel& model, const DiscretizationConfig& cfg);

/// d/dt p_li = sum_k g_ki RL-D^{1-alpha_k} p_lk. Requires h_ii = 0 except on
/// absorbing rows (h_ii = 1).
TransitionGrid solve_forward_rl(const SemiMarkovModel& model, const DiscretizationConfig& cfg);

/// d/dt int_0^t (p_ij(s) - delta_ij) nu-bar_i(t - s) ds = sum_k g_ik p_kj(t),
/// kernel moments computed numerically from the Levy-tail callables
/// (Mittag-Leffler and Exponential laws use their closed-form kernels).
TransitionGrid solve_backward_volterra(const SemiMarkovModel& model, const DiscretizationConfig& cfg);

/// d/dt p_li = sum_k g_ki d/dt int_0^t p_lk(s) u_k(t - s) ds, kernel moments
/// computed numerically from the potential densities u_k.
TransitionGrid solve_forward_volterra(const SemiMarkovModel& model, const DiscretizationConfig& cfg);

/// exp(t G) on the given times. Only valid (and only accepted) when every
/// holding law is exponential.
TransitionGrid matrix_exponential_grid(const SemiMarkovModel& model, std::span<const double> times);

/// Gain/loss fluxes for every starting row l. Values are attached to the
/// midpoints t_{n-1/2}, where the backward difference of the convolution
/// int p u is second-order accurate.
struct FluxGrid {
  std::vector<double> times;               ///< t_{n-1/2}, n = 1..N
  std::vector<Eigen::MatrixXd> outgoing;   ///< J-_i, indexed (l, i)
  std::vector<Eigen::MatrixXd> incoming;   ///< J+_i, indexed (l, i)
  std::vector<Eigen::MatrixXd> dpdt;       ///< (p^n - p^{n-1}) / dt
  double balance_residual = 0.0;           ///< max |dp/dt - (J+ - J-)|
};

FluxGrid outgoing_flux(const TransitionGrid& grid, const SemiMarkovModel& model);

/// m_i(t) = lambda_i u_i(t).
double renewal_density(const SemiMarkovModel& model, int i, double t);

/// Potential density u_i as a callable (closed form for Exponential and
/// Mittag-Leffler laws). Throws ValidationError when a general law has none.
std::function<double(double)> potential_density(const HoldingLaw& law);

}  // namespace semimarkov
