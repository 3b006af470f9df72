#pragma once

#include <vector>

#include "semimarkov/kernels.hpp"
#include "semimarkov/solvers.hpp"

namespace semimarkov::detail {

/// alpha_i of every state (Exponential = 1); HypothesisError on general laws.
std::vector<double> fractional_orders(const SemiMarkovModel& model, const char* op);

/// Forward-equation hypothesis: h_ii = 0, absorbing rows (h_ii = 1) excepted.
void check_forward_hypothesis(const SemiMarkovModel& model, const char* op);

/// Memory weights of the discrete Caputo quotient, m = 0..n_steps.
std::vector<double> caputo_weights(double alpha, double h, int n_steps, BackwardScheme scheme);

/// P^n = I + Phi^n G with Phi_lk = int_0^t p_lk(s) u_k(t - s) ds discretized
/// by product-trapezoid weights (one set per state).
TransitionGrid forward_integral_form(const Eigen::MatrixXd& g, const std::vector<ConvolutionWeights>& w,
                                     const DiscretizationConfig& cfg, Provenance provenance);

}  // namespace semimarkov::detail
