#pragma once

#include <functional>
#include <vector>

namespace semimarkov {

/// Primitives of a convolution kernel k on t_n = n h (n = 0..N):
/// first[n] = int_0^{t_n} k, second[n] = int_0^{t_n} (t_n - s) k(s) ds.
struct KernelPrimitives {
  double h = 0.0;
  std::vector<double> first;
  std::vector<double> second;
};

/// k(t) = t^{beta-1}/Gamma(beta) for beta in (0, 1]; beta = 0 is the unit
/// point mass at 0 (first = 1 for t > 0, second = t).
KernelPrimitives power_kernel_primitives(double beta, double h, int n_steps);

/// Primitives of a callable kernel, integrable at 0+ (tanh-sinh on the first
/// cell, adaptive Gauss-Kronrod elsewhere). Throws NumericError when the
/// kernel is not integrable at 0+.
KernelPrimitives numeric_kernel_primitives(const std::function<double(double)>& k, double h, int n_steps);

/// Product-trapezoid weights: for piecewise-linear phi,
/// int_0^{t_n} phi(s) k(t_n - s) ds = start[n] phi_0 + sum_{m=0}^{n-1} lag[m] phi_{n-m}.
struct ConvolutionWeights {
  std::vector<double> lag;    ///< lag[0] = second[1]/h, lag[m] = second-difference / h
  std::vector<double> start;  ///< start[n] = first[n] - (second[n] - second[n-1]) / h
};

ConvolutionWeights convolution_weights(const KernelPrimitives& kp);

/// Grunwald-Letnikov weights (-1)^j binom(order, j), j = 0..n.
std::vector<double> grunwald_weights(double order, int n);

}  // namespace semimarkov
