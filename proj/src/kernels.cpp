#include "semimarkov/kernels.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "semimarkov/errors.hpp"
#include "semimarkov/mlf.hpp"

namespace semimarkov {

KernelPrimitives power_kernel_primitives(double beta, double h, int n_steps) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("power_kernel_primitives: need 0 <= beta <= 1");
  KernelPrimitives kp;
  kp.h = h;
  kp.first.resize(static_cast<std::size_t>(n_steps) + 1);
  kp.second.resize(static_cast<std::size_t>(n_steps) + 1);
  const double g1 = reciprocal_gamma(beta + 1.0), g2 = reciprocal_gamma(beta + 2.0);
  for (int n = 0; n <= n_steps; ++n) {
    const double t = n * h;
    kp.first[static_cast<std::size_t>(n)] = (n == 0) ? 0.0 : std::pow(t, beta) * g1;
    kp.second[static_cast<std::size_t>(n)] = std::pow(t, beta + 1.0) * g2;
  }
  return kp;
}

KernelPrimitives numeric_kernel_primitives(const std::function<double(double)>& k, double h, int n_steps) {
  KernelPrimitives kp;
  kp.h = h;
  kp.first.assign(static_cast<std::size_t>(n_steps) + 1, 0.0);
  kp.second.assign(static_cast<std::size_t>(n_steps) + 1, 0.0);
  boost::math::quadrature::tanh_sinh<double> ts;
  for (int n = 0; n < n_steps; ++n) {
    const double a = n * h, b = a + h;
    double i0 = 0.0, i1 = 0.0;
    if (n == 0) {
      try {
        i0 = ts.integrate(k, a, b, 1e-13);
        i1 = ts.integrate([&](double s) { return s * k(s); }, a, b, 1e-13);
      } catch (const std::exception& e) {
        throw NumericError(std::string("kernel not integrable at 0+: ") + e.what());
      }
    } else {
      using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
      double err = 0.0;
      i0 = GK::integrate(k, a, b, 8, 1e-13, &err);
      i1 = GK::integrate([&](double s) { return (s - a) * k(s); }, a, b, 8, 1e-13, &err);
    }
    if (!std::isfinite(i0) || !std::isfinite(i1)) {
      std::ostringstream os;
      os << "kernel moments not finite on [" << a << ", " << b << "]";
      throw NumericError(n == 0 ? "kernel not integrable at 0+" : os.str());
    }
    const auto u = static_cast<std::size_t>(n);
    kp.first[u + 1] = kp.first[u] + i0;
    kp.second[u + 1] = kp.second[u] + h * kp.first[u] + (h * i0 - i1);
  }
  return kp;
}

ConvolutionWeights convolution_weights(const KernelPrimitives& kp) {
  const std::size_t n = kp.second.size();
  const double h = kp.h;
  ConvolutionWeights w;
  w.lag.assign(n, 0.0);
  w.start.assign(n, 0.0);
  if (n < 2) return w;
  w.lag[0] = kp.second[1] / h;
  for (std::size_t m = 1; m + 1 < n; ++m) {
    w.lag[m] = (kp.second[m + 1] - 2.0 * kp.second[m] + kp.second[m - 1]) / h;
  }
  for (std::size_t m = 1; m < n; ++m) {
    w.start[m] = kp.first[m] - (kp.second[m] - kp.second[m - 1]) / h;
  }
  return w;
}

std::vector<double> grunwald_weights(double order, int n) {
  std::vector<double> w(static_cast<std::size_t>(n) + 1);
  w[0] = 1.0;
  for (int j = 1; j <= n; ++j) w[static_cast<std::size_t>(j)] = w[static_cast<std::size_t>(j) - 1] * (1.0 - (order + 1.0) / j);
  return w;
}

}  // namespace semimarkov
