#include "semimarkov/mlf.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "semimarkov/errors.hpp"

namespace semimarkov {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// sin(pi x) with exact zeros at the integers.
double sin_pi(double x) { return std::sin(kPi * std::remainder(x, 2.0)); }

double lanczos_sum(double xm1) {
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (xm1 + static_cast<double>(i));
  return a;
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

void check_params(MlParams p) {
  if (!(p.alpha > 0.0 && p.alpha <= 1.0) || !(p.beta > 0.0) || !std::isfinite(p.beta)) {
    std::ostringstream os;
    os << "mittag_leffler: need 0 < alpha <= 1 and beta > 0, got alpha=" << p.alpha
       << " beta=" << p.beta;
    throw DomainError(os.str());
  }
}

void check_rate_time(const char* op, double alpha, double lambda, double t) {
  if (!(alpha > 0.0 && alpha <= 1.0) || !(lambda > 0.0) || !std::isfinite(lambda) ||
      !(t >= 0.0) || !std::isfinite(t)) {
    std::ostringstream os;
    os << op << ": invalid arguments alpha=" << alpha << " lambda=" << lambda << " t=" << t;
    throw DomainError(os.str());
  }
}

// Adaptive Gauss-Kronrod on [a, b].
template <class F>
double integrate(F f, double a, double b) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-12, &err);
}

// Splits [0, 1] at the near-pole of 1/D when alpha is close to 1.
template <class F>
double integrate_unit(F f, double alpha) {
  const double c = -std::cos(alpha * kPi);
  if (c > 0.0 && c < 1.0) return integrate(f, 0.0, c) + integrate(f, c, 1.0);
  return integrate(f, 0.0, 1.0);
}

}  // namespace

double gamma_fn(double x) {
  if (std::isnan(x)) return kNaN;
  if (is_nonpositive_integer(x)) return kNaN;
  if (x < 0.5) return kPi / (sin_pi(x) * gamma_fn(1.0 - x));
  if (x > 171.7) return std::numeric_limits<double>::infinity();
  const double xm1 = x - 1.0;
  const double t = xm1 + kLanczosG + 0.5;
  // split the power to delay overflow near the top of the range
  const double half = std::pow(t, 0.5 * (xm1 + 0.5));
  return std::sqrt(2.0 * kPi) * half * (half * std::exp(-t)) * lanczos_sum(xm1);
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: need x > 0");
  if (x < 0.5) return std::log(kPi / std::abs(sin_pi(x))) - log_gamma(1.0 - x);
  const double xm1 = x - 1.0;
  const double t = xm1 + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (xm1 + 0.5) * std::log(t) - t + std::log(lanczos_sum(xm1));
}

double reciprocal_gamma(double x) {
  if (std::isnan(x)) return kNaN;
  if (is_nonpositive_integer(x)) return 0.0;
  if (x < 0.5) return sin_pi(x) * gamma_fn(1.0 - x) / kPi;
  if (x > 171.0) return std::exp(-log_gamma(x));
  return 1.0 / gamma_fn(x);
}

namespace ml_method {

double series(MlParams p, double z) {
  // Kahan-compensated partial sums of z^k / Gamma(alpha k + beta)
  double sum = 0.0, comp = 0.0, zk = 1.0;
  for (int k = 0; k < 5000; ++k) {
    const double arg = p.alpha * k + p.beta;
    const double term = zk * reciprocal_gamma(arg);
    const double y = term - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    if (arg > 3.0 && std::abs(term) <= 1e-17 * std::abs(sum)) break;
    if (zk == 0.0) break;
    zk *= z;
  }
  return sum;
}

double asymptotic(MlParams p, double z) {
  const double x = -z;
  if (!(x > 1.0)) return kNaN;
  // Terms are judged by the envelope |1/Gamma(y)| <= Gamma(1-y)/pi (y < 0),
  // so coefficients that happen to sit near a pole of Gamma cannot fake
  // convergence.
  double sum = 0.0, last = std::numeric_limits<double>::infinity(), err = kNaN;
  const double lx = std::log(x);
  for (int k = 1; k < 200; ++k) {
    const double y = p.beta - p.alpha * k;
    const double lenv = y < 0.5 ? log_gamma(1.0 - y) - std::log(kPi) : -log_gamma(y);
    const double env = std::exp(lenv - k * lx);
    if (env > last || (sum != 0.0 && env < 1e-17 * std::abs(sum))) {
      err = env;
      break;
    }
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    sum += sign * std::exp(-k * lx) * reciprocal_gamma(y);
    last = env;
  }
  if (std::isnan(err) || sum == 0.0) return kNaN;
  if (p.alpha > 2.0 / 3.0) {
    // exponentially small contribution of the nearest singularity of the
    // spectral density; it dominates the remainder as alpha -> 1
    err = std::max(err, std::exp(std::pow(x, 1.0 / p.alpha) * std::cos(kPi / p.alpha)));
  }
  if (err > 1e-15 * std::abs(sum)) return kNaN;
  return sum;
}

double integral(MlParams p, double z) {
  const double a = p.alpha, b = p.beta;
  if (!(a < 1.0) || !(b <= 1.0) || !(z < 0.0)) {
    throw DomainError("ml_method::integral: needs alpha < 1, beta <= 1, z < 0");
  }
  const double t = std::pow(-z, 1.0 / a);
  const double ca = std::cos(a * kPi);
  const double sb = std::sin(b * kPi);
  const double sba = std::sin((b - a) * kPi);
  const double p1 = (1.0 - b) / a;
  const double p2 = (b - 1.0) / a - 1.0;
  auto inner = [&](double v) {
    const double d = v * v + 2.0 * v * ca + 1.0;
    const double lv = std::log(v);
    return std::exp(p1 * lv - t * std::pow(v, 1.0 / a)) * (v * sb + sba) / d;
  };
  auto outer = [&](double w) {
    const double d = w * w + 2.0 * w * ca + 1.0;
    const double lw = std::log(w);
    return std::exp(p2 * lw - t * std::exp(-lw / a)) * (sb + w * sba) / d;
  };
  const double total = integrate_unit(inner, a) + integrate_unit(outer, a);
  return std::pow(t, 1.0 - b) * total / (a * kPi);
}

}  // namespace ml_method

double mittag_leffler(MlParams p, double z) {
  check_params(p);
  if (!(z <= 0.0) || !std::isfinite(z)) {
    std::ostringstream os;
    os << "mittag_leffler: argument must be finite and <= 0, got " << z;
    throw DomainError(os.str());
  }
  if (z == 0.0) return p.beta == 1.0 ? 1.0 : reciprocal_gamma(p.beta);
  if (p.alpha == 1.0) {
    if (p.beta == 1.0) return std::exp(z);
    if (-z <= ml_method::kSeriesRadius) return ml_method::series(p, z);
    if (p.beta == std::floor(p.beta)) {
      return (mittag_leffler({1.0, p.beta - 1.0}, z) - reciprocal_gamma(p.beta - 1.0)) / z;
    }
    const double v = ml_method::asymptotic(p, z);
    if (!std::isnan(v)) return v;
    throw DomainError("mittag_leffler: alpha = 1 with non-integer beta is only supported near 0 or far out");
  }
  if (-z <= ml_method::kSeriesRadius) return ml_method::series(p, z);
  const double v = ml_method::asymptotic(p, z);
  if (!std::isnan(v)) return v;
  if (p.beta > 1.0) {
    const double bm = p.beta - p.alpha;
    return (mittag_leffler({p.alpha, bm}, z) - reciprocal_gamma(bm)) / z;
  }
  return ml_method::integral(p, z);
}

double ml_survival(double alpha, double lambda, double t) {
  check_rate_time("ml_survival", alpha, lambda, t);
  if (t == 0.0) return 1.0;
  if (alpha == 1.0) return std::exp(-lambda * t);
  return mittag_leffler({alpha, 1.0}, -lambda * std::pow(t, alpha));
}

double ml_density(double alpha, double lambda, double t) {
  check_rate_time("ml_density", alpha, lambda, t);
  if (alpha == 1.0) return lambda * std::exp(-lambda * t);
  if (t == 0.0) throw DomainError("ml_density: singular at t = 0 for alpha < 1");
  const double ta = std::pow(t, alpha);
  return lambda * (ta / t) * mittag_leffler({alpha, alpha}, -lambda * ta);
}

double ml_tail_asymptote(double alpha, double lambda, double t) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ml_tail_asymptote: need 0 < alpha < 1");
  if (!(lambda > 0.0) || !(t > 0.0)) throw DomainError("ml_tail_asymptote: need lambda > 0, t > 0");
  return std::pow(t, -alpha) * reciprocal_gamma(1.0 - alpha) / lambda;
}

double ml_integrated_survival(double alpha, double lambda, double t) {
  check_rate_time("ml_integrated_survival", alpha, lambda, t);
  if (t == 0.0) return 0.0;
  if (alpha == 1.0) return -std::expm1(-lambda * t) / lambda;
  return t * mittag_leffler({alpha, 2.0}, -lambda * std::pow(t, alpha));
}

}  // namespace semimarkov
