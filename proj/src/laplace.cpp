#include "semimarkov/laplace.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "semimarkov/errors.hpp"

namespace semimarkov {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> stehfest_weights(int n) {
  const int half = n / 2;
  auto fact = [](int k) {
    long double f = 1.0L;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 1; k <= n; ++k) {
    long double sum = 0.0L;
    for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
      sum += std::pow(static_cast<long double>(j), half) * fact(2 * j) /
             (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k));
    }
    v[static_cast<std::size_t>(k)] = static_cast<double>(((k + half) % 2 == 0 ? 1.0L : -1.0L) * sum);
  }
  return v;
}

struct TalbotNode {
  Complex s;
  Complex weight;  // multiplies F(s); already includes e^{st} and r/M
};

// Fixed Talbot contour s(theta) = r theta (cot theta + i), r = 2M/(5t).
std::vector<TalbotNode> talbot_nodes(double t, int m) {
  const double r = 2.0 * m / (5.0 * t);
  std::vector<TalbotNode> nodes;
  nodes.reserve(static_cast<std::size_t>(m));
  nodes.push_back({Complex(r, 0.0), Complex(0.5 * std::exp(r * t) * r / m, 0.0)});
  for (int k = 1; k < m; ++k) {
    const double th = k * kPi / m;
    const double cot = 1.0 / std::tan(th);
    const Complex s(r * th * cot, r * th);
    const double sigma = th + (th * cot - 1.0) * cot;
    nodes.push_back({s, std::exp(t * s) * Complex(1.0, sigma) * (r / m)});
  }
  return nodes;
}

std::string method_name(InversionMethod m) {
  return m == InversionMethod::Talbot ? "Talbot" : "Gaver-Stehfest";
}

void check_time(double t, const InversionConfig& cfg) {
  if (!(t >= cfg.t_min_guard) || !std::isfinite(t)) {
    std::ostringstream os;
    os << "Laplace inversion: t = " << t << " is below t_min_guard = " << cfg.t_min_guard;
    throw DomainError(os.str());
  }
}

}  // namespace

void validate(const InversionConfig& cfg) {
  if (cfg.gs_terms % 2 != 0 || cfg.gs_terms < 8 || cfg.gs_terms > 18) {
    throw ValidationError("InversionConfig.gs_terms must be even and in [8, 18]");
  }
  if (cfg.talbot_nodes < 16) throw ValidationError("InversionConfig.talbot_nodes must be >= 16");
  if (!(cfg.t_min_guard > 0.0)) throw ValidationError("InversionConfig.t_min_guard must be > 0");
}

double invert_laplace_scalar(const ScalarTransform& fn, double t, const InversionConfig& cfg,
                             InversionDiagnostics* diag) {
  validate(cfg);
  check_time(t, cfg);
  double result = 0.0;
  InversionDiagnostics d;
  if (cfg.method == InversionMethod::GaverStehfest) {
    const auto v = stehfest_weights(cfg.gs_terms);
    const double a = std::log(2.0) / t;
    long double partial = 0.0L;
    for (int k = 1; k <= cfg.gs_terms; ++k) {
      const Complex f = fn(Complex(k * a, 0.0));
      if (!std::isfinite(f.real())) {
        std::ostringstream os;
        os << "Gaver-Stehfest: transform not finite at s = " << k * a << " (t = " << t << ")";
        throw NumericError(os.str());
      }
      partial += static_cast<long double>(v[static_cast<std::size_t>(k)]) * f.real();
      d.max_partial = std::max(d.max_partial, std::abs(static_cast<double>(partial) * a));
    }
    result = static_cast<double>(partial) * a;
    d.unstable = d.max_partial > 1e3 * std::abs(result);
  } else {
    const auto nodes = talbot_nodes(t, cfg.talbot_nodes);
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const Complex f = fn(nodes[k].s);
      const double term = (nodes[k].weight * f).real();
      if (!std::isfinite(term)) {
        std::ostringstream os;
        os << "Talbot: non-finite contribution at node " << k << " s = " << nodes[k].s
           << " (t = " << t << ", M = " << cfg.talbot_nodes << ")";
        throw NumericError(os.str());
      }
      sum += term;
    }
    result = sum;
  }
  if (!std::isfinite(result)) {
    throw NumericError(method_name(cfg.method) + " inversion produced a non-finite value");
  }
  if (diag) *diag = d;
  return result;
}

Eigen::MatrixXcd laplace_matrix_homogeneous(const Generator& gen, double alpha, Complex s) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("laplace_matrix_homogeneous: need 0 < alpha <= 1");
  if (!(s.real() > 0.0)) throw NumericError("laplace_matrix_homogeneous: need Re s > 0");
  const Eigen::Index n = gen.g.rows();
  const Complex sa = std::pow(s, alpha);
  Eigen::MatrixXcd a = sa * Eigen::MatrixXcd::Identity(n, n) - gen.g.cast<Complex>();
  return (std::pow(s, alpha - 1.0)) * a.partialPivLu().inverse();
}

Eigen::MatrixXcd laplace_matrix_heterogeneous(const Generator& gen, std::span<const double> alphas,
                                              Complex s) {
  const Eigen::Index n = gen.g.rows();
  if (static_cast<Eigen::Index>(alphas.size()) != n) {
    throw DomainError("laplace_matrix_heterogeneous: one alpha per state required");
  }
  if (!(s.real() > 0.0)) throw NumericError("laplace_matrix_heterogeneous: need Re s > 0");
  Eigen::VectorXcd lam(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = alphas[static_cast<std::size_t>(i)];
    if (!(a > 0.0 && a <= 1.0)) throw DomainError("laplace_matrix_heterogeneous: need 0 < alpha_i <= 1");
    lam[i] = std::pow(s, a);
  }
  Eigen::MatrixXcd a = -gen.g.cast<Complex>();
  a.diagonal() += lam;
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd(lam.asDiagonal()) / s;
  return a.partialPivLu().solve(rhs);
}

Complex fpp_state_dependent_laplace(int i, int j, double lambda, std::span<const double> alphas,
                                    Complex s) {
  if (j < i) return Complex(0.0, 0.0);
  if (i < 0 || static_cast<std::size_t>(j) >= alphas.size()) {
    throw DomainError("fpp_state_dependent_laplace: state index out of range");
  }
  Complex denom(1.0, 0.0);
  for (int k = i; k <= j; ++k) denom *= lambda + std::pow(s, alphas[static_cast<std::size_t>(k)]);
  return std::pow(s, alphas[static_cast<std::size_t>(j)] - 1.0) * std::pow(lambda, j - i) / denom;
}

LaplaceMatrixFn model_laplace_transform(const SemiMarkovModel& model) {
  const Generator gen = build_generator(model);
  return [gen, laws = model.holding_laws](Complex s) {
    const Eigen::Index n = gen.g.rows();
    Eigen::VectorXcd f(n);
    for (Eigen::Index i = 0; i < n; ++i) f[i] = laplace_exponent(laws[static_cast<std::size_t>(i)], s);
    Eigen::MatrixXcd a = -gen.g.cast<Complex>();
    a.diagonal() += f;
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd(f.asDiagonal()) / s;
    return Eigen::MatrixXcd(a.partialPivLu().solve(rhs));
  };
}

TransitionGrid invert_laplace_matrix(const LaplaceMatrixFn& fn, std::span<const double> times,
                                     const InversionConfig& cfg) {
  validate(cfg);
  TransitionGrid grid;
  grid.provenance = Provenance::LaplaceInversion;
  grid.row_sum_tolerance = 1e-5;
  grid.times.assign(times.begin(), times.end());
  Eigen::Index n = -1;
  std::vector<double> gs;
  if (cfg.method == InversionMethod::GaverStehfest) gs = stehfest_weights(cfg.gs_terms);
  for (double t : times) {
    if (t == 0.0) {
      if (n < 0) n = fn(Complex(1.0, 0.0)).rows();
      grid.values.push_back(Eigen::MatrixXd::Identity(n, n));
      continue;
    }
    check_time(t, cfg);
    Eigen::MatrixXd acc;
    if (cfg.method == InversionMethod::GaverStehfest) {
      const double a = std::log(2.0) / t;
      for (int k = 1; k <= cfg.gs_terms; ++k) {
        Eigen::MatrixXd term = fn(Complex(k * a, 0.0)).real() * (gs[static_cast<std::size_t>(k)] * a);
        if (k == 1) acc = term; else acc += term;
      }
    } else {
      for (const auto& node : talbot_nodes(t, cfg.talbot_nodes)) {
        Eigen::MatrixXd term = (fn(node.s) * node.weight).real();
        if (acc.size() == 0) acc = term; else acc += term;
      }
    }
    n = acc.rows();
    for (Eigen::Index i = 0; i < acc.rows(); ++i) {
      for (Eigen::Index j = 0; j < acc.cols(); ++j) {
        if (!std::isfinite(acc(i, j))) {
          std::ostringstream os;
          os << method_name(cfg.method) << " matrix inversion failed at (i, j, t) = (" << i << ", " << j
             << ", " << t << ")";
          throw NumericError(os.str());
        }
      }
    }
    grid.values.push_back(std::move(acc));
  }
  return grid;
}

}  // namespace semimarkov
