#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "semimarkov/laplace.hpp"
#include "semimarkov/montecarlo.hpp"
#include "semimarkov/solvers.hpp"

using namespace semimarkov;

namespace {

SemiMarkovModel random_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(2, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = size(rng);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (i != j) h(i, j) = unit(rng) < 0.2 ? 0.0 : unit(rng);
    if (h.row(i).sum() == 0.0) h(i, (i + 1) % n) = 1.0;
    h.row(i) /= h.row(i).sum();
  }
  Eigen::VectorXd rates(n);
  std::vector<double> alphas;
  for (int i = 0; i < n; ++i) {
    rates[i] = 0.2 + 3.0 * unit(rng);
    alphas.push_back(unit(rng) < 0.15 ? 1.0 : 0.25 + 0.74 * unit(rng));
  }
  return ml_model(h, rates, alphas);
}

double laplace_of(const std::function<double(double)>& f, double s) {
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  auto g = [&](double t) { return std::exp(-s * t) * f(t); };
  return ts.integrate(g, 0.0, 1.0) + es.integrate(g, 1.0, std::numeric_limits<double>::infinity());
}

// The t^alpha start of the solution concentrates the scheme error in the first
// steps when alpha is small; compare from t0 on.
double sup_after(const TransitionGrid& a, const TransitionGrid& b, double t0) {
  double e = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n)
    if (a.times[n] >= t0) e = std::max(e, (a.values[n] - b.values[n]).cwiseAbs().maxCoeff());
  return e;
}

}  // namespace

TEST_CASE("random models give stochastic transition matrices", "[properties]") {
  std::mt19937_64 rng(20261016);
  const auto cfg = DiscretizationConfig::for_horizon(0.5, 5e-3);
  for (int trial = 0; trial < 12; ++trial) {
    const auto m = random_model(rng);
    INFO("trial " << trial << " n = " << m.n_states());
    REQUIRE(validate_model(m).empty());
    const auto renewal = solve_renewal(m, cfg);
    const auto caputo = solve_backward_caputo(m, cfg);
    const auto fwd = solve_forward_rl(m, cfg);
    CHECK(check_grid(renewal).empty());
    CHECK(check_grid(caputo).empty());
    CHECK(check_grid(fwd).empty());
    const auto ref = invert_laplace_matrix(model_laplace_transform(m), renewal.times);
    CHECK(sup_after(renewal, ref, 0.1) < 2e-3);
    CHECK(sup_after(fwd, ref, 0.1) < 2e-3);
    CHECK(sup_after(caputo, ref, 0.1) < 2e-3);
  }
}

TEST_CASE("Monte Carlo rows are probability vectors", "[properties]") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = random_model(rng);
    const std::vector<double> times{0.3, 1.0};
    const auto g = monte_carlo_grid(m, times, 500, RngSpec{static_cast<std::uint64_t>(trial), 0}, 2);
    for (const auto& p : g.values) {
      CHECK(p.minCoeff() >= 0.0);
      CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("potential densities invert the Laplace exponent", "[properties]") {
  for (double a : {0.3, 0.5, 0.8}) {
    const auto u = potential_density(HoldingLaw{MittagLefflerLaw{a, 1.0}});
    const auto tp = tempered_stable_law(a, 0.7);
    for (double s : {0.5, 1.0, 2.0, 5.0}) {
      CHECK(std::abs(laplace_of(u, s) * std::pow(s, a) - 1.0) < 1e-8);
      const double f = tp.laplace_exponent(Complex(s, 0.0)).real();
      CHECK(std::abs(laplace_of(tp.potential_density, s) * f - 1.0) < 1e-6);
    }
  }
}
