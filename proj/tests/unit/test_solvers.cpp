#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "semimarkov/errors.hpp"
#include "semimarkov/laplace.hpp"
#include "semimarkov/montecarlo.hpp"
#include "semimarkov/solvers.hpp"

using namespace semimarkov;
using Catch::Matchers::WithinRel;

namespace {

Eigen::MatrixXd chain() {
  Eigen::MatrixXd h(3, 3);
  h << 0, 0.3, 0.7, 0.5, 0, 0.5, 0.6, 0.4, 0;
  return h;
}

SemiMarkovModel three_state() { return ml_model(chain(), Eigen::Vector3d(1.0, 2.0, 0.5), {0.5, 0.7, 0.9}); }

TransitionGrid laplace_on(const SemiMarkovModel& m, const TransitionGrid& like) {
  auto g = invert_laplace_matrix(model_laplace_transform(m), like.times);
  return g;
}

}  // namespace

TEST_CASE("every solver reduces to exp(tG) for exponential holding times", "[solvers]") {
  const auto m = exponential_model(chain(), Eigen::Vector3d(1.0, 2.0, 0.5));
  const auto cfg = DiscretizationConfig::for_horizon(2.0, 1e-3);
  const auto ref = matrix_exponential_grid(m, uniform_times(cfg.dt, cfg.n_steps));
  CHECK(sup_distance(solve_renewal(m, cfg), ref) < 1e-6);
  CHECK(sup_distance(solve_backward_caputo(m, cfg), ref) < 1e-6);
  CHECK(sup_distance(solve_forward_rl(m, cfg), ref) < 1e-6);
  CHECK(sup_distance(solve_backward_volterra(m, cfg), ref) < 1e-6);
  CHECK(sup_distance(solve_forward_volterra(m, cfg), ref) < 1e-6);
  CHECK(sup_distance(laplace_on(m, ref), ref) < 1e-9);
}

TEST_CASE("fractional solvers agree with Laplace inversion", "[solvers]") {
  const auto m = three_state();
  const auto cfg = DiscretizationConfig::for_horizon(2.0, 1e-3);
  const auto renewal = solve_renewal(m, cfg);
  const auto ref = laplace_on(m, renewal);
  CHECK(check_grid(renewal).empty());
  CHECK(sup_distance(renewal, ref) < 1e-4);
  const auto caputo = solve_backward_caputo(m, cfg);
  CHECK(check_grid(caputo).empty());
  CHECK(sup_distance(caputo, ref) < 5e-3);
  const auto fwd = solve_forward_rl(m, cfg);
  CHECK(check_grid(fwd).empty());
  CHECK(sup_distance(fwd, ref) < 1e-3);

  auto alt = cfg;
  alt.scheme_backward = BackwardScheme::L1Caputo;
  alt.scheme_forward = ForwardScheme::GrunwaldLetnikov;
  CHECK(sup_distance(solve_backward_caputo(m, alt), ref) < 1e-2);
  CHECK(sup_distance(solve_forward_rl(m, alt), ref) < 5e-2);
}

TEST_CASE("schemes converge as the step shrinks", "[solvers]") {
  const auto m = three_state();
  double prev = 1.0;
  for (double dt : {1e-2, 5e-3, 2.5e-3}) {
    const auto g = solve_renewal(m, DiscretizationConfig::for_horizon(1.0, dt));
    const double e = sup_distance(g, laplace_on(m, g));
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("solver hypotheses are enforced", "[solvers]") {
  auto m = three_state();
  const auto cfg = DiscretizationConfig::for_horizon(0.1, 1e-2);
  const std::vector<double> times{0.1};
  CHECK_THROWS_AS(matrix_exponential_grid(m, times), HypothesisError);

  auto diag = m;
  diag.diagonal_jumps_allowed = true;
  diag.embedded_chain(0, 0) = 0.3;
  diag.embedded_chain(0, 1) = 0.0;
  CHECK_THROWS_AS(solve_forward_rl(diag, cfg), HypothesisError);
  CHECK_NOTHROW(solve_backward_caputo(diag, cfg));

  auto gen = m;
  gen.rates[0] = 1.0;
  gen.holding_laws[0] = stable_subordinator_law(0.5);
  CHECK_THROWS_AS(solve_renewal(gen, cfg), HypothesisError);
  CHECK_THROWS_AS(solve_backward_caputo(gen, cfg), HypothesisError);
  CHECK_THROWS_AS(solve_forward_rl(gen, cfg), HypothesisError);

  DiscretizationConfig bad;
  bad.dt = -1.0;
  CHECK_THROWS_AS(validate(bad), ValidationError);
}

TEST_CASE("gain and loss fluxes balance the forward solution", "[solvers]") {
  const auto m = three_state();
  const auto cfg = DiscretizationConfig::for_horizon(1.0, 1e-3);
  const auto fwd = solve_forward_rl(m, cfg);
  const auto flux = outgoing_flux(fwd, m);
  CHECK(flux.times.size() == static_cast<std::size_t>(cfg.n_steps));
  CHECK(flux.balance_residual < 1e-6);
  for (const auto& j : flux.outgoing) CHECK(j.minCoeff() >= -1e-9);
  // total flux is conserved: sum_i (J+_i - J-_i) = 0 on every row
  for (std::size_t n = 0; n < flux.times.size(); ++n) {
    CHECK(((flux.incoming[n] - flux.outgoing[n]).rowwise().sum()).cwiseAbs().maxCoeff() < 1e-9);
  }
  const std::vector<double> times{0.5, 1.0};
  const auto mc = monte_carlo_grid(m, times, 10, RngSpec{}, 1);
  CHECK_THROWS_AS(outgoing_flux(mc, m), ValidationError);
}

TEST_CASE("renewal density of a Mittag-Leffler state", "[solvers]") {
  Eigen::MatrixXd h(2, 2);
  h << 0, 1, 1, 0;
  const auto m = ml_model(h, Eigen::Vector2d(1.0, 3.0), {0.5, 1.0});
  CHECK_THAT(renewal_density(m, 0, 1.0), WithinRel(1.0 / std::sqrt(std::numbers::pi), 1e-13));
  CHECK_THAT(renewal_density(m, 0, 4.0), WithinRel(0.5 / std::sqrt(std::numbers::pi), 1e-13));
  CHECK_THAT(renewal_density(m, 1, 2.0), WithinRel(3.0, 1e-14));
  GeneralSubordinatedLaw bare;
  bare.laplace_exponent = [](Complex s) { return std::sqrt(s); };
  bare.levy_tail = [](double t) { return 1.0 / std::sqrt(std::numbers::pi * t); };
  CHECK_THROWS_AS(potential_density(bare), ValidationError);
}
