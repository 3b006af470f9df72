#include <catch_amalgamated.hpp>

#include "semimarkov/laplace.hpp"
#include "semimarkov/solvers.hpp"

using namespace semimarkov;

namespace {

Eigen::MatrixXd chain() {
  Eigen::MatrixXd h(3, 3);
  h << 0, 0.3, 0.7, 0.5, 0, 0.5, 0.6, 0.4, 0;
  return h;
}

}  // namespace

TEST_CASE("stable-subordinator kernels reproduce the fractional solvers", "[volterra]") {
  const auto ml = ml_model(chain(), Eigen::Vector3d(1.0, 1.0, 1.0), {0.5, 0.7, 0.9});
  auto st = ml;
  for (int i = 0; i < 3; ++i) st.holding_laws[static_cast<std::size_t>(i)] = stable_subordinator_law(fractional_order(ml.holding_laws[static_cast<std::size_t>(i)]));
  const auto cfg = DiscretizationConfig::for_horizon(1.0, 2e-3);
  const auto bv = solve_backward_volterra(st, cfg);
  const auto fv = solve_forward_volterra(st, cfg);
  CHECK(check_grid(bv).empty());
  CHECK(check_grid(fv).empty());
  CHECK(sup_distance(bv, solve_backward_caputo(ml, cfg)) < 5e-3);
  CHECK(sup_distance(fv, solve_forward_rl(ml, cfg)) < 1e-2);
}

TEST_CASE("tempered-stable kernels agree with Laplace inversion", "[volterra]") {
  SemiMarkovModel m;
  m.embedded_chain = chain();
  m.rates = Eigen::Vector3d(1.0, 1.0, 1.0);
  m.holding_laws = {tempered_stable_law(0.6, 1.0), tempered_stable_law(0.8, 0.5), stable_subordinator_law(0.7)};
  const auto cfg = DiscretizationConfig::for_horizon(1.0, 2e-3);
  const auto bv = solve_backward_volterra(m, cfg);
  const auto fv = solve_forward_volterra(m, cfg);
  const auto ref = invert_laplace_matrix(model_laplace_transform(m), bv.times);
  CHECK(sup_distance(bv, ref) < 1e-2);
  CHECK(sup_distance(fv, ref) < 1e-2);
  CHECK(bv.provenance == Provenance::BackwardVolterra);
  CHECK(fv.provenance == Provenance::ForwardVolterra);
}

TEST_CASE("Volterra solvers handle mixed laws", "[volterra]") {
  SemiMarkovModel m = ml_model(chain(), Eigen::Vector3d(1.0, 2.0, 0.5), {0.5, 1.0, 0.9});
  const auto cfg = DiscretizationConfig::for_horizon(1.0, 1e-3);
  const auto ref = solve_renewal(m, cfg);
  CHECK(sup_distance(solve_backward_volterra(m, cfg), ref) < 1e-2);
  CHECK(sup_distance(solve_forward_volterra(m, cfg), ref) < 1e-3);
}
