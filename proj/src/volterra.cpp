#include <sstream>

#include "semimarkov/errors.hpp"
#include "semimarkov/solvers.hpp"
#include "solver_detail.hpp"

namespace semimarkov {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

KernelPrimitives tail_primitives(const HoldingLaw& law, int state, double h, int steps) {
  if (std::holds_alternative<ExponentialLaw>(law)) return power_kernel_primitives(0.0, h, steps);
  if (const auto* ml = std::get_if<MittagLefflerLaw>(&law)) return power_kernel_primitives(1.0 - ml->alpha, h, steps);
  const auto& g = std::get<GeneralSubordinatedLaw>(law);
  if (!g.levy_tail) throw ValidationError("solve_backward_volterra: state " + std::to_string(state) + " has no Levy tail");
  return numeric_kernel_primitives(g.levy_tail, h, steps);
}

}  // namespace

TransitionGrid solve_backward_volterra(const SemiMarkovModel& model, const DiscretizationConfig& cfg) {
  validate(cfg);
  const MatrixXd g = build_generator(model).g;
  const int n = model.n_states();
  const int steps = cfg.n_steps;
  const double h = cfg.dt;
  // int_0^t (p - I) nu-bar(t - s) ds = G int_0^t p, trapezoid on the right
  MatrixXd c(n, steps + 1);
  for (int i = 0; i < n; ++i) {
    const auto w = convolution_weights(tail_primitives(model.holding_laws[static_cast<std::size_t>(i)], i, h, steps));
    for (int m = 0; m <= steps; ++m) c(i, m) = w.lag[static_cast<std::size_t>(m)];
  }
  TransitionGrid grid;
  grid.provenance = Provenance::BackwardVolterra;
  grid.row_sum_tolerance = 1e-9;
  grid.times = uniform_times(h, steps);
  grid.values.push_back(MatrixXd::Identity(n, n));
  const VectorXd c0 = c.col(0);
  Eigen::PartialPivLU<MatrixXd> lu(MatrixXd(c0.asDiagonal()) - 0.5 * h * g);
  if (!(lu.rcond() > 1e-14)) throw NumericError("solve_backward_volterra: step matrix is singular at step 1");
  const MatrixXd id = MatrixXd::Identity(n, n);
  const MatrixXd half_g0 = 0.5 * h * g;
  MatrixXd sum_gp = MatrixXd::Zero(n, n);  // sum_{k=1}^{n-1} G P^k
  MatrixXd rhs(n, n);
  for (int s = 1; s <= steps; ++s) {
    rhs = MatrixXd(c0.asDiagonal()) + half_g0 + h * sum_gp;
    for (int m = 1; m < s; ++m) {
      rhs.noalias() -= c.col(m).asDiagonal() * (grid.values[static_cast<std::size_t>(s - m)] - id);
    }
    MatrixXd p = lu.solve(rhs);
    if (!p.allFinite()) {
      std::ostringstream os;
      os << "solve_backward_volterra: non-finite solution at step " << s;
      throw NumericError(os.str());
    }
    sum_gp.noalias() += g * p;
    grid.values.push_back(std::move(p));
  }
  return grid;
}

TransitionGrid solve_forward_volterra(const SemiMarkovModel& model, const DiscretizationConfig& cfg) {
  validate(cfg);
  const MatrixXd g = build_generator(model).g;
  detail::check_forward_hypothesis(model, "solve_forward_volterra");
  std::vector<ConvolutionWeights> w;
  for (const auto& law : model.holding_laws) {
    w.push_back(convolution_weights(numeric_kernel_primitives(potential_density(law), cfg.dt, cfg.n_steps)));
  }
  return detail::forward_integral_form(g, w, cfg, Provenance::ForwardVolterra);
}

}  // namespace semimarkov
