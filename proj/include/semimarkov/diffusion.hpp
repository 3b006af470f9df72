#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "semimarkov/montecarlo.hpp"
#include "semimarkov/process.hpp"
#include "semimarkov/solvers.hpp"

namespace semimarkov {

enum class Boundary { Reflecting, Absorbing };

/// Nodes x_j = x_min + j eps, j = 0..(x_max - x_min)/eps.
struct LatticeSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  double epsilon = 0.1;
  std::function<double(double)> alpha_fn = [](double) { return 1.0; };
  std::function<double(double)> k_fn = [](double) { return 1.0; };
  Boundary boundary = Boundary::Reflecting;
  /// Time discretization of RL-D^{1-alpha} in the forward solver.
  ForwardScheme time_scheme = ForwardScheme::GrunwaldLetnikov;

  int n_nodes() const;
  double node(int j) const { return x_min + j * epsilon; }
  /// Index of the node at x; DomainError when x is not on the lattice.
  int node_index(double x) const;
};

void validate(const LatticeSpec& spec);

/// Nearest-neighbour walk: h_{i,i+-1} = 1/2 inside, lambda_i = k(x_i)/eps^2,
/// Mittag-Leffler law of order alpha(x_i) (Exponential where alpha = 1).
/// Reflecting edges jump to their single neighbour with probability 1;
/// absorbing edges are cemetery states (h_ii = 1).
SemiMarkovModel lattice_model(const LatticeSpec& spec);

/// p(x0, y, t) (forward, free variable y) or p(x, y0, t) (backward, free x),
/// stored as a density: probability / eps.
struct DensityGrid {
  enum class Direction { Forward, Backward };
  Direction direction = Direction::Forward;
  double anchor = 0.0;  ///< x0 or y0
  double epsilon = 0.0;
  std::vector<double> x;
  std::vector<double> t;
  std::vector<std::vector<double>> values;  ///< [time][node]
  std::vector<double> mass;                 ///< sum p eps over live nodes
  std::vector<double> absorbed;             ///< mass in cemetery nodes (forward, absorbing)
  double min_value = 0.0;
  bool negative = false;                    ///< some value below -1e-8
};

/// d/dt p_j = (1/(2 eps^2)) [u_{j-1} + u_{j+1} - 2 u_j], u_j = k(y_j) RL-D^{1-alpha(y_j)} p_j,
/// written as the chain forward equation for row x0 and stepped with
/// spec.time_scheme (tridiagonal solve per step). cfg supplies dt and n_steps.
DensityGrid solve_vo_heat_forward(const LatticeSpec& spec, double source, const DiscretizationConfig& cfg);

/// D_t^{alpha(x)} p = (k(x)/2) d^2p/dx^2 for column y0, Caputo scheme from
/// cfg.scheme_backward.
DensityGrid solve_vo_heat_backward(const LatticeSpec& spec, double target, const DiscretizationConfig& cfg);

/// Heat kernel of dp/dt = (k/2) p'' on the whole line.
double gaussian_kernel(double x, double t, double k = 1.0);

enum class ScalingReference { Pde, Gaussian };

struct ScalingConfig {
  std::function<double(double)> alpha_fn = [](double) { return 1.0; };
  std::function<double(double)> k_fn = [](double) { return 1.0; };
  std::vector<double> eps_list{0.2, 0.1, 0.05};
  double t_eval = 1.0;
  double source = 0.0;
  double half_width = 6.0;   ///< reflecting domain [source - w, source + w]
  std::int64_t n_paths = 100000;
  RngSpec rng{};
  int threads = 1;
  ScalingReference reference = ScalingReference::Pde;
  int reference_refine = 5;  ///< reference lattice spacing = min(eps) / refine
  double dt = 1e-3;
};

struct ScalingPoint {
  double epsilon = 0.0;
  double l1_distance = 0.0;
  double mc_se = 0.0;  ///< sum over cells of sqrt(p(1-p)/N)
};

struct ScalingReport {
  std::vector<ScalingPoint> points;
  bool monotone = true;  ///< L1 non-increasing up to 2 MC standard errors
  double final_l1() const { return points.empty() ? 0.0 : points.back().l1_distance; }
};

/// For each eps: simulate the lattice CTRW from the source, histogram at
/// t_eval on the lattice cells [x_j - eps/2, x_j + eps/2] and compare with the
/// reference cell masses (fine-lattice VO-heat solution, or the Gaussian
/// kernel with k = k(source)).
ScalingReport scaling_limit_experiment(const ScalingConfig& cfg);

struct MassSeries {
  std::vector<double> t;
  std::vector<double> mass;
  /// Mass at the stored time nearest to t.
  double at(double time) const;
};

/// M(t) = sum_j |cell_j n [a, b]| p_j over live nodes; an endpoint at or past an
/// edge node covers that node's whole cell.
MassSeries aggregation_diagnostic(const DensityGrid& grid, double region_lo, double region_hi);

/// Header `t,y,p`; every `stride`-th time slice.
void write_density_csv(std::ostream& os, const DensityGrid& grid, int stride = 1);
std::string scaling_report_json(const ScalingReport& report);

}  // namespace semimarkov
