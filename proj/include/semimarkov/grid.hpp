#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "semimarkov/process.hpp"

namespace semimarkov {

enum class Provenance {
  Renewal,
  BackwardCaputo,
  ForwardRL,
  LaplaceInversion,
  BackwardVolterra,
  ForwardVolterra,
  MonteCarlo,
  MatrixExponential,
};

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view name);

/// p_ij(t_n) on a uniform grid t_0 = 0 < ... < t_N.
struct TransitionGrid {
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> values;
  Provenance provenance = Provenance::Renewal;
  double row_sum_tolerance = 1e-12;   ///< declared by the producer
  std::vector<Eigen::MatrixXd> std_errors;  ///< Monte Carlo only

  std::size_t size() const { return times.size(); }
  int n_states() const { return values.empty() ? 0 : static_cast<int>(values.front().rows()); }
};

/// Checks P(0) = I, entries in [-1e-6, 1 + 1e-6], row sums within the
/// declared tolerance and a uniform time grid.
std::vector<Violation> check_grid(const TransitionGrid& grid);

/// max_n max_ij |a - b| over a shared time grid (rows compared: those present in both).
double sup_distance(const TransitionGrid& a, const TransitionGrid& b);

/// Uniform grid 0, dt, ..., n dt.
std::vector<double> uniform_times(double dt, int n_steps);

/// CSV with header `t,i,j,p`, row-major over (t, i, j), 17 significant digits.
void write_grid_csv(std::ostream& os, const TransitionGrid& grid);

/// One CTRW trajectory. The last record is the first jump beyond t_max,
/// unless the path was absorbed.
struct PathSample {
  std::vector<double> jump_times;
  std::vector<int> states;
  std::vector<double> holding_times;  ///< J_k = T_{k+1} - T_k, size = states.size() - 1
  bool absorbed = false;
  bool hit_boundary = false;

  /// State occupied at time t (t >= 0).
  int state_at(double t) const;
};

std::vector<Violation> check_path(const PathSample& path, int n_states);

}  // namespace semimarkov
