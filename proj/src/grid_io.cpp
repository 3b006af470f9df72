#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "semimarkov/errors.hpp"
#include "semimarkov/grid.hpp"

namespace semimarkov {

namespace {

constexpr std::pair<Provenance, std::string_view> kNames[] = {
    {Provenance::Renewal, "Renewal"},
    {Provenance::BackwardCaputo, "BackwardCaputo"},
    {Provenance::ForwardRL, "ForwardRL"},
    {Provenance::LaplaceInversion, "LaplaceInversion"},
    {Provenance::BackwardVolterra, "BackwardVolterra"},
    {Provenance::ForwardVolterra, "ForwardVolterra"},
    {Provenance::MonteCarlo, "MonteCarlo"},
    {Provenance::MatrixExponential, "MatrixExponential"},
};

}  // namespace

std::string_view to_string(Provenance p) {
  for (const auto& [k, v] : kNames)
    if (k == p) return v;
  return "Unknown";
}

Provenance provenance_from_string(std::string_view name) {
  for (const auto& [k, v] : kNames)
    if (v == name) return k;
  throw ValidationError("unknown solution method '" + std::string(name) + "'");
}

std::vector<double> uniform_times(double dt, int n_steps) {
  if (!(dt > 0.0) || n_steps < 0) throw DomainError("uniform_times: need dt > 0 and n_steps >= 0");
  std::vector<double> t(static_cast<std::size_t>(n_steps) + 1);
  for (int n = 0; n <= n_steps; ++n) t[static_cast<std::size_t>(n)] = n * dt;
  return t;
}

std::vector<Violation> check_grid(const TransitionGrid& grid) {
  std::vector<Violation> out;
  if (grid.times.empty() || grid.times.size() != grid.values.size()) {
    out.push_back({"values", "one-matrix-per-time", ""});
    return out;
  }
  if (grid.times.front() != 0.0) out.push_back({"times", "starts-at-0", ""});
  if (grid.times.size() > 1) {
    const double dt = grid.times[1] - grid.times[0];
    for (std::size_t n = 1; n < grid.times.size(); ++n) {
      const double step = grid.times[n] - grid.times[n - 1];
      if (!(step > 0.0) || std::abs(step - dt) > 1e-9 * std::max(1.0, grid.times[n])) {
        out.push_back({"times", "uniform", "step " + std::to_string(n)});
        break;
      }
    }
  }
  const Eigen::MatrixXd& p0 = grid.values.front();
  if (p0.rows() == p0.cols() &&
      (p0 - Eigen::MatrixXd::Identity(p0.rows(), p0.cols())).cwiseAbs().maxCoeff() > 1e-12) {
    out.push_back({"values[0]", "identity-at-0", ""});
  }
  for (std::size_t n = 0; n < grid.values.size(); ++n) {
    const auto& p = grid.values[n];
    if (p.minCoeff() < -1e-6 || p.maxCoeff() > 1.0 + 1e-6) {
      out.push_back({"values[" + std::to_string(n) + "]", "entries-in-[0,1]", ""});
      break;
    }
    const double drift = (p.rowwise().sum().array() - 1.0).abs().maxCoeff();
    if (p.rows() == p.cols() && drift > grid.row_sum_tolerance) {
      std::ostringstream os;
      os << "drift " << drift << " > " << grid.row_sum_tolerance;
      out.push_back({"values[" + std::to_string(n) + "]", "row-sums", os.str()});
      break;
    }
  }
  return out;
}

double sup_distance(const TransitionGrid& a, const TransitionGrid& b) {
  if (a.times.size() != b.times.size()) throw ValidationError("sup_distance: grids differ in length");
  double d = 0.0;
  for (std::size_t n = 0; n < a.times.size(); ++n) {
    if (std::abs(a.times[n] - b.times[n]) > 1e-9 * std::max(1.0, a.times[n])) {
      throw ValidationError("sup_distance: grids have different times");
    }
    d = std::max(d, (a.values[n] - b.values[n]).cwiseAbs().maxCoeff());
  }
  return d;
}

void write_grid_csv(std::ostream& os, const TransitionGrid& grid) {
  os << "t,i,j,p\n" << std::setprecision(17);
  for (std::size_t n = 0; n < grid.times.size(); ++n) {
    const auto& p = grid.values[n];
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      for (Eigen::Index j = 0; j < p.cols(); ++j) os << grid.times[n] << ',' << i << ',' << j << ',' << p(i, j) << '\n';
  }
}

int PathSample::state_at(double t) const {
  if (states.empty()) throw ValidationError("PathSample::state_at: empty path");
  // last record with T_k <= t
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - jump_times.begin()) - 1));
  return states[k];
}

std::vector<Violation> check_path(const PathSample& path, int n_states) {
  std::vector<Violation> out;
  if (path.states.size() != path.jump_times.size()) out.push_back({"states", "same-length-as-jump_times", ""});
  if (path.holding_times.size() + 1 != path.states.size()) out.push_back({"holding_times", "length", ""});
  if (!path.jump_times.empty() && path.jump_times.front() != 0.0) out.push_back({"jump_times", "starts-at-0", ""});
  for (std::size_t k = 1; k < path.jump_times.size(); ++k) {
    if (!(path.jump_times[k] > path.jump_times[k - 1])) {
      out.push_back({"jump_times", "strictly-increasing", "record " + std::to_string(k)});
      break;
    }
  }
  for (int s : path.states) {
    if (s < 0 || s >= n_states) {
      out.push_back({"states", "in-range", ""});
      break;
    }
  }
  return out;
}

}  // namespace semimarkov
