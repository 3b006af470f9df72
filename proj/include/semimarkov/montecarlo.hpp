#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "semimarkov/grid.hpp"
#include "semimarkov/process.hpp"

namespace semimarkov {

struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// Independent Mersenne-Twister stream for one path, seeded from
/// (seed, stream_id, path_index) through std::seed_seq.
class PathRng {
 public:
  PathRng(const RngSpec& spec, std::uint64_t path_index);

  /// 53-bit uniform on the open interval (0, 1).
  double uniform();
  double exponential(double rate);
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// One draw of H_alpha(t), E exp(-s H) = exp(-t s^alpha) (Kanter's representation).
double sample_stable_subordinator(double alpha, double t, PathRng& rng);
/// Mittag-Leffler waiting time E^{1/alpha} H_alpha(1), E ~ Exp(lambda); exponential at alpha = 1.
double sample_ml_waiting(double alpha, double lambda, PathRng& rng);

/// Semi-Markov trajectory from `start`: holding draw from the current state's
/// law, then a categorical jump from row h. Stops after the first jump
/// beyond t_max or on entering an absorbing state.
PathSample simulate_ctrw(const SemiMarkovModel& model, int start, double t_max, PathRng& rng);

/// Markov path with exponential clocks E_n, then jump epochs
/// tau_n = sigma^M(V_n) built from piecewise-stable increments H_{alpha_{X_n}}(E_n).
/// Exponential laws act as alpha = 1 (H(t) = t); general laws are rejected.
PathSample simulate_time_changed(const SemiMarkovModel& model, int start, double t_max, PathRng& rng);

/// Diagnostic view of the piecewise-stable subordinator sigma^M along one
/// Markov path: values at the breakpoints V_n plus a refinement grid of
/// spacing `refine_dt` in the operational time.
struct SubordinatorPath {
  std::vector<double> breakpoints;          ///< V_0 = 0 < V_1 < ...
  std::vector<double> segment_alpha;        ///< alpha of X_n on [V_n, V_{n+1})
  std::vector<double> sigma_at_breakpoints; ///< sigma^M(V_n)
  std::vector<double> grid;                 ///< refinement points
  std::vector<double> sigma;                ///< sigma^M on the refinement grid
};

SubordinatorPath sample_subordinator_path(const SemiMarkovModel& model, int start, double v_max,
                                          double refine_dt, PathRng& rng);

struct Estimate {
  double value;
  double std_error;
};

/// Fraction of paths in each state at time t; all paths must start in `i`.
std::vector<Estimate> empirical_transition(std::span<const PathSample> paths, double t, int i,
                                           int n_states);

enum class Sampler { Ctrw, TimeChanged };

/// Occupation counts at sorted times from n_paths independent paths; paths
/// are never stored. Results do not depend on `threads`.
struct OccupationCounts {
  std::vector<double> times;
  std::vector<std::vector<std::int64_t>> counts;  ///< [time][state]
  std::int64_t n_paths = 0;
  std::int64_t boundary_hits = 0;
};

OccupationCounts simulate_occupation(const SemiMarkovModel& model, int start, std::span<const double> times,
                                     std::int64_t n_paths, const RngSpec& rng, int threads = 1,
                                     Sampler sampler = Sampler::Ctrw);

/// Empirical TransitionGrid (all starting states) with standard errors.
TransitionGrid monte_carlo_grid(const SemiMarkovModel& model, std::span<const double> times,
                                std::int64_t n_paths, const RngSpec& rng, int threads = 1,
                                Sampler sampler = Sampler::Ctrw);

/// Path dump, header `path_id,n,state,T_n,J_n` (J_n empty on the last record).
void write_paths_csv(std::ostream& os, std::span<const PathSample> paths);

}  // namespace semimarkov
