#include "semimarkov/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "semimarkov/errors.hpp"

namespace semimarkov {

namespace {

constexpr double kPi = std::numbers::pi;

std::seed_seq make_seed(const RngSpec& spec, std::uint64_t path_index) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  return std::seed_seq{lo(spec.seed), hi(spec.seed), lo(spec.stream_id), hi(spec.stream_id),
                       lo(path_index), hi(path_index)};
}

// Everything a walker needs, precomputed once per model.
struct Prepared {
  struct Row {
    std::vector<int> target;
    std::vector<double> cum;
    bool absorbing = false;
  };
  enum class Kind { Exponential, MittagLeffler, General };
  std::vector<Row> rows;
  std::vector<Kind> kind;
  std::vector<double> alpha;
  std::vector<double> rate;

  explicit Prepared(const SemiMarkovModel& m) {
    require_valid(m);
    const int n = m.n_states();
    rows.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      auto& r = rows[static_cast<std::size_t>(i)];
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p = m.embedded_chain(i, j);
        if (p > 0.0) {
          acc += p;
          r.target.push_back(j);
          r.cum.push_back(acc);
        }
      }
      r.cum.back() = 1.0;
      r.absorbing = m.embedded_chain(i, i) == 1.0;
      const auto& law = m.holding_laws[static_cast<std::size_t>(i)];
      rate.push_back(m.rates[i]);
      if (std::holds_alternative<ExponentialLaw>(law)) {
        kind.push_back(Kind::Exponential);
        alpha.push_back(1.0);
      } else if (const auto* ml = std::get_if<MittagLefflerLaw>(&law)) {
        kind.push_back(Kind::MittagLeffler);
        alpha.push_back(ml->alpha);
      } else {
        kind.push_back(Kind::General);
        alpha.push_back(std::nan(""));
      }
    }
  }

  void check_state(int s) const {
    if (s < 0 || s >= static_cast<int>(rows.size())) throw DomainError("start state out of range");
  }

  int jump(int x, PathRng& rng) const {
    const auto& r = rows[static_cast<std::size_t>(x)];
    if (r.target.size() == 1) return r.target.front();
    const double u = rng.uniform();
    const auto it = std::upper_bound(r.cum.begin(), r.cum.end(), u);
    return r.target[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - r.cum.begin(),
                                                                       static_cast<std::ptrdiff_t>(r.cum.size()) - 1))];
  }

  double holding(int x, PathRng& rng) const {
    const auto k = static_cast<std::size_t>(x);
    switch (kind[k]) {
      case Kind::Exponential: return rng.exponential(rate[k]);
      case Kind::MittagLeffler: return sample_ml_waiting(alpha[k], rate[k], rng);
      case Kind::General: break;
    }
    throw DomainError("simulate: no exact sampler for general subordinated holding laws");
  }

  // sigma^M increment over an exponential clock of state x
  double time_changed_holding(int x, PathRng& rng) const {
    const auto k = static_cast<std::size_t>(x);
    if (kind[k] == Kind::General) {
      throw HypothesisError("simulate_time_changed: every holding law must be Mittag-Leffler");
    }
    const double e = rng.exponential(rate[k]);
    return kind[k] == Kind::Exponential ? e : sample_stable_subordinator(alpha[k], e, rng);
  }
};

double advance(double t, double j) {
  const double next = t + j;
  return next > t ? next : std::nextafter(t, std::numeric_limits<double>::infinity());
}

// Calls visit(T_k, X_k, J_{k-1}) for each record; returns true if absorbed.
template <class Visit>
bool walk(const Prepared& prep, int start, double t_max, PathRng& rng, Sampler sampler, Visit&& visit) {
  int x = start;
  double t = 0.0;
  visit(0.0, x, 0.0);
  for (;;) {
    if (prep.rows[static_cast<std::size_t>(x)].absorbing) return true;
    const double j = sampler == Sampler::Ctrw ? prep.holding(x, rng) : prep.time_changed_holding(x, rng);
    t = advance(t, j);
    x = prep.jump(x, rng);
    visit(t, x, j);
    if (t > t_max) return false;
  }
}

PathSample simulate_path(const SemiMarkovModel& model, int start, double t_max, PathRng& rng,
                         Sampler sampler) {
  const Prepared prep(model);
  prep.check_state(start);
  if (!(t_max > 0.0)) throw DomainError("simulate: need t_max > 0");
  PathSample path;
  const bool absorbed = walk(prep, start, t_max, rng, sampler, [&](double t, int x, double j) {
    if (!path.states.empty()) path.holding_times.push_back(j);
    path.jump_times.push_back(t);
    path.states.push_back(x);
    if (prep.rows[static_cast<std::size_t>(x)].absorbing) path.hit_boundary = true;
  });
  path.absorbed = absorbed;
  return path;
}

}  // namespace

PathRng::PathRng(const RngSpec& spec, std::uint64_t path_index) {
  auto seq = make_seed(spec, path_index);
  engine_.seed(seq);
}

double PathRng::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double PathRng::exponential(double rate) { return -std::log(uniform()) / rate; }

double sample_stable_subordinator(double alpha, double t, PathRng& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("sample_stable_subordinator: need 0 < alpha < 1");
  if (!(t > 0.0)) throw DomainError("sample_stable_subordinator: need t > 0");
  const double u = kPi * rng.uniform();
  const double w = rng.exponential(1.0);
  // S = sin(aU)/sin(U)^{1/a} * (sin((1-a)U)/W)^{(1-a)/a}
  const double log_s = std::log(std::sin(alpha * u)) - std::log(std::sin(u)) / alpha +
                       (1.0 - alpha) / alpha * (std::log(std::sin((1.0 - alpha) * u)) - std::log(w));
  return std::exp(log_s + std::log(t) / alpha);
}

double sample_ml_waiting(double alpha, double lambda, PathRng& rng) {
  if (!(alpha > 0.0 && alpha <= 1.0) || !(lambda > 0.0)) {
    throw DomainError("sample_ml_waiting: need 0 < alpha <= 1 and lambda > 0");
  }
  const double e = rng.exponential(lambda);
  if (alpha == 1.0) return e;
  return std::pow(e, 1.0 / alpha) * sample_stable_subordinator(alpha, 1.0, rng);
}

PathSample simulate_ctrw(const SemiMarkovModel& model, int start, double t_max, PathRng& rng) {
  return simulate_path(model, start, t_max, rng, Sampler::Ctrw);
}

PathSample simulate_time_changed(const SemiMarkovModel& model, int start, double t_max, PathRng& rng) {
  for (const auto& law : model.holding_laws) {
    if (is_general(law)) throw HypothesisError("simulate_time_changed: every holding law must be Mittag-Leffler");
  }
  return simulate_path(model, start, t_max, rng, Sampler::TimeChanged);
}

SubordinatorPath sample_subordinator_path(const SemiMarkovModel& model, int start, double v_max,
                                          double refine_dt, PathRng& rng) {
  const Prepared prep(model);
  prep.check_state(start);
  if (!(v_max > 0.0) || !(refine_dt > 0.0)) throw DomainError("sample_subordinator_path: need v_max, refine_dt > 0");
  SubordinatorPath out;
  int x = start;
  double v = 0.0, sigma = 0.0;
  out.grid.push_back(0.0);
  out.sigma.push_back(0.0);
  while (v < v_max) {
    const auto k = static_cast<std::size_t>(x);
    if (prep.kind[k] == Prepared::Kind::General) {
      throw HypothesisError("sample_subordinator_path: every holding law must be Mittag-Leffler");
    }
    out.breakpoints.push_back(v);
    out.segment_alpha.push_back(prep.alpha[k]);
    out.sigma_at_breakpoints.push_back(sigma);
    const double e = prep.rows[k].absorbing ? v_max - v : rng.exponential(prep.rate[k]);
    const double end = std::min(v + e, v_max);
    // independent stable increments on the refinement of [v, end)
    double a = v;
    while (a < end) {
      const double b = std::min(a + refine_dt, end);
      const double inc = prep.alpha[k] == 1.0 ? b - a : sample_stable_subordinator(prep.alpha[k], b - a, rng);
      sigma += inc;
      out.grid.push_back(b);
      out.sigma.push_back(sigma);
      a = b;
    }
    v = v + e;
    if (prep.rows[k].absorbing) break;
    x = prep.jump(x, rng);
  }
  return out;
}

std::vector<Estimate> empirical_transition(std::span<const PathSample> paths, double t, int i, int n_states) {
  if (paths.empty()) throw DomainError("empirical_transition: empty path collection");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n_states), 0);
  for (const auto& p : paths) {
    if (p.states.empty() || p.states.front() != i) {
      throw DomainError("empirical_transition: every path must start in state " + std::to_string(i));
    }
    const int s = p.state_at(t);
    if (s < 0 || s >= n_states) throw DomainError("empirical_transition: state out of range");
    ++counts[static_cast<std::size_t>(s)];
  }
  const double n = static_cast<double>(paths.size());
  std::vector<Estimate> out;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / n;
    out.push_back({p, std::sqrt(p * (1.0 - p) / n)});
  }
  return out;
}

OccupationCounts simulate_occupation(const SemiMarkovModel& model, int start, std::span<const double> times,
                                     std::int64_t n_paths, const RngSpec& spec, int threads, Sampler sampler) {
  const Prepared prep(model);
  prep.check_state(start);
  if (n_paths < 1) throw DomainError("simulate_occupation: need n_paths >= 1");
  if (times.empty() || !std::is_sorted(times.begin(), times.end()) || times.front() < 0.0) {
    throw DomainError("simulate_occupation: times must be sorted and nonnegative");
  }
  if (sampler == Sampler::TimeChanged) {
    for (auto k : prep.kind)
      if (k == Prepared::Kind::General) throw HypothesisError("simulate_time_changed: every holding law must be Mittag-Leffler");
  }
  const int n = static_cast<int>(prep.rows.size());
  const std::size_t nt = times.size();
  const double t_max = std::max(times.back(), 1e-300);
  threads = std::max(1, threads);

  struct Partial {
    std::vector<std::int64_t> counts;
    std::int64_t hits = 0;
  };
  std::vector<Partial> partial(static_cast<std::size_t>(threads));
  auto work = [&](int tid) {
    auto& part = partial[static_cast<std::size_t>(tid)];
    part.counts.assign(nt * static_cast<std::size_t>(n), 0);
    const std::int64_t lo = n_paths * tid / threads, hi = n_paths * (tid + 1) / threads;
    for (std::int64_t p = lo; p < hi; ++p) {
      PathRng rng(spec, static_cast<std::uint64_t>(p));
      std::size_t idx = 0;
      int prev = start;
      bool hit = false;
      walk(prep, start, t_max, rng, sampler, [&](double t, int x, double) {
        while (idx < nt && times[idx] < t) ++part.counts[idx++ * static_cast<std::size_t>(n) + static_cast<std::size_t>(prev)];
        prev = x;
        hit = hit || prep.rows[static_cast<std::size_t>(x)].absorbing;
      });
      while (idx < nt) ++part.counts[idx++ * static_cast<std::size_t>(n) + static_cast<std::size_t>(prev)];
      if (hit) ++part.hits;
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(work, k);
    for (auto& th : pool) th.join();
  }
  OccupationCounts out;
  out.times.assign(times.begin(), times.end());
  out.n_paths = n_paths;
  out.counts.assign(nt, std::vector<std::int64_t>(static_cast<std::size_t>(n), 0));
  for (const auto& part : partial) {
    out.boundary_hits += part.hits;
    for (std::size_t k = 0; k < nt; ++k)
      for (int j = 0; j < n; ++j) out.counts[k][static_cast<std::size_t>(j)] += part.counts[k * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
  }
  return out;
}

TransitionGrid monte_carlo_grid(const SemiMarkovModel& model, std::span<const double> times, std::int64_t n_paths,
                                const RngSpec& spec, int threads, Sampler sampler) {
  const int n = model.n_states();
  TransitionGrid grid;
  grid.provenance = Provenance::MonteCarlo;
  grid.row_sum_tolerance = 1e-12;
  grid.times.assign(times.begin(), times.end());
  grid.values.assign(times.size(), Eigen::MatrixXd::Zero(n, n));
  grid.std_errors.assign(times.size(), Eigen::MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    // one stream per starting state keeps rows independent
    const RngSpec row_spec{spec.seed, spec.stream_id * 1000003ULL + static_cast<std::uint64_t>(i)};
    const auto occ = simulate_occupation(model, i, times, n_paths, row_spec, threads, sampler);
    for (std::size_t k = 0; k < times.size(); ++k) {
      for (int j = 0; j < n; ++j) {
        const double p = static_cast<double>(occ.counts[k][static_cast<std::size_t>(j)]) / static_cast<double>(n_paths);
        grid.values[k](i, j) = p;
        grid.std_errors[k](i, j) = std::sqrt(p * (1.0 - p) / static_cast<double>(n_paths));
      }
    }
  }
  return grid;
}

void write_paths_csv(std::ostream& os, std::span<const PathSample> paths) {
  os << "path_id,n,state,T_n,J_n\n" << std::setprecision(17);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const auto& path = paths[p];
    for (std::size_t k = 0; k < path.states.size(); ++k) {
      os << p << ',' << k << ',' << path.states[k] << ',' << path.jump_times[k] << ',';
      if (k < path.holding_times.size()) os << path.holding_times[k];
      os << '\n';
    }
  }
}

}  // namespace semimarkov
