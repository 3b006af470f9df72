#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>

#include "semimarkov/diffusion.hpp"
#include "semimarkov/errors.hpp"
#include "semimarkov/laplace.hpp"
#include "semimarkov/mlf.hpp"
#include "semimarkov/model_io.hpp"
#include "semimarkov/montecarlo.hpp"
#include "semimarkov/solvers.hpp"

namespace py = pybind11;
using namespace semimarkov;

namespace {

template <class T>
T pick(const std::map<std::string, T>& table, const std::string& key, const char* what) {
  const auto it = table.find(key);
  if (it == table.end()) throw ValidationError(std::string(what) + ": unknown value '" + key + "'");
  return it->second;
}

// (times, values[time, i, j])
py::tuple to_numpy(const TransitionGrid& g) {
  const auto nt = static_cast<py::ssize_t>(g.size());
  const auto n = static_cast<py::ssize_t>(g.n_states());
  py::array_t<double> v({nt, n, n});
  auto r = v.mutable_unchecked<3>();
  for (py::ssize_t k = 0; k < nt; ++k)
    for (py::ssize_t i = 0; i < n; ++i)
      for (py::ssize_t j = 0; j < n; ++j) r(k, i, j) = g.values[static_cast<std::size_t>(k)](i, j);
  return py::make_tuple(py::array_t<double>(nt, g.times.data()), v);
}

TransitionGrid solve(const SemiMarkovModel& m, const std::string& method, double dt, double horizon,
                     const std::string& scheme_backward, const std::string& scheme_forward) {
  auto cfg = DiscretizationConfig::for_horizon(horizon, dt);
  cfg.scheme_backward = pick<BackwardScheme>(
      {{"l1_midpoint", BackwardScheme::L1Midpoint}, {"l1_caputo", BackwardScheme::L1Caputo}}, scheme_backward,
      "scheme_backward");
  cfg.scheme_forward = pick<ForwardScheme>(
      {{"product_trapezoid", ForwardScheme::ProductTrapezoid}, {"grunwald_letnikov", ForwardScheme::GrunwaldLetnikov}},
      scheme_forward, "scheme_forward");
  using Fn = TransitionGrid (*)(const SemiMarkovModel&, const DiscretizationConfig&);
  const Fn fn = pick<Fn>({{"renewal", solve_renewal},
                          {"backward_caputo", solve_backward_caputo},
                          {"forward_rl", solve_forward_rl},
                          {"backward_volterra", solve_backward_volterra},
                          {"forward_volterra", solve_forward_volterra}},
                         method, "method");
  py::gil_scoped_release release;
  return fn(m, cfg);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Semi-Markov CTRW solvers, Monte Carlo and variable-order heat equation";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<HypothesisError>(m, "HypothesisError", validation.ptr());
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("mittag_leffler", py::vectorize([](double alpha, double z, double beta) { return mittag_leffler({alpha, beta}, z); }),
        py::arg("alpha"), py::arg("z"), py::arg("beta") = 1.0);
  m.def("ml_survival", py::vectorize(ml_survival), py::arg("alpha"), py::arg("lam"), py::arg("t"));
  m.def("ml_density", py::vectorize(ml_density), py::arg("alpha"), py::arg("lam"), py::arg("t"));

  py::class_<SemiMarkovModel>(m, "Model")
      .def_static("mittag_leffler", &ml_model, py::arg("h"), py::arg("rates"), py::arg("alphas"))
      .def_static("exponential", &exponential_model, py::arg("h"), py::arg("rates"))
      .def_static("birth_chain", &birth_chain_model, py::arg("lam"), py::arg("alphas"))
      .def_static("from_json", [](const std::string& text) { return parse_model(text); })
      .def("to_json", &serialize_model)
      .def_property_readonly("n_states", &SemiMarkovModel::n_states)
      .def_readonly("h", &SemiMarkovModel::embedded_chain)
      .def_readonly("rates", &SemiMarkovModel::rates)
      .def_property_readonly("laws", [](const SemiMarkovModel& s) {
        std::vector<std::string> out;
        for (const auto& l : s.holding_laws) out.push_back(law_name(l));
        return out;
      })
      .def("violations", [](const SemiMarkovModel& s) {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& v : validate_model(s)) out.emplace_back(v.field, v.rule, v.detail);
        return out;
      })
      .def("generator", [](const SemiMarkovModel& s) { return build_generator(s).g; });

  m.def("solve",
        [](const SemiMarkovModel& model, const std::string& method, double dt, double horizon, const std::string& sb,
           const std::string& sf) { return to_numpy(solve(model, method, dt, horizon, sb, sf)); },
        py::arg("model"), py::arg("method") = "backward_caputo", py::arg("dt") = 1e-3, py::arg("horizon") = 1.0,
        py::arg("scheme_backward") = "l1_midpoint", py::arg("scheme_forward") = "product_trapezoid",
        "Transition matrices on the grid 0, dt, ..., horizon as (times, p[t, i, j]).");

  m.def("invert_laplace",
        [](const SemiMarkovModel& model, const std::vector<double>& times, const std::string& method) {
          InversionConfig cfg;
          cfg.method = pick<InversionMethod>(
              {{"talbot", InversionMethod::Talbot}, {"gaver_stehfest", InversionMethod::GaverStehfest}}, method,
              "method");
          return to_numpy(invert_laplace_matrix(model_laplace_transform(model), times, cfg));
        },
        py::arg("model"), py::arg("times"), py::arg("method") = "talbot");

  m.def("expm_grid", [](const SemiMarkovModel& model, const std::vector<double>& times) {
    return to_numpy(matrix_exponential_grid(model, times));
  });

  m.def("monte_carlo",
        [](const SemiMarkovModel& model, const std::vector<double>& times, std::int64_t n_paths, std::uint64_t seed,
           std::uint64_t stream_id, int threads, const std::string& sampler) {
          const auto s = pick<Sampler>({{"ctrw", Sampler::Ctrw}, {"time_changed", Sampler::TimeChanged}}, sampler,
                                       "sampler");
          TransitionGrid g;
          {
            py::gil_scoped_release release;
            g = monte_carlo_grid(model, times, n_paths, RngSpec{seed, stream_id}, threads, s);
          }
          TransitionGrid se = g;
          se.values = g.std_errors;
          return py::make_tuple(to_numpy(g)[1], to_numpy(se)[1]);
        },
        py::arg("model"), py::arg("times"), py::arg("n_paths") = 10000, py::arg("seed") = 0, py::arg("stream_id") = 0,
        py::arg("threads") = 1, py::arg("sampler") = "ctrw", "Returns (p_hat[t, i, j], standard errors).");

  m.def("heat_forward",
        [](double x_min, double x_max, double epsilon, std::function<double(double)> alpha,
           std::function<double(double)> k, double source, double dt, double horizon, const std::string& boundary) {
          LatticeSpec spec;
          spec.x_min = x_min;
          spec.x_max = x_max;
          spec.epsilon = epsilon;
          // profiles are sampled once per node while the lattice is built
          spec.alpha_fn = std::move(alpha);
          spec.k_fn = std::move(k);
          spec.boundary = pick<Boundary>({{"reflecting", Boundary::Reflecting}, {"absorbing", Boundary::Absorbing}},
                                         boundary, "boundary");
          const auto g = solve_vo_heat_forward(spec, source, DiscretizationConfig::for_horizon(horizon, dt));
          py::array_t<double> v({static_cast<py::ssize_t>(g.t.size()), static_cast<py::ssize_t>(g.x.size())});
          auto r = v.mutable_unchecked<2>();
          for (std::size_t n = 0; n < g.t.size(); ++n)
            for (std::size_t j = 0; j < g.x.size(); ++j) r(n, j) = g.values[n][j];
          return py::make_tuple(py::array_t<double>(g.t.size(), g.t.data()), py::array_t<double>(g.x.size(), g.x.data()),
                                v, py::array_t<double>(g.mass.size(), g.mass.data()));
        },
        py::arg("x_min"), py::arg("x_max"), py::arg("epsilon"), py::arg("alpha"), py::arg("k"), py::arg("source") = 0.0,
        py::arg("dt") = 1e-3, py::arg("horizon") = 1.0, py::arg("boundary") = "reflecting",
        "VO heat density p(source, y, t) as (t, y, p[t, y], mass[t]).");
}
