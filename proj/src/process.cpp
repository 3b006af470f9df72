#include "semimarkov/process.hpp"

#include <charconv>
#include <cmath>
#include <regex>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "semimarkov/errors.hpp"
#include "semimarkov/mlf.hpp"

namespace semimarkov {

namespace {

std::string fmt_index(const char* field, int i) {
  std::ostringstream os;
  os << field << "[" << i << "]";
  return os.str();
}

std::string fmt_index(const char* field, int i, int j) {
  std::ostringstream os;
  os << field << "[" << i << "][" << j << "]";
  return os.str();
}

// Shortest decimal that round-trips.
std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

bool same_rate(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

void check_general_law(const GeneralSubordinatedLaw& law, int i, std::vector<Violation>& out) {
  const std::string field = fmt_index("holding_laws", i);
  if (!law.laplace_exponent || !law.levy_tail) {
    out.push_back({field, "general-law-callables", "laplace_exponent and levy_tail are required"});
    return;
  }
  const double f0 = std::abs(law.laplace_exponent(Complex(1e-200, 0.0)));
  if (!(f0 <= 1e-10)) {
    out.push_back({field, "laplace-exponent-vanishes-at-0", "|f(0+)| = " + std::to_string(f0)});
  }
  double prev = -1.0;
  for (int k = -6; k <= 6; ++k) {
    const Complex f = law.laplace_exponent(Complex(std::pow(10.0, k), 0.0));
    if (!std::isfinite(f.real()) || f.real() < prev || std::abs(f.imag()) > 1e-10 * (1.0 + std::abs(f.real()))) {
      out.push_back({field, "laplace-exponent-nondecreasing", "f is not real and nondecreasing on (0, inf)"});
      break;
    }
    prev = f.real();
  }
  double last = std::numeric_limits<double>::infinity();
  for (int k = -12; k <= 2; ++k) {
    const double v = law.levy_tail(std::pow(10.0, k));
    if (!(v <= last) || !(v >= 0.0)) {
      out.push_back({field, "levy-tail-nonincreasing", "nu-bar must be nonnegative and non-increasing"});
      break;
    }
    last = v;
  }
  // a finite Levy measure leaves nu-bar flat near 0+
  const double near = law.levy_tail(1e-12), mid = law.levy_tail(1e-6);
  if (!std::isfinite(near) || !(near - mid > 1e-3 * mid)) {
    out.push_back({field, "infinite-activity", "nu-bar must blow up at 0+"});
  }
}

}  // namespace

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream os;
  for (std::size_t k = 0; k < violations.size(); ++k) {
    if (k) os << "; ";
    os << violations[k].field << ": " << violations[k].rule;
    if (!violations[k].detail.empty()) os << " (" << violations[k].detail << ")";
  }
  return os.str();
}

std::vector<Violation> validate_model(const SemiMarkovModel& m) {
  std::vector<Violation> out;
  const auto& h = m.embedded_chain;
  const int n = static_cast<int>(h.rows());
  if (n < 1 || h.cols() != h.rows()) {
    out.push_back({"embedded_chain", "square-nonempty", "h must be a non-empty square matrix"});
    return out;
  }
  if (m.rates.size() != n) out.push_back({"rates", "size", "one rate per state"});
  if (static_cast<int>(m.holding_laws.size()) != n) {
    out.push_back({"holding_laws", "size", "one holding law per state"});
  }
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      const double v = h(i, j);
      if (!std::isfinite(v) || v < 0.0) out.push_back({fmt_index("embedded_chain", i, j), "nonnegative", ""});
      row += v;
    }
    if (!(std::abs(row - 1.0) <= 1e-12)) {
      std::ostringstream os;
      os << "row sum " << row;
      out.push_back({fmt_index("embedded_chain", i), "row-stochastic", os.str()});
    }
    if (!m.diagonal_jumps_allowed && h(i, i) != 0.0) {
      out.push_back({fmt_index("embedded_chain", i, i), "no-diagonal-jumps",
                     "h_ii must be 0 unless diagonal_jumps_allowed"});
    }
  }
  if (m.rates.size() == n) {
    for (int i = 0; i < n; ++i) {
      if (!(m.rates[i] > 0.0) || !std::isfinite(m.rates[i])) out.push_back({fmt_index("rates", i), "positive", ""});
    }
  }
  if (static_cast<int>(m.holding_laws.size()) == n) {
    for (int i = 0; i < n; ++i) {
      const double rate = m.rates.size() == n ? m.rates[i] : std::nan("");
      const auto& law = m.holding_laws[i];
      if (const auto* e = std::get_if<ExponentialLaw>(&law)) {
        if (!(e->rate > 0.0) || !same_rate(e->rate, rate)) {
          out.push_back({fmt_index("holding_laws", i), "rate-matches", "law rate must equal rates[i]"});
        }
      } else if (const auto* ml = std::get_if<MittagLefflerLaw>(&law)) {
        if (!(ml->alpha > 0.0 && ml->alpha < 1.0)) {
          out.push_back({fmt_index("holding_laws", i), "alpha-in-(0,1)", ""});
        }
        if (!(ml->rate > 0.0) || !same_rate(ml->rate, rate)) {
          out.push_back({fmt_index("holding_laws", i), "rate-matches", "law rate must equal rates[i]"});
        }
      } else {
        check_general_law(std::get<GeneralSubordinatedLaw>(law), i, out);
      }
    }
  }
  return out;
}

void require_valid(const SemiMarkovModel& model) {
  const auto v = validate_model(model);
  if (!v.empty()) throw ValidationError("invalid model: " + describe(v));
}

Generator build_generator(const SemiMarkovModel& model) {
  require_valid(model);
  const int n = model.n_states();
  Generator gen{Eigen::MatrixXd(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gen.g(i, j) = model.rates[i] * (model.embedded_chain(i, j) - (i == j ? 1.0 : 0.0));
    }
  }
  return gen;
}

GeneralSubordinatedLaw stable_subordinator_law(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("stable_subordinator_law: need 0 < alpha < 1");
  GeneralSubordinatedLaw law;
  law.laplace_exponent = [alpha](Complex s) { return std::pow(s, alpha); };
  const double rg1 = reciprocal_gamma(1.0 - alpha);
  const double rga = reciprocal_gamma(alpha);
  law.levy_tail = [alpha, rg1](double t) { return std::pow(t, -alpha) * rg1; };
  law.potential_density = [alpha, rga](double t) { return std::pow(t, alpha - 1.0) * rga; };
  law.builtin = "stable(" + shortest(alpha) + ")";
  return law;
}

GeneralSubordinatedLaw tempered_stable_law(double alpha, double theta) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(theta > 0.0)) {
    throw DomainError("tempered_stable_law: need 0 < alpha < 1 and theta > 0");
  }
  GeneralSubordinatedLaw law;
  const double ta = std::pow(theta, alpha);
  law.laplace_exponent = [alpha, theta, ta](Complex s) { return std::pow(s + theta, alpha) - ta; };
  const double rg1 = reciprocal_gamma(1.0 - alpha);
  // nu-bar(t) = alpha theta^alpha Gamma(-alpha, theta t) / Gamma(1 - alpha)
  law.levy_tail = [alpha, theta, ta, rg1](double t) {
    const double x = theta * t;
    return ta * (std::pow(x, -alpha) * std::exp(-x) * rg1 - boost::math::gamma_q(1.0 - alpha, x));
  };
  // u(t) = e^{-theta t} t^{alpha-1} E_{alpha,alpha}(theta^alpha t^alpha)
  // for theta t >> 1 the e^{-theta t} factor cancels the growth of E_{a,a}: u -> theta^{1-a} / a
  const double u_inf = std::pow(theta, 1.0 - alpha) / alpha;
  law.potential_density = [alpha, theta, ta, u_inf](double t) {
    if (theta * t > 40.0) return u_inf;
    const double y = ta * std::pow(t, alpha);
    return std::exp(-theta * t) * std::pow(t, alpha - 1.0) * ml_method::series({alpha, alpha}, y);
  };
  law.builtin = "tempered(" + shortest(alpha) + "," + shortest(theta) + ")";
  return law;
}

GeneralSubordinatedLaw builtin_law(const std::string& spec) {
  static const std::regex stable(R"(\s*stable\(\s*([^,\s)]+)\s*\)\s*)");
  static const std::regex tempered(R"(\s*tempered\(\s*([^,\s]+)\s*,\s*([^,\s)]+)\s*\)\s*)");
  std::smatch m;
  try {
    if (std::regex_match(spec, m, stable)) return stable_subordinator_law(std::stod(m[1]));
    if (std::regex_match(spec, m, tempered)) return tempered_stable_law(std::stod(m[1]), std::stod(m[2]));
  } catch (const std::invalid_argument&) {
  }
  throw ValidationError("unknown builtin exponent '" + spec + "' (expected stable(a) or tempered(a,theta))");
}

double fractional_order(const HoldingLaw& law) {
  if (std::holds_alternative<ExponentialLaw>(law)) return 1.0;
  if (const auto* ml = std::get_if<MittagLefflerLaw>(&law)) return ml->alpha;
  throw HypothesisError("fractional_order: general subordinated laws have no fractional order");
}

bool is_general(const HoldingLaw& law) { return std::holds_alternative<GeneralSubordinatedLaw>(law); }

std::string law_name(const HoldingLaw& law) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* e = std::get_if<ExponentialLaw>(&law)) {
    os << "Exponential(" << e->rate << ")";
  } else if (const auto* ml = std::get_if<MittagLefflerLaw>(&law)) {
    os << "MittagLeffler(" << ml->alpha << ", " << ml->rate << ")";
  } else {
    const auto& g = std::get<GeneralSubordinatedLaw>(law);
    os << "GeneralSubordinated(" << (g.builtin.empty() ? "user" : g.builtin) << ")";
  }
  return os.str();
}

Complex laplace_exponent(const HoldingLaw& law, Complex s) {
  if (std::holds_alternative<ExponentialLaw>(law)) return s;
  if (const auto* ml = std::get_if<MittagLefflerLaw>(&law)) return std::pow(s, ml->alpha);
  return std::get<GeneralSubordinatedLaw>(law).laplace_exponent(s);
}

double holding_survival(const SemiMarkovModel& model, int i, double t, const InversionConfig& cfg) {
  require_valid(model);
  if (i < 0 || i >= model.n_states()) throw DomainError("holding_survival: state index out of range");
  if (!(t >= 0.0)) throw DomainError("holding_survival: need t >= 0");
  if (t == 0.0) return 1.0;
  const auto& law = model.holding_laws[i];
  const double lambda = model.rates[i];
  if (std::holds_alternative<ExponentialLaw>(law)) return std::exp(-lambda * t);
  if (const auto* ml = std::get_if<MittagLefflerLaw>(&law)) return ml_survival(ml->alpha, lambda, t);
  const auto& f = std::get<GeneralSubordinatedLaw>(law).laplace_exponent;
  return invert_laplace_scalar(
      [&](Complex s) {
        const Complex fs = f(s);
        return fs / (s * (lambda + fs));
      },
      t, cfg);
}

SemiMarkovModel ml_model(const Eigen::MatrixXd& h, const Eigen::VectorXd& rates,
                         const std::vector<double>& alphas) {
  SemiMarkovModel m;
  m.embedded_chain = h;
  m.rates = rates;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double r = i < static_cast<std::size_t>(rates.size()) ? rates[static_cast<Eigen::Index>(i)] : 0.0;
    if (alphas[i] == 1.0) {
      m.holding_laws.emplace_back(ExponentialLaw{r});
    } else {
      m.holding_laws.emplace_back(MittagLefflerLaw{alphas[i], r});
    }
  }
  return m;
}

SemiMarkovModel exponential_model(const Eigen::MatrixXd& h, const Eigen::VectorXd& rates) {
  return ml_model(h, rates, std::vector<double>(static_cast<std::size_t>(rates.size()), 1.0));
}

SemiMarkovModel birth_chain_model(double lambda, const std::vector<double>& alphas) {
  // the last state is absorbing: the finite window of the pure-birth chain
  const int n = static_cast<int>(alphas.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) h(i, i + 1) = 1.0;
  if (n > 0) h(n - 1, n - 1) = 1.0;
  auto m = ml_model(h, Eigen::VectorXd::Constant(n, lambda), alphas);
  m.diagonal_jumps_allowed = true;
  return m;
}

}  // namespace semimarkov
