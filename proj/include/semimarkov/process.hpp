#pragma once

#include <complex>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "semimarkov/inversion.hpp"

namespace semimarkov {

using Complex = std::complex<double>;

struct ExponentialLaw {
  double rate;
};

struct MittagLefflerLaw {
  double alpha;  ///< in (0, 1)
  double rate;
};

/// Holding law generated by an arbitrary infinite-activity subordinator.
/// The rate lambda_i lives in SemiMarkovModel::rates.
struct GeneralSubordinatedLaw {
  std::function<Complex(Complex)> laplace_exponent;  ///< f(s), Re s > 0
  std::function<double(double)> levy_tail;           ///< nu-bar(t), t > 0
  std::function<double(double)> potential_density;   ///< u(t), t > 0; may be empty
  std::string builtin;  ///< "stable(a)" / "tempered(a,theta)" for built-ins, else empty
};

using HoldingLaw = std::variant<ExponentialLaw, MittagLefflerLaw, GeneralSubordinatedLaw>;

/// f(s) = s^alpha, nu-bar(t) = t^{-alpha}/Gamma(1-alpha), u(t) = t^{alpha-1}/Gamma(alpha).
GeneralSubordinatedLaw stable_subordinator_law(double alpha);
/// f(s) = (s+theta)^alpha - theta^alpha with the matching tail and potential density.
GeneralSubordinatedLaw tempered_stable_law(double alpha, double theta);
/// Parses "stable(a)" or "tempered(a,theta)".
GeneralSubordinatedLaw builtin_law(const std::string& spec);

struct SemiMarkovModel {
  Eigen::MatrixXd embedded_chain;  ///< row-stochastic h
  Eigen::VectorXd rates;           ///< lambda_i > 0
  std::vector<HoldingLaw> holding_laws;
  bool diagonal_jumps_allowed = false;

  int n_states() const { return static_cast<int>(embedded_chain.rows()); }
};

struct Violation {
  std::string field;
  std::string rule;
  std::string detail;
};

std::string describe(const std::vector<Violation>& violations);

/// Empty iff every model invariant holds.
std::vector<Violation> validate_model(const SemiMarkovModel& model);
/// Throws ValidationError naming every violation.
void require_valid(const SemiMarkovModel& model);

struct Generator {
  Eigen::MatrixXd g;  ///< g_ij = lambda_i (h_ij - delta_ij)
};

Generator build_generator(const SemiMarkovModel& model);

/// P(J > t | X = i) for the holding law of state i.
double holding_survival(const SemiMarkovModel& model, int i, double t,
                        const InversionConfig& cfg = {});

/// Order alpha_i of an Exponential (1) or Mittag-Leffler law; throws
/// HypothesisError for general laws.
double fractional_order(const HoldingLaw& law);
bool is_general(const HoldingLaw& law);
std::string law_name(const HoldingLaw& law);

/// Laplace exponent of state i's subordinator: s for Exponential, s^alpha for
/// Mittag-Leffler, f(s) for general laws.
Complex laplace_exponent(const HoldingLaw& law, Complex s);

/// Convenience builders.
SemiMarkovModel birth_chain_model(double lambda, const std::vector<double>& alphas);
SemiMarkovModel ml_model(const Eigen::MatrixXd& h, const Eigen::VectorXd& rates,
                         const std::vector<double>& alphas);
SemiMarkovModel exponential_model(const Eigen::MatrixXd& h, const Eigen::VectorXd& rates);

}  // namespace semimarkov
