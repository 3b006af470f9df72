#pragma once

namespace semimarkov {

/// Parameters of the two-parameter Mittag-Leffler function E_{alpha,beta}.
struct MlParams {
  double alpha;
  double beta = 1.0;
};

/// Gamma function (Lanczos, g = 7, n = 9) with reflection for x < 1/2.
double gamma_fn(double x);
/// log Gamma(x) for x > 0.
double log_gamma(double x);
/// 1/Gamma(x); exactly zero at the poles x = 0, -1, -2, ...
double reciprocal_gamma(double x);

/// E_{alpha,beta}(z) on the closed negative real axis.
/// Throws DomainError for z > 0 or invalid parameters.
double mittag_leffler(MlParams params, double z);

/// Survival E_alpha(-lambda t^alpha) of the Mittag-Leffler holding law.
double ml_survival(double alpha, double lambda, double t);
/// Density lambda t^{alpha-1} E_{alpha,alpha}(-lambda t^alpha).
double ml_density(double alpha, double lambda, double t);
/// Leading tail term t^{-alpha} / (lambda Gamma(1-alpha)); alpha < 1 only.
double ml_tail_asymptote(double alpha, double lambda, double t);
/// Integral of the survival over [0, t]: t E_{alpha,2}(-lambda t^alpha).
double ml_integrated_survival(double alpha, double lambda, double t);

namespace ml_method {

/// Evaluation regimes exposed for continuity checks. Each one is valid only
/// on part of the axis; mittag_leffler() chooses between them.
double series(MlParams params, double z);
/// Returns NaN when the truncated expansion cannot reach double precision.
double asymptotic(MlParams params, double z);
double integral(MlParams params, double z);
/// Radius below which mittag_leffler() uses the Taylor series.
inline constexpr double kSeriesRadius = 1.0;

}  // namespace ml_method

}  // namespace semimarkov
