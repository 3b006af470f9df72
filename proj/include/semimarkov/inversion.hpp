#pragma once

#include <complex>
#include <functional>

namespace semimarkov {

enum class InversionMethod { GaverStehfest, Talbot };

struct InversionConfig {
  InversionMethod method = InversionMethod::Talbot;
  int gs_terms = 14;       ///< even, in [8, 18]
  int talbot_nodes = 32;   ///< >= 16
  double t_min_guard = 1e-6;
};

/// Throws ValidationError when a field is out of range.
void validate(const InversionConfig& cfg);

/// Side information from one scalar inversion.
struct InversionDiagnostics {
  bool unstable = false;      ///< Gaver-Stehfest partial sums oscillated beyond 1e3 |result|
  double max_partial = 0.0;   ///< largest |partial sum| seen
};

using ScalarTransform = std::function<std::complex<double>(std::complex<double>)>;

/// Real inverse Laplace transform at t >= cfg.t_min_guard.
double invert_laplace_scalar(const ScalarTransform& fn, double t, const InversionConfig& cfg = {},
                             InversionDiagnostics* diag = nullptr);

}  // namespace semimarkov
