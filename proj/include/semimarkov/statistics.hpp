#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace semimarkov {

struct TestResult {
  double statistic;
  double p_value;
  int dof = 0;
};

/// Two-sample Kolmogorov-Smirnov test (asymptotic Kolmogorov distribution
/// with the small-sample correction of Stephens).
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kolmogorov survival function Q(x) = 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_q(double x);

/// Pearson chi-square of observed transition counts against a row-stochastic
/// matrix h; rows without observations and cells with h_ij = 0 are skipped.
/// Cells with h_ij = 0 but nonzero counts give p = 0.
TestResult chi_square_transitions(const Eigen::MatrixXd& counts, const Eigen::MatrixXd& h);

}  // namespace semimarkov
