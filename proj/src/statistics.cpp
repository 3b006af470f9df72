#include "semimarkov/statistics.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "semimarkov/errors.hpp"

namespace semimarkov {

double kolmogorov_q(double x) {
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d), 0};
}

TestResult chi_square_transitions(const Eigen::MatrixXd& counts, const Eigen::MatrixXd& h) {
  if (counts.rows() != h.rows() || counts.cols() != h.cols()) {
    throw DomainError("chi_square_transitions: shape mismatch");
  }
  double stat = 0.0;
  int dof = 0;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    const double total = counts.row(i).sum();
    if (total <= 0.0) continue;
    int cells = 0;
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      if (h(i, j) <= 0.0) {
        if (counts(i, j) > 0.0) return {std::numeric_limits<double>::infinity(), 0.0, dof};
        continue;
      }
      const double e = total * h(i, j);
      stat += (counts(i, j) - e) * (counts(i, j) - e) / e;
      ++cells;
    }
    dof += std::max(0, cells - 1);
  }
  if (dof == 0) return {stat, 1.0, 0};
  const boost::math::chi_squared dist(dof);
  return {stat, boost::math::cdf(boost::math::complement(dist, stat)), dof};
}

}  // namespace semimarkov
