#include <catch_amalgamated.hpp>

#include <cmath>

#include "semimarkov/errors.hpp"
#include "semimarkov/statistics.hpp"

using namespace semimarkov;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Kolmogorov survival function", "[statistics]") {
  // reference values of scipy.special.kolmogorov
  CHECK_THAT(kolmogorov_q(0.5), WithinRel(0.9639452436648751, 1e-12));
  CHECK_THAT(kolmogorov_q(1.0), WithinRel(0.26999967167735456, 1e-12));
  CHECK_THAT(kolmogorov_q(1.36), WithinRel(0.049485876755377876, 1e-12));
  CHECK_THAT(kolmogorov_q(2.0), WithinRel(0.0006709252557796953, 1e-10));
  CHECK(kolmogorov_q(0.0) == 1.0);
}

TEST_CASE("two-sample KS statistic equals the brute-force supremum", "[statistics]") {
  const std::vector<double> a{0.1, 0.5, 0.5, 0.9, 1.4, 2.2, 3.0};
  const std::vector<double> b{0.2, 0.5, 1.0, 1.1, 2.5};
  double d = 0.0;
  for (double x : {0.1, 0.2, 0.5, 0.9, 1.0, 1.1, 1.4, 2.2, 2.5, 3.0}) {
    double fa = 0, fb = 0;
    for (double v : a) fa += v <= x;
    for (double v : b) fb += v <= x;
    d = std::max(d, std::abs(fa / a.size() - fb / b.size()));
  }
  const auto r = ks_two_sample(a, b);
  CHECK_THAT(r.statistic, WithinAbs(d, 1e-15));
  const double ne = std::sqrt(7.0 * 5.0 / 12.0);
  CHECK_THAT(r.p_value, WithinRel(kolmogorov_q((ne + 0.12 + 0.11 / ne) * d), 1e-14));
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  CHECK_THROWS_AS(ks_two_sample({}, b), DomainError);
}

TEST_CASE("chi-square of transition counts", "[statistics]") {
  Eigen::Matrix3d h, c;
  h << 0, 0.5, 0.5, 0.2, 0, 0.8, 0, 1, 0;
  c << 0, 60, 40, 25, 0, 75, 0, 0, 0;
  const auto r = chi_square_transitions(c, h);
  CHECK_THAT(r.statistic, WithinRel(5.5625, 1e-14));
  CHECK(r.dof == 2);
  CHECK_THAT(r.p_value, WithinRel(std::exp(-5.5625 / 2.0), 1e-12));  // chi2 survival with 2 dof
  c(0, 0) = 1;
  CHECK(chi_square_transitions(c, h).p_value == 0.0);
}
