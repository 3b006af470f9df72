#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "mpfr_ml.hpp"
#include "semimarkov/errors.hpp"
#include "semimarkov/mlf.hpp"

using namespace semimarkov;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

}  // namespace

TEST_CASE("gamma function matches known values", "[mlf]") {
  CHECK_THAT(gamma_fn(5.0), WithinRel(24.0, 1e-14));
  CHECK_THAT(gamma_fn(0.5), WithinRel(std::sqrt(std::numbers::pi), 1e-14));
  CHECK_THAT(gamma_fn(-0.5), WithinRel(-2.0 * std::sqrt(std::numbers::pi), 1e-13));
  for (double x : {0.1, 0.7, 1.3, 2.9, 7.5, 20.2}) CHECK_THAT(gamma_fn(x), WithinRel(std::tgamma(x), 1e-13));
  CHECK(reciprocal_gamma(0.0) == 0.0);
  CHECK(reciprocal_gamma(-3.0) == 0.0);
  CHECK_THAT(log_gamma(100.0), WithinRel(std::lgamma(100.0), 1e-14));
}

TEST_CASE("closed forms at alpha = 1 and 1/2", "[mlf]") {
  for (double z : {0.0, -0.3, -1.0, -4.0, -12.0, -35.0}) {
    CHECK_THAT(mittag_leffler({1.0}, z), WithinRel(std::exp(z), 1e-13));
    const double x = std::sqrt(-z);
    CHECK_THAT(mittag_leffler({0.5}, -x), WithinRel(oracle::erfcx(x), 1e-12));
  }
  // E_{1,2}(z) = (e^z - 1)/z
  for (double z : {-0.5, -3.0, -20.0}) CHECK_THAT(mittag_leffler({1.0, 2.0}, z), WithinRel(std::expm1(z) / z, 1e-12));
}

TEST_CASE("MPFR oracle reproduces e^{x^2} erfc(x)", "[mlf]") {
  for (double x : {0.5, 3.0, 10.0, 40.0}) {
    CHECK(rel_err(oracle::mittag_leffler({1, 2}, {1, 1}, -x), oracle::erfcx(x)) < 1e-14);
  }
}

TEST_CASE("mittag_leffler vs extended precision across the three regimes", "[mlf]") {
  const oracle::Rational alphas[] = {{1, 10}, {3, 10}, {1, 2}, {7, 10}, {4, 5}, {9, 10}, {99, 100}};
  double worst = 0.0;
  for (auto a : alphas) {
    for (auto b : {oracle::Rational{1, 1}, a, oracle::Rational{2, 1}}) {
      const double xmax = a.num * 10 == a.den ? 3.0 : 50.0;
      for (int k = 0; k <= 24; ++k) {
        const double z = -xmax * k / 24.0;
        const double want = oracle::mittag_leffler(a, b, z);
        const double got = mittag_leffler({a.value(), b.value()}, z);
        if (std::abs(want) < 1e-280) continue;
        worst = std::max(worst, rel_err(got, want));
      }
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("adjacent regimes agree where both are valid", "[mlf]") {
  for (double a : {0.3, 0.5, 0.8}) {
    const MlParams p{a, 1.0};
    const double r = ml_method::kSeriesRadius;
    CHECK(rel_err(ml_method::series(p, -r), ml_method::integral(p, -r)) < 1e-7);
    // first argument where the asymptotic expansion is accepted
    double x = r;
    while (std::isnan(ml_method::asymptotic(p, -x)) && x < 1e4) x *= 1.05;
    REQUIRE(x < 1e4);
    CHECK(rel_err(ml_method::asymptotic(p, -x), ml_method::integral(p, -x)) < 1e-7);
  }
}

TEST_CASE("survival is monotone and starts at one", "[mlf]") {
  for (double a : {0.3, 0.6, 0.95}) {
    CHECK(ml_survival(a, 2.0, 0.0) == 1.0);
    double prev = 1.0;
    for (double t = 0.01; t < 200.0; t *= 1.3) {
      const double s = ml_survival(a, 2.0, t);
      CHECK(s <= prev + 1e-15);
      CHECK(s > 0.0);
      prev = s;
    }
  }
}

TEST_CASE("density integrates to the survival drop", "[mlf]") {
  // int_t1^t2 f = S(t1) - S(t2), composite Simpson away from 0
  const double a = 0.7, lam = 1.5, t1 = 0.5, t2 = 3.0;
  const int n = 2000;
  const double h = (t2 - t1) / n;
  double s = ml_density(a, lam, t1) + ml_density(a, lam, t2);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * ml_density(a, lam, t1 + k * h);
  CHECK_THAT(s * h / 3.0, WithinAbs(ml_survival(a, lam, t1) - ml_survival(a, lam, t2), 1e-10));
}

TEST_CASE("integrated survival is the primitive of the survival", "[mlf]") {
  const double a = 0.6, lam = 0.8;
  const double t = 2.0, h = 1e-4;
  const double d = (ml_integrated_survival(a, lam, t + h) - ml_integrated_survival(a, lam, t - h)) / (2 * h);
  CHECK_THAT(d, WithinAbs(ml_survival(a, lam, t), 1e-8));
  CHECK(ml_integrated_survival(a, lam, 0.0) == 0.0);
}

TEST_CASE("power-law tail", "[mlf]") {
  for (double a : {0.3, 0.5, 0.8}) {
    for (double lam : {0.5, 1.0, 3.0}) {
      const double t = 1e6;
      const double ratio = ml_survival(a, lam, t) / ml_tail_asymptote(a, lam, t);
      // S(t) = sum_k (-1)^{k+1} z^{-k} / Gamma(1 - a k), z = lam t^a
      const double zi = 1.0 / (lam * std::pow(t, a));
      const double g1 = std::tgamma(1.0 - a);
      const double want = 1.0 - zi * g1 / std::tgamma(1.0 - 2.0 * a) + zi * zi * g1 / std::tgamma(1.0 - 3.0 * a);
      CHECK_THAT(ratio, WithinAbs(want, 10.0 * zi * zi * zi + 1e-10));
      if (lam >= 1.0) {
        CHECK(ratio > 0.99);
        CHECK(ratio < 1.01);
      }
    }
  }
}

TEST_CASE("exponential law at alpha = 1", "[mlf]") {
  CHECK_THAT(ml_density(1.0, 2.0, 0.7), WithinRel(2.0 * std::exp(-1.4), 1e-13));
  CHECK_THAT(ml_survival(1.0, 2.0, 0.7), WithinRel(std::exp(-1.4), 1e-13));
}

TEST_CASE("domain errors", "[mlf]") {
  CHECK_THROWS_AS(mittag_leffler({0.5}, 1.0), DomainError);
  CHECK_THROWS_AS(mittag_leffler({0.0}, -1.0), DomainError);
  CHECK_THROWS_AS(mittag_leffler({2.0}, -1.0), DomainError);
  CHECK_THROWS_AS(mittag_leffler({0.5, -1.0}, -1.0), DomainError);
  CHECK_THROWS_AS(ml_density(0.5, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(ml_survival(0.5, -1.0, 1.0), DomainError);
  CHECK_THROWS_AS(ml_tail_asymptote(1.0, 1.0, 10.0), DomainError);
}
