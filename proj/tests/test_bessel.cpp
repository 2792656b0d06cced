#include <catch2/catch_amalgamated.hpp>

#include "mixcirc/bessel.hpp"
#include "mixcirc/rng.hpp"
#include "oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("series branch matches the defining power series", "[bessel]") {
  for (double x : {0.0, 1e-10, 1e-4, 0.25, 1.0, 2.0, 5.0, 10.0, 20.0, 29.99}) {
    CHECK_THAT(mixcirc::bessel_i0(x),
               WithinRel(static_cast<double>(oracle::bessel_i0(x)), 1e-14));
    CHECK_THAT(mixcirc::bessel_i1(x),
               WithinRel(static_cast<double>(oracle::bessel_i1(x)), 1e-14));
  }
}

TEST_CASE("classic reference values", "[bessel]") {
  CHECK_THAT(mixcirc::bessel_i0(1.0), WithinRel(1.2660658777520083, 1e-14));
  CHECK_THAT(mixcirc::bessel_i1(1.0), WithinRel(0.5651591039924850, 1e-14));
  CHECK(mixcirc::bessel_i0(0.0) == 1.0);
  CHECK(mixcirc::bessel_i1(0.0) == 0.0);
}

TEST_CASE("asymptotic branch matches quadrature", "[bessel]") {
  for (double x : {30.01, 35.0, 50.0, 100.0, 300.0, 700.0}) {
    const double scaled_i0 = static_cast<double>(oracle::scaled_i0_quadrature(x));
    const double scaled_i1 = static_cast<double>(oracle::scaled_i1_quadrature(x));
    if (x < 700.0) {
      CHECK_THAT(mixcirc::bessel_i0(x) * std::exp(-x), WithinRel(scaled_i0, 1e-12));
      CHECK_THAT(mixcirc::bessel_i1(x) * std::exp(-x), WithinRel(scaled_i1, 1e-12));
    }
  }
  for (double x : {30.01, 100.0, 700.0, 1e4, 1e5}) {
    CHECK_THAT(mixcirc::log_bessel_i0(x),
               WithinRel(static_cast<double>(oracle::log_i0_quadrature(x)), 1e-13));
  }
}

TEST_CASE("log_bessel_i0 stays finite across the admissible range", "[bessel]") {
  CHECK(mixcirc::log_bessel_i0(0.0) == 0.0);
  CHECK(mixcirc::log_bessel_i0(1e-8) >= 0.0);
  // Strict growth only where log I0(x) ~ x^2/4 is representable in a double.
  double prev = mixcirc::log_bessel_i0(1e-4);
  CHECK(prev > 0.0);
  for (double x : {1.0, 10.0, 100.0, 710.0, 1e3, 1e4, 1e5}) {
    const double v = mixcirc::log_bessel_i0(x);
    CHECK(std::isfinite(v));
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("series and asymptotic branches agree at the crossover", "[bessel]") {
  // I0 itself moves by ~2e-9 relative across this gap, so each side is
  // compared against the reference at its own abscissa.
  for (double x : {29.999999999, 30.000000001}) {
    CHECK_THAT(mixcirc::bessel_i0(x),
               WithinRel(static_cast<double>(oracle::bessel_i0(x)), 1e-12));
    CHECK_THAT(mixcirc::bessel_i1(x),
               WithinRel(static_cast<double>(oracle::bessel_i1(x)), 1e-12));
    CHECK_THAT(mixcirc::log_bessel_i0(x),
               WithinRel(static_cast<double>(oracle::log_i0_quadrature(x)), 1e-13));
  }
}

TEST_CASE("mean resultant length matches quadrature and is monotone", "[bessel]") {
  CHECK(mixcirc::mean_resultant_length(0.0) == 0.0);
  // Below the crossover the series ratio is the sharper reference; the
  // quadrature loses relative accuracy to cancellation once A(x) is tiny.
  for (double x : {1e-6, 0.1, 1.0, 5.0, 29.0}) {
    const double ref = static_cast<double>(oracle::bessel_i1(x) / oracle::bessel_i0(x));
    CHECK_THAT(mixcirc::mean_resultant_length(x), WithinRel(ref, 1e-13));
  }
  for (double x : {31.0, 100.0, 1e4, 1e5}) {
    CHECK_THAT(mixcirc::mean_resultant_length(x),
               WithinRel(static_cast<double>(oracle::mean_resultant_quadrature(x)), 1e-12));
  }
  double prev = 0.0;
  for (double x = 0.05; x <= 200.0; x *= 1.7) {
    const double a = mixcirc::mean_resultant_length(x);
    CHECK(a > prev);
    CHECK(a < 1.0);
    prev = a;
  }
  // Small-kappa expansion A(kappa) ~ kappa/2.
  CHECK_THAT(mixcirc::mean_resultant_length(1e-8), WithinRel(0.5e-8, 1e-8));
}

TEST_CASE("concentration_from_resultant inverts A to 1e-10", "[bessel]") {
  for (double kappa : {1e-4, 1e-2, 0.5, 1.0, 2.0, 8.0, 29.0, 31.0, 100.0, 1e3, 1e4}) {
    const double r = mixcirc::mean_resultant_length(kappa);
    const mixcirc::ConcentrationEstimate est = mixcirc::concentration_from_resultant(r);
    CHECK_FALSE(est.capped);
    CHECK_FALSE(est.floored);
    CHECK(std::abs(mixcirc::mean_resultant_length(est.kappa) - r) <= 1e-10);
  }
}

TEST_CASE("concentration_from_resultant random round trips", "[bessel]") {
  mixcirc::Rng rng = mixcirc::make_rng(20240817);
  const double r_max = mixcirc::max_mean_resultant_length();
  for (int i = 0; i < 1000; ++i) {
    const double r = mixcirc::runif(rng) * (r_max - 1e-12);
    const mixcirc::ConcentrationEstimate est = mixcirc::concentration_from_resultant(r);
    REQUIRE(est.kappa >= 0.0);
    REQUIRE(est.kappa <= mixcirc::kKappaCap);
    CHECK(std::abs(mixcirc::mean_resultant_length(est.kappa) - r) <= 1e-10);
  }
}

TEST_CASE("concentration_from_resultant clamps at both ends", "[bessel]") {
  const auto zero = mixcirc::concentration_from_resultant(0.0);
  CHECK(zero.kappa == 0.0);
  CHECK_FALSE(zero.floored);

  const auto neg = mixcirc::concentration_from_resultant(-0.3);
  CHECK(neg.kappa == 0.0);
  CHECK(neg.floored);

  const auto high = mixcirc::concentration_from_resultant(0.999999999999);
  CHECK(high.kappa == mixcirc::kKappaCap);
  CHECK(high.capped);

  const auto one = mixcirc::concentration_from_resultant(1.0);
  CHECK(one.kappa == mixcirc::kKappaCap);
  CHECK(one.capped);
}

TEST_CASE("bessel domain errors", "[bessel]") {
  CHECK_THROWS_AS(mixcirc::bessel_i0(-1.0), mixcirc::DomainError);
  CHECK_THROWS_AS(mixcirc::bessel_i1(-0.5), mixcirc::DomainError);
  CHECK_THROWS_AS(mixcirc::log_bessel_i0(std::nan("")), mixcirc::DomainError);
  CHECK_THROWS_AS(mixcirc::mean_resultant_length(-2.0), mixcirc::DomainError);
  CHECK_THROWS_AS(
      mixcirc::concentration_from_resultant(std::numeric_limits<double>::infinity()),
      mixcirc::DomainError);
}
