#include <doctest.h>

#include <cmath>

#include "circfss/geometry.hpp"
#include "circfss/numeric.hpp"

using circfss::numeric::bessel_i0;
using circfss::numeric::integrate;
using circfss::numeric::normal_cdf;
using circfss::numeric::normal_quantile;
using circfss::numeric::regularized_gamma_p;

namespace {

// Independent long-double power series for I0, summed until stagnation.
long double i0_series(long double x) {
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 200; ++k) {
        term *= (x / (2.0L * k)) * (x / (2.0L * k));
        sum += term;
        if (term < 1e-22L * sum) break;
    }
    return sum;
}

}  // namespace

TEST_CASE("bessel_i0 against an independent series") {
    CHECK(bessel_i0(0.0) == 1.0);
    for (double x : {0.1, 0.5, 1.0, 3.0, 10.0, 14.9}) {
        CHECK(bessel_i0(x) ==
              doctest::Approx(static_cast<double>(i0_series(x))).epsilon(1e-13));
    }
    // asymptotic branch, reference from the series (still converges at 20)
    CHECK(bessel_i0(20.0) ==
          doctest::Approx(static_cast<double>(i0_series(20.0L))).epsilon(1e-7));
    CHECK(bessel_i0(-3.0) == bessel_i0(3.0));
}

TEST_CASE("normal cdf and quantile") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-10));
    CHECK(normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-8));
    for (double p : {0.01, 0.05, 0.5, 0.9, 0.975, 0.999}) {
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
    }
    CHECK(normal_quantile(0.95) == doctest::Approx(1.6448536269514722).epsilon(1e-8));
}

TEST_CASE("regularized incomplete gamma") {
    // P(1/2, x) = erf(sqrt(x)); P(1, x) = 1 - exp(-x)
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        CHECK(regularized_gamma_p(0.5, x) ==
              doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-12));
        CHECK(regularized_gamma_p(1.0, x) ==
              doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
    }
    CHECK(regularized_gamma_p(2.5, 0.0) == 0.0);
    CHECK(regularized_gamma_p(3.0, 200.0) == doctest::Approx(1.0));
}

TEST_CASE("adaptive quadrature") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, circfss::kPi) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
}
