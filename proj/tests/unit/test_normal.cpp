#include <catch_amalgamated.hpp>

#include <cmath>

#include "yule/error.hpp"
#include "yule/normal.hpp"

using namespace yule;
using Catch::Approx;

TEST_CASE("normal CDF against tabulated values") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.959964) == Approx(0.975).margin(1e-8));
    CHECK(normal_cdf(1.0) == Approx(0.8413447460685429).epsilon(1e-14));
    CHECK(normal_cdf(-3.0) == Approx(0.0013498980316300933).epsilon(1e-12));
    CHECK(normal_cdf(-8.0) == Approx(6.22096057427174e-16).epsilon(1e-10));
    CHECK(normal_cdf(5.0) == Approx(0.9999997133484281).epsilon(1e-14));
    CHECK(normal_pdf(1.0) == Approx(0.24197072451914337).epsilon(1e-14));
}

TEST_CASE("normal quantile against tabulated values") {
    CHECK(normal_quantile(0.5) == Approx(0.0).margin(1e-15));
    CHECK(normal_quantile(0.975) == Approx(1.959963984540054).margin(1e-9));
    CHECK(normal_quantile(0.995) == Approx(2.5758293035489004).margin(1e-9));
    CHECK(normal_quantile(1e-10) == Approx(-6.361340902404056).margin(1e-9));
    CHECK(normal_quantile(0.9999) == Approx(3.719016485455709).margin(1e-9));
    CHECK(two_sided_critical_value(0.05) == Approx(1.959964).margin(1e-6));
}

TEST_CASE("quantile inverts the CDF") {
    for (double p = 1e-6; p < 1.0; p += 0.0137) CHECK(normal_cdf(normal_quantile(p)) == Approx(p).epsilon(1e-12));
    for (double x = -6.0; x <= 6.0; x += 0.25) CHECK(normal_quantile(normal_cdf(x)) == Approx(x).margin(1e-9));
}

TEST_CASE("quantile domain") {
    CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
    CHECK_THROWS_AS(two_sided_critical_value(0.0), DomainError);
    CHECK_THROWS_AS(two_sided_critical_value(1.0), DomainError);
    CHECK_THROWS_AS(two_sided_critical_value(-0.1), DomainError);
}
