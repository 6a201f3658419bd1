#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "yule/error.hpp"
#include "yule/estimators.hpp"
#include "yule/mc.hpp"

using namespace yule;
using Catch::Approx;

namespace {

SamplePath make_path(double dt, std::vector<double> v) { return SamplePath{0.0, dt, std::move(v)}; }

SamplePath from_function(double T, std::size_t n, double (*f)(double)) {
    SamplePath p{0.0, T / double(n), std::vector<double>(n + 1)};
    for (std::size_t k = 0; k <= n; ++k) p.values[k] = f(p.time(k));
    return p;
}

// Independent evaluation of int ab - T abar bbar with explicit trapezoid sums.
double naive_y(const SamplePath& a, const SamplePath& b) {
    const std::size_t n = a.size() - 1;
    auto trap = [&](auto f) {
        double s = 0.5 * (f(0) + f(n));
        for (std::size_t k = 1; k < n; ++k) s += f(k);
        return s * a.dt;
    };
    const double T = a.dt * double(n);
    const double ia = trap([&](std::size_t k) { return a.values[k]; });
    const double ib = trap([&](std::size_t k) { return b.values[k]; });
    const double iab = trap([&](std::size_t k) { return a.values[k] * b.values[k]; });
    return iab - ia * ib / T;
}

SamplePath transform(const SamplePath& p, double a, double b) {
    SamplePath q = p;
    for (auto& v : q.values) v = a * v + b;
    return q;
}

}  // namespace

TEST_CASE("path_time_average quadrature cases") {
    CHECK(path_time_average(make_path(0.1, std::vector<double>(11, 3.25))) == Approx(3.25).epsilon(1e-15));
    CHECK(path_time_average(from_function(1.0, 7, [](double t) { return t; })) == Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(path_time_average(make_path(0.1, {1.0})), InsufficientDataError);
}

TEST_CASE("squared time average matches mean_functional_variance (Monte Carlo)") {
    const std::size_t n = 10000;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        NormalSource z(41, i, 0);
        const double m = path_time_average(simulate_ou(1.0, 100.0, 0.05, z));
        sq[i] = m * m;
    }
    const double se = std::sqrt(oracle::variance(sq) / double(n));
    CHECK(std::abs(oracle::mean(sq) - mean_functional_variance(1.0, 100.0)) < 4 * se);
}

TEST_CASE("empirical_cov_functional algebra") {
    const auto p = simulate_correlated_pair(CorrelatedPairConfig{1.0, 0.3, 20.0, 0.05, 2});
    const double y11 = empirical_cov_functional(p.x1, p.x1);
    CHECK(y11 > 0.0);
    CHECK(empirical_cov_functional(p.x1, transform(p.x1, -1.0, 0.0)) == Approx(-y11).epsilon(1e-13));
    CHECK(empirical_cov_functional(p.x1, p.x2) == Approx(empirical_cov_functional(p.x2, p.x1)).epsilon(1e-14));
    CHECK(empirical_cov_functional(p.x1, p.x2) == Approx(naive_y(p.x1, p.x2)).epsilon(1e-10));
    CHECK(empirical_cov_functional(make_path(0.5, {2, 2, 2}), make_path(0.5, {-1, -1, -1})) == 0.0);
}

TEST_CASE("empirical_cov_functional converges on smooth integrands") {
    // sin and cos on [0, 2 pi]: int sin^2 = pi, int sin cos = 0, both means 0.
    const double T = 2 * std::numbers::pi;
    const auto s = from_function(T, 4000, [](double t) { return std::sin(t); });
    const auto c = from_function(T, 4000, [](double t) { return std::cos(t); });
    CHECK(empirical_cov_functional(s, s) == Approx(std::numbers::pi).epsilon(1e-6));
    CHECK(std::abs(empirical_cov_functional(s, c)) < 1e-6);
}

TEST_CASE("empirical_cov_functional rejects mismatched grids") {
    CHECK_THROWS_AS(empirical_cov_functional(make_path(0.1, {0, 1, 2}), make_path(0.2, {0, 1, 2})),
                    IncompatibleGridsError);
    CHECK_THROWS_AS(empirical_cov_functional(make_path(0.1, {0, 1, 2}), make_path(0.1, {0, 1})),
                    IncompatibleGridsError);
}

TEST_CASE("yule_rho on perfectly dependent paths") {
    const auto p = simulate_correlated_pair(CorrelatedPairConfig{1.0, 0.0, 30.0, 0.05, 5});
    CHECK(yule_rho(p.x1, p.x1).rho == Approx(1.0).epsilon(1e-14));
    CHECK(yule_rho(p.x1, transform(p.x1, -2.5, 4.0)).rho == Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("yule_rho stores consistent fields") {
    const auto p = simulate_correlated_pair(CorrelatedPairConfig{2.0, 0.4, 25.0, 0.025, 8}, 3);
    const auto s = yule_rho(p);
    CHECK(s.rho == s.y12 / std::sqrt(s.y11 * s.y22));
    CHECK(s.horizon == Approx(25.0));
    CHECK(s.theta_hat == Approx(theta_estimator(p.x1)).epsilon(1e-15));
    const auto pooled = yule_rho(p, ThetaHatSource::pooled);
    CHECK(pooled.theta_hat == Approx(0.5 * (theta_estimator(p.x1) + theta_estimator(p.x2))).epsilon(1e-14));
}

TEST_CASE("property: |rho| <= 1, Y11, Y22 > 0 and sign equivariance on random paths") {
    for (std::uint64_t rep = 0; rep < 200; ++rep) {
        const double r = -1.0 + 2.0 * double(rep % 21) / 20.0;
        const auto p = simulate_correlated_pair(CorrelatedPairConfig{0.5 + double(rep % 5), r, 10.0,
                                                                     fitted_step(0.5 + double(rep % 5), 10.0), 77},
                                                rep);
        const auto s = yule_rho(p);
        REQUIRE(std::abs(s.rho) <= 1.0);
        REQUIRE(s.y11 > 0.0);
        REQUIRE(s.y22 > 0.0);
        for (double a : {-3.0, 0.5})
            for (double c : {-0.25, 7.0}) {
                const double t = yule_rho(transform(p.x1, a, 1.5), transform(p.x2, c, -2.0)).rho;
                REQUIRE(t == Approx((a * c > 0 ? 1.0 : -1.0) * s.rho).margin(1e-12));
            }
    }
}

TEST_CASE("constant paths are degenerate") {
    const auto p = simulate_correlated_pair(CorrelatedPairConfig{1.0, 0.0, 5.0, 0.05, 1});
    const auto flat = make_path(0.05, std::vector<double>(p.x1.size(), 1.0));
    CHECK_THROWS_AS(yule_rho(flat, p.x2), DegenerateDenominatorError);
    CHECK_THROWS_AS(yule_rho(p.x1, flat), DegenerateDenominatorError);
    CHECK_THROWS_AS(theta_estimator(flat), DegenerateDenominatorError);
}

TEST_CASE("theta_estimator inverts Y11 / T") {
    auto p = simulate_correlated_pair(CorrelatedPairConfig{1.0, 0.0, 40.0, 0.05, 3}).x1;
    const double T = p.horizon();
    const double scale = std::sqrt(0.5 * T / empirical_cov_functional(p, p));
    for (auto& v : p.values) v *= scale;
    CHECK(empirical_cov_functional(p, p) / T == Approx(0.5).epsilon(1e-13));
    CHECK(theta_estimator(p) == Approx(1.0).epsilon(1e-13));
}

TEST_CASE("theta_estimator consistency at theta = 2, T = 200 (Monte Carlo)") {
    CorrelatedPairConfig c{2.0, 0.0, 200.0, fitted_step(2.0, 200.0), 13};
    const auto stats = simulate_replications(c, 1000);
    std::vector<double> th;
    for (const auto& s : stats) th.push_back(s.theta_hat);
    CHECK(std::abs(oracle::mean(th) - 2.0) < 0.1);
}

TEST_CASE("numerator statistic") {
    const auto p = simulate_correlated_pair(CorrelatedPairConfig{1.0, 0.2, 16.0, 0.05, 3});
    CHECK(numerator_statistic(p) == Approx(empirical_cov_functional(p.x1, p.x2) / 4.0).epsilon(1e-15));
    const auto zero = make_path(0.05, std::vector<double>(p.x1.size(), 0.0));
    CHECK(numerator_statistic(zero, zero) == 0.0);

    // x2 = x1: Y11/T -> 1/(2 theta); sd of Y11/T is about 1/(theta sqrt(2 theta T)).
    const auto long_path = simulate_correlated_pair(CorrelatedPairConfig{1.0, 1.0, 20000.0, 0.05, 4});
    CHECK(numerator_statistic(long_path) / std::sqrt(20000.0) == Approx(0.5).margin(0.02));
}

TEST_CASE("numerator null variance at theta = 1, T = 200 (Monte Carlo)") {
    CorrelatedPairConfig c{1.0, 0.0, 200.0, 0.05, 14};
    const auto stats = simulate_replications(c, 10000);
    std::vector<double> num;
    for (const auto& s : stats) num.push_back(s.y12 / std::sqrt(s.horizon));
    CHECK(oracle::variance(num) == Approx(0.25).epsilon(0.10));
}

TEST_CASE("grid refinement changes rho by O(dt)") {
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        const auto fine = simulate_correlated_pair(CorrelatedPairConfig{1.0, 0.5, 50.0, 0.0125, 23}, rep);
        std::vector<double> a, b;
        for (std::size_t k = 0; k < fine.x1.size(); k += 2) {
            a.push_back(fine.x1.values[k]);
            b.push_back(fine.x2.values[k]);
        }
        const double rho_fine = yule_rho(fine).rho;
        const double rho_coarse = yule_rho(make_path(0.025, a), make_path(0.025, b)).rho;
        REQUIRE(std::abs(rho_fine - rho_coarse) < 0.025);
    }
}
