#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "yule/error.hpp"
#include "yule/sde.hpp"

using namespace yule;
using Catch::Approx;

TEST_CASE("exact transition at theta = 1, dt = ln 2") {
    const auto tr = exact_transition(1.0, std::log(2.0));
    CHECK(tr.factor == Approx(0.5).epsilon(1e-15));
    CHECK(tr.innovation_sd == Approx(std::sqrt(0.375)).epsilon(1e-14));
    CHECK(tr.innovation_sd == Approx(0.612372).margin(1e-6));
}

TEST_CASE("exact transition degenerates as dt -> 0") {
    const auto tr = exact_transition(3.0, 0.0);
    CHECK(tr.factor == 1.0);
    CHECK(tr.innovation_sd == 0.0);
    const auto tiny = exact_transition(3.0, 1e-12);
    CHECK(tiny.innovation_sd * tiny.innovation_sd == Approx(1e-12).epsilon(1e-9));
}

TEST_CASE("two half steps compose to one full step") {
    for (double theta : {0.01, 0.5, 1.0, 4.0, 25.0})
        for (double dt : {1e-6, 1e-3, 0.05, 0.7, 3.0}) {
            const auto half = exact_transition(theta, dt);
            const auto full = exact_transition(theta, 2 * dt);
            const double v = half.innovation_sd * half.innovation_sd;
            const double composed = v * half.factor * half.factor + v;
            CHECK(std::abs(composed - full.innovation_sd * full.innovation_sd) <=
                  1e-12 * full.innovation_sd * full.innovation_sd);
            CHECK(half.factor * half.factor == Approx(full.factor).epsilon(1e-14));
        }
}

TEST_CASE("simulate_ou shape and zero start") {
    NormalSource z(1, 0, 0);
    const auto p = simulate_ou(2.0, 10.0, 0.025, z);
    CHECK(p.size() == 401);
    CHECK(p.values.front() == 0.0);
    CHECK(p.horizon() == Approx(10.0));
    CHECK(p.dt == 0.025);
}

TEST_CASE("simulate_ou rejects bad parameters") {
    NormalSource z(1, 0, 0);
    CHECK_THROWS_AS(simulate_ou(0.0, 1.0, 0.01, z), DomainError);
    CHECK_THROWS_AS(simulate_ou(-1.0, 1.0, 0.01, z), DomainError);
    CHECK_THROWS_AS(simulate_ou(1.0, 1.0, 0.0, z), DomainError);
    CHECK_THROWS_AS(simulate_ou(1.0, 0.005, 0.01, z), DomainError);
}

TEST_CASE("Var X(1) matches the closed form (Monte Carlo)") {
    const std::size_t n = 100000;
    std::vector<double> x1(n);
    for (std::size_t i = 0; i < n; ++i) {
        NormalSource z(5, i, 0);
        x1[i] = simulate_ou(1.0, 1.0, 0.05, z).values.back();
    }
    const double target = (1.0 - std::exp(-2.0)) / 2.0;
    CHECK(target == Approx(0.432332).margin(1e-6));
    const double v = oracle::variance(x1);
    CHECK(std::abs(v - target) < 3 * oracle::variance_se(target, n));
}

TEST_CASE("correlated pair: r = 1 gives identical paths") {
    CorrelatedPairConfig c{1.5, 1.0, 20.0, 0.02, 9};
    const auto p = simulate_correlated_pair(c, 4);
    REQUIRE(same_grid(p.x1, p.x2));
    CHECK(p.x1.values == p.x2.values);
}

TEST_CASE("correlated pair: r = 0 innovations are uncorrelated") {
    CorrelatedPairConfig c{1.0, 0.0, 1000.0, 0.05, 3};
    const auto p = simulate_correlated_pair(c);
    const auto tr = exact_transition(c.theta, c.dt);
    std::vector<double> e1, e2;
    for (std::size_t k = 0; k + 1 < p.x1.size(); ++k) {
        e1.push_back(p.x1.values[k + 1] - tr.factor * p.x1.values[k]);
        e2.push_back(p.x2.values[k + 1] - tr.factor * p.x2.values[k]);
    }
    CHECK(std::abs(oracle::correlation(e1, e2)) < 3.0 / std::sqrt(double(e1.size())));
}

TEST_CASE("correlated pair: innovations follow W2 = r W1 + sqrt(1-r^2) W0") {
    CorrelatedPairConfig c{2.0, -0.6, 100.0, 0.01, 17};
    NormalSource w1(c.seed, 0, 0), w0(c.seed, 0, 1);
    const auto p = simulate_correlated_pair(c, w1, w0);
    NormalSource a(c.seed, 0, 0), b(c.seed, 0, 1);
    const auto tr = exact_transition(c.theta, c.dt);
    for (std::size_t k = 0; k + 1 < p.x1.size(); ++k) {
        const double z1 = a(), z0 = b();
        const double z2 = c.r * z1 + std::sqrt(1 - c.r * c.r) * z0;
        REQUIRE(p.x1.values[k + 1] == Approx(tr.factor * p.x1.values[k] + tr.innovation_sd * z1).margin(1e-13));
        REQUIRE(p.x2.values[k + 1] == Approx(tr.factor * p.x2.values[k] + tr.innovation_sd * z2).margin(1e-13));
    }
}

TEST_CASE("correlated pair: equal-time correlation at t = 5 is r (Monte Carlo)") {
    const std::size_t n = 100000;
    CorrelatedPairConfig c{1.0, 0.5, 5.0, 0.05, 21};
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = simulate_correlated_pair(c, i);
        a[i] = p.x1.values.back();
        b[i] = p.x2.values.back();
    }
    const double se = (1 - 0.25) / std::sqrt(double(n));
    CHECK(std::abs(oracle::correlation(a, b) - 0.5) < 3 * se);
}

TEST_CASE("correlated pair config validation") {
    CHECK_THROWS_AS((CorrelatedPairConfig{1.0, 1.5, 10.0, 0.01, 0}.validate()), DomainError);
    CHECK_THROWS_AS((CorrelatedPairConfig{0.0, 0.0, 10.0, 0.01, 0}.validate()), DomainError);
    CHECK_THROWS_AS((CorrelatedPairConfig{1.0, 0.0, 10.0, 0.1, 0}.validate()), DomainError);
    CHECK_THROWS_AS((CorrelatedPairConfig{1.0, 0.0, 0.001, 0.01, 0}.validate()), DomainError);
    CHECK_THROWS_AS((CorrelatedPairConfig{1.0, 0.0, 10.005, 0.01, 0}.validate()), DomainError);
    CHECK_NOTHROW((CorrelatedPairConfig{1.0, -1.0, 10.0, 0.05, 0}.validate()));
    CHECK_NOTHROW((CorrelatedPairConfig{4.0, 0.3, 10.0, 0.0125, 0}.validate()));
    CHECK_THROWS_AS(simulate_correlated_pair(CorrelatedPairConfig{1.0, -1.01, 10.0, 0.01, 0}), DomainError);
}

TEST_CASE("fitted step and step count") {
    CHECK(fitted_step(1.0, 100.0) == Approx(0.05));
    CHECK(fitted_step(9.0, 50.0) * 9.0 <= kDefaultStepCap * (1 + 1e-12));
    CHECK(step_count(50.0, fitted_step(9.0, 50.0)) == 9000);
    CHECK(fitted_step(1.0, 0.01) == Approx(0.01));
    CHECK(step_count(100.0, 0.01) == 10000);
    CHECK_THROWS_AS(step_count(1.0, 0.3), DomainError);
}

TEST_CASE("determinism: identical config and seed give identical paths") {
    CorrelatedPairConfig c{1.0, 0.3, 50.0, 0.05, 99};
    const auto a = simulate_correlated_pair(c, 6);
    const auto b = simulate_correlated_pair(c, 6);
    CHECK(a.x1.values == b.x1.values);
    CHECK(a.x2.values == b.x2.values);
    const auto other = simulate_correlated_pair(c, 7);
    CHECK(other.x1.values != a.x1.values);
}

TEST_CASE("SPDE ensemble: thetas and N = 1 reduction") {
    const auto ens = simulate_spde_ensemble(3, 0.2, 10.0, 5, 2);
    REQUIRE(ens.n_modes() == 3);
    CHECK(ens.modes[0].config.theta == 1.0);
    CHECK(ens.modes[1].config.theta == 4.0);
    CHECK(ens.modes[2].config.theta == 9.0);
    for (const auto& m : ens.modes) CHECK(m.config.dt * m.config.theta <= kDefaultStepCap * (1 + 1e-12));

    const auto one = simulate_spde_ensemble(1, 0.2, 10.0, 5, 2);
    CorrelatedPairConfig c{1.0, 0.2, 10.0, fitted_step(1.0, 10.0), 5};
    const auto pair = simulate_correlated_pair(c, 2);
    CHECK(one.modes[0].x1.values == pair.x1.values);
    CHECK(one.modes[0].x2.values == pair.x2.values);
    CHECK_THROWS_AS(simulate_spde_ensemble(0, 0.2, 10.0, 5), DomainError);
}

TEST_CASE("SPDE ensemble: modes do not depend on simulation order") {
    const auto ens = simulate_spde_ensemble(4, 0.4, 5.0, 8, 1);
    for (std::size_t k : {4u, 2u, 3u, 1u}) {
        const auto m = simulate_spde_mode(k, 0.4, 5.0, 8, 1);
        CHECK(m.x1.values == ens.modes[k - 1].x1.values);
        CHECK(m.x2.values == ens.modes[k - 1].x2.values);
    }
}

TEST_CASE("SPDE ensemble: r = 0 cross-mode innovations are uncorrelated") {
    const auto ens = simulate_spde_ensemble(2, 0.0, 200.0, 12, 0);
    // Compare mode-1 innovations with mode-2 innovations at common times.
    const auto& m1 = ens.modes[0].x1;
    const auto& m2 = ens.modes[1].x1;
    const std::size_t ratio = step_count(m1.dt, m2.dt);
    const auto t1 = exact_transition(1.0, m1.dt);
    const auto t2 = exact_transition(4.0, m1.dt);
    std::vector<double> a, b;
    for (std::size_t k = 0; k + 1 < m1.size(); ++k) {
        a.push_back(m1.values[k + 1] - t1.factor * m1.values[k]);
        b.push_back(m2.values[(k + 1) * ratio] - t2.factor * m2.values[k * ratio]);
    }
    CHECK(std::abs(oracle::correlation(a, b)) < 3.0 / std::sqrt(double(a.size())));
}

TEST_CASE("ou_covariance values") {
    CHECK(ou_covariance(1.0, 1.0, 1.0) == Approx(0.432332).margin(1e-6));
    CHECK(ou_covariance(1.0, 0.0, 3.0) == 0.0);
    CHECK(ou_covariance(2.0, 3.0, 0.0) == 0.0);
    CHECK(ou_covariance(1.0, 1.0, 2.0) == Approx(std::exp(-3.0) * (std::exp(2.0) - 1) / 2).epsilon(1e-14));
    CHECK(ou_covariance(1.0, 1.0, 2.0) == Approx(0.159046).margin(1e-6));
    for (double th : {0.3, 1.0, 7.0})
        for (double s : {0.01, 0.5, 2.0, 9.0})
            for (double t : {0.02, 1.0, 4.0}) {
                CHECK(ou_covariance(th, s, t) == Approx(oracle::ou_cov(th, s, t)).epsilon(1e-12));
                CHECK(ou_covariance(th, s, t) == ou_covariance(th, t, s));
            }
    CHECK_THROWS_AS(ou_covariance(0.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(ou_covariance(1.0, -1.0, 1.0), DomainError);
}

TEST_CASE("sample covariance matches ou_covariance within 4 SE") {
    const std::size_t n = 100000;
    const double theta = 2.0;
    std::vector<double> xs(n), xt(n);
    for (std::size_t i = 0; i < n; ++i) {
        NormalSource z(31, i, 0);
        const auto p = simulate_ou(theta, 3.0, 0.025, z);
        xs[i] = p.values[20];   // t = 0.5
        xt[i] = p.values.back();  // t = 3
    }
    const double c = oracle::covariance(xs, xt);
    std::vector<double> prod(n);
    const double ms = oracle::mean(xs), mt = oracle::mean(xt);
    for (std::size_t i = 0; i < n; ++i) prod[i] = (xs[i] - ms) * (xt[i] - mt);
    const double se = std::sqrt(oracle::variance(prod) / double(n));
    CHECK(std::abs(c - ou_covariance(theta, 0.5, 3.0)) < 4 * se);
}

TEST_CASE("mean functional variance") {
    auto quad = [](double theta, double T) {
        return oracle::integrate([&](double u) { return std::pow(1 - std::exp(-theta * (T - u)), 2); }, 0.0, T) /
               (T * T * theta * theta);
    };
    CHECK(mean_functional_variance(1.0, 10.0) == Approx(0.0850009).margin(1e-7));
    for (double th : {0.2, 1.0, 3.0})
        for (double T : {0.5, 10.0, 100.0}) {
            CHECK(mean_functional_variance(th, T) == Approx(quad(th, T)).epsilon(1e-10));
            CHECK(mean_functional_variance(th, T) <= 1.0 / (th * th * T));
        }
    CHECK(1e6 * mean_functional_variance(2.0, 1e6) == Approx(0.25).epsilon(1e-5));
}

TEST_CASE("pair CSV format") {
    CorrelatedPairConfig c{1.0, 0.5, 1.0, 0.25, 1, 1.0};
    const auto p = simulate_correlated_pair(c);
    std::ostringstream out;
    write_pair_csv(out, p);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x1,x2");
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "0,0,0");
    CHECK(rows[4].rfind("1,", 0) == 0);
    const auto last = rows[2];
    const auto c1 = last.find(','), c2 = last.rfind(',');
    CHECK(std::stod(last.substr(c1 + 1, c2 - c1 - 1)) == p.x1.values[2]);
    CHECK(std::stod(last.substr(c2 + 1)) == p.x2.values[2]);
}
