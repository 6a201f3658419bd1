#include "yule/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "yule/error.hpp"
#include "yule/normal.hpp"
#include "yule/theory.hpp"

namespace yule {

using detail::require;

std::string_view to_string(TestVariant v) noexcept {
    switch (v) {
        case TestVariant::rho_known_theta: return "rho_known_theta";
        case TestVariant::rho_estimated_theta: return "rho_estimated_theta";
        case TestVariant::numerator_known_theta: return "numerator_known_theta";
    }
    return "unknown";
}

TestVariant parse_test_variant(std::string_view s) {
    if (s == "rho" || s == "rho_known_theta") return TestVariant::rho_known_theta;
    if (s == "rho-est" || s == "rho_estimated_theta") return TestVariant::rho_estimated_theta;
    if (s == "numerator" || s == "numerator_known_theta") return TestVariant::numerator_known_theta;
    throw DomainError("unknown test variant '" + std::string(s) + "'");
}

namespace {

void check_theta(double theta) { require(theta > 0.0 && std::isfinite(theta), "theta must be positive"); }

TestOutcome decide(double statistic, double threshold, double alpha, TestVariant v) {
    return {statistic, threshold, alpha, std::abs(statistic) > threshold, v};
}

}  // namespace

TestOutcome rho_test(const YuleStatistics& stats, double theta, double alpha) {
    check_theta(theta);
    const double q = two_sided_critical_value(alpha);
    return decide(std::sqrt(stats.horizon) * stats.rho, q / std::sqrt(theta), alpha,
                  TestVariant::rho_known_theta);
}

TestOutcome rho_test_estimated_theta(const YuleStatistics& stats, double alpha) {
    const double q = two_sided_critical_value(alpha);
    if (!(stats.theta_hat > 0.0) || !std::isfinite(stats.theta_hat))
        throw DegenerateDenominatorError("theta_hat is not a positive finite number");
    return decide(std::sqrt(stats.horizon * stats.theta_hat) * stats.rho, q, alpha,
                  TestVariant::rho_estimated_theta);
}

TestOutcome numerator_test(double numerator_stat, double theta, double alpha) {
    check_theta(theta);
    const double q = two_sided_critical_value(alpha);
    return decide(numerator_stat, q / (2.0 * std::pow(theta, 1.5)), alpha, TestVariant::numerator_known_theta);
}

TestOutcome run_test(TestVariant variant, const YuleStatistics& stats, double theta, double alpha) {
    switch (variant) {
        case TestVariant::rho_known_theta: return rho_test(stats, theta, alpha);
        case TestVariant::rho_estimated_theta: return rho_test_estimated_theta(stats, alpha);
        case TestVariant::numerator_known_theta:
            return numerator_test(stats.y12 / std::sqrt(stats.horizon), theta, alpha);
    }
    throw DomainError("unknown test variant");
}

ConfidenceInterval confidence_interval_r(const YuleStatistics& stats, double alpha, ThetaMode mode,
                                         std::optional<double> theta) {
    const double q = two_sided_critical_value(alpha);
    double th;
    if (mode == ThetaMode::known) {
        if (!theta) throw DomainError("known-theta interval requires theta");
        check_theta(*theta);
        th = *theta;
    } else {
        if (!(stats.theta_hat > 0.0)) throw DegenerateDenominatorError("theta_hat is not positive");
        th = stats.theta_hat;
    }
    const double half = q * std::sqrt(1.0 + stats.rho * stats.rho) / std::sqrt(th * stats.horizon);
    return {stats.rho - half, stats.rho + half, alpha, mode};
}

double sidak_level(double alpha, std::size_t n_tests) {
    require(alpha > 0.0 && alpha < 1.0, "significance level alpha must lie in (0, 1)");
    require(n_tests >= 1, "number of tests must be positive");
    return -std::expm1(std::log1p(-alpha) / static_cast<double>(n_tests));
}

MultiModeOutcome spde_multimode_test(std::span<const YuleStatistics> mode_stats, double alpha,
                                     TestVariant variant, bool sidak) {
    if (mode_stats.empty()) throw DomainError("multi-mode test needs at least one mode");
    MultiModeOutcome out;
    out.n_modes = mode_stats.size();
    out.per_mode_alpha = sidak ? sidak_level(alpha, out.n_modes) : alpha;
    out.per_mode.reserve(out.n_modes);
    for (std::size_t i = 0; i < out.n_modes; ++i) {
        const double k = static_cast<double>(i + 1);
        out.per_mode.push_back(run_test(variant, mode_stats[i], k * k, out.per_mode_alpha));
        out.reject_any = out.reject_any || out.per_mode.back().reject;
    }
    return out;
}

namespace {

void check_alternative(double theta, double r, double horizon) {
    check_theta(theta);
    require(std::abs(r) <= 1.0, "r must lie in [-1, 1]");
    require(r != 0.0, "type-II bound is defined only under the alternative r != 0");
    require(horizon > 0.0, "horizon T must be positive");
}

}  // namespace

Type2BoundTerms type2_bound_rho_terms(double theta, double r, double alpha, double horizon,
                                      double berry_constant) {
    check_alternative(theta, r, horizon);
    const double c_alpha = two_sided_critical_value(alpha) / std::sqrt(theta);
    const double sigma = theory::chaos_constants(theta, r).sigma;
    const double z = (c_alpha - std::abs(r) * std::sqrt(horizon)) / sigma;
    const double tail = 2.0 * c_alpha / (sigma * std::sqrt(2.0 * std::numbers::pi)) * std::exp(-0.5 * z * z);
    return {tail, berry_constant * std::pow(horizon, -0.25)};
}

double type2_bound_rho(double theta, double r, double alpha, double horizon, double berry_constant) {
    return type2_bound_rho_terms(theta, r, alpha, horizon, berry_constant).total();
}

Type2BoundTerms type2_bound_numerator_terms(double theta, double r, double alpha, double horizon,
                                            double berry_constant) {
    check_alternative(theta, r, horizon);
    require(horizon > std::numbers::e, "numerator bound requires T > e");
    const double c_alpha = two_sided_critical_value(alpha) / (2.0 * std::pow(theta, 1.5));
    const double sigma = theory::chaos_constants(theta, r).sigma;
    const double z = (c_alpha - std::abs(r) * std::sqrt(horizon) / (2.0 * theta)) / sigma;
    const double tail = std::sqrt(2.0 / std::numbers::pi) * (c_alpha / sigma) * std::exp(-0.5 * z * z);
    return {tail, berry_constant * std::log(horizon) / std::sqrt(horizon)};
}

double type2_bound_numerator(double theta, double r, double alpha, double horizon, double berry_constant) {
    return type2_bound_numerator_terms(theta, r, alpha, horizon, berry_constant).total();
}

double numerator_bound_validity_horizon(double theta, double r, double alpha) {
    check_alternative(theta, r, 1.0);
    const double c_alpha = two_sided_critical_value(alpha) / (2.0 * std::pow(theta, 1.5));
    return 4.0 * theta * theta * c_alpha * c_alpha / (r * r);
}

double calibrate_berry_constant_rho(double theta, double r, double alpha, double horizon, double observed_beta) {
    const auto terms = type2_bound_rho_terms(theta, r, alpha, horizon, 1.0);
    return std::max(0.0, (observed_beta - terms.gaussian_tail) / terms.berry_term);
}

double calibrate_berry_constant_numerator(double theta, double r, double alpha, double horizon,
                                          double observed_beta) {
    const auto terms = type2_bound_numerator_terms(theta, r, alpha, horizon, 1.0);
    return std::max(0.0, (observed_beta - terms.gaussian_tail) / terms.berry_term);
}

double spde_type2_bound(std::span<const double> per_mode_bounds) {
    if (per_mode_bounds.empty()) throw DomainError("SPDE type-II bound needs at least one mode");
    double product = 1.0;
    for (double b : per_mode_bounds) {
        require(!std::isnan(b), "per-mode bound must be a number");
        product *= std::clamp(b, 0.0, 1.0);
    }
    return product;
}

}  // namespace yule
