#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "yule/estimators.hpp"

namespace yule {

enum class TestVariant {
    rho_known_theta,       // sqrt(T) |rho| > q / sqrt(theta)
    rho_estimated_theta,   // sqrt(T theta_hat) |rho| > q
    numerator_known_theta  // |Y12 / sqrt(T)| > q / (2 theta^{3/2})
};

std::string_view to_string(TestVariant v) noexcept;
// Accepts the enum spelling or the short CLI names rho, rho-est, numerator.
TestVariant parse_test_variant(std::string_view s);

// Rejection is |statistic| > threshold, strictly; ties keep H0.
struct TestOutcome {
    double statistic = 0.0;
    double threshold = 0.0;
    double alpha = 0.05;
    bool reject = false;
    TestVariant variant = TestVariant::rho_known_theta;
};

TestOutcome rho_test(const YuleStatistics& stats, double theta, double alpha);
TestOutcome rho_test_estimated_theta(const YuleStatistics& stats, double alpha);
TestOutcome numerator_test(double numerator_stat, double theta, double alpha);

// Dispatch on variant. `theta` is ignored by rho_estimated_theta.
TestOutcome run_test(TestVariant variant, const YuleStatistics& stats, double theta, double alpha);

enum class ThetaMode { known, estimated };

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double alpha = 0.05;
    ThetaMode theta_mode = ThetaMode::known;

    double center() const noexcept { return 0.5 * (lower + upper); }
    bool contains(double r) const noexcept { return lower <= r && r <= upper; }
};

// rho(T) -/+ q sqrt(1 + rho^2) / sqrt(theta T), theta replaced by theta_hat in
// estimated mode.
ConfidenceInterval confidence_interval_r(const YuleStatistics& stats, double alpha, ThetaMode mode,
                                         std::optional<double> theta = std::nullopt);

struct MultiModeOutcome {
    std::vector<TestOutcome> per_mode;  // per_mode[k-1] tested with theta = k^2
    bool reject_any = false;
    std::size_t n_modes = 0;
    double per_mode_alpha = 0.05;
};

// Level-alpha test on each mode, reject H0 when any mode rejects. With
// `sidak` the per-mode level becomes 1 - (1 - alpha)^{1/N}, which makes the
// family-wise level alpha under independence of the modes.
MultiModeOutcome spde_multimode_test(std::span<const YuleStatistics> mode_stats, double alpha,
                                     TestVariant variant, bool sidak = false);

double sidak_level(double alpha, std::size_t n_tests);

// Type-II error bounds. Each is a Gaussian-tail term plus a caller-supplied
// Berry-Esseen constant times the rate (T^{-1/4} for rho, ln T / sqrt(T) for
// the numerator).
struct Type2BoundTerms {
    double gaussian_tail;
    double berry_term;
    double total() const noexcept { return gaussian_tail + berry_term; }
};

Type2BoundTerms type2_bound_rho_terms(double theta, double r, double alpha, double horizon, double berry_constant);
double type2_bound_rho(double theta, double r, double alpha, double horizon, double berry_constant);

Type2BoundTerms type2_bound_numerator_terms(double theta, double r, double alpha, double horizon,
                                            double berry_constant);
double type2_bound_numerator(double theta, double r, double alpha, double horizon, double berry_constant);

// Horizon beyond which the numerator Gaussian-tail estimate applies,
// 4 theta^2 c_alpha^2 / r^2 with c_alpha = q / (2 theta^{3/2}).
double numerator_bound_validity_horizon(double theta, double r, double alpha);

// Smallest berry_constant for which the bound covers an observed type-II
// error at one horizon: max(0, (beta - tail) / rate).
double calibrate_berry_constant_rho(double theta, double r, double alpha, double horizon, double observed_beta);
double calibrate_berry_constant_numerator(double theta, double r, double alpha, double horizon,
                                          double observed_beta);

// Product of per-mode bounds, each clamped to [0, 1].
double spde_type2_bound(std::span<const double> per_mode_bounds);

}  // namespace yule
