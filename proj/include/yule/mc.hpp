#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "yule/estimators.hpp"
#include "yule/hypothesis.hpp"

namespace yule {

enum class Statistic {
    rho_centered,        // sqrt(T) (rho - r) / sqrt((1 + r^2) / theta)
    numerator_centered,  // (Y12 / sqrt(T) - r sqrt(T) / (2 theta)) / sigma
    theta_hat_centered,  // sqrt(T) (theta_hat - theta) / sqrt(2 theta)
    ybar_centered,       // sqrt(T) (2 theta Y11 / T - 1) / sqrt(2 / theta)
};

std::string_view to_string(Statistic s) noexcept;
Statistic parse_statistic(std::string_view s);

double standardize(Statistic s, const YuleStatistics& stats, double theta, double r);

// Step rule for a cell: a fixed dt when given, else fitted_step(theta, T, step_cap).
struct DtPolicy {
    double step_cap = kDefaultStepCap;
    std::optional<double> fixed_dt;

    double step_for(double theta, double horizon) const;
};

struct ExperimentGrid {
    std::vector<double> thetas{1.0};
    std::vector<double> rs{0.0};
    std::vector<double> horizons{100.0};
    DtPolicy dt_policy;
    std::size_t replications = 1000;
    std::uint64_t base_seed = 0;
    Statistic statistic = Statistic::rho_centered;
    TestVariant test_variant = TestVariant::rho_known_theta;
    double alpha = 0.05;

    void validate() const;
    std::size_t cell_count() const noexcept { return thetas.size() * rs.size() * horizons.size(); }
};

struct GridCell {
    std::size_t index = 0;
    double theta = 1.0;
    double r = 0.0;
    double horizon = 1.0;
};

// Cells in theta-major, then r, then T order; index is the position in that order.
std::vector<GridCell> grid_cells(const ExperimentGrid& grid);

// Seed of the streams of one cell; replication i of the cell uses stream
// (cell_seed, i, process).
std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t cell_index) noexcept;

struct McReport {
    double theta = 0.0;
    double r = 0.0;
    double horizon = 0.0;
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;
    double k3 = 0.0;
    double k4 = 0.0;
    double d_kol = 0.0;
    double reject_rate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    bool variance_defined = true;
    bool cumulants_defined = true;
    bool ok = true;
    std::string diagnostic;
};

struct RunOptions {
    unsigned jobs = 1;
    // Cells whose paths would exceed this many grid nodes are skipped with a
    // diagnostic instead of simulated.
    std::size_t max_path_nodes = 20'000'000;
    // Called after each finished cell with (cells done, cells total).
    std::function<void(std::size_t, std::size_t)> progress;
};

std::vector<McReport> run_grid(const ExperimentGrid& grid, const RunOptions& options = {});

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Work is split into
// contiguous chunks; callers write results by index, so output does not depend
// on scheduling. The first exception thrown by any task is rethrown.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

// Statistics of `n` replications of the pair described by `config`,
// replication i drawn from stream (config.seed, i, .). Result i belongs to
// replication i whatever the value of `jobs`.
std::vector<YuleStatistics> simulate_replications(const CorrelatedPairConfig& config, std::size_t n,
                                                  unsigned jobs = 1);

// Per-replication statistics of each SPDE mode: result[k-1][i] is mode k of
// replication i.
std::vector<std::vector<YuleStatistics>> simulate_spde_replications(std::size_t n_modes, double r,
                                                                    double horizon, std::uint64_t seed,
                                                                    std::size_t n, unsigned jobs = 1,
                                                                    double step_cap = kDefaultStepCap);

// Aggregation of a sample of standardized statistics and test decisions.
McReport summarize(std::span<const double> samples, std::span<const bool> rejections, double theta, double r,
                   double horizon);

struct KStatistics {
    double k2;
    double k3;
    double k4;
};

// Unbiased k-statistics of orders 2 to 4. Throws InsufficientDataError for n < 4.
KStatistics k_statistics(std::span<const double> samples);

// Sup distance between the empirical CDF of the samples and Phi.
double kolmogorov_distance(std::span<const double> samples);

enum class Truth { H0, Ha };

struct RateEstimate {
    double rate = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    std::size_t n = 0;
    std::size_t rejections = 0;
};

// Wilson score interval at level 1 - alpha.
RateEstimate wilson_interval(std::size_t successes, std::size_t n, double alpha = 0.05);

// Rejection frequency with a 95% Wilson interval: type-I rate under H0, power under Ha.
RateEstimate error_rates(std::span<const TestOutcome> outcomes, Truth truth);
RateEstimate error_rates(std::span<const MultiModeOutcome> outcomes, Truth truth);

struct RateFit {
    double exponent;
    double intercept;
};

// Least-squares fit of log(value) = intercept + exponent * log(T).
RateFit rate_fit(std::span<const std::pair<double, double>> points);

struct SpdeExperiment {
    std::size_t n_modes = 1;
    double r = 0.0;
    double horizon = 50.0;
    double alpha = 0.05;
    TestVariant variant = TestVariant::rho_known_theta;
    bool sidak = false;
    std::size_t replications = 1000;
    std::uint64_t base_seed = 0;
    double step_cap = kDefaultStepCap;
    Statistic statistic = Statistic::rho_centered;

    void validate() const;
};

struct SpdeReport {
    RateEstimate family;              // any-mode rejection frequency
    std::vector<McReport> per_mode;   // mode k standardized with theta = k^2
    double per_mode_alpha = 0.05;
    std::vector<MultiModeOutcome> outcomes;  // one per replication
};

SpdeReport run_spde(const SpdeExperiment& experiment, unsigned jobs = 1);

}  // namespace yule
