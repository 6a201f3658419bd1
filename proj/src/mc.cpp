#include "yule/mc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <thread>

#include "yule/error.hpp"
#include "yule/normal.hpp"
#include "yule/theory.hpp"

namespace yule {

using detail::require;

std::string_view to_string(Statistic s) noexcept {
    switch (s) {
        case Statistic::rho_centered: return "rho_centered";
        case Statistic::numerator_centered: return "numerator_centered";
        case Statistic::theta_hat_centered: return "theta_hat_centered";
        case Statistic::ybar_centered: return "ybar_centered";
    }
    return "unknown";
}

Statistic parse_statistic(std::string_view s) {
    if (s == "rho_centered") return Statistic::rho_centered;
    if (s == "numerator_centered") return Statistic::numerator_centered;
    if (s == "theta_hat_centered") return Statistic::theta_hat_centered;
    if (s == "ybar_centered") return Statistic::ybar_centered;
    throw DomainError("unknown statistic '" + std::string(s) + "'");
}

double standardize(Statistic s, const YuleStatistics& stats, double theta, double r) {
    const double T = stats.horizon;
    const double rt = std::sqrt(T);
    switch (s) {
        case Statistic::rho_centered:
            return rt * (stats.rho - r) / std::sqrt(theory::clt_variance_rho(theta, r));
        case Statistic::numerator_centered:
            return (stats.y12 / rt - r * rt / (2.0 * theta)) / theory::chaos_constants(theta, r).sigma;
        case Statistic::theta_hat_centered:
            return rt * (stats.theta_hat - theta) / std::sqrt(2.0 * theta);
        case Statistic::ybar_centered:
            return rt * (2.0 * theta * stats.y11 / T - 1.0) / std::sqrt(2.0 / theta);
    }
    throw DomainError("unknown statistic");
}

double DtPolicy::step_for(double theta, double horizon) const {
    if (fixed_dt) {
        step_count(horizon, *fixed_dt);
        return *fixed_dt;
    }
    return fitted_step(theta, horizon, step_cap);
}

void ExperimentGrid::validate() const {
    require(!thetas.empty() && !rs.empty() && !horizons.empty(), "experiment grid axes must be nonempty");
    require(replications >= 1, "replications must be at least 1");
    for (double th : thetas) require(th > 0.0 && std::isfinite(th), "grid theta values must be positive");
    for (double r : rs) require(r >= -1.0 && r <= 1.0, "grid r values must lie in [-1, 1]");
    for (double T : horizons) require(T > 0.0 && std::isfinite(T), "grid horizons must be positive");
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    require(dt_policy.step_cap > 0.0, "step cap must be positive");
    if (dt_policy.fixed_dt) require(*dt_policy.fixed_dt > 0.0, "dt must be positive");
}

std::vector<GridCell> grid_cells(const ExperimentGrid& grid) {
    std::vector<GridCell> cells;
    cells.reserve(grid.cell_count());
    for (double th : grid.thetas)
        for (double r : grid.rs)
            for (double T : grid.horizons) cells.push_back({cells.size(), th, r, T});
    return cells;
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t cell_index) noexcept {
    return mix_seed(base_seed, static_cast<std::uint64_t>(cell_index));
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = n * w / workers;
        const std::size_t end = n * (w + 1) / workers;
        threads.emplace_back([&, w, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::vector<YuleStatistics> simulate_replications(const CorrelatedPairConfig& config, std::size_t n,
                                                  unsigned jobs) {
    config.validate();
    std::vector<YuleStatistics> out(n);
    parallel_for(n, jobs, [&](std::size_t i) { out[i] = yule_rho(simulate_correlated_pair(config, i)); });
    return out;
}

std::vector<std::vector<YuleStatistics>> simulate_spde_replications(std::size_t n_modes, double r,
                                                                    double horizon, std::uint64_t seed,
                                                                    std::size_t n, unsigned jobs,
                                                                    double step_cap) {
    require(n_modes >= 1, "number of modes must be positive");
    std::vector<std::vector<YuleStatistics>> out(n_modes, std::vector<YuleStatistics>(n));
    parallel_for(n, jobs, [&](std::size_t i) {
        for (std::size_t k = 1; k <= n_modes; ++k)
            out[k - 1][i] = yule_rho(simulate_spde_mode(k, r, horizon, seed, i, step_cap));
    });
    return out;
}

KStatistics k_statistics(std::span<const double> samples) {
    const std::size_t count = samples.size();
    if (count < 4) throw InsufficientDataError("k-statistics need at least 4 samples");
    const double n = static_cast<double>(count);
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (double x : samples) {
        const double d = x - mean;
        const double d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    const double m2 = s2 / n, m3 = s3 / n, m4 = s4 / n;
    KStatistics k{};
    k.k2 = n * m2 / (n - 1.0);
    k.k3 = n * n * m3 / ((n - 1.0) * (n - 2.0));
    k.k4 = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) / ((n - 1.0) * (n - 2.0) * (n - 3.0));
    return k;
}

double kolmogorov_distance(std::span<const double> samples) {
    if (samples.empty()) throw InsufficientDataError("Kolmogorov distance needs at least one sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double F = normal_cdf(sorted[i]);
        const double above = static_cast<double>(i + 1) / n - F;
        const double below = F - static_cast<double>(i) / n;
        d = std::max({d, above, below});
    }
    return std::clamp(d, 0.0, 1.0);
}

RateEstimate wilson_interval(std::size_t successes, std::size_t n, double alpha) {
    if (n == 0) throw InsufficientDataError("rate estimate needs at least one trial");
    require(successes <= n, "successes cannot exceed trials");
    const double z = two_sided_critical_value(alpha);
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    RateEstimate e;
    e.rate = p;
    e.n = n;
    e.rejections = successes;
    e.ci_lower = successes == 0 ? 0.0 : std::clamp(center - half, 0.0, p);
    e.ci_upper = successes == n ? 1.0 : std::clamp(center + half, p, 1.0);
    return e;
}

RateEstimate error_rates(std::span<const TestOutcome> outcomes, Truth) {
    const auto hits = std::count_if(outcomes.begin(), outcomes.end(), [](const TestOutcome& o) { return o.reject; });
    return wilson_interval(static_cast<std::size_t>(hits), outcomes.size());
}

RateEstimate error_rates(std::span<const MultiModeOutcome> outcomes, Truth) {
    const auto hits =
        std::count_if(outcomes.begin(), outcomes.end(), [](const MultiModeOutcome& o) { return o.reject_any; });
    return wilson_interval(static_cast<std::size_t>(hits), outcomes.size());
}

RateFit rate_fit(std::span<const std::pair<double, double>> points) {
    if (points.size() < 3) throw InsufficientDataError("rate fit needs at least 3 points");
    double sx = 0.0, sy = 0.0;
    std::vector<double> lx, ly;
    for (const auto& [T, v] : points) {
        require(T > 0.0, "rate fit horizons must be positive");
        require(v > 0.0, "rate fit values must be positive");
        lx.push_back(std::log(T));
        ly.push_back(std::log(v));
        sx += lx.back();
        sy += ly.back();
    }
    const double n = static_cast<double>(points.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    require(sxx > 0.0, "rate fit needs at least two distinct horizons");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

McReport summarize(std::span<const double> samples, std::span<const bool> rejections, double theta, double r,
                   double horizon) {
    if (samples.empty()) throw InsufficientDataError("cannot summarize an empty sample");
    McReport rep;
    rep.theta = theta;
    rep.r = r;
    rep.horizon = horizon;
    rep.n = samples.size();
    rep.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(rep.n);
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    if (rep.n >= 4) {
        const auto k = k_statistics(samples);
        rep.variance = k.k2;
        rep.k3 = k.k3;
        rep.k4 = k.k4;
    } else {
        rep.cumulants_defined = false;
        rep.k3 = rep.k4 = nan;
        if (rep.n >= 2) {
            double s = 0.0;
            for (double x : samples) s += (x - rep.mean) * (x - rep.mean);
            rep.variance = s / static_cast<double>(rep.n - 1);
        } else {
            rep.variance = nan;
            rep.variance_defined = false;
        }
    }
    rep.d_kol = kolmogorov_distance(samples);
    if (!rejections.empty()) {
        const auto hits = static_cast<std::size_t>(std::count(rejections.begin(), rejections.end(), true));
        const auto rate = wilson_interval(hits, rejections.size());
        rep.reject_rate = rate.rate;
        rep.ci_lo = rate.ci_lower;
        rep.ci_hi = rate.ci_upper;
    }
    return rep;
}

std::vector<McReport> run_grid(const ExperimentGrid& grid, const RunOptions& options) {
    grid.validate();
    const auto cells = grid_cells(grid);
    std::vector<McReport> reports;
    reports.reserve(cells.size());
    for (const auto& cell : cells) {
        try {
            CorrelatedPairConfig cfg;
            cfg.theta = cell.theta;
            cfg.r = cell.r;
            cfg.horizon = cell.horizon;
            cfg.step_cap = grid.dt_policy.step_cap;
            cfg.dt = grid.dt_policy.step_for(cell.theta, cell.horizon);
            cfg.seed = cell_seed(grid.base_seed, cell.index);
            const std::size_t nodes = step_count(cfg.horizon, cfg.dt) + 1;
            if (nodes > options.max_path_nodes)
                throw DomainError("path would need " + std::to_string(nodes) + " grid nodes, limit is " +
                                  std::to_string(options.max_path_nodes));
            cfg.validate();
            const auto stats = simulate_replications(cfg, grid.replications, options.jobs);
            std::vector<double> samples(stats.size());
            std::unique_ptr<bool[]> rejects(new bool[stats.size()]);
            for (std::size_t i = 0; i < stats.size(); ++i) {
                samples[i] = standardize(grid.statistic, stats[i], cell.theta, cell.r);
                rejects[i] = run_test(grid.test_variant, stats[i], cell.theta, grid.alpha).reject;
            }
            reports.push_back(summarize(samples, std::span<const bool>(rejects.get(), stats.size()), cell.theta,
                                        cell.r, cell.horizon));
        } catch (const std::exception& e) {
            McReport failed;
            failed.theta = cell.theta;
            failed.r = cell.r;
            failed.horizon = cell.horizon;
            failed.ok = false;
            failed.variance_defined = false;
            failed.cumulants_defined = false;
            constexpr double nan = std::numeric_limits<double>::quiet_NaN();
            failed.mean = failed.variance = failed.k3 = failed.k4 = failed.d_kol = nan;
            failed.reject_rate = failed.ci_lo = failed.ci_hi = nan;
            failed.diagnostic = e.what();
            reports.push_back(std::move(failed));
        }
        if (options.progress) options.progress(reports.size(), cells.size());
    }
    return reports;
}

void SpdeExperiment::validate() const {
    require(n_modes >= 1, "number of modes must be positive");
    require(r >= -1.0 && r <= 1.0, "r must lie in [-1, 1]");
    require(horizon > 0.0 && std::isfinite(horizon), "horizon T must be positive");
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    require(replications >= 1, "replications must be at least 1");
    require(step_cap > 0.0, "step cap must be positive");
}

SpdeReport run_spde(const SpdeExperiment& ex, unsigned jobs) {
    ex.validate();
    const auto stats =
        simulate_spde_replications(ex.n_modes, ex.r, ex.horizon, ex.base_seed, ex.replications, jobs, ex.step_cap);
    std::vector<MultiModeOutcome> outcomes(ex.replications);
    std::vector<YuleStatistics> modes(ex.n_modes);
    for (std::size_t i = 0; i < ex.replications; ++i) {
        for (std::size_t k = 0; k < ex.n_modes; ++k) modes[k] = stats[k][i];
        outcomes[i] = spde_multimode_test(modes, ex.alpha, ex.variant, ex.sidak);
    }
    SpdeReport report;
    report.family = error_rates(outcomes, ex.r == 0.0 ? Truth::H0 : Truth::Ha);
    report.per_mode_alpha = ex.sidak ? sidak_level(ex.alpha, ex.n_modes) : ex.alpha;
    for (std::size_t k = 0; k < ex.n_modes; ++k) {
        const double theta = static_cast<double>((k + 1) * (k + 1));
        std::vector<double> samples(ex.replications);
        std::unique_ptr<bool[]> rejects(new bool[ex.replications]);
        for (std::size_t i = 0; i < ex.replications; ++i) {
            samples[i] = standardize(ex.statistic, stats[k][i], theta, ex.r);
            rejects[i] = outcomes[i].per_mode[k].reject;
        }
        report.per_mode.push_back(summarize(samples, std::span<const bool>(rejects.get(), ex.replications), theta,
                                            ex.r, ex.horizon));
    }
    report.outcomes = std::move(outcomes);
    return report;
}

}  // namespace yule
