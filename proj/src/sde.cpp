#include "yule/sde.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "yule/error.hpp"
#include "yule/format.hpp"

namespace yule {

using detail::require;

void SamplePath::validate() const {
    require(dt > 0.0 && std::isfinite(dt), "path dt must be positive");
    require(!values.empty(), "path must contain at least one value");
    require(std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); }),
            "path values must be finite");
}

bool same_grid(const SamplePath& a, const SamplePath& b) noexcept {
    return a.size() == b.size() && a.dt == b.dt && a.t0 == b.t0;
}

void CorrelatedPairConfig::validate() const {
    require(theta > 0.0 && std::isfinite(theta), "theta must be positive");
    require(std::abs(r) <= 1.0, "r must lie in [-1, 1]");
    require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
    require(horizon >= dt, "horizon T must be at least dt");
    require(step_cap > 0.0, "step cap must be positive");
    require(dt * theta <= step_cap * (1.0 + 1e-12),
            "dt exceeds step cap / theta (" + std::to_string(step_cap) + " / theta)");
    step_count(horizon, dt);
}

double fitted_step(double theta, double horizon, double step_cap) {
    require(theta > 0.0, "theta must be positive");
    require(horizon > 0.0, "horizon must be positive");
    require(step_cap > 0.0, "step cap must be positive");
    const double steps = std::ceil(horizon * theta / step_cap - 1e-9);
    return horizon / std::max(1.0, steps);
}

std::size_t step_count(double horizon, double dt) {
    require(dt > 0.0, "dt must be positive");
    require(horizon >= dt * (1.0 - 1e-12), "horizon T must be at least dt");
    const double ratio = horizon / dt;
    const double n = std::round(ratio);
    require(std::abs(ratio - n) <= 1e-6 * std::max(1.0, n),
            "horizon T must be a whole multiple of dt");
    return static_cast<std::size_t>(n);
}

OuTransition exact_transition(double theta, double dt) {
    require(theta > 0.0, "theta must be positive");
    require(dt >= 0.0, "dt must be nonnegative");
    const double factor = std::exp(-theta * dt);
    // (1 - e^{-2 theta dt}) / (2 theta), written with expm1 for small steps.
    const double variance = -std::expm1(-2.0 * theta * dt) / (2.0 * theta);
    return {factor, std::sqrt(variance)};
}

SamplePath simulate_ou(double theta, double horizon, double dt, NormalSource& noise) {
    require(theta > 0.0 && std::isfinite(theta), "theta must be positive");
    require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
    const std::size_t n = step_count(horizon, dt);
    const auto [a, s] = exact_transition(theta, dt);

    SamplePath path{0.0, dt, std::vector<double>(n + 1)};
    double x = 0.0;
    path.values[0] = x;
    for (std::size_t k = 1; k <= n; ++k) {
        x = a * x + s * noise();
        path.values[k] = x;
    }
    return path;
}

OuPair simulate_correlated_pair(const CorrelatedPairConfig& config, NormalSource& w1, NormalSource& w0) {
    config.validate();
    const std::size_t n = step_count(config.horizon, config.dt);
    const auto [a, s] = exact_transition(config.theta, config.dt);
    const double r = config.r;
    const double rc = std::sqrt(std::max(0.0, 1.0 - r * r));

    OuPair pair{SamplePath{0.0, config.dt, std::vector<double>(n + 1)},
                SamplePath{0.0, config.dt, std::vector<double>(n + 1)}, config};
    double* x1 = pair.x1.values.data();
    double* x2 = pair.x2.values.data();
    x1[0] = 0.0;
    x2[0] = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double e1 = w1();
        const double e0 = w0();
        x1[k] = a * x1[k - 1] + s * e1;
        x2[k] = a * x2[k - 1] + s * (r * e1 + rc * e0);
    }
    return pair;
}

OuPair simulate_correlated_pair(const CorrelatedPairConfig& config, std::uint64_t replication) {
    NormalSource w1(config.seed, replication, 0);
    NormalSource w0(config.seed, replication, 1);
    return simulate_correlated_pair(config, w1, w0);
}

OuPair simulate_spde_mode(std::size_t k, double r, double horizon, std::uint64_t seed,
                          std::uint64_t replication, double step_cap) {
    require(k >= 1, "mode index starts at 1");
    const double theta = static_cast<double>(k * k);
    CorrelatedPairConfig cfg{theta, r, horizon, fitted_step(theta, horizon, step_cap), seed, step_cap};
    const auto process = static_cast<std::uint32_t>(2 * (k - 1));
    NormalSource w1(seed, replication, process);
    NormalSource w0(seed, replication, process + 1);
    return simulate_correlated_pair(cfg, w1, w0);
}

SpdeModeEnsemble simulate_spde_ensemble(std::size_t n_modes, double r, double horizon, std::uint64_t seed,
                                        std::uint64_t replication, double step_cap) {
    require(n_modes >= 1, "number of modes N must be at least 1");
    SpdeModeEnsemble ensemble;
    ensemble.modes.reserve(n_modes);
    for (std::size_t k = 1; k <= n_modes; ++k)
        ensemble.modes.push_back(simulate_spde_mode(k, r, horizon, seed, replication, step_cap));
    return ensemble;
}

double ou_covariance(double theta, double s, double t) {
    require(theta > 0.0, "theta must be positive");
    require(s >= 0.0 && t >= 0.0, "times must be nonnegative");
    const double lo = std::min(s, t);
    return std::exp(-theta * std::abs(t - s)) * -std::expm1(-2.0 * theta * lo) / (2.0 * theta);
}

double mean_functional_variance(double theta, double horizon) {
    require(theta > 0.0, "theta must be positive");
    require(horizon > 0.0, "horizon must be positive");
    const double T = horizon;
    const double a = -std::expm1(-theta * T);
    const double b = -std::expm1(-2.0 * theta * T);
    return (T - 2.0 * a / theta + b / (2.0 * theta)) / (theta * theta * T * T);
}

void write_pair_csv(std::ostream& out, const OuPair& pair) {
    require(same_grid(pair.x1, pair.x2), "pair paths must share a grid");
    std::string line;
    out << "t,x1,x2\n";
    for (std::size_t k = 0; k < pair.x1.size(); ++k) {
        line.clear();
        append_double(line, pair.x1.time(k));
        line += ',';
        append_double(line, pair.x1.values[k]);
        line += ',';
        append_double(line, pair.x2.values[k]);
        line += '\n';
        out << line;
    }
}

}  // namespace yule
