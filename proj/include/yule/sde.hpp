#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "yule/rng.hpp"

namespace yule {

// Largest admissible theta*dt. Keeps trapezoid error of the path functionals
// well below Monte Carlo noise.
inline constexpr double kDefaultStepCap = 0.05;

// Discretely observed scalar path on the uniform grid t0 + k*dt.
struct SamplePath {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    // Length of the observation window, (size - 1) * dt.
    double horizon() const noexcept { return values.empty() ? 0.0 : static_cast<double>(values.size() - 1) * dt; }
    double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }

    // Throws DomainError unless dt > 0, values nonempty and all finite.
    void validate() const;
};

bool same_grid(const SamplePath& a, const SamplePath& b) noexcept;

struct CorrelatedPairConfig {
    double theta = 1.0;
    double r = 0.0;
    double horizon = 1.0;
    double dt = 0.01;
    std::uint64_t seed = 0;
    double step_cap = kDefaultStepCap;

    void validate() const;
};

// Largest dt <= step_cap / theta that divides the horizon into whole steps.
double fitted_step(double theta, double horizon, double step_cap = kDefaultStepCap);

// Number of steps T/dt; throws unless T is a whole multiple of dt.
std::size_t step_count(double horizon, double dt);

struct OuPair {
    SamplePath x1;
    SamplePath x2;
    CorrelatedPairConfig config;
};

struct SpdeModeEnsemble {
    std::vector<OuPair> modes;  // modes[k-1] has theta = k^2
    std::size_t n_modes() const noexcept { return modes.size(); }
};

// One step of the exact OU transition X(t+dt) = factor*X(t) + innovation_sd*xi.
struct OuTransition {
    double factor;
    double innovation_sd;
};

OuTransition exact_transition(double theta, double dt);

// Zero-start OU path on [0, horizon], exact in distribution on the grid.
SamplePath simulate_ou(double theta, double horizon, double dt, NormalSource& noise);

// Pair driven by W1 and W2 = r*W1 + sqrt(1-r^2)*W0. Exposed with explicit
// noise sources for callers that manage streams themselves.
OuPair simulate_correlated_pair(const CorrelatedPairConfig& config, NormalSource& w1, NormalSource& w0);

// Stream convention: W1 = process 0 and W0 = process 1 of (seed, replication).
OuPair simulate_correlated_pair(const CorrelatedPairConfig& config, std::uint64_t replication = 0);

// Fourier modes of the stochastic heat equation: mode k is an OU pair with
// theta = k^2, driven by processes 2(k-1) and 2(k-1)+1 of (seed, replication).
// Each mode uses dt = fitted_step(k^2, horizon, step_cap).
SpdeModeEnsemble simulate_spde_ensemble(std::size_t n_modes, double r, double horizon, std::uint64_t seed,
                                        std::uint64_t replication = 0, double step_cap = kDefaultStepCap);

// Simulates only mode k (1-based) of the ensemble above.
OuPair simulate_spde_mode(std::size_t k, double r, double horizon, std::uint64_t seed,
                          std::uint64_t replication = 0, double step_cap = kDefaultStepCap);

// Cov(X(s), X(t)) for the zero-start OU process.
double ou_covariance(double theta, double s, double t);

// E[Xbar(T)^2], variance of the time average (1/T) int_0^T X(u) du.
double mean_functional_variance(double theta, double horizon);

// CSV with header "t,x1,x2", one row per grid node, shortest round-trip
// decimal representation of every double.
void write_pair_csv(std::ostream& out, const OuPair& pair);

}  // namespace yule
