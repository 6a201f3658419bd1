#pragma once

#include "yule/sde.hpp"

namespace yule {

// Path functionals of a pair observed on [0, T]. Time integrals use the
// trapezoidal rule on the observation grid.
struct YuleStatistics {
    double y11 = 0.0;
    double y22 = 0.0;
    double y12 = 0.0;
    double rho = 0.0;
    double theta_hat = 0.0;
    double horizon = 0.0;
};

enum class ThetaHatSource {
    first_path,  // theta_hat from x1
    pooled,      // mean of the estimates from x1 and x2
};

// (1/T) int_0^T X(u) du.
double path_time_average(const SamplePath& path);

// Y_ab(T) = int_0^T a(u) b(u) du - T * abar * bbar. Computed as the trapezoid
// of the centered product, which is the same quantity with less cancellation.
double empirical_cov_functional(const SamplePath& a, const SamplePath& b);

// 1 / (2 * Y_ii(T) / T).
double theta_estimator(const SamplePath& path);

YuleStatistics yule_rho(const OuPair& pair, ThetaHatSource source = ThetaHatSource::first_path);
YuleStatistics yule_rho(const SamplePath& x1, const SamplePath& x2,
                        ThetaHatSource source = ThetaHatSource::first_path);

// Y12(T) / sqrt(T).
double numerator_statistic(const OuPair& pair);
double numerator_statistic(const SamplePath& x1, const SamplePath& x2);

}  // namespace yule
