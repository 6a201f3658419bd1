#include "yule/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "yule/error.hpp"

namespace yule {

namespace {

void check_pair(const SamplePath& a, const SamplePath& b) {
    if (!same_grid(a, b)) throw IncompatibleGridsError("paths are observed on different grids");
    if (a.size() < 2) throw InsufficientDataError("a path needs at least two grid nodes");
}

// Trapezoid of f over the grid, f(k) supplied by the callable.
template <class F>
double trapezoid(std::size_t n, double dt, F&& f) {
    double inner = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) inner += f(k);
    return dt * (inner + 0.5 * (f(0) + f(n - 1)));
}

}  // namespace

double path_time_average(const SamplePath& path) {
    if (path.size() < 2) throw InsufficientDataError("a path needs at least two grid nodes");
    const auto& v = path.values;
    return trapezoid(v.size(), path.dt, [&](std::size_t k) { return v[k]; }) / path.horizon();
}

double empirical_cov_functional(const SamplePath& a, const SamplePath& b) {
    check_pair(a, b);
    const double ma = path_time_average(a);
    const double mb = path_time_average(b);
    const auto& u = a.values;
    const auto& w = b.values;
    return trapezoid(u.size(), a.dt, [&](std::size_t k) { return (u[k] - ma) * (w[k] - mb); });
}

double theta_estimator(const SamplePath& path) {
    const double y = empirical_cov_functional(path, path);
    if (!(y > 0.0)) throw DegenerateDenominatorError("Y_ii(T) vanishes: path is constant");
    return 0.5 * path.horizon() / y;
}

YuleStatistics yule_rho(const SamplePath& x1, const SamplePath& x2, ThetaHatSource source) {
    check_pair(x1, x2);
    YuleStatistics s;
    s.horizon = x1.horizon();
    s.y11 = empirical_cov_functional(x1, x1);
    s.y22 = empirical_cov_functional(x2, x2);
    if (!(s.y11 > 0.0) || !(s.y22 > 0.0))
        throw DegenerateDenominatorError("Y_11(T) or Y_22(T) vanishes: a path is constant");
    s.y12 = empirical_cov_functional(x1, x2);
    // Cauchy-Schwarz holds exactly for the trapezoid inner product; the clamp
    // only absorbs last-ulp rounding.
    s.rho = std::clamp(s.y12 / std::sqrt(s.y11 * s.y22), -1.0, 1.0);
    const double t1 = 0.5 * s.horizon / s.y11;
    s.theta_hat = source == ThetaHatSource::pooled ? 0.5 * (t1 + 0.5 * s.horizon / s.y22) : t1;
    return s;
}

YuleStatistics yule_rho(const OuPair& pair, ThetaHatSource source) {
    return yule_rho(pair.x1, pair.x2, source);
}

double numerator_statistic(const SamplePath& x1, const SamplePath& x2) {
    const double y12 = empirical_cov_functional(x1, x2);
    return y12 / std::sqrt(x1.horizon());
}

double numerator_statistic(const OuPair& pair) { return numerator_statistic(pair.x1, pair.x2); }

}  // namespace yule
