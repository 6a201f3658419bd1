#include "yule/theory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "yule/error.hpp"
#include "yule/sde.hpp"

namespace yule::theory {

using detail::require;

namespace {

void check_theta(double theta) { require(theta > 0.0 && std::isfinite(theta), "theta must be positive"); }
void check_r(double r) { require(std::abs(r) <= 1.0, "r must lie in [-1, 1]"); }
void check_horizon(double T) { require(T > 0.0 && std::isfinite(T), "horizon T must be positive"); }

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

}  // namespace

ChaosConstants chaos_constants(double theta, double r) {
    check_theta(theta);
    check_r(r);
    const double a = r / std::numbers::sqrt2;
    const double b = 0.5 * std::sqrt(1.0 - r * r);
    const double sigma = std::sqrt((0.5 + 0.5 * r * r) / (2.0 * theta * theta * theta));
    return {a + b, a - b, sigma, theta, r};
}

double clt_variance_rho(double theta, double r) {
    check_theta(theta);
    check_r(r);
    return (1.0 + r * r) / theta;
}

double numerator_null_variance(double theta) {
    check_theta(theta);
    return 1.0 / (4.0 * theta * theta * theta);
}

double theta_hat_asymptotic_variance(double theta) {
    check_theta(theta);
    return 2.0 * theta;
}

double ybar_asymptotic_variance(double theta) {
    check_theta(theta);
    return 2.0 / theta;
}

std::pair<double, double> cumulant_bound_constants(double theta, double r) {
    const auto cc = chaos_constants(theta, r);
    const double t5 = std::pow(theta, 5);
    const double t7 = std::pow(theta, 7);
    auto bound = [&](double c) {
        return std::max(16.0 / (9.0 * t5) * std::abs(c * c * c), 81.0 / (8.0 * t7) * c * c * c * c);
    };
    return {bound(cc.c1), bound(cc.c2)};
}

double delta_convolution_inner(int p, double theta) {
    require(p >= 2, "convolution order p must be at least 2");
    check_theta(theta);
    const double t2 = theta * theta;
    auto integrand = [&](double w) { return std::pow(t2 + w * w, -p); };
    using boost::math::quadrature::gauss_kronrod;
    const double integral = gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-14);
    return integral / std::numbers::pi;
}

double young_bound_p3(double theta) {
    check_theta(theta);
    return 2.0 / (9.0 * std::pow(theta, 5));
}

double young_bound_p4(double theta) {
    check_theta(theta);
    return 27.0 / (128.0 * std::pow(theta, 7));
}

double asymptotic_cumulant(int p, double theta, double r, double horizon) {
    require(p >= 3, "cumulant order p must be at least 3");
    check_horizon(horizon);
    const auto cc = chaos_constants(theta, r);
    const double inner = delta_convolution_inner(p, theta);
    const double pd = static_cast<double>(p);
    const double num = inner * std::pow(2.0, 2 * p - 1) * factorial(p - 1) *
                       (std::pow(cc.c1, p) + std::pow(cc.c2, p)) * std::pow(theta, 1.5 * pd);
    const double den = std::pow(horizon, 0.5 * pd - 1.0) * std::pow(1.0 + r * r, 0.5 * pd);
    return num / den;
}

double second_moment_kernel_factor(double theta, double horizon) {
    check_theta(theta);
    check_horizon(horizon);
    // With x = 2 theta T:
    //   int_0^T int_0^T <f_t,f_s>^2 = 2 J,
    //   4 J = (2x + expm1(-2x)) / (8 theta^4) - (-expm1(-x) - x e^{-x}) / (2 theta^4).
    const double x = 2.0 * theta * horizon;
    const double t4 = std::pow(theta, 4);
    const double four_j = (2.0 * x + std::expm1(-2.0 * x)) / (8.0 * t4) -
                          (-std::expm1(-x) - x * std::exp(-x)) / (2.0 * t4);
    return four_j / horizon;
}

double exact_second_moment_Ar(double theta, double r, double horizon) {
    const auto cc = chaos_constants(theta, r);
    return (cc.c1 * cc.c1 + cc.c2 * cc.c2) * second_moment_kernel_factor(theta, horizon);
}

double standardized_second_moment_Ar(double theta, double r, double horizon) {
    const auto cc = chaos_constants(theta, r);
    return exact_second_moment_Ar(theta, r, horizon) / (cc.sigma * cc.sigma);
}

double kernel_h_norm(double theta, double r, double horizon) {
    check_theta(theta);
    check_r(r);
    check_horizon(horizon);
    // int_0^T int_0^T e^{-2 theta |t-s|} = (T - (1 - e^{-2 theta T}) / (2 theta)) / theta.
    const double x = 2.0 * theta * horizon;
    const double frac = 1.0 + std::expm1(-x) / x;  // 1 - (1 - e^{-x}) / x
    return std::sqrt((1.0 + r * r) / (8.0 * theta * theta * theta) * frac);
}

double kernel_h_norm_limit(double theta, double r) {
    check_theta(theta);
    check_r(r);
    return std::sqrt(1.0 + r * r) / (2.0 * std::numbers::sqrt2 * std::pow(theta, 1.5));
}

double kernel_g_norm(double theta, double r, double horizon) {
    check_theta(theta);
    check_r(r);
    check_horizon(horizon);
    return std::sqrt(1.0 + r * r) * -std::expm1(-2.0 * theta * horizon) /
           (4.0 * std::numbers::sqrt2 * theta * theta * std::sqrt(horizon));
}

double eta_constant(double theta, double r) {
    check_theta(theta);
    check_r(r);
    const double inner = delta_convolution_inner(3, theta);
    return inner / std::sqrt(std::numbers::pi) * 4.0 * std::pow(theta, 4.5) * r * (3.0 - r * r) /
           std::pow(1.0 + r * r, 1.5);
}

double edgeworth_tail(double z, double theta, double r, double horizon) {
    check_horizon(horizon);
    return eta_constant(theta, r) * (1.0 - z * z) * std::exp(-0.5 * z * z) / std::sqrt(horizon);
}

double edgeworth_kolmogorov_bound(double theta, double r, double horizon) {
    check_horizon(horizon);
    return 2.0 * std::abs(eta_constant(theta, r)) / std::sqrt(std::numbers::e * horizon);
}

double major_tail_bound(int n, double kernel_norm, double x, double prefactor) {
    require(n >= 1, "chaos order n must be at least 1");
    require(kernel_norm > 0.0, "kernel norm must be positive");
    require(x > 0.0, "deviation level x must be positive");
    const double scaled = x / (std::sqrt(factorial(n)) * kernel_norm);
    return prefactor * std::exp(-0.5 * std::pow(scaled, 2.0 / n));
}

double wasserstein_scale_bound(double sigma) {
    require(sigma > 0.0, "sigma must be positive");
    return std::sqrt(2.0 / std::numbers::pi) * std::abs(1.0 - sigma * sigma);
}

double denominator_lp_bound(double p, double theta) {
    require(p >= 1.0, "moment order p must be at least 1");
    check_theta(theta);
    const double a = 2.0 * (2.0 * p - 1.0) / theta;
    const double b = (p - 1.0) * std::sqrt(2.0 / theta) * std::sqrt(3.0 + 7.0 / (4.0 * theta));
    const double c = 1.0 / (2.0 * theta);
    return 3.0 * std::max({a, b, c});
}

// ---------------------------------------------------------------------------
// Named quantities

namespace {

using Params = std::map<std::string, double>;

double get(const Params& p, const std::string& key) {
    const auto it = p.find(key);
    if (it == p.end()) throw DomainError("quantity requires parameter --" + key);
    return it->second;
}

int get_int(const Params& p, const std::string& key) {
    const double v = get(p, key);
    if (v != std::floor(v)) throw DomainError("parameter --" + key + " must be an integer");
    return static_cast<int>(v);
}

struct Entry {
    QuantityInfo info;
    std::function<double(const Params&)> eval;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        {{"sigma", {"theta", "r"}, "asymptotic sd of Y12/sqrt(T) - r sqrt(T)/(2 theta)"},
         [](const Params& p) { return chaos_constants(get(p, "theta"), get(p, "r")).sigma; }},
        {{"c1", {"theta", "r"}, "first rotation coefficient"},
         [](const Params& p) { return chaos_constants(get(p, "theta"), get(p, "r")).c1; }},
        {{"c2", {"theta", "r"}, "second rotation coefficient"},
         [](const Params& p) { return chaos_constants(get(p, "theta"), get(p, "r")).c2; }},
        {{"clt_variance_rho", {"theta", "r"}, "(1 + r^2) / theta"},
         [](const Params& p) { return clt_variance_rho(get(p, "theta"), get(p, "r")); }},
        {{"numerator_null_variance", {"theta"}, "1 / (4 theta^3)"},
         [](const Params& p) { return numerator_null_variance(get(p, "theta")); }},
        {{"theta_hat_variance", {"theta"}, "2 theta"},
         [](const Params& p) { return theta_hat_asymptotic_variance(get(p, "theta")); }},
        {{"ybar_variance", {"theta"}, "2 / theta"},
         [](const Params& p) { return ybar_asymptotic_variance(get(p, "theta")); }},
        {{"cumulant_bound_c1", {"theta", "r"}, "first cumulant bound constant"},
         [](const Params& p) { return cumulant_bound_constants(get(p, "theta"), get(p, "r")).first; }},
        {{"cumulant_bound_c2", {"theta", "r"}, "second cumulant bound constant"},
         [](const Params& p) { return cumulant_bound_constants(get(p, "theta"), get(p, "r")).second; }},
        {{"delta_convolution_inner", {"p", "theta"}, "<delta^{*(p-1)}, delta>"},
         [](const Params& p) { return delta_convolution_inner(get_int(p, "p"), get(p, "theta")); }},
        {{"asymptotic_cumulant", {"p", "theta", "r", "T"}, "leading-order p-th cumulant"},
         [](const Params& p) {
             return asymptotic_cumulant(get_int(p, "p"), get(p, "theta"), get(p, "r"), get(p, "T"));
         }},
        {{"second_moment_Ar", {"theta", "r", "T"}, "E[A_r(T)^2]"},
         [](const Params& p) { return exact_second_moment_Ar(get(p, "theta"), get(p, "r"), get(p, "T")); }},
        {{"second_moment_Ar_standardized", {"theta", "r", "T"}, "E[A_r(T)^2] / sigma^2"},
         [](const Params& p) {
             return standardized_second_moment_Ar(get(p, "theta"), get(p, "r"), get(p, "T"));
         }},
        {{"kernel_h_norm", {"theta", "r", "T"}, "||h_T||"},
         [](const Params& p) { return kernel_h_norm(get(p, "theta"), get(p, "r"), get(p, "T")); }},
        {{"kernel_h_norm_limit", {"theta", "r"}, "lim ||h_T|| = sigma / sqrt(2)"},
         [](const Params& p) { return kernel_h_norm_limit(get(p, "theta"), get(p, "r")); }},
        {{"kernel_g_norm", {"theta", "r", "T"}, "||g_T||"},
         [](const Params& p) { return kernel_g_norm(get(p, "theta"), get(p, "r"), get(p, "T")); }},
        {{"eta", {"theta", "r"}, "Edgeworth coefficient eta(theta, r)"},
         [](const Params& p) { return eta_constant(get(p, "theta"), get(p, "r")); }},
        {{"edgeworth_tail", {"z", "theta", "r", "T"}, "eta (1 - z^2) e^{-z^2/2} / sqrt(T)"},
         [](const Params& p) {
             return edgeworth_tail(get(p, "z"), get(p, "theta"), get(p, "r"), get(p, "T"));
         }},
        {{"edgeworth_kolmogorov_bound", {"theta", "r", "T"}, "2 |eta| / sqrt(e T)"},
         [](const Params& p) { return edgeworth_kolmogorov_bound(get(p, "theta"), get(p, "r"), get(p, "T")); }},
        {{"major_tail_bound", {"n", "norm", "x", "C"}, "C exp(-1/2 (x / (sqrt(n!) norm))^{2/n})"},
         [](const Params& p) {
             return major_tail_bound(get_int(p, "n"), get(p, "norm"), get(p, "x"), get(p, "C"));
         }},
        {{"wasserstein_scale_bound", {"sigma"}, "sqrt(2/pi) |1 - sigma^2|"},
         [](const Params& p) { return wasserstein_scale_bound(get(p, "sigma")); }},
        {{"denominator_lp_bound", {"p", "theta"}, "c(p, theta)"},
         [](const Params& p) { return denominator_lp_bound(get(p, "p"), get(p, "theta")); }},
        {{"young_bound_p3", {"theta"}, "2 / (9 theta^5)"},
         [](const Params& p) { return young_bound_p3(get(p, "theta")); }},
        {{"young_bound_p4", {"theta"}, "27 / (128 theta^7)"},
         [](const Params& p) { return young_bound_p4(get(p, "theta")); }},
        {{"mean_functional_variance", {"theta", "T"}, "E[Xbar(T)^2]"},
         [](const Params& p) { return mean_functional_variance(get(p, "theta"), get(p, "T")); }},
    };
    return table;
}

}  // namespace

const std::vector<QuantityInfo>& quantity_catalog() {
    static const std::vector<QuantityInfo> catalog = [] {
        std::vector<QuantityInfo> out;
        for (const auto& e : entries()) out.push_back(e.info);
        return out;
    }();
    return catalog;
}

double evaluate_quantity(std::string_view name, const std::map<std::string, double>& params) {
    for (const auto& e : entries())
        if (e.info.name == name) return e.eval(params);
    throw DomainError("unknown theory quantity '" + std::string(name) + "'");
}

}  // namespace yule::theory
