#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace yule::theory {

// Rotation coefficients of the second-chaos decomposition of Y12 and the
// asymptotic standard deviation of the centered numerator.
//   c1 = r/sqrt(2) + sqrt(1-r^2)/2,  c2 = r/sqrt(2) - sqrt(1-r^2)/2
//   sigma^2 = (1 + r^2) / (4 theta^3)
struct ChaosConstants {
    double c1;
    double c2;
    double sigma;
    double theta;
    double r;
};

ChaosConstants chaos_constants(double theta, double r);

// Limit variance of sqrt(T) (rho(T) - r): (1 + r^2) / theta.
double clt_variance_rho(double theta, double r);

// Null limit variance of Y12(T)/sqrt(T): 1 / (4 theta^3).
double numerator_null_variance(double theta);

// Limit variance of sqrt(T) (theta_hat - theta): 2 theta.
double theta_hat_asymptotic_variance(double theta);

// Limit variance of sqrt(T) (2 theta Y_ii(T)/T - 1): 2 / theta.
double ybar_asymptotic_variance(double theta);

// Third/fourth cumulant bound constants
//   c_i(theta, r) = max(16/(9 theta^5) |c_i^3|, 81/(8 theta^7) c_i^4),  i = 1, 2.
std::pair<double, double> cumulant_bound_constants(double theta, double r);

// <delta^{*(p-1)}, delta> for delta(x) = exp(-theta|x|)/(2 theta), p >= 2.
// Evaluated as delta^{*p}(0) = (1/pi) int_0^inf (theta^2 + w^2)^{-p} dw by
// adaptive Gauss-Kronrod quadrature of the Fourier-side integrand.
double delta_convolution_inner(int p, double theta);

// Young-inequality upper bounds for p = 3 and p = 4.
double young_bound_p3(double theta);
double young_bound_p4(double theta);

// Leading-order p-th cumulant (p >= 3) of the standardized chaos variable
// I_2(h_T) / (sqrt(2) ||h_T||):
//   <delta^{*(p-1)}, delta> 2^{2p-1} (p-1)! (c1^p + c2^p) theta^{3p/2}
//     / (T^{p/2-1} (1+r^2)^{p/2}).
double asymptotic_cumulant(int p, double theta, double r, double horizon);

// E[A_r(T)^2] = (c1^2 + c2^2) * (2/T) int_0^T int_0^T <f_t, f_s>^2 dt ds with
// <f_t, f_s> = e^{-theta(t+s)} (e^{2 theta min(t,s)} - 1) / (2 theta),
// from the closed-form antiderivative.
double exact_second_moment_Ar(double theta, double r, double horizon);

// The same divided by sigma^2; tends to 1.
double standardized_second_moment_Ar(double theta, double r, double horizon);

// The double integral (2/T) int int <f_t,f_s>^2 alone (the r-free factor).
double second_moment_kernel_factor(double theta, double horizon);

// ||h_T||_{L^2([-T,T]^2)} for h_T(t,s) = (c1 1_{[0,T]^2} + c2 1_{[-T,0]^2}) e^{-theta|t-s|} / (2 theta sqrt(T)).
double kernel_h_norm(double theta, double r, double horizon);

// Limit of kernel_h_norm as T -> infinity, sigma / sqrt(2).
double kernel_h_norm_limit(double theta, double r);

// ||g_T|| = sqrt(1 + r^2) (1 - e^{-2 theta T}) / (4 sqrt(2) theta^2 sqrt(T)).
double kernel_g_norm(double theta, double r, double horizon);

// Edgeworth coefficient
//   eta(theta, r) = <delta^{*2}, delta> / sqrt(pi) * 4 theta^{9/2} r (3 - r^2) / (1 + r^2)^{3/2}.
double eta_constant(double theta, double r);

// Leading CDF correction eta (1 - z^2) e^{-z^2/2} / sqrt(T).
double edgeworth_tail(double z, double theta, double r, double horizon);

// Kolmogorov-distance bound 2 |eta| / (sqrt(e) sqrt(T)), from
// sup_x (1 + x^2) e^{-x^2/2} = 2 / sqrt(e).
double edgeworth_kolmogorov_bound(double theta, double r, double horizon);

// Deviation bound for an n-th multiple Wiener integral:
//   C exp(-1/2 (x / (sqrt(n!) ||f||))^{2/n}).
double major_tail_bound(int n, double kernel_norm, double x, double prefactor);

// d_W(sigma N, N) <= sqrt(2/pi) |1 - sigma^2|.
double wasserstein_scale_bound(double sigma);

// c(p, theta) = 3 max{2(2p-1)/theta, (p-1) sqrt(2/theta) sqrt(3 + 7/(4 theta)), 1/(2 theta)}.
double denominator_lp_bound(double p, double theta);

// Named access for the command line. Parameters missing from `params` that a
// quantity needs raise DomainError naming the parameter.
struct QuantityInfo {
    std::string name;
    std::vector<std::string> params;
    std::string summary;
};

const std::vector<QuantityInfo>& quantity_catalog();

double evaluate_quantity(std::string_view name, const std::map<std::string, double>& params);

}  // namespace yule::theory
