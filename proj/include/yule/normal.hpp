#pragma once

namespace yule {

// Standard normal CDF, 0.5 * erfc(-x / sqrt(2)).
double normal_cdf(double x);

// Inverse of normal_cdf on (0, 1). Acklam's rational approximation
// (relative error < 1.2e-9) followed by one Halley step against erfc, which
// brings the absolute error near machine precision.
double normal_quantile(double p);

// Upper alpha/2 quantile, q such that P(|N| > q) = alpha.
double two_sided_critical_value(double alpha);

double normal_pdf(double x);

}  // namespace yule
