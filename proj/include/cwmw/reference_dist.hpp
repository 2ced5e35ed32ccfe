#pragma once

namespace cwmw {

// Standard normal CDF.
double normal_cdf(double x);

// Quantile of the standard normal at probability p in (0,1).
double normal_quantile(double p);

// Two-sided p-value of |z| under the standard normal.
double two_sided_p_normal(double z);

// Quantile of Student's t with (real) df degrees of freedom.
double t_quantile(double p, double df);

// Two-sided p-value of |t| under Student's t with df degrees of freedom.
double two_sided_p_t(double t, double df);

} // namespace cwmw
