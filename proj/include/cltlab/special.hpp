#pragma once

namespace cltlab {

/// Phi(t), the standard normal distribution function.
double std_normal_cdf(double t);
double std_normal_pdf(double t);
/// Phi^{-1}(p) for p in (0, 1).
double std_normal_quantile(double p);

/// Regularized lower incomplete gamma P(s, x) = gamma(s, x) / Gamma(s).
/// Series below x = s + 1, Lentz continued fraction for Q above.
double gamma_p(double s, double x);
/// Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x).
double gamma_q(double s, double x);

/// log(exp(a) + exp(b)) without overflow; -inf is the additive identity.
double log_add_exp(double a, double b);

}  // namespace cltlab
