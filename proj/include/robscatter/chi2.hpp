#pragma once

namespace robscatter {

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
double regularized_gamma_p(double a, double x);

/// CDF and density of the chi-squared distribution with `dof` degrees of freedom.
double chi2_cdf(double dof, double x);
double chi2_pdf(double dof, double x);

/// beta-quantile of chi^2_dof: Wilson-Hilferty start, then safeguarded Newton
/// on the incomplete gamma CDF. Throws DomainError unless 0 < beta < 1 and dof > 0.
double chi2_quantile(int dof, double beta);

/// Median of chi^2_dof, used by the size correction.
inline double chi2_median(int dof) { return chi2_quantile(dof, 0.5); }

}  // namespace robscatter
