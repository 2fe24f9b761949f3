#include "robscatter/chi2.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "robscatter/errors.hpp"

namespace robscatter {

namespace {

constexpr int kMaxTerms = 10000;
constexpr double kEps = 1e-16;

double log_gamma(double a) {
  int sign = 0;
  return ::lgamma_r(a, &sign);  // std::lgamma may write the global signgam
}

double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < kMaxTerms; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) {
      break;
    }
  }
  return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Upper tail Q(a, x) by the Lentz continued fraction.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) {
      break;
    }
  }
  return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

// Acklam's rational approximation; only used to seed Newton.
double normal_quantile_guess(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double low = 0.02425;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || std::isnan(x)) {
    throw DomainError("regularized_gamma_p: need a > 0 and x >= 0");
  }
  if (x == 0.0) {
    return 0.0;
  }
  if (std::isinf(x)) {
    return 1.0;
  }
  if (x < a + 1.0) {
    return gamma_p_series(a, x);
  }
  return 1.0 - gamma_q_fraction(a, x);
}

double chi2_cdf(double dof, double x) {
  if (x <= 0.0) {
    return 0.0;
  }
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_pdf(double dof, double x) {
  if (x <= 0.0) {
    return 0.0;
  }
  const double k = 0.5 * dof;
  return std::exp((k - 1.0) * std::log(x) - 0.5 * x - k * std::log(2.0) - log_gamma(k));
}

double chi2_quantile(int dof, double beta) {
  if (dof <= 0) {
    throw DomainError("chi2_quantile: degrees of freedom must be positive");
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    std::ostringstream msg;
    msg << "chi2_quantile: probability must lie in (0,1), got " << beta;
    throw DomainError(msg.str());
  }
  const double k = static_cast<double>(dof);

  // Wilson-Hilferty
  const double h = 2.0 / (9.0 * k);
  const double z = normal_quantile_guess(beta);
  double x = k * std::pow(std::max(1.0 - h + z * std::sqrt(h), 1e-3), 3.0);

  // Bracket: the CDF is increasing, so grow until it straddles beta.
  double lo = 0.0;
  double hi = std::max(2.0 * x, k + 10.0 * std::sqrt(2.0 * k));
  while (chi2_cdf(k, hi) < beta) {
    lo = hi;
    hi *= 2.0;
  }
  if (!(x > lo && x < hi)) {
    x = 0.5 * (lo + hi);
  }

  for (int iter = 0; iter < 200; ++iter) {
    const double f = chi2_cdf(k, x) - beta;
    if (f == 0.0) {
      return x;
    }
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double slope = chi2_pdf(k, x);
    double next = slope > 0.0 ? x - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x) {
      return next;
    }
    x = next;
  }
  return x;
}

}  // namespace robscatter
