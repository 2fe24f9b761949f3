#pragma once

#include <string>
#include <string_view>

namespace robscatter {

enum class RhoFamily { Bisquare, Optimal, RockeBiflat };

std::string_view to_string(RhoFamily family);
RhoFamily rho_family_from_string(std::string_view name);

/// A bounded rho function of squared distances together with its weight
/// function. Every family is evaluated at t / scale, so tuning constants and
/// standardizing scales compose by multiplying `scale`.
///
/// Families, with u = t / scale:
///   Bisquare     rho(u) = 1 - (1 - u)^3 on [0, 1], 1 beyond;  W(u) = 3 (1 - u)^2.
///   Optimal      W(u) = 1 up to 4, the cubic q(u) on (4, 9], 0 beyond; rho is
///                the exact integral of W divided by its total mass 6.5, so rho
///                and W are continuous at both knots.
///   RockeBiflat  W(u) = 1 - ((u - 1) / gamma)^2 on [1 - gamma, 1 + gamma];
///                rho is the normalized integral of W over the band.
struct RhoSpec {
  RhoFamily family = RhoFamily::Bisquare;
  double scale = 1.0;
  double alpha = 0.0;  // RockeBiflat only
  double gamma = 1.0;  // RockeBiflat only

  static RhoSpec bisquare(double c = 1.0);
  static RhoSpec optimal(double c = 1.0);
  /// Band half-width from the chi-squared tail rule for dimension p.
  static RhoSpec rocke(int p, double alpha);
  /// Band given directly (used by the gamma-enlargement safeguard).
  static RhoSpec rocke_with_gamma(double gamma);
};

/// rho(t) in [0, 1]. Throws DomainError for negative t.
double rho(const RhoSpec& spec, double t);

/// The family's weight function at t / scale with its published
/// normalization (bisquare W(0) = 3, optimal and biflat peak at 1).
double weight(const RhoSpec& spec, double t);

/// Exact d rho / dt, i.e. weight(spec, t) * weight_factor(spec) / scale.
double rho_derivative(const RhoSpec& spec, double t);

/// Constant k with d rho(u) / du = k * W(u) for the unscaled family.
double weight_factor(const RhoSpec& spec);

/// The value of u = t / scale beyond which W vanishes (1, 9 or 1 + gamma),
/// multiplied by scale.
double weight_cutoff(const RhoSpec& spec);

/// min(1, chi2_p(1 - alpha) / p - 1), floored at kMinRockeGamma.
double rocke_gamma(int p, double alpha);
inline constexpr double kMinRockeGamma = 1e-3;

/// Same family evaluated at t / divisor. Throws DomainError for divisor <= 0.
RhoSpec scaled(const RhoSpec& spec, double divisor);

/// Cubic piece of the optimal weight on (4, 9].
double optimal_weight_cubic(double d);

}  // namespace robscatter
