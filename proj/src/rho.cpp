#include "robscatter/rho.hpp"

#include <algorithm>
#include <cmath>

#include "robscatter/chi2.hpp"
#include "robscatter/errors.hpp"

namespace robscatter {

namespace {

// Optimal weight: q(d) = -1.944 + 1.728 d - 0.312 d^2 + 0.016 d^3 on (4, 9].
// Its antiderivative Q(d) = -1.944 d + 0.864 d^2 - 0.104 d^3 + 0.004 d^4 gives
// Q(4) = 0.416 and Q(9) = 2.916, so the total mass of W is 4 + 2.5 = 6.5 and
// rho(d) = (3.584 + Q(d)) / 6.5 on (4, 9].
constexpr double kOptimalMass = 6.5;
constexpr double kOptimalOffset = 3.584;

double optimal_antiderivative(double d) {
  return d * (-1.944 + d * (0.864 + d * (-0.104 + d * 0.004)));
}

void check_argument(double t) {
  if (t < 0.0 || std::isnan(t)) {
    throw DomainError("rho/weight argument must be nonnegative");
  }
}

double base_rho(const RhoSpec& spec, double u) {
  switch (spec.family) {
    case RhoFamily::Bisquare: {
      if (u >= 1.0) return 1.0;
      const double v = 1.0 - u;
      return 1.0 - v * v * v;
    }
    case RhoFamily::Optimal: {
      if (u <= 4.0) return u / kOptimalMass;
      if (u > 9.0) return 1.0;
      return std::clamp((kOptimalOffset + optimal_antiderivative(u)) / kOptimalMass, 4.0 / kOptimalMass, 1.0);
    }
    case RhoFamily::RockeBiflat: {
      const double g = spec.gamma;
      if (u <= 1.0 - g) return 0.0;
      if (u >= 1.0 + g) return 1.0;
      const double z = (u - 1.0) / g;
      return std::clamp((2.0 + 3.0 * z - z * z * z) / 4.0, 0.0, 1.0);
    }
  }
  return 0.0;
}

double base_weight(const RhoSpec& spec, double u) {
  switch (spec.family) {
    case RhoFamily::Bisquare: {
      if (u > 1.0) return 0.0;
      const double v = 1.0 - u;
      return 3.0 * v * v;
    }
    case RhoFamily::Optimal: {
      if (u <= 4.0) return 1.0;
      if (u > 9.0) return 0.0;
      return std::clamp(optimal_weight_cubic(u), 0.0, 1.0);
    }
    case RhoFamily::RockeBiflat: {
      const double g = spec.gamma;
      if (u < 1.0 - g || u > 1.0 + g) return 0.0;
      const double z = (u - 1.0) / g;
      return std::max(0.0, 1.0 - z * z);
    }
  }
  return 0.0;
}

}  // namespace

std::string_view to_string(RhoFamily family) {
  switch (family) {
    case RhoFamily::Bisquare:
      return "bisquare";
    case RhoFamily::Optimal:
      return "optimal";
    case RhoFamily::RockeBiflat:
      return "rocke";
  }
  return "?";
}

RhoFamily rho_family_from_string(std::string_view name) {
  if (name == "bisquare" || name == "bisq") return RhoFamily::Bisquare;
  if (name == "optimal" || name == "opt") return RhoFamily::Optimal;
  if (name == "rocke" || name == "biflat") return RhoFamily::RockeBiflat;
  throw DomainError("unknown rho family '" + std::string(name) + "'");
}

RhoSpec RhoSpec::bisquare(double c) { return scaled(RhoSpec{RhoFamily::Bisquare}, c); }

RhoSpec RhoSpec::optimal(double c) { return scaled(RhoSpec{RhoFamily::Optimal}, c); }

RhoSpec RhoSpec::rocke(int p, double alpha) {
  RhoSpec spec{RhoFamily::RockeBiflat};
  spec.alpha = alpha;
  spec.gamma = rocke_gamma(p, alpha);
  return spec;
}

RhoSpec RhoSpec::rocke_with_gamma(double gamma) {
  if (!(gamma > 0.0)) {
    throw DomainError("biflat band half-width must be positive");
  }
  RhoSpec spec{RhoFamily::RockeBiflat};
  spec.gamma = std::min(gamma, 1.0);
  return spec;
}

double rho(const RhoSpec& spec, double t) {
  check_argument(t);
  return base_rho(spec, t / spec.scale);
}

double weight(const RhoSpec& spec, double t) {
  check_argument(t);
  return base_weight(spec, t / spec.scale);
}

double weight_factor(const RhoSpec& spec) {
  switch (spec.family) {
    case RhoFamily::Bisquare:
      return 1.0;
    case RhoFamily::Optimal:
      return 1.0 / kOptimalMass;
    case RhoFamily::RockeBiflat:
      return 3.0 / (4.0 * spec.gamma);
  }
  return 1.0;
}

double rho_derivative(const RhoSpec& spec, double t) {
  return weight(spec, t) * weight_factor(spec) / spec.scale;
}

double weight_cutoff(const RhoSpec& spec) {
  switch (spec.family) {
    case RhoFamily::Bisquare:
      return spec.scale;
    case RhoFamily::Optimal:
      return 9.0 * spec.scale;
    case RhoFamily::RockeBiflat:
      return (1.0 + spec.gamma) * spec.scale;
  }
  return spec.scale;
}

double rocke_gamma(int p, double alpha) {
  if (p < 2) {
    throw DomainError("rocke_gamma: dimension must be at least 2");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("rocke_gamma: alpha must lie in (0,1)");
  }
  const double g = chi2_quantile(p, 1.0 - alpha) / p - 1.0;
  return std::clamp(g, kMinRockeGamma, 1.0);
}

RhoSpec scaled(const RhoSpec& spec, double divisor) {
  if (!(divisor > 0.0) || !std::isfinite(divisor)) {
    throw DomainError("rho scaling divisor must be positive and finite");
  }
  RhoSpec out = spec;
  out.scale *= divisor;
  return out;
}

double optimal_weight_cubic(double d) { return -1.944 + d * (1.728 + d * (-0.312 + d * 0.016)); }

}  // namespace robscatter
