#include "robscatter/scales.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <sstream>

#include "robscatter/errors.hpp"

namespace robscatter {

double breakdown_delta(Eigen::Index n, Eigen::Index p) {
  if (n <= p) {
    throw DomainError("breakdown_delta: need n > p");
  }
  return 0.5 * (1.0 - static_cast<double>(p) / static_cast<double>(n));
}

double mean_rho(const DistanceVector& d, const RhoSpec& rho_spec, double s) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    sum += rho(rho_spec, d(i) / s);
  }
  return sum / static_cast<double>(d.size());
}

double mscale(const DistanceVector& d, const MScaleParams& params) {
  const double delta = params.delta;
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("mscale: delta must lie in (0,1)");
  }
  if (d.size() == 0) {
    throw DomainError("mscale: empty distance vector");
  }
  if ((d.array() < 0.0).any() || !d.allFinite()) {
    throw DomainError("mscale: distances must be finite and nonnegative");
  }
  const auto n = static_cast<double>(d.size());
  const auto positive = static_cast<double>((d.array() > 0.0).count());
  if (positive / n <= delta) {
    std::ostringstream msg;
    msg << "mscale: only " << positive << " of " << n << " distances are positive; need more than n*delta";
    throw DegenerateScaleError(msg.str());
  }

  auto h = [&](double s) { return mean_rho(d, params.rho, s) - delta; };

  double base = median_scale(d);
  if (!(base > 0.0)) {
    base = d.maxCoeff();
  }
  double lo = base * 1e-3;
  double hi = base * 1e3;
  for (int k = 0; k < 200 && h(lo) < 0.0; ++k) {
    hi = lo;
    lo *= 1e-2;
  }
  for (int k = 0; k < 200 && h(hi) > 0.0; ++k) {
    lo = hi;
    hi *= 1e2;
  }
  const double f_lo = h(lo);
  const double f_hi = h(hi);
  if (f_lo < 0.0 || f_hi > 0.0) {
    throw ConvergenceError("mscale: could not bracket the scale equation");
  }
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;

  const double target = params.tol * delta;
  auto done = [&](double a, double b) {
    return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(a);
  };
  std::uintmax_t iters = static_cast<std::uintmax_t>(params.max_iter);
  auto [a, b] = boost::math::tools::toms748_solve(h, lo, hi, f_lo, f_hi, done, iters);

  // Pick whichever bracket end has the smaller residual.
  const double ra = std::abs(h(a));
  const double rb = std::abs(h(b));
  const double s = ra <= rb ? a : b;
  if (std::min(ra, rb) > target && iters >= static_cast<std::uintmax_t>(params.max_iter)) {
    throw ConvergenceError("mscale: root finder did not converge");
  }
  return s;
}

TauScale tau_scale(const DistanceVector& d, const RhoSpec& rho1, double c, double delta) {
  if (!(c > 0.0)) {
    throw DomainError("tau_scale: c must be positive");
  }
  MScaleParams params;
  params.delta = delta;
  params.rho = rho1;
  const double sigma0 = mscale(d, params);
  const double sigma = sigma0 * mean_rho(d, scaled(rho1, c), sigma0);
  return {sigma0, sigma};
}

double median_scale(const DistanceVector& d) { return median(d); }

}  // namespace robscatter
