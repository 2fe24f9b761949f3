#pragma once

#include "robscatter/numkernel.hpp"
#include "robscatter/rho.hpp"

namespace robscatter {

struct MScaleParams {
  double delta = 0.5;
  RhoSpec rho = RhoSpec::bisquare();
  /// Accepted residual |mean rho(d/S) - delta| relative to delta.
  double tol = 1e-12;
  int max_iter = 500;
};

/// 0.5 (1 - p/n): the delta giving the maximal finite-sample breakdown point.
double breakdown_delta(Eigen::Index n, Eigen::Index p);

/// mean_i rho(d_i / s).
double mean_rho(const DistanceVector& d, const RhoSpec& rho, double s);

/// The M-scale S solving mean rho(d_i / S) = delta.
///
/// h(S) = mean rho(d_i / S) is continuous and nonincreasing, running from the
/// fraction of positive d_i (S -> 0) down to 0 (S -> inf). The root is
/// bracketed around median(d), the bracket expanded geometrically, and then
/// refined with a TOMS 748 solver.
///
/// Throws DegenerateScaleError if the fraction of positive distances does not
/// exceed delta, ConvergenceError if no bracket is found.
double mscale(const DistanceVector& d, const MScaleParams& params);

struct TauScale {
  double sigma0;  // M-scale with rho1
  double sigma;   // sigma0 * mean rho1(d / (c sigma0))
};

/// tau-scale of squared distances with rho2(t) = rho1(t / c).
TauScale tau_scale(const DistanceVector& d, const RhoSpec& rho1, double c, double delta);

/// Sample median (mean of the middle pair for even n).
double median_scale(const DistanceVector& d);

}  // namespace robscatter
