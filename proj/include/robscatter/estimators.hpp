#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "robscatter/initial.hpp"
#include "robscatter/numkernel.hpp"
#include "robscatter/rho.hpp"
#include "robscatter/size_correction.hpp"

namespace robscatter {

struct IterationControl {
  int max_iter = 200;
  /// Relative objective change and location change (relative to 1 + |mu|).
  double tol = 1e-7;
  /// Step-halving attempts toward the previous iterate before giving up.
  int max_halvings = 10;
};

/// Outcome of one iteratively reweighted fit. `estimate` is size-corrected.
struct EstimateResult {
  LocationScatter estimate;
  /// S / Rocke: final M-scale. MM: the fixed scale S from the start. tau: sigma0.
  double scale = 0.0;
  /// S / Rocke: M-scale; MM: sum rho(d / cS); tau: tau-scale.
  double objective = 0.0;
  double start_objective = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Objective value after the start and after every accepted step.
  std::vector<double> objective_trace;
  /// Rocke: observations with positive weight at the first iteration, after
  /// the band-enlargement safeguard.
  int first_iteration_positive_weights = -1;
  /// Rocke: band half-width actually used.
  double gamma_used = 0.0;
  /// MM: start returned because no iterate beat it. Rocke: bisquare fallback.
  bool fallback = false;
  int weight_fallbacks = 0;  // tau: steps that used plain rho2 weights
  /// Tuning constant (c, or alpha for Rocke) and delta actually used.
  double tuning = 0.0;
  double delta = 0.0;
  std::vector<std::string> warnings;
};

/// One fixed-point step of the weighted mean/covariance equations:
/// mu' = sum w x / sum w, shape' = det-1 normalization of sum w (x - mu')(x - mu)'.
/// Throws SingularScatterError / DegenerateScatterError on a singular update.
LocationScatter reweighted_step(const Matrix& x, const LocationScatter& est, const Vector& weights);

/// S-estimator: minimizes the M-scale of the distances over det-1 shapes.
EstimateResult s_estimate(const DataMatrix& x, const RhoSpec& rho, double delta, const LocationScatter& start,
                          const IterationControl& control = {});

/// S-estimator with the biflat weight of half-width gamma(p, alpha). If fewer
/// than 2p observations get positive weight at the start, gamma grows by a
/// factor 1.5 (capped at 1); if that still fails the bisquare S-estimate is
/// returned with `fallback` set.
EstimateResult rocke_estimate(const DataMatrix& x, double alpha, double delta, const LocationScatter& start,
                              const IterationControl& control = {});

/// MM-estimator: S is the M-scale of the start's distances, then
/// sum rho(d_i / (c S)) is decreased by reweighting. Never returns a
/// solution whose objective exceeds the start's.
EstimateResult mm_estimate(const DataMatrix& x, const RhoSpec& rho, double c, double delta,
                           const LocationScatter& start, const IterationControl& control = {});

/// tau-estimator: minimizes sigma0 * mean rho1(d / (c sigma0)) by reweighting
/// with the stationarity weights A rho1'(t) + rho2'(t), t = d / sigma0.
EstimateResult tau_estimate(const DataMatrix& x, const RhoSpec& rho1, double c, double delta,
                            const LocationScatter& start, const IterationControl& control = {});

/// Weights of the tau stationarity equations at standardized distances t.
/// Returns false (and leaves the plain rho2' weights in `w`) when the
/// composite weights are not usable.
bool tau_weights(const Vector& t, const RhoSpec& rho1, double c, Vector& w);

/// Weighted mean/covariance with weights W_opt(r_i / c), r the projection
/// outlyingness over `dirs` (or W_opt(r_i^2 / c) when `squared`).
/// Throws EstimationError when all weights vanish.
EstimateResult stahel_donoho(const DataMatrix& x, const DirectionSet& dirs, double c, bool squared = false);

/// Normals of hyperplanes through `count` random p-subsets, with the sample's
/// projection median/MAD attached.
DirectionSet subsampling_directions(const DataMatrix& x, int count, std::uint64_t seed);

/// Sample mean and covariance as a LocationScatter (no size correction).
LocationScatter classical_estimate(const DataMatrix& x);

}  // namespace robscatter
