#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "robscatter/numkernel.hpp"
#include "robscatter/parallel.hpp"

namespace robscatter {

/// Unit projection directions with the robust center (median) and spread
/// (MAD / 0.6745) of the sample projected on each.
struct DirectionSet {
  std::vector<Vector> dirs;
  std::vector<double> center;
  std::vector<double> spread;
  /// Directions dropped because the projected MAD was zero.
  int dropped = 0;

  std::size_t size() const noexcept { return dirs.size(); }
  bool empty() const noexcept { return dirs.empty(); }
};

/// Normalizes `dirs` and attaches the projection median/MAD of `x`.
/// Zero-MAD directions are dropped and counted.
DirectionSet make_direction_set(const Matrix& x, const std::vector<Vector>& dirs);

/// max over directions of |u'x_i - center| / spread, one value per row.
Vector outlyingness(const Matrix& x, const DirectionSet& dirs);

struct StartConfig {
  int mve_subsamples = 1000;
  /// Number of random specific directions; negative means max(p, 20).
  int ksd_specific_directions = -1;
  /// Overrides the self-normalized hard-rejection cutoff on OL^2 when set.
  std::optional<double> ksd_cutoff_beta;
  /// Tail probability of the chi-square rule behind the default cutoff.
  double ksd_cutoff_quantile = 0.99;
  int kurtosis_restarts = 3;
  int kurtosis_max_iter = 500;
  std::uint64_t seed = 12345;
  Execution execution = Execution::Parallel;
};

// ---------------------------------------------------------------- MVE

/// One candidate (mean/covariance of a (p+1)-subset) and its MVE score.
struct MveCandidate {
  std::vector<int> subset;
  double score = 0.0;  // median squared distance under the det-1 shape
  Vector mu;
  Matrix shape;
};

struct MveResult {
  LocationScatter estimate;  // size-corrected
  MveCandidate best;         // best raw subset candidate
  double raw_score = 0.0;
  double refined_score = 0.0;  // after the concentration step (<= raw_score)
  bool concentration_improved = false;
  int singular_subsets = 0;
  int subsets_scored = 0;
  bool exhaustive = false;
};

/// Scores the subsets and returns the best (lowest median distance) one,
/// ties broken by the lowest subset index. Singular subsets are skipped.
/// Throws StartFailureError when every subset is singular.
MveCandidate mve_best_candidate(const Matrix& x, const std::vector<std::vector<int>>& subsets,
                                Execution exec, int* singular = nullptr);

/// Subsampled MVE with one concentration step and median size correction.
/// When C(n, p+1) <= cfg.mve_subsamples every subset is enumerated.
MveResult mve(const DataMatrix& x, const StartConfig& cfg);
LocationScatter mve_start(const DataMatrix& x, const StartConfig& cfg);

/// All k-subsets of {0..n-1} in lexicographic order, or nullopt when more
/// than `limit` exist.
std::optional<std::vector<std::vector<int>>> enumerate_subsets(int n, int k, std::size_t limit);

// ---------------------------------------------------------------- KSD

struct KurtosisDirections {
  DirectionSet set;  // original-space directions with median/MAD
  /// Directions in the classically whitened space: the first `maximizers`
  /// entries come from the maximization sweep, the next from minimization.
  std::vector<Vector> whitened;
  std::vector<double> kurtosis;  // sample kurtosis of each direction's projection
  int maximizers = 0;
  int minimizers = 0;
  int specific = 0;
  int rank_deficient = 0;  // directions skipped because the deflated data vanished
};

/// p kurtosis maximizers and p minimizers found on the unit sphere of the
/// whitened data with deflation after each direction, plus random specific
/// directions (differences of points from the outer and inner halves by
/// whitened norm). Throws StartFailureError if the sample covariance is singular.
KurtosisDirections kurtosis_directions(const DataMatrix& x, const StartConfig& cfg);

/// Sample kurtosis m4 / m2^2 of a vector of projections (centered at the mean).
double sample_kurtosis(const Vector& y);

struct KsdResult {
  LocationScatter estimate;  // size-corrected
  DirectionSet directions;
  Vector outlyingness;
  Vector weights;  // 0/1 hard rejection
  double cutoff = 0.0;  // on OL
  int retained = 0;
  int cutoff_relaxations = 0;
};

/// Hard-rejection weighted mean/covariance using the KSD outlyingness.
KsdResult ksd(const DataMatrix& x, const StartConfig& cfg);

/// Same, reusing directions computed elsewhere.
KsdResult ksd_from_directions(const DataMatrix& x, DirectionSet directions, const StartConfig& cfg);

}  // namespace robscatter
