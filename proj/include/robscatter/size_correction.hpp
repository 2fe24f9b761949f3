#pragma once

#include "robscatter/numkernel.hpp"

namespace robscatter {

/// Sets est.size = median(d(x; mu, shape)) / median(chi2_p) so the full
/// scatter is consistent at the normal model. est.shape must have det 1.
/// Throws DegenerateScatterError when the median distance is zero.
LocationScatter size_correct(const Matrix& x, LocationScatter est);
inline LocationScatter size_correct(const DataMatrix& x, LocationScatter est) {
  return size_correct(x.values(), std::move(est));
}

}  // namespace robscatter
