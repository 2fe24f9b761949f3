#include "robscatter/size_correction.hpp"

#include "robscatter/chi2.hpp"
#include "robscatter/errors.hpp"

namespace robscatter {

LocationScatter size_correct(const Matrix& x, LocationScatter est) {
  const DistanceVector d = mahalanobis(x, est.mu, est.shape);
  const double med = median(d);
  if (!(med > 0.0)) {
    throw DegenerateScatterError("size correction: median distance is zero");
  }
  est.size = med / chi2_median(static_cast<int>(x.cols()));
  return est;
}

}  // namespace robscatter
