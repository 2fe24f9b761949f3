#include "robscatter/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "robscatter/errors.hpp"

namespace robscatter {

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.cols() < 2) {
    throw DataError("data must have at least 2 columns");
  }
  if (values_.rows() < values_.cols() + 1) {
    std::ostringstream msg;
    msg << "need n >= p + 1 observations, got n=" << values_.rows() << " p=" << values_.cols();
    throw DataError(msg.str());
  }
  if (!values_.allFinite()) {
    throw DataError("data contains non-finite entries");
  }
}

LocationScatter LocationScatter::from_scatter(Vector mu, const Matrix& scatter) {
  auto [shape, size] = normalize_shape(scatter);
  return LocationScatter{std::move(mu), std::move(shape), size};
}

Matrix cholesky_lower(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().allFinite()) {
    return llt.matrixL();
  }
  Eigen::LDLT<Matrix> ldlt(m);
  const double pivot = ldlt.vectorD().size() > 0 ? ldlt.vectorD().minCoeff() : 0.0;
  std::ostringstream msg;
  msg << "scatter matrix is not positive definite (smallest pivot " << pivot << ")";
  throw SingularScatterError(msg.str(), pivot);
}

double log_det_spd(const Matrix& m) {
  const Matrix l = cholesky_lower(m);
  return 2.0 * l.diagonal().array().log().sum();
}

ShapeAndSize normalize_shape(const Matrix& scatter) {
  double log_det = 0.0;
  try {
    log_det = log_det_spd(scatter);
  } catch (const SingularScatterError& e) {
    throw DegenerateScatterError(std::string("degenerate scatter: ") + e.what());
  }
  if (!std::isfinite(log_det)) {
    throw DegenerateScatterError("degenerate scatter: determinant is not finite");
  }
  const double size = std::exp(log_det / static_cast<double>(scatter.rows()));
  if (!(size > 0.0) || !std::isfinite(size)) {
    throw DegenerateScatterError("degenerate scatter: determinant underflows or overflows");
  }
  Matrix shape = scatter / size;
  // exact symmetry keeps later factorizations reproducible
  shape = 0.5 * (shape + shape.transpose()).eval();
  return {std::move(shape), size};
}

namespace {

constexpr double kParallelWork = 1 << 15;

inline double row_distance(const Matrix& x, Eigen::Index i, const Vector& mu, const Matrix& chol,
                           Vector& buffer) {
  buffer = x.row(i).transpose() - mu;
  chol.triangularView<Eigen::Lower>().solveInPlace(buffer);
  return buffer.squaredNorm();
}

}  // namespace

DistanceVector mahalanobis(const Matrix& x, const Vector& mu, const Matrix& scatter) {
  const Matrix chol = cholesky_lower(scatter);
  const Eigen::Index n = x.rows();
  DistanceVector d(n);
  const double work = static_cast<double>(n) * static_cast<double>(x.cols() * x.cols());
#pragma omp parallel if (work > kParallelWork)
  {
    Vector buffer(x.cols());
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
      d(i) = row_distance(x, i, mu, chol, buffer);
    }
  }
  return d;
}

namespace reference {
DistanceVector mahalanobis(const Matrix& x, const Vector& mu, const Matrix& scatter) {
  const Matrix chol = cholesky_lower(scatter);
  DistanceVector d(x.rows());
  Vector buffer(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    d(i) = row_distance(x, i, mu, chol, buffer);
  }
  return d;
}
}  // namespace reference

DistanceVector mahalanobis(const DataMatrix& x, const LocationScatter& est, bool use_size) {
  if (use_size) {
    return mahalanobis(x.values(), est.mu, est.scatter());
  }
  return mahalanobis(x.values(), est.mu, est.shape);
}

WeightedMoments weighted_moments(const Matrix& x, const Vector& weights) {
  const double total = weights.sum();
  if (!(total > 0.0)) {
    throw DomainError("weights must have a positive sum");
  }
  Vector mean = (x.transpose() * weights) / total;
  const Matrix centered = x.rowwise() - mean.transpose();
  Matrix cov = (centered.transpose() * weights.asDiagonal() * centered) / total;
  cov = 0.5 * (cov + cov.transpose()).eval();
  return {std::move(mean), std::move(cov)};
}

WeightedMoments sample_moments(const Matrix& x) {
  const double n = static_cast<double>(x.rows());
  Vector mean = x.colwise().mean().transpose();
  const Matrix centered = x.rowwise() - mean.transpose();
  Matrix cov = (centered.transpose() * centered) / (n - 1.0);
  return {std::move(mean), std::move(cov)};
}

double median(std::vector<double> values) {
  if (values.empty()) {
    throw DomainError("median of an empty sample");
  }
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (n % 2 == 1) {
    return upper;
  }
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double median(const Vector& values) {
  return median(std::vector<double>(values.data(), values.data() + values.size()));
}

}  // namespace robscatter
