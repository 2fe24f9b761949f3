#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace robscatter {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// An n x p sample, one observation per row. Construction validates
/// n >= p + 1, p >= 2 and that every entry is finite.
class DataMatrix {
 public:
  DataMatrix() = default;
  explicit DataMatrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  Eigen::Index n() const noexcept { return values_.rows(); }
  Eigen::Index p() const noexcept { return values_.cols(); }
  auto row(Eigen::Index i) const { return values_.row(i); }

 private:
  Matrix values_;
};

/// Squared Mahalanobis distances, one per observation.
using DistanceVector = Vector;

/// Location plus scatter split into a det-1 shape and a size factor, so the
/// full scatter is size * shape.
struct LocationScatter {
  Vector mu;
  Matrix shape;
  double size = 1.0;

  Matrix scatter() const { return size * shape; }
  Eigen::Index dim() const noexcept { return mu.size(); }

  /// Splits an arbitrary SPD scatter into shape and size.
  static LocationScatter from_scatter(Vector mu, const Matrix& scatter);
};

struct ShapeAndSize {
  Matrix shape;
  double size;
};

/// S / det(S)^(1/p) and det(S)^(1/p). Throws DegenerateScatterError when S
/// is not SPD or its determinant is not a finite positive number.
ShapeAndSize normalize_shape(const Matrix& scatter);

/// log det of an SPD matrix via Cholesky. Throws SingularScatterError.
double log_det_spd(const Matrix& m);

/// Lower Cholesky factor; throws SingularScatterError naming the smallest
/// LDLT pivot on failure.
Matrix cholesky_lower(const Matrix& m);

/// d_i = (x_i - mu)' S^-1 (x_i - mu) with S = shape (use_size = false) or
/// size * shape. One factorization is shared by every row. Rows are split
/// across OpenMP threads when the sample is large enough to pay for it.
DistanceVector mahalanobis(const DataMatrix& x, const LocationScatter& est, bool use_size = false);
DistanceVector mahalanobis(const Matrix& x, const Vector& mu, const Matrix& scatter);

namespace reference {
/// Single-threaded row loop; kept as the baseline for the parallel kernel.
DistanceVector mahalanobis(const Matrix& x, const Vector& mu, const Matrix& scatter);
}  // namespace reference

/// Weighted mean and weighted covariance sum_i w_i (x_i - m)(x_i - m)' / sum_i w_i.
struct WeightedMoments {
  Vector mean;
  Matrix cov;
};
WeightedMoments weighted_moments(const Matrix& x, const Vector& weights);

/// Sample mean and the unbiased (n - 1) sample covariance.
WeightedMoments sample_moments(const Matrix& x);

/// Median with the mean-of-middle-pair convention for even length.
double median(std::vector<double> values);
double median(const Vector& values);

}  // namespace robscatter
