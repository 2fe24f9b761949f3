#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "robscatter/numkernel.hpp"

namespace testutil {

using robscatter::Matrix;
using robscatter::Vector;

inline Matrix gaussian(std::mt19937_64& gen, Eigen::Index n, Eigen::Index p) {
  std::normal_distribution<double> z;
  Matrix m(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = z(gen);
  return m;
}

inline Vector gaussian_vector(std::mt19937_64& gen, Eigen::Index p) {
  return gaussian(gen, p, 1).col(0);
}

// Random SPD matrix with eigenvalues in [lo, hi].
inline Matrix random_spd(std::mt19937_64& gen, Eigen::Index p, double lo = 0.5, double hi = 3.0) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(gen, p, p));
  const Matrix q = qr.householderQ();
  std::uniform_real_distribution<double> u(lo, hi);
  Vector ev(p);
  for (Eigen::Index i = 0; i < p; ++i) ev(i) = u(gen);
  return q * ev.asDiagonal() * q.transpose();
}

// Well-conditioned non-symmetric matrix: rotation times SPD.
inline Matrix random_affine(std::mt19937_64& gen, Eigen::Index p) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(gen, p, p));
  const Matrix q = qr.householderQ();
  return q * random_spd(gen, p, 0.5, 2.0);
}

// Rows x_i -> A x_i + b.
inline Matrix affine_map(const Matrix& x, const Matrix& a, const Vector& b) {
  return (x * a.transpose()).rowwise() + b.transpose();
}

inline double rel_err(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}

struct OracleFit {
  std::vector<int> subset;
  double score;
};

// Every (p+1)-subset scored by the median distance under its det-1 shape.
inline OracleFit brute_force_mve(const Matrix& x) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  OracleFit best{{}, std::numeric_limits<double>::infinity()};
  std::vector<int> idx(p + 1);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == p + 1) {
      Matrix s(p + 1, p);
      for (int k = 0; k <= p; ++k) s.row(k) = x.row(idx[k]);
      const Vector mu = s.colwise().mean();
      const Matrix c = s.rowwise() - mu.transpose();
      Matrix cov = c.transpose() * c / p;
      const double det = cov.determinant();
      if (!(det > 1e-12)) return;
      cov /= std::pow(det, 1.0 / p);
      const Matrix inv = cov.inverse();
      std::vector<double> d(n);
      for (int i = 0; i < n; ++i) {
        const Vector r = x.row(i).transpose() - mu;
        d[i] = r.dot(inv * r);
      }
      std::sort(d.begin(), d.end());
      const double med = n % 2 ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
      if (med < best.score - 1e-12) best = {idx, med};
      return;
    }
    for (int i = start; i < n; ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace testutil
