#include "robscatter/initial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "robscatter/chi2.hpp"
#include "robscatter/errors.hpp"
#include "robscatter/rng.hpp"
#include "robscatter/size_correction.hpp"
#include "streams.hpp"

namespace robscatter {

namespace {

constexpr double kMadConsistency = 0.6745;

Matrix rows_of(const Matrix& x, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = x.row(rows[k]);
  }
  return out;
}

// Returns false when the subset covariance is singular.
bool score_subset(const Matrix& x, const std::vector<int>& subset, MveCandidate& out) {
  const WeightedMoments m = sample_moments(rows_of(x, subset));
  try {
    auto [shape, size] = normalize_shape(m.cov);
    (void)size;
    const DistanceVector d = reference::mahalanobis(x, m.mean, shape);
    out.subset = subset;
    out.score = median(d);
    out.mu = m.mean;
    out.shape = std::move(shape);
    return std::isfinite(out.score);
  } catch (const Error&) {
    return false;
  }
}

std::uint64_t binomial_capped(int n, int k, std::uint64_t cap) {
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    if (c > cap) return cap + 1;
  }
  return c;
}

}  // namespace

// ------------------------------------------------------------ directions

DirectionSet make_direction_set(const Matrix& x, const std::vector<Vector>& dirs) {
  DirectionSet set;
  for (const Vector& raw : dirs) {
    const double norm = raw.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      ++set.dropped;
      continue;
    }
    Vector u = raw / norm;
    const Vector y = x * u;
    const double center = median(y);
    const double mad = median(Vector((y.array() - center).abs())) / kMadConsistency;
    const double magnitude = y.cwiseAbs().maxCoeff();
    if (!(mad > 1e-12 * std::max(magnitude, 1e-300))) {
      ++set.dropped;
      continue;
    }
    set.dirs.push_back(std::move(u));
    set.center.push_back(center);
    set.spread.push_back(mad);
  }
  return set;
}

Vector outlyingness(const Matrix& x, const DirectionSet& dirs) {
  if (dirs.empty()) {
    throw DomainError("outlyingness needs at least one direction");
  }
  const auto m = static_cast<Eigen::Index>(dirs.size());
  Matrix a(x.cols(), m);
  for (Eigen::Index j = 0; j < m; ++j) {
    a.col(j) = dirs.dirs[static_cast<std::size_t>(j)];
  }
  const Matrix proj = x * a;
  Vector out = Vector::Zero(x.rows());
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto idx = static_cast<std::size_t>(j);
    const Vector r = (proj.col(j).array() - dirs.center[idx]).abs() / dirs.spread[idx];
    out = out.cwiseMax(r);
  }
  return out;
}

// ------------------------------------------------------------ MVE

std::optional<std::vector<std::vector<int>>> enumerate_subsets(int n, int k, std::size_t limit) {
  if (k < 0 || k > n) {
    throw DomainError("enumerate_subsets: need 0 <= k <= n");
  }
  if (binomial_capped(n, k, limit) > limit) {
    return std::nullopt;
  }
  std::vector<std::vector<int>> out;
  std::vector<int> current(static_cast<std::size_t>(k));
  std::iota(current.begin(), current.end(), 0);
  while (true) {
    out.push_back(current);
    int i = k - 1;
    while (i >= 0 && current[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++current[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

MveCandidate mve_best_candidate(const Matrix& x, const std::vector<std::vector<int>>& subsets, Execution exec,
                                int* singular) {
  const auto count = static_cast<std::ptrdiff_t>(subsets.size());
  std::vector<MveCandidate> candidates(subsets.size());
  std::vector<char> ok(subsets.size(), 0);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t j = 0; j < count; ++j) {
      const auto k = static_cast<std::size_t>(j);
      ok[k] = score_subset(x, subsets[k], candidates[k]) ? 1 : 0;
    }
  } else {
    for (std::ptrdiff_t j = 0; j < count; ++j) {
      const auto k = static_cast<std::size_t>(j);
      ok[k] = score_subset(x, subsets[k], candidates[k]) ? 1 : 0;
    }
  }
  std::ptrdiff_t best = -1;
  int bad = 0;
  for (std::ptrdiff_t j = 0; j < count; ++j) {
    const auto k = static_cast<std::size_t>(j);
    if (!ok[k]) {
      ++bad;
      continue;
    }
    if (best < 0 || candidates[k].score < candidates[static_cast<std::size_t>(best)].score) {
      best = j;
    }
  }
  if (singular != nullptr) *singular = bad;
  if (best < 0) {
    throw StartFailureError("MVE: every subsample covariance is singular");
  }
  return std::move(candidates[static_cast<std::size_t>(best)]);
}

MveResult mve(const DataMatrix& data, const StartConfig& cfg) {
  const Matrix& x = data.values();
  const int n = static_cast<int>(data.n());
  const int p = static_cast<int>(data.p());
  if (n < p + 2) {
    throw DataError("MVE needs n >= p + 2");
  }
  if (cfg.mve_subsamples < 1) {
    throw DomainError("MVE needs at least one subsample");
  }

  MveResult result;
  std::vector<std::vector<int>> subsets;
  if (auto all = enumerate_subsets(n, p + 1, static_cast<std::size_t>(cfg.mve_subsamples))) {
    subsets = std::move(*all);
    result.exhaustive = true;
  } else {
    subsets.resize(static_cast<std::size_t>(cfg.mve_subsamples));
    for (std::size_t j = 0; j < subsets.size(); ++j) {
      Rng rng(cfg.seed, streams::id(streams::kMveSubset, j));
      subsets[j] = rng.sample_without_replacement(n, p + 1);
    }
  }
  result.subsets_scored = static_cast<int>(subsets.size());
  result.best = mve_best_candidate(x, subsets, cfg.execution, &result.singular_subsets);
  result.raw_score = result.best.score;

  // Concentration: refit on the ceil(n/2) points closest under the best candidate.
  LocationScatter current{result.best.mu, result.best.shape, 1.0};
  result.refined_score = result.raw_score;
  const DistanceVector d = mahalanobis(x, current.mu, current.shape);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d(a) < d(b); });
  order.resize(static_cast<std::size_t>((n + 1) / 2));
  std::sort(order.begin(), order.end());
  MveCandidate refined;
  if (score_subset(x, order, refined) && refined.score < result.raw_score) {
    current = LocationScatter{refined.mu, refined.shape, 1.0};
    result.refined_score = refined.score;
    result.concentration_improved = true;
  }
  result.estimate = size_correct(x, std::move(current));
  return result;
}

LocationScatter mve_start(const DataMatrix& x, const StartConfig& cfg) { return mve(x, cfg).estimate; }

// ------------------------------------------------------------ kurtosis search

double sample_kurtosis(const Vector& y) {
  const Vector c = y.array() - y.mean();
  const double m2 = c.squaredNorm() / static_cast<double>(y.size());
  const double m4 = c.array().square().square().sum() / static_cast<double>(y.size());
  return m4 / (m2 * m2);
}

namespace {

struct KurtosisEval {
  double value;
  Vector gradient;  // Euclidean gradient
};

// k(u) = n sum y^4 / (sum y^2)^2 with y = Z u; Z is centered.
KurtosisEval kurtosis_objective(const Matrix& z, const Vector& u) {
  const Vector y = z * u;
  const double n = static_cast<double>(z.rows());
  const double m2 = y.squaredNorm();
  const Vector y3 = y.array().cube();
  const double m4 = y3.dot(y);
  const double value = n * m4 / (m2 * m2);
  Vector grad = (4.0 * n / (m2 * m2)) * (z.transpose() * y3) - (4.0 * n * m4 / (m2 * m2 * m2)) * (z.transpose() * y);
  return {value, std::move(grad)};
}

struct SphereOptimum {
  Vector u;
  double value;
};

// Projected gradient ascent (sign = +1) or descent (sign = -1) on the unit
// sphere intersected with span(z'), with adaptive backtracking.
SphereOptimum optimize_on_sphere(const Matrix& z, Vector u, double sign, int max_iter) {
  u.normalize();
  KurtosisEval cur = kurtosis_objective(z, u);
  double step = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    Vector g = sign * cur.gradient;
    g -= g.dot(u) * u;
    const double gnorm = g.norm();
    if (!(gnorm > 1e-14)) break;
    if (step == 0.0) step = 0.5 / gnorm;
    bool moved = false;
    double moved_by = 0.0;
    for (int half = 0; half < 60; ++half) {
      Vector trial = u + step * g;
      trial.normalize();
      KurtosisEval next = kurtosis_objective(z, trial);
      if (sign * (next.value - cur.value) > 0.0) {
        moved_by = (trial - u).norm();
        u = std::move(trial);
        cur = std::move(next);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved || moved_by < 1e-8) break;
    step *= 2.0;
  }
  return {u, cur.value};
}

}  // namespace

KurtosisDirections kurtosis_directions(const DataMatrix& data, const StartConfig& cfg) {
  const Matrix& x = data.values();
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  if (n < p + 2) {
    throw DataError("kurtosis directions need n >= p + 2");
  }

  const WeightedMoments classical = sample_moments(x);
  Matrix chol;
  try {
    chol = cholesky_lower(classical.cov);
  } catch (const SingularScatterError& e) {
    throw StartFailureError(std::string("KSD: sample covariance is singular: ") + e.what());
  }
  // Rows z_i = L^-1 (x_i - mean).
  const Matrix centered = x.rowwise() - classical.mean.transpose();
  const Matrix z = chol.triangularView<Eigen::Lower>().solve(centered.transpose()).transpose();
  const auto to_original = [&](const Vector& w) {
    Vector a = chol.transpose().triangularView<Eigen::Upper>().solve(w);
    return Vector(a / a.norm());
  };

  KurtosisDirections out;
  std::vector<Vector> original;

  for (int sweep = 0; sweep < 2; ++sweep) {
    const double sign = sweep == 0 ? 1.0 : -1.0;
    Matrix zd = z;
    std::vector<Vector> found;
    for (Eigen::Index k = 0; k < p; ++k) {
      const Vector norms = zd.rowwise().norm();
      const double scale = norms.maxCoeff();
      if (!(scale > 1e-10 * std::max(1.0, z.rowwise().norm().maxCoeff()))) {
        ++out.rank_deficient;
        continue;
      }
      Rng rng(cfg.seed, streams::id(streams::kKurtosisRestart, static_cast<std::uint64_t>(sweep * p + k)));
      SphereOptimum best{Vector(), -std::numeric_limits<double>::infinity()};
      for (int r = 0; r < std::max(1, cfg.kurtosis_restarts); ++r) {
        // Restart from a random observation with non-negligible deflated norm.
        Eigen::Index row = 0;
        for (int tries = 0; tries < 100; ++tries) {
          row = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
          if (norms(row) > 1e-6 * scale) break;
        }
        if (!(norms(row) > 1e-6 * scale)) {
          norms.maxCoeff(&row);
        }
        SphereOptimum opt = optimize_on_sphere(zd, zd.row(row).transpose(), sign, cfg.kurtosis_max_iter);
        if (best.u.size() == 0 || sign * opt.value > sign * best.value) {
          best = std::move(opt);
        }
      }
      Vector u = best.u;
      for (const Vector& prev : found) u -= u.dot(prev) * prev;
      u.normalize();
      zd -= (zd * u) * u.transpose();
      found.push_back(u);
      out.whitened.push_back(u);
      out.kurtosis.push_back(sample_kurtosis(z * u));
      original.push_back(to_original(u));
      (sweep == 0 ? out.maximizers : out.minimizers) += 1;
    }
  }

  // Specific directions: differences between an outer-half and an inner-half point.
  const int specific = cfg.ksd_specific_directions < 0 ? std::max<int>(static_cast<int>(p), 20)
                                                       : cfg.ksd_specific_directions;
  if (specific > 0) {
    const Vector norms = z.rowwise().norm();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return norms(a) > norms(b); });
    const std::size_t outer = static_cast<std::size_t>(n / 2);
    const std::size_t inner = static_cast<std::size_t>(n) - outer;
    for (int s = 0; s < specific; ++s) {
      Rng rng(cfg.seed, streams::id(streams::kSpecificDirection, static_cast<std::uint64_t>(s)));
      const int i = order[rng.index(outer)];
      const int j = order[outer + rng.index(inner)];
      const Vector w = z.row(i).transpose() - z.row(j).transpose();
      if (!(w.norm() > 0.0)) continue;
      original.push_back(to_original(w));
      out.kurtosis.push_back(sample_kurtosis(z * (w / w.norm())));
      ++out.specific;
    }
  }

  out.set = make_direction_set(x, original);
  return out;
}

// ------------------------------------------------------------ KSD estimator

KsdResult ksd_from_directions(const DataMatrix& data, DirectionSet directions, const StartConfig& cfg) {
  const Matrix& x = data.values();
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  if (directions.empty()) {
    throw StartFailureError("KSD: no usable projection directions");
  }
  KsdResult result;
  result.outlyingness = outlyingness(x, directions);
  result.directions = std::move(directions);

  double beta = 0.0;
  if (cfg.ksd_cutoff_beta) {
    beta = *cfg.ksd_cutoff_beta;
  } else {
    const double med_ol2 = median(Vector(result.outlyingness.array().square()));
    const int dof = static_cast<int>(p);
    beta = std::sqrt(chi2_quantile(dof, cfg.ksd_cutoff_quantile) * med_ol2 / chi2_median(dof));
  }
  if (!(beta > 0.0)) {
    throw StartFailureError("KSD: cutoff is not positive");
  }

  Vector w(n);
  for (int attempt = 0;; ++attempt) {
    w = (result.outlyingness.array() <= beta).cast<double>();
    result.retained = static_cast<int>(w.sum());
    if (result.retained >= p + 1) {
      try {
        const WeightedMoments m = weighted_moments(x, w);
        LocationScatter est = LocationScatter::from_scatter(m.mean, m.cov);
        result.estimate = size_correct(x, std::move(est));
        break;
      } catch (const DegenerateScatterError&) {
        // fall through to relaxing the cutoff
      }
    }
    if (attempt >= 20) {
      throw StartFailureError("KSD: retained points stay degenerate after relaxing the cutoff");
    }
    beta *= 1.5;
    ++result.cutoff_relaxations;
  }
  result.cutoff = beta;
  result.weights = std::move(w);
  return result;
}

KsdResult ksd(const DataMatrix& x, const StartConfig& cfg) {
  KurtosisDirections dirs = kurtosis_directions(x, cfg);
  return ksd_from_directions(x, std::move(dirs.set), cfg);
}

}  // namespace robscatter
