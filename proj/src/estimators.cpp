#include "robscatter/estimators.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include "robscatter/errors.hpp"
#include "robscatter/rng.hpp"
#include "robscatter/scales.hpp"
#include "streams.hpp"

namespace robscatter {

LocationScatter reweighted_step(const Matrix& x, const LocationScatter& est, const Vector& weights) {
  (void)est;
  const WeightedMoments m = weighted_moments(x, weights);
  return LocationScatter::from_scatter(m.mean, m.cov);
}

LocationScatter classical_estimate(const DataMatrix& x) {
  const WeightedMoments m = sample_moments(x.values());
  return LocationScatter::from_scatter(m.mean, m.cov);
}

namespace {

struct Evaluation {
  LocationScatter est;
  DistanceVector d;
  double objective = 0.0;
  double aux = 0.0;  // scale needed by the weight function
};

struct Objective {
  // Objective value and auxiliary scale for a distance vector.
  std::function<std::pair<double, double>(const DistanceVector&)> value;
  // Reweighting weights at the current distances.
  std::function<Vector(const DistanceVector&, double)> weights;
};

std::optional<Evaluation> evaluate(const Matrix& x, LocationScatter est, const Objective& obj) {
  try {
    Evaluation e;
    e.d = mahalanobis(x, est.mu, est.shape);
    auto [value, aux] = obj.value(e.d);
    if (!std::isfinite(value)) return std::nullopt;
    e.objective = value;
    e.aux = aux;
    e.est = std::move(est);
    return e;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<LocationScatter> blend(const LocationScatter& from, const LocationScatter& to, double lambda) {
  try {
    Vector mu = (1.0 - lambda) * from.mu + lambda * to.mu;
    Matrix s = (1.0 - lambda) * from.shape + lambda * to.shape;
    return LocationScatter::from_scatter(std::move(mu), s);
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Descent-guarded reweighting shared by S, Rocke, MM and tau. A step is
// accepted only if the objective strictly decreases; otherwise the candidate
// is pulled back toward the current iterate by halving.
Evaluation run_irls(const Matrix& x, const Evaluation& start, const Objective& obj, const IterationControl& ctl,
                    EstimateResult& result) {
  Evaluation cur = start;
  result.start_objective = cur.objective;
  result.objective_trace.assign(1, cur.objective);
  result.converged = false;
  int iter = 0;
  for (; iter < ctl.max_iter; ++iter) {
    const Vector w = obj.weights(cur.d, cur.aux);
    if (!(w.sum() > 0.0)) {
      result.warnings.emplace_back("all weights vanished during reweighting");
      break;
    }
    std::optional<Evaluation> next;
    std::optional<Evaluation> candidate;
    std::optional<LocationScatter> step_target;
    try {
      step_target = reweighted_step(x, cur.est, w);
      candidate = evaluate(x, *step_target, obj);
    } catch (const Error&) {
      step_target.reset();
    }
    if (candidate && candidate->objective < cur.objective) {
      next = std::move(candidate);
    } else if (step_target) {
      for (int k = 1; k <= ctl.max_halvings && !next; ++k) {
        auto mixed = blend(cur.est, *step_target, std::ldexp(1.0, -k));
        if (!mixed) continue;
        auto e = evaluate(x, std::move(*mixed), obj);
        if (e && e->objective < cur.objective) next = std::move(e);
      }
    }
    if (!next) {
      // No descent left: a fixed point up to rounding counts as convergence.
      result.converged =
          candidate && (candidate->objective - cur.objective) <= ctl.tol * std::abs(cur.objective);
      break;
    }
    const double rel = (cur.objective - next->objective) / std::abs(cur.objective);
    const double moved = (next->est.mu - cur.est.mu).norm();
    const double mu_norm = cur.est.mu.norm();
    cur = std::move(*next);
    result.objective_trace.push_back(cur.objective);
    if (rel <= ctl.tol && moved <= ctl.tol * (1.0 + mu_norm)) {
      result.converged = true;
      ++iter;
      break;
    }
  }
  result.iterations = iter;
  result.objective = cur.objective;
  return cur;
}

Evaluation must_evaluate(const Matrix& x, LocationScatter est, const Objective& obj, const char* who) {
  auto e = evaluate(x, std::move(est), obj);
  if (!e) {
    throw EstimationError(std::string(who) + ": objective cannot be evaluated at the start");
  }
  return std::move(*e);
}

LocationScatter det_one(const LocationScatter& start) {
  return LocationScatter::from_scatter(start.mu, start.shape);
}

Vector weights_at(const DistanceVector& d, const RhoSpec& rho_spec, double divisor) {
  Vector w(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    w(i) = weight(rho_spec, d(i) / divisor);
  }
  return w;
}

}  // namespace

EstimateResult s_estimate(const DataMatrix& data, const RhoSpec& rho_spec, double delta, const LocationScatter& start,
                          const IterationControl& control) {
  const Matrix& x = data.values();
  MScaleParams params;
  params.delta = delta;
  params.rho = rho_spec;
  Objective obj;
  obj.value = [&](const DistanceVector& d) {
    const double s = mscale(d, params);
    return std::make_pair(s, s);
  };
  obj.weights = [&](const DistanceVector& d, double s) { return weights_at(d, rho_spec, s); };

  EstimateResult result;
  const Evaluation first = must_evaluate(x, det_one(start), obj, "S-estimator");
  const Evaluation fin = run_irls(x, first, obj, control, result);
  result.scale = fin.objective;
  result.estimate = size_correct(x, fin.est);
  return result;
}

EstimateResult rocke_estimate(const DataMatrix& data, double alpha, double delta, const LocationScatter& start,
                              const IterationControl& control) {
  const Matrix& x = data.values();
  const auto p = static_cast<int>(data.p());
  const LocationScatter begin = det_one(start);
  const DistanceVector d0 = mahalanobis(x, begin.mu, begin.shape);

  double gamma = rocke_gamma(p, alpha);
  MScaleParams params;
  params.delta = delta;
  int positive = 0;
  while (true) {
    params.rho = RhoSpec::rocke_with_gamma(gamma);
    params.rho.alpha = alpha;
    const double s0 = mscale(d0, params);
    positive = static_cast<int>((weights_at(d0, params.rho, s0).array() > 0.0).count());
    if (positive >= 2 * p || gamma >= 1.0) break;
    gamma = std::min(1.0, 1.5 * gamma);
  }

  if (positive < 2 * p) {
    EstimateResult fb = s_estimate(data, RhoSpec::bisquare(), delta, start, control);
    MScaleParams bis{delta, RhoSpec::bisquare()};
    const double s0 = mscale(d0, bis);
    fb.first_iteration_positive_weights =
        static_cast<int>((weights_at(d0, bis.rho, s0).array() > 0.0).count());
    fb.fallback = true;
    fb.gamma_used = gamma;
    fb.warnings.emplace_back("biflat band too narrow even at gamma = 1; fell back to the bisquare S-estimate");
    return fb;
  }

  const RhoSpec rho_spec = params.rho;
  Objective obj;
  obj.value = [&](const DistanceVector& d) {
    const double s = mscale(d, params);
    return std::make_pair(s, s);
  };
  obj.weights = [&](const DistanceVector& d, double s) { return weights_at(d, rho_spec, s); };

  EstimateResult result;
  result.first_iteration_positive_weights = positive;
  result.gamma_used = gamma;
  if (gamma > rocke_gamma(p, alpha)) {
    std::ostringstream msg;
    msg << "biflat band enlarged to gamma = " << gamma << " to give 2p positive weights";
    result.warnings.push_back(msg.str());
  }
  const Evaluation first = must_evaluate(x, begin, obj, "Rocke estimator");
  const Evaluation fin = run_irls(x, first, obj, control, result);
  result.scale = fin.objective;
  result.estimate = size_correct(x, fin.est);
  return result;
}

EstimateResult mm_estimate(const DataMatrix& data, const RhoSpec& rho_spec, double c, double delta,
                           const LocationScatter& start, const IterationControl& control) {
  if (!(c > 0.0)) {
    throw DomainError("MM: tuning constant must be positive");
  }
  const Matrix& x = data.values();
  const LocationScatter begin = det_one(start);
  const DistanceVector d0 = mahalanobis(x, begin.mu, begin.shape);
  const double s = mscale(d0, MScaleParams{delta, rho_spec});
  const RhoSpec tuned = scaled(rho_spec, c * s);

  Objective obj;
  obj.value = [&](const DistanceVector& d) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) sum += rho(tuned, d(i));
    return std::make_pair(sum, 1.0);
  };
  obj.weights = [&](const DistanceVector& d, double) { return weights_at(d, tuned, 1.0); };

  EstimateResult result;
  result.scale = s;
  const Evaluation first = must_evaluate(x, begin, obj, "MM-estimator");
  const Evaluation fin = run_irls(x, first, obj, control, result);
  if (fin.objective > result.start_objective) {
    result.fallback = true;
    result.objective = result.start_objective;
    result.estimate = size_correct(x, begin);
    return result;
  }
  result.estimate = size_correct(x, fin.est);
  return result;
}

bool tau_weights(const Vector& t, const RhoSpec& rho1, double c, Vector& w) {
  const RhoSpec rho2 = scaled(rho1, c);
  const Eigen::Index n = t.size();
  Vector d1(n);
  Vector d2(n);
  double sum_rho2 = 0.0;
  double sum_d2t = 0.0;
  double sum_d1t = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    d1(i) = rho_derivative(rho1, t(i));
    d2(i) = rho_derivative(rho2, t(i));
    sum_rho2 += rho(rho2, t(i));
    sum_d2t += d2(i) * t(i);
    sum_d1t += d1(i) * t(i);
  }
  w = d2;
  if (!(sum_d1t > 0.0)) return false;
  const double a = (sum_rho2 - sum_d2t) / sum_d1t;
  if (!(a > 0.0)) return false;
  Vector composite = a * d1 + d2;
  if ((composite.array() < 0.0).any() || !(composite.sum() > 0.0)) return false;
  w = std::move(composite);
  return true;
}

EstimateResult tau_estimate(const DataMatrix& data, const RhoSpec& rho1, double c, double delta,
                            const LocationScatter& start, const IterationControl& control) {
  if (!(c > 0.0)) {
    throw DomainError("tau: tuning constant must be positive");
  }
  const Matrix& x = data.values();
  EstimateResult result;
  Objective obj;
  obj.value = [&](const DistanceVector& d) {
    const TauScale ts = tau_scale(d, rho1, c, delta);
    return std::make_pair(ts.sigma, ts.sigma0);
  };
  obj.weights = [&](const DistanceVector& d, double sigma0) {
    Vector w;
    if (!tau_weights(d / sigma0, rho1, c, w)) ++result.weight_fallbacks;
    return w;
  };
  const Evaluation first = must_evaluate(x, det_one(start), obj, "tau-estimator");
  const Evaluation fin = run_irls(x, first, obj, control, result);
  result.scale = fin.aux;
  result.estimate = size_correct(x, fin.est);
  return result;
}

EstimateResult stahel_donoho(const DataMatrix& data, const DirectionSet& dirs, double c, bool squared) {
  if (dirs.empty()) {
    throw DomainError("Stahel-Donoho needs at least one direction");
  }
  if (!(c > 0.0)) {
    throw DomainError("Stahel-Donoho: tuning constant must be positive");
  }
  const Matrix& x = data.values();
  const Vector r = outlyingness(x, dirs);
  const RhoSpec w_spec = RhoSpec::optimal(c);
  Vector w(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) w(i) = weight(w_spec, squared ? r(i) * r(i) : r(i));
  if (!(w.sum() > 0.0)) {
    throw EstimationError("Stahel-Donoho: every weight is zero; use a larger tuning constant");
  }
  const WeightedMoments m = weighted_moments(x, w);
  EstimateResult result;
  result.estimate = size_correct(x, LocationScatter::from_scatter(m.mean, m.cov));
  result.converged = true;
  result.objective = r.maxCoeff();
  return result;
}

DirectionSet subsampling_directions(const DataMatrix& data, int count, std::uint64_t seed) {
  const Matrix& x = data.values();
  const auto n = static_cast<int>(data.n());
  const auto p = static_cast<int>(data.p());
  std::vector<Vector> normals;
  normals.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    Rng rng(seed, streams::id(streams::kSubsamplingDirection, static_cast<std::uint64_t>(j)));
    const std::vector<int> subset = rng.sample_without_replacement(n, p);
    Matrix diffs(p, p - 1);
    for (int k = 1; k < p; ++k) {
      diffs.col(k - 1) = (x.row(subset[static_cast<std::size_t>(k)]) - x.row(subset[0])).transpose();
    }
    Eigen::HouseholderQR<Matrix> qr(diffs);
    const Matrix q = qr.householderQ();
    Vector normal = q.col(p - 1);
    // Reject nearly degenerate hyperplanes.
    const Vector r_diag = qr.matrixQR().diagonal().head(p - 1).cwiseAbs();
    if (r_diag.size() > 0 && !(r_diag.minCoeff() > 1e-10 * std::max(1.0, r_diag.maxCoeff()))) continue;
    normals.push_back(std::move(normal));
  }
  return make_direction_set(x, normals);
}

}  // namespace robscatter
