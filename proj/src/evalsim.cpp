#include "robscatter/evalsim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "robscatter/errors.hpp"
#include "robscatter/rng.hpp"
#include "streams.hpp"

namespace robscatter {

double kl_location(const Vector& mu_hat, const Vector& mu0, const Matrix& sigma0) {
  const Matrix l = cholesky_lower(sigma0);
  const Vector z = l.triangularView<Eigen::Lower>().solve(mu_hat - mu0);
  return z.squaredNorm();
}

double kl_scatter(const Matrix& sigma_hat, const Matrix& sigma0) {
  const Matrix l = cholesky_lower(sigma0);
  const auto tri = l.triangularView<Eigen::Lower>();
  Matrix b = tri.solve(sigma_hat);
  b = tri.solve(b.transpose()).eval();
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b, Eigen::EigenvaluesOnly);
  const Vector& lambda = eig.eigenvalues();
  if (!(lambda.minCoeff() > 0.0)) {
    throw SingularScatterError("kl_scatter: estimate is not positive definite", lambda.minCoeff());
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    const double u = lambda(j) - 1.0;
    sum += std::max(0.0, u - std::log1p(u));
  }
  return sum;
}

Eigen::Index contaminated_rows(Eigen::Index n, double epsilon) {
  return static_cast<Eigen::Index>(std::floor(static_cast<double>(n) * epsilon + 1e-12));
}

DataMatrix contaminate(const DataMatrix& x, double epsilon, double gamma_c, double k) {
  const Eigen::Index m = contaminated_rows(x.n(), epsilon);
  if (m > x.n() || epsilon < 0.0) throw DomainError("contaminate: epsilon must lie in [0, 1]");
  if (m == 0) return x;
  Matrix v = x.values();
  for (Eigen::Index i = 0; i < m; ++i) v(i, 0) = gamma_c * v(i, 0) + k;
  return DataMatrix(std::move(v));
}

void validate(const Scenario& sc) {
  if (sc.p < 2) throw DomainError("scenario: p must be at least 2");
  if (sc.n <= sc.p) throw DomainError("scenario: n must exceed p");
  if (!(sc.epsilon >= 0.0 && sc.epsilon < 0.5)) throw DomainError("scenario: epsilon must lie in [0, 0.5)");
  if (2 * contaminated_rows(sc.n, sc.epsilon) >= sc.n) throw DomainError("scenario: too many outliers");
  if (!(sc.gamma_c >= 0.0)) throw DomainError("scenario: gamma must be nonnegative");
  if (sc.replicates < 1) throw DomainError("scenario: replicates must be positive");
  if (sc.estimators.empty()) throw DomainError("scenario: no estimators");
  if (sc.k_grid.empty() && !sc.clean_pass) throw DomainError("scenario: nothing to run");
}

namespace {

// Divergences of every estimator on one (replicate, K) sample.
struct Cell {
  double scatter = 0.0;
  double location = 0.0;
  bool ok = false;
  bool converged = false;
};

// Slot 0 is the clean pass (when enabled), slots 1.. follow the K grid.
// The last entry of every slot row is the classical baseline.
struct ReplicateResult {
  std::vector<std::vector<Cell>> slots;
};

Cell score(const LocationScatter& est, bool converged) {
  Cell c;
  const Eigen::Index p = est.dim();
  const Matrix eye = Matrix::Identity(p, p);
  c.scatter = kl_scatter(est.scatter(), eye);
  c.location = kl_location(est.mu, Vector::Zero(p), eye);
  c.ok = std::isfinite(c.scatter) && std::isfinite(c.location);
  c.converged = converged;
  return c;
}

std::vector<Cell> run_slot(const Scenario& sc, const DataMatrix& x, std::uint64_t start_seed, bool with_classical) {
  StartConfig cfg = sc.start;
  cfg.seed = start_seed;
  cfg.execution = Execution::Serial;
  StartCache cache(x, cfg);
  std::vector<Cell> row;
  row.reserve(sc.estimators.size() + 1);
  for (const EstimatorConfig& e : sc.estimators) {
    try {
      const EstimateResult r = run_estimator(e, cache);
      row.push_back(score(r.estimate, r.converged));
    } catch (const Error&) {
      row.push_back(Cell{});
    }
  }
  if (with_classical) row.push_back(score(classical_estimate(x), true));
  return row;
}

ReplicateResult run_replicate(const Scenario& sc, int r) {
  Rng rng(sc.seed, streams::id(streams::kReplicate, static_cast<std::uint64_t>(r)));
  const DataMatrix clean(rng.normal_matrix(sc.n, sc.p));
  ReplicateResult out;
  const auto ur = static_cast<std::uint64_t>(r);
  if (sc.clean_pass) out.slots.push_back(run_slot(sc, clean, streams::child_seed(sc.seed, ur, 0), true));
  for (std::size_t j = 0; j < sc.k_grid.size(); ++j) {
    const DataMatrix x = contaminate(clean, sc.epsilon, sc.gamma_c, sc.k_grid[j]);
    out.slots.push_back(run_slot(sc, x, streams::child_seed(sc.seed, ur, j + 1), false));
  }
  return out;
}

DivergenceReport aggregate(const Scenario& sc, const std::vector<ReplicateResult>& reps) {
  DivergenceReport rep;
  rep.p = sc.p;
  rep.n = sc.n;
  rep.epsilon = sc.epsilon;
  rep.gamma_c = sc.gamma_c;
  rep.k_grid = sc.k_grid;
  rep.replicates = sc.replicates;
  rep.seed = sc.seed;
  rep.clean_pass = sc.clean_pass;
  const std::size_t ne = sc.estimators.size();
  const std::size_t nk = sc.k_grid.size();
  const std::size_t offset = sc.clean_pass ? 1 : 0;

  if (sc.clean_pass) {
    double s = 0.0;
    double l = 0.0;
    for (const ReplicateResult& r : reps) {
      s += r.slots[0][ne].scatter;
      l += r.slots[0][ne].location;
    }
    rep.classical_scatter_mean = s / static_cast<double>(reps.size());
    rep.classical_location_mean = l / static_cast<double>(reps.size());
  }

  for (std::size_t e = 0; e < ne; ++e) {
    EstimatorSummary sum;
    sum.name = estimator_name(sc.estimators[e]);
    sum.scatter_mean.assign(nk, 0.0);
    sum.location_mean.assign(nk, 0.0);
    sum.successes.assign(nk, 0);
    sum.failures.assign(nk, 0);
    sum.nonconverged.assign(nk, 0);
    for (std::size_t j = 0; j < nk; ++j) {
      double s = 0.0;
      double l = 0.0;
      for (const ReplicateResult& r : reps) {
        const Cell& c = r.slots[j + offset][e];
        if (!c.ok) {
          ++sum.failures[j];
          continue;
        }
        ++sum.successes[j];
        if (!c.converged) ++sum.nonconverged[j];
        s += c.scatter;
        l += c.location;
      }
      if (sum.successes[j] > 0) {
        sum.scatter_mean[j] = s / sum.successes[j];
        sum.location_mean[j] = l / sum.successes[j];
      }
    }
    if (nk > 0) {
      sum.max_scatter = *std::max_element(sum.scatter_mean.begin(), sum.scatter_mean.end());
      sum.max_location = *std::max_element(sum.location_mean.begin(), sum.location_mean.end());
    }
    if (sc.clean_pass) {
      double s = 0.0;
      double l = 0.0;
      for (const ReplicateResult& r : reps) {
        const Cell& c = r.slots[0][e];
        if (!c.ok) {
          ++sum.clean_failures;
          continue;
        }
        ++sum.clean_successes;
        s += c.scatter;
        l += c.location;
      }
      if (sum.clean_successes > 0) {
        sum.clean_scatter_mean = s / sum.clean_successes;
        sum.clean_location_mean = l / sum.clean_successes;
        if (sum.clean_scatter_mean > 0.0) sum.efficiency_scatter = rep.classical_scatter_mean / sum.clean_scatter_mean;
        if (sum.clean_location_mean > 0.0) {
          sum.efficiency_location = rep.classical_location_mean / sum.clean_location_mean;
        }
      }
    }
    rep.estimators.push_back(std::move(sum));
  }
  return rep;
}

}  // namespace

DivergenceReport run_scenario(const Scenario& sc, Execution exec) {
  validate(sc);
  std::vector<ReplicateResult> reps(static_cast<std::size_t>(sc.replicates));
  const bool parallel = exec == Execution::Parallel;
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (int r = 0; r < sc.replicates; ++r) {
    reps[static_cast<std::size_t>(r)] = run_replicate(sc, r);
  }
  return aggregate(sc, reps);
}

namespace reference {

DivergenceReport run_scenario(const Scenario& sc) {
  validate(sc);
  std::vector<ReplicateResult> reps;
  reps.reserve(static_cast<std::size_t>(sc.replicates));
  for (int r = 0; r < sc.replicates; ++r) reps.push_back(run_replicate(sc, r));
  return aggregate(sc, reps);
}

}  // namespace reference

// ---------------------------------------------------------------- JSON

using nlohmann::json;

namespace {

json estimator_json(const EstimatorConfig& e) {
  json j;
  j["name"] = estimator_name(e);
  if (e.tuning) j["tuning"] = *e.tuning;
  if (e.delta) j["delta"] = *e.delta;
  j["max_iter"] = e.control.max_iter;
  j["tol"] = e.control.tol;
  return j;
}

EstimatorConfig estimator_from_json(const json& j) {
  if (j.is_string()) return parse_estimator(j.get<std::string>());
  EstimatorConfig e = parse_estimator(j.at("name").get<std::string>());
  if (j.contains("tuning")) e.tuning = j["tuning"].get<double>();
  if (j.contains("delta")) e.delta = j["delta"].get<double>();
  if (j.contains("max_iter")) e.control.max_iter = j["max_iter"].get<int>();
  if (j.contains("tol")) e.control.tol = j["tol"].get<double>();
  return e;
}

}  // namespace

std::string report_to_json(const DivergenceReport& r) {
  json j;
  j["p"] = r.p;
  j["n"] = r.n;
  j["epsilon"] = r.epsilon;
  j["gamma"] = r.gamma_c;
  j["k_grid"] = r.k_grid;
  j["replicates"] = r.replicates;
  j["seed"] = r.seed;
  j["clean_pass"] = r.clean_pass;
  j["classical_scatter_mean"] = r.classical_scatter_mean;
  j["classical_location_mean"] = r.classical_location_mean;
  json ests = json::array();
  for (const EstimatorSummary& s : r.estimators) {
    json e;
    e["name"] = s.name;
    e["scatter_mean"] = s.scatter_mean;
    e["location_mean"] = s.location_mean;
    e["successes"] = s.successes;
    e["failures"] = s.failures;
    e["nonconverged"] = s.nonconverged;
    e["max_scatter"] = s.max_scatter;
    e["max_location"] = s.max_location;
    e["clean_scatter_mean"] = s.clean_scatter_mean;
    e["clean_location_mean"] = s.clean_location_mean;
    e["efficiency_scatter"] = s.efficiency_scatter;
    e["efficiency_location"] = s.efficiency_location;
    e["clean_successes"] = s.clean_successes;
    e["clean_failures"] = s.clean_failures;
    ests.push_back(std::move(e));
  }
  j["estimators"] = std::move(ests);
  return j.dump(2);
}

DivergenceReport report_from_json(const std::string& text) {
  DivergenceReport r;
  try {
    const json j = json::parse(text);
    r.p = j.at("p").get<int>();
    r.n = j.at("n").get<int>();
    r.epsilon = j.at("epsilon").get<double>();
    r.gamma_c = j.at("gamma").get<double>();
    r.k_grid = j.at("k_grid").get<std::vector<double>>();
    r.replicates = j.at("replicates").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.clean_pass = j.at("clean_pass").get<bool>();
    r.classical_scatter_mean = j.at("classical_scatter_mean").get<double>();
    r.classical_location_mean = j.at("classical_location_mean").get<double>();
    for (const json& e : j.at("estimators")) {
      EstimatorSummary s;
      s.name = e.at("name").get<std::string>();
      s.scatter_mean = e.at("scatter_mean").get<std::vector<double>>();
      s.location_mean = e.at("location_mean").get<std::vector<double>>();
      s.successes = e.at("successes").get<std::vector<int>>();
      s.failures = e.at("failures").get<std::vector<int>>();
      s.nonconverged = e.at("nonconverged").get<std::vector<int>>();
      s.max_scatter = e.at("max_scatter").get<double>();
      s.max_location = e.at("max_location").get<double>();
      s.clean_scatter_mean = e.at("clean_scatter_mean").get<double>();
      s.clean_location_mean = e.at("clean_location_mean").get<double>();
      s.efficiency_scatter = e.at("efficiency_scatter").get<double>();
      s.efficiency_location = e.at("efficiency_location").get<double>();
      s.clean_successes = e.at("clean_successes").get<int>();
      s.clean_failures = e.at("clean_failures").get<int>();
      r.estimators.push_back(std::move(s));
    }
  } catch (const json::exception& ex) {
    throw DataError(std::string("malformed report: ") + ex.what());
  }
  return r;
}

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["p"] = sc.p;
  j["n"] = sc.n;
  j["epsilon"] = sc.epsilon;
  j["gamma"] = sc.gamma_c;
  j["k_grid"] = sc.k_grid;
  j["replicates"] = sc.replicates;
  j["seed"] = sc.seed;
  j["clean_pass"] = sc.clean_pass;
  json ests = json::array();
  for (const EstimatorConfig& e : sc.estimators) ests.push_back(estimator_json(e));
  j["estimators"] = std::move(ests);
  json st;
  st["mve_subsamples"] = sc.start.mve_subsamples;
  st["ksd_specific_directions"] = sc.start.ksd_specific_directions;
  st["ksd_cutoff_quantile"] = sc.start.ksd_cutoff_quantile;
  if (sc.start.ksd_cutoff_beta) st["ksd_cutoff_beta"] = *sc.start.ksd_cutoff_beta;
  st["kurtosis_restarts"] = sc.start.kurtosis_restarts;
  j["start"] = std::move(st);
  return j.dump(2);
}

Scenario scenario_from_json(const std::string& text, Scenario sc) {
  try {
    const json j = json::parse(text);
    if (j.contains("p")) sc.p = j["p"].get<int>();
    if (j.contains("n")) sc.n = j["n"].get<int>();
    if (j.contains("epsilon")) sc.epsilon = j["epsilon"].get<double>();
    if (j.contains("gamma")) sc.gamma_c = j["gamma"].get<double>();
    if (j.contains("k_grid")) sc.k_grid = j["k_grid"].get<std::vector<double>>();
    if (j.contains("replicates")) sc.replicates = j["replicates"].get<int>();
    if (j.contains("seed")) sc.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("clean_pass")) sc.clean_pass = j["clean_pass"].get<bool>();
    if (j.contains("estimators")) {
      sc.estimators.clear();
      for (const json& e : j["estimators"]) sc.estimators.push_back(estimator_from_json(e));
    }
    if (j.contains("start")) {
      const json& st = j["start"];
      if (st.contains("mve_subsamples")) sc.start.mve_subsamples = st["mve_subsamples"].get<int>();
      if (st.contains("ksd_specific_directions")) {
        sc.start.ksd_specific_directions = st["ksd_specific_directions"].get<int>();
      }
      if (st.contains("ksd_cutoff_quantile")) sc.start.ksd_cutoff_quantile = st["ksd_cutoff_quantile"].get<double>();
      if (st.contains("ksd_cutoff_beta")) sc.start.ksd_cutoff_beta = st["ksd_cutoff_beta"].get<double>();
      if (st.contains("kurtosis_restarts")) sc.start.kurtosis_restarts = st["kurtosis_restarts"].get<int>();
    }
  } catch (const json::exception& ex) {
    throw DomainError(std::string("malformed scenario: ") + ex.what());
  }
  return sc;
}

std::string report_to_tsv(const DivergenceReport& r) {
  std::ostringstream out;
  out << std::setprecision(6);
  out << "# p=" << r.p << " n=" << r.n << " epsilon=" << r.epsilon << " gamma=" << r.gamma_c
      << " replicates=" << r.replicates << " seed=" << r.seed << "\n";
  out << "estimator\tmax_scatter\tmax_location\tefficiency_scatter\tefficiency_location\tfailures";
  for (double k : r.k_grid) out << "\tscatter_K" << k;
  for (double k : r.k_grid) out << "\tlocation_K" << k;
  out << "\n";
  for (const EstimatorSummary& s : r.estimators) {
    int failures = s.clean_failures;
    for (int f : s.failures) failures += f;
    out << s.name << '\t' << s.max_scatter << '\t' << s.max_location << '\t' << s.efficiency_scatter << '\t'
        << s.efficiency_location << '\t' << failures;
    for (double v : s.scatter_mean) out << '\t' << v;
    for (double v : s.location_mean) out << '\t' << v;
    out << "\n";
  }
  return out.str();
}

}  // namespace robscatter
