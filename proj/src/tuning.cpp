#include "robscatter/tuning.hpp"

#include <cmath>
#include <memory>

#include <json.hpp>

#include "robscatter/errors.hpp"
#include "robscatter/evalsim.hpp"
#include "robscatter/rng.hpp"
#include "streams.hpp"

namespace robscatter {

std::string_view to_string(EstimatorFamily family) {
  switch (family) {
    case EstimatorFamily::Classical: return "classical";
    case EstimatorFamily::Mve: return "mve";
    case EstimatorFamily::Ksd: return "ksd";
    case EstimatorFamily::S: return "s";
    case EstimatorFamily::Rocke: return "rocke";
    case EstimatorFamily::MM: return "mm";
    case EstimatorFamily::Tau: return "tau";
    case EstimatorFamily::StahelDonoho: return "sd";
  }
  return "?";
}

std::string_view to_string(StartKind start) {
  switch (start) {
    case StartKind::Mve: return "mve";
    case StartKind::Ksd: return "ksd";
    case StartKind::Subsampling: return "subs";
    case StartKind::User: return "user";
  }
  return "?";
}

EstimatorFamily estimator_family_from_string(std::string_view name) {
  if (name == "classical") return EstimatorFamily::Classical;
  if (name == "mve") return EstimatorFamily::Mve;
  if (name == "ksd") return EstimatorFamily::Ksd;
  if (name == "s") return EstimatorFamily::S;
  if (name == "rocke") return EstimatorFamily::Rocke;
  if (name == "mm") return EstimatorFamily::MM;
  if (name == "tau") return EstimatorFamily::Tau;
  if (name == "sd" || name == "stahel-donoho") return EstimatorFamily::StahelDonoho;
  throw DomainError("unknown estimator family '" + std::string(name) + "'");
}

StartKind start_kind_from_string(std::string_view name) {
  if (name == "mve") return StartKind::Mve;
  if (name == "ksd") return StartKind::Ksd;
  if (name == "subs" || name == "subsampling") return StartKind::Subsampling;
  if (name == "user") return StartKind::User;
  throw DomainError("unknown start '" + std::string(name) + "'");
}

const TuningTable& default_tuning_table() {
  static const TuningTable table{
      {"mm/mve/bisquare", {"mm_mve", {0.540, 3.538, -7.505, 1.114, -0.968}}},
      {"mm/mve/optimal", {"mm_mve", {0.469, 3.158, -0.928, 1.167, -1.698}}},
      {"mm/ksd/bisquare", {"mm_ksd", {0.716, 2.572, -0.786}}},
      {"mm/ksd/optimal", {"mm_ksd", {0.612, 4.504, -1.112}}},
      {"rocke/mve", {"rocke", {0.00436, -0.5030, 0.4214}}},
      {"rocke/ksd", {"rocke", {0.00216, -1.0078, 0.8156}}},
      {"tau/bisquare", {"tau", {6.2984, -0.8458}}},
      {"tau/optimal", {"tau", {2.9987, -0.4647}}},
      {"sd/subs", {"sd", {5.116, 63.820, 2.213}}},
      {"sd/ksd", {"sd", {6.564, 0.211, 24.286}}},
  };
  return table;
}

std::string tuning_table_to_json(const TuningTable& table) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, row] : table) {
    j[key] = {{"formula", row.formula}, {"coef", row.coef}};
  }
  return j.dump(2);
}

TuningTable tuning_table_from_json(const std::string& text) {
  TuningTable table;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    for (const auto& [key, value] : j.items()) {
      table[key] = TuningRow{value.at("formula").get<std::string>(), value.at("coef").get<std::vector<double>>()};
    }
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed tuning table: ") + ex.what());
  }
  return table;
}

namespace {

const TuningRow& lookup(const TuningTable& table, const std::string& key, std::size_t ncoef) {
  const auto it = table.find(key);
  if (it == table.end()) throw DomainError("no tuning row '" + key + "'");
  if (it->second.coef.size() != ncoef) throw DomainError("tuning row '" + key + "' has the wrong arity");
  return it->second;
}

std::string rho_key(RhoFamily rho) {
  if (rho == RhoFamily::RockeBiflat) throw DomainError("biflat rho has no MM/tau tuning row");
  return std::string(to_string(rho));
}

double rocke_formula(StartKind start, int p, int n, const TuningTable& table) {
  const std::string key = start == StartKind::Mve ? "rocke/mve" : "rocke/ksd";
  const auto& k = lookup(table, key, 3).coef;
  return k[0] * std::pow(p, k[1]) * std::pow(n, k[2]);
}

}  // namespace

double rocke_alpha_extrapolated(StartKind start, int p, int n, const TuningTable& table) {
  if (p < 2 || n <= p) throw DomainError("approx_constant: need p >= 2 and n > p");
  return rocke_formula(start, p, n, table);
}

double approx_constant(EstimatorFamily family, StartKind start, RhoFamily rho, int p, int n, const TuningTable& table) {
  if (p < 2 || n <= p) throw DomainError("approx_constant: need p >= 2 and n > p");
  const double pd = p;
  const double nd = n;
  switch (family) {
    case EstimatorFamily::MM: {
      if (start == StartKind::Mve) {
        const auto& k = lookup(table, "mm/mve/" + rho_key(rho), 5).coef;
        return (k[0] + k[1] / pd + k[2] / (pd * pd)) * (k[3] + k[4] * pd / nd);
      }
      const auto& k = lookup(table, "mm/ksd/" + rho_key(rho), 3).coef;
      return k[0] + k[1] / pd + k[2] * pd / nd;
    }
    case EstimatorFamily::Rocke:
      if (p < 15) {
        throw TunabilityError(
            "Rocke alpha is only tabulated for p >= 15: for smaller p the estimator's maximum efficiency "
            "(0.876 at p = 10) is below 0.9");
      }
      return rocke_formula(start, p, n, table);
    case EstimatorFamily::Tau: {
      const auto& k = lookup(table, "tau/" + rho_key(rho), 2).coef;
      return k[0] * std::pow(pd, k[1]);
    }
    case EstimatorFamily::StahelDonoho: {
      const auto& k = lookup(table, start == StartKind::Subsampling ? "sd/subs" : "sd/ksd", 3).coef;
      return k[0] + k[1] / nd + k[2] * pd / nd;
    }
    default:
      throw DomainError("estimator '" + std::string(to_string(family)) + "' has no tuning constant");
  }
}

// ---------------------------------------------------------------- calibration

namespace {

struct CalibrationSample {
  std::unique_ptr<DataMatrix> x;
  std::unique_ptr<StartCache> cache;
  double classical = 0.0;
};

}  // namespace

CalibrationResult calibrate_efficiency(EstimatorFamily family, StartKind start, RhoFamily rho, int p, int n,
                                       double target, const CalibrationOptions& opt) {
  if (!(target > 0.0 && target < 1.0)) throw DomainError("calibrate: target efficiency must lie in (0, 1)");
  if (p < 2 || n <= p) throw DomainError("calibrate: need p >= 2 and n > p");
  if (opt.replicates < 2) throw DomainError("calibrate: need at least 2 replicates");

  EstimatorConfig cfg;
  cfg.family = family;
  cfg.start = start;
  cfg.rho = family == EstimatorFamily::Rocke ? RhoFamily::RockeBiflat : rho;
  double lo = 0.0;
  double hi = 0.0;
  bool increasing = true;
  switch (family) {
    case EstimatorFamily::MM: lo = 0.2; hi = 20.0; break;
    case EstimatorFamily::Tau: lo = 0.05; hi = 50.0; break;
    case EstimatorFamily::StahelDonoho: lo = 0.5; hi = 500.0; break;
    case EstimatorFamily::Rocke: lo = 1e-6; hi = 0.5; increasing = false; break;
    default: throw DomainError("estimator '" + std::string(to_string(family)) + "' has no tuning constant");
  }
  if (opt.lower > 0.0) lo = opt.lower;
  if (opt.upper > 0.0) hi = opt.upper;
  if (!(lo < hi)) throw DomainError("calibrate: empty bracket");

  const auto reps = static_cast<std::size_t>(opt.replicates);
  std::vector<CalibrationSample> samples(reps);
  const Matrix eye = Matrix::Identity(p, p);
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng(opt.seed, streams::id(streams::kCalibration, r));
    samples[r].x = std::make_unique<DataMatrix>(rng.normal_matrix(n, p));
    StartConfig sc;
    sc.seed = streams::child_seed(opt.seed, r, 0);
    sc.execution = Execution::Serial;
    samples[r].cache = std::make_unique<StartCache>(*samples[r].x, sc);
    samples[r].classical = kl_scatter(classical_estimate(*samples[r].x).scatter(), eye);
  }
  double classical_mean = 0.0;
  for (const auto& s : samples) classical_mean += s.classical;
  classical_mean /= static_cast<double>(reps);

  CalibrationResult out;
  out.lower = lo;
  out.upper = hi;
  std::vector<double> d(reps);
  std::vector<char> ok(reps);
  auto efficiency = [&](double t) {
    EstimatorConfig c = cfg;
    c.tuning = t;
#pragma omp parallel for schedule(dynamic, 1) if (opt.parallel)
    for (std::size_t r = 0; r < reps; ++r) {
      try {
        const EstimateResult e = run_estimator(c, *samples[r].cache);
        d[r] = kl_scatter(e.estimate.scatter(), eye);
        ok[r] = 1;
      } catch (const Error&) {
        ok[r] = 0;
      }
    }
    double sum = 0.0;
    int good = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      if (!ok[r]) {
        ++out.failures;
        continue;
      }
      sum += d[r];
      ++good;
    }
    ++out.evaluations;
    return good > 0 ? classical_mean / (sum / good) : 0.0;
  };

  // Work on the log scale, oriented so efficiency increases with u.
  double u_lo = std::log(increasing ? lo : hi);
  double u_hi = std::log(increasing ? hi : lo);
  auto at = [&](double u) { return std::exp(u); };
  double e_lo = efficiency(at(u_lo));
  double e_hi = efficiency(at(u_hi));
  if (e_lo >= target - opt.tolerance && e_lo > target) {
    out.constant = at(u_lo);
    out.efficiency = e_lo;
    out.attainable = std::abs(e_lo - target) <= opt.tolerance;
    return out;
  }
  if (e_hi <= target + opt.tolerance && e_hi < target) {
    out.constant = at(u_hi);
    out.efficiency = e_hi;
    out.attainable = std::abs(e_hi - target) <= opt.tolerance;
    return out;
  }
  double u = 0.5 * (u_lo + u_hi);
  double e = efficiency(at(u));
  for (int it = 0; it < opt.max_bisections && std::abs(e - target) > opt.tolerance; ++it) {
    if (e < target) {
      u_lo = u;
    } else {
      u_hi = u;
    }
    u = 0.5 * (u_lo + u_hi);
    e = efficiency(at(u));
  }
  out.constant = at(u);
  out.efficiency = e;
  out.attainable = std::abs(e - target) <= opt.tolerance;
  return out;
}

}  // namespace robscatter
