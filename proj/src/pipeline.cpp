#include "robscatter/pipeline.hpp"

#include <algorithm>
#include <cctype>

#include "robscatter/errors.hpp"
#include "robscatter/scales.hpp"

namespace robscatter {

bool EstimatorConfig::operator==(const EstimatorConfig& other) const {
  return family == other.family && rho == other.rho && start == other.start && tuning == other.tuning &&
         delta == other.delta && sd_squared == other.sd_squared && control.max_iter == other.control.max_iter && control.tol == other.control.tol &&
         control.max_halvings == other.control.max_halvings;
}

namespace {

bool has_start(EstimatorFamily f) {
  switch (f) {
    case EstimatorFamily::Classical:
    case EstimatorFamily::Mve:
    case EstimatorFamily::Ksd:
      return false;
    default:
      return true;
  }
}

bool has_rho(EstimatorFamily f) {
  return f == EstimatorFamily::S || f == EstimatorFamily::MM || f == EstimatorFamily::Tau;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

EstimatorConfig parse_estimator(std::string_view text) {
  const std::string s = lower(text);
  EstimatorConfig cfg;
  std::string head = s;
  std::string tail;
  if (const auto plus = s.find('+'); plus != std::string::npos) {
    head = s.substr(0, plus);
    tail = s.substr(plus + 1);
  }
  std::string fam = head;
  std::string rho_name;
  bool s_e = false;
  bool sd_sq = false;
  if (head == "sd-sq") {
    fam = "sd";
    sd_sq = true;
  } else if (head == "s-e" || head == "se") {
    fam = "s";
    rho_name = "bisquare";
    s_e = true;
  } else if (const auto dash = head.find('-'); dash != std::string::npos) {
    fam = head.substr(0, dash);
    rho_name = head.substr(dash + 1);
  }
  cfg.family = estimator_family_from_string(fam);
  cfg.rho = cfg.family == EstimatorFamily::S ? RhoFamily::Bisquare : RhoFamily::Optimal;
  if (!rho_name.empty()) {
    if (!has_rho(cfg.family)) {
      throw DomainError("estimator '" + std::string(text) + "' takes no rho family");
    }
    cfg.rho = rho_family_from_string(rho_name);
    if (cfg.rho == RhoFamily::RockeBiflat) {
      throw DomainError("use 'rocke' for the biflat estimator");
    }
  }
  if (cfg.family == EstimatorFamily::Rocke) cfg.rho = RhoFamily::RockeBiflat;
  if (s_e) cfg.delta = 0.5;
  cfg.sd_squared = sd_sq;
  if (!has_start(cfg.family)) {
    if (!tail.empty()) throw DomainError("estimator '" + std::string(text) + "' takes no start");
    return cfg;
  }
  if (!tail.empty()) cfg.start = start_kind_from_string(tail);
  if (cfg.family == EstimatorFamily::StahelDonoho) {
    if (cfg.start == StartKind::Mve || cfg.start == StartKind::User) {
      throw DomainError("Stahel-Donoho directions come from 'ksd' or 'subs'");
    }
  } else if (cfg.start == StartKind::Subsampling) {
    throw DomainError("'subs' is a direction source for Stahel-Donoho only");
  }
  return cfg;
}

std::string estimator_name(const EstimatorConfig& cfg) {
  std::string out(to_string(cfg.family));
  if (cfg.family == EstimatorFamily::S && cfg.rho == RhoFamily::Bisquare && cfg.delta == 0.5) {
    out = "s-e";
  } else if (cfg.family == EstimatorFamily::StahelDonoho && cfg.sd_squared) {
    out = "sd-sq";
  } else if (has_rho(cfg.family)) {
    out += cfg.rho == RhoFamily::Bisquare ? "-bisq" : "-opt";
  }
  if (has_start(cfg.family)) {
    out += "+";
    out += to_string(cfg.start);
  }
  return out;
}

StartCache::StartCache(const DataMatrix& x, StartConfig cfg, std::optional<LocationScatter> user)
    : x_(&x), cfg_(cfg), user_(std::move(user)) {}

const MveResult& StartCache::mve() {
  if (!mve_) mve_ = robscatter::mve(*x_, cfg_);
  return *mve_;
}

const KsdResult& StartCache::ksd() {
  if (!ksd_) ksd_ = robscatter::ksd(*x_, cfg_);
  return *ksd_;
}

const DirectionSet& StartCache::subsampling() {
  if (!subsampling_) {
    subsampling_ = subsampling_directions(*x_, 50 * static_cast<int>(x_->p()), cfg_.seed);
  }
  return *subsampling_;
}

const LocationScatter& StartCache::start(StartKind kind) {
  switch (kind) {
    case StartKind::Mve:
      return mve().estimate;
    case StartKind::Ksd:
      return ksd().estimate;
    case StartKind::User:
      if (!user_) throw DomainError("user start requested but none supplied");
      return *user_;
    case StartKind::Subsampling:
      break;
  }
  throw DomainError("subsampling is not a start estimator");
}

double resolve_delta(const EstimatorConfig& cfg, Eigen::Index n, Eigen::Index p) {
  if (cfg.delta) {
    if (!(*cfg.delta > 0.0 && *cfg.delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
    return *cfg.delta;
  }
  return breakdown_delta(n, p);
}

double resolve_tuning(const EstimatorConfig& cfg, int p, int n, std::vector<std::string>* warnings) {
  if (cfg.tuning) {
    if (!(*cfg.tuning > 0.0)) throw DomainError("tuning constant must be positive");
    return *cfg.tuning;
  }
  switch (cfg.family) {
    case EstimatorFamily::Rocke: {
      if (p >= 15) return approx_constant(cfg.family, cfg.start, cfg.rho, p, n);
      if (warnings) {
        warnings->emplace_back("no Rocke alpha reaches 0.9 efficiency for p < 15; using the extrapolated formula");
      }
      return rocke_alpha_extrapolated(cfg.start, p, n);
    }
    case EstimatorFamily::MM:
    case EstimatorFamily::Tau:
    case EstimatorFamily::StahelDonoho: {
      const StartKind key = cfg.start == StartKind::User ? StartKind::Ksd : cfg.start;
      return approx_constant(cfg.family, key, cfg.rho, p, n);
    }
    default:
      return 0.0;
  }
}

EstimateResult run_estimator(const EstimatorConfig& cfg, StartCache& starts) {
  const DataMatrix& x = starts.data();
  const auto n = static_cast<int>(x.n());
  const auto p = static_cast<int>(x.p());
  std::vector<std::string> warnings;
  const double tuning = resolve_tuning(cfg, p, n, &warnings);
  const double delta = resolve_delta(cfg, x.n(), x.p());
  const RhoSpec base = cfg.rho == RhoFamily::Bisquare ? RhoSpec::bisquare() : RhoSpec::optimal();

  EstimateResult out;
  switch (cfg.family) {
    case EstimatorFamily::Classical:
      out.estimate = classical_estimate(x);
      out.converged = true;
      break;
    case EstimatorFamily::Mve: {
      const MveResult& r = starts.mve();
      out.estimate = r.estimate;
      out.objective = r.refined_score;
      out.converged = true;
      break;
    }
    case EstimatorFamily::Ksd: {
      const KsdResult& r = starts.ksd();
      out.estimate = r.estimate;
      out.converged = true;
      break;
    }
    case EstimatorFamily::S:
      out = s_estimate(x, base, delta, starts.start(cfg.start), cfg.control);
      break;
    case EstimatorFamily::Rocke:
      out = rocke_estimate(x, tuning, delta, starts.start(cfg.start), cfg.control);
      break;
    case EstimatorFamily::MM:
      out = mm_estimate(x, base, tuning, delta, starts.start(cfg.start), cfg.control);
      break;
    case EstimatorFamily::Tau:
      out = tau_estimate(x, base, tuning, delta, starts.start(cfg.start), cfg.control);
      break;
    case EstimatorFamily::StahelDonoho: {
      const DirectionSet& dirs = cfg.start == StartKind::Subsampling ? starts.subsampling() : starts.ksd().directions;
      out = stahel_donoho(x, dirs, tuning, cfg.sd_squared);
      break;
    }
  }
  out.tuning = tuning;
  out.delta = has_start(cfg.family) && cfg.family != EstimatorFamily::StahelDonoho ? delta : 0.0;
  out.warnings.insert(out.warnings.begin(), warnings.begin(), warnings.end());
  return out;
}

EstimateResult run_estimator(const EstimatorConfig& cfg, const DataMatrix& x, const StartConfig& start_cfg) {
  StartCache cache(x, start_cfg);
  return run_estimator(cfg, cache);
}

}  // namespace robscatter
