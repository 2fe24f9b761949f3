#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robscatter/estimators.hpp"
#include "robscatter/initial.hpp"
#include "robscatter/tuning.hpp"

namespace robscatter {

/// A fully described estimator: family, rho, start and optional overrides.
/// Unset tuning comes from approx_constant; unset delta is 0.5 (1 - p/n).
struct EstimatorConfig {
  EstimatorFamily family = EstimatorFamily::MM;
  RhoFamily rho = RhoFamily::Optimal;
  StartKind start = StartKind::Ksd;
  std::optional<double> tuning;
  std::optional<double> delta;
  /// Stahel-Donoho only: weight the squared outlyingness ("sd-sq").
  bool sd_squared = false;
  IterationControl control;

  bool operator==(const EstimatorConfig& other) const;
};

/// Parses names such as "mm-opt+ksd", "tau-bisq+mve", "rocke+ksd",
/// "sd+subs", "s-bisq+ksd", "ksd", "mve" or "classical". "s-e" is the
/// bisquare S-estimator with delta = 0.5.
/// Throws DomainError on anything else.
EstimatorConfig parse_estimator(std::string_view text);

/// Canonical name accepted by parse_estimator.
std::string estimator_name(const EstimatorConfig& cfg);

/// Lazily computed starts for one sample, shared by every estimator run on it.
class StartCache {
 public:
  StartCache(const DataMatrix& x, StartConfig cfg, std::optional<LocationScatter> user = std::nullopt);

  const DataMatrix& data() const noexcept { return *x_; }
  const StartConfig& config() const noexcept { return cfg_; }

  const MveResult& mve();
  const KsdResult& ksd();
  const DirectionSet& subsampling();
  /// Start for MM/S/tau/Rocke. Throws DomainError for User without a user start.
  const LocationScatter& start(StartKind kind);

 private:
  const DataMatrix* x_;
  StartConfig cfg_;
  std::optional<LocationScatter> user_;
  std::optional<MveResult> mve_;
  std::optional<KsdResult> ksd_;
  std::optional<DirectionSet> subsampling_;
};

double resolve_delta(const EstimatorConfig& cfg, Eigen::Index n, Eigen::Index p);

/// Tuning constant for cfg at (p, n); 0 for families without one. Rocke with
/// p < 15 uses the extrapolated formula and appends a warning.
double resolve_tuning(const EstimatorConfig& cfg, int p, int n, std::vector<std::string>* warnings = nullptr);

/// Runs one configured estimator on the cache's sample.
EstimateResult run_estimator(const EstimatorConfig& cfg, StartCache& starts);
EstimateResult run_estimator(const EstimatorConfig& cfg, const DataMatrix& x, const StartConfig& start_cfg = {});

}  // namespace robscatter
