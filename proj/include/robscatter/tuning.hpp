#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "robscatter/rho.hpp"

namespace robscatter {

enum class EstimatorFamily { Classical, Mve, Ksd, S, Rocke, MM, Tau, StahelDonoho };

/// Starting estimator; for Stahel-Donoho it names the direction source
/// (Ksd: the KSD directions, Subsampling: random hyperplane normals).
enum class StartKind { Mve, Ksd, Subsampling, User };

std::string_view to_string(EstimatorFamily family);
std::string_view to_string(StartKind start);
EstimatorFamily estimator_family_from_string(std::string_view name);
StartKind start_kind_from_string(std::string_view name);

/// Coefficients of one closed-form approximation, keyed by a row name such as
/// "mm/mve/bisquare". `formula` is one of "mm_mve", "mm_ksd", "rocke",
/// "tau", "sd".
struct TuningRow {
  std::string formula;
  std::vector<double> coef;
  bool operator==(const TuningRow&) const = default;
};

using TuningTable = std::map<std::string, TuningRow>;

/// The built-in coefficient table.
const TuningTable& default_tuning_table();

std::string tuning_table_to_json(const TuningTable& table);
TuningTable tuning_table_from_json(const std::string& text);

/// Closed-form tuning constant (c, or alpha for Rocke) for 0.9 efficiency.
/// Throws TunabilityError for Rocke with p < 15 and DomainError for families
/// without a tuning constant or invalid (p, n).
double approx_constant(EstimatorFamily family, StartKind start, RhoFamily rho, int p, int n,
                       const TuningTable& table = default_tuning_table());

/// The Rocke formula evaluated without the p >= 15 restriction.
double rocke_alpha_extrapolated(StartKind start, int p, int n, const TuningTable& table = default_tuning_table());

struct CalibrationResult {
  double constant = 0.0;
  double efficiency = 0.0;   // scatter efficiency at `constant`
  bool attainable = true;    // false: `constant` is a bracket endpoint
  double lower = 0.0;        // search bracket
  double upper = 0.0;
  int evaluations = 0;
  int failures = 0;          // replicate fits that failed (summed over evaluations)
};

struct CalibrationOptions {
  int replicates = 200;
  std::uint64_t seed = 1;
  double tolerance = 0.02;  // accepted |eff - target|
  int max_bisections = 40;
  /// Bracket override; the defaults depend on the family.
  double lower = 0.0;
  double upper = 0.0;
  bool parallel = true;
};

/// Finds the tuning constant whose Monte Carlo scatter efficiency on clean
/// N(0, I) samples of size n is within `tolerance` of `target`. The same
/// samples and starts are reused for every candidate constant. When the
/// target lies outside the efficiencies reachable on the bracket, the nearer
/// endpoint is returned with attainable = false.
CalibrationResult calibrate_efficiency(EstimatorFamily family, StartKind start, RhoFamily rho, int p, int n,
                                       double target, const CalibrationOptions& options = {});

}  // namespace robscatter
