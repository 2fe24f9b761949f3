#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "robscatter/parallel.hpp"
#include "robscatter/pipeline.hpp"

namespace robscatter {

/// (mu_hat - mu0)' sigma0^-1 (mu_hat - mu0).
double kl_location(const Vector& mu_hat, const Vector& mu0, const Matrix& sigma0);

/// trace(sigma0^-1 sigma_hat) - log det(sigma0^-1 sigma_hat) - p, computed
/// from the eigenvalues of the whitened matrix so the result is never negative.
/// Throws SingularScatterError when either argument is not SPD.
double kl_scatter(const Matrix& sigma_hat, const Matrix& sigma0);

/// Replaces x_i1 by gamma_c * x_i1 + k for the first floor(n * epsilon) rows.
DataMatrix contaminate(const DataMatrix& x, double epsilon, double gamma_c, double k);
Eigen::Index contaminated_rows(Eigen::Index n, double epsilon);

struct Scenario {
  int p = 5;
  int n = 50;
  double epsilon = 0.1;
  double gamma_c = 0.0;
  std::vector<double> k_grid{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  int replicates = 100;
  std::uint64_t seed = 1;
  std::vector<EstimatorConfig> estimators;
  /// Run the uncontaminated pass that yields efficiencies.
  bool clean_pass = true;
  /// Start settings; the seed is replaced per (replicate, K).
  StartConfig start;
};

/// Throws DomainError describing the first invalid field.
void validate(const Scenario& sc);

struct EstimatorSummary {
  std::string name;
  /// Per K (aligned with the scenario's k_grid).
  std::vector<double> scatter_mean;
  std::vector<double> location_mean;
  std::vector<int> successes;
  std::vector<int> failures;
  std::vector<int> nonconverged;
  double max_scatter = 0.0;
  double max_location = 0.0;
  /// Clean pass.
  double clean_scatter_mean = 0.0;
  double clean_location_mean = 0.0;
  double efficiency_scatter = 0.0;
  double efficiency_location = 0.0;
  int clean_successes = 0;
  int clean_failures = 0;

  bool operator==(const EstimatorSummary&) const = default;
};

struct DivergenceReport {
  int p = 0;
  int n = 0;
  double epsilon = 0.0;
  double gamma_c = 0.0;
  std::vector<double> k_grid;
  int replicates = 0;
  std::uint64_t seed = 0;
  bool clean_pass = true;
  /// Clean-pass mean divergences of the sample covariance and sample mean.
  double classical_scatter_mean = 0.0;
  double classical_location_mean = 0.0;
  std::vector<EstimatorSummary> estimators;

  bool operator==(const DivergenceReport&) const = default;
};

/// Monte Carlo sweep over replicates and outlier sizes. Replicates run in
/// parallel (Execution::Parallel); every replicate draws from its own
/// substream and results are reduced in replicate order, so the report does
/// not depend on the thread count.
DivergenceReport run_scenario(const Scenario& sc, Execution exec = Execution::Parallel);

namespace reference {
/// Plain nested loops over replicates, K and estimators; baseline for tests.
DivergenceReport run_scenario(const Scenario& sc);
}  // namespace reference

std::string report_to_json(const DivergenceReport& report);
DivergenceReport report_from_json(const std::string& text);

std::string scenario_to_json(const Scenario& sc);
/// Fields absent from the JSON keep the values in `base`.
Scenario scenario_from_json(const std::string& text, Scenario base = {});

/// Appendix-style table: one row per estimator with the max-over-K scatter
/// and location D, efficiencies and failure counts; tab separated.
std::string report_to_tsv(const DivergenceReport& report);

}  // namespace robscatter
