#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "robscatter/numkernel.hpp"

namespace robscatter {

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has none
  Matrix values;
};

/// Comma separated numbers, one observation per line. A first line with any
/// non-numeric field is taken as a header. Blank lines are skipped; quoted
/// fields are unquoted. Throws DataError naming the line of the first
/// non-numeric or short/long row.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

/// Per-point results and metadata of one estimation run.
struct EstimateReport {
  std::string estimator;
  double tuning = 0.0;
  double delta = 0.0;
  int iterations = 0;
  bool converged = false;
  bool fallback = false;
  int first_iteration_positive_weights = -1;
  double cutoff_quantile = 0.975;
  double cutoff = 0.0;  // chi2_p quantile the distances are compared with
  Vector mu;
  Matrix scatter;
  Vector distances;  // squared Mahalanobis distances under the full scatter
  std::vector<int> outlier;
  std::vector<std::string> warnings;
  std::string config;  // effective run configuration, JSON

  bool operator==(const EstimateReport& other) const;
};

std::string estimate_report_to_tsv(const EstimateReport& r);
EstimateReport estimate_report_from_tsv(const std::string& text);
std::string estimate_report_to_json(const EstimateReport& r);
EstimateReport estimate_report_from_json(const std::string& text);

/// Sorted distances paired with chi2_p((i - 0.5) / n).
struct QqRow {
  double distance;
  double quantile;
};
std::vector<QqRow> qq_pairs(const Vector& distances, int p);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace robscatter
