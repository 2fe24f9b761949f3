#include "robscatter/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "robscatter/chi2.hpp"
#include "robscatter/errors.hpp"

namespace robscatter {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(trim(field));
  return out;
}

bool parse_number(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), v);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

double parse_or_throw(const std::string& s, const char* what) {
  double v = 0.0;
  if (!parse_number(s, v)) throw DataError(std::string("malformed ") + what + ": '" + s + "'");
  return v;
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    std::size_t bad = 0;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (!parse_number(fields[j], row[j])) {
        numeric = false;
        bad = j;
        break;
      }
    }
    if (first) {
      first = false;
      width = fields.size();
      if (!numeric) {
        table.header = std::move(fields);
        continue;
      }
    }
    if (!numeric) {
      throw DataError("line " + std::to_string(lineno) + ", column " + std::to_string(bad + 1) +
                      ": non-numeric value '" + fields[bad] + "'");
    }
    if (fields.size() != width) {
      throw DataError("line " + std::to_string(lineno) + ": expected " + std::to_string(width) + " fields, found " +
                      std::to_string(fields.size()));
    }
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_csv(in);
}

bool EstimateReport::operator==(const EstimateReport& o) const {
  return estimator == o.estimator && tuning == o.tuning && delta == o.delta && iterations == o.iterations &&
         converged == o.converged && fallback == o.fallback &&
         first_iteration_positive_weights == o.first_iteration_positive_weights &&
         cutoff_quantile == o.cutoff_quantile && cutoff == o.cutoff && mu == o.mu && scatter == o.scatter &&
         distances == o.distances && outlier == o.outlier && warnings == o.warnings && config == o.config;
}

std::string estimate_report_to_tsv(const EstimateReport& r) {
  std::ostringstream out;
  auto clean = [](std::string s) {
    for (char& c : s) {
      if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return s;
  };
  out << "estimator\t" << r.estimator << "\n";
  out << "tuning\t" << format_double(r.tuning) << "\n";
  out << "delta\t" << format_double(r.delta) << "\n";
  out << "iterations\t" << r.iterations << "\n";
  out << "converged\t" << (r.converged ? 1 : 0) << "\n";
  out << "fallback\t" << (r.fallback ? 1 : 0) << "\n";
  out << "first_iteration_positive_weights\t" << r.first_iteration_positive_weights << "\n";
  out << "cutoff_quantile\t" << format_double(r.cutoff_quantile) << "\n";
  out << "cutoff\t" << format_double(r.cutoff) << "\n";
  out << "config\t" << clean(r.config) << "\n";
  for (const std::string& w : r.warnings) out << "warning\t" << clean(w) << "\n";
  out << "mu";
  for (Eigen::Index j = 0; j < r.mu.size(); ++j) out << '\t' << format_double(r.mu(j));
  out << "\n";
  for (Eigen::Index i = 0; i < r.scatter.rows(); ++i) {
    out << "scatter";
    for (Eigen::Index j = 0; j < r.scatter.cols(); ++j) out << '\t' << format_double(r.scatter(i, j));
    out << "\n";
  }
  out << "index\tdistance\toutlier\n";
  for (Eigen::Index i = 0; i < r.distances.size(); ++i) {
    out << i + 1 << '\t' << format_double(r.distances(i)) << '\t' << r.outlier[static_cast<std::size_t>(i)] << "\n";
  }
  return out.str();
}

EstimateReport estimate_report_from_tsv(const std::string& text) {
  EstimateReport r;
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> scatter_rows;
  std::vector<double> dist;
  bool table = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      f.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    const std::string& key = f[0];
    if (table) {
      if (f.size() != 3) throw DataError("malformed distance row: '" + line + "'");
      dist.push_back(parse_or_throw(f[1], "distance"));
      r.outlier.push_back(static_cast<int>(parse_or_throw(f[2], "outlier flag")));
      continue;
    }
    const std::string value = f.size() > 1 ? line.substr(key.size() + 1) : std::string();
    if (key == "estimator") r.estimator = value;
    else if (key == "tuning") r.tuning = parse_or_throw(value, "tuning");
    else if (key == "delta") r.delta = parse_or_throw(value, "delta");
    else if (key == "iterations") r.iterations = static_cast<int>(parse_or_throw(value, "iterations"));
    else if (key == "converged") r.converged = value == "1";
    else if (key == "fallback") r.fallback = value == "1";
    else if (key == "first_iteration_positive_weights") {
      r.first_iteration_positive_weights = static_cast<int>(parse_or_throw(value, "count"));
    } else if (key == "cutoff_quantile") r.cutoff_quantile = parse_or_throw(value, "cutoff quantile");
    else if (key == "cutoff") r.cutoff = parse_or_throw(value, "cutoff");
    else if (key == "config") r.config = value;
    else if (key == "warning") r.warnings.push_back(value);
    else if (key == "mu") {
      r.mu.resize(static_cast<Eigen::Index>(f.size() - 1));
      for (std::size_t j = 1; j < f.size(); ++j) r.mu(static_cast<Eigen::Index>(j - 1)) = parse_or_throw(f[j], "mu");
    } else if (key == "scatter") {
      std::vector<double> row;
      for (std::size_t j = 1; j < f.size(); ++j) row.push_back(parse_or_throw(f[j], "scatter"));
      scatter_rows.push_back(std::move(row));
    } else if (key == "index") {
      table = true;
    } else {
      throw DataError("unknown report field '" + key + "'");
    }
  }
  const auto p = static_cast<Eigen::Index>(scatter_rows.size());
  r.scatter.resize(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (static_cast<Eigen::Index>(scatter_rows[static_cast<std::size_t>(i)].size()) != p) {
      throw DataError("scatter is not square");
    }
    for (Eigen::Index j = 0; j < p; ++j) r.scatter(i, j) = scatter_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  r.distances = Eigen::Map<Vector>(dist.data(), static_cast<Eigen::Index>(dist.size()));
  return r;
}

std::string estimate_report_to_json(const EstimateReport& r) {
  nlohmann::json j;
  j["estimator"] = r.estimator;
  j["tuning"] = r.tuning;
  j["delta"] = r.delta;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["fallback"] = r.fallback;
  j["first_iteration_positive_weights"] = r.first_iteration_positive_weights;
  j["cutoff_quantile"] = r.cutoff_quantile;
  j["cutoff"] = r.cutoff;
  j["mu"] = std::vector<double>(r.mu.data(), r.mu.data() + r.mu.size());
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < r.scatter.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(r.scatter.cols()));
    for (Eigen::Index k = 0; k < r.scatter.cols(); ++k) row[static_cast<std::size_t>(k)] = r.scatter(i, k);
    rows.push_back(row);
  }
  j["scatter"] = std::move(rows);
  j["distances"] = std::vector<double>(r.distances.data(), r.distances.data() + r.distances.size());
  j["outlier"] = r.outlier;
  j["warnings"] = r.warnings;
  j["config"] = r.config.empty() ? nlohmann::json::object() : nlohmann::json::parse(r.config);
  return j.dump(2) + "\n";
}

EstimateReport estimate_report_from_json(const std::string& text) {
  EstimateReport r;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    r.estimator = j.at("estimator").get<std::string>();
    r.tuning = j.at("tuning").get<double>();
    r.delta = j.at("delta").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.fallback = j.at("fallback").get<bool>();
    r.first_iteration_positive_weights = j.at("first_iteration_positive_weights").get<int>();
    r.cutoff_quantile = j.at("cutoff_quantile").get<double>();
    r.cutoff = j.at("cutoff").get<double>();
    const auto mu = j.at("mu").get<std::vector<double>>();
    r.mu = Eigen::Map<const Vector>(mu.data(), static_cast<Eigen::Index>(mu.size()));
    const auto rows = j.at("scatter").get<std::vector<std::vector<double>>>();
    r.scatter.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw DataError("scatter is not square");
      for (std::size_t k = 0; k < rows.size(); ++k) {
        r.scatter(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
      }
    }
    const auto d = j.at("distances").get<std::vector<double>>();
    r.distances = Eigen::Map<const Vector>(d.data(), static_cast<Eigen::Index>(d.size()));
    r.outlier = j.at("outlier").get<std::vector<int>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.config = j.at("config").dump();
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed report: ") + ex.what());
  }
  return r;
}

std::vector<QqRow> qq_pairs(const Vector& distances, int p) {
  std::vector<double> d(distances.data(), distances.data() + distances.size());
  std::sort(d.begin(), d.end());
  const auto n = static_cast<double>(d.size());
  std::vector<QqRow> rows(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    rows[i] = {d[i], chi2_quantile(p, (static_cast<double>(i) + 0.5) / n)};
  }
  return rows;
}

}  // namespace robscatter
