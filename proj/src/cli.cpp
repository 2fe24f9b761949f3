#include "robscatter/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "robscatter/chi2.hpp"
#include "robscatter/errors.hpp"
#include "robscatter/evalsim.hpp"
#include "robscatter/io.hpp"
#include "robscatter/parallel.hpp"
#include "robscatter/pipeline.hpp"
#include "robscatter/rho.hpp"
#include "robscatter/tuning.hpp"

namespace robscatter {

namespace {

using json = nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flags land in `flags` at a JSON pointer so they can be merged over the
// config file with merge_patch.
template <class T>
CLI::Option* flag(CLI::App* app, json& flags, const std::string& name, const std::string& key,
                  const std::string& desc) {
  return app->add_option_function<T>(
      name, [&flags, key](const T& v) { flags[json::json_pointer(key)] = v; }, desc);
}

struct Command {
  CLI::App* app = nullptr;
  json flags = json::object();
  std::string config_path;
};

void add_common(Command& cmd) {
  flag<std::uint64_t>(cmd.app, cmd.flags, "--seed", "/seed", "random seed");
  flag<int>(cmd.app, cmd.flags, "--threads", "/threads", "worker threads (results do not depend on it)");
  flag<std::string>(cmd.app, cmd.flags, "--format", "/format", "output format")
      ->check(CLI::IsMember({"tsv", "json"}));
  flag<std::string>(cmd.app, cmd.flags, "-o,--output", "/output", "output file (default stdout)");
  cmd.app->add_option("--config", cmd.config_path, "JSON config file; flags take precedence");
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + ex.what());
  }
  if (!j.is_object()) throw UsageError("config file '" + path + "' must hold a JSON object");
  return j;
}

// defaults <- config file <- flags
json effective(const Command& cmd, json defaults) {
  defaults.merge_patch(load_config(cmd.config_path));
  defaults.merge_patch(cmd.flags);
  return defaults;
}

// Strips settings that must not influence the report bytes and applies them.
struct Sink {
  std::string output;
  std::string format;
};

Sink take_runtime(json& cfg) {
  Sink s;
  if (cfg.contains("threads") && !cfg["threads"].is_null()) set_threads(cfg["threads"].get<int>());
  if (cfg.contains("output") && !cfg["output"].is_null()) s.output = cfg["output"].get<std::string>();
  s.format = cfg.value("format", std::string("tsv"));
  if (s.format != "tsv" && s.format != "json") throw UsageError("format must be 'tsv' or 'json'");
  cfg.erase("threads");
  cfg.erase("output");
  return s;
}

void emit(const Sink& sink, const std::string& text, std::ostream& out) {
  if (sink.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(sink.output, std::ios::binary);
  if (!f) throw DataError("cannot open output file '" + sink.output + "'");
  f << text;
  if (!f) throw DataError("failed writing '" + sink.output + "'");
}

std::optional<double> opt_double(const json& cfg, const char* key) {
  if (!cfg.contains(key) || cfg[key].is_null()) return std::nullopt;
  return cfg[key].get<double>();
}

// ------------------------------------------------------------------ estimate

json estimate_defaults() {
  return json{{"input", nullptr},
              {"estimator", "mm-opt+ksd"},
              {"tuning", nullptr},
              {"delta", nullptr},
              {"max_iter", 200},
              {"tol", 1e-7},
              {"cutoff_quantile", 0.975},
              {"mve_subsamples", 1000},
              {"ksd_cutoff_quantile", 0.99},
              {"seed", 1},
              {"format", "tsv"}};
}

void add_estimate_flags(Command& cmd) {
  flag<std::string>(cmd.app, cmd.flags, "-i,--input,input", "/input", "CSV data file");
  flag<std::string>(cmd.app, cmd.flags, "-e,--estimator", "/estimator", "e.g. mm-opt+ksd, tau-bisq+mve, rocke+ksd");
  flag<double>(cmd.app, cmd.flags, "--tuning", "/tuning", "tuning constant (c, or alpha for rocke)");
  flag<double>(cmd.app, cmd.flags, "--delta", "/delta", "M-scale right-hand side");
  flag<int>(cmd.app, cmd.flags, "--max-iter", "/max_iter", "iteration limit");
  flag<double>(cmd.app, cmd.flags, "--tol", "/tol", "convergence tolerance");
  flag<double>(cmd.app, cmd.flags, "--cutoff-quantile", "/cutoff_quantile", "chi-square quantile for outlier flags");
  flag<int>(cmd.app, cmd.flags, "--mve-subsamples", "/mve_subsamples", "MVE random subsets");
  flag<double>(cmd.app, cmd.flags, "--ksd-cutoff-quantile", "/ksd_cutoff_quantile", "KSD rejection quantile");
  add_common(cmd);
}

EstimateReport compute_estimate(const json& cfg) {
  if (!cfg.contains("input") || cfg["input"].is_null()) throw UsageError("no input file given");
  const CsvTable table = read_csv(cfg["input"].get<std::string>());
  const DataMatrix x(table.values);

  EstimatorConfig ecfg = parse_estimator(cfg.at("estimator").get<std::string>());
  ecfg.tuning = opt_double(cfg, "tuning");
  if (auto d = opt_double(cfg, "delta")) ecfg.delta = d;
  ecfg.control.max_iter = cfg.at("max_iter").get<int>();
  ecfg.control.tol = cfg.at("tol").get<double>();
  if (ecfg.control.max_iter < 1 || !(ecfg.control.tol > 0.0)) throw DomainError("max_iter and tol must be positive");

  StartConfig sc;
  sc.seed = cfg.at("seed").get<std::uint64_t>();
  sc.mve_subsamples = cfg.at("mve_subsamples").get<int>();
  sc.ksd_cutoff_quantile = cfg.at("ksd_cutoff_quantile").get<double>();
  const double q = cfg.at("cutoff_quantile").get<double>();
  if (!(q > 0.0 && q < 1.0)) throw DomainError("cutoff_quantile must lie in (0, 1)");

  const EstimateResult r = run_estimator(ecfg, x, sc);
  const auto p = static_cast<int>(x.p());

  EstimateReport rep;
  rep.estimator = estimator_name(ecfg);
  rep.tuning = r.tuning;
  rep.delta = r.delta;
  rep.iterations = r.iterations;
  rep.converged = r.converged;
  rep.fallback = r.fallback;
  rep.first_iteration_positive_weights = r.first_iteration_positive_weights;
  rep.cutoff_quantile = q;
  rep.cutoff = chi2_quantile(p, q);
  rep.mu = r.estimate.mu;
  rep.scatter = r.estimate.scatter();
  rep.distances = mahalanobis(x, r.estimate, true);
  rep.outlier.resize(static_cast<std::size_t>(rep.distances.size()));
  for (Eigen::Index i = 0; i < rep.distances.size(); ++i) {
    rep.outlier[static_cast<std::size_t>(i)] = rep.distances(i) > rep.cutoff ? 1 : 0;
  }
  rep.warnings = r.warnings;
  rep.config = cfg.dump();
  return rep;
}

int cmd_estimate(const Command& cmd, std::ostream& out) {
  json cfg = effective(cmd, estimate_defaults());
  const Sink sink = take_runtime(cfg);
  const EstimateReport rep = compute_estimate(cfg);
  emit(sink, sink.format == "json" ? estimate_report_to_json(rep) : estimate_report_to_tsv(rep), out);
  return kExitOk;
}

// ------------------------------------------------------------------------ qq

EstimateReport read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open report '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return estimate_report_from_json(text);
  return estimate_report_from_tsv(text);
}

int cmd_qq(const Command& cmd, std::ostream& out) {
  json defaults = estimate_defaults();
  defaults["report"] = nullptr;
  json cfg = effective(cmd, defaults);
  const Sink sink = take_runtime(cfg);

  EstimateReport rep;
  if (!cfg["report"].is_null()) {
    rep = read_report(cfg["report"].get<std::string>());
  } else {
    rep = compute_estimate(cfg);
  }
  const auto p = static_cast<int>(rep.mu.size());
  const std::vector<QqRow> rows = qq_pairs(rep.distances, p);

  std::string text;
  if (sink.format == "json") {
    json j;
    j["config"] = cfg;
    j["estimator"] = rep.estimator;
    json d = json::array();
    json qv = json::array();
    for (const QqRow& r : rows) {
      d.push_back(r.distance);
      qv.push_back(r.quantile);
    }
    j["distance"] = std::move(d);
    j["quantile"] = std::move(qv);
    text = j.dump(2) + "\n";
  } else {
    std::ostringstream s;
    s << "# config " << cfg.dump() << "\n";
    s << "distance\tquantile\n";
    for (const QqRow& r : rows) s << format_double(r.distance) << '\t' << format_double(r.quantile) << "\n";
    text = s.str();
  }
  emit(sink, text, out);
  return kExitOk;
}

// ------------------------------------------------------------------ simulate

const std::vector<std::string>& lite_estimators() {
  static const std::vector<std::string> names{"mm-opt+ksd", "tau-opt+ksd", "rocke+ksd", "sd+ksd", "s-e+ksd"};
  return names;
}

std::vector<EstimatorConfig> parse_all(const std::vector<std::string>& names) {
  std::vector<EstimatorConfig> out;
  for (const std::string& n : names) out.push_back(parse_estimator(n));
  return out;
}

std::vector<Scenario> preset(const std::string& name) {
  std::vector<Scenario> out;
  if (name == "tabresumen-lite") {
    for (int p : {5, 10}) {
      for (double eps : {0.1, 0.2}) {
        Scenario sc;
        sc.p = p;
        sc.n = 10 * p;
        sc.epsilon = eps;
        sc.replicates = 100;
        sc.estimators = parse_all(lite_estimators());
        out.push_back(sc);
      }
    }
  } else if (name == "full") {
    std::vector<std::string> names;
    for (const char* start : {"mve", "ksd"}) {
      for (const char* fam : {"s-e", "mm-bisq", "mm-opt", "tau-bisq", "tau-opt", "rocke"}) {
        names.push_back(std::string(fam) + "+" + start);
      }
    }
    for (const char* extra : {"sd+subs", "sd+ksd", "mve", "ksd"}) names.emplace_back(extra);
    for (int p : {5, 10, 15, 20, 30}) {
      for (int mult : {5, 10, 20}) {
        for (double eps : {0.1, 0.2}) {
          Scenario sc;
          sc.p = p;
          sc.n = mult * p;
          sc.epsilon = eps;
          sc.replicates = 500;
          sc.estimators = parse_all(names);
          out.push_back(sc);
        }
      }
    }
  } else {
    throw UsageError("unknown preset '" + name + "' (known: tabresumen-lite, full)");
  }
  return out;
}

void add_simulate_flags(Command& cmd) {
  flag<std::string>(cmd.app, cmd.flags, "--preset", "/preset", "tabresumen-lite or full");
  flag<int>(cmd.app, cmd.flags, "-p,--dim", "/p", "dimension");
  flag<int>(cmd.app, cmd.flags, "-n,--size", "/n", "sample size (default 10p when only p is set)");
  flag<double>(cmd.app, cmd.flags, "--epsilon", "/epsilon", "contamination fraction");
  flag<double>(cmd.app, cmd.flags, "--gamma", "/gamma", "outlier concentration");
  flag<std::vector<double>>(cmd.app, cmd.flags, "--k-grid", "/k_grid", "outlier shifts")->delimiter(',');
  flag<int>(cmd.app, cmd.flags, "-N,--replicates", "/replicates", "Monte Carlo replicates");
  flag<std::vector<std::string>>(cmd.app, cmd.flags, "--estimators", "/estimators", "estimator names")
      ->delimiter(',');
  flag<bool>(cmd.app, cmd.flags, "--clean-pass", "/clean_pass", "run the uncontaminated efficiency pass");
  flag<int>(cmd.app, cmd.flags, "--mve-subsamples", "/start/mve_subsamples", "MVE random subsets");
  add_common(cmd);
}

int cmd_simulate(const Command& cmd, std::ostream& out) {
  json cfg = effective(cmd, json{{"format", "tsv"}});
  const Sink sink = take_runtime(cfg);
  cfg.erase("format");

  std::vector<Scenario> scenarios;
  if (cfg.contains("preset") && !cfg["preset"].is_null()) {
    scenarios = preset(cfg["preset"].get<std::string>());
  } else {
    Scenario sc;
    sc.estimators = parse_all(lite_estimators());
    scenarios.push_back(sc);
  }
  cfg.erase("preset");
  if (cfg.contains("p") && !cfg.contains("n")) cfg["n"] = 10 * cfg["p"].get<int>();
  const std::string overrides = cfg.dump();

  json runs = json::array();
  std::ostringstream tsv;
  bool first = true;
  for (Scenario sc : scenarios) {
    sc = scenario_from_json(overrides, sc);
    validate(sc);
    const DivergenceReport rep = run_scenario(sc);
    const json config = json::parse(scenario_to_json(sc));
    if (sink.format == "json") {
      runs.push_back(json{{"config", config}, {"report", json::parse(report_to_json(rep))}});
    } else {
      if (!first) tsv << "\n";
      tsv << "# config " << config.dump() << "\n" << report_to_tsv(rep);
    }
    first = false;
  }
  emit(sink, sink.format == "json" ? json{{"runs", runs}}.dump(2) + "\n" : tsv.str(), out);
  return kExitOk;
}

// ------------------------------------------------------------------- weights

void add_weights_flags(Command& cmd) {
  flag<std::vector<std::string>>(cmd.app, cmd.flags, "--families", "/families", "bisquare, optimal, rocke")
      ->delimiter(',');
  flag<double>(cmd.app, cmd.flags, "-c", "/c", "tuning constant for bisquare and optimal");
  flag<int>(cmd.app, cmd.flags, "-p,--dim", "/p", "dimension for the rocke band");
  flag<double>(cmd.app, cmd.flags, "--alpha", "/alpha", "rocke tail probability");
  flag<double>(cmd.app, cmd.flags, "--band", "/gamma", "rocke band half-width (overrides p, alpha)");
  flag<double>(cmd.app, cmd.flags, "--from", "/from", "first grid point");
  flag<double>(cmd.app, cmd.flags, "--to", "/to", "last grid point");
  flag<int>(cmd.app, cmd.flags, "--points", "/points", "grid size");
  add_common(cmd);
}

int cmd_weights(const Command& cmd, std::ostream& out) {
  json cfg = effective(cmd, json{{"families", {"bisquare", "optimal"}},
                                 {"c", 1.0},
                                 {"p", 10},
                                 {"alpha", 0.05},
                                 {"gamma", nullptr},
                                 {"from", 0.0},
                                 {"to", nullptr},
                                 {"points", 201},
                                 {"seed", 1},
                                 {"format", "tsv"}});
  const Sink sink = take_runtime(cfg);
  const double c = cfg.at("c").get<double>();
  if (!(c > 0.0)) throw DomainError("c must be positive");

  std::vector<std::pair<std::string, RhoSpec>> specs;
  for (const std::string& name : cfg.at("families").get<std::vector<std::string>>()) {
    const RhoFamily f = rho_family_from_string(name);
    switch (f) {
      case RhoFamily::Bisquare:
        specs.emplace_back(std::string(to_string(f)), RhoSpec::bisquare(c));
        break;
      case RhoFamily::Optimal:
        specs.emplace_back(std::string(to_string(f)), RhoSpec::optimal(c));
        break;
      case RhoFamily::RockeBiflat:
        if (auto g = opt_double(cfg, "gamma")) {
          if (!(*g > 0.0)) throw DomainError("band half-width must be positive");
          specs.emplace_back(std::string(to_string(f)), RhoSpec::rocke_with_gamma(*g));
        } else {
          specs.emplace_back(std::string(to_string(f)),
                             RhoSpec::rocke(cfg.at("p").get<int>(), cfg.at("alpha").get<double>()));
        }
        break;
    }
  }
  if (specs.empty()) throw UsageError("no weight families selected");

  const double from = cfg.at("from").get<double>();
  double to = 0.0;
  if (auto t = opt_double(cfg, "to")) {
    to = *t;
  } else {
    for (const auto& s : specs) to = std::max(to, 1.2 * weight_cutoff(s.second));
  }
  const int points = cfg.at("points").get<int>();
  if (points < 2) throw DomainError("points must be at least 2");
  if (!(from >= 0.0 && to > from)) throw DomainError("grid needs 0 <= from < to");

  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = from + (to - from) * i / (points - 1);
  grid.front() = from;
  grid.back() = to;

  std::string text;
  if (sink.format == "json") {
    json j;
    j["config"] = cfg;
    j["t"] = grid;
    for (const auto& [name, spec] : specs) {
      json w = json::array();
      for (double t : grid) w.push_back(weight(spec, t));
      j[name] = std::move(w);
    }
    text = j.dump(2) + "\n";
  } else {
    std::ostringstream s;
    s << "# config " << cfg.dump() << "\n";
    s << "t";
    for (const auto& sp : specs) s << '\t' << sp.first;
    s << "\n";
    for (double t : grid) {
      s << format_double(t);
      for (const auto& sp : specs) s << '\t' << format_double(weight(sp.second, t));
      s << "\n";
    }
    text = s.str();
  }
  emit(sink, text, out);
  return kExitOk;
}

// ----------------------------------------------------------------- calibrate

void add_calibrate_flags(Command& cmd) {
  flag<std::string>(cmd.app, cmd.flags, "-e,--estimator", "/estimator", "mm-opt+ksd, tau-bisq, rocke+mve, sd+subs, ...");
  flag<int>(cmd.app, cmd.flags, "-p,--dim", "/p", "dimension");
  flag<int>(cmd.app, cmd.flags, "-n,--size", "/n", "sample size (default 10p)");
  flag<double>(cmd.app, cmd.flags, "--target", "/target", "scatter efficiency to reach");
  flag<int>(cmd.app, cmd.flags, "-N,--replicates", "/replicates", "Monte Carlo replicates");
  flag<double>(cmd.app, cmd.flags, "--tolerance", "/tolerance", "accepted efficiency error");
  flag<double>(cmd.app, cmd.flags, "--lower", "/lower", "bracket lower end");
  flag<double>(cmd.app, cmd.flags, "--upper", "/upper", "bracket upper end");
  add_common(cmd);
}

int cmd_calibrate(const Command& cmd, std::ostream& out) {
  json cfg = effective(cmd, json{{"estimator", "mm-opt+ksd"},
                                 {"p", 5},
                                 {"n", nullptr},
                                 {"target", 0.9},
                                 {"replicates", 200},
                                 {"tolerance", 0.02},
                                 {"lower", nullptr},
                                 {"upper", nullptr},
                                 {"seed", 1},
                                 {"format", "tsv"}});
  const Sink sink = take_runtime(cfg);
  const int p = cfg.at("p").get<int>();
  if (cfg["n"].is_null()) cfg["n"] = 10 * p;
  const int n = cfg.at("n").get<int>();

  const EstimatorConfig e = parse_estimator(cfg.at("estimator").get<std::string>());
  CalibrationOptions opts;
  opts.replicates = cfg.at("replicates").get<int>();
  opts.seed = cfg.at("seed").get<std::uint64_t>();
  opts.tolerance = cfg.at("tolerance").get<double>();
  if (auto v = opt_double(cfg, "lower")) opts.lower = *v;
  if (auto v = opt_double(cfg, "upper")) opts.upper = *v;
  const double target = cfg.at("target").get<double>();

  const CalibrationResult r = calibrate_efficiency(e.family, e.start, e.rho, p, n, target, opts);

  std::string text;
  if (sink.format == "json") {
    json j;
    j["config"] = cfg;
    j["estimator"] = estimator_name(e);
    j["constant"] = r.constant;
    j["efficiency"] = r.efficiency;
    j["attainable"] = r.attainable;
    j["lower"] = r.lower;
    j["upper"] = r.upper;
    j["evaluations"] = r.evaluations;
    j["failures"] = r.failures;
    text = j.dump(2) + "\n";
  } else {
    std::ostringstream s;
    s << "# config " << cfg.dump() << "\n";
    s << "estimator\t" << estimator_name(e) << "\n";
    s << "constant\t" << format_double(r.constant) << "\n";
    s << "efficiency\t" << format_double(r.efficiency) << "\n";
    s << "attainable\t" << (r.attainable ? "true" : "false") << "\n";
    s << "lower\t" << format_double(r.lower) << "\n";
    s << "upper\t" << format_double(r.upper) << "\n";
    s << "evaluations\t" << r.evaluations << "\n";
    s << "failures\t" << r.failures << "\n";
    text = s.str();
  }
  emit(sink, text, out);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust multivariate location and scatter estimation", "robscatter"};
  app.require_subcommand(1);

  Command estimate, qq, simulate, weights, calibrate;
  estimate.app = app.add_subcommand("estimate", "estimate location and scatter of a CSV data set");
  qq.app = app.add_subcommand("qq", "ordered distances against chi-square quantiles");
  simulate.app = app.add_subcommand("simulate", "Monte Carlo divergence study under shift contamination");
  weights.app = app.add_subcommand("weights", "sample weight functions on a grid");
  calibrate.app = app.add_subcommand("calibrate", "tune a constant for a target scatter efficiency");
  add_estimate_flags(estimate);
  add_estimate_flags(qq);
  flag<std::string>(qq.app, qq.flags, "--report", "/report", "existing estimate report (TSV or JSON)");
  add_simulate_flags(simulate);
  add_weights_flags(weights);
  add_calibrate_flags(calibrate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*estimate.app) return cmd_estimate(estimate, out);
    if (*qq.app) return cmd_qq(qq, out);
    if (*simulate.app) return cmd_simulate(simulate, out);
    if (*weights.app) return cmd_weights(weights, out);
    if (*calibrate.app) return cmd_calibrate(calibrate, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "usage error: bad configuration value: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    err << "estimation failed: " << e.what() << "\n";
    return kExitEstimation;
  }
  return kExitUsage;
}

}  // namespace robscatter
