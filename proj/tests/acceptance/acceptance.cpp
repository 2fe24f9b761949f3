// Acceptance checks, one PASS/FAIL line per criterion.
//   acceptance [criterion ...]     (default: all)

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../unit/helpers.hpp"
#include "robscatter/chi2.hpp"
#include "robscatter/estimators.hpp"
#include "robscatter/evalsim.hpp"
#include "robscatter/initial.hpp"
#include "robscatter/io.hpp"
#include "robscatter/pipeline.hpp"
#include "robscatter/rng.hpp"
#include "robscatter/scales.hpp"

using namespace robscatter;
namespace fs = std::filesystem;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict = Verdict::Pass;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      verdict = Verdict::Fail;
      notes.push_back("failed: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

bool within(double got, double want, double tol) { return std::abs(got - want) <= tol; }

// ---------------------------------------------------------------- 1

Outcome rho_suite() {
  Outcome o;
  const double b = rho(RhoSpec::bisquare(), 0.5);
  o.require(within(b, 0.875, 1e-15), "bisquare rho(0.5) = " + fmt(b, 17));
  o.require(within(optimal_weight_cubic(4.0), 1.0, 1e-9), "q(4) = 1");
  o.require(within(optimal_weight_cubic(9.0), 0.0, 1e-9), "q(9) = 0");
  for (const RhoSpec& r : {RhoSpec::rocke(20, 0.05), RhoSpec::rocke_with_gamma(0.37), RhoSpec::rocke_with_gamma(1.0)}) {
    o.require(within(weight(r, 1.0), 1.0, 1e-15), "biflat W(1) = 1, gamma " + fmt(r.gamma));
    o.require(within(weight(r, 1.0 - r.gamma), 0.0, 1e-12), "biflat W(1 - gamma) = 0, gamma " + fmt(r.gamma));
    o.require(within(weight(r, 1.0 + r.gamma), 0.0, 1e-12), "biflat W(1 + gamma) = 0, gamma " + fmt(r.gamma));
  }

  double worst_fd = 0.0;
  for (const RhoSpec& s : {RhoSpec::bisquare(), RhoSpec::bisquare(2.5), RhoSpec::optimal(), RhoSpec::optimal(0.7),
                           RhoSpec::rocke(20, 0.05), RhoSpec::rocke_with_gamma(1.0)}) {
    const std::string name(to_string(s.family));
    const double cut = weight_cutoff(s);
    o.require(rho(s, 0.0) == 0.0, name + " rho(0) = 0");
    o.require(rho(s, cut) == 1.0 && rho(s, 10 * cut) == 1.0, name + " rho = 1 beyond the cutoff");
    double prev = 0.0;
    for (int i = 0; i <= 4000; ++i) {
      const double t = 1.2 * cut * i / 4000.0;
      const double v = rho(s, t);
      o.require(v >= prev && v <= 1.0, name + " monotone and bounded at t = " + fmt(t));
      prev = v;
    }
    for (int i = 1; i < 500; ++i) {
      const double t = 1.1 * cut * i / 500.0;
      std::vector<double> knots{cut};
      if (s.family == RhoFamily::Optimal) knots.push_back(4.0 * s.scale);
      if (s.family == RhoFamily::RockeBiflat) knots.push_back(1.0 - s.gamma);
      bool skip = false;
      for (double k : knots) skip = skip || std::abs(t - k) < 1e-3;
      if (skip) continue;
      const double h = 1e-6 * std::max(1.0, t);
      const double fd = (rho(s, t + h) - rho(s, t - h)) / (2.0 * h);
      worst_fd = std::max(worst_fd, std::abs(fd - rho_derivative(s, t)));
    }
  }
  o.require(worst_fd <= 1e-5, "derivative vs finite difference " + fmt(worst_fd));
  o.note("max |rho' - fd| = " + fmt(worst_fd, 2));
  return o;
}

// ---------------------------------------------------------------- 2

Outcome scale_suite() {
  Outcome o;
  Rng r(2, 0);
  double worst_res = 0.0, worst_eq = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 10 + static_cast<int>(r.index(200));
    Vector d(n);
    for (int i = 0; i < n; ++i) d(i) = std::pow(r.normal(), 2) * std::exp(r.normal());
    for (const RhoSpec& rho_spec : {RhoSpec::bisquare(), RhoSpec::optimal(), RhoSpec::rocke_with_gamma(0.5)}) {
      for (double delta : {0.2, 0.45, 0.5}) {
        const double s = mscale(d, {delta, rho_spec});
        worst_res = std::max(worst_res, std::abs(mean_rho(d, rho_spec, s) - delta) / delta);
        const double k = std::exp(3.0 * r.normal());
        const double sk = mscale(k * d, {delta, rho_spec});
        worst_eq = std::max(worst_eq, std::abs(sk - k * s) / (k * s));
      }
    }
  }
  o.require(worst_res <= 1e-10, "M-scale residual / delta = " + fmt(worst_res, 2));
  o.require(worst_eq <= 1e-9, "scale equivariance relative error " + fmt(worst_eq, 2));
  const double atom = mscale(Vector::Constant(25, 2.0), {0.5, RhoSpec::bisquare()});
  o.require(within(atom, 2.0 / (1.0 - std::cbrt(0.5)), 1e-9) && within(atom, 9.694, 1e-3),
            "single atom S = " + fmt(atom, 8));
  o.note("residual/delta " + fmt(worst_res, 2) + ", equivariance " + fmt(worst_eq, 2) + ", atom S " + fmt(atom, 6));
  return o;
}

// ---------------------------------------------------------------- 3

Outcome kl_suite() {
  Outcome o;
  std::mt19937_64 gen(3);
  const Matrix s = testutil::random_spd(gen, 6);
  o.require(std::abs(kl_scatter(s, s)) <= 1e-12, "D(S, S) = 0");
  const Vector mu = testutil::gaussian_vector(gen, 6);
  o.require(kl_location(mu, mu, s) == 0.0, "location D(mu, mu) = 0");
  const double two = kl_scatter(2.0 * Matrix::Identity(3, 3), Matrix::Identity(3, 3));
  o.require(within(two, 3.0 * (2.0 - std::log(2.0) - 1.0), 1e-12) && within(two, 0.9206, 1e-4),
            "D(2I, I) at p = 3 is " + fmt(two, 8));
  double lowest = INFINITY;
  for (int rep = 0; rep < 1000; ++rep) {
    const int p = 2 + rep % 12;
    const double v = kl_scatter(testutil::random_spd(gen, p, 0.01, 100.0), testutil::random_spd(gen, p, 0.01, 100.0));
    lowest = std::min(lowest, v);
  }
  o.require(lowest >= 0.0, "nonnegative on 1000 random SPD pairs, min " + fmt(lowest));
  o.note("D(2I, I) = " + fmt(two, 6) + ", min over 1000 pairs " + fmt(lowest));
  return o;
}

// ---------------------------------------------------------------- 4

Outcome equivariance_suite() {
  Outcome o;
  double worst = 0.0;
  for (int p : {3, 5, 10}) {
    const int n = 10 * p;
    std::mt19937_64 gen(400 + p);
    Rng r(500 + p, 0);
    Matrix m = r.normal_matrix(n, p);
    for (int i = 0; i < n / 10; ++i) m(i, 0) = 6.0;
    const Matrix a = testutil::random_affine(gen, p);
    const Vector b = testutil::gaussian_vector(gen, p);
    const Matrix my = testutil::affine_map(m, a, b);
    const DataMatrix x(m), y(my);
    StartConfig sc;
    sc.seed = 9;
    const LocationScatter st = ksd(x, sc).estimate;
    const LocationScatter sty = LocationScatter::from_scatter(a * st.mu + b, a * st.scatter() * a.transpose());
    const double delta = breakdown_delta(n, p);
    auto check = [&](const EstimateResult& ex, const EstimateResult& ey, const std::string& what) {
      const double e = std::max(testutil::rel_err(ey.estimate.mu, a * ex.estimate.mu + b),
                                testutil::rel_err(ey.estimate.scatter(), a * ex.estimate.scatter() * a.transpose()));
      worst = std::max(worst, e);
      o.require(e <= 1e-5, what + " at p = " + std::to_string(p) + ": " + fmt(e, 2));
    };
    check(s_estimate(x, RhoSpec::bisquare(), delta, st), s_estimate(y, RhoSpec::bisquare(), delta, sty), "S");
    check(rocke_estimate(x, 0.05, delta, st), rocke_estimate(y, 0.05, delta, sty), "Rocke");
    check(mm_estimate(x, RhoSpec::optimal(), 1.5, delta, st), mm_estimate(y, RhoSpec::optimal(), 1.5, delta, sty),
          "MM");
    check(tau_estimate(x, RhoSpec::optimal(), 1.2, delta, st), tau_estimate(y, RhoSpec::optimal(), 1.2, delta, sty),
          "tau");
    std::vector<Vector> u, v;
    const Matrix ainv_t = a.inverse().transpose();
    for (int k = 0; k < 20 * p; ++k) {
      u.push_back(testutil::gaussian_vector(gen, p));
      v.push_back(ainv_t * u.back());
    }
    check(stahel_donoho(x, make_direction_set(m, u), 1.0), stahel_donoho(y, make_direction_set(my, v), 1.0),
          "Stahel-Donoho");
  }
  o.note("worst relative error " + fmt(worst, 2));
  return o;
}

// ---------------------------------------------------------------- 5

Outcome efficiency_reproduction() {
  Outcome o;
  auto clean_run = [](int p, int n, std::vector<std::string> names, std::uint64_t seed) {
    Scenario sc;
    sc.p = p;
    sc.n = n;
    sc.k_grid.clear();
    sc.replicates = 500;
    sc.seed = seed;
    for (const std::string& s : names) sc.estimators.push_back(parse_estimator(s));
    std::map<std::string, EstimatorSummary> out;
    for (const EstimatorSummary& e : run_scenario(sc).estimators) out[e.name] = e;
    return out;
  };
  auto expect = [&](double got, double want, double tol, const std::string& what) {
    o.require(within(got, want, tol), what + " " + fmt(got) + " vs " + fmt(want) + " +- " + fmt(tol));
    o.note(what + " " + fmt(got, 3));
  };
  const auto small = clean_run(5, 50, {"s-bisquare+ksd"}, 51);
  expect(small.at("s-bisq+ksd").efficiency_scatter, 0.793, 0.08, "S-bisq p=5 n=50");
  const auto big = clean_run(10, 100, {"s-bisquare+ksd", "ksd", "mm-opt+ksd", "tau-opt+ksd"}, 52);
  expect(big.at("s-bisq+ksd").efficiency_scatter, 0.930, 0.05, "S-bisq p=10 n=100");
  expect(big.at("ksd").efficiency_scatter, 0.70, 0.10, "KSD scatter p=10");
  expect(big.at("ksd").efficiency_location, 0.85, 0.08, "KSD location p=10");
  expect(big.at("mm-opt+ksd").efficiency_scatter, 0.90, 0.05, "MM-opt p=10");
  expect(big.at("tau-opt+ksd").efficiency_scatter, 0.90, 0.05, "tau-opt p=10");
  return o;
}

// ---------------------------------------------------------------- 6

Outcome contamination_ordering() {
  Outcome o;
  auto run = [](int p, double eps, std::vector<std::string> names) {
    Scenario sc;
    sc.p = p;
    sc.n = 10 * p;
    sc.epsilon = eps;
    sc.gamma_c = 0.0;
    sc.replicates = 100;
    sc.seed = 61;
    sc.clean_pass = false;
    for (const std::string& s : names) sc.estimators.push_back(parse_estimator(s));
    std::map<std::string, double> out;
    for (const EstimatorSummary& e : run_scenario(sc).estimators) out[e.name] = e.max_scatter;
    return out;
  };
  const auto hi = run(20, 0.2, {"rocke+ksd", "mm-opt+ksd", "s-e+ksd"});
  const double rocke = hi.at("rocke+ksd"), mm = hi.at("mm-opt+ksd"), se = hi.at("s-e+ksd");
  o.note("p=20: Rocke " + fmt(rocke) + ", MM-opt " + fmt(mm) + ", S-E " + fmt(se));
  o.require(rocke < mm && mm < se, "ordering Rocke < MM-opt < S-E");
  o.require(within(rocke, 3.17, 0.35 * 3.17), "Rocke max D " + fmt(rocke) + " vs 3.17");
  o.require(within(mm, 7.90, 0.35 * 7.90), "MM-opt max D " + fmt(mm) + " vs 7.90");
  o.require(within(se, 25.41, 0.35 * 25.41), "S-E max D " + fmt(se) + " vs 25.41");
  const double lo = run(5, 0.1, {"mm-opt+ksd"}).at("mm-opt+ksd");
  o.note("p=5: MM-opt " + fmt(lo));
  o.require(within(lo, 0.85, 0.35 * 0.85), "p=5 MM-opt max D " + fmt(lo) + " vs 0.85");
  return o;
}

// ---------------------------------------------------------------- 7

Outcome safeguards() {
  Outcome o;
  int min_positive = 1 << 30;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng r(700 + seed, 0);
    const int p = 3 + static_cast<int>(seed % 4), n = 15 * p;
    Matrix m = r.normal_matrix(n, p);
    const Vector dir = r.normal_matrix(p, 1).col(0).normalized();
    for (int i = 0; i < n - 2 * p + 1; ++i) m.row(i) = m(i, 0) * dir.transpose() + 1e-4 * m.row(i);
    const LocationScatter st = LocationScatter::from_scatter(Vector::Zero(p), Matrix::Identity(p, p));
    const EstimateResult e = rocke_estimate(DataMatrix(m), 0.05, breakdown_delta(n, p), st);
    o.require(e.first_iteration_positive_weights >= 2 * p,
              "Rocke positive weights " + std::to_string(e.first_iteration_positive_weights) + " < 2p, seed " +
                  std::to_string(seed));
    min_positive = std::min(min_positive, e.first_iteration_positive_weights - 2 * p);
  }
  int worse = 0;
  double worst_gap = -INFINITY;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng r(800 + seed, 0);
    const int p = 2 + static_cast<int>(seed % 7), n = (5 + static_cast<int>(seed % 3) * 5) * p;
    Matrix m = r.normal_matrix(n, p);
    const int bad = static_cast<int>(std::floor(n * (0.05 + 0.05 * (seed % 4))));
    for (int i = 0; i < bad; ++i) m(i, 0) = 1.0 + static_cast<double>(seed % 12);
    const DataMatrix x(m);
    StartConfig cfg;
    cfg.seed = seed;
    const LocationScatter st = ksd(x, cfg).estimate;
    const EstimateResult e = mm_estimate(x, RhoSpec::optimal(), 1.0 + 0.1 * (seed % 10), breakdown_delta(n, p), st);
    worst_gap = std::max(worst_gap, e.objective - e.start_objective);
    if (e.objective > e.start_objective) ++worse;
  }
  o.require(worse == 0, std::to_string(worse) + " MM fits ended above their start objective");
  o.note("Rocke min positive weights - 2p = " + std::to_string(min_positive) + " over 20 inputs; MM max(end - start) " +
         fmt(worst_gap, 3) + " over 100 fits");
  return o;
}

// ---------------------------------------------------------------- 8

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 gen(8);
  for (int rep = 0; rep < 30; ++rep) {
    const Matrix x = testutil::gaussian(gen, 8, 2);
    const testutil::OracleFit want = testutil::brute_force_mve(x);
    const MveResult got = mve(DataMatrix(x), StartConfig{});
    o.require(got.exhaustive && got.best.subset == want.subset &&
                  std::abs(got.raw_score - want.score) <= 1e-10 * want.score,
              "MVE exhaustive vs brute force, replicate " + std::to_string(rep));
  }
  double worst_d = 0.0, worst_kl = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int p = 2 + rep % 9;
    const Matrix s = testutil::random_spd(gen, p, 0.2, 5.0);
    const Matrix s0 = testutil::random_spd(gen, p, 0.2, 5.0);
    const Vector mu = testutil::gaussian_vector(gen, p);
    const Vector mu0 = testutil::gaussian_vector(gen, p);
    const Matrix x = testutil::gaussian(gen, 40, p);
    const Matrix inv = s.inverse();
    const DistanceVector d = mahalanobis(x, mu, s);
    for (int i = 0; i < 40; ++i) {
      const Vector r = x.row(i).transpose() - mu;
      const double want = r.dot(inv * r);
      worst_d = std::max(worst_d, std::abs(d(i) - want) / (1.0 + want));
    }
    const Matrix q = s0.inverse() * s;
    const double want_s = q.trace() - std::log(q.determinant()) - p;
    worst_kl = std::max(worst_kl, std::abs(kl_scatter(s, s0) - want_s) / (1.0 + want_s));
    const Vector r = mu - mu0;
    const double want_l = r.dot(s0.inverse() * r);
    worst_kl = std::max(worst_kl, std::abs(kl_location(mu, mu0, s0) - want_l) / (1.0 + want_l));
  }
  o.require(worst_d <= 1e-10, "mahalanobis vs explicit inverse " + fmt(worst_d, 2));
  o.require(worst_kl <= 1e-10, "KL vs explicit inverse " + fmt(worst_kl, 2));
  o.note("30 MVE problems; mahalanobis " + fmt(worst_d, 2) + ", KL " + fmt(worst_kl, 2));
  return o;
}

// ---------------------------------------------------------------- 9

struct Proc {
  int status;
  std::string out;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Proc run_process(const std::vector<std::string>& args) {
  std::string cmd;
  for (const std::string& a : args) cmd += quote(a) + " ";
  cmd += "2>/dev/null";
  Proc p{-1, {}};
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return p;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), f)) > 0) p.out.append(buf.data(), got);
  p.status = pclose(f);
  return p;
}

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "robscatter_acceptance_cli";
  fs::create_directories(dir);
  const std::string data = (dir / "sample.csv").string();
  {
    Rng r(9, 0);
    Matrix m = r.normal_matrix(80, 4);
    for (int i = 0; i < 8; ++i) m(i, 0) = 7.0;
    std::ofstream f(data);
    f << "a,b,c,d\n";
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) f << (j ? "," : "") << format_double(m(i, j));
      f << "\n";
    }
  }
  const std::vector<std::vector<std::string>> commands{
      {"estimate", data},
      {"estimate", data, "-e", "rocke+mve"},
      {"estimate", data, "-e", "tau-bisq+ksd", "--format", "json"},
      {"estimate", data, "-e", "sd+subs"},
      {"qq", data, "-e", "s-bisquare+mve"},
      {"qq", data, "--format", "json"},
      {"simulate", "-p", "3", "-N", "8", "--k-grid", "2,6", "--estimators", "mm-opt+ksd,s-e+mve,sd+subs"},
      {"simulate", "-p", "3", "-N", "8", "--k-grid", "4", "--format", "json"},
      {"weights", "--families", "bisquare,optimal,rocke", "-p", "20"},
      {"weights", "--format", "json"},
      {"calibrate", "-e", "mm-bisq+ksd", "-p", "3", "-n", "30", "-N", "12"},
  };
  int compared = 0;
  for (const auto& cmd : commands) {
    std::string label;
    for (const std::string& a : cmd) label += (label.empty() ? "" : " ") + (a == data ? std::string("<data>") : a);
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "4", "4", "2"}) {
      std::vector<std::string> args{ROBSCATTER_CLI};
      args.insert(args.end(), cmd.begin(), cmd.end());
      args.insert(args.end(), {"--seed", "31", "--threads", threads});
      const Proc p = run_process(args);
      o.require(p.status == 0, label + " exited with status " + std::to_string(p.status));
      outputs.push_back(p.out);
    }
    std::vector<std::string> args{ROBSCATTER_CLI};
    args.insert(args.end(), cmd.begin(), cmd.end());
    const std::string file = (dir / "out.txt").string();
    args.insert(args.end(), {"--seed", "31", "--threads", "3", "-o", file});
    o.require(run_process(args).status == 0, label + " -o failed");
    outputs.push_back(slurp(file));
    o.require(!outputs[0].empty(), label + " printed nothing");
    for (std::size_t i = 1; i < outputs.size(); ++i) {
      o.require(outputs[i] == outputs[0], label + " output differs between runs/thread counts");
    }
    ++compared;
  }
  fs::remove_all(dir);
  o.note(std::to_string(compared) + " commands, 5 runs each (threads 1/4/4/2, -o with 3)");
  return o;
}

// ---------------------------------------------------------------- 10

Outcome wine_smoke() {
  Outcome o;
  const fs::path csv = fs::path(ROBSCATTER_SOURCE_DIR) / "data" / "wine_class3.csv";
  if (!fs::exists(csv)) {
    o.verdict = Verdict::Skip;
    o.note("data/wine_class3.csv not found; run scripts/fetch_wine.py");
    return o;
  }
  const nlohmann::json meta =
      nlohmann::json::parse(slurp(fs::path(ROBSCATTER_SOURCE_DIR) / "tests" / "fixtures" / "wine_class3.json"));
  const Proc sum = run_process({"sha256sum", csv.string()});
  o.require(sum.status == 0 && sum.out.substr(0, 64) == meta["sha256"].get<std::string>(),
            "checksum of data/wine_class3.csv does not match the fixture");
  const Proc p = run_process({ROBSCATTER_CLI, "estimate", csv.string(), "-e", "mm-opt+ksd", "--cutoff-quantile",
                              "0.975", "--format", "json"});
  o.require(p.status == 0, "estimate exited with status " + std::to_string(p.status));
  if (p.status != 0) return o;
  const EstimateReport r = estimate_report_from_json(p.out);
  int flagged = 0;
  for (int f : r.outlier) flagged += f;
  o.require(r.distances.size() == meta["rows"].get<int>(), "row count");
  o.require(std::abs(flagged - 6) <= 2, std::to_string(flagged) + " flagged, want 6 +- 2");
  o.note(std::to_string(flagged) + " of " + std::to_string(r.distances.size()) + " flagged above chi2_13(0.975)");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"weight/rho suite", rho_suite},
      {"scale suite", scale_suite},
      {"KL suite", kl_suite},
      {"equivariance, five estimators, p in {3,5,10}", equivariance_suite},
      {"clean-data efficiencies, N=500", efficiency_reproduction},
      {"contamination ordering, N=100", contamination_ordering},
      {"safeguards", safeguards},
      {"oracle equivalence", oracle_equivalence},
      {"CLI determinism", cli_determinism},
      {"wine smoke test", wine_smoke},
  };
  std::set<int> chosen;
  for (int i = 1; i < argc; ++i) chosen.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!chosen.empty() && !chosen.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.verdict = Verdict::Fail;
      o.notes.push_back(std::string("exception: ") + e.what());
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
    std::cout << tag << " " << id << " " << criteria[i].first;
    for (const std::string& n : o.notes) std::cout << " | " << n;
    std::cout << std::endl;
    if (o.verdict == Verdict::Fail) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
