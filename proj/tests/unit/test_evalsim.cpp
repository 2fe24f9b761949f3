#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "robscatter/errors.hpp"
#include "robscatter/evalsim.hpp"
#include "robscatter/parallel.hpp"

using namespace robscatter;

namespace {

Scenario small_scenario() {
  Scenario sc;
  sc.p = 3;
  sc.n = 30;
  sc.epsilon = 0.1;
  sc.k_grid = {2, 6};
  sc.replicates = 6;
  sc.seed = 5;
  for (const char* name : {"mm-opt+ksd", "s-e+mve", "sd+subs", "ksd", "classical"}) {
    sc.estimators.push_back(parse_estimator(name));
  }
  return sc;
}

}  // namespace

TEST(KlLocation, Values) {
  std::mt19937_64 gen(1);
  const Matrix s = testutil::random_spd(gen, 4);
  const Vector mu = testutil::gaussian_vector(gen, 4);
  EXPECT_EQ(kl_location(mu, mu, s), 0.0);
  EXPECT_NEAR(kl_location(Eigen::Vector3d(1, 0, 0), Vector::Zero(3), Matrix::Identity(3, 3)), 1.0, 1e-15);
}

TEST(KlLocation, MatchesExplicitInverse) {
  std::mt19937_64 gen(2);
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix s = testutil::random_spd(gen, 5, 0.2, 5.0);
    const Vector a = testutil::gaussian_vector(gen, 5);
    const Vector b = testutil::gaussian_vector(gen, 5);
    const Vector r = a - b;
    const double want = r.dot(s.inverse() * r);
    EXPECT_NEAR(kl_location(a, b, s), want, 1e-10 * (1.0 + want));
  }
}

TEST(KlScatter, ClosedForms) {
  std::mt19937_64 gen(3);
  const Matrix s = testutil::random_spd(gen, 4);
  EXPECT_NEAR(kl_scatter(s, s), 0.0, 1e-12);
  EXPECT_NEAR(kl_scatter(2.0 * Matrix::Identity(3, 3), Matrix::Identity(3, 3)), 3.0 * (2.0 - std::log(2.0) - 1.0),
              1e-12);
  EXPECT_NEAR(kl_scatter(2.0 * Matrix::Identity(3, 3), Matrix::Identity(3, 3)), 0.9206, 1e-4);
}

TEST(KlScatter, MatchesExplicitInverse) {
  std::mt19937_64 gen(4);
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix a = testutil::random_spd(gen, 5, 0.2, 5.0);
    const Matrix b = testutil::random_spd(gen, 5, 0.2, 5.0);
    const Matrix m = b.inverse() * a;
    const double want = m.trace() - std::log(m.determinant()) - 5.0;
    EXPECT_NEAR(kl_scatter(a, b), want, 1e-10 * (1.0 + want));
  }
}

TEST(KlScatter, NonnegativeOnRandomPairs) {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 1000; ++rep) {
    const int p = 2 + rep % 9;
    const Matrix a = testutil::random_spd(gen, p, 0.01, 100.0);
    const Matrix b = testutil::random_spd(gen, p, 0.01, 100.0);
    EXPECT_GE(kl_scatter(a, b), 0.0);
  }
}

TEST(KlScatter, SingularThrows) {
  Matrix z = Matrix::Identity(3, 3);
  z(2, 2) = 0.0;
  EXPECT_THROW(kl_scatter(z, Matrix::Identity(3, 3)), SingularScatterError);
}

TEST(Contaminate, Rows) {
  std::mt19937_64 gen(6);
  const DataMatrix x(testutil::gaussian(gen, 100, 4));
  const DataMatrix same = contaminate(x, 0.0, 0.0, 5.0);
  EXPECT_EQ(same.values(), x.values());
  EXPECT_EQ(contaminated_rows(100, 0.1), 10);
  const DataMatrix y = contaminate(x, 0.1, 0.0, 7.0);
  int changed = 0;
  for (int i = 0; i < 100; ++i) {
    if (y.values().row(i) != x.values().row(i)) {
      ++changed;
      EXPECT_EQ(y.values()(i, 0), 7.0);
      EXPECT_EQ(y.values().row(i).tail(3), x.values().row(i).tail(3));
    }
  }
  EXPECT_EQ(changed, 10);
  const DataMatrix g = contaminate(x, 0.1, 0.5, 7.0);
  EXPECT_DOUBLE_EQ(g.values()(0, 0), 0.5 * x.values()(0, 0) + 7.0);
}

TEST(Scenario, Validation) {
  Scenario sc = small_scenario();
  sc.replicates = 0;
  EXPECT_THROW(validate(sc), DomainError);
  sc = small_scenario();
  sc.n = 3;
  EXPECT_THROW(validate(sc), DomainError);
  sc = small_scenario();
  sc.estimators.clear();
  EXPECT_THROW(validate(sc), DomainError);
  sc = small_scenario();
  sc.epsilon = 0.6;
  EXPECT_THROW(validate(sc), DomainError);
}

TEST(RunScenario, ClassicalEfficiencyIsOne) {
  const DivergenceReport r = run_scenario(small_scenario());
  const EstimatorSummary& c = r.estimators.back();
  ASSERT_EQ(c.name, "classical");
  EXPECT_EQ(c.efficiency_scatter, 1.0);
  EXPECT_EQ(c.efficiency_location, 1.0);
  EXPECT_EQ(c.clean_scatter_mean, r.classical_scatter_mean);
}

TEST(RunScenario, MaximaMatchPerKMeans) {
  const DivergenceReport r = run_scenario(small_scenario());
  for (const EstimatorSummary& s : r.estimators) {
    ASSERT_EQ(s.scatter_mean.size(), 2u);
    EXPECT_EQ(s.max_scatter, *std::max_element(s.scatter_mean.begin(), s.scatter_mean.end()));
    EXPECT_EQ(s.max_location, *std::max_element(s.location_mean.begin(), s.location_mean.end()));
    for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(s.successes[k] + s.failures[k], 6);
  }
}

TEST(RunScenario, IndependentOfThreadsAndLoopShape) {
  const Scenario sc = small_scenario();
  set_threads(1);
  const DivergenceReport one = run_scenario(sc);
  set_threads(4);
  const DivergenceReport four = run_scenario(sc);
  set_threads(0);
  const DivergenceReport serial = run_scenario(sc, Execution::Serial);
  const DivergenceReport ref = reference::run_scenario(sc);
  EXPECT_EQ(one, four);
  EXPECT_EQ(one, serial);
  EXPECT_EQ(one, ref);
  EXPECT_EQ(report_to_json(one), report_to_json(four));
}

TEST(RunScenario, JsonRoundTrip) {
  const DivergenceReport r = run_scenario(small_scenario());
  EXPECT_EQ(report_from_json(report_to_json(r)), r);
  const Scenario sc = small_scenario();
  const Scenario back = scenario_from_json(scenario_to_json(sc));
  EXPECT_EQ(scenario_to_json(back), scenario_to_json(sc));
  EXPECT_EQ(back.estimators, sc.estimators);
}

TEST(RunScenario, TsvHasOneRowPerEstimator) {
  const DivergenceReport r = run_scenario(small_scenario());
  const std::string tsv = report_to_tsv(r);
  EXPECT_EQ(std::count(tsv.begin(), tsv.end(), '\n'), 2 + static_cast<long>(r.estimators.size()));
  EXPECT_NE(tsv.find("mm-opt+ksd\t"), std::string::npos);
}

TEST(RunScenario, StandardErrorShrinksWithReplicates) {
  // Spread of batch means for N and 2N replicates; the ratio should be near
  // 1/sqrt(2).
  auto batch_sd = [](int reps) {
    std::vector<double> means;
    for (std::uint64_t b = 0; b < 30; ++b) {
      Scenario sc;
      sc.p = 2;
      sc.n = 20;
      sc.k_grid.clear();
      sc.replicates = reps;
      sc.seed = 1000 + b;
      sc.estimators = {parse_estimator("classical")};
      means.push_back(run_scenario(sc).classical_scatter_mean);
    }
    double m = 0.0;
    for (double v : means) m += v;
    m /= means.size();
    double s = 0.0;
    for (double v : means) s += (v - m) * (v - m);
    return std::sqrt(s / (means.size() - 1));
  };
  const double ratio = batch_sd(40) / batch_sd(20);
  EXPECT_GT(ratio, 0.45);
  EXPECT_LT(ratio, 1.0);
}
