#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "contestlab/regress.hpp"
#include "oracles.hpp"

using namespace contestlab;

namespace {

// Small crossed panel with known group structure for the demeaning tests.
struct Crossed {
  std::vector<double> x;
  std::vector<std::int32_t> f1, f2;
};

Crossed crossed_panel(int n1, int n2, std::uint64_t seed) {
  Crossed c;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n2; ++b) {
      c.x.push_back(2.0 * a - 1.5 * b + g(rng));
      c.f1.push_back(a);
      c.f2.push_back(b);
    }
  return c;
}

DataTable random_table(std::mt19937_64& rng, std::size_t n, int g1, int g2) {
  std::uniform_int_distribution<int> d1(0, g1 - 1), d2(0, g2 - 1);
  std::normal_distribution<double> g(0.0, 1.0);
  std::bernoulli_distribution coin(0.4);
  std::vector<std::int32_t> f1(n), f2(n), row(n);
  std::vector<double> x1(n), x2(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    f1[i] = d1(rng);
    f2[i] = d2(rng);
    row[i] = std::int32_t(i);
    x1[i] = g(rng);
    x2[i] = coin(rng) ? 1.0 : 0.0;
    y[i] = 0.7 * x1[i] - 1.2 * x2[i] + 0.5 * x1[i] * x2[i] + 0.3 * f1[i] -
           0.2 * f2[i] + 0.5 * g(rng);
  }
  DataTable t;
  t.add_numeric("x1", std::move(x1));
  t.add_numeric("x2", std::move(x2));
  t.add_numeric("y", std::move(y));
  t.add_categorical("f1", std::move(f1));
  t.add_categorical("f2", std::move(f2));
  t.add_categorical("row", std::move(row));
  return t;
}

}  // namespace

TEST_CASE("two-way demeaning") {
  SUBCASE("degenerate second effect reduces to one-way demeaning") {
    std::vector<double> x{1.0, 2.0, 3.0, 10.0, 20.0};
    std::vector<std::int32_t> f1{0, 0, 0, 1, 1};
    std::vector<std::int32_t> f2{7, 7, 7, 7, 7};
    std::vector<double> got = x;
    std::vector<std::vector<double>*> cols{&got};
    DemeanInfo info = demean_two_way(cols, f1, f2);
    CHECK(info.converged);
    // group means 2 and 15; the single f2 group then removes the overall
    // mean of the already-centered column, which is zero
    std::vector<double> want{-1.0, 0.0, 1.0, -5.0, 5.0};
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10));
  }

  SUBCASE("balanced crossed design matches the closed form") {
    Crossed c = crossed_panel(6, 4, 11);
    const std::size_t n = c.x.size();
    double grand = 0.0;
    std::vector<double> m1(6, 0.0), m2(4, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      grand += c.x[i];
      m1[c.f1[i]] += c.x[i] / 4.0;
      m2[c.f2[i]] += c.x[i] / 6.0;
    }
    grand /= double(n);

    std::vector<double> got = c.x;
    std::vector<std::vector<double>*> cols{&got};
    DemeanInfo info = demean_two_way(cols, c.f1, c.f2);
    CHECK(info.converged);
    for (std::size_t i = 0; i < n; ++i) {
      double want = c.x[i] - m1[c.f1[i]] - m2[c.f2[i]] + grand;
      CHECK(got[i] == doctest::Approx(want).epsilon(1e-9));
    }
  }

  SUBCASE("idempotent on already-demeaned data") {
    Crossed c = crossed_panel(5, 7, 3);
    std::vector<double> once = c.x;
    std::vector<std::vector<double>*> cols{&once};
    demean_two_way(cols, c.f1, c.f2);
    std::vector<double> twice = once;
    std::vector<std::vector<double>*> cols2{&twice};
    DemeanInfo info = demean_two_way(cols2, c.f1, c.f2);
    CHECK(info.iterations <= 2);
    for (std::size_t i = 0; i < once.size(); ++i)
      CHECK(twice[i] == doctest::Approx(once[i]).epsilon(1e-8));
  }

  SUBCASE("iteration cap reports the remaining adjustment") {
    Crossed c = crossed_panel(8, 8, 5);
    std::vector<double> x = c.x;
    std::vector<std::vector<double>*> cols{&x};
    DemeanInfo info = demean_two_way(cols, c.f1, c.f2, 1e-300, 3);
    CHECK(!info.converged);
    CHECK(info.final_delta > 0.0);
  }

  SUBCASE("input validation") {
    std::vector<double> x{1.0, 2.0};
    std::vector<std::int32_t> f{0, 1}, short_f{0};
    std::vector<std::vector<double>*> cols{&x};
    CHECK_THROWS_AS(demean_two_way(cols, f, short_f), InvalidConfig);
    CHECK_THROWS_AS(demean_two_way(cols, f, f, -1.0), InvalidConfig);
  }
}

TEST_CASE("fit matches explicit dummy-variable least squares") {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 5; ++rep) {
    DataTable t = random_table(rng, 400, 15, 9);
    RegressionSpec spec;
    spec.outcome = "y";
    spec.regressors = {"x1", "x2", "x1:x2"};
    spec.fe1 = "f1";
    spec.fe2 = "f2";
    spec.cluster = "f2";
    FitResult res = fit(t, spec);
    REQUIRE(res.dropped.empty());
    REQUIRE(res.terms.size() == 3);

    std::vector<double> inter(t.n_rows);
    for (std::size_t i = 0; i < t.n_rows; ++i)
      inter[i] = t.num("x1")[i] * t.num("x2")[i];
    oracle::DummyFit want = oracle::dummy_ols(
        {t.num("x1"), t.num("x2"), inter}, t.num("y"), t.cat("f1"),
        t.cat("f2"));
    for (int k = 0; k < 3; ++k) {
      CHECK(res.coefficient(spec.regressors[k]) ==
            doctest::Approx(want.coef[k]).epsilon(1e-6));
    }
    CHECK(res.r2_within == doctest::Approx(want.r2_within).epsilon(1e-6));
    CHECK(res.n_obs == 400);
  }
}

TEST_CASE("singleton clusters reproduce HC1 standard errors") {
  std::mt19937_64 rng(7);
  DataTable t = random_table(rng, 250, 10, 6);
  RegressionSpec spec;
  spec.outcome = "y";
  spec.regressors = {"x1", "x2"};
  spec.fe1 = "f1";
  spec.fe2 = "f2";
  spec.cluster = "row";
  FitResult res = fit(t, spec);
  REQUIRE(res.n_clusters == 250);

  // independent HC1: demean, solve, sandwich with factor N/(N-K)
  std::vector<double> y = t.num("y"), x1 = t.num("x1"), x2 = t.num("x2");
  std::vector<std::vector<double>*> cols{&y, &x1, &x2};
  demean_two_way(cols, t.cat("f1"), t.cat("f2"));
  const std::size_t n = t.n_rows;
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd yv(n);
  for (std::size_t i = 0; i < n; ++i) {
    X(i, 0) = x1[i];
    X(i, 1) = x2[i];
    yv[i] = y[i];
  }
  Eigen::VectorXd beta = (X.transpose() * X).ldlt().solve(X.transpose() * yv);
  Eigen::VectorXd e = yv - X * beta;
  Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(2, 2);
  for (std::size_t i = 0; i < n; ++i)
    meat += e[i] * e[i] * X.row(i).transpose() * X.row(i);
  Eigen::MatrixXd V = (double(n) / (double(n) - 2.0)) * xtx_inv * meat * xtx_inv;
  CHECK(res.std_error("x1") ==
        doctest::Approx(std::sqrt(V(0, 0))).epsilon(1e-10));
  CHECK(res.std_error("x2") ==
        doctest::Approx(std::sqrt(V(1, 1))).epsilon(1e-10));
}

TEST_CASE("degenerate regressors are dropped and reported") {
  std::mt19937_64 rng(42);
  DataTable t = random_table(rng, 200, 8, 5);
  // absorbed by fe1: a pure function of the first grouping
  std::vector<double> from_f1(t.n_rows);
  for (std::size_t i = 0; i < t.n_rows; ++i)
    from_f1[i] = 3.0 * t.cat("f1")[i];
  t.add_numeric("f1_level", std::move(from_f1));
  // exactly collinear with x1
  std::vector<double> twice(t.num("x1"));
  for (double& v : twice) v *= 2.0;
  t.add_numeric("x1_twice", std::move(twice));

  RegressionSpec spec;
  spec.outcome = "y";
  spec.regressors = {"x1", "f1_level", "x1_twice", "x2"};
  spec.fe1 = "f1";
  spec.fe2 = "f2";
  spec.cluster = "f2";
  FitResult res = fit(t, spec);
  CHECK(std::find(res.dropped.begin(), res.dropped.end(), "f1_level") !=
        res.dropped.end());
  REQUIRE(res.dropped.size() == 2);
  // one of the collinear pair survives
  CHECK((res.has("x1") || res.has("x1_twice")));
  CHECK(res.has("x2"));
}

TEST_CASE("panel regressions") {
  SimConfig cfg;
  cfg.weeks = 30;
  cfg.population = 200;
  cfg.participation_rate = 0.12;
  cfg.rating_rate = 0.3;
  cfg.seed = 5;

  SUBCASE("no strategic behavior, no competitor effect") {
    RatingPanel panel = simulate(cfg);
    RegressionSpec spec;
    spec.outcome = "is_zero_star";
    spec.regressors = {"submitted_same_contest", "rate_own_submission"};
    FitResult res = fit(panel, spec);
    CHECK(std::abs(res.tstat("submitted_same_contest")) < 3.0);
  }

  SUBCASE("explicit sabotage shows up as a positive competitor effect") {
    SimConfig strat = cfg;
    strat.sabotage.mode = RuleMode::Explicit;
    strat.sabotage.probs.p[0][1] = 0.3;
    strat.sabotage.probs.p[1][1] = 0.3;
    RatingPanel panel = simulate(strat);
    RegressionSpec spec;
    spec.outcome = "is_zero_star";
    spec.regressors = {"submitted_same_contest", "rate_own_submission"};
    FitResult res = fit(panel, spec);
    CHECK(res.coefficient("submitted_same_contest") > 0.05);
    CHECK(res.tstat("submitted_same_contest") > 4.0);
  }

  SUBCASE("the all-rows 'after' column is absorbed without a regime change") {
    RatingPanel panel = simulate(cfg);
    RegressionSpec spec;
    spec.outcome = "is_zero_star";
    spec.regressors = {"submitted_same_contest", "after"};
    FitResult res = fit(panel, spec);
    CHECK(std::find(res.dropped.begin(), res.dropped.end(), "after") !=
          res.dropped.end());
  }
}

TEST_CASE("difference-in-differences around the incentive change") {
  SimConfig cfg;
  cfg.weeks = 40;
  cfg.population = 300;
  cfg.participation_rate = 0.12;
  cfg.rating_rate = 0.3;
  cfg.seed = 17;
  cfg.incentive_change = IncentiveChange{21, 10000.0, 0.05};
  RatingPanel panel = simulate(cfg);

  SUBCASE("recovers the injected uplift") {
    FitResult res = did_incentive_experiment(panel, 1, 40);
    double b = res.coefficient("submitted_same_contest:after");
    double se = res.std_error("submitted_same_contest:after");
    CHECK(std::abs(b - 0.05) < 3.0 * se);
    CHECK(res.tstat("submitted_same_contest:after") > 3.0);
  }

  SUBCASE("placebo switch in the pre period stays null") {
    DidOptions opts;
    opts.placebo_week = 11;
    FitResult res = did_incentive_experiment(panel, 1, 40, opts);
    CHECK(std::abs(res.tstat("submitted_same_contest:fake_after")) < 3.0);
  }

  SUBCASE("quarter split finds the uplift in every post quarter") {
    DidOptions opts;
    opts.quarter_split = true;
    FitResult res = did_incentive_experiment(panel, 1, 40, opts);
    for (int q = 1; q <= 4; ++q) {
      std::string term =
          "submitted_same_contest:after_q" + std::to_string(q);
      REQUIRE(res.has(term));
      CHECK(std::abs(res.coefficient(term) - 0.05) <
            3.0 * res.std_error(term));
    }
  }

  SUBCASE("window validation") {
    CHECK_THROWS_AS(did_incentive_experiment(panel, 25, 40), InvalidWindow);
    CHECK_THROWS_AS(did_incentive_experiment(panel, 1, 15), InvalidWindow);
    RatingPanel quiet = panel;
    quiet.incentive_change_week.reset();
    CHECK_THROWS_AS(did_incentive_experiment(quiet, 1, 40), InvalidWindow);
    DidOptions opts;
    opts.placebo_week = 30;  // inside the post period
    CHECK_THROWS_AS(did_incentive_experiment(panel, 1, 40, opts),
                    InvalidWindow);
  }
}

TEST_CASE("sabotage residual scores") {
  SimConfig cfg;
  cfg.weeks = 40;
  cfg.population = 200;
  cfg.participation_rate = 0.12;
  cfg.rating_rate = 0.5;
  cfg.seed = 23;

  RegressionSpec spec;
  spec.outcome = "is_zero_star";
  spec.regressors = {"submitted_same_contest", "rate_own_submission"};

  SUBCASE("centered near zero without strategic behavior") {
    RatingPanel panel = simulate(cfg);
    auto scores = sabotage_residuals(panel, spec);
    REQUIRE(scores.size() > 50);
    double mean = 0.0;
    for (const SabotageScore& s : scores) mean += s.mean_residual;
    mean /= double(scores.size());
    CHECK(std::abs(mean) < 0.02);
  }

  SUBCASE("tracks who was actually sabotaged") {
    SimConfig strat = cfg;
    strat.sabotage.mode = RuleMode::Explicit;
    strat.sabotage.probs.p[0][1] = 0.4;  // both bands target the top band
    strat.sabotage.probs.p[1][1] = 0.4;
    RatingPanel panel = simulate(strat);
    auto scores = sabotage_residuals(panel, spec);

    // ground truth: per-submission share of competitor ratings cast as
    // sabotage
    std::map<std::int32_t, std::pair<int, int>> truth;
    for (const RatingRow& r : panel.rows) {
      if (!r.submitted_same_contest || r.rate_own_submission) continue;
      auto& [n, sab] = truth[r.submission_id];
      ++n;
      sab += r.intent == Intent::Sabotage;
    }
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    int m = 0;
    for (const SabotageScore& s : scores) {
      auto it = truth.find(s.submission_id);
      if (it == truth.end() || it->second.first < 3) continue;
      double x = double(it->second.second) / it->second.first;
      double y = s.mean_residual;
      sx += x;
      sy += y;
      sxx += x * x;
      syy += y * y;
      sxy += x * y;
      ++m;
    }
    REQUIRE(m > 100);
    double corr = (m * sxy - sx * sy) /
                  std::sqrt((m * sxx - sx * sx) * (m * syy - sy * sy));
    CHECK(corr > 0.6);

    // the targeted (high-skill) submissions carry the larger residuals
    std::vector<double> skills;
    for (const SabotageScore& s : scores) skills.push_back(s.target_skill);
    std::sort(skills.begin(), skills.end());
    double cut = skills[skills.size() * 3 / 4];
    double top = 0, bot = 0;
    int nt = 0, nb = 0;
    for (const SabotageScore& s : scores) {
      if (s.target_skill >= cut) {
        top += s.mean_residual;
        ++nt;
      } else {
        bot += s.mean_residual;
        ++nb;
      }
    }
    CHECK(top / nt > bot / nb + 0.05);
  }
}
