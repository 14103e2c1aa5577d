#pragma once

// Independent reimplementations used to cross-check the library: a
// brute-force rating-matrix evaluator, a best-response grid scanner, and a
// dummy-variable OLS estimator. Deliberately slow and literal.

#include <Eigen/Dense>
#include <map>
#include <random>
#include <vector>

#include "contestlab/contest.hpp"
#include "contestlab/equilibrium.hpp"
#include "contestlab/regress.hpp"

namespace oracle {

using contestlab::AgentType;
using contestlab::ContestConfig;
using contestlab::StrategyProfile;
using contestlab::TypeStrategy;

// Per-agent strategies; index 0..h-1 are the high types, h..h+l-1 the lows.
struct AgentPlan {
  std::vector<TypeStrategy> agents;

  static AgentPlan symmetric(const ContestConfig& cfg,
                             const StrategyProfile& p) {
    AgentPlan plan;
    plan.agents.assign(std::size_t(cfg.h), p.high);
    plan.agents.insert(plan.agents.end(), std::size_t(cfg.l), p.low);
    return plan;
  }
};

struct MatrixValues {
  std::vector<double> value;  // per contestant, column sums
  double S = 0.0;
};

// Materializes the full (n+l+h) x (l+h) rating matrix: sincere quality
// everywhere, zeros where a contestant sabotages, a one on a promoted own
// submission. Values are column sums.
inline MatrixValues matrix_values(const ContestConfig& cfg,
                                  const AgentPlan& plan) {
  const int contestants = cfg.h + cfg.l;
  const int raters = cfg.n + contestants;
  auto quality = [&](int j) { return j < cfg.h ? cfg.b_h : cfg.b_l; };

  const std::size_t n_raters = std::size_t(raters);
  std::vector<std::vector<double>> m(n_raters,
                                     std::vector<double>(contestants));
  for (int r = 0; r < raters; ++r)
    for (int j = 0; j < contestants; ++j) m[r][j] = quality(j);

  for (int a = 0; a < contestants; ++a) {
    const TypeStrategy& s = plan.agents[a];
    // all-or-none: positive hsab/lsab means "every feasible target"
    if (s.hsab > 0)
      for (int j = 0; j < cfg.h; ++j)
        if (j != a) m[a][j] = 0.0;
    if (s.lsab > 0)
      for (int j = cfg.h; j < contestants; ++j)
        if (j != a) m[a][j] = 0.0;
    if (s.sprom) m[a][a] = 1.0;
  }

  MatrixValues out;
  out.value.resize(contestants);
  for (int j = 0; j < contestants; ++j) {
    double sum = 0.0;
    for (int r = 0; r < raters; ++r) sum += m[r][j];
    out.value[j] = sum;
    out.S += sum;
  }
  return out;
}

inline double matrix_utility(const ContestConfig& cfg, const AgentPlan& plan,
                             int agent) {
  MatrixValues mv = matrix_values(cfg, plan);
  const TypeStrategy& s = plan.agents[agent];
  return cfg.prize * mv.value[agent] / mv.S -
         cfg.cost_sabotage * s.acts() -
         cfg.cost_promotion * (s.sprom ? 1.0 : 0.0);
}

inline std::vector<TypeStrategy> classes(const ContestConfig& cfg,
                                         AgentType who) {
  const int mh = who == AgentType::High ? cfg.h - 1 : cfg.h;
  const int ml = who == AgentType::High ? cfg.l : cfg.l - 1;
  std::vector<TypeStrategy> out;
  for (int hs : {0, mh})
    for (int ls : {0, ml})
      for (bool sp : {false, true}) {
        TypeStrategy s{hs, ls, sp};
        bool seen = false;
        for (const TypeStrategy& t : out) seen = seen || t == s;
        if (!seen) out.push_back(s);
      }
  return out;
}

// Is the symmetric profile a Nash equilibrium? Checks one high (agent 0)
// and one low (agent h) against every class, utilities via the matrix.
inline bool matrix_is_nash(const ContestConfig& cfg, const StrategyProfile& p,
                           double tol = 1e-9) {
  AgentPlan base = AgentPlan::symmetric(cfg, p);
  for (int agent : {0, cfg.h}) {
    AgentType who = agent < cfg.h ? AgentType::High : AgentType::Low;
    double u0 = matrix_utility(cfg, base, agent);
    for (const TypeStrategy& dev : classes(cfg, who)) {
      AgentPlan alt = base;
      alt.agents[agent] = dev;
      if (matrix_utility(cfg, alt, agent) > u0 + tol) return false;
    }
  }
  return true;
}

// All symmetric class profiles that are Nash equilibria at these costs.
inline std::vector<StrategyProfile> stable_profiles(const ContestConfig& cfg) {
  std::vector<StrategyProfile> out;
  for (const TypeStrategy& hs : classes(cfg, AgentType::High))
    for (const TypeStrategy& ls : classes(cfg, AgentType::Low))
      if (matrix_is_nash(cfg, {hs, ls})) out.push_back({hs, ls});
  return out;
}

// Dummy-variable OLS with explicit FE indicators (reference levels
// dropped) and an intercept; returns the slope coefficients in the order
// of the supplied regressor columns, plus the within R^2.
struct DummyFit {
  std::vector<double> coef;
  double r2_within = 0.0;
};

inline DummyFit dummy_ols(const std::vector<std::vector<double>>& X,
                          const std::vector<double>& y,
                          const std::vector<std::int32_t>& fe1,
                          const std::vector<std::int32_t>& fe2) {
  const std::size_t n = y.size();
  std::map<std::int32_t, int> g1, g2;
  for (std::int32_t v : fe1) g1.emplace(v, int(g1.size()));
  for (std::int32_t v : fe2) g2.emplace(v, int(g2.size()));
  const std::size_t k = X.size();
  const std::size_t cols = k + 1 + (g1.size() - 1) + (g2.size() - 1);

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, cols);
  Eigen::VectorXd yv(n);
  for (std::size_t i = 0; i < n; ++i) {
    yv[i] = y[i];
    for (std::size_t j = 0; j < k; ++j) M(i, j) = X[j][i];
    M(i, k) = 1.0;
    int a = g1[fe1[i]], b = g2[fe2[i]];
    if (a > 0) M(i, k + 1 + a - 1) = 1.0;
    if (b > 0) M(i, k + g1.size() + b - 1) = 1.0;
  }
  Eigen::VectorXd beta = M.colPivHouseholderQr().solve(yv);

  DummyFit fit;
  for (std::size_t j = 0; j < k; ++j) fit.coef.push_back(beta[j]);

  // within R^2: residual variance explained beyond the fixed effects alone
  Eigen::MatrixXd F = M.rightCols(cols - k);
  Eigen::VectorXd fe_resid = yv - F * F.colPivHouseholderQr().solve(yv);
  Eigen::VectorXd full_resid = yv - M * beta;
  double sst = fe_resid.squaredNorm();
  fit.r2_within = sst > 0 ? 1.0 - full_resid.squaredNorm() / sst : 0.0;
  return fit;
}

/// Randomized configs inside the regime the equilibrium taxonomy covers:
// plenty of outsiders, a clear quality gap, g >= 1 enforced by rejection.
inline ContestConfig random_config(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> h_d(5, 12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    ContestConfig cfg;
    cfg.h = h_d(rng);
    std::uniform_int_distribution<int> l_d(2 * cfg.h, 40);
    cfg.l = l_d(rng);
    std::uniform_int_distribution<int> n_d(cfg.l + 5, 300);
    cfg.n = n_d(rng);
    cfg.b_h = 0.5 + 0.3 * u(rng);
    cfg.b_l = 0.15 + (std::min(0.4, cfg.b_h / 2.0) - 0.15) * u(rng);
    cfg.prize = 1.0 + 9999.0 * u(rng);
    // g >= 1 plus the strict ordering margin: the gap statistic uses
    // (n+1)/(n+l+h) while maximal sabotage of the highs leaves them with
    // b_h*n against b_l*(n+l+h-1), which is the binding comparison
    if (contestlab::performance_gap(cfg).g >= 1.0 &&
        cfg.b_h * cfg.n > cfg.b_l * (cfg.n + cfg.l + cfg.h - 1))
      return cfg;
  }
}

}  // namespace oracle
