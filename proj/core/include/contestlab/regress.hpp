#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contestlab/contest.hpp"
#include "contestlab/simulate.hpp"

namespace contestlab {

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidWindow : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Column store feeding the estimators; numeric regressors plus integer
/// grouping columns for fixed effects and clustering.
struct DataTable {
  std::size_t n_rows = 0;
  std::map<std::string, std::vector<double>> numeric;
  std::map<std::string, std::vector<std::int32_t>> categorical;

  const std::vector<double>& num(const std::string& name) const;
  const std::vector<std::int32_t>& cat(const std::string& name) const;
  void add_numeric(const std::string& name, std::vector<double> col);
  void add_categorical(const std::string& name, std::vector<std::int32_t> col);
};

/// Standard columns derived from a panel: rating, is_zero_star,
/// is_five_star, submitted_same_contest, rate_own_submission, source_skill,
/// target_skill, after; groupings rater_id, submission_id, week.
DataTable make_table(const RatingPanel& panel);

struct RegressionSpec {
  std::string outcome;
  std::vector<std::string> regressors;  ///< names, or "a:b" products
  std::string fe1 = "rater_id";
  std::string fe2 = "submission_id";
  std::string cluster = "submission_id";
};

struct DemeanInfo {
  int iterations = 0;
  double final_delta = 0.0;
  bool converged = false;
};

/// Alternating-projections demeaning of the given columns, in place,
/// until the largest group-mean adjustment in a full sweep drops below
/// `tol`.
DemeanInfo demean_two_way(std::vector<std::vector<double>*> columns,
                          const std::vector<std::int32_t>& fe1,
                          const std::vector<std::int32_t>& fe2,
                          double tol = 1e-8, int max_iter = 10000);

struct FitResult {
  std::vector<std::string> terms;
  std::vector<double> coef;
  std::vector<double> se;
  std::vector<std::string> dropped;  ///< collinear or absorbed by the FEs
  double r2_within = 0.0;
  std::int64_t n_obs = 0;
  int n_clusters = 0;
  DemeanInfo demean;

  bool has(const std::string& term) const;
  double coefficient(const std::string& term) const;
  double std_error(const std::string& term) const;
  double tstat(const std::string& term) const;
  double pvalue(const std::string& term) const;  ///< normal approximation
};

/// Linear probability model with two absorbed fixed effects and CR1
/// cluster-robust standard errors (factor G/(G-1) * (N-1)/(N-K)).
FitResult fit(const DataTable& table, const RegressionSpec& spec);
FitResult fit(const RatingPanel& panel, const RegressionSpec& spec);

struct DidOptions {
  bool quarter_split = false;        ///< split the post period into quarters
  std::optional<int> placebo_week;   ///< adds a fake_after switch
  std::string cluster = "submission_id";
};

/// 0-star model with submitted x after interaction around the panel's
/// incentive change, restricted to weeks in [window_lo, window_hi].
FitResult did_incentive_experiment(const RatingPanel& panel, int window_lo,
                                   int window_hi, const DidOptions& opts = {});

struct SabotageScore {
  std::int32_t submission_id = 0;
  std::int32_t week = 0;
  double mean_residual = 0.0;  ///< over competitor-cast ratings received
  double sum_residual = 0.0;
  int n_ratings = 0;
  double target_skill = 0.0;
};

/// Residual of each rating against the counterfactual outsider 0-star
/// probability (fixed effects plus non-strategic regressors), aggregated
/// per submission. Negative residuals read as leniency.
std::vector<SabotageScore> sabotage_residuals(const RatingPanel& panel,
                                              const RegressionSpec& spec);

}  // namespace contestlab
