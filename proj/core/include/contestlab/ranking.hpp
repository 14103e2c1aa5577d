#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "contestlab/simulate.hpp"

namespace contestlab {

struct RankedSubmission {
  std::int32_t submission_id = 0;
  double mean_rating = 0.0;
  int n_ratings = 0;
  int rank = 0;            ///< 1-based
  bool unrated = false;    ///< lost every rating under the exclusion
};

struct ContestRanking {
  int week = 0;
  std::vector<RankedSubmission> order;  ///< descending mean, ties by id

  std::int32_t winner() const { return order.front().submission_id; }
  std::vector<std::int32_t> top3() const;
};

/// True when the row should be dropped before re-ranking.
using ExclusionFn = std::function<bool(const RatingRow&)>;

/// Mean-rating ranking of one contest week. Submissions that lose all
/// their ratings stay in the list, flagged and ranked below every rated
/// submission.
ContestRanking rank_contest(const RatingPanel& panel, int week,
                            const ExclusionFn& exclude = {});

struct NullDistribution {
  std::vector<double> winner_change;  ///< one rate per replication
  std::vector<double> top3_change;
  double mean_winner_change = 0.0;
  double sd_winner_change = 0.0;
  double band_lo = 0.0;  ///< empirical 2.5% quantile of winner change
  double band_hi = 0.0;  ///< empirical 97.5% quantile
  std::int64_t matched_ratings = 0;  ///< removal volume matched per replication
};

struct PerturbOptions {
  double close_quantile = 0.25;
  int replications = 500;
  std::uint64_t seed = 1;
  bool match_on_raters = false;  ///< match removed rater count, not ratings
};

/// Removes random rater-weeks matched on the removal volume of the
/// competitor-votes exclusion and re-ranks every contest; one change rate
/// per replication.
NullDistribution bootstrap_null(const RatingPanel& panel,
                                const PerturbOptions& opts);

struct VariantResult {
  double winner_change_rate = 0.0;
  double top3_change_rate = 0.0;
  int n_contests = 0;
};

struct PerturbationReport {
  VariantResult self_votes;
  VariantResult competitor_votes;
  VariantResult close_competitor_votes;  ///< competitor votes, close contests
  NullDistribution null_dist;
  int replications = 0;
};

/// The three strategic-removal exclusions against the bootstrap null.
PerturbationReport strategic_removal_study(const RatingPanel& panel,
                                           const PerturbOptions& opts = {});

}  // namespace contestlab
