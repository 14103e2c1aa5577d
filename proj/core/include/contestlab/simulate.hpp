#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "contestlab/contest.hpp"

namespace contestlab {

enum class Intent : std::uint8_t { Sincere = 0, Sabotage = 1, Promotion = 2 };

std::string to_string(Intent i);

enum class RuleMode { None, Explicit, Equilibrium };

/// Probabilities indexed [source skill band][target skill band];
/// band 1 is the top of the skill distribution (see high_band_quantile).
struct BandProbs {
  double p[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

struct SabotageRule {
  RuleMode mode = RuleMode::None;
  BandProbs probs;  ///< used in Explicit mode
};

struct PromotionRule {
  RuleMode mode = RuleMode::None;
  double prob = 0.0;         ///< Explicit: base self-promotion probability
  double skill_slope = 0.0;  ///< subtracted per unit of own skill
};

/// Regime switch: from `week` onward the prize changes and competitors'
/// 0-star probability rises by exactly `sabotage_uplift`.
struct IncentiveChange {
  int week = 0;
  double new_prize = 0.0;
  double sabotage_uplift = 0.0;
};

struct SimConfig {
  int weeks = 50;
  int population = 400;
  double skill_alpha = 2.0;  ///< Beta shape parameters; (2,5) is right-skewed
  double skill_beta = 5.0;
  double participation_rate = 0.13;
  double rating_rate = 0.25;
  double rating_noise_sd = 0.08;
  double high_band_quantile = 0.75;
  SabotageRule sabotage;
  PromotionRule promotion;
  std::optional<IncentiveChange> incentive_change;
  double prize = 5000.0;
  double cost_sabotage = 0.08;
  double cost_promotion = 0.01;
  std::uint64_t seed = 1;

  void validate() const;
};

struct RatingRow {
  std::int32_t rater_id = 0;
  std::int32_t submitter_id = 0;
  std::int32_t submission_id = 0;
  std::int32_t week = 0;
  std::int8_t rating = 0;  ///< 0-5 stars
  bool submitted_same_contest = false;
  bool rate_own_submission = false;
  bool after_incentive_change = false;
  float source_skill = 0.0f;
  float target_skill = 0.0f;
  Intent intent = Intent::Sincere;
};

struct RatingPanel {
  std::vector<RatingRow> rows;
  std::optional<int> incentive_change_week;
  std::vector<int> skipped_weeks;  ///< weeks with fewer than two submissions
};

/// Deterministic given the config: each week draws submitters, then every
/// member rates each submission with probability rating_rate, competitors
/// and self-raters overriding sincerely drawn stars per the strategic
/// rules. Ground-truth intent is recorded on every row.
RatingPanel simulate(const SimConfig& cfg);

struct SummaryCell {
  long count = 0;
  long zero_star = 0;
  long five_star = 0;
  double p_zero() const { return count ? double(zero_star) / count : 0.0; }
  double p_five() const { return count ? double(five_star) / count : 0.0; }
};

/// The 2x2 rating-behavior table minus the impossible cell (rating one's
/// own submission without having submitted).
struct PanelSummary {
  SummaryCell outsider;
  SummaryCell competitor_other;
  SummaryCell competitor_self;
  long total() const {
    return outsider.count + competitor_other.count + competitor_self.count;
  }
};

PanelSummary summarize(const RatingPanel& panel);

struct DispersionRow {
  std::int32_t rater_id = 0;
  std::int32_t week = 0;
  double sd = 0.0;
  int n_ratings = 0;
  bool submitted_same_contest = false;
};

/// Sample standard deviation of the stars each rater cast in each week;
/// rater-weeks with fewer than two ratings are dropped.
std::vector<DispersionRow> rating_dispersion(const RatingPanel& panel);

}  // namespace contestlab
