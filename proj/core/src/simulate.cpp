#include "contestlab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

#include "contestlab/equilibrium.hpp"

namespace contestlab {

std::string to_string(Intent i) {
  switch (i) {
    case Intent::Sincere: return "sincere";
    case Intent::Sabotage: return "sabotage";
    case Intent::Promotion: return "promotion";
  }
  return "?";
}

void SimConfig::validate() const {
  if (weeks < 1) throw InvalidConfig("weeks must be >= 1");
  if (population < 3) throw InvalidConfig("population must be >= 3");
  auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob_ok(participation_rate) || !prob_ok(rating_rate) ||
      !prob_ok(high_band_quantile) || !prob_ok(promotion.prob))
    throw InvalidConfig("rates must lie in [0, 1]");
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      if (!prob_ok(sabotage.probs.p[a][b]))
        throw InvalidConfig("sabotage band probabilities must lie in [0, 1]");
  if (rating_noise_sd < 0.0) throw InvalidConfig("noise sd must be >= 0");
  if (skill_alpha <= 0.0 || skill_beta <= 0.0)
    throw InvalidConfig("skill shape parameters must be positive");
  if (incentive_change) {
    if (incentive_change->week < 1 || incentive_change->week > weeks)
      throw InvalidConfig("incentive change week out of range");
    if (!prob_ok(incentive_change->sabotage_uplift))
      throw InvalidConfig("sabotage uplift must lie in [0, 1]");
    if (incentive_change->new_prize < 0.0)
      throw InvalidConfig("prize must be non-negative");
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream(std::uint64_t seed, std::uint64_t idx) {
  return splitmix64(splitmix64(seed) ^ splitmix64(idx * 0x9e3779b97f4a7c15ULL + 1));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// P(sincere star = 0) for a submission of the given quality.
double zero_star_prob(double quality, double noise_sd) {
  if (noise_sd <= 0.0) return quality < 0.1 ? 1.0 : 0.0;
  return normal_cdf((0.1 - quality) / noise_sd);
}

struct WeekPrescription {
  bool valid = false;
  StrategyProfile profile;
};

struct Submission {
  std::int32_t id = 0;
  std::int32_t owner = 0;
  double quality = 0.0;
  int band = 0;
};

}  // namespace

RatingPanel simulate(const SimConfig& cfg) {
  cfg.validate();

  RatingPanel panel;
  if (cfg.incentive_change)
    panel.incentive_change_week = cfg.incentive_change->week;

  std::mt19937_64 skill_rng(substream(cfg.seed, 0));
  std::gamma_distribution<double> gam_a(cfg.skill_alpha, 1.0);
  std::gamma_distribution<double> gam_b(cfg.skill_beta, 1.0);
  std::vector<double> skill(cfg.population);
  for (double& s : skill) {
    double x = gam_a(skill_rng), y = gam_b(skill_rng);
    s = x / (x + y);
  }
  std::vector<double> sorted = skill;
  std::sort(sorted.begin(), sorted.end());
  const double band_threshold =
      sorted[std::min<std::size_t>(sorted.size() - 1,
                                   std::size_t(cfg.high_band_quantile *
                                               cfg.population))];
  auto band_of = [&](double q) { return q >= band_threshold ? 1 : 0; };

  std::int32_t next_submission = 0;
  std::vector<Submission> subs;
  std::vector<char> competes(cfg.population);

  for (int week = 1; week <= cfg.weeks; ++week) {
    std::mt19937_64 rng(substream(cfg.seed, std::uint64_t(week)));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, cfg.rating_noise_sd);

    const bool after =
        cfg.incentive_change && week >= cfg.incentive_change->week;
    const double prize =
        after ? cfg.incentive_change->new_prize : cfg.prize;
    const double uplift =
        after ? cfg.incentive_change->sabotage_uplift : 0.0;

    subs.clear();
    std::fill(competes.begin(), competes.end(), 0);
    for (std::int32_t m = 0; m < cfg.population; ++m)
      if (uni(rng) < cfg.participation_rate) {
        subs.push_back({next_submission++, m, skill[m], band_of(skill[m])});
        competes[m] = 1;
      }
    if (subs.size() < 2) {
      panel.skipped_weeks.push_back(week);
      continue;
    }

    // Equilibrium-rule weeks map the realized contest onto the model and
    // adopt the profile of the region containing the current costs.
    WeekPrescription rx;
    if (cfg.sabotage.mode == RuleMode::Equilibrium ||
        cfg.promotion.mode == RuleMode::Equilibrium) {
      int h = 0, l = 0;
      double sum_h = 0.0, sum_l = 0.0;
      for (const Submission& s : subs) {
        if (s.band == 1) { ++h; sum_h += s.quality; }
        else { ++l; sum_l += s.quality; }
      }
      ContestConfig week_cfg;
      week_cfg.h = h;
      week_cfg.l = l;
      week_cfg.n = cfg.population - int(subs.size());
      week_cfg.b_h = h ? std::min(0.99, std::max(1e-3, sum_h / h)) : 0.0;
      week_cfg.b_l = l ? std::min(0.99, std::max(1e-3, sum_l / l)) : 0.0;
      week_cfg.prize = prize;
      week_cfg.cost_sabotage = cfg.cost_sabotage;
      week_cfg.cost_promotion = cfg.cost_promotion;
      try {
        auto regions = classify(week_cfg);
        rx.profile = label_at(regions, cfg.cost_sabotage, cfg.cost_promotion)
                         .profile;
        rx.valid = true;
      } catch (const std::exception&) {
        rx.valid = false;  // contest does not fit the model; rate sincerely
      }
    }

    auto sabotage_prescribed = [&](int rater_band, int target_band) {
      if (!rx.valid) return false;
      const TypeStrategy& s = rater_band == 1 ? rx.profile.high : rx.profile.low;
      return target_band == 1 ? s.hsab > 0 : s.lsab > 0;
    };

    auto sincere_star = [&](double quality) {
      double r = std::round(5.0 * (quality + noise(rng)));
      return std::int8_t(std::clamp(r, 0.0, 5.0));
    };

    for (const Submission& s : subs) {
      for (std::int32_t r = 0; r < cfg.population; ++r) {
        RatingRow row;
        row.rater_id = r;
        row.submitter_id = s.owner;
        row.submission_id = s.id;
        row.week = week;
        row.submitted_same_contest = competes[r];
        row.after_incentive_change = after;
        row.source_skill = float(skill[r]);
        row.target_skill = float(s.quality);

        if (r == s.owner) {
          double promo_p = 0.0;
          if (cfg.promotion.mode == RuleMode::Explicit)
            promo_p = std::clamp(
                cfg.promotion.prob - cfg.promotion.skill_slope * skill[r], 0.0,
                1.0);
          else if (cfg.promotion.mode == RuleMode::Equilibrium && rx.valid)
            promo_p = (s.band == 1 ? rx.profile.high : rx.profile.low).sprom
                          ? 1.0
                          : 0.0;
          if (uni(rng) < promo_p) {
            row.rate_own_submission = true;
            row.rating = 5;
            row.intent = Intent::Promotion;
            panel.rows.push_back(row);
          } else if (uni(rng) < cfg.rating_rate) {
            row.rate_own_submission = true;
            row.rating = sincere_star(s.quality);
            row.intent = Intent::Sincere;
            panel.rows.push_back(row);
          }
          continue;
        }

        if (uni(rng) >= cfg.rating_rate) continue;

        double p_sab = 0.0;
        if (competes[r]) {
          if (cfg.sabotage.mode == RuleMode::Explicit)
            p_sab = cfg.sabotage.probs.p[band_of(skill[r])][s.band];
          else if (cfg.sabotage.mode == RuleMode::Equilibrium)
            p_sab = sabotage_prescribed(band_of(skill[r]), s.band) ? 1.0 : 0.0;
        }
        bool sab = uni(rng) < p_sab;
        if (!sab && competes[r] && uplift > 0.0) {
          // Raise the competitor 0-star probability by exactly `uplift`:
          // force a zero conditional on it not already occurring.
          double p0 = p_sab + (1.0 - p_sab) * zero_star_prob(s.quality,
                                                             cfg.rating_noise_sd);
          double p_force = p0 < 1.0 ? uplift / (1.0 - p0) : 0.0;
          if (uni(rng) < p_force) sab = true;
        }
        if (sab) {
          row.rating = 0;
          row.intent = Intent::Sabotage;
        } else {
          row.rating = sincere_star(s.quality);
          row.intent = Intent::Sincere;
        }
        panel.rows.push_back(row);
      }
    }
  }
  return panel;
}

PanelSummary summarize(const RatingPanel& panel) {
  if (panel.rows.empty()) throw InvalidConfig("cannot summarize an empty panel");
  PanelSummary sum;
  for (const RatingRow& r : panel.rows) {
    SummaryCell& cell = !r.submitted_same_contest ? sum.outsider
                        : r.rate_own_submission   ? sum.competitor_self
                                                  : sum.competitor_other;
    ++cell.count;
    if (r.rating == 0) ++cell.zero_star;
    if (r.rating == 5) ++cell.five_star;
  }
  return sum;
}

std::vector<DispersionRow> rating_dispersion(const RatingPanel& panel) {
  // Sort so the contract does not depend on incoming row order.
  std::vector<RatingRow> rows = panel.rows;
  std::sort(rows.begin(), rows.end(), [](const RatingRow& a, const RatingRow& b) {
    return std::tie(a.rater_id, a.week) < std::tie(b.rater_id, b.week);
  });
  std::vector<DispersionRow> out;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    double sum = 0.0, sumsq = 0.0;
    while (j < rows.size() && rows[j].rater_id == rows[i].rater_id &&
           rows[j].week == rows[i].week) {
      sum += rows[j].rating;
      sumsq += double(rows[j].rating) * rows[j].rating;
      ++j;
    }
    int n = int(j - i);
    if (n >= 2) {
      double var = (sumsq - sum * sum / n) / (n - 1);
      out.push_back({rows[i].rater_id, rows[i].week,
                     std::sqrt(std::max(0.0, var)), n,
                     rows[i].submitted_same_contest});
    }
    i = j;
  }
  return out;
}

}  // namespace contestlab
