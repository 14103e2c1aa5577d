#include "contestlab/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "contestlab/contest.hpp"

namespace contestlab {

std::vector<std::int32_t> ContestRanking::top3() const {
  std::vector<std::int32_t> out;
  for (const RankedSubmission& s : order) {
    out.push_back(s.submission_id);
    if (out.size() == 3) break;
  }
  return out;
}

ContestRanking rank_contest(const RatingPanel& panel, int week,
                            const ExclusionFn& exclude) {
  struct Acc {
    double sum = 0.0;
    int n = 0;
  };
  std::map<std::int32_t, Acc> acc;
  bool week_seen = false;
  for (const RatingRow& r : panel.rows) {
    if (r.week != week) continue;
    week_seen = true;
    acc.try_emplace(r.submission_id);  // keep submissions even if excluded
    if (exclude && exclude(r)) continue;
    Acc& a = acc[r.submission_id];
    a.sum += r.rating;
    ++a.n;
  }
  if (!week_seen) throw InvalidConfig("no ratings in week " + std::to_string(week));

  ContestRanking ranking;
  ranking.week = week;
  for (const auto& [id, a] : acc) {
    RankedSubmission s;
    s.submission_id = id;
    s.n_ratings = a.n;
    s.unrated = a.n == 0;
    s.mean_rating = a.n ? a.sum / a.n : 0.0;
    ranking.order.push_back(s);
  }
  std::sort(ranking.order.begin(), ranking.order.end(),
            [](const RankedSubmission& a, const RankedSubmission& b) {
              if (a.unrated != b.unrated) return b.unrated;
              if (a.mean_rating != b.mean_rating)
                return a.mean_rating > b.mean_rating;
              return a.submission_id < b.submission_id;
            });
  for (std::size_t i = 0; i < ranking.order.size(); ++i)
    ranking.order[i].rank = int(i) + 1;
  return ranking;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<int> contest_weeks(const RatingPanel& panel) {
  std::set<int> weeks;
  for (const RatingRow& r : panel.rows) weeks.insert(r.week);
  return {weeks.begin(), weeks.end()};
}

// Per-week sub-panels so repeated re-ranking does not rescan the full
// panel once per contest.
std::vector<RatingPanel> split_by_week(const RatingPanel& panel,
                                       const std::vector<int>& weeks) {
  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < weeks.size(); ++i) index[weeks[i]] = i;
  std::vector<RatingPanel> parts(weeks.size());
  for (const RatingRow& r : panel.rows)
    parts[index[r.week]].rows.push_back(r);
  return parts;
}

bool same_top3(const ContestRanking& a, const ContestRanking& b) {
  auto ta = a.top3(), tb = b.top3();
  std::sort(ta.begin(), ta.end());
  std::sort(tb.begin(), tb.end());
  return ta == tb;
}

VariantResult change_rates(const std::vector<RatingPanel>& week_panels,
                           const std::vector<int>& weeks,
                           const std::vector<ContestRanking>& baseline,
                           const std::vector<std::size_t>& subset,
                           const ExclusionFn& exclude) {
  VariantResult res;
  for (std::size_t idx : subset) {
    ContestRanking alt = rank_contest(week_panels[idx], weeks[idx], exclude);
    if (alt.winner() != baseline[idx].winner()) res.winner_change_rate += 1.0;
    if (!same_top3(alt, baseline[idx])) res.top3_change_rate += 1.0;
    ++res.n_contests;
  }
  if (res.n_contests) {
    res.winner_change_rate /= res.n_contests;
    res.top3_change_rate /= res.n_contests;
  }
  return res;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  double pos = q * (v.size() - 1);
  std::size_t i = std::size_t(pos);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (pos - i) * (v[i + 1] - v[i]);
}

}  // namespace

NullDistribution bootstrap_null(const RatingPanel& panel,
                                const PerturbOptions& opts) {
  if (opts.replications < 100)
    throw InvalidConfig("bootstrap needs at least 100 replications");

  std::vector<int> weeks = contest_weeks(panel);
  std::vector<RatingPanel> week_panels = split_by_week(panel, weeks);
  std::vector<ContestRanking> baseline;
  for (std::size_t i = 0; i < weeks.size(); ++i)
    baseline.push_back(rank_contest(week_panels[i], weeks[i], {}));
  std::vector<std::size_t> all_weeks(weeks.size());
  for (std::size_t i = 0; i < weeks.size(); ++i) all_weeks[i] = i;

  // Volume removed by the competitor-votes exclusion, the benchmark the
  // null is matched against. Matching is per contest: each week sheds the
  // same amount the competitor exclusion would take from that week.
  std::map<int, std::int64_t> target_ratings, target_raters;
  std::map<int, std::set<std::int32_t>> competitor_raters;
  std::map<std::pair<std::int32_t, int>, std::int64_t> rater_week_volume;
  for (const RatingRow& r : panel.rows) {
    ++rater_week_volume[{r.rater_id, r.week}];
    if (r.submitted_same_contest) {
      ++target_ratings[r.week];
      competitor_raters[r.week].insert(r.rater_id);
    }
  }
  std::int64_t total_target = 0;
  for (auto& [wk, cnt] : target_ratings) total_target += cnt;
  for (auto& [wk, ids] : competitor_raters)
    target_raters[wk] = std::int64_t(ids.size());
  std::map<int, std::vector<std::int32_t>> pool;
  for (const auto& [key, cnt] : rater_week_volume)
    pool[key.second].push_back(key.first);

  NullDistribution null;
  null.matched_ratings = total_target;
  for (int rep = 0; rep < opts.replications; ++rep) {
    std::mt19937_64 rng(splitmix64(splitmix64(opts.seed) ^ std::uint64_t(rep)));
    std::set<std::pair<std::int32_t, int>> removed;
    for (auto& [wk, raters] : pool) {
      std::vector<std::int32_t> order = raters;
      std::shuffle(order.begin(), order.end(), rng);
      std::int64_t got_ratings = 0, got_raters = 0;
      for (std::int32_t id : order) {
        if (opts.match_on_raters) {
          if (got_raters >= target_raters[wk]) break;
        } else if (got_ratings >= target_ratings[wk]) {
          break;
        }
        removed.insert({id, wk});
        ++got_raters;
        got_ratings += rater_week_volume[{id, wk}];
      }
    }
    ExclusionFn exclude = [&removed](const RatingRow& r) {
      return removed.count({r.rater_id, r.week}) > 0;
    };
    VariantResult res =
        change_rates(week_panels, weeks, baseline, all_weeks, exclude);
    null.winner_change.push_back(res.winner_change_rate);
    null.top3_change.push_back(res.top3_change_rate);
  }

  double sum = 0.0, sumsq = 0.0;
  for (double v : null.winner_change) {
    sum += v;
    sumsq += v * v;
  }
  std::size_t nrep = null.winner_change.size();
  null.mean_winner_change = sum / nrep;
  null.sd_winner_change = nrep > 1
      ? std::sqrt(std::max(0.0, (sumsq - sum * sum / nrep) / (nrep - 1)))
      : 0.0;
  null.band_lo = quantile(null.winner_change, 0.025);
  null.band_hi = quantile(null.winner_change, 0.975);
  return null;
}

PerturbationReport strategic_removal_study(const RatingPanel& panel,
                                           const PerturbOptions& opts) {
  std::vector<int> weeks = contest_weeks(panel);
  std::vector<RatingPanel> week_panels = split_by_week(panel, weeks);
  std::vector<ContestRanking> baseline;
  for (std::size_t i = 0; i < weeks.size(); ++i)
    baseline.push_back(rank_contest(week_panels[i], weeks[i], {}));
  std::vector<std::size_t> all_weeks(weeks.size());
  for (std::size_t i = 0; i < weeks.size(); ++i) all_weeks[i] = i;

  ExclusionFn self_votes = [](const RatingRow& r) {
    return r.rate_own_submission;
  };
  ExclusionFn competitor_votes = [](const RatingRow& r) {
    return r.submitted_same_contest;
  };

  // Close contests: margin between ranks 1 and 2 in the lowest quantile.
  std::vector<double> margins(weeks.size(),
                              std::numeric_limits<double>::infinity());
  std::vector<double> finite;
  for (std::size_t i = 0; i < weeks.size(); ++i) {
    if (baseline[i].order.size() >= 2) {
      margins[i] = baseline[i].order[0].mean_rating -
                   baseline[i].order[1].mean_rating;
      finite.push_back(margins[i]);
    }
  }
  double cutoff = quantile(finite, opts.close_quantile);
  std::vector<std::size_t> close;
  for (std::size_t i = 0; i < weeks.size(); ++i)
    if (margins[i] <= cutoff) close.push_back(i);

  PerturbationReport rep;
  rep.replications = opts.replications;
  rep.self_votes =
      change_rates(week_panels, weeks, baseline, all_weeks, self_votes);
  rep.competitor_votes =
      change_rates(week_panels, weeks, baseline, all_weeks, competitor_votes);
  rep.close_competitor_votes =
      change_rates(week_panels, weeks, baseline, close, competitor_votes);
  rep.null_dist = bootstrap_null(panel, opts);
  return rep;
}

}  // namespace contestlab
