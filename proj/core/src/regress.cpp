#include "contestlab/regress.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace contestlab {

const std::vector<double>& DataTable::num(const std::string& name) const {
  auto it = numeric.find(name);
  if (it == numeric.end())
    throw InvalidConfig("no numeric column named '" + name + "'");
  return it->second;
}

const std::vector<std::int32_t>& DataTable::cat(const std::string& name) const {
  auto it = categorical.find(name);
  if (it == categorical.end())
    throw InvalidConfig("no grouping column named '" + name + "'");
  return it->second;
}

void DataTable::add_numeric(const std::string& name, std::vector<double> col) {
  if (n_rows == 0 && numeric.empty() && categorical.empty()) n_rows = col.size();
  if (col.size() != n_rows)
    throw InvalidConfig("column '" + name + "' length mismatch");
  numeric[name] = std::move(col);
}

void DataTable::add_categorical(const std::string& name,
                                std::vector<std::int32_t> col) {
  if (n_rows == 0 && numeric.empty() && categorical.empty()) n_rows = col.size();
  if (col.size() != n_rows)
    throw InvalidConfig("column '" + name + "' length mismatch");
  categorical[name] = std::move(col);
}

DataTable make_table(const RatingPanel& panel) {
  const std::size_t n = panel.rows.size();
  DataTable t;
  t.n_rows = n;
  std::vector<double> rating(n), zero(n), five(n), submitted(n), own(n),
      src(n), tgt(n), after(n);
  std::vector<std::int32_t> rater(n), submission(n), week(n);
  for (std::size_t i = 0; i < n; ++i) {
    const RatingRow& r = panel.rows[i];
    rating[i] = r.rating;
    zero[i] = r.rating == 0 ? 1.0 : 0.0;
    five[i] = r.rating == 5 ? 1.0 : 0.0;
    submitted[i] = r.submitted_same_contest ? 1.0 : 0.0;
    own[i] = r.rate_own_submission ? 1.0 : 0.0;
    src[i] = r.source_skill;
    tgt[i] = r.target_skill;
    after[i] = r.after_incentive_change ? 1.0 : 0.0;
    rater[i] = r.rater_id;
    submission[i] = r.submission_id;
    week[i] = r.week;
  }
  t.add_numeric("rating", std::move(rating));
  t.add_numeric("is_zero_star", std::move(zero));
  t.add_numeric("is_five_star", std::move(five));
  t.add_numeric("submitted_same_contest", std::move(submitted));
  t.add_numeric("rate_own_submission", std::move(own));
  t.add_numeric("source_skill", std::move(src));
  t.add_numeric("target_skill", std::move(tgt));
  t.add_numeric("after", std::move(after));
  t.add_categorical("rater_id", std::move(rater));
  t.add_categorical("submission_id", std::move(submission));
  t.add_categorical("week", std::move(week));
  return t;
}

namespace {

std::vector<std::int32_t> dense_ids(const std::vector<std::int32_t>& raw,
                                    std::size_t& n_groups) {
  std::unordered_map<std::int32_t, std::int32_t> map;
  std::vector<std::int32_t> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] = map.try_emplace(raw[i], std::int32_t(map.size()));
    out[i] = it->second;
  }
  n_groups = map.size();
  return out;
}

// Resolve "a" or "a:b:..." into a single numeric column.
std::vector<double> term_column(const DataTable& t, const std::string& term) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= term.size()) {
    std::size_t colon = term.find(':', start);
    std::string part =
        term.substr(start, colon == std::string::npos ? colon : colon - start);
    const std::vector<double>& col = t.num(part);
    if (out.empty()) {
      out = col;
    } else {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] *= col[i];
    }
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  return out;
}

bool term_involves(const std::string& term, const std::string& name) {
  std::size_t pos = 0;
  while ((pos = term.find(name, pos)) != std::string::npos) {
    bool left_ok = pos == 0 || term[pos - 1] == ':';
    std::size_t end = pos + name.size();
    bool right_ok = end == term.size() || term[end] == ':';
    if (left_ok && right_ok) return true;
    pos = end;
  }
  return false;
}

}  // namespace

DemeanInfo demean_two_way(std::vector<std::vector<double>*> columns,
                          const std::vector<std::int32_t>& fe1,
                          const std::vector<std::int32_t>& fe2, double tol,
                          int max_iter) {
  if (columns.empty()) return {0, 0.0, true};
  const std::size_t n = columns.front()->size();
  if (fe1.size() != n || fe2.size() != n)
    throw InvalidConfig("fixed-effect columns must match data length");
  if (tol <= 0.0) throw InvalidConfig("tolerance must be positive");

  std::size_t g1 = 0, g2 = 0;
  std::vector<std::int32_t> id1 = dense_ids(fe1, g1);
  std::vector<std::int32_t> id2 = dense_ids(fe2, g2);
  std::vector<double> cnt1(g1, 0.0), cnt2(g2, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cnt1[id1[i]] += 1.0;
    cnt2[id2[i]] += 1.0;
  }

  DemeanInfo info;
  std::vector<double> mean1(g1), mean2(g2);
  for (info.iterations = 1; info.iterations <= max_iter; ++info.iterations) {
    double delta = 0.0;
    for (std::vector<double>* colp : columns) {
      std::vector<double>& col = *colp;
      std::fill(mean1.begin(), mean1.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) mean1[id1[i]] += col[i];
      for (std::size_t g = 0; g < g1; ++g) {
        mean1[g] /= cnt1[g];
        delta = std::max(delta, std::abs(mean1[g]));
      }
      for (std::size_t i = 0; i < n; ++i) col[i] -= mean1[id1[i]];

      std::fill(mean2.begin(), mean2.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) mean2[id2[i]] += col[i];
      for (std::size_t g = 0; g < g2; ++g) {
        mean2[g] /= cnt2[g];
        delta = std::max(delta, std::abs(mean2[g]));
      }
      for (std::size_t i = 0; i < n; ++i) col[i] -= mean2[id2[i]];
    }
    info.final_delta = delta;
    if (delta < tol) {
      info.converged = true;
      return info;
    }
  }
  info.iterations = max_iter;
  return info;
}

bool FitResult::has(const std::string& term) const {
  return std::find(terms.begin(), terms.end(), term) != terms.end();
}

double FitResult::coefficient(const std::string& term) const {
  auto it = std::find(terms.begin(), terms.end(), term);
  if (it == terms.end())
    throw InvalidConfig("no estimated term named '" + term + "'");
  return coef[it - terms.begin()];
}

double FitResult::std_error(const std::string& term) const {
  auto it = std::find(terms.begin(), terms.end(), term);
  if (it == terms.end())
    throw InvalidConfig("no estimated term named '" + term + "'");
  return se[it - terms.begin()];
}

double FitResult::tstat(const std::string& term) const {
  return coefficient(term) / std_error(term);
}

double FitResult::pvalue(const std::string& term) const {
  double t = std::abs(tstat(term));
  return std::erfc(t / std::sqrt(2.0));
}

FitResult fit(const DataTable& table, const RegressionSpec& spec) {
  const std::size_t n = table.n_rows;
  if (n == 0) throw InvalidConfig("cannot fit on an empty table");
  for (const std::string& reg : spec.regressors)
    if (reg == spec.outcome)
      throw InvalidConfig("outcome also appears among the regressors");

  std::vector<double> y = table.num(spec.outcome);
  std::vector<std::vector<double>> X;
  for (const std::string& term : spec.regressors)
    X.push_back(term_column(table, term));

  std::size_t n_clusters = 0;
  std::vector<std::int32_t> cluster = dense_ids(table.cat(spec.cluster),
                                                n_clusters);
  if (n_clusters < 2) throw InvalidConfig("need at least 2 clusters");

  std::vector<double> scale(X.size());
  for (std::size_t k = 0; k < X.size(); ++k) {
    double m = 0.0;
    for (double v : X[k]) m = std::max(m, std::abs(v));
    scale[k] = std::max(1.0, m);
  }

  std::vector<std::vector<double>*> cols{&y};
  for (auto& col : X) cols.push_back(&col);
  DemeanInfo dm =
      demean_two_way(cols, table.cat(spec.fe1), table.cat(spec.fe2));
  if (!dm.converged) {
    std::ostringstream os;
    os << "two-way demeaning did not converge after " << dm.iterations
       << " sweeps (final max adjustment " << dm.final_delta << ")";
    throw NonConvergence(os.str());
  }

  FitResult res;
  res.demean = dm;
  res.n_obs = std::int64_t(n);
  res.n_clusters = int(n_clusters);

  // Columns absorbed by the fixed effects come out as numerical zeros;
  // drop them before the rank check so they cannot masquerade as tiny
  // independent variation.
  std::vector<std::size_t> live;
  for (std::size_t k = 0; k < X.size(); ++k) {
    double m = 0.0;
    for (double v : X[k]) m = std::max(m, std::abs(v));
    if (m < 1e-6 * scale[k])
      res.dropped.push_back(spec.regressors[k]);
    else
      live.push_back(k);
  }

  Eigen::MatrixXd Xm(n, live.size());
  for (std::size_t j = 0; j < live.size(); ++j)
    Xm.col(j) = Eigen::Map<const Eigen::VectorXd>(X[live[j]].data(), n);
  Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);

  double sst = yv.squaredNorm();

  if (live.empty()) {
    res.r2_within = 0.0;
    return res;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xm);
  std::size_t rank = std::size_t(qr.rank());
  std::vector<std::size_t> kept;
  auto perm = qr.colsPermutation().indices();
  std::vector<char> is_kept(live.size(), 0);
  for (std::size_t j = 0; j < rank; ++j) is_kept[perm[j]] = 1;
  for (std::size_t j = 0; j < live.size(); ++j) {
    if (is_kept[j])
      kept.push_back(live[j]);
    else
      res.dropped.push_back(spec.regressors[live[j]]);
  }

  Eigen::MatrixXd Xk(n, kept.size());
  {
    std::size_t j = 0;
    for (std::size_t lj = 0; lj < live.size(); ++lj)
      if (is_kept[lj]) Xk.col(j++) = Xm.col(lj);
  }
  for (std::size_t j = 0; j < kept.size(); ++j)
    res.terms.push_back(spec.regressors[kept[j]]);

  Eigen::VectorXd beta = Xk.colPivHouseholderQr().solve(yv);
  Eigen::VectorXd resid = yv - Xk * beta;
  double ssr = resid.squaredNorm();
  res.r2_within = sst > 0.0 ? 1.0 - ssr / sst : 0.0;

  const std::size_t K = kept.size();
  Eigen::MatrixXd xtx_inv = (Xk.transpose() * Xk).inverse();
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(K, K);
  std::vector<Eigen::VectorXd> cluster_score(n_clusters,
                                             Eigen::VectorXd::Zero(K));
  for (std::size_t i = 0; i < n; ++i)
    cluster_score[cluster[i]] += resid[i] * Xk.row(i).transpose();
  for (const Eigen::VectorXd& s : cluster_score)
    meat += s * s.transpose();

  const double G = double(n_clusters), N = double(n);
  double cr1 = (G / (G - 1.0)) * ((N - 1.0) / (N - double(K)));
  Eigen::MatrixXd V = cr1 * xtx_inv * meat * xtx_inv;

  res.coef.assign(beta.data(), beta.data() + K);
  res.se.resize(K);
  for (std::size_t j = 0; j < K; ++j)
    res.se[j] = std::sqrt(std::max(0.0, V(j, j)));
  return res;
}

FitResult fit(const RatingPanel& panel, const RegressionSpec& spec) {
  return fit(make_table(panel), spec);
}

namespace {

DataTable window_table(const RatingPanel& panel, int lo, int hi) {
  RatingPanel sub;
  sub.incentive_change_week = panel.incentive_change_week;
  for (const RatingRow& r : panel.rows)
    if (r.week >= lo && r.week <= hi) sub.rows.push_back(r);
  if (sub.rows.empty()) throw InvalidWindow("window selects no ratings");
  return make_table(sub);
}

}  // namespace

FitResult did_incentive_experiment(const RatingPanel& panel, int window_lo,
                                   int window_hi, const DidOptions& opts) {
  if (!panel.incentive_change_week)
    throw InvalidWindow("panel has no incentive change");
  const int cw = *panel.incentive_change_week;
  if (!(window_lo < cw && cw <= window_hi))
    throw InvalidWindow("window must straddle the incentive change week");

  DataTable t = window_table(panel, window_lo, window_hi);
  RegressionSpec spec;
  spec.outcome = "is_zero_star";
  spec.cluster = opts.cluster;
  spec.regressors = {"submitted_same_contest"};

  if (opts.quarter_split) {
    const std::vector<std::int32_t>& week = t.cat("week");
    int span = window_hi - cw + 1;
    for (int q = 0; q < 4; ++q) {
      int qlo = cw + q * span / 4;
      int qhi = cw + (q + 1) * span / 4 - 1;
      std::vector<double> col(t.n_rows, 0.0);
      for (std::size_t i = 0; i < t.n_rows; ++i)
        col[i] = week[i] >= qlo && week[i] <= qhi ? 1.0 : 0.0;
      std::string name = "after_q" + std::to_string(q + 1);
      t.add_numeric(name, std::move(col));
      spec.regressors.push_back("submitted_same_contest:" + name);
    }
  } else {
    spec.regressors.push_back("submitted_same_contest:after");
  }

  if (opts.placebo_week) {
    if (*opts.placebo_week <= window_lo || *opts.placebo_week > cw)
      throw InvalidWindow("placebo week must fall inside the pre period");
    const std::vector<std::int32_t>& week = t.cat("week");
    std::vector<double> fake(t.n_rows, 0.0);
    for (std::size_t i = 0; i < t.n_rows; ++i)
      fake[i] = week[i] >= *opts.placebo_week ? 1.0 : 0.0;
    t.add_numeric("fake_after", std::move(fake));
    spec.regressors.push_back("submitted_same_contest:fake_after");
  }
  return fit(t, spec);
}

std::vector<SabotageScore> sabotage_residuals(const RatingPanel& panel,
                                              const RegressionSpec& spec) {
  DataTable t = make_table(panel);
  FitResult f = fit(t, spec);

  // Counterfactual outsider probability: everything except the terms tied
  // to competing in the contest. resid = y - (fixed effects + benign X*b),
  // recovered as strategic-X*b plus the within residual.
  const std::size_t n = t.n_rows;
  std::vector<double> strategic(n, 0.0);
  for (std::size_t k = 0; k < f.terms.size(); ++k) {
    if (!term_involves(f.terms[k], "submitted_same_contest") &&
        !term_involves(f.terms[k], "rate_own_submission"))
      continue;
    std::vector<double> col = term_column(t, f.terms[k]);
    for (std::size_t i = 0; i < n; ++i) strategic[i] += f.coef[k] * col[i];
  }

  std::vector<double> u(n);
  const std::vector<double>& y = t.num(spec.outcome);
  for (std::size_t i = 0; i < n; ++i) u[i] = y[i] - strategic[i];
  std::vector<double> u_dm = u;
  std::vector<std::vector<double>*> cols{&u_dm};
  demean_two_way(cols, t.cat(spec.fe1), t.cat(spec.fe2));
  // residual vs the counterfactual = strategic component + within noise
  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i) resid[i] = strategic[i] + u_dm[i];

  std::map<std::int32_t, SabotageScore> agg;
  for (std::size_t i = 0; i < n; ++i) {
    const RatingRow& r = panel.rows[i];
    if (!r.submitted_same_contest || r.rate_own_submission) continue;
    SabotageScore& s = agg[r.submission_id];
    s.submission_id = r.submission_id;
    s.week = r.week;
    s.target_skill = r.target_skill;
    s.sum_residual += resid[i];
    ++s.n_ratings;
  }
  std::vector<SabotageScore> out;
  out.reserve(agg.size());
  for (auto& [id, s] : agg) {
    s.mean_residual = s.n_ratings ? s.sum_residual / s.n_ratings : 0.0;
    out.push_back(s);
  }
  return out;
}

}  // namespace contestlab
