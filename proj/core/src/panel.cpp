#include "contestlab/panel.hpp"

#include <cinttypes>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace contestlab {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos
                                         ? comma
                                         : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

Intent intent_from(const std::string& s) {
  if (s == "sincere") return Intent::Sincere;
  if (s == "sabotage") return Intent::Sabotage;
  if (s == "promotion") return Intent::Promotion;
  throw SchemaMismatch("unknown intent value '" + s + "'");
}

}  // namespace

void write_csv_preamble(std::ostream& out, std::uint64_t seed) {
  out << "# contestlab " << kToolVersion << " seed=" << seed << "\n";
}

void write_panel_csv(const RatingPanel& panel, std::ostream& out,
                     std::uint64_t seed) {
  write_csv_preamble(out, seed);
  out << "# schema " << kPanelSchema;
  if (panel.incentive_change_week)
    out << " incentive_change_week=" << *panel.incentive_change_week;
  out << "\n";
  out << "rater_id,submitter_id,submission_id,week,rating,"
         "submitted_same_contest,rate_own_submission,after_incentive_change,"
         "source_skill,target_skill,intent\n";
  for (const RatingRow& r : panel.rows) {
    out << r.rater_id << ',' << r.submitter_id << ',' << r.submission_id << ','
        << r.week << ',' << int(r.rating) << ',' << int(r.submitted_same_contest)
        << ',' << int(r.rate_own_submission) << ','
        << int(r.after_incentive_change) << ',' << fmt(r.source_skill) << ','
        << fmt(r.target_skill) << ',' << to_string(r.intent) << "\n";
  }
}

RatingPanel read_panel_csv(std::istream& in) {
  std::string line;
  RatingPanel panel;
  bool schema_ok = false, header_ok = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# schema ", 0) == 0) {
        std::istringstream ss(line.substr(9));
        std::string schema, extra;
        ss >> schema;
        if (schema != kPanelSchema)
          throw SchemaMismatch("panel schema mismatch: expected " +
                               std::string(kPanelSchema) + ", found " + schema);
        schema_ok = true;
        while (ss >> extra) {
          if (extra.rfind("incentive_change_week=", 0) == 0)
            panel.incentive_change_week = std::stoi(extra.substr(22));
        }
      }
      continue;
    }
    if (!header_ok) {
      if (!schema_ok)
        throw SchemaMismatch("panel CSV is missing its schema line");
      header_ok = true;  // column header row
      continue;
    }
    std::vector<std::string> f = split_csv(line);
    if (f.size() != 11)
      throw SchemaMismatch("panel row has " + std::to_string(f.size()) +
                           " fields, expected 11");
    RatingRow r;
    r.rater_id = std::stoi(f[0]);
    r.submitter_id = std::stoi(f[1]);
    r.submission_id = std::stoi(f[2]);
    r.week = std::stoi(f[3]);
    r.rating = std::int8_t(std::stoi(f[4]));
    r.submitted_same_contest = f[5] == "1";
    r.rate_own_submission = f[6] == "1";
    r.after_incentive_change = f[7] == "1";
    r.source_skill = std::stof(f[8]);
    r.target_skill = std::stof(f[9]);
    r.intent = intent_from(f[10]);
    panel.rows.push_back(r);
  }
  if (!schema_ok) throw SchemaMismatch("panel CSV is missing its schema line");
  return panel;
}

void write_bounds_csv(const BoundSet& bounds, const GapReport& gap,
                      std::ostream& out, std::uint64_t seed) {
  write_csv_preamble(out, seed);
  out << "quantity,value\n";
  out << "performance_gap," << fmt(gap.g) << "\n";
  out << "gap_satisfied," << int(gap.satisfied) << "\n";
  out << "bound_high_sab_high," << fmt(bounds.high_sab_high) << "\n";
  out << "bound_low_sab_high," << fmt(bounds.low_sab_high) << "\n";
  out << "bound_high_sab_low," << fmt(bounds.high_sab_low) << "\n";
  out << "bound_low_sab_low," << fmt(bounds.low_sab_low) << "\n";
  out << "alt_bound_high_sab_low_h1," << fmt(bounds.alt_high_sab_low_h1) << "\n";
  out << "alt_bound_low_sab_high_l2," << fmt(bounds.alt_low_sab_high_l2) << "\n";
}

void write_sweep_csv(const SweepResult& sweep, std::ostream& out,
                     std::uint64_t seed) {
  write_csv_preamble(out, seed);
  out << "c_s,label,utility_high,utility_low\n";
  for (const SweepRow& r : sweep.rows)
    out << fmt(r.c_s) << ',' << to_string(r.label) << ','
        << fmt(r.utility_high) << ',' << fmt(r.utility_low) << "\n";
}

void write_fit_csv(const FitResult& fit, std::ostream& out, std::uint64_t seed) {
  write_csv_preamble(out, seed);
  out << "term,coefficient,clustered_se,t,p\n";
  for (std::size_t i = 0; i < fit.terms.size(); ++i)
    out << fit.terms[i] << ',' << fmt(fit.coef[i]) << ',' << fmt(fit.se[i])
        << ',' << fmt(fit.tstat(fit.terms[i])) << ','
        << fmt(fit.pvalue(fit.terms[i])) << "\n";
  for (const std::string& d : fit.dropped)
    out << d << ",dropped,,,\n";
  out << "_r2_within," << fmt(fit.r2_within) << ",,,\n";
  out << "_n_obs," << fit.n_obs << ",,,\n";
  out << "_n_clusters," << fit.n_clusters << ",,,\n";
}

void write_summary_csv(const PanelSummary& summary, std::ostream& out,
                       std::uint64_t seed) {
  write_csv_preamble(out, seed);
  out << "cell,count,p_zero_star,p_five_star\n";
  auto row = [&](const char* name, const SummaryCell& c) {
    out << name << ',' << c.count << ',' << fmt(c.p_zero()) << ','
        << fmt(c.p_five()) << "\n";
  };
  row("outsider", summary.outsider);
  row("competitor_other", summary.competitor_other);
  row("competitor_self", summary.competitor_self);
}

void write_perturbation_csv(const PerturbationReport& report, std::ostream& out,
                            std::uint64_t seed) {
  write_csv_preamble(out, seed);
  out << "variant,winner_change_rate,top3_change_rate,n_contests\n";
  auto row = [&](const char* name, const VariantResult& v) {
    out << name << ',' << fmt(v.winner_change_rate) << ','
        << fmt(v.top3_change_rate) << ',' << v.n_contests << "\n";
  };
  row("self_votes", report.self_votes);
  row("competitor_votes", report.competitor_votes);
  row("close_competitor_votes", report.close_competitor_votes);
  const NullDistribution& nd = report.null_dist;
  out << "null_mean," << fmt(nd.mean_winner_change) << ",,\n";
  out << "null_sd," << fmt(nd.sd_winner_change) << ",,\n";
  out << "null_band_lo," << fmt(nd.band_lo) << ",,\n";
  out << "null_band_hi," << fmt(nd.band_hi) << ",,\n";
  out << "null_matched_ratings," << nd.matched_ratings << ",,\n";
  out << "replications," << report.replications << ",,\n";
}

void write_regions_csv(const std::vector<EquilibriumRegion>& regions,
                       std::ostream& out, std::uint64_t seed) {
  write_csv_preamble(out, seed);
  out << "label,cs_lo,cs_hi,cp_lo,cp_hi,cp_promotion_cap,"
         "high_hsab,high_lsab,high_sprom,low_hsab,low_lsab,low_sprom\n";
  for (const EquilibriumRegion& r : regions)
    out << to_string(r.id) << ',' << fmt(r.cs_lo) << ',' << fmt(r.cs_hi) << ','
        << fmt(r.cp_lo) << ',' << fmt(r.cp_hi) << ','
        << fmt(r.cp_promotion_cap) << ',' << r.profile.high.hsab << ','
        << r.profile.high.lsab << ',' << int(r.profile.high.sprom) << ','
        << r.profile.low.hsab << ',' << r.profile.low.lsab << ','
        << int(r.profile.low.sprom) << "\n";
}

std::string render_fit_table(const FitResult& fit, const std::string& title) {
  std::ostringstream os;
  os << title << "\n";
  os << std::string(title.size(), '-') << "\n";
  for (std::size_t i = 0; i < fit.terms.size(); ++i) {
    double p = fit.pvalue(fit.terms[i]);
    const char* stars = p < 0.01 ? "***" : p < 0.05 ? "**" : p < 0.1 ? "*" : "";
    os << "  " << std::left << std::setw(40) << fit.terms[i] << std::right
       << std::setw(12) << fmt(fit.coef[i]) << stars << "\n"
       << "  " << std::setw(40) << "" << std::setw(12)
       << ("(" + fmt(fit.se[i]) + ")") << "\n";
  }
  for (const std::string& d : fit.dropped)
    os << "  " << std::left << std::setw(40) << d << "(dropped)\n";
  os << "  N = " << fit.n_obs << ", clusters = " << fit.n_clusters
     << ", within R2 = " << fmt(fit.r2_within) << "\n";
  return os.str();
}

}  // namespace contestlab
