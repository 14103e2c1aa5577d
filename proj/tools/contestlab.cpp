#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "contestlab/panel.hpp"
#include "contestlab/scenario.hpp"
#include "contestlab/svg.hpp"

namespace fs = std::filesystem;
using namespace contestlab;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitInvalidConfig = 3;
constexpr int kExitSchema = 4;
constexpr int kExitNonConvergence = 5;

int thread_budget() {
  int hw = int(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("CONTESTLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1) return int(std::min<long>(v, hw));
  }
  return hw;
}

struct Options {
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> replications;
  std::optional<std::string> panel_path;
};

Scenario load(const Options& opt) {
  Scenario sc = parse_scenario_file(opt.scenario_path);
  if (opt.seed) {
    sc.seed = *opt.seed;
    sc.sim.seed = *opt.seed;
  }
  if (opt.out_dir) sc.out_dir = *opt.out_dir;
  if (opt.replications) sc.rank.replications = *opt.replications;
  sc.rank.seed = sc.seed;
  return sc;
}

fs::path out_file(const Scenario& sc, const std::string& suffix) {
  fs::create_directories(sc.out_dir);
  return fs::path(sc.out_dir) / (sc.name + suffix);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

const ContestConfig& contest_of(const Scenario& sc) {
  if (!sc.has_contest)
    throw InvalidConfig("scenario has no [contest] section");
  return sc.contest;
}

RatingPanel load_panel(const Scenario& sc, const Options& opt) {
  fs::path path = opt.panel_path ? fs::path(*opt.panel_path)
                                 : out_file(sc, "_panel.csv");
  std::ifstream in(path);
  if (!in)
    throw ScenarioParseError("cannot open panel file '" + path.string() + "'");
  return read_panel_csv(in);
}

int cmd_bounds(const Options& opt) {
  Scenario sc = load(opt);
  const ContestConfig& cfg = contest_of(sc);
  GapReport gap = performance_gap(cfg);
  BoundSet bounds = sabotage_bounds(cfg);
  auto out = open_out(out_file(sc, "_bounds.csv"));
  write_bounds_csv(bounds, gap, out, sc.seed);
  std::cout << "performance gap g=" << gap.g
            << (gap.satisfied ? " (>= 1)" : " (< 1)") << "\n"
            << "sabotage thresholds: high-on-high " << bounds.high_sab_high
            << ", low-on-high " << bounds.low_sab_high << ", high-on-low "
            << bounds.high_sab_low << ", low-on-low " << bounds.low_sab_low
            << "\n";
  return 0;
}

int cmd_sweep(const Options& opt) {
  Scenario sc = load(opt);
  const ContestConfig& cfg = contest_of(sc);
  double c_p = sc.sweep_cp.value_or(cfg.cost_promotion);
  double lo = sc.sweep_cs_min.value_or(1e-4 * cfg.prize);
  double hi = sc.sweep_cs_max.value_or(1e-1 * cfg.prize);
  std::vector<double> grid(sc.sweep_points);
  for (int i = 0; i < sc.sweep_points; ++i) {
    double t = sc.sweep_points == 1 ? 0.0 : double(i) / (sc.sweep_points - 1);
    grid[i] = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  }

  // Grid points are independent; evaluate chunks in parallel and stitch
  // them back together in order.
  int threads = std::min<int>(thread_budget(), std::max<std::size_t>(1, grid.size()));
  std::vector<SweepResult> parts(threads);
  std::vector<std::thread> workers;
  std::size_t chunk = (grid.size() + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    std::size_t a = std::min(grid.size(), t * chunk);
    std::size_t b = std::min(grid.size(), (t + 1) * chunk);
    workers.emplace_back([&, t, a, b] {
      std::vector<double> sub(grid.begin() + a, grid.begin() + b);
      if (!sub.empty()) parts[t] = sweep_costs(cfg, sub, c_p);
    });
  }
  for (std::thread& w : workers) w.join();
  SweepResult sweep;
  for (const SweepResult& p : parts)
    sweep.rows.insert(sweep.rows.end(), p.rows.begin(), p.rows.end());

  auto csv = open_out(out_file(sc, "_sweep.csv"));
  write_sweep_csv(sweep, csv, sc.seed);
  auto svg = open_out(out_file(sc, "_sweep.svg"));
  write_sweep_svg(sweep, svg);
  auto regions_csv = open_out(out_file(sc, "_regions.csv"));
  write_regions_csv(classify(cfg), regions_csv, sc.seed);
  std::cout << "sweep: " << sweep.rows.size() << " grid points, c_p=" << c_p
            << "\n";
  return 0;
}

int cmd_simulate(const Options& opt) {
  Scenario sc = load(opt);
  if (!sc.has_sim) throw InvalidConfig("scenario has no [simulate] section");
  RatingPanel panel = simulate(sc.sim);
  for (int w : panel.skipped_weeks)
    std::cerr << "notice: week " << w << " had fewer than two submissions and "
              << "was skipped\n";
  auto out = open_out(out_file(sc, "_panel.csv"));
  write_panel_csv(panel, out, sc.seed);
  PanelSummary sum = summarize(panel);
  auto sum_out = open_out(out_file(sc, "_summary.csv"));
  write_summary_csv(sum, sum_out, sc.seed);
  std::cout << "panel: " << panel.rows.size() << " ratings, "
            << "P(0*|outsider)=" << sum.outsider.p_zero()
            << " P(0*|competitor)=" << sum.competitor_other.p_zero()
            << " P(5*|self)=" << sum.competitor_self.p_five() << "\n";
  return 0;
}

int cmd_estimate(const Options& opt) {
  Scenario sc = load(opt);
  RatingPanel panel = load_panel(sc, opt);
  if (panel.rows.empty()) throw InvalidConfig("panel is empty");

  auto run = [&](const std::string& tag, const RegressionSpec& spec) {
    FitResult f = fit(panel, spec);
    auto out = open_out(out_file(sc, "_fit_" + tag + ".csv"));
    write_fit_csv(f, out, sc.seed);
    std::cout << render_fit_table(f, tag + " (" + spec.outcome + ")") << "\n";
  };

  RegressionSpec zero;
  zero.outcome = "is_zero_star";
  zero.regressors = {"submitted_same_contest", "rate_own_submission"};
  zero.cluster = sc.cluster;
  run("zero_star", zero);

  RegressionSpec five = zero;
  five.outcome = "is_five_star";
  run("five_star", five);

  RegressionSpec skill;
  skill.outcome = "is_zero_star";
  skill.regressors = {"submitted_same_contest",
                      "submitted_same_contest:source_skill",
                      "submitted_same_contest:target_skill"};
  skill.cluster = sc.cluster;
  run("skill_interactions", skill);

  RegressionSpec promo;
  promo.outcome = "is_five_star";
  promo.regressors = {"submitted_same_contest", "rate_own_submission",
                      "rate_own_submission:source_skill"};
  promo.cluster = sc.cluster;
  run("promotion_skill", promo);

  if (panel.incentive_change_week) {
    int lo = sc.did_window_lo.value_or(1);
    int hi = sc.did_window_hi.value_or(
        panel.rows.empty() ? 1 : panel.rows.back().week);
    DidOptions did;
    did.cluster = sc.cluster;
    did.quarter_split = sc.quarter_split;
    did.placebo_week = sc.placebo_week;
    FitResult f = did_incentive_experiment(panel, lo, hi, did);
    auto out = open_out(out_file(sc, "_fit_did.csv"));
    write_fit_csv(f, out, sc.seed);
    std::cout << render_fit_table(f, "incentive DiD (is_zero_star)") << "\n";
  }
  return 0;
}

int cmd_rank(const Options& opt) {
  Scenario sc = load(opt);
  RatingPanel panel = load_panel(sc, opt);
  PerturbationReport report = strategic_removal_study(panel, sc.rank);
  auto out = open_out(out_file(sc, "_perturbation.csv"));
  write_perturbation_csv(report, out, sc.seed);
  std::cout << "winner change: self-votes "
            << report.self_votes.winner_change_rate << ", competitor votes "
            << report.competitor_votes.winner_change_rate
            << ", close contests "
            << report.close_competitor_votes.winner_change_rate
            << "; null mean " << report.null_dist.mean_winner_change << " ["
            << report.null_dist.band_lo << ", " << report.null_dist.band_hi
            << "]\n";
  return 0;
}

int cmd_verify(const Options& opt) {
  Scenario sc = load(opt);
  const ContestConfig& cfg = contest_of(sc);
  std::vector<EquilibriumRegion> regions = classify(cfg);
  auto out = open_out(out_file(sc, "_verify.csv"));
  write_csv_preamble(out, sc.seed);
  out << "label,c_s,c_p,holds,deviator,dev_hsab,dev_lsab,dev_sprom,gain\n";
  bool all_hold = true;
  for (const EquilibriumRegion& r : regions) {
    if (r.cs_hi <= r.cs_lo) continue;
    // sample inside the profile's own equilibrium interval, away from seams
    double c_p = std::min(cfg.cost_promotion,
                          r.cp_hi < 1e18 ? 0.5 * (r.cp_lo + r.cp_hi) : cfg.cost_promotion);
    if (c_p < r.cp_lo) c_p = 0.5 * (r.cp_lo + std::min(r.cp_hi, r.cp_lo + 1.0));
    CostInterval iv = nash_cs_interval(cfg, r.profile, c_p);
    double lo = std::max(r.cs_lo, iv.lo);
    double hi = std::min(r.cs_hi, iv.hi);
    if (hi > 1e18) hi = lo + std::max(1.0, lo);
    double c_s = 0.5 * (lo + hi);
    NashVerdict v = verify_nash(cfg, r.profile, c_s, c_p);
    out << to_string(r.id) << ',' << c_s << ',' << c_p << ',' << int(v.holds);
    if (v.deviation)
      out << ',' << to_string(v.deviation->deviator) << ','
          << v.deviation->to.hsab << ',' << v.deviation->to.lsab << ','
          << int(v.deviation->to.sprom) << ',' << v.deviation->gain;
    else
      out << ",,,,,";
    out << "\n";
    if (!v.holds) all_hold = false;
  }
  std::cout << (all_hold ? "all sampled region points verified as equilibria"
                         : "some sampled points failed verification (see CSV)")
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contest equilibria, simulated rating panels, and "
               "identification checks"};
  app.require_subcommand(1);

  Options opt;
  struct Cmd {
    const char* name;
    const char* desc;
    int (*run)(const Options&);
    bool panel;
  };
  const Cmd cmds[] = {
      {"bounds", "performance gap and sabotage cost thresholds", cmd_bounds, false},
      {"sweep", "utility-vs-cost sweep with region labels (CSV + SVG)", cmd_sweep, false},
      {"simulate", "generate a synthetic rating panel", cmd_simulate, false},
      {"estimate", "fixed-effects estimates on a panel", cmd_estimate, true},
      {"rank", "ranking perturbation study on a panel", cmd_rank, true},
      {"verify", "verify classified equilibria by deviation enumeration", cmd_verify, false},
  };
  int (*selected)(const Options&) = nullptr;
  for (const Cmd& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.desc);
    sub->add_option("--scenario", opt.scenario_path, "scenario file")
        ->required();
    sub->add_option("--seed", opt.seed, "override the scenario seed");
    sub->add_option("--out", opt.out_dir, "override the output directory");
    if (c.panel) {
      sub->add_option("--panel", opt.panel_path, "panel CSV to analyze");
      sub->add_option("--replications", opt.replications,
                      "bootstrap replications");
    }
    sub->callback([&selected, &c] { selected = c.run; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitParse;
  }

  try {
    return selected(opt);
  } catch (const ScenarioParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const SchemaMismatch& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const NonConvergence& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  }
}
