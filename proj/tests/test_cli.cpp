#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "contestlab/panel.hpp"
#include "contestlab/scenario.hpp"

using namespace contestlab;
namespace fs = std::filesystem;

namespace {

const char* kFullScenario = R"(version 1
# exercise every section
[scenario]
name = demo
seed = 42

[contest]
n = 100
l = 30
h = 10
b_l = 0.2
b_h = 0.8
prize = 1000
cost_sabotage = 0.05
cost_promotion = 0.01

[sweep]
points = 50
c_p = 0.002
cs_min = 0.001
cs_max = 0.5

[simulate]
weeks = 12
population = 80
participation_rate = 0.1
rating_rate = 0.3
sabotage_mode = explicit
sabotage_low_high = 0.25
sabotage_high_high = 0.25
promotion_mode = explicit
promotion_prob = 0.6
incentive_week = 7
incentive_prize = 2500
incentive_uplift = 0.05

[estimate]
cluster = submission_id
window_lo = 1
window_hi = 12

[rank]
replications = 100
close_quantile = 0.3
)";

Scenario parse_str(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("contestlab_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
  std::string cmd = std::string(CONTESTLAB_BIN) + " " + args +
                    " >/dev/null 2>/dev/null";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("scenario parsing") {
  SUBCASE("full file round trip") {
    Scenario sc = parse_str(kFullScenario);
    CHECK(sc.name == "demo");
    CHECK(sc.seed == 42);
    CHECK(sc.has_contest);
    CHECK(sc.contest.n == 100);
    CHECK(sc.contest.l == 30);
    CHECK(sc.contest.h == 10);
    CHECK(sc.contest.b_h == doctest::Approx(0.8));
    CHECK(sc.sweep_points == 50);
    CHECK(sc.sweep_cp == doctest::Approx(0.002));
    CHECK(sc.has_sim);
    CHECK(sc.sim.weeks == 12);
    CHECK(sc.sim.seed == 42);  // simulation inherits the scenario seed
    CHECK(sc.sim.sabotage.mode == RuleMode::Explicit);
    CHECK(sc.sim.sabotage.probs.p[0][1] == doctest::Approx(0.25));
    REQUIRE(sc.sim.incentive_change.has_value());
    CHECK(sc.sim.incentive_change->week == 7);
    CHECK(sc.sim.incentive_change->new_prize == doctest::Approx(2500.0));
    CHECK(sc.sim.incentive_change->sabotage_uplift == doctest::Approx(0.05));
    CHECK(sc.did_window_lo == 1);
    CHECK(sc.did_window_hi == 12);
    CHECK(sc.rank.replications == 100);
    CHECK(sc.rank.close_quantile == doctest::Approx(0.3));
  }

  SUBCASE("rejects malformed input") {
    CHECK_THROWS_AS(parse_str(""), ScenarioParseError);
    CHECK_THROWS_AS(parse_str("[contest]\nn = 5\n"), ScenarioParseError);
    CHECK_THROWS_AS(parse_str("version 2\n"), ScenarioParseError);
    CHECK_THROWS_AS(parse_str("version 1\n[contest]\nbogus = 1\n"),
                    ScenarioParseError);
    CHECK_THROWS_AS(parse_str("version 1\n[contest]\nn = 5x\n"),
                    ScenarioParseError);
    CHECK_THROWS_AS(parse_str("version 1\n[nope]\n"), ScenarioParseError);
    CHECK_THROWS_AS(parse_str("version 1\nn = 5\n"), ScenarioParseError);
    CHECK_THROWS_AS(parse_str("version 1\n[contest]\nn\n"),
                    ScenarioParseError);
    CHECK_THROWS_AS(
        parse_str("version 1\n[simulate]\nincentive_uplift = 0.1\n"),
        ScenarioParseError);
  }
}

TEST_CASE("panel CSV round trip") {
  SimConfig cfg;
  cfg.weeks = 6;
  cfg.population = 40;
  cfg.participation_rate = 0.15;
  cfg.seed = 9;
  cfg.incentive_change = IncentiveChange{4, 800.0, 0.1};
  RatingPanel panel = simulate(cfg);
  REQUIRE(!panel.rows.empty());

  std::stringstream buf;
  write_panel_csv(panel, buf, cfg.seed);
  std::string text = buf.str();
  CHECK(text.rfind("# contestlab 0.1.0 seed=9\n", 0) == 0);

  RatingPanel back = read_panel_csv(buf);
  REQUIRE(back.rows.size() == panel.rows.size());
  REQUIRE(back.incentive_change_week == panel.incentive_change_week);
  for (std::size_t i = 0; i < panel.rows.size(); ++i) {
    const RatingRow& a = panel.rows[i];
    const RatingRow& b = back.rows[i];
    CHECK(a.rater_id == b.rater_id);
    CHECK(a.submission_id == b.submission_id);
    CHECK(a.week == b.week);
    CHECK(a.rating == b.rating);
    CHECK(a.submitted_same_contest == b.submitted_same_contest);
    CHECK(a.rate_own_submission == b.rate_own_submission);
    CHECK(a.after_incentive_change == b.after_incentive_change);
    CHECK(a.intent == b.intent);
    CHECK(a.source_skill == doctest::Approx(b.source_skill).epsilon(1e-6));
  }
}

TEST_CASE("panel reader rejects foreign schemas") {
  std::istringstream wrong(
      "# contestlab 0.1.0 seed=1\n# schema contestlab.panel.v2\nrater_id\n");
  CHECK_THROWS_AS(read_panel_csv(wrong), SchemaMismatch);
  std::istringstream missing("rater_id,submitter_id\n1,2\n");
  CHECK_THROWS_AS(read_panel_csv(missing), SchemaMismatch);
}

TEST_CASE("command line interface") {
  TempDir tmp;
  fs::path scenario = tmp.path / "demo.scn";
  write_file(scenario, kFullScenario);
  std::string base = "--scenario " + scenario.string() + " --out " +
                     (tmp.path / "out").string();

  SUBCASE("bounds") {
    REQUIRE(run_cli("bounds " + base) == 0);
    std::string csv = slurp(tmp.path / "out" / "demo_bounds.csv");
    CHECK(csv.rfind("# contestlab 0.1.0 seed=42\n", 0) == 0);
    CHECK(csv.find("high_sab_high") != std::string::npos);
  }

  SUBCASE("seed override lands in the preamble") {
    REQUIRE(run_cli("bounds " + base + " --seed 7") == 0);
    std::string csv = slurp(tmp.path / "out" / "demo_bounds.csv");
    CHECK(csv.rfind("# contestlab 0.1.0 seed=7\n", 0) == 0);
  }

  SUBCASE("sweep emits csv, svg and the region table, deterministically") {
    REQUIRE(run_cli("sweep " + base) == 0);
    std::string csv1 = slurp(tmp.path / "out" / "demo_sweep.csv");
    std::string svg = slurp(tmp.path / "out" / "demo_sweep.svg");
    CHECK(csv1.find("c_s") != std::string::npos);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(!slurp(tmp.path / "out" / "demo_regions.csv").empty());
    REQUIRE(run_cli("sweep " + base) == 0);
    CHECK(slurp(tmp.path / "out" / "demo_sweep.csv") == csv1);
  }

  SUBCASE("simulate, estimate and rank pipeline") {
    REQUIRE(run_cli("simulate " + base) == 0);
    fs::path panel = tmp.path / "out" / "demo_panel.csv";
    std::string first = slurp(panel);
    REQUIRE(!first.empty());
    CHECK(!slurp(tmp.path / "out" / "demo_summary.csv").empty());
    REQUIRE(run_cli("simulate " + base) == 0);
    CHECK(slurp(panel) == first);  // byte-identical rerun

    REQUIRE(run_cli("estimate " + base) == 0);
    CHECK(!slurp(tmp.path / "out" / "demo_fit_zero_star.csv").empty());
    CHECK(!slurp(tmp.path / "out" / "demo_fit_five_star.csv").empty());
    CHECK(!slurp(tmp.path / "out" / "demo_fit_did.csv").empty());

    REQUIRE(run_cli("rank " + base + " --replications 100") == 0);
    CHECK(!slurp(tmp.path / "out" / "demo_perturbation.csv").empty());
  }

  SUBCASE("verify samples every nonempty region successfully") {
    REQUIRE(run_cli("verify " + base) == 0);
    std::string csv = slurp(tmp.path / "out" / "demo_verify.csv");
    std::istringstream in(csv);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("label", 0) == 0)
        continue;
      ++rows;
      // holds flag is the fourth field
      std::size_t p = 0;
      for (int c = 0; c < 3; ++c) p = line.find(',', p) + 1;
      CHECK(line[p] == '1');
    }
    CHECK(rows >= 5);
  }

  SUBCASE("exit codes") {
    fs::path bad = tmp.path / "bad.scn";
    write_file(bad, "[contest]\nn = 5\n");  // missing version line
    CHECK(run_cli("bounds --scenario " + bad.string()) == 2);

    fs::path invalid = tmp.path / "invalid.scn";
    write_file(invalid,
               "version 1\n[contest]\nn = 100\nl = 30\nh = 10\n"
               "b_l = 0.9\nb_h = 0.2\nprize = 1000\n");
    CHECK(run_cli("bounds --scenario " + invalid.string() + " --out " +
                  (tmp.path / "out2").string()) == 3);

    fs::path fake_panel = tmp.path / "fake_panel.csv";
    write_file(fake_panel,
               "# contestlab 0.1.0 seed=1\n# schema contestlab.panel.v9\n"
               "rater_id\n");
    CHECK(run_cli("estimate " + base + " --panel " + fake_panel.string()) ==
          4);

    CHECK(run_cli("estimate --scenario " + scenario.string() + " --panel " +
                  (tmp.path / "absent.csv").string()) == 2);

    CHECK(run_cli("bounds") == 2);       // missing required --scenario
    CHECK(run_cli("--help") == 0);
  }
}
