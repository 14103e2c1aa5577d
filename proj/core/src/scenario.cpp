#include "contestlab/scenario.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace contestlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ScenarioParseError("key '" + key + "': cannot parse number '" + v + "'");
  }
}

long long parse_int(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ScenarioParseError("key '" + key + "': cannot parse integer '" + v + "'");
  }
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ScenarioParseError("key '" + key + "': cannot parse boolean '" + v + "'");
}

RuleMode parse_mode(const std::string& v, const std::string& key) {
  if (v == "none") return RuleMode::None;
  if (v == "explicit") return RuleMode::Explicit;
  if (v == "equilibrium") return RuleMode::Equilibrium;
  throw ScenarioParseError("key '" + key +
                           "': mode must be none, explicit, or equilibrium");
}

struct IncentiveKeys {
  std::optional<int> week;
  std::optional<double> prize;
  std::optional<double> uplift;
};

}  // namespace

Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  IncentiveKeys inc;
  std::string line, section;
  bool version_seen = false;
  int lineno = 0;

  auto fail = [&](const std::string& msg) {
    std::ostringstream os;
    os << "line " << lineno << ": " << msg;
    throw ScenarioParseError(os.str());
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!version_seen) {
      if (t != "version 1")
        fail("scenario must start with 'version 1', got '" + t + "'");
      version_seen = true;
      continue;
    }
    if (t.front() == '[') {
      if (t.back() != ']') fail("unterminated section header");
      section = t.substr(1, t.size() - 2);
      if (section != "scenario" && section != "contest" && section != "sweep" &&
          section != "simulate" && section != "estimate" && section != "rank")
        fail("unknown section [" + section + "]");
      if (section == "contest") sc.has_contest = true;
      if (section == "simulate") sc.has_sim = true;
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', got '" + t + "'");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty() || val.empty()) fail("empty key or value");

    if (section == "scenario") {
      if (key == "name") sc.name = val;
      else if (key == "out") sc.out_dir = val;
      else if (key == "seed") sc.seed = std::uint64_t(parse_int(val, key));
      else fail("unknown key '" + key + "' in [scenario]");
    } else if (section == "contest") {
      ContestConfig& c = sc.contest;
      if (key == "n") c.n = int(parse_int(val, key));
      else if (key == "l") c.l = int(parse_int(val, key));
      else if (key == "h") c.h = int(parse_int(val, key));
      else if (key == "b_l") c.b_l = parse_double(val, key);
      else if (key == "b_h") c.b_h = parse_double(val, key);
      else if (key == "prize") c.prize = parse_double(val, key);
      else if (key == "cost_sabotage") c.cost_sabotage = parse_double(val, key);
      else if (key == "cost_promotion") c.cost_promotion = parse_double(val, key);
      else fail("unknown key '" + key + "' in [contest]");
    } else if (section == "sweep") {
      if (key == "points") sc.sweep_points = int(parse_int(val, key));
      else if (key == "c_p") sc.sweep_cp = parse_double(val, key);
      else if (key == "cs_min") sc.sweep_cs_min = parse_double(val, key);
      else if (key == "cs_max") sc.sweep_cs_max = parse_double(val, key);
      else fail("unknown key '" + key + "' in [sweep]");
    } else if (section == "simulate") {
      SimConfig& s = sc.sim;
      if (key == "weeks") s.weeks = int(parse_int(val, key));
      else if (key == "population") s.population = int(parse_int(val, key));
      else if (key == "skill_alpha") s.skill_alpha = parse_double(val, key);
      else if (key == "skill_beta") s.skill_beta = parse_double(val, key);
      else if (key == "participation_rate")
        s.participation_rate = parse_double(val, key);
      else if (key == "rating_rate") s.rating_rate = parse_double(val, key);
      else if (key == "rating_noise_sd")
        s.rating_noise_sd = parse_double(val, key);
      else if (key == "high_band_quantile")
        s.high_band_quantile = parse_double(val, key);
      else if (key == "prize") s.prize = parse_double(val, key);
      else if (key == "cost_sabotage") s.cost_sabotage = parse_double(val, key);
      else if (key == "cost_promotion")
        s.cost_promotion = parse_double(val, key);
      else if (key == "sabotage_mode") s.sabotage.mode = parse_mode(val, key);
      else if (key == "sabotage_low_low")
        s.sabotage.probs.p[0][0] = parse_double(val, key);
      else if (key == "sabotage_low_high")
        s.sabotage.probs.p[0][1] = parse_double(val, key);
      else if (key == "sabotage_high_low")
        s.sabotage.probs.p[1][0] = parse_double(val, key);
      else if (key == "sabotage_high_high")
        s.sabotage.probs.p[1][1] = parse_double(val, key);
      else if (key == "promotion_mode") s.promotion.mode = parse_mode(val, key);
      else if (key == "promotion_prob") s.promotion.prob = parse_double(val, key);
      else if (key == "promotion_skill_slope")
        s.promotion.skill_slope = parse_double(val, key);
      else if (key == "incentive_week") inc.week = int(parse_int(val, key));
      else if (key == "incentive_prize") inc.prize = parse_double(val, key);
      else if (key == "incentive_uplift") inc.uplift = parse_double(val, key);
      else fail("unknown key '" + key + "' in [simulate]");
    } else if (section == "estimate") {
      if (key == "cluster") sc.cluster = val;
      else if (key == "window_lo") sc.did_window_lo = int(parse_int(val, key));
      else if (key == "window_hi") sc.did_window_hi = int(parse_int(val, key));
      else if (key == "placebo_week") sc.placebo_week = int(parse_int(val, key));
      else if (key == "quarter_split") sc.quarter_split = parse_bool(val, key);
      else fail("unknown key '" + key + "' in [estimate]");
    } else if (section == "rank") {
      if (key == "replications") sc.rank.replications = int(parse_int(val, key));
      else if (key == "close_quantile")
        sc.rank.close_quantile = parse_double(val, key);
      else if (key == "match_on_raters")
        sc.rank.match_on_raters = parse_bool(val, key);
      else fail("unknown key '" + key + "' in [rank]");
    } else {
      fail("key outside any section");
    }
  }
  if (!version_seen) throw ScenarioParseError("empty scenario file");

  if (inc.week) {
    IncentiveChange change;
    change.week = *inc.week;
    change.new_prize = inc.prize.value_or(sc.sim.prize);
    change.sabotage_uplift = inc.uplift.value_or(0.0);
    sc.sim.incentive_change = change;
  } else if (inc.prize || inc.uplift) {
    throw ScenarioParseError(
        "incentive_prize/incentive_uplift require incentive_week");
  }
  sc.sim.seed = sc.seed;
  return sc;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioParseError("cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

}  // namespace contestlab
