#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>

#include "contestlab/contest.hpp"
#include "contestlab/ranking.hpp"
#include "contestlab/simulate.hpp"

namespace contestlab {

struct ScenarioParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A reproducible analysis setup: flat key-value file with [section]
/// headers and a leading `version 1` line.
struct Scenario {
  std::string name = "scenario";
  std::string out_dir = ".";
  std::uint64_t seed = 1;

  ContestConfig contest;
  bool has_contest = false;

  SimConfig sim;
  bool has_sim = false;

  // [sweep]
  int sweep_points = 1000;
  std::optional<double> sweep_cp;      ///< defaults to contest.cost_promotion
  std::optional<double> sweep_cs_min;  ///< defaults to 1e-4 * prize
  std::optional<double> sweep_cs_max;  ///< defaults to 1e-1 * prize

  // [estimate]
  std::string cluster = "submission_id";
  std::optional<int> did_window_lo;
  std::optional<int> did_window_hi;
  std::optional<int> placebo_week;
  bool quarter_split = false;

  // [rank]
  PerturbOptions rank;
};

Scenario parse_scenario(std::istream& in);
Scenario parse_scenario_file(const std::string& path);

}  // namespace contestlab
