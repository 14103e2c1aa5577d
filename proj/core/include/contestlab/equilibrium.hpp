#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "contestlab/contest.hpp"

namespace contestlab {

enum class NashId { NE1 = 1, NE2, NE3, NE4, NE5, NE6, NE7 };

std::string to_string(NashId id);

/// The canonical symmetric profile attached to each equilibrium label,
/// from no strategic behavior (NE1) to universal sabotage plus promotion
/// (NE7).
StrategyProfile canonical_profile(NashId id, const ContestConfig& cfg);

struct EquilibriumRegion {
  NashId id{};
  StrategyProfile profile;
  // Half-open [lo, hi); the boundary belongs to the more-sabotage region.
  double cs_lo = 0.0;
  double cs_hi = std::numeric_limits<double>::infinity();
  double cp_lo = 0.0;
  double cp_hi = std::numeric_limits<double>::infinity();
  /// Promotion cost above which the profile's promotion component is no
  /// longer sustained (informational; labels in the sabotage regions are
  /// split on c_s only).
  double cp_promotion_cap = std::numeric_limits<double>::infinity();
};

struct Deviation {
  AgentType deviator{};
  TypeStrategy from;
  TypeStrategy to;
  double gain = 0.0;  ///< deviator's utility change, strictly positive
};

struct NashVerdict {
  bool holds = true;
  std::optional<Deviation> deviation;  ///< best profitable deviation found
};

/// Expected utility of one agent of type `who` playing `dev` while every
/// other agent keeps the symmetric profile.
double deviant_utility(const ContestConfig& cfg, const StrategyProfile& profile,
                       AgentType who, const TypeStrategy& dev);

/// Direct check of the Nash definition: enumerates all strategy-class
/// deviations of a single agent of either type and reports the most
/// profitable one, if any.
NashVerdict verify_nash(const ContestConfig& cfg, const StrategyProfile& profile,
                        double c_s, double c_p);

/// The exact c_s interval (given cfg costs' c_p) over which the profile is
/// a Nash equilibrium; empty when no c_s sustains it.
struct CostInterval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool feasible = true;
};
CostInterval nash_cs_interval(const ContestConfig& cfg,
                              const StrategyProfile& profile, double c_p);

/// Partition of the c_s axis into the seven equilibrium regions for the
/// config's c_p. Adjacent sabotage regions hand over at the point where the
/// heavier region's last sabotage expansion stops paying for itself.
std::vector<EquilibriumRegion> classify(const ContestConfig& cfg);

/// The unique region containing (c_s, c_p).
const EquilibriumRegion& label_at(const std::vector<EquilibriumRegion>& regions,
                                  double c_s, double c_p);

struct SweepRow {
  double c_s = 0.0;
  NashId label{};
  double utility_high = 0.0;
  double utility_low = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

/// Utility-vs-cost sweep: per grid point, the equilibrium label at
/// (c_s, c_p) and both types' expected utilities under that label.
SweepResult sweep_costs(const ContestConfig& cfg,
                        const std::vector<double>& cs_grid, double c_p);

/// 1,000 log-spaced points from 1e-4*prize to 1e-1*prize.
std::vector<double> default_cs_grid(double prize, int points = 1000);

}  // namespace contestlab
