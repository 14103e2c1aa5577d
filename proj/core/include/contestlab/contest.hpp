#pragma once

#include <stdexcept>
#include <string>

namespace contestlab {

struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidProfile : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidCount : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DegenerateContest : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GapViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class AgentType { High, Low };

/// Primitives of a single-prize rating contest: n neutral outsiders,
/// l low-quality and h high-quality contestants, qualities on the unit
/// rating scale, and per-act costs of strategic rating.
struct ContestConfig {
  int n = 0;  ///< neutral outsiders (rate sincerely, never compete)
  int l = 0;  ///< low-type contestants
  int h = 0;  ///< high-type contestants
  double b_l = 0.0;  ///< low-type submission quality, in (0, b_h)
  double b_h = 0.0;  ///< high-type submission quality, in (b_l, 1)
  double prize = 1.0;
  double cost_sabotage = 0.0;
  double cost_promotion = 0.0;

  int raters() const { return n + l + h; }
  double quality(AgentType t) const { return t == AgentType::High ? b_h : b_l; }
  int count(AgentType t) const { return t == AgentType::High ? h : l; }

  /// Throws InvalidConfig unless 0 < b_l < b_h < 1, h < l < n, counts >= 1
  /// and prize/costs are non-negative.
  void validate() const;
};

/// Damage one act of sabotage inflicts on a target of the given type
/// (its sincere rating is replaced by the scale minimum).
double sabotage_damage(const ContestConfig& cfg, AgentType target);

/// Value added by one act of promotion on the given type (its sincere
/// rating is replaced by the scale maximum).
double promotion_boost(const ContestConfig& cfg, AgentType who);

/// Symmetric per-type strategy class: how many same/other-type rivals an
/// agent of the type sabotages, and whether it promotes its own submission.
struct TypeStrategy {
  int hsab = 0;
  int lsab = 0;
  bool sprom = false;

  int acts() const { return hsab + lsab; }
  bool operator==(const TypeStrategy&) const = default;
};

struct StrategyProfile {
  TypeStrategy high;
  TypeStrategy low;

  bool operator==(const StrategyProfile&) const = default;

  static StrategyProfile sincere() { return {}; }

  /// Sabotage counts are all-or-none: a type either sabotages every
  /// feasible target of a given type or none of them. Intermediate counts
  /// throw InvalidProfile; they are never best responses.
  void validate(const ContestConfig& cfg) const;
};

/// Aggregate submission values of a representative agent of each type
/// plus total contestant output S. Carries the qualities so that gain
/// formulas do not need the originating config.
struct AgentValues {
  double v_h = 0.0;
  double v_l = 0.0;
  double S = 0.0;
  double b_h = 0.0;
  double b_l = 0.0;

  double value(AgentType t) const { return t == AgentType::High ? v_h : v_l; }
};

struct GapReport {
  double g = 0.0;
  bool satisfied = false;
};

/// Per-agent values under a symmetric profile: sincere ratings minus
/// sabotage deductions plus the agent's own promotion top-up.
AgentValues agent_values(const ContestConfig& cfg, const StrategyProfile& profile);

/// Winning probability of one agent of the given type, v / S.
double tullock_probability(const AgentValues& values, AgentType who);

/// prize * p - c_s * (sabotage acts) - c_p * (promotion act), Tullock payoff
/// net of strategic-rating costs.
double expected_utility(const ContestConfig& cfg, const StrategyProfile& profile,
                        AgentType who);

/// g = (b_h/b_l) * (n+1)/(n+l+h). g >= 1 guarantees high-type values stay
/// above low-type values even under maximal sabotage of the high types.
GapReport performance_gap(const ContestConfig& cfg);

/// Probability gained by a currently non-promoting agent that starts
/// promoting: d(S-v) / (S(S+d)) with d the promotion boost of its type.
double self_promotion_gain(const AgentValues& values, AgentType who);

/// Probability a currently promoting agent would lose by stopping:
/// d(S-v) / (S(S-d)). Slightly larger than the adoption gain; this is the
/// form that bounds the promotion cost in the all-promote equilibria.
double self_promotion_retention(const AgentValues& values, AgentType who);

/// Probability gained by sabotaging one more target of the given type when
/// `already_sabotaged` of them are already sabotaged by this attacker.
/// Strictly increasing in already_sabotaged.
double marginal_sabotage_gain(const ContestConfig& cfg, const AgentValues& values,
                              AgentType attacker, AgentType target,
                              int already_sabotaged);

/// Cost-of-sabotage thresholds (in currency) at which each group starts
/// sabotaging another group, each evaluated at the profile in force just
/// before that transition, with promotion active for all agents.
struct BoundSet {
  double high_sab_high = 0.0;  ///< highs start sabotaging each other
  double low_sab_high = 0.0;   ///< lows join in sabotaging the highs
  double high_sab_low = 0.0;   ///< highs extend sabotage to the lows
  double low_sab_low = 0.0;    ///< lows extend sabotage to each other
  /// Alternate orderings, kept for comparison: highs sabotage lows before
  /// any low sabotages (H1), lows sabotage highs after highs already
  /// sabotage everyone (L2).
  double alt_high_sab_low_h1 = 0.0;
  double alt_low_sab_high_l2 = 0.0;
};

/// Throws GapViolated when g < 1 (the threshold ordering is only
/// established for contests with a positive performance gap).
BoundSet sabotage_bounds(const ContestConfig& cfg);

std::string to_string(AgentType t);

}  // namespace contestlab
