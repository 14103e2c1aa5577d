#include "contestlab/contest.hpp"

#include <cmath>
#include <sstream>

namespace contestlab {

void ContestConfig::validate() const {
  if (n < 1 || l < 1 || h < 1)
    throw InvalidConfig("all agent counts must be at least 1");
  if (!(h < l && l < n)) {
    std::ostringstream os;
    os << "counts must satisfy h < l < n, got h=" << h << " l=" << l
       << " n=" << n;
    throw InvalidConfig(os.str());
  }
  if (!(0.0 < b_l && b_l < b_h && b_h < 1.0)) {
    std::ostringstream os;
    os << "qualities must satisfy 0 < b_l < b_h < 1, got b_l=" << b_l
       << " b_h=" << b_h;
    throw InvalidConfig(os.str());
  }
  if (prize < 0.0 || cost_sabotage < 0.0 || cost_promotion < 0.0)
    throw InvalidConfig("prize and costs must be non-negative");
}

double sabotage_damage(const ContestConfig& cfg, AgentType target) {
  return cfg.quality(target);
}

double promotion_boost(const ContestConfig& cfg, AgentType who) {
  return 1.0 - cfg.quality(who);
}

void StrategyProfile::validate(const ContestConfig& cfg) const {
  auto check = [](int v, int full, const char* what) {
    if (v != 0 && v != full) {
      std::ostringstream os;
      os << what << " must be 0 or " << full << " (all-or-none), got " << v;
      throw InvalidProfile(os.str());
    }
  };
  check(high.hsab, cfg.h - 1, "high hsab");
  check(high.lsab, cfg.l, "high lsab");
  check(low.hsab, cfg.h, "low hsab");
  check(low.lsab, cfg.l - 1, "low lsab");
}

AgentValues agent_values(const ContestConfig& cfg, const StrategyProfile& profile) {
  cfg.validate();
  profile.validate(cfg);

  // Saboteurs hitting one high target: its h-1 peers (if they sabotage
  // high types) plus all l lows (if lows sabotage high types).
  int sab_on_high = (profile.high.hsab > 0 ? cfg.h - 1 : 0) +
                    (profile.low.hsab > 0 ? cfg.l : 0);
  int sab_on_low = (profile.high.lsab > 0 ? cfg.h : 0) +
                   (profile.low.lsab > 0 ? cfg.l - 1 : 0);

  AgentValues av;
  av.b_h = cfg.b_h;
  av.b_l = cfg.b_l;
  av.v_h = cfg.b_h * cfg.raters() - sab_on_high * cfg.b_h +
           (profile.high.sprom ? 1.0 - cfg.b_h : 0.0);
  av.v_l = cfg.b_l * cfg.raters() - sab_on_low * cfg.b_l +
           (profile.low.sprom ? 1.0 - cfg.b_l : 0.0);
  av.S = cfg.h * av.v_h + cfg.l * av.v_l;

  if (av.v_h <= 0.0 || av.v_l <= 0.0)
    throw DegenerateContest("agent value driven to zero or below");
  if (av.v_l >= av.v_h)
    throw InvalidConfig("low-type value reached high-type value; type order "
                        "is not preserved under this config");
  return av;
}

double tullock_probability(const AgentValues& values, AgentType who) {
  if (values.S <= 0.0)
    throw DegenerateContest("total contest output S must be positive");
  return values.value(who) / values.S;
}

double expected_utility(const ContestConfig& cfg, const StrategyProfile& profile,
                        AgentType who) {
  AgentValues av = agent_values(cfg, profile);
  const TypeStrategy& s = who == AgentType::High ? profile.high : profile.low;
  return cfg.prize * tullock_probability(av, who) -
         cfg.cost_sabotage * s.acts() -
         cfg.cost_promotion * (s.sprom ? 1.0 : 0.0);
}

GapReport performance_gap(const ContestConfig& cfg) {
  cfg.validate();
  GapReport rep;
  rep.g = (cfg.b_h / cfg.b_l) * double(cfg.n + 1) / double(cfg.raters());
  rep.satisfied = rep.g >= 1.0;
  return rep;
}

double self_promotion_gain(const AgentValues& values, AgentType who) {
  double d = 1.0 - (who == AgentType::High ? values.b_h : values.b_l);
  double v = values.value(who);
  double S = values.S;
  return d * (S - v) / (S * (S + d));
}

double self_promotion_retention(const AgentValues& values, AgentType who) {
  double d = 1.0 - (who == AgentType::High ? values.b_h : values.b_l);
  double v = values.value(who);
  double S = values.S;
  if (S - d <= 0.0)
    throw DegenerateContest("promotion boost exceeds contest output");
  return d * (S - v) / (S * (S - d));
}

double marginal_sabotage_gain(const ContestConfig& cfg, const AgentValues& values,
                              AgentType attacker, AgentType target,
                              int already_sabotaged) {
  int max_targets = cfg.count(target) - (attacker == target ? 1 : 0);
  if (already_sabotaged < 0 || already_sabotaged >= max_targets) {
    std::ostringstream os;
    os << "already_sabotaged=" << already_sabotaged << " out of range [0, "
       << max_targets << ") for " << to_string(attacker) << " attacking "
       << to_string(target);
    throw InvalidCount(os.str());
  }
  double d = target == AgentType::High ? values.b_h : values.b_l;
  double v = values.value(attacker);
  double S = values.S;
  double S_next = S - (already_sabotaged + 1) * d;
  double S_cur = S - already_sabotaged * d;
  if (S_next <= v)
    throw DegenerateContest("sabotage would exhaust rival contest output");
  return v * d / (S_next * S_cur);
}

BoundSet sabotage_bounds(const ContestConfig& cfg) {
  cfg.validate();
  GapReport gap = performance_gap(cfg);
  if (!gap.satisfied) {
    std::ostringstream os;
    os << "performance gap g=" << gap.g
       << " < 1: maximal sabotage could reorder the types and the threshold "
          "ordering no longer applies";
    throw GapViolated(os.str());
  }

  const double M = cfg.prize;
  auto marginal = [&](const StrategyProfile& baseline, AgentType attacker,
                      AgentType target, int already) {
    AgentValues av = agent_values(cfg, baseline);
    return M * marginal_sabotage_gain(cfg, av, attacker, target, already);
  };

  // Each threshold is the last (largest) marginal gain of the attacking
  // group along its sabotage expansion, evaluated at the profile in force
  // just before the transition, with everyone self-promoting.
  StrategyProfile promo_all{{0, 0, true}, {0, 0, true}};
  StrategyProfile high_sab_high{{cfg.h - 1, 0, true}, {0, 0, true}};
  StrategyProfile both_sab_high{{cfg.h - 1, 0, true}, {cfg.h, 0, true}};
  StrategyProfile high_sab_all{{cfg.h - 1, cfg.l, true}, {cfg.h, 0, true}};

  BoundSet b;
  b.high_sab_high = cfg.h >= 2
      ? marginal(promo_all, AgentType::High, AgentType::High, cfg.h - 2)
      : 0.0;
  b.low_sab_high = marginal(high_sab_high, AgentType::Low, AgentType::High,
                            cfg.h - 1);
  b.high_sab_low = marginal(both_sab_high, AgentType::High, AgentType::Low,
                            cfg.l - 1);
  b.low_sab_low = cfg.l >= 2
      ? marginal(high_sab_all, AgentType::Low, AgentType::Low, cfg.l - 2)
      : 0.0;

  // Alternates for the orderings the taxonomy rules out: highs extending to
  // lows before any low sabotages, and lows joining only after highs
  // sabotage everyone.
  b.alt_high_sab_low_h1 =
      marginal(high_sab_high, AgentType::High, AgentType::Low, cfg.l - 1);
  StrategyProfile high_sab_all_lows_idle{{cfg.h - 1, cfg.l, true}, {0, 0, true}};
  b.alt_low_sab_high_l2 = marginal(high_sab_all_lows_idle, AgentType::Low,
                                   AgentType::High, cfg.h - 1);
  return b;
}

std::string to_string(AgentType t) {
  return t == AgentType::High ? "high" : "low";
}

}  // namespace contestlab
