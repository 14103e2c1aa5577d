#include "contestlab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace contestlab {

std::string to_string(NashId id) {
  return "NE" + std::to_string(static_cast<int>(id));
}

StrategyProfile canonical_profile(NashId id, const ContestConfig& cfg) {
  const int hh = cfg.h - 1, lh = cfg.h, hl = cfg.l, ll = cfg.l - 1;
  switch (id) {
    case NashId::NE1: return {{0, 0, false}, {0, 0, false}};
    case NashId::NE2: return {{0, 0, false}, {0, 0, true}};
    case NashId::NE3: return {{0, 0, true}, {0, 0, true}};
    case NashId::NE4: return {{hh, 0, true}, {0, 0, true}};
    case NashId::NE5: return {{hh, 0, true}, {lh, 0, true}};
    case NashId::NE6: return {{hh, hl, true}, {lh, 0, true}};
    case NashId::NE7: return {{hh, hl, true}, {lh, ll, true}};
  }
  throw InvalidConfig("unknown equilibrium id");
}

namespace {

std::vector<TypeStrategy> strategy_classes(const ContestConfig& cfg,
                                           AgentType who) {
  const int max_h = who == AgentType::High ? cfg.h - 1 : cfg.h;
  const int max_l = who == AgentType::High ? cfg.l : cfg.l - 1;
  std::vector<TypeStrategy> out;
  for (int hs : {0, max_h})
    for (int ls : {0, max_l})
      for (bool sp : {false, true}) {
        TypeStrategy s{hs, ls, sp};
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
      }
  return out;
}

// One unilateral deviation, linear in the costs:
//   profit(c_s, c_p) = prize * dprob - c_s * dacts - c_p * dsprom
struct LinearDeviation {
  AgentType who{};
  TypeStrategy from, to;
  double dprob = 0.0;
  int dacts = 0;
  int dsprom = 0;
};

double deviant_probability(const ContestConfig& cfg, const AgentValues& av,
                           const StrategyProfile& profile, AgentType who,
                           const TypeStrategy& dev) {
  const TypeStrategy& cur = who == AgentType::High ? profile.high : profile.low;
  const double boost = 1.0 - cfg.quality(who);
  const double dsp = (int(dev.sprom) - int(cur.sprom)) * boost;
  const double v = av.value(who) + dsp;
  const double S = av.S + dsp - (dev.hsab - cur.hsab) * cfg.b_h -
                   (dev.lsab - cur.lsab) * cfg.b_l;
  if (S <= 0.0 || v <= 0.0 || S <= v - 1e-15)
    throw DegenerateContest("deviation drives contest output non-positive");
  return v / S;
}

std::vector<LinearDeviation> enumerate_deviations(const ContestConfig& cfg,
                                                  const StrategyProfile& profile) {
  AgentValues av = agent_values(cfg, profile);
  std::vector<LinearDeviation> out;
  for (AgentType who : {AgentType::High, AgentType::Low}) {
    const TypeStrategy& cur = who == AgentType::High ? profile.high : profile.low;
    const double p_eq = tullock_probability(av, who);
    for (const TypeStrategy& dev : strategy_classes(cfg, who)) {
      if (dev == cur) continue;
      LinearDeviation d;
      d.who = who;
      d.from = cur;
      d.to = dev;
      d.dprob = deviant_probability(cfg, av, profile, who, dev) - p_eq;
      d.dacts = dev.acts() - cur.acts();
      d.dsprom = int(dev.sprom) - int(cur.sprom);
      out.push_back(d);
    }
  }
  return out;
}

GapReport require_gap(const ContestConfig& cfg) {
  GapReport gap = performance_gap(cfg);
  if (!gap.satisfied) {
    std::ostringstream os;
    os << "performance gap g=" << gap.g
       << " < 1: sufficiently heavy sabotage could reverse the type ordering "
          "and the seven-region taxonomy does not apply";
    throw GapViolated(os.str());
  }
  return gap;
}

constexpr double kGainTol = 1e-12;

}  // namespace

double deviant_utility(const ContestConfig& cfg, const StrategyProfile& profile,
                       AgentType who, const TypeStrategy& dev) {
  AgentValues av = agent_values(cfg, profile);
  double p = deviant_probability(cfg, av, profile, who, dev);
  return cfg.prize * p - cfg.cost_sabotage * dev.acts() -
         cfg.cost_promotion * (dev.sprom ? 1.0 : 0.0);
}

NashVerdict verify_nash(const ContestConfig& cfg, const StrategyProfile& profile,
                        double c_s, double c_p) {
  ContestConfig c = cfg;
  c.cost_sabotage = c_s;
  c.cost_promotion = c_p;
  c.validate();
  profile.validate(c);

  const double tol = kGainTol * std::max(1.0, c.prize);
  NashVerdict verdict;
  for (const LinearDeviation& d : enumerate_deviations(c, profile)) {
    double gain = c.prize * d.dprob - c_s * d.dacts - c_p * d.dsprom;
    if (gain > tol && (!verdict.deviation || gain > verdict.deviation->gain)) {
      verdict.holds = false;
      verdict.deviation = Deviation{d.who, d.from, d.to, gain};
    }
  }
  return verdict;
}

CostInterval nash_cs_interval(const ContestConfig& cfg,
                              const StrategyProfile& profile, double c_p) {
  CostInterval iv;
  for (const LinearDeviation& d : enumerate_deviations(cfg, profile)) {
    const double b0 = cfg.prize * d.dprob - c_p * d.dsprom;
    if (d.dacts > 0) {
      iv.lo = std::max(iv.lo, b0 / d.dacts);
    } else if (d.dacts < 0) {
      iv.hi = std::min(iv.hi, b0 / d.dacts);
    } else if (b0 > kGainTol * std::max(1.0, cfg.prize)) {
      iv.feasible = false;
    }
  }
  if (iv.lo >= iv.hi) iv.feasible = false;
  return iv;
}

namespace {

// Cost of promotion above which some agent prefers to stop promoting,
// holding its sabotage fixed.
double promotion_cap(const ContestConfig& cfg, const StrategyProfile& profile) {
  double cap = std::numeric_limits<double>::infinity();
  for (const LinearDeviation& d : enumerate_deviations(cfg, profile))
    if (d.dsprom == -1 && d.dacts == 0) cap = std::min(cap, -cfg.prize * d.dprob);
  return cap;
}

}  // namespace

std::vector<EquilibriumRegion> classify(const ContestConfig& cfg) {
  cfg.validate();
  require_gap(cfg);
  const double c_p = cfg.cost_promotion;
  const double inf = std::numeric_limits<double>::infinity();

  // Sabotage regions hand over where the heavier region's own equilibrium
  // interval ends: below that point its last sabotage expansion still pays,
  // above it the lighter profile takes over. Exact per-profile intervals
  // can overlap or leave hairline slivers at these seams; the cessation
  // thresholds give a deterministic partition.
  double prev = 0.0;
  std::vector<EquilibriumRegion> regions;
  for (NashId id : {NashId::NE7, NashId::NE6, NashId::NE5, NashId::NE4}) {
    EquilibriumRegion r;
    r.id = id;
    r.profile = canonical_profile(id, cfg);
    r.cs_lo = prev;
    if (id == NashId::NE4 && cfg.h == 1) {
      // With a single high type NE4 coincides with NE3; give it no room.
      r.cs_hi = prev;
    } else {
      CostInterval iv = nash_cs_interval(cfg, r.profile, c_p);
      r.cs_hi = std::max(iv.hi, prev);
    }
    r.cp_promotion_cap = promotion_cap(cfg, r.profile);
    prev = r.cs_hi;
    regions.push_back(r);
  }

  // Above the last sabotage bound the three no-sabotage equilibria split
  // the c_p axis: everyone promotes, only lows promote, nobody promotes.
  const double p3 = promotion_cap(cfg, canonical_profile(NashId::NE3, cfg));
  const double p2 = promotion_cap(cfg, canonical_profile(NashId::NE2, cfg));
  struct { NashId id; double cp_lo, cp_hi; } promo[] = {
      {NashId::NE3, 0.0, p3},
      {NashId::NE2, p3, std::max(p2, p3)},
      {NashId::NE1, std::max(p2, p3), inf},
  };
  for (const auto& p : promo) {
    EquilibriumRegion r;
    r.id = p.id;
    r.profile = canonical_profile(p.id, cfg);
    r.cs_lo = prev;
    r.cs_hi = inf;
    r.cp_lo = p.cp_lo;
    r.cp_hi = p.cp_hi;
    r.cp_promotion_cap = p.id == NashId::NE1 ? inf : p.cp_hi;
    regions.push_back(r);
  }
  return regions;
}

const EquilibriumRegion& label_at(const std::vector<EquilibriumRegion>& regions,
                                  double c_s, double c_p) {
  for (const EquilibriumRegion& r : regions)
    if (c_s >= r.cs_lo && c_s < r.cs_hi && c_p >= r.cp_lo && c_p < r.cp_hi)
      return r;
  std::ostringstream os;
  os << "no region contains c_s=" << c_s << ", c_p=" << c_p;
  throw InvalidConfig(os.str());
}

SweepResult sweep_costs(const ContestConfig& cfg,
                        const std::vector<double>& cs_grid, double c_p) {
  if (!std::is_sorted(cs_grid.begin(), cs_grid.end()))
    throw InvalidConfig("c_s grid must be sorted ascending");
  ContestConfig base = cfg;
  base.cost_promotion = c_p;
  std::vector<EquilibriumRegion> regions = classify(base);

  SweepResult result;
  result.rows.reserve(cs_grid.size());
  for (double cs : cs_grid) {
    const EquilibriumRegion& r = label_at(regions, cs, c_p);
    ContestConfig point = base;
    point.cost_sabotage = cs;
    SweepRow row;
    row.c_s = cs;
    row.label = r.id;
    row.utility_high = expected_utility(point, r.profile, AgentType::High);
    row.utility_low = expected_utility(point, r.profile, AgentType::Low);
    result.rows.push_back(row);
  }
  return result;
}

std::vector<double> default_cs_grid(double prize, int points) {
  if (points < 1) throw InvalidConfig("grid needs at least one point");
  std::vector<double> grid(points);
  const double lo = std::log(1e-4 * prize), hi = std::log(1e-1 * prize);
  for (int i = 0; i < points; ++i) {
    double t = points == 1 ? 0.0 : double(i) / (points - 1);
    grid[i] = std::exp(lo + t * (hi - lo));
  }
  return grid;
}

}  // namespace contestlab
