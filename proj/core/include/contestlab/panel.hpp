#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "contestlab/contest.hpp"
#include "contestlab/equilibrium.hpp"
#include "contestlab/ranking.hpp"
#include "contestlab/regress.hpp"
#include "contestlab/simulate.hpp"

namespace contestlab {

struct SchemaMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kPanelSchema = "contestlab.panel.v1";

/// Every CSV starts with `# contestlab <version> seed=<seed>`; panels add
/// a schema line checked on read.
void write_csv_preamble(std::ostream& out, std::uint64_t seed);

void write_panel_csv(const RatingPanel& panel, std::ostream& out,
                     std::uint64_t seed);
/// Throws SchemaMismatch when the schema line names a different version.
RatingPanel read_panel_csv(std::istream& in);

void write_bounds_csv(const BoundSet& bounds, const GapReport& gap,
                      std::ostream& out, std::uint64_t seed);
void write_sweep_csv(const SweepResult& sweep, std::ostream& out,
                     std::uint64_t seed);
void write_fit_csv(const FitResult& fit, std::ostream& out, std::uint64_t seed);
void write_summary_csv(const PanelSummary& summary, std::ostream& out,
                       std::uint64_t seed);
void write_perturbation_csv(const PerturbationReport& report, std::ostream& out,
                            std::uint64_t seed);
void write_regions_csv(const std::vector<EquilibriumRegion>& regions,
                       std::ostream& out, std::uint64_t seed);

/// Plain-text coefficient table for eyeball comparison.
std::string render_fit_table(const FitResult& fit, const std::string& title);

}  // namespace contestlab
