#pragma once

#include <ostream>
#include <string>

#include "contestlab/equilibrium.hpp"

namespace contestlab {

/// Utility-vs-cost-of-sabotage line plot: log-scaled c_s on the x axis,
/// both types' utilities as polylines, equilibrium regions shaded and
/// labeled.
void write_sweep_svg(const SweepResult& sweep, std::ostream& out,
                     const std::string& title = "Equilibria and utilities");

}  // namespace contestlab
