#pragma once

// Pinned configurations behind `paultrap reproduce`.
//
//   fig2a  radial pseudopotential cross-sections of the four-pillar and the
//          five-wire surface trap (d = 100 um, 150 V, 80 MHz, Ca40): depth
//          and harmonicity
//   fig2b  secular frequency versus drive frequency at 150 V for both traps,
//          marked points P1 (surface, 80 MHz), P2 (3D, same q), P3 (3D, 80 MHz)
//   fig4   exact and lowest-order secular frequency versus q at 51.6 MHz and
//          the branches split by a = +-0.0018
//   fig5a  Doppler limit versus mode frequency, 45 degree beam, Delta = -Gamma/2

#include <string>
#include <string_view>
#include <vector>

#include "paultrap/cli/report.hpp"

namespace paultrap::cli {

struct FigureReport {
  ReportBundle bundle;
  std::vector<Band> bands;

  bool pass() const;
};

std::vector<std::string> reproduce_targets();

/// Throws SchemaError for unknown targets. `workers` only changes run time.
FigureReport reproduce(std::string_view target, unsigned workers = 1);

}  // namespace paultrap::cli
