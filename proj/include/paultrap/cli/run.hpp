#pragma once

#include "paultrap/cli/config.hpp"
#include "paultrap/cli/report.hpp"
#include "paultrap/fields/basis.hpp"

namespace paultrap::cli {

/// Field basis of the configured geometry (BEM solves use `workers` threads).
FieldBasisPtr make_basis(const GeometryRef& geometry, unsigned workers);
Vec3 null_guess(const GeometryRef& geometry);

/// Runs the requested analyses in dependency order (fields, modes, thermo) and
/// returns the bundle without touching the file system. Physics failures
/// propagate as StabilityError, NoTrapError, ValidityError, AccuracyError, ...
ReportBundle run(const RunConfig& config);

}  // namespace paultrap::cli
