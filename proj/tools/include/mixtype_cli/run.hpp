#pragma once

#include <iosfwd>
#include <string>

#include "mixtype_cli/config.hpp"

namespace mixtype::cli {

/// Runs the configured scenario, writes report.json, timing.json and the CSV
/// grids into config.out, and returns the process exit code: 0 when every
/// enabled assertion passes, 1 when one fails, exit_code(kind) on an error.
/// Progress lines go to `log`.
int run(const RunConfig& config, std::ostream& log);

/// Value of MIXTYPE_THREADS (1 when unset); Config error unless a positive integer.
int requested_threads();

/// Text for --help: scenarios, exit codes, config schema.
std::string help_epilog();

}  // namespace mixtype::cli
