#pragma once

#include "config.hpp"

namespace qtdi_cli {

// One function per subcommand; each writes its files under cfg.out_dir and
// returns the process exit code (0 on success). Failures throw CliError.
int run_isf(const RunConfig& cfg);
int run_split(const RunConfig& cfg);
int run_interferogram(const RunConfig& cfg);
int run_recover(const RunConfig& cfg);
int run_backaction(const RunConfig& cfg);
int run_symcheck(const RunConfig& cfg);

} // namespace qtdi_cli
