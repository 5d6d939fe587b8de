#pragma once

#include <filesystem>
#include <iosfwd>

#include "hfrac/config.hpp"

namespace hfrac {

enum ExitCode : int {
    kExitOk = 0,
    kExitSolver = 1,
    kExitInvariant = 2,
    kExitConfig = 3,
};

/// Executes the configured mode and writes its artifacts into out_dir:
/// summary.txt always, plus solution.csv / profile.dat / exponents.dat / extremal.csv
/// depending on the mode. Diagnostics go to `log`.
int run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

/// Writes node_id, role, x..., y..., t, volume, u at 17 significant digits.
void write_solution_csv(const std::filesystem::path& path, const Mesh& mesh, const Field& u);

/// p/q with q <= 10000 when v matches it to 1e-12 relative; empty otherwise.
std::string rational_form(double v);

}  // namespace hfrac
