#pragma once

#include "nonlocal/config.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace nonlocal {

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

/// Executes one batch subcommand (solve | eig | heat | mc | limits | perimeter),
/// writing CSV/SVG outputs and a manifest.json with content digests into
/// out_dir. Returns the process exit code: 0 success, 2 validation error,
/// 3 numerical failure. Never throws.
int run_subcommand(const std::string& subcommand, Config cfg, const std::string& out_dir,
                   const RunOverrides& overrides);

}  // namespace nonlocal
