#pragma once

#include <array>
#include <iosfwd>
#include <string_view>

#include "sphaerica/io.hpp"

namespace sphaerica {

inline constexpr std::array<std::string_view, 13> kCommands = {
    "selfcheck", "poisson",    "dirichlet",   "neumann",              "idp",        "inp",    "jump-test",
    "helmholtz", "hardy-hodge", "vertical-deflections", "geostrophic", "vortex", "mfs-fit"};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one command. Result grids go to `<out>/<command>_<name>.csv` and a text report to
/// `<out>/<command>_report.txt`; diagnostics go to `log`. Returns 0, 2 (invalid input) or
/// 3 (numerical failure, including a failed selfcheck).
int run(const RunConfig& config, std::ostream& log);

}  // namespace sphaerica
