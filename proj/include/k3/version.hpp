#pragma once

#include <array>
#include <string_view>
#include <utility>

namespace k3 {

// Bumped whenever a module's numerical output can change.
inline constexpr std::array<std::pair<std::string_view, std::string_view>, 7> kModuleVersions{{
    {"exactmath", "1.0"},
    {"lattice", "1.0"},
    {"shortvec", "1.0"},
    {"config", "1.0"},
    {"pencilenum", "1.0"},
    {"quartics", "1.0"},
    {"cli", "1.0"},
}};

} // namespace k3
