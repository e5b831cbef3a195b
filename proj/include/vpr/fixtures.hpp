#pragma once

// Bundled scenarios. The same texts live under scenarios/ in the source tree.

#include "vpr/errors.hpp"
#include "vpr/scenario.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace vpr {

namespace detail {

struct Fixture {
    std::string_view name;
    std::string_view text;
};

inline constexpr std::string_view kFig2K7 = R"(# Seven multirate users with the explicit rate assignment
# [120, 120, 240, 120, 30, 120, 30] kbps; users are re-indexed by rate on load.
K = 7
rates_bps = 30000, 120000, 240000
class_labels = voice, data, video
class_of_user = 2, 2, 3, 2, 1, 2, 1
seed = 7
alpha_mode = fixed
alpha = 0.9
max_iter = 300
)";

inline constexpr std::string_view kTable1Defaults = R"(# Default radio, channel and class parameters with the largest user count.
K = 30
seed = 1
)";

inline constexpr std::string_view kK25Fig1 = R"(# 25 terminals uniformly placed over a 5 x 5 km cell with four base stations.
K = 25
cell_km = 5
bs_positions = 1.25 1.25; 3.75 1.25; 1.25 3.75; 3.75 3.75
seed = 25
)";

inline constexpr std::string_view kInfeasibleDemo = R"(# Twenty 240 kbps users stacked on one spot with a deterministic channel:
# every off-diagonal B entry equals the CIR target, so rho(B) = 19 * 0.157 > 1.
K = 20
class_of_user = 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3
mt_positions = 1 1; 1 1; 1 1; 1 1; 1 1; 1 1; 1 1; 1 1; 1 1; 1 1; 1 1; 1 1; 1 1; 1 1; 1 1; 1 1; 1 1; 1 1; 1 1; 1 1
shadowing = off
fading = off
alpha = 0.9
max_iter = 300
seed = 3
)";

inline constexpr std::array<Fixture, 4> kFixtures = {{
    {"fig2_k7", kFig2K7},
    {"table1_defaults", kTable1Defaults},
    {"k25_fig1", kK25Fig1},
    {"infeasible_demo", kInfeasibleDemo},
}};

}  // namespace detail

[[nodiscard]] inline std::vector<std::string> list_fixtures() {
    std::vector<std::string> names;
    for (const auto& f : detail::kFixtures) names.emplace_back(f.name);
    return names;
}

[[nodiscard]] inline bool is_fixture(std::string_view name) {
    for (const auto& f : detail::kFixtures)
        if (f.name == name) return true;
    return false;
}

[[nodiscard]] inline std::string_view fixture_text(std::string_view name) {
    for (const auto& f : detail::kFixtures)
        if (f.name == name) return f.text;
    throw ValidationError("fixture", "unknown fixture '" + std::string(name) + "'");
}

[[nodiscard]] inline Scenario load_fixture(std::string_view name) { return parse_scenario(fixture_text(name)); }

}  // namespace vpr
