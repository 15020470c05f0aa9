#pragma once

#include <string_view>

#include "margame/simulator.hpp"
#include "margame/solver.hpp"

namespace margame {

/// Fixed policies used by the simulator and CLI, looked up by name.
/// "passive" always picks NoAttack/NoDefense; "always-exploit" always
/// exploits the next node on the attack path. Solver-derived policies
/// ("maxmin", "greedy") need `solution`.
NamedPolicy policy_by_name(std::string_view name, const MarkovGame& game, Player player,
                           const ShapleyResult* solution);

bool policy_needs_solution(std::string_view name);

}  // namespace margame
