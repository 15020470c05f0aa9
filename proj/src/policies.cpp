#include "margame/policies.hpp"

#include <string>

#include "margame/error.hpp"

namespace margame {

namespace {

Policy first_action(const MarkovGame& game, Player player) {
  Policy policy;
  for (const auto& s : game.states) {
    if (s.terminal) continue;
    const std::size_t k =
        player == Player::Attacker ? s.attacker_actions.size() : s.defender_actions.size();
    std::vector<double> p(k, 0.0);
    p[0] = 1.0;
    policy.push_back({s.index, std::move(p)});
  }
  return policy;
}

Policy always_exploit_path(const MarkovGame& game) {
  Policy policy;
  for (const auto& s : game.states) {
    if (s.terminal) continue;
    std::vector<double> p(s.attacker_actions.size(), 0.0);
    for (std::size_t a = 0; a < p.size(); ++a)
      if (s.attacker_actions[a] == AttackerAction::exploit(game.next_on_path(s.index))) p[a] = 1.0;
    policy.push_back({s.index, std::move(p)});
  }
  return policy;
}

}  // namespace

bool policy_needs_solution(std::string_view name) { return name == "maxmin" || name == "greedy"; }

NamedPolicy policy_by_name(std::string_view name, const MarkovGame& game, Player player,
                           const ShapleyResult* solution) {
  const std::string n(name);
  if (policy_needs_solution(name) && solution == nullptr)
    throw Error(ErrorKind::InvalidArgument, "policy " + n + " requires a solved game");
  if (name == "urs") return {n, urs_policy(game, player)};
  if (name == "passive") return {n, first_action(game, player)};
  if (name == "maxmin") return {n, maxmin_policy(*solution, player)};
  if (player == Player::Attacker) {
    if (name == "exploit-weighted") return {n, default_attacker_policy(game)};
    if (name == "always-exploit") return {n, always_exploit_path(game)};
    if (name == "greedy")
      return {n, greedy_attacker_policy(solution->q, urs_policy(game, Player::Defender))};
  }
  throw Error(ErrorKind::InvalidArgument, "unknown " +
                                              std::string(player == Player::Attacker
                                                              ? "attacker"
                                                              : "defender") +
                                              " policy: " + n);
}

}  // namespace margame
