#include "margame/game.hpp"

#include <algorithm>

#include "margame/error.hpp"

namespace margame {

std::string AttackerAction::label() const { return target ? "E(" + *target + ")" : "no-att"; }

std::string DefenderAction::label() const { return host ? "Def-" + *host : "no-def"; }

std::vector<GameState> derive_states(const AttackGraph& graph, const AttackPath& sap) {
  if (!graph.is_path(sap))
    throw Error(ErrorKind::InvalidArgument, "attack path is not a path of the graph");

  std::vector<GameState> states;
  states.reserve(sap.nodes.size());
  for (std::size_t q = 0; q < sap.nodes.size(); ++q) {
    GameState s;
    s.index = q;
    s.current_node = sap.nodes[q];
    s.terminal = q + 1 == sap.nodes.size();
    if (!s.terminal) {
      s.attacker_actions.push_back(AttackerAction::none());
      s.defender_actions.push_back(DefenderAction::none());
      for (const auto& v : graph.successors(s.current_node)) {
        s.attacker_actions.push_back(AttackerAction::exploit(v));
        auto defend = DefenderAction::defend(graph.node(v).host);
        if (std::find(s.defender_actions.begin(), s.defender_actions.end(), defend) ==
            s.defender_actions.end())
          s.defender_actions.push_back(std::move(defend));
      }
    }
    states.push_back(std::move(s));
  }
  return states;
}

PayoffMatrix build_payoff(const GameState& state, const AttackGraph& graph, double defense_cost) {
  if (state.terminal) throw Error(ErrorKind::InvalidArgument, "terminal state has no payoff");
  if (!(defense_cost >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "defense cost must be non-negative");

  PayoffMatrix m;
  m.state = state.index;
  m.defense_cost = defense_cost;
  m.attacker_reward = Matrix(state.attacker_actions.size(), state.defender_actions.size());
  for (std::size_t a = 0; a < state.attacker_actions.size(); ++a) {
    const auto& attack = state.attacker_actions[a];
    for (std::size_t d = 0; d < state.defender_actions.size(); ++d) {
      const auto& defense = state.defender_actions[d];
      double reward = 0.0;
      if (attack.is_none()) {
        reward = defense.is_none() ? 0.0 : defense_cost;
      } else {
        const Node& target = graph.node(*attack.target);
        const double impact = target.vuln.impact;
        if (defense.is_none())
          reward = impact;
        else if (*defense.host == target.host)
          reward = -(impact - defense_cost);
        else
          reward = impact + defense_cost;
      }
      m.attacker_reward(a, d) = reward;
    }
  }
  return m;
}

MarkovGame build_markov_game(const AttackGraph& graph, double defense_cost, double discount) {
  return build_markov_game(graph, shortest_attack_path(graph), defense_cost, discount);
}

MarkovGame build_markov_game(const AttackGraph& graph, const AttackPath& path, double defense_cost,
                             double discount) {
  if (!(discount >= 0.0 && discount < 1.0))
    throw Error(ErrorKind::InvalidArgument, "discount out of range [0, 1)");
  MarkovGame game{graph, path, derive_states(graph, path), {}, discount, defense_cost};
  for (const auto& s : game.states)
    if (!s.terminal) game.payoffs.push_back(build_payoff(s, graph, defense_cost));
  return game;
}

}  // namespace margame
