#include "margame/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "margame/error.hpp"

namespace margame {

namespace {

void require_live(const GameState& state) {
  if (state.terminal) throw Error(ErrorKind::InvalidArgument, "terminal state has no actions");
}

double exploit_mass(const GameState& state, const AttackGraph& graph) {
  double total = 0.0;
  for (const auto& a : state.attacker_actions)
    if (!a.is_none()) total += graph.exploitability(*a.target);
  return total;
}

}  // namespace

void check_policy_vector(const PolicyVector& p, std::size_t expected_size) {
  if (p.probabilities.size() != expected_size)
    throw Error(ErrorKind::InvalidArgument,
                "policy dimension mismatch at state " + std::to_string(p.state));
  double sum = 0.0;
  for (double x : p.probabilities) {
    if (!(x >= 0.0 && x <= 1.0))
      throw Error(ErrorKind::InvalidArgument,
                  "policy probability outside [0,1] at state " + std::to_string(p.state));
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error(ErrorKind::InvalidArgument,
                "policy does not sum to 1 at state " + std::to_string(p.state));
}

double attack_access_probability(const GameState& state, const AttackGraph& graph) {
  require_live(state);
  double all_fail = 1.0;
  for (const auto& a : state.attacker_actions)
    if (!a.is_none()) all_fail *= 1.0 - graph.exploitability(*a.target);
  return 1.0 - all_fail;
}

PolicyVector attacker_choice_probabilities(const GameState& state, const AttackGraph& graph) {
  require_live(state);
  const double total = exploit_mass(state, graph);
  if (!(total > 0.0))
    throw Error(ErrorKind::InvalidArgument, "state has no exploitable action");
  PolicyVector p{state.index, std::vector<double>(state.attacker_actions.size(), 0.0)};
  for (std::size_t i = 0; i < state.attacker_actions.size(); ++i) {
    const auto& a = state.attacker_actions[i];
    if (!a.is_none()) p.probabilities[i] = graph.exploitability(*a.target) / total;
  }
  return p;
}

double attacker_transition_factor(const GameState& state, const AttackerAction& action,
                                  const AttackGraph& graph) {
  require_live(state);
  if (std::find(state.attacker_actions.begin(), state.attacker_actions.end(), action) ==
      state.attacker_actions.end())
    throw Error(ErrorKind::InvalidArgument, "action " + action.label() + " not in state");
  const auto choice = attacker_choice_probabilities(state, graph);
  auto factor = [&](std::size_t i) {
    return choice.probabilities[i] * graph.exploitability(*state.attacker_actions[i].target);
  };
  if (!action.is_none()) {
    for (std::size_t i = 0; i < state.attacker_actions.size(); ++i)
      if (state.attacker_actions[i] == action) return factor(i);
  }
  double exploit_total = 0.0;
  for (std::size_t i = 0; i < state.attacker_actions.size(); ++i)
    if (!state.attacker_actions[i].is_none()) exploit_total += factor(i);
  return 1.0 - exploit_total;
}

double defender_transition_factor(const GameState& state) {
  require_live(state);
  return 1.0 / static_cast<double>(state.defender_actions.size());
}

NextStateDistribution joint_transition(const GameState& state, const AttackerAction& attack,
                                       const DefenderAction& defense, const AttackGraph& graph,
                                       const AttackPath& path) {
  require_live(state);
  const auto& aa = state.attacker_actions;
  const auto& da = state.defender_actions;
  if (std::find(aa.begin(), aa.end(), attack) == aa.end() ||
      std::find(da.begin(), da.end(), defense) == da.end())
    throw Error(ErrorKind::InvalidArgument, "invalid action pair for state " +
                                                std::to_string(state.index));

  NextStateDistribution next{state.index, 1.0, state.index + 1, 0.0};
  if (attack.is_none()) return next;
  const std::string& successor = path.nodes.at(state.index + 1);
  if (*attack.target != successor) return next;
  const Node& target = graph.node(successor);
  if (!defense.is_none() && *defense.host == target.host) return next;
  next.advance = target.vuln.exploitability;
  next.stay = 1.0 - next.advance;
  return next;
}

TransitionModel build_transition_model(const MarkovGame& game) {
  TransitionModel model;
  for (const auto& s : game.states) {
    if (s.terminal) continue;
    StateTransitions t{s.index, Matrix(s.attacker_actions.size(), s.defender_actions.size())};
    for (std::size_t a = 0; a < s.attacker_actions.size(); ++a)
      for (std::size_t d = 0; d < s.defender_actions.size(); ++d)
        t.advance(a, d) = joint_transition(s, s.attacker_actions[a], s.defender_actions[d],
                                           game.graph, game.sap)
                              .advance;
    model.states.push_back(std::move(t));
  }
  return model;
}

Policy default_attacker_policy(const MarkovGame& game) {
  Policy policy;
  for (const auto& s : game.states)
    if (!s.terminal) policy.push_back(attacker_choice_probabilities(s, game.graph));
  return policy;
}

Matrix chain_probabilities(const MarkovGame& game, const TransitionModel& transitions,
                           const Policy& attacker, const Policy& defender) {
  const std::size_t n = game.state_count();
  const std::size_t live = n - 1;
  if (attacker.size() != live || defender.size() != live || transitions.states.size() != live)
    throw Error(ErrorKind::InvalidArgument, "policy dimension mismatch");

  Matrix chain(n, n, 0.0);
  for (std::size_t q = 0; q < live; ++q) {
    const auto& s = game.states[q];
    check_policy_vector(attacker[q], s.attacker_actions.size());
    check_policy_vector(defender[q], s.defender_actions.size());
    double advance = 0.0;
    for (std::size_t a = 0; a < s.attacker_actions.size(); ++a)
      for (std::size_t d = 0; d < s.defender_actions.size(); ++d)
        advance += attacker[q].probabilities[a] * defender[q].probabilities[d] *
                   transitions.states[q].advance(a, d);
    chain(q, q + 1) = advance;
    chain(q, q) = 1.0 - advance;
  }
  chain(n - 1, n - 1) = 1.0;
  return chain;
}

Matrix chain_probabilities(const MarkovGame& game) {
  Policy defender;
  for (const auto& s : game.states) {
    if (s.terminal) continue;
    const double u = defender_transition_factor(s);
    defender.push_back({s.index, std::vector<double>(s.defender_actions.size(), u)});
  }
  return chain_probabilities(game, build_transition_model(game), default_attacker_policy(game),
                             defender);
}

}  // namespace margame
