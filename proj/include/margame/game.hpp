#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "margame/attack_graph.hpp"
#include "margame/matrix.hpp"

namespace margame {

inline constexpr double kDefaultDefenseCost = 2.0;
inline constexpr double kDefaultDiscount = 0.9;

struct AttackerAction {
  std::optional<std::string> target;  // nullopt = no attack

  static AttackerAction none() { return {}; }
  static AttackerAction exploit(std::string node) { return {std::move(node)}; }
  bool is_none() const noexcept { return !target.has_value(); }
  std::string label() const;
  bool operator==(const AttackerAction&) const = default;
};

struct DefenderAction {
  std::optional<std::string> host;  // nullopt = no defense

  static DefenderAction none() { return {}; }
  static DefenderAction defend(std::string h) { return {std::move(h)}; }
  bool is_none() const noexcept { return !host.has_value(); }
  std::string label() const;
  bool operator==(const DefenderAction&) const = default;
};

struct GameState {
  std::size_t index = 0;
  std::string current_node;
  std::vector<AttackerAction> attacker_actions;
  std::vector<DefenderAction> defender_actions;
  bool terminal = false;

  bool operator==(const GameState&) const = default;
};

/// Attacker reward per joint action; the defender receives the negation.
struct PayoffMatrix {
  std::size_t state = 0;
  Matrix attacker_reward;
  double defense_cost = kDefaultDefenseCost;

  double defender_reward(std::size_t a, std::size_t d) const { return -attacker_reward(a, d); }
  bool operator==(const PayoffMatrix&) const = default;
};

struct MarkovGame {
  AttackGraph graph;
  AttackPath sap;
  std::vector<GameState> states;
  std::vector<PayoffMatrix> payoffs;  // one per non-terminal state, same index
  double discount = kDefaultDiscount;
  double defense_cost = kDefaultDefenseCost;

  std::size_t state_count() const noexcept { return states.size(); }
  std::size_t terminal_index() const noexcept { return states.size() - 1; }
  /// SAP node the attacker must take to leave state q.
  const std::string& next_on_path(std::size_t q) const { return sap.nodes.at(q + 1); }
};

/// One state per node of `sap`. Non-terminal states get NoAttack plus one
/// exploit per successor of the foothold, and NoDefense plus one defend
/// action per distinct host among those successors.
std::vector<GameState> derive_states(const AttackGraph& graph, const AttackPath& sap);

PayoffMatrix build_payoff(const GameState& state, const AttackGraph& graph, double defense_cost);

MarkovGame build_markov_game(const AttackGraph& graph, double defense_cost = kDefaultDefenseCost,
                             double discount = kDefaultDiscount);
/// Same, along an explicitly supplied attack path (e.g. a predicted one).
MarkovGame build_markov_game(const AttackGraph& graph, const AttackPath& path, double defense_cost,
                             double discount);

}  // namespace margame
