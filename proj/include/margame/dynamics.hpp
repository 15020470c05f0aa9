#pragma once

#include <cstddef>
#include <vector>

#include "margame/game.hpp"

namespace margame {

struct PolicyVector {
  std::size_t state = 0;
  std::vector<double> probabilities;
};

/// One PolicyVector per non-terminal state.
using Policy = std::vector<PolicyVector>;

void check_policy_vector(const PolicyVector& p, std::size_t expected_size);

/// Joint transition table of one non-terminal state. The next state is either
/// q (stay) or q + 1 (advance), so only the advance mass is stored.
struct StateTransitions {
  std::size_t state = 0;
  Matrix advance;  // [attacker action][defender action]

  double stay(std::size_t a, std::size_t d) const { return 1.0 - advance(a, d); }
};

struct TransitionModel {
  std::vector<StateTransitions> states;  // non-terminal states only
};

struct NextStateDistribution {
  std::size_t stay_state = 0;
  double stay = 1.0;
  std::size_t advance_state = 0;
  double advance = 0.0;
};

/// 1 - prod(1 - e) over the exploit actions of the state.
double attack_access_probability(const GameState& state, const AttackGraph& graph);

/// Exploit z gets e(z) / sum(e); NoAttack gets 0.
PolicyVector attacker_choice_probabilities(const GameState& state, const AttackGraph& graph);

/// tau(z) = p(z) e(z) for exploits; NoAttack gets the remaining mass.
double attacker_transition_factor(const GameState& state, const AttackerAction& action,
                                  const AttackGraph& graph);

/// Uniform 1 / |defender actions|.
double defender_transition_factor(const GameState& state);

NextStateDistribution joint_transition(const GameState& state, const AttackerAction& attack,
                                       const DefenderAction& defense, const AttackGraph& graph,
                                       const AttackPath& path);

TransitionModel build_transition_model(const MarkovGame& game);

/// Exploitability-weighted attacker policy for every non-terminal state.
Policy default_attacker_policy(const MarkovGame& game);

/// Marginal state-to-state chain: entry [q][q'] is the probability of moving
/// from q to q' under the two policies. The terminal row is absorbing.
Matrix chain_probabilities(const MarkovGame& game, const TransitionModel& transitions,
                           const Policy& attacker, const Policy& defender);
Matrix chain_probabilities(const MarkovGame& game);  // default attacker, URS defender

}  // namespace margame
