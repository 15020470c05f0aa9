#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "margame/error.hpp"
#include "margame/game.hpp"

using namespace margame;

namespace {

std::vector<std::string> attacker_labels(const GameState& s) {
  std::vector<std::string> out;
  for (const auto& a : s.attacker_actions) out.push_back(a.label());
  return out;
}

std::vector<std::string> defender_labels(const GameState& s) {
  std::vector<std::string> out;
  for (const auto& d : s.defender_actions) out.push_back(d.label());
  return out;
}

}  // namespace

TEST_CASE("states along the cloud10 SAP") {
  const auto& g = cloud10();
  const auto states = derive_states(g, shortest_attack_path(g));
  REQUIRE(states.size() == 5);
  CHECK(states[0].current_node == "A");
  CHECK(attacker_labels(states[0]) == std::vector<std::string>{"no-att", "E(vm1)", "E(vm2)"});
  CHECK(defender_labels(states[0]) == std::vector<std::string>{"no-def", "Def-h1", "Def-h2"});
  CHECK(attacker_labels(states[1]) == std::vector<std::string>{"no-att", "E(vm4)", "E(vm5)"});
  CHECK(defender_labels(states[1]) == std::vector<std::string>{"no-def", "Def-h3", "Def-h2"});
  CHECK(attacker_labels(states[3]) == std::vector<std::string>{"no-att", "E(vm6)", "E(DB)"});
  CHECK(defender_labels(states[3]) == std::vector<std::string>{"no-def", "Def-h3", "Def-h5"});
  CHECK(states[4].terminal);
  CHECK(states[4].attacker_actions.empty());
  CHECK(states[4].defender_actions.empty());
  for (const auto& s : states) {
    CHECK(s.attacker_actions.size() <= 3);
    CHECK(s.defender_actions.size() <= 3);
    if (!s.terminal) {
      CHECK(s.attacker_actions.front().is_none());
      CHECK(s.defender_actions.front().is_none());
    }
  }
}

TEST_CASE("states of the single-edge graph") {
  const auto g = single_edge();
  const auto states = derive_states(g, shortest_attack_path(g));
  REQUIRE(states.size() == 2);
  CHECK(attacker_labels(states[0]) == std::vector<std::string>{"no-att", "E(T)"});
  CHECK(defender_labels(states[0]) == std::vector<std::string>{"no-def", "Def-h1"});
  CHECK(states[1].terminal);
}

TEST_CASE("derive_states rejects a non-path") {
  AttackPath bogus{{"A", "vm3", "DB"}};
  CHECK_THROWS_AS(derive_states(cloud10(), bogus), Error);
}

TEST_CASE("payoff matrices reproduce the published table") {
  const auto& g = cloud10();
  const auto states = derive_states(g, shortest_attack_path(g));
  CHECK(build_payoff(states[0], g, 2).attacker_reward ==
        Matrix{{0, 2, 2}, {10, -8, 12}, {8, 10, -6}});
  CHECK(build_payoff(states[1], g, 2).attacker_reward ==
        Matrix{{0, 2, 2}, {8, -6, 10}, {9, 11, -7}});
  CHECK(build_payoff(states[2], g, 2).attacker_reward ==
        Matrix{{0, 2, 2}, {10, -8, 12}, {10, 12, -8}});
  CHECK(build_payoff(states[3], g, 2).attacker_reward ==
        Matrix{{0, 2, 2}, {9, -7, 11}, {10, 12, -8}});
}

TEST_CASE("payoff edge cases") {
  const auto& g = cloud10();
  const auto states = derive_states(g, shortest_attack_path(g));
  const auto free_defense = build_payoff(states[0], g, 0.0);
  CHECK(free_defense.attacker_reward(1, 1) == -10.0);  // E(vm1) vs Def-h1
  CHECK(free_defense.attacker_reward(2, 2) == -8.0);
  for (std::size_t d = 0; d < 3; ++d) CHECK(free_defense.attacker_reward(0, d) == 0.0);

  CHECK_THROWS_AS(build_payoff(states[4], g, 2), Error);
  CHECK_THROWS_AS(build_payoff(states[0], g, -1), Error);
}

TEST_CASE("markov game construction") {
  const auto game = build_markov_game(cloud10(), 2, 0.9);
  CHECK(game.state_count() == 5);
  CHECK(game.payoffs.size() == 4);
  CHECK(game.sap.hop_count() + 1 == game.state_count());
  for (std::size_t q = 0; q + 1 < game.state_count(); ++q)
    CHECK(game.next_on_path(q) == game.sap.nodes[q + 1]);

  const auto tiny = build_markov_game(single_edge(), 2, 0.0);
  CHECK(tiny.state_count() == 2);
  CHECK(tiny.payoffs.size() == 1);

  CHECK_THROWS_AS(build_markov_game(cloud10(), 2, 1.0), Error);
  CHECK_THROWS_AS(build_markov_game(cloud10(), 2, -0.1), Error);
}

TEST_CASE("property: zero sum, monotone structure, determinism") {
  const auto game = build_markov_game(cloud10(), 2, 0.9);
  const auto again = build_markov_game(cloud10(), 2, 0.9);
  CHECK(game.states == again.states);
  CHECK(game.payoffs == again.payoffs);

  for (const auto& m : game.payoffs) {
    const auto& s = game.states[m.state];
    for (std::size_t a = 0; a < s.attacker_actions.size(); ++a)
      for (std::size_t d = 0; d < s.defender_actions.size(); ++d)
        CHECK(m.attacker_reward(a, d) + m.defender_reward(a, d) == 0.0);

    for (std::size_t a = 1; a < s.attacker_actions.size(); ++a) {
      const auto& target = game.graph.node(*s.attacker_actions[a].target);
      REQUIRE(m.defense_cost < target.vuln.impact);
      for (std::size_t d = 1; d < s.defender_actions.size(); ++d) {
        const double none = m.attacker_reward(a, 0);
        const double here = m.attacker_reward(a, d);
        if (*s.defender_actions[d].host == target.host) CHECK(here < none);
        else CHECK(none < here);
      }
      const auto rows = std::count(s.attacker_actions.begin(), s.attacker_actions.end(),
                                   s.attacker_actions[a]);
      CHECK(rows == 1);
    }
  }
}
