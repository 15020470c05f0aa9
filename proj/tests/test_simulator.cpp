#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "fixtures.hpp"
#include "margame/dynamics.hpp"
#include "margame/error.hpp"
#include "margame/policies.hpp"
#include "margame/simulator.hpp"
#include "margame/solver.hpp"
#include "oracles.hpp"

using namespace margame;

namespace {

struct Setup {
  MarkovGame game;
  TransitionModel transitions;
};

const Setup& cloud() {
  static const Setup s = [] {
    MarkovGame g = build_markov_game(cloud10(), 2, 0.9);
    TransitionModel t = build_transition_model(g);
    return Setup{std::move(g), std::move(t)};
  }();
  return s;
}

NamedPolicy named(std::string_view name, const MarkovGame& g, Player p,
                  const ShapleyResult* solution = nullptr) {
  return policy_by_name(name, g, p, solution);
}

// Expected discounted attacker return of fixed policies: solve (I - lambda P) V = r
// with the advance probabilities read off the graph.
std::vector<double> evaluate(const MarkovGame& game, const Policy& x, const Policy& y) {
  const std::size_t n = game.state_count();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n, 0.0);
  a[n - 1][n - 1] = 1.0;
  for (std::size_t q = 0; q + 1 < n; ++q) {
    const auto& s = game.states[q];
    const Node& succ = game.graph.node(game.sap.nodes[q + 1]);
    double advance = 0.0;
    for (std::size_t i = 0; i < s.attacker_actions.size(); ++i)
      for (std::size_t j = 0; j < s.defender_actions.size(); ++j) {
        const double w = x[q].probabilities[i] * y[q].probabilities[j];
        b[q] += w * game.payoffs[q].attacker_reward(i, j);
        const bool hits = s.attacker_actions[i].target == succ.id;
        const bool blocked = s.defender_actions[j].host == succ.host;
        if (hits && !blocked) advance += w * succ.vuln.exploitability;
      }
    a[q][q] = 1.0 - game.discount * (1.0 - advance);
    a[q][q + 1] = -game.discount * advance;
  }
  return *oracle::solve_linear(a, b);
}

void check_trace(const MarkovGame& g, const EpisodeTrace& t) {
  double ret = 0.0;
  double weight = 1.0;
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const auto& s = t.steps[k];
    CHECK(s.attacker_reward == g.payoffs[s.state].attacker_reward(s.attacker_action, s.defender_action));
    CHECK((s.next_state == s.state || s.next_state == s.state + 1));
    if (k > 0) CHECK(s.state == t.steps[k - 1].next_state);
    ret += weight * s.attacker_reward;
    weight *= g.discount;
  }
  CHECK(std::abs(t.discounted_attacker_return - ret) <= 1e-12);
  CHECK(t.discounted_attacker_return + t.discounted_defender_return == 0.0);
}

}  // namespace

TEST_CASE("passive policies never move and earn nothing") {
  const auto& [g, t] = cloud();
  const auto a = named("passive", g, Player::Attacker);
  const auto d = named("passive", g, Player::Defender);
  const auto trace = run_episode(g, t, a.policy, d.policy, 7, 50);
  CHECK(trace.length() == 50);
  CHECK_FALSE(trace.reached_target);
  for (const auto& s : trace.steps) {
    CHECK(s.attacker_reward == 0.0);
    CHECK(s.state == 0);
    CHECK(s.next_state == 0);
    CHECK_FALSE(s.success);
  }
  CHECK(trace.discounted_attacker_return == 0.0);
}

TEST_CASE("a certain exploit finishes in one step") {
  const MarkovGame g = build_markov_game(single_edge(1.0, 7.0), 2, 0.9);
  const auto t = build_transition_model(g);
  const auto a = named("always-exploit", g, Player::Attacker);
  const auto d = named("passive", g, Player::Defender);
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, ~0ULL}) {
    const auto trace = run_episode(g, t, a.policy, d.policy, seed);
    REQUIRE(trace.length() == 1);
    CHECK(trace.steps[0].attacker_reward == 7.0);
    CHECK(trace.steps[0].success);
    CHECK(trace.reached_target);
    CHECK(trace.discounted_attacker_return == 7.0);
  }
}

TEST_CASE("episodes are reproducible and well formed") {
  const auto& [g, t] = cloud();
  const auto a = named("urs", g, Player::Attacker);
  const auto d = named("urs", g, Player::Defender);
  const auto first = run_episode(g, t, a.policy, d.policy, 42);
  CHECK(first == run_episode(g, t, a.policy, d.policy, 42));
  CHECK(first.seed == 42);
  bool differs = false;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto trace = run_episode(g, t, a.policy, d.policy, seed);
    check_trace(g, trace);
    CHECK((trace.reached_target || trace.length() == kDefaultMaxSteps));
    differs = differs || !(trace == first);
  }
  CHECK(differs);
}

TEST_CASE("exploit outcomes follow the exploitability") {
  // The success flag is only ever set for exploits and matches Bernoulli(e).
  const MarkovGame g = build_markov_game(single_edge(0.3, 7.0), 2, 0.9);
  const auto t = build_transition_model(g);
  const auto a = named("always-exploit", g, Player::Attacker);
  const auto d = named("passive", g, Player::Defender);
  double wins = 0.0;
  const int n = 20000;
  for (int seed = 0; seed < n; ++seed) {
    const auto trace = run_episode(g, t, a.policy, d.policy, static_cast<std::uint64_t>(seed), 1);
    wins += trace.steps[0].success ? 1.0 : 0.0;
    CHECK(trace.steps[0].success == (trace.steps[0].next_state == 1));
  }
  const double se = std::sqrt(0.3 * 0.7 / n);
  CHECK(std::abs(wins / n - 0.3) <= 3 * se);
}

TEST_CASE("run_episode rejects bad input") {
  const auto& [g, t] = cloud();
  const auto a = named("urs", g, Player::Attacker);
  const auto d = named("urs", g, Player::Defender);
  CHECK_THROWS_AS(run_episode(g, t, a.policy, d.policy, 1, 0), Error);
  Policy short_policy = a.policy;
  short_policy.pop_back();
  CHECK_THROWS_AS(run_episode(g, t, short_policy, d.policy, 1), Error);
  // Attacker vectors in the defender slot: wrong widths in some state.
  Policy swapped = a.policy;
  swapped[1].probabilities.push_back(0.0);
  CHECK_THROWS_AS(run_episode(g, t, a.policy, swapped, 1), Error);
  CHECK_THROWS_AS(run_batch(g, t, a, d, 0, 1), Error);
}

TEST_CASE("single-episode batch equals the episode") {
  const auto& [g, t] = cloud();
  const auto a = named("exploit-weighted", g, Player::Attacker);
  const auto d = named("urs", g, Player::Defender);
  const auto trace = run_episode(g, t, a.policy, d.policy, 5);
  const auto r = run_batch(g, t, a, d, 1, 5);
  CHECK(r.episode_count == 1);
  CHECK(r.mean_attacker_return == trace.discounted_attacker_return);
  CHECK(r.mean_defender_return == trace.discounted_defender_return);
  CHECK(r.mean_episode_length == static_cast<double>(trace.length()));
  CHECK(r.target_reach_rate == (trace.reached_target ? 1.0 : 0.0));
  CHECK(r.standard_error == 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < g.state_count(); ++i)
    for (std::size_t j = 0; j < g.state_count(); ++j) total += r.transition_counts(i, j);
  CHECK(total == static_cast<double>(trace.length()));
  CHECK(r.attacker_policy == "exploit-weighted");
  CHECK(r.defender_policy == "urs");
  CHECK(r.base_seed == 5);
  CHECK(r.discount == 0.9);
  CHECK(r.defense_cost == 2.0);
}

TEST_CASE("batches are deterministic and thread independent") {
  const auto& [g, t] = cloud();
  const auto a = named("exploit-weighted", g, Player::Attacker);
  const auto d = named("urs", g, Player::Defender);
  const auto one = run_batch(g, t, a, d, 3001, 11, {kDefaultMaxSteps, 1});
  CHECK(one == run_batch(g, t, a, d, 3001, 11, {kDefaultMaxSteps, 1}));
  for (std::size_t threads : {2, 3, 8, 64}) {
    const auto many = run_batch(g, t, a, d, 3001, 11, {kDefaultMaxSteps, threads});
    CHECK(many == one);
  }
  CHECK_FALSE(run_batch(g, t, a, d, 3001, 12, {kDefaultMaxSteps, 1}) == one);
}

TEST_CASE("MARGAME_THREADS caps the automatic thread count") {
  ::setenv("MARGAME_THREADS", "1", 1);
  CHECK(resolve_thread_count(0) == 1);
  CHECK(resolve_thread_count(5) == 5);
  ::unsetenv("MARGAME_THREADS");
  CHECK(resolve_thread_count(0) >= 1);
}

TEST_CASE("empirical chain matches the analytic chain") {
  const auto& [g, t] = cloud();
  const auto a = named("exploit-weighted", g, Player::Attacker);
  const auto d = named("urs", g, Player::Defender);
  const auto r = run_batch(g, t, a, d, 100000, 2024);
  const Matrix analytic = chain_probabilities(g);
  const Matrix empirical = r.empirical_chain();
  const auto visits = r.visits();
  for (std::size_t q = 0; q + 1 < g.state_count(); ++q) {
    REQUIRE(visits[q] > 0);
    double row = 0.0;
    for (std::size_t j = 0; j < g.state_count(); ++j) {
      row += empirical(q, j);
      const double p = analytic(q, j);
      const double se = std::sqrt(p * (1 - p) / visits[q]);
      CHECK(std::abs(empirical(q, j) - p) <= 3 * se + 1e-15);
    }
    CHECK(std::abs(row - 1.0) <= 1e-9);
  }
  CHECK(r.mean_attacker_return == -r.mean_defender_return);
}

TEST_CASE("Monte-Carlo returns match policy evaluation") {
  const auto& [g, t] = cloud();
  const auto solution = shapley_value_iteration(g, t);
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"exploit-weighted", "urs"}, {"urs", "urs"}, {"always-exploit", "passive"},
      {"maxmin", "maxmin"}, {"greedy", "maxmin"}};
  for (const auto& [an, dn] : pairs) {
    CAPTURE(an);
    CAPTURE(dn);
    const auto a = named(an, g, Player::Attacker, &solution);
    const auto d = named(dn, g, Player::Defender, &solution);
    const auto r = run_batch(g, t, a, d, 40000, 77);
    const double expected = evaluate(g, a.policy, d.policy)[0];
    REQUIRE(r.standard_error > 0);
    CHECK(std::abs(r.mean_attacker_return - expected) <= 3 * r.standard_error);
  }
  // Both sides playing maxmin earn the game value in expectation.
  const auto x = maxmin_policy(solution, Player::Attacker);
  const auto y = maxmin_policy(solution, Player::Defender);
  CHECK(evaluate(g, x, y)[0] == doctest::Approx(solution.values[0]).epsilon(1e-6));
}

TEST_CASE("comparison ordering and identical rows") {
  const auto& [g, t] = cloud();
  const auto solution = shapley_value_iteration(g, t);
  const auto greedy = named("greedy", g, Player::Attacker, &solution);
  const auto rows = compare_strategies(
      g, t, {named("urs", g, Player::Defender), named("maxmin", g, Player::Defender, &solution)},
      greedy, 20000, 9);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].mean_attacker_return <= rows[1].mean_attacker_return);
  CHECK(rows[0].defender_policy == "maxmin");

  NamedPolicy u1 = named("urs", g, Player::Defender);
  NamedPolicy u2 = u1;
  u2.name = "uniform";
  const auto same = compare_strategies(g, t, {u1, u2}, greedy, 5000, 9);
  CHECK(same[0].mean_attacker_return == same[1].mean_attacker_return);
  CHECK(same[0].transition_counts == same[1].transition_counts);
  CHECK(same[0].defender_policy == "urs");  // stable order on ties

  const auto exploit = named("always-exploit", g, Player::Attacker);
  const auto open = compare_strategies(
      g, t, {named("urs", g, Player::Defender), named("passive", g, Player::Defender)}, exploit,
      20000, 9);
  CHECK(open[1].defender_policy == "passive");
  CHECK(open[1].mean_attacker_return > open[0].mean_attacker_return);

  CHECK_THROWS_AS(compare_strategies(g, t, {u1}, greedy, 10, 1), Error);
}
