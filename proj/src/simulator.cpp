#include "margame/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "margame/error.hpp"
#include "margame/rng.hpp"

namespace margame {

namespace {

std::size_t sample(const std::vector<double>& probabilities, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    cumulative += probabilities[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  return last_positive;  // rounding left u above the final cumulative sum
}

void check_policies(const MarkovGame& game, const TransitionModel& transitions,
                    const Policy& attacker, const Policy& defender) {
  const std::size_t live = game.state_count() - 1;
  if (attacker.size() != live || defender.size() != live || transitions.states.size() != live)
    throw Error(ErrorKind::InvalidArgument, "policy dimension mismatch");
  for (std::size_t q = 0; q < live; ++q) {
    check_policy_vector(attacker[q], game.states[q].attacker_actions.size());
    check_policy_vector(defender[q], game.states[q].defender_actions.size());
  }
}

EpisodeTrace simulate(const MarkovGame& game, const TransitionModel& transitions,
                      const Policy& attacker, const Policy& defender, std::uint64_t seed,
                      std::size_t max_steps) {
  const CounterRng rng(seed);
  EpisodeTrace trace;
  trace.seed = seed;
  std::size_t state = 0;
  double weight = 1.0;
  for (std::size_t t = 0; t < max_steps && state != game.terminal_index(); ++t) {
    const GameState& s = game.states[state];
    EpisodeStep step;
    step.state = state;
    step.attacker_action =
        sample(attacker[state].probabilities,
               rng.uniform(t, static_cast<std::uint64_t>(DrawStream::Attacker)));
    step.defender_action =
        sample(defender[state].probabilities,
               rng.uniform(t, static_cast<std::uint64_t>(DrawStream::Defender)));
    step.attacker_reward =
        game.payoffs[state].attacker_reward(step.attacker_action, step.defender_action);

    // One exploit draw decides both the Bernoulli(e) outcome and the move, so
    // an undefended on-path success is exactly an advance.
    const double u = rng.uniform(t, static_cast<std::uint64_t>(DrawStream::Exploit));
    const auto& attack = s.attacker_actions[step.attacker_action];
    step.success = !attack.is_none() && u < game.graph.exploitability(*attack.target);
    const double advance =
        transitions.states[state].advance(step.attacker_action, step.defender_action);
    step.next_state = u < advance ? state + 1 : state;

    trace.discounted_attacker_return += weight * step.attacker_reward;
    trace.discounted_defender_return += weight * -step.attacker_reward;
    weight *= game.discount;
    state = step.next_state;
    trace.steps.push_back(step);
  }
  trace.reached_target = state == game.terminal_index();
  return trace;
}

}  // namespace

Matrix SimulationReport::empirical_chain() const {
  Matrix chain(transition_counts.rows(), transition_counts.cols(), 0.0);
  for (std::size_t i = 0; i < chain.rows(); ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < chain.cols(); ++j) total += transition_counts(i, j);
    if (total == 0.0) continue;
    for (std::size_t j = 0; j < chain.cols(); ++j) chain(i, j) = transition_counts(i, j) / total;
  }
  return chain;
}

std::vector<double> SimulationReport::visits() const {
  std::vector<double> v(transition_counts.rows(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < transition_counts.cols(); ++j) v[i] += transition_counts(i, j);
  return v;
}

EpisodeTrace run_episode(const MarkovGame& game, const TransitionModel& transitions,
                         const Policy& attacker, const Policy& defender, std::uint64_t seed,
                         std::size_t max_steps) {
  if (max_steps < 1) throw Error(ErrorKind::InvalidArgument, "max_steps must be at least 1");
  check_policies(game, transitions, attacker, defender);
  return simulate(game, transitions, attacker, defender, seed, max_steps);
}

std::size_t resolve_thread_count(std::size_t requested) {
  if (requested > 0) return requested;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MARGAME_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && cap > 0) threads = std::min<std::size_t>(threads, cap);
  }
  return threads;
}

SimulationReport run_batch(const MarkovGame& game, const TransitionModel& transitions,
                           const NamedPolicy& attacker, const NamedPolicy& defender,
                           std::size_t episodes, std::uint64_t base_seed,
                           const SimulationConfig& config) {
  if (episodes < 1) throw Error(ErrorKind::InvalidArgument, "episodes must be at least 1");
  if (config.max_steps < 1) throw Error(ErrorKind::InvalidArgument, "max_steps must be at least 1");
  check_policies(game, transitions, attacker.policy, defender.policy);

  const std::size_t n_states = game.state_count();
  struct Outcome {
    double attacker_return = 0.0;
    double defender_return = 0.0;
    std::size_t length = 0;
    bool reached = false;
  };
  std::vector<Outcome> outcomes(episodes);

  // Fixed contiguous chunks per worker; integer counts and index-ordered
  // sums make the report independent of scheduling.
  const std::size_t workers = std::min(resolve_thread_count(config.threads), episodes);
  std::vector<std::vector<std::size_t>> counts(workers,
                                               std::vector<std::size_t>(n_states * n_states, 0));
  auto work = [&](std::size_t w) {
    const std::size_t begin = episodes * w / workers;
    const std::size_t end = episodes * (w + 1) / workers;
    for (std::size_t i = begin; i < end; ++i) {
      const EpisodeTrace trace = simulate(game, transitions, attacker.policy, defender.policy,
                                          base_seed + i, config.max_steps);
      outcomes[i] = {trace.discounted_attacker_return, trace.discounted_defender_return,
                     trace.length(), trace.reached_target};
      for (const auto& step : trace.steps) ++counts[w][step.state * n_states + step.next_state];
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  SimulationReport r;
  r.attacker_policy = attacker.name;
  r.defender_policy = defender.name;
  r.discount = game.discount;
  r.defense_cost = game.defense_cost;
  r.base_seed = base_seed;
  r.max_steps = config.max_steps;
  r.episode_count = episodes;
  r.transition_counts = Matrix(n_states, n_states, 0.0);
  for (const auto& c : counts)
    for (std::size_t i = 0; i < n_states; ++i)
      for (std::size_t j = 0; j < n_states; ++j)
        r.transition_counts(i, j) += static_cast<double>(c[i * n_states + j]);

  double sum_a = 0.0;
  double sum_d = 0.0;
  double length = 0.0;
  std::size_t reached = 0;
  for (const auto& o : outcomes) {
    sum_a += o.attacker_return;
    sum_d += o.defender_return;
    length += static_cast<double>(o.length);
    reached += o.reached ? 1 : 0;
  }
  const double n = static_cast<double>(episodes);
  r.mean_attacker_return = sum_a / n;
  r.mean_defender_return = sum_d / n;
  r.mean_episode_length = length / n;
  r.target_reach_rate = static_cast<double>(reached) / n;
  if (episodes > 1) {
    double squares = 0.0;
    for (const auto& o : outcomes) {
      const double dev = o.attacker_return - r.mean_attacker_return;
      squares += dev * dev;
    }
    r.standard_error = std::sqrt(squares / (n - 1.0) / n);
  }
  return r;
}

std::vector<SimulationReport> compare_strategies(const MarkovGame& game,
                                                 const TransitionModel& transitions,
                                                 const std::vector<NamedPolicy>& defenders,
                                                 const NamedPolicy& attacker,
                                                 std::size_t episodes, std::uint64_t base_seed,
                                                 const SimulationConfig& config) {
  if (defenders.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "comparison needs at least two defender policies");
  std::vector<SimulationReport> rows;
  for (const auto& d : defenders)
    rows.push_back(run_batch(game, transitions, attacker, d, episodes, base_seed, config));
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.mean_attacker_return < b.mean_attacker_return;
  });
  return rows;
}

}  // namespace margame
