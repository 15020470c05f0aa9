#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "margame/dynamics.hpp"

namespace margame {

inline constexpr std::size_t kDefaultMaxSteps = 200;

struct EpisodeStep {
  std::size_t state = 0;
  std::size_t attacker_action = 0;
  std::size_t defender_action = 0;
  bool success = false;  // Bernoulli(e) outcome; false for NoAttack
  double attacker_reward = 0.0;
  std::size_t next_state = 0;

  bool operator==(const EpisodeStep&) const = default;
};

struct EpisodeTrace {
  std::uint64_t seed = 0;
  std::vector<EpisodeStep> steps;
  double discounted_attacker_return = 0.0;
  double discounted_defender_return = 0.0;
  bool reached_target = false;

  std::size_t length() const noexcept { return steps.size(); }
  bool operator==(const EpisodeTrace&) const = default;
};

struct NamedPolicy {
  std::string name;
  Policy policy;
};

struct SimulationConfig {
  std::size_t max_steps = kDefaultMaxSteps;
  /// Worker threads for batches; 0 = MARGAME_THREADS or hardware concurrency.
  std::size_t threads = 0;
};

struct SimulationReport {
  std::string attacker_policy;
  std::string defender_policy;
  double discount = 0.0;
  double defense_cost = 0.0;
  std::uint64_t base_seed = 0;
  std::size_t max_steps = 0;

  std::size_t episode_count = 0;
  double mean_attacker_return = 0.0;
  double mean_defender_return = 0.0;
  double standard_error = 0.0;  // of the attacker mean
  double target_reach_rate = 0.0;
  double mean_episode_length = 0.0;
  Matrix transition_counts;  // [from][to] over all steps

  /// Row-normalised transition counts; unvisited rows are all zero.
  Matrix empirical_chain() const;
  std::vector<double> visits() const;  // steps taken from each state

  bool operator==(const SimulationReport&) const = default;
};

/// Draw streams used per step. Each is an independent counter stream.
enum class DrawStream : std::uint64_t { Attacker = 1, Defender = 2, Exploit = 3 };

EpisodeTrace run_episode(const MarkovGame& game, const TransitionModel& transitions,
                         const Policy& attacker, const Policy& defender, std::uint64_t seed,
                         std::size_t max_steps = kDefaultMaxSteps);

SimulationReport run_batch(const MarkovGame& game, const TransitionModel& transitions,
                           const NamedPolicy& attacker, const NamedPolicy& defender,
                           std::size_t episodes, std::uint64_t base_seed,
                           const SimulationConfig& config = {});

/// One report per defender policy, same attacker and seeds, sorted ascending
/// by mean attacker return.
std::vector<SimulationReport> compare_strategies(const MarkovGame& game,
                                                 const TransitionModel& transitions,
                                                 const std::vector<NamedPolicy>& defenders,
                                                 const NamedPolicy& attacker,
                                                 std::size_t episodes, std::uint64_t base_seed,
                                                 const SimulationConfig& config = {});

std::size_t resolve_thread_count(std::size_t requested);

}  // namespace margame
