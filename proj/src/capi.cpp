#include "margame/margame.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "margame/error.hpp"
#include "margame/policies.hpp"
#include "margame/report.hpp"

using namespace margame;

struct margame_graph {
  AttackGraph graph;
};

struct margame_game {
  std::shared_ptr<const MarkovGame> game;
  TransitionModel transitions;
  Matrix chain;
};

struct margame_solution {
  std::shared_ptr<const MarkovGame> game;
  ShapleyResult result;
};

namespace {

thread_local std::string last_error;

margame_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return MARGAME_ERR_INVALID_ARGUMENT;
    case ErrorKind::Parse: return MARGAME_ERR_PARSE;
    case ErrorKind::InvalidGraph: return MARGAME_ERR_INVALID_GRAPH;
    case ErrorKind::Unreachable: return MARGAME_ERR_UNREACHABLE;
    case ErrorKind::Io: return MARGAME_ERR_IO;
    case ErrorKind::Convergence: return MARGAME_ERR_CONVERGENCE;
  }
  return MARGAME_ERR_INTERNAL;
}

margame_status fail(margame_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class F>
margame_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return MARGAME_OK;
  } catch (const Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MARGAME_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MARGAME_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, what);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

OutputFormat to_format(margame_format f) {
  switch (f) {
    case MARGAME_FORMAT_TABLE: return OutputFormat::Table;
    case MARGAME_FORMAT_CSV: return OutputFormat::Csv;
    case MARGAME_FORMAT_JSON: return OutputFormat::Json;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown format");
}

PathObjective to_objective(margame_objective o) {
  switch (o) {
    case MARGAME_OBJECTIVE_HOPS_MIN: return PathObjective::HopsMin;
    case MARGAME_OBJECTIVE_SUM_MAX: return PathObjective::SumMax;
    case MARGAME_OBJECTIVE_PRODUCT_MAX: return PathObjective::ProductMax;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown objective");
}

AttackPath parse_path(const char* text) {
  AttackPath p;
  std::istringstream in(text ? text : "");
  std::string id;
  while (in >> id) p.nodes.push_back(id);
  return p;
}

const GameState& live_state(const margame_game* game, size_t state) {
  require(state < game->game->state_count(), "state index out of range");
  return game->game->states[state];
}

struct SimulationSetup {
  NamedPolicy attacker;
  std::vector<NamedPolicy> defenders;
  SimulationConfig config;
};

SimulationSetup prepare(const margame_game* game, const margame_sim_options* options,
                        const std::vector<std::string>& defender_names) {
  require(game && options, "null argument");
  require(options->episodes >= 1, "episodes must be at least 1");
  const MarkovGame& g = *game->game;
  const std::string attacker_name = options->attacker_policy ? options->attacker_policy
                                                             : "exploit-weighted";
  bool need_solution = policy_needs_solution(attacker_name);
  for (const auto& d : defender_names) need_solution = need_solution || policy_needs_solution(d);

  std::optional<ShapleyResult> solution;
  if (need_solution)
    solution = shapley_value_iteration(g, game->transitions,
                                       {options->tolerance, options->max_iterations});
  const ShapleyResult* sol = solution ? &*solution : nullptr;

  SimulationSetup setup;
  setup.attacker = policy_by_name(attacker_name, g, Player::Attacker, sol);
  for (const auto& d : defender_names)
    setup.defenders.push_back(policy_by_name(d, g, Player::Defender, sol));
  setup.config.max_steps = options->max_steps;
  setup.config.threads = options->threads;
  return setup;
}

void write_traces(const margame_game* game, const margame_sim_options* options,
                  const SimulationSetup& setup) {
  std::ofstream out(options->trace_path);
  if (!out) throw Error(ErrorKind::Io, std::string("cannot write trace: ") + options->trace_path);
  for (std::size_t i = 0; i < options->episodes; ++i) {
    const auto trace = run_episode(*game->game, game->transitions, setup.attacker.policy,
                                   setup.defenders.front().policy, options->seed + i,
                                   options->max_steps);
    out << trace_to_lines(*game->game, trace);
  }
}

}  // namespace

extern "C" {

const char* margame_version(void) { return "1.0.0"; }

const char* margame_last_error(void) { return last_error.c_str(); }

const char* margame_status_string(margame_status status) {
  switch (status) {
    case MARGAME_OK: return "ok";
    case MARGAME_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MARGAME_ERR_PARSE: return "parse error";
    case MARGAME_ERR_INVALID_GRAPH: return "invalid graph";
    case MARGAME_ERR_UNREACHABLE: return "target unreachable";
    case MARGAME_ERR_IO: return "i/o error";
    case MARGAME_ERR_CONVERGENCE: return "no convergence";
    case MARGAME_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void margame_string_free(char* str) { std::free(str); }

margame_status margame_graph_load(const char* path, margame_graph** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new margame_graph{AttackGraph::from_file(path)};
  });
}

margame_status margame_graph_parse(const char* json, margame_graph** out) {
  return guarded([&] {
    require(json && out, "null argument");
    *out = new margame_graph{AttackGraph::from_json(json)};
  });
}

void margame_graph_free(margame_graph* graph) { delete graph; }

margame_status margame_graph_counts(const margame_graph* graph, size_t* nodes, size_t* hosts,
                                    size_t* edges) {
  return guarded([&] {
    require(graph, "null graph");
    if (nodes) *nodes = graph->graph.node_count();
    if (hosts) *hosts = graph->graph.hosts().size();
    if (edges) *edges = graph->graph.edge_count();
  });
}

margame_status margame_graph_render_validation(const margame_graph* graph, char** out) {
  return guarded([&] {
    require(graph && out, "null argument");
    *out = copy_string(render_validation(graph->graph));
  });
}

margame_status margame_graph_shortest_path(const margame_graph* graph, char** out) {
  return guarded([&] {
    require(graph && out, "null argument");
    *out = copy_string(shortest_attack_path(graph->graph).to_string());
  });
}

margame_status margame_graph_best_path(const margame_graph* graph, margame_objective objective,
                                       char** path, double* score) {
  return guarded([&] {
    require(graph && path, "null argument");
    const auto o = to_objective(objective);
    const AttackPath best = best_path_by_exploitability(graph->graph, o);
    if (score) *score = path_score(graph->graph, best, o);
    *path = copy_string(best.to_string());
  });
}

margame_status margame_graph_render_paths(const margame_graph* graph, margame_objective objective,
                                          margame_format format, char** out) {
  return guarded([&] {
    require(graph && out, "null argument");
    *out = copy_string(render_paths(graph->graph, to_objective(objective), to_format(format)));
  });
}

margame_status margame_graph_dot(const margame_graph* graph, const char* highlight, char** out) {
  return guarded([&] {
    require(graph && out, "null argument");
    *out = copy_string(export_dot(graph->graph, parse_path(highlight)));
  });
}

margame_status margame_graph_estimated_path(const margame_graph* graph, const char* estimates_path,
                                            char** out) {
  return guarded([&] {
    require(graph && estimates_path && out, "null argument");
    const auto estimates = read_distance_estimates(estimates_path);
    *out = copy_string(path_from_estimates(graph->graph, estimates).to_string());
  });
}

margame_status margame_game_build(const margame_graph* graph, double defense_cost,
                                  double discount, const char* path, margame_game** out) {
  return guarded([&] {
    require(graph && out, "null argument");
    MarkovGame built = path ? build_markov_game(graph->graph, parse_path(path), defense_cost,
                                                discount)
                            : build_markov_game(graph->graph, defense_cost, discount);
    auto handle = std::make_unique<margame_game>();
    handle->game = std::make_shared<const MarkovGame>(std::move(built));
    handle->transitions = build_transition_model(*handle->game);
    handle->chain = chain_probabilities(*handle->game);
    *out = handle.release();
  });
}

void margame_game_free(margame_game* game) { delete game; }

margame_status margame_game_state_count(const margame_game* game, size_t* count) {
  return guarded([&] {
    require(game && count, "null argument");
    *count = game->game->state_count();
  });
}

margame_status margame_game_action_count(const margame_game* game, size_t state,
                                         margame_player player, size_t* count) {
  return guarded([&] {
    require(game && count, "null argument");
    const auto& s = live_state(game, state);
    *count = player == MARGAME_ATTACKER ? s.attacker_actions.size() : s.defender_actions.size();
  });
}

margame_status margame_game_action_label(const margame_game* game, size_t state,
                                         margame_player player, size_t action, char** out) {
  return guarded([&] {
    require(game && out, "null argument");
    const auto& s = live_state(game, state);
    if (player == MARGAME_ATTACKER) {
      require(action < s.attacker_actions.size(), "action index out of range");
      *out = copy_string(s.attacker_actions[action].label());
    } else {
      require(action < s.defender_actions.size(), "action index out of range");
      *out = copy_string(s.defender_actions[action].label());
    }
  });
}

margame_status margame_game_payoff(const margame_game* game, size_t state,
                                   size_t attacker_action, size_t defender_action,
                                   double* attacker_reward) {
  return guarded([&] {
    require(game && attacker_reward, "null argument");
    const auto& s = live_state(game, state);
    require(!s.terminal, "terminal state has no payoff");
    const Matrix& m = game->game->payoffs[state].attacker_reward;
    require(attacker_action < m.rows() && defender_action < m.cols(), "action index out of range");
    *attacker_reward = m(attacker_action, defender_action);
  });
}

margame_status margame_game_chain_probability(const margame_game* game, size_t from, size_t to,
                                              double* probability) {
  return guarded([&] {
    require(game && probability, "null argument");
    require(from < game->chain.rows() && to < game->chain.cols(), "state index out of range");
    *probability = game->chain(from, to);
  });
}

margame_status margame_game_render_payoffs(const margame_game* game, margame_format format,
                                           char** out) {
  return guarded([&] {
    require(game && out, "null argument");
    *out = copy_string(render_payoffs(*game->game, to_format(format)));
  });
}

margame_status margame_game_render_transitions(const margame_game* game, margame_format format,
                                               int dot, char** out) {
  return guarded([&] {
    require(game && out, "null argument");
    *out = copy_string(dot ? chain_to_dot(*game->game, game->chain)
                           : render_chain(*game->game, game->chain, to_format(format)));
  });
}

margame_status margame_game_to_json(const margame_game* game, char** out) {
  return guarded([&] {
    require(game && out, "null argument");
    *out = copy_string(game_to_json(*game->game));
  });
}

margame_status margame_solve(const margame_game* game, double tolerance, size_t max_iterations,
                             margame_solution** out) {
  return guarded([&] {
    require(game && out, "null argument");
    auto handle = std::make_unique<margame_solution>();
    handle->game = game->game;
    handle->result =
        shapley_value_iteration(*game->game, game->transitions, {tolerance, max_iterations});
    *out = handle.release();
  });
}

void margame_solution_free(margame_solution* solution) { delete solution; }

margame_status margame_solution_value(const margame_solution* solution, size_t state,
                                      double* value) {
  return guarded([&] {
    require(solution && value, "null argument");
    require(state < solution->result.values.size(), "state index out of range");
    *value = solution->result.values[state];
  });
}

margame_status margame_solution_convergence(const margame_solution* solution, size_t* iterations,
                                            double* residual) {
  return guarded([&] {
    require(solution, "null argument");
    if (iterations) *iterations = solution->result.iterations;
    if (residual) *residual = solution->result.residual;
  });
}

margame_status margame_solution_render(const margame_solution* solution, margame_format format,
                                       char** out) {
  return guarded([&] {
    require(solution && out, "null argument");
    *out = copy_string(render_solution(*solution->game, solution->result, to_format(format)));
  });
}

void margame_sim_options_init(margame_sim_options* options) {
  if (!options) return;
  options->seed = 0;
  options->episodes = 1000;
  options->max_steps = kDefaultMaxSteps;
  options->threads = 0;
  options->attacker_policy = "exploit-weighted";
  options->defender_policy = "urs";
  options->tolerance = ShapleyOptions{}.tolerance;
  options->max_iterations = ShapleyOptions{}.max_iterations;
  options->trace_path = nullptr;
}

margame_status margame_simulate(const margame_game* game, const margame_sim_options* options,
                                margame_format format, char** out) {
  return guarded([&] {
    require(game && options && out, "null argument");
    const std::string defender = options->defender_policy ? options->defender_policy : "urs";
    const auto setup = prepare(game, options, {defender});
    const auto report = run_batch(*game->game, game->transitions, setup.attacker,
                                  setup.defenders.front(), options->episodes, options->seed,
                                  setup.config);
    if (options->trace_path && *options->trace_path) write_traces(game, options, setup);
    *out = copy_string(render_report(*game->game, report, to_format(format)));
  });
}

margame_status margame_simulate_summary(const margame_game* game,
                                        const margame_sim_options* options,
                                        double* mean_attacker_return, double* standard_error,
                                        double* target_reach_rate) {
  return guarded([&] {
    const std::string defender =
        options && options->defender_policy ? options->defender_policy : "urs";
    const auto setup = prepare(game, options, {defender});
    const auto report = run_batch(*game->game, game->transitions, setup.attacker,
                                  setup.defenders.front(), options->episodes, options->seed,
                                  setup.config);
    if (mean_attacker_return) *mean_attacker_return = report.mean_attacker_return;
    if (standard_error) *standard_error = report.standard_error;
    if (target_reach_rate) *target_reach_rate = report.target_reach_rate;
  });
}

margame_status margame_compare(const margame_game* game, const margame_sim_options* options,
                               const char* defender_policies, margame_format format, char** out) {
  return guarded([&] {
    require(defender_policies && out, "null argument");
    std::vector<std::string> names;
    std::istringstream in(defender_policies);
    std::string name;
    while (std::getline(in, name, ','))
      if (!name.empty()) names.push_back(name);
    const auto setup = prepare(game, options, names);
    const auto rows = compare_strategies(*game->game, game->transitions, setup.defenders,
                                         setup.attacker, options->episodes, options->seed,
                                         setup.config);
    *out = copy_string(render_comparison(rows, to_format(format)));
  });
}

}  // extern "C"
