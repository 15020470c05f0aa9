/* C interface to the margame engine.
 *
 * Every function returns a margame_status. On failure the message of the
 * most recent error on the calling thread is available from
 * margame_last_error(). Strings returned through `char**` out-parameters are
 * heap allocated and must be released with margame_string_free(). Handles are
 * immutable once created and may be shared read-only between threads.
 */
#ifndef MARGAME_MARGAME_H
#define MARGAME_MARGAME_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MARGAME_BUILDING_LIBRARY)
#    define MARGAME_API __declspec(dllexport)
#  else
#    define MARGAME_API __declspec(dllimport)
#  endif
#else
#  define MARGAME_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum margame_status {
  MARGAME_OK = 0,
  MARGAME_ERR_INVALID_ARGUMENT = 1,
  MARGAME_ERR_PARSE = 2,
  MARGAME_ERR_INVALID_GRAPH = 3,
  MARGAME_ERR_UNREACHABLE = 4,
  MARGAME_ERR_IO = 5,
  MARGAME_ERR_CONVERGENCE = 6,
  MARGAME_ERR_INTERNAL = 7
} margame_status;

typedef enum margame_format {
  MARGAME_FORMAT_TABLE = 0,
  MARGAME_FORMAT_CSV = 1,
  MARGAME_FORMAT_JSON = 2
} margame_format;

typedef enum margame_objective {
  MARGAME_OBJECTIVE_HOPS_MIN = 0,
  MARGAME_OBJECTIVE_SUM_MAX = 1,
  MARGAME_OBJECTIVE_PRODUCT_MAX = 2
} margame_objective;

typedef enum margame_player {
  MARGAME_ATTACKER = 0,
  MARGAME_DEFENDER = 1
} margame_player;

typedef struct margame_graph margame_graph;
typedef struct margame_game margame_game;
typedef struct margame_solution margame_solution;

MARGAME_API const char* margame_version(void);
MARGAME_API const char* margame_last_error(void);
MARGAME_API const char* margame_status_string(margame_status status);
MARGAME_API void margame_string_free(char* str);

/* ---- attack graph ---------------------------------------------------- */

MARGAME_API margame_status margame_graph_load(const char* path, margame_graph** out);
MARGAME_API margame_status margame_graph_parse(const char* json, margame_graph** out);
MARGAME_API void margame_graph_free(margame_graph* graph);

MARGAME_API margame_status margame_graph_counts(const margame_graph* graph, size_t* nodes,
                                                size_t* hosts, size_t* edges);
/* "N nodes, H hosts, E edges, OK" */
MARGAME_API margame_status margame_graph_render_validation(const margame_graph* graph,
                                                           char** out);
/* Space separated node ids. */
MARGAME_API margame_status margame_graph_shortest_path(const margame_graph* graph, char** out);
MARGAME_API margame_status margame_graph_best_path(const margame_graph* graph,
                                                   margame_objective objective, char** path,
                                                   double* score);
MARGAME_API margame_status margame_graph_render_paths(const margame_graph* graph,
                                                      margame_objective objective,
                                                      margame_format format, char** out);
/* highlight: space separated path or NULL/"" for none. */
MARGAME_API margame_status margame_graph_dot(const margame_graph* graph, const char* highlight,
                                             char** out);
/* Path followed by an attacker guided by an estimator interchange CSV. */
MARGAME_API margame_status margame_graph_estimated_path(const margame_graph* graph,
                                                        const char* estimates_path, char** out);

/* ---- Markov game ----------------------------------------------------- */

/* path: space separated attack path to build the game on, or NULL for the
 * shortest attack path. */
MARGAME_API margame_status margame_game_build(const margame_graph* graph, double defense_cost,
                                              double discount, const char* path,
                                              margame_game** out);
MARGAME_API void margame_game_free(margame_game* game);

MARGAME_API margame_status margame_game_state_count(const margame_game* game, size_t* count);
MARGAME_API margame_status margame_game_action_count(const margame_game* game, size_t state,
                                                     margame_player player, size_t* count);
MARGAME_API margame_status margame_game_action_label(const margame_game* game, size_t state,
                                                     margame_player player, size_t action,
                                                     char** out);
MARGAME_API margame_status margame_game_payoff(const margame_game* game, size_t state,
                                               size_t attacker_action, size_t defender_action,
                                               double* attacker_reward);
/* Default-policy chain (exploitability-weighted attacker, uniform defender). */
MARGAME_API margame_status margame_game_chain_probability(const margame_game* game, size_t from,
                                                          size_t to, double* probability);
MARGAME_API margame_status margame_game_render_payoffs(const margame_game* game,
                                                       margame_format format, char** out);
MARGAME_API margame_status margame_game_render_transitions(const margame_game* game,
                                                           margame_format format, int dot,
                                                           char** out);
MARGAME_API margame_status margame_game_to_json(const margame_game* game, char** out);

/* ---- solver ---------------------------------------------------------- */

MARGAME_API margame_status margame_solve(const margame_game* game, double tolerance,
                                         size_t max_iterations, margame_solution** out);
MARGAME_API void margame_solution_free(margame_solution* solution);
MARGAME_API margame_status margame_solution_value(const margame_solution* solution, size_t state,
                                                  double* value);
MARGAME_API margame_status margame_solution_convergence(const margame_solution* solution,
                                                        size_t* iterations, double* residual);
MARGAME_API margame_status margame_solution_render(const margame_solution* solution,
                                                   margame_format format, char** out);

/* ---- simulation ------------------------------------------------------ */

/* Policy names: attacker "exploit-weighted" (default), "greedy", "maxmin",
 * "urs", "always-exploit", "passive"; defender "urs" (default), "maxmin",
 * "passive". */
typedef struct margame_sim_options {
  uint64_t seed;
  size_t episodes;
  size_t max_steps;
  size_t threads; /* 0 = MARGAME_THREADS or hardware concurrency */
  const char* attacker_policy;
  const char* defender_policy;
  double tolerance; /* for policies derived from the solver */
  size_t max_iterations;
  const char* trace_path; /* optional line-delimited step dump */
} margame_sim_options;

MARGAME_API void margame_sim_options_init(margame_sim_options* options);

MARGAME_API margame_status margame_simulate(const margame_game* game,
                                            const margame_sim_options* options,
                                            margame_format format, char** out);
MARGAME_API margame_status margame_simulate_summary(const margame_game* game,
                                                    const margame_sim_options* options,
                                                    double* mean_attacker_return,
                                                    double* standard_error,
                                                    double* target_reach_rate);
/* defender_policies: comma separated, at least two names. */
MARGAME_API margame_status margame_compare(const margame_game* game,
                                           const margame_sim_options* options,
                                           const char* defender_policies, margame_format format,
                                           char** out);

#ifdef __cplusplus
}
#endif

#endif /* MARGAME_MARGAME_H */
