// margame command-line tool. Talks to the engine only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "margame/margame.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  std::string graph_path;
  double c_def = 2.0;
  double discount = 0.9;
  std::uint64_t seed = 0;
  std::string format = "table";
  std::string out_path;
  std::string estimator_distances;

  std::string objective = "hops_min";
  bool dot = false;
  double tolerance = 1e-8;
  std::size_t max_iter = 10000;
  std::size_t episodes = 10000;
  std::size_t max_steps = 200;
  std::size_t threads = 0;
  std::string attacker = "exploit-weighted";
  std::string defender = "urs";
  std::string compare;
  std::string trace_path;
};

// Raised for failures already reported on stderr.
struct Exit {
  int code;
};

int exit_code_for(margame_status status) {
  switch (status) {
    case MARGAME_OK: return kExitOk;
    case MARGAME_ERR_IO:
    case MARGAME_ERR_INVALID_ARGUMENT: return kExitUsage;
    default: return kExitDomain;
  }
}

void check(margame_status status) {
  if (status == MARGAME_OK) return;
  std::cerr << "error: " << margame_last_error() << '\n';
  throw Exit{exit_code_for(status)};
}

[[noreturn]] void usage_error(const std::string& message) {
  std::cerr << "usage error: " << message << '\n';
  throw Exit{kExitUsage};
}

using GraphPtr = std::unique_ptr<margame_graph, decltype(&margame_graph_free)>;
using GamePtr = std::unique_ptr<margame_game, decltype(&margame_game_free)>;
using SolutionPtr = std::unique_ptr<margame_solution, decltype(&margame_solution_free)>;

std::string take(char* s) {
  std::string out(s ? s : "");
  margame_string_free(s);
  return out;
}

margame_format format_of(const std::string& name) {
  if (name == "table") return MARGAME_FORMAT_TABLE;
  if (name == "csv") return MARGAME_FORMAT_CSV;
  if (name == "json" || name == "structured-text") return MARGAME_FORMAT_JSON;
  usage_error("unknown format " + name);
}

margame_objective objective_of(const std::string& name) {
  if (name == "hops_min") return MARGAME_OBJECTIVE_HOPS_MIN;
  if (name == "sum_max") return MARGAME_OBJECTIVE_SUM_MAX;
  if (name == "product_max") return MARGAME_OBJECTIVE_PRODUCT_MAX;
  usage_error("unknown objective " + name);
}

GraphPtr load_graph(const RunConfig& cfg) {
  margame_graph* g = nullptr;
  check(margame_graph_load(cfg.graph_path.c_str(), &g));
  return {g, &margame_graph_free};
}

// Path the attacker follows: exact SAP, or the estimator-guided one when
// predicted distances are supplied. Returns empty for the exact SAP.
// Disagreements go to stderr so stdout stays machine readable.
std::string attacker_path(const RunConfig& cfg, const margame_graph* g) {
  if (cfg.estimator_distances.empty()) return {};
  char* exact = nullptr;
  char* predicted = nullptr;
  check(margame_graph_shortest_path(g, &exact));
  std::string exact_path = take(exact);
  check(margame_graph_estimated_path(g, cfg.estimator_distances.c_str(), &predicted));
  std::string predicted_path = take(predicted);
  if (predicted_path != exact_path) {
    std::cerr << "warning: estimator path differs from the exact shortest attack path\n"
              << "exact SAP:      " << exact_path << "\n"
              << "estimated path: " << predicted_path << "\n";
  }
  return predicted_path;
}

GamePtr build_game(const RunConfig& cfg, const margame_graph* g) {
  const std::string path = attacker_path(cfg, g);
  margame_game* game = nullptr;
  check(margame_game_build(g, cfg.c_def, cfg.discount, path.empty() ? nullptr : path.c_str(),
                           &game));
  return {game, &margame_game_free};
}

void validate_config(const RunConfig& cfg) {
  if (!(cfg.c_def >= 0.0)) usage_error("--c-def must be non-negative");
  if (!(cfg.discount >= 0.0 && cfg.discount < 1.0)) usage_error("--discount must be in [0, 1)");
  if (cfg.episodes < 1) usage_error("--episodes must be at least 1");
  if (cfg.max_steps < 1) usage_error("--max-steps must be at least 1");
  if (!(cfg.tolerance > 0.0)) usage_error("--tolerance must be positive");
  format_of(cfg.format);
}

void cmd_validate(const RunConfig& cfg, std::ostream& out) {
  auto g = load_graph(cfg);
  char* text = nullptr;
  check(margame_graph_render_validation(g.get(), &text));
  out << take(text);
}

void cmd_paths(const RunConfig& cfg, std::ostream& out) {
  auto g = load_graph(cfg);
  char* text = nullptr;
  if (cfg.dot) {
    char* sap = nullptr;
    check(margame_graph_shortest_path(g.get(), &sap));
    const std::string highlight = take(sap);
    check(margame_graph_dot(g.get(), highlight.c_str(), &text));
    out << take(text);
    return;
  }
  check(margame_graph_render_paths(g.get(), objective_of(cfg.objective), format_of(cfg.format),
                                   &text));
  out << take(text);
  if (!cfg.estimator_distances.empty()) {
    char* predicted = nullptr;
    check(margame_graph_estimated_path(g.get(), cfg.estimator_distances.c_str(), &predicted));
    const std::string p = take(predicted);
    char* exact = nullptr;
    check(margame_graph_shortest_path(g.get(), &exact));
    if (p != take(exact)) std::cerr << "warning: estimator path differs from the exact SAP\n";
    out << "estimated: " << p << '\n';
  }
}

void cmd_build_game(const RunConfig& cfg, std::ostream& out) {
  auto g = load_graph(cfg);
  auto game = build_game(cfg, g.get());
  char* text = nullptr;
  check(margame_game_render_payoffs(game.get(), format_of(cfg.format), &text));
  out << take(text);
}

void cmd_transitions(const RunConfig& cfg, std::ostream& out) {
  auto g = load_graph(cfg);
  auto game = build_game(cfg, g.get());
  char* text = nullptr;
  check(margame_game_render_transitions(game.get(), format_of(cfg.format), cfg.dot ? 1 : 0, &text));
  out << take(text);
}

void cmd_solve(const RunConfig& cfg, std::ostream& out) {
  auto g = load_graph(cfg);
  auto game = build_game(cfg, g.get());
  margame_solution* raw = nullptr;
  check(margame_solve(game.get(), cfg.tolerance, cfg.max_iter, &raw));
  SolutionPtr solution(raw, &margame_solution_free);
  char* text = nullptr;
  check(margame_solution_render(solution.get(), format_of(cfg.format), &text));
  out << take(text);
}

void cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  auto g = load_graph(cfg);
  auto game = build_game(cfg, g.get());
  margame_sim_options opts;
  margame_sim_options_init(&opts);
  opts.seed = cfg.seed;
  opts.episodes = cfg.episodes;
  opts.max_steps = cfg.max_steps;
  opts.threads = cfg.threads;
  opts.attacker_policy = cfg.attacker.c_str();
  opts.defender_policy = cfg.defender.c_str();
  opts.tolerance = cfg.tolerance;
  opts.max_iterations = cfg.max_iter;
  opts.trace_path = cfg.trace_path.empty() ? nullptr : cfg.trace_path.c_str();
  char* text = nullptr;
  if (!cfg.compare.empty())
    check(margame_compare(game.get(), &opts, cfg.compare.c_str(), format_of(cfg.format), &text));
  else
    check(margame_simulate(game.get(), &opts, format_of(cfg.format), &text));
  out << take(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-sum Markov game analysis of cloud attack graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(margame_version()));

  RunConfig cfg;
  app.add_option("--graph", cfg.graph_path, "Attack graph JSON document")->required();
  app.add_option("--c-def", cfg.c_def, "Defense cost C_def")->capture_default_str();
  app.add_option("--discount", cfg.discount, "Discount factor in [0, 1)")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Base seed for simulations")->capture_default_str();
  app.add_option("--format", cfg.format, "table | csv | json (structured-text)")
      ->capture_default_str();
  app.add_option("--out", cfg.out_path, "Write output to this file instead of stdout");
  app.add_option("--estimator-distances", cfg.estimator_distances,
                 "Predicted distances CSV; the attacker follows them instead of exact BFS");

  auto* validate = app.add_subcommand("validate", "Check a graph document");
  auto* paths = app.add_subcommand("paths", "Shortest and best-exploitability attack paths");
  paths->add_option("--objective", cfg.objective, "hops_min | sum_max | product_max")
      ->capture_default_str();
  paths->add_flag("--dot", cfg.dot, "Emit the graph as DOT with the SAP dashed");
  auto* build = app.add_subcommand("build-game", "Payoff matrices per game state");
  auto* transitions = app.add_subcommand("transitions", "State chain under default policies");
  transitions->add_flag("--dot", cfg.dot, "Emit the chain as DOT");
  auto* solve = app.add_subcommand("solve", "Shapley value iteration");
  for (auto* sub : {solve}) {
    sub->add_option("--tolerance", cfg.tolerance)->capture_default_str();
    sub->add_option("--max-iter", cfg.max_iter)->capture_default_str();
  }
  auto* simulate = app.add_subcommand("simulate", "Seeded Monte-Carlo episodes");
  simulate->add_option("--episodes", cfg.episodes)->capture_default_str();
  simulate->add_option("--max-steps", cfg.max_steps)->capture_default_str();
  simulate->add_option("--threads", cfg.threads, "0 = MARGAME_THREADS or all cores");
  simulate->add_option("--attacker", cfg.attacker,
                       "exploit-weighted | greedy | maxmin | urs | always-exploit | passive")
      ->capture_default_str();
  simulate->add_option("--defender", cfg.defender, "urs | maxmin | passive")
      ->capture_default_str();
  simulate->add_option("--compare", cfg.compare, "Comma separated defender policies to compare");
  simulate->add_option("--trace", cfg.trace_path, "Dump every step as JSON lines");
  simulate->add_option("--tolerance", cfg.tolerance)->capture_default_str();
  simulate->add_option("--max-iter", cfg.max_iter)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    validate_config(cfg);
    std::ofstream file;
    if (!cfg.out_path.empty()) {
      file.open(cfg.out_path);
      if (!file) {
        std::cerr << "error: cannot write " << cfg.out_path << '\n';
        return kExitUsage;
      }
    }
    std::ostream& out = cfg.out_path.empty() ? std::cout : file;

    if (validate->parsed()) cmd_validate(cfg, out);
    else if (paths->parsed()) cmd_paths(cfg, out);
    else if (build->parsed()) cmd_build_game(cfg, out);
    else if (transitions->parsed()) cmd_transitions(cfg, out);
    else if (solve->parsed()) cmd_solve(cfg, out);
    else if (simulate->parsed()) cmd_simulate(cfg, out);
  } catch (const Exit& e) {
    return e.code;
  }
  return kExitOk;
}
