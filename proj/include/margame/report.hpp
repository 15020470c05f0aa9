#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "margame/attack_graph.hpp"
#include "margame/simulator.hpp"
#include "margame/solver.hpp"

namespace margame {

enum class OutputFormat { Table, Csv, Json };

OutputFormat parse_format(std::string_view name);

std::string render_validation(const AttackGraph& graph);
std::string render_paths(const AttackGraph& graph, PathObjective objective, OutputFormat format);

std::string render_payoffs(const MarkovGame& game, OutputFormat format);
/// Whole game (states, actions, payoffs, transitions) as JSON.
std::string game_to_json(const MarkovGame& game);
/// Inverse of the CSV payoff export; one matrix per block.
std::vector<Matrix> parse_payoff_csv(std::string_view csv);

std::string render_chain(const MarkovGame& game, const Matrix& chain, OutputFormat format);
std::string chain_to_dot(const MarkovGame& game, const Matrix& chain);

std::string render_solution(const MarkovGame& game, const ShapleyResult& result,
                            OutputFormat format);

std::string render_report(const MarkovGame& game, const SimulationReport& report,
                          OutputFormat format);
std::string render_comparison(const std::vector<SimulationReport>& rows, OutputFormat format);

/// One JSON object per step, newline separated.
std::string trace_to_lines(const MarkovGame& game, const EpisodeTrace& trace);

}  // namespace margame
