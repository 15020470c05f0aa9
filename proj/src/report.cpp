#include "margame/report.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "margame/error.hpp"

namespace margame {

namespace {

using ojson = nlohmann::ordered_json;

// Shortest representation that parses back to the same double.
std::string num(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string fixed4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

std::string state_name(std::size_t q) { return "s" + std::to_string(q); }

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

ojson matrix_json(const Matrix& m) {
  ojson rows = ojson::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

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

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

OutputFormat parse_format(std::string_view name) {
  if (name == "table") return OutputFormat::Table;
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json" || name == "structured-text") return OutputFormat::Json;
  throw Error(ErrorKind::InvalidArgument, "unknown output format: " + std::string(name));
}

std::string render_validation(const AttackGraph& g) {
  std::ostringstream os;
  os << g.node_count() << " nodes, " << g.hosts().size() << " hosts, " << g.edge_count()
     << " edges, OK\n";
  return os.str();
}

std::string render_paths(const AttackGraph& g, PathObjective objective, OutputFormat format) {
  const AttackPath sap = shortest_attack_path(g);
  const AttackPath best = best_path_by_exploitability(g, objective);
  const double score = path_score(g, best, objective);
  switch (format) {
    case OutputFormat::Table: {
      std::ostringstream os;
      os << "SAP: " << sap.to_string() << " (" << sap.hop_count() << " hops)\n";
      if (objective != PathObjective::HopsMin) {
        os << objective_name(objective) << ": " << best.to_string() << " (" << best.hop_count()
           << " hops, score " << num(score) << ")\n";
      }
      return os.str();
    }
    case OutputFormat::Csv: {
      std::ostringstream os;
      os << "objective,path,hops,score\n";
      os << "sap," << sap.to_string() << ',' << sap.hop_count() << ',' << sap.hop_count() << '\n';
      os << objective_name(objective) << ',' << best.to_string() << ',' << best.hop_count() << ','
         << num(score) << '\n';
      return os.str();
    }
    case OutputFormat::Json: {
      ojson doc;
      doc["sap"] = {{"nodes", sap.nodes}, {"hops", sap.hop_count()}};
      doc["best"] = {{"objective", objective_name(objective)},
                     {"nodes", best.nodes},
                     {"hops", best.hop_count()},
                     {"score", score}};
      return doc.dump(2) + "\n";
    }
  }
  return {};
}

std::string render_payoffs(const MarkovGame& game, OutputFormat format) {
  if (format == OutputFormat::Json) return game_to_json(game);
  std::ostringstream os;
  for (const auto& m : game.payoffs) {
    const GameState& s = game.states[m.state];
    const auto rows = attacker_labels(s);
    const auto cols = defender_labels(s);
    if (format == OutputFormat::Csv) {
      if (m.state > 0) os << '\n';
      os << state_name(s.index);
      for (const auto& c : cols) os << ',' << c;
      os << '\n';
      for (std::size_t a = 0; a < rows.size(); ++a) {
        os << rows[a];
        for (std::size_t d = 0; d < cols.size(); ++d) os << ',' << num(m.attacker_reward(a, d));
        os << '\n';
      }
    } else {
      if (m.state > 0) os << '\n';
      os << state_name(s.index) << " (attacker at " << s.current_node << ")\n";
      constexpr std::size_t w = 10;
      os << pad("A/D", w);
      for (const auto& c : cols) os << pad(c, w);
      os << '\n';
      for (std::size_t a = 0; a < rows.size(); ++a) {
        os << pad(rows[a], w);
        for (std::size_t d = 0; d < cols.size(); ++d)
          os << pad(num(m.attacker_reward(a, d)), w);
        os << '\n';
      }
    }
  }
  return os.str();
}

std::vector<Matrix> parse_payoff_csv(std::string_view csv) {
  std::vector<Matrix> blocks;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  auto flush = [&] {
    if (rows.empty()) return;
    Matrix m(rows.size(), width);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < width; ++j) m(i, j) = rows[i][j];
    blocks.push_back(std::move(m));
    rows.clear();
  };

  std::istringstream in{std::string(csv)};
  std::string line;
  bool expect_header = true;
  while (std::getline(in, line)) {
    if (line.empty()) {
      flush();
      expect_header = true;
      continue;
    }
    auto fields = split(line, ',');
    if (expect_header) {
      width = fields.size() - 1;
      expect_header = false;
      continue;
    }
    if (fields.size() != width + 1) throw Error(ErrorKind::Parse, "payoff CSV: ragged row");
    std::vector<double> row;
    for (std::size_t j = 1; j < fields.size(); ++j) {
      double v = 0.0;
      const auto& f = fields[j];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size())
        throw Error(ErrorKind::Parse, "payoff CSV: bad number " + f);
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  flush();
  return blocks;
}

std::string game_to_json(const MarkovGame& game) {
  const TransitionModel transitions = build_transition_model(game);
  ojson doc;
  doc["entry"] = game.graph.entry();
  doc["target"] = game.graph.target();
  doc["attack_path"] = game.sap.nodes;
  doc["defense_cost"] = game.defense_cost;
  doc["discount"] = game.discount;
  doc["states"] = ojson::array();
  for (const auto& s : game.states) {
    ojson state;
    state["name"] = state_name(s.index);
    state["node"] = s.current_node;
    state["terminal"] = s.terminal;
    state["attacker_actions"] = attacker_labels(s);
    state["defender_actions"] = defender_labels(s);
    if (!s.terminal) {
      state["attacker_reward"] = matrix_json(game.payoffs[s.index].attacker_reward);
      state["advance_probability"] = matrix_json(transitions.states[s.index].advance);
    }
    doc["states"].push_back(std::move(state));
  }
  return doc.dump(2) + "\n";
}

std::string render_chain(const MarkovGame& game, const Matrix& chain, OutputFormat format) {
  std::ostringstream os;
  if (format == OutputFormat::Json) {
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < chain.rows(); ++i)
      for (std::size_t j = 0; j < chain.cols(); ++j)
        if (chain(i, j) > 0.0)
          rows.push_back({{"from_state", state_name(i)},
                          {"to_state", state_name(j)},
                          {"probability", chain(i, j)}});
    return ojson{{"attack_path", game.sap.nodes}, {"transitions", rows}}.dump(2) + "\n";
  }
  if (format == OutputFormat::Csv) os << "from_state,to_state,probability\n";
  else os << pad("from", 6) << pad("to", 6) << "probability\n";
  for (std::size_t i = 0; i < chain.rows(); ++i)
    for (std::size_t j = 0; j < chain.cols(); ++j) {
      if (chain(i, j) <= 0.0) continue;
      if (format == OutputFormat::Csv)
        os << state_name(i) << ',' << state_name(j) << ',' << num(chain(i, j)) << '\n';
      else
        os << pad(state_name(i), 6) << pad(state_name(j), 6) << fixed4(chain(i, j)) << '\n';
    }
  return os.str();
}

std::string chain_to_dot(const MarkovGame& game, const Matrix& chain) {
  std::ostringstream os;
  os << "digraph markov_chain {\n  rankdir=LR;\n";
  for (const auto& s : game.states) {
    os << "  " << state_name(s.index) << " [label=\"" << state_name(s.index) << "\\n"
       << s.current_node << "\"" << (s.terminal ? ", shape=doublecircle" : "") << "];\n";
  }
  for (std::size_t i = 0; i < chain.rows(); ++i)
    for (std::size_t j = 0; j < chain.cols(); ++j)
      if (chain(i, j) > 0.0)
        os << "  " << state_name(i) << " -> " << state_name(j) << " [label=\""
           << fixed4(chain(i, j)) << "\"];\n";
  os << "}\n";
  return os.str();
}

std::string render_solution(const MarkovGame& game, const ShapleyResult& result,
                            OutputFormat format) {
  std::ostringstream os;
  switch (format) {
    case OutputFormat::Table: {
      for (const auto& s : game.states) {
        os << state_name(s.index) << " (" << s.current_node << ")  V = " << fixed4(result.values[s.index])
           << '\n';
        if (s.terminal) continue;
        const auto& sol = result.solutions[s.index];
        os << "  attacker:";
        for (std::size_t a = 0; a < sol.attacker.size(); ++a)
          os << ' ' << s.attacker_actions[a].label() << '=' << fixed4(sol.attacker[a]);
        os << "\n  defender:";
        for (std::size_t d = 0; d < sol.defender.size(); ++d)
          os << ' ' << s.defender_actions[d].label() << '=' << fixed4(sol.defender[d]);
        os << '\n';
      }
      os << "iterations " << result.iterations << ", residual " << num(result.residual) << '\n';
      return os.str();
    }
    case OutputFormat::Csv: {
      os << "state,value,action,attacker_prob,defender_prob\n";
      for (const auto& s : game.states) {
        const std::string v = num(result.values[s.index]);
        if (s.terminal) {
          os << state_name(s.index) << ',' << v << ",,,\n";
          continue;
        }
        const auto& sol = result.solutions[s.index];
        for (std::size_t a = 0; a < sol.attacker.size(); ++a)
          os << state_name(s.index) << ',' << v << ',' << s.attacker_actions[a].label() << ','
             << num(sol.attacker[a]) << ",\n";
        for (std::size_t d = 0; d < sol.defender.size(); ++d)
          os << state_name(s.index) << ',' << v << ',' << s.defender_actions[d].label() << ",,"
             << num(sol.defender[d]) << '\n';
      }
      return os.str();
    }
    case OutputFormat::Json: {
      ojson doc;
      doc["discount"] = game.discount;
      doc["iterations"] = result.iterations;
      doc["residual"] = result.residual;
      doc["states"] = ojson::array();
      for (const auto& s : game.states) {
        ojson st{{"name", state_name(s.index)}, {"value", result.values[s.index]}};
        if (!s.terminal) {
          const auto& sol = result.solutions[s.index];
          ojson att = ojson::object();
          for (std::size_t a = 0; a < sol.attacker.size(); ++a)
            att[s.attacker_actions[a].label()] = sol.attacker[a];
          ojson def = ojson::object();
          for (std::size_t d = 0; d < sol.defender.size(); ++d)
            def[s.defender_actions[d].label()] = sol.defender[d];
          st["attacker_strategy"] = att;
          st["defender_strategy"] = def;
          st["q"] = matrix_json(result.q[s.index]);
        }
        doc["states"].push_back(std::move(st));
      }
      return doc.dump(2) + "\n";
    }
  }
  return {};
}

namespace {

ojson report_json(const SimulationReport& r) {
  return {{"attacker_policy", r.attacker_policy},
          {"defender_policy", r.defender_policy},
          {"discount", r.discount},
          {"defense_cost", r.defense_cost},
          {"base_seed", r.base_seed},
          {"max_steps", r.max_steps},
          {"episodes", r.episode_count},
          {"mean_attacker_return", r.mean_attacker_return},
          {"mean_defender_return", r.mean_defender_return},
          {"standard_error", r.standard_error},
          {"target_reach_rate", r.target_reach_rate},
          {"mean_episode_length", r.mean_episode_length}};
}

}  // namespace

std::string render_report(const MarkovGame& game, const SimulationReport& r, OutputFormat format) {
  const Matrix chain = r.empirical_chain();
  std::ostringstream os;
  switch (format) {
    case OutputFormat::Table:
      os << "attacker policy      " << r.attacker_policy << '\n'
         << "defender policy      " << r.defender_policy << '\n'
         << "discount             " << num(r.discount) << '\n'
         << "defense cost         " << num(r.defense_cost) << '\n'
         << "base seed            " << r.base_seed << '\n'
         << "episodes             " << r.episode_count << '\n'
         << "mean attacker return " << fixed4(r.mean_attacker_return) << " +/- "
         << fixed4(r.standard_error) << '\n'
         << "mean defender return " << fixed4(r.mean_defender_return) << '\n'
         << "target reach rate    " << fixed4(r.target_reach_rate) << '\n'
         << "mean episode length  " << fixed4(r.mean_episode_length) << "\n\n"
         << "empirical chain\n"
         << render_chain(game, chain, OutputFormat::Table);
      return os.str();
    case OutputFormat::Csv: {
      os << "key,value\n";
      const ojson fields = report_json(r);
      for (const auto& [k, v] : fields.items()) {
        os << k << ',';
        if (v.is_string()) os << v.get<std::string>();
        else if (v.is_number_float()) os << num(v.get<double>());
        else os << v.dump();
        os << '\n';
      }
      for (std::size_t i = 0; i < chain.rows(); ++i)
        for (std::size_t j = 0; j < chain.cols(); ++j)
          if (chain(i, j) > 0.0)
            os << "chain_" << state_name(i) << "_" << state_name(j) << ',' << num(chain(i, j))
               << '\n';
      return os.str();
    }
    case OutputFormat::Json: {
      ojson doc = report_json(r);
      doc["transition_counts"] = matrix_json(r.transition_counts);
      doc["empirical_chain"] = matrix_json(chain);
      return doc.dump(2) + "\n";
    }
  }
  return {};
}

std::string render_comparison(const std::vector<SimulationReport>& rows, OutputFormat format) {
  std::ostringstream os;
  if (format == OutputFormat::Json) {
    ojson doc = ojson::array();
    for (const auto& r : rows) doc.push_back(report_json(r));
    return doc.dump(2) + "\n";
  }
  if (format == OutputFormat::Csv) {
    os << "defender_policy,attacker_policy,episodes,mean_attacker_return,standard_error,"
          "target_reach_rate,mean_episode_length\n";
    for (const auto& r : rows)
      os << r.defender_policy << ',' << r.attacker_policy << ',' << r.episode_count << ','
         << num(r.mean_attacker_return) << ',' << num(r.standard_error) << ','
         << num(r.target_reach_rate) << ',' << num(r.mean_episode_length) << '\n';
    return os.str();
  }
  os << pad("defender", 18) << pad("attacker", 18) << pad("mean return", 14) << pad("95% CI", 24)
     << pad("reach rate", 12) << "mean length\n";
  for (const auto& r : rows) {
    const double half = 1.96 * r.standard_error;
    os << pad(r.defender_policy, 18) << pad(r.attacker_policy, 18)
       << pad(fixed4(r.mean_attacker_return), 14)
       << pad("[" + fixed4(r.mean_attacker_return - half) + ", " +
                  fixed4(r.mean_attacker_return + half) + "]",
              24)
       << pad(fixed4(r.target_reach_rate), 12) << fixed4(r.mean_episode_length) << '\n';
  }
  return os.str();
}

std::string trace_to_lines(const MarkovGame& game, const EpisodeTrace& trace) {
  std::ostringstream os;
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const auto& step = trace.steps[t];
    const GameState& s = game.states[step.state];
    ojson line{{"seed", trace.seed},
               {"t", t},
               {"state", state_name(step.state)},
               {"attacker", s.attacker_actions[step.attacker_action].label()},
               {"defender", s.defender_actions[step.defender_action].label()},
               {"success", step.success},
               {"attacker_reward", step.attacker_reward},
               {"next_state", state_name(step.next_state)}};
    os << line.dump() << '\n';
  }
  return os.str();
}

}  // namespace margame
