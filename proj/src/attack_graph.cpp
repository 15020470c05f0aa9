#include "margame/attack_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "margame/error.hpp"

namespace margame {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidGraph, what); }

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Hop distance from every vertex to the target along directed edges.
std::vector<std::size_t> distances_to_target(const AttackGraph& g) {
  std::vector<std::vector<std::size_t>> in(g.vertex_count());
  for (std::size_t u = 0; u < g.vertex_count(); ++u)
    for (std::size_t v : g.out(u)) in[v].push_back(u);

  std::vector<std::size_t> dist(g.vertex_count(), kUnreached);
  std::deque<std::size_t> queue{g.target_index()};
  dist[g.target_index()] = 0;
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t u : in[v]) {
      if (dist[u] == kUnreached) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

bool lex_less(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
              const AttackGraph& g) {
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(),
      [&](std::size_t x, std::size_t y) { return g.id_of(x) < g.id_of(y); });
}

AttackPath to_path(const std::vector<std::size_t>& indices, const AttackGraph& g) {
  AttackPath p;
  p.nodes.reserve(indices.size());
  for (std::size_t i : indices) p.nodes.push_back(g.id_of(i));
  return p;
}

}  // namespace

std::string AttackPath::to_string() const {
  std::string out;
  for (const auto& n : nodes) {
    if (!out.empty()) out += ' ';
    out += n;
  }
  return out;
}

PathObjective parse_objective(std::string_view name) {
  if (name == "hops_min") return PathObjective::HopsMin;
  if (name == "sum_max") return PathObjective::SumMax;
  if (name == "product_max") return PathObjective::ProductMax;
  throw Error(ErrorKind::InvalidArgument, "unknown path objective: " + std::string(name));
}

std::string_view objective_name(PathObjective objective) {
  switch (objective) {
    case PathObjective::HopsMin: return "hops_min";
    case PathObjective::SumMax: return "sum_max";
    case PathObjective::ProductMax: return "product_max";
  }
  return "?";
}

AttackGraph::AttackGraph(std::vector<std::string> hosts, std::string entry, std::string target,
                         std::vector<Node> nodes,
                         std::vector<std::pair<std::string, std::string>> edges)
    : hosts_(std::move(hosts)),
      target_(std::move(target)),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)) {
  if (entry.empty()) invalid("entry id is empty");
  std::set<std::string, std::less<>> host_set;
  for (const auto& h : hosts_) {
    if (h.empty()) invalid("host id is empty");
    if (!host_set.insert(h).second) invalid("duplicate host id: " + h);
  }

  ids_.push_back(entry);
  index_.emplace(entry, 0);
  for (const auto& n : nodes_) {
    if (n.id.empty()) invalid("node id is empty");
    if (n.id == entry) invalid("entry node must not carry a vulnerability record: " + n.id);
    if (!index_.emplace(n.id, ids_.size()).second) invalid("duplicate node id: " + n.id);
    ids_.push_back(n.id);
    if (!host_set.contains(n.host)) invalid("node " + n.id + " placed on unknown host " + n.host);
    const auto& v = n.vuln;
    if (!(v.exploitability >= 0.0 && v.exploitability <= 1.0))
      invalid("exploitability outside [0,1] for node " + n.id);
    if (!(v.impact >= 0.0) || !std::isfinite(v.impact))
      invalid("impact must be non-negative for node " + n.id);
    if (v.count < 0) invalid("negative vulnerability count for node " + n.id);
    if (v.exploitability > 0.0 && v.count < 1)
      invalid("node " + n.id + " is exploitable but lists no vulnerabilities");
  }

  auto target_it = index_.find(target_);
  if (target_it == index_.end()) invalid("target " + target_ + " is not a declared node");
  target_index_ = target_it->second;
  if (target_index_ == 0) invalid("target must differ from the entry");

  out_.assign(ids_.size(), {});
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& [from, to] : edges_) {
    auto f = index_.find(from);
    auto t = index_.find(to);
    if (f == index_.end()) invalid("edge to unknown node: " + from);
    if (t == index_.end()) invalid("edge to unknown node: " + to);
    if (t->second == 0) invalid("entry node cannot have incoming edges");
    if (f->second == t->second) invalid("self loop on node " + from);
    if (!seen.emplace(f->second, t->second).second)
      invalid("duplicate edge " + from + " -> " + to);
    out_[f->second].push_back(t->second);
  }
  for (auto& succ : out_) std::sort(succ.begin(), succ.end());

  if (distances_to_target(*this)[0] == kUnreached)
    throw Error(ErrorKind::Unreachable, "target unreachable from entry");
}

AttackGraph AttackGraph::from_json(std::string_view document) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("malformed graph document: ") + e.what());
  }
  try {
    std::vector<std::string> hosts = doc.at("hosts").get<std::vector<std::string>>();
    std::vector<Node> nodes;
    for (const auto& n : doc.at("nodes")) {
      Node node;
      node.id = n.at("id").get<std::string>();
      node.host = n.at("host").get<std::string>();
      node.vuln.count = n.value("vuln_count", 1);
      node.vuln.exploitability = n.at("exploitability").get<double>();
      node.vuln.impact = n.value("impact", 0.0);
      nodes.push_back(std::move(node));
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& e : doc.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw Error(ErrorKind::Parse, "edge must be a pair");
      edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    return AttackGraph(std::move(hosts), doc.at("entry").get<std::string>(),
                       doc.at("target").get<std::string>(), std::move(nodes), std::move(edges));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed graph document: ") + e.what());
  }
}

AttackGraph AttackGraph::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read graph: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

std::string AttackGraph::to_json() const {
  nlohmann::ordered_json doc;
  doc["hosts"] = hosts_;
  doc["entry"] = entry();
  doc["target"] = target_;
  doc["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : nodes_) {
    doc["nodes"].push_back({{"id", n.id},
                            {"host", n.host},
                            {"vuln_count", n.vuln.count},
                            {"exploitability", n.vuln.exploitability},
                            {"impact", n.vuln.impact}});
  }
  doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& [f, t] : edges_) doc["edges"].push_back({f, t});
  return doc.dump(2);
}

bool AttackGraph::contains(std::string_view id) const { return index_.find(id) != index_.end(); }

std::size_t AttackGraph::index_of(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorKind::InvalidArgument, "unknown node: " + std::string(id));
  return it->second;
}

const Node& AttackGraph::node(std::string_view id) const {
  std::size_t i = index_of(id);
  if (i == 0) throw Error(ErrorKind::InvalidArgument, "the entry node has no vulnerability");
  return nodes_[i - 1];
}

bool AttackGraph::has_edge(std::string_view from, std::string_view to) const {
  auto f = index_.find(from);
  auto t = index_.find(to);
  if (f == index_.end() || t == index_.end()) return false;
  const auto& succ = out_[f->second];
  return std::binary_search(succ.begin(), succ.end(), t->second);
}

std::vector<std::string> AttackGraph::successors(std::string_view id) const {
  std::vector<std::string> result;
  for (std::size_t v : out_[index_of(id)]) result.push_back(ids_[v]);
  return result;
}

bool AttackGraph::is_path(const AttackPath& path) const {
  if (path.nodes.size() < 2) return false;
  if (path.nodes.front() != entry() || path.nodes.back() != target_) return false;
  std::set<std::string_view> visited;
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    if (!visited.insert(path.nodes[i]).second) return false;
    if (i + 1 < path.nodes.size() && !has_edge(path.nodes[i], path.nodes[i + 1])) return false;
  }
  return true;
}

bool AttackGraph::is_acyclic() const {
  std::vector<std::size_t> indegree(ids_.size(), 0);
  for (const auto& succ : out_)
    for (std::size_t v : succ) ++indegree[v];
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < ids_.size(); ++v)
    if (indegree[v] == 0) ready.push_back(v);
  std::size_t visited = 0;
  while (!ready.empty()) {
    std::size_t u = ready.back();
    ready.pop_back();
    ++visited;
    for (std::size_t v : out_[u])
      if (--indegree[v] == 0) ready.push_back(v);
  }
  return visited == ids_.size();
}

AttackPath shortest_attack_path(const AttackGraph& g) {
  const auto dist = distances_to_target(g);
  if (dist[0] == kUnreached) throw Error(ErrorKind::Unreachable, "target unreachable");
  // Walking along strictly decreasing distance and always taking the
  // smallest id yields the lexicographically smallest minimum-hop path.
  std::vector<std::size_t> path{0};
  std::size_t at = 0;
  while (at != g.target_index()) {
    std::optional<std::size_t> best;
    for (std::size_t v : g.out(at)) {
      if (dist[v] + 1 != dist[at]) continue;
      if (!best || g.id_of(v) < g.id_of(*best)) best = v;
    }
    at = *best;
    path.push_back(at);
  }
  return to_path(path, g);
}

std::vector<AttackPath> enumerate_attack_paths(const AttackGraph& g, std::size_t max_hops) {
  if (max_hops < 1) throw Error(ErrorKind::InvalidArgument, "max_hops must be at least 1");
  std::vector<std::vector<std::size_t>> found;
  std::vector<std::size_t> stack{0};
  std::vector<bool> on_path(g.vertex_count(), false);
  on_path[0] = true;

  std::function<void()> dfs = [&] {
    std::size_t at = stack.back();
    if (at == g.target_index()) {
      found.push_back(stack);
      return;
    }
    if (stack.size() - 1 == max_hops) return;
    for (std::size_t v : g.out(at)) {
      if (on_path[v]) continue;
      on_path[v] = true;
      stack.push_back(v);
      dfs();
      stack.pop_back();
      on_path[v] = false;
    }
  };
  dfs();

  std::sort(found.begin(), found.end(), [&](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return lex_less(a, b, g);
  });
  std::vector<AttackPath> result;
  result.reserve(found.size());
  for (const auto& p : found) result.push_back(to_path(p, g));
  return result;
}

double path_score(const AttackGraph& g, const AttackPath& path, PathObjective objective) {
  switch (objective) {
    case PathObjective::HopsMin: return static_cast<double>(path.hop_count());
    case PathObjective::SumMax: {
      double sum = 0.0;
      for (std::size_t i = 1; i < path.nodes.size(); ++i) sum += g.exploitability(path.nodes[i]);
      return sum;
    }
    case PathObjective::ProductMax: {
      double product = 1.0;
      for (std::size_t i = 1; i < path.nodes.size(); ++i)
        product *= g.exploitability(path.nodes[i]);
      return product;
    }
  }
  return 0.0;
}

namespace {

// Forward dynamic programming over a topological order. Each vertex keeps the
// best-scoring path from the entry; ties keep the smaller id sequence, which
// stays smaller after appending the same suffix.
AttackPath best_path_acyclic(const AttackGraph& g, PathObjective objective) {
  const std::size_t n = g.vertex_count();
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v : g.out(u)) ++indegree[v];
  std::vector<std::size_t> order;
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  while (!ready.empty()) {
    std::size_t u = ready.back();
    ready.pop_back();
    order.push_back(u);
    for (std::size_t v : g.out(u))
      if (--indegree[v] == 0) ready.push_back(v);
  }

  struct Best {
    bool reached = false;
    double score = 0.0;
    std::vector<std::size_t> path;
  };
  std::vector<Best> best(n);
  best[0] = {true, objective == PathObjective::ProductMax ? 1.0 : 0.0, {0}};
  for (std::size_t u : order) {
    if (!best[u].reached) continue;
    for (std::size_t v : g.out(u)) {
      const double e = g.node(g.id_of(v)).vuln.exploitability;
      const double score =
          objective == PathObjective::ProductMax ? best[u].score * e : best[u].score + e;
      std::vector<std::size_t> candidate = best[u].path;
      candidate.push_back(v);
      Best& slot = best[v];
      if (!slot.reached || score > slot.score ||
          (score == slot.score && lex_less(candidate, slot.path, g))) {
        slot = {true, score, std::move(candidate)};
      }
    }
  }
  return to_path(best[g.target_index()].path, g);
}

}  // namespace

AttackPath best_path_by_exploitability(const AttackGraph& g, PathObjective objective) {
  if (objective == PathObjective::HopsMin) return shortest_attack_path(g);
  if (g.is_acyclic()) return best_path_acyclic(g, objective);

  // Maximising over simple paths in a cyclic graph has no polynomial shortcut.
  const auto paths = enumerate_attack_paths(g, g.vertex_count() - 1);
  if (paths.empty()) throw Error(ErrorKind::Unreachable, "target unreachable");
  const AttackPath* best = nullptr;
  double best_score = 0.0;
  for (const auto& p : paths) {
    const double s = path_score(g, p, objective);
    if (!best || s > best_score || (s == best_score && p.nodes < best->nodes)) {
      best = &p;
      best_score = s;
    }
  }
  return *best;
}

std::string export_dot(const AttackGraph& g, const AttackPath& highlight) {
  if (!highlight.empty() && !g.is_path(highlight))
    throw Error(ErrorKind::InvalidArgument, "highlight is not a path of the graph");
  std::set<std::pair<std::string, std::string>> dashed;
  for (std::size_t i = 0; i + 1 < highlight.nodes.size(); ++i)
    dashed.emplace(highlight.nodes[i], highlight.nodes[i + 1]);

  std::ostringstream os;
  os << "digraph attack_graph {\n  rankdir=LR;\n";
  os << "  " << g.entry() << " [shape=box, label=\"" << g.entry() << "\"];\n";
  for (const auto& n : g.nodes()) {
    os << "  " << n.id << " [label=\"" << n.id << "\\n" << n.host << "\"];\n";
  }
  for (const auto& [from, to] : g.edges()) {
    os << "  " << from << " -> " << to << " [label=\"e=" << format_number(g.exploitability(to))
       << "\"";
    if (dashed.contains({from, to})) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::vector<DistanceEstimate> parse_distance_estimates(std::string_view csv) {
  std::vector<DistanceEstimate> result;
  std::istringstream in{std::string(csv)};
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      if (line != "source,destination,predicted_distance")
        throw Error(ErrorKind::Parse, "estimator file: unexpected header");
      header = false;
      continue;
    }
    std::istringstream fields(line);
    DistanceEstimate e;
    std::string distance;
    if (!std::getline(fields, e.source, ',') || !std::getline(fields, e.destination, ',') ||
        !std::getline(fields, distance))
      throw Error(ErrorKind::Parse, "estimator file: bad row at line " + std::to_string(line_no));
    try {
      std::size_t used = 0;
      e.predicted = std::stod(distance, &used);
      if (used != distance.size()) throw std::invalid_argument(distance);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "estimator file: bad distance at line " + std::to_string(line_no));
    }
    result.push_back(std::move(e));
  }
  if (header) throw Error(ErrorKind::Parse, "estimator file: missing header");
  return result;
}

std::vector<DistanceEstimate> read_distance_estimates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read estimator distances: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_distance_estimates(buffer.str());
}

AttackPath path_from_estimates(const AttackGraph& g,
                               const std::vector<DistanceEstimate>& estimates) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> to_target(g.vertex_count(), kInf);
  for (const auto& e : estimates) {
    if (e.destination != g.target() || !g.contains(e.source)) continue;
    if (e.predicted >= 0.0 && std::isfinite(e.predicted))
      to_target[g.index_of(e.source)] = e.predicted;
  }
  to_target[g.target_index()] = 0.0;

  std::vector<std::size_t> path{0};
  std::vector<bool> visited(g.vertex_count(), false);
  visited[0] = true;
  while (path.back() != g.target_index()) {
    std::optional<std::size_t> next;
    for (std::size_t v : g.out(path.back())) {
      if (visited[v] || to_target[v] == kInf) continue;
      if (!next || to_target[v] < to_target[*next] ||
          (to_target[v] == to_target[*next] && g.id_of(v) < g.id_of(*next)))
        next = v;
    }
    if (!next) throw Error(ErrorKind::Unreachable, "estimated distances lead to a dead end");
    visited[*next] = true;
    path.push_back(*next);
  }
  return to_path(path, g);
}

}  // namespace margame
