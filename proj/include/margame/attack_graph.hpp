#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace margame {

/// CVSS summary of one VM: number of CVEs, maximum exploitability among them,
/// and the impact awarded to a successful exploit.
struct Vulnerability {
  int count = 0;
  double exploitability = 0.0;
  double impact = 0.0;
};

struct Node {
  std::string id;
  std::string host;
  Vulnerability vuln;
};

struct AttackPath {
  std::vector<std::string> nodes;

  std::size_t hop_count() const noexcept { return nodes.empty() ? 0 : nodes.size() - 1; }
  bool empty() const noexcept { return nodes.empty(); }
  std::string to_string() const;  // space separated ids

  auto operator<=>(const AttackPath&) const = default;
};

enum class PathObjective { HopsMin, SumMax, ProductMax };

PathObjective parse_objective(std::string_view name);
std::string_view objective_name(PathObjective objective);

/// Directed attack graph over VMs. The entry node (the attacker's foothold on
/// the internet) carries no vulnerability; every other node is a VM placed on
/// a host. Internally node index 0 is the entry and 1..n follow the order in
/// which the nodes were declared.
class AttackGraph {
 public:
  AttackGraph(std::vector<std::string> hosts, std::string entry, std::string target,
              std::vector<Node> nodes,
              std::vector<std::pair<std::string, std::string>> edges);

  /// Parses and validates the JSON graph document.
  static AttackGraph from_json(std::string_view document);
  static AttackGraph from_file(const std::string& path);

  std::string to_json() const;

  const std::string& entry() const noexcept { return ids_.front(); }
  const std::string& target() const noexcept { return target_; }
  const std::vector<std::string>& hosts() const noexcept { return hosts_; }

  /// Vulnerable nodes only (the entry is not counted).
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<std::pair<std::string, std::string>>& edges() const noexcept {
    return edges_;
  }

  bool contains(std::string_view id) const;
  bool is_entry(std::string_view id) const { return id == entry(); }
  /// Throws for the entry and unknown ids.
  const Node& node(std::string_view id) const;
  double exploitability(std::string_view id) const { return node(id).vuln.exploitability; }
  bool has_edge(std::string_view from, std::string_view to) const;

  /// Successors in declaration order.
  std::vector<std::string> successors(std::string_view id) const;

  bool is_path(const AttackPath& path) const;
  bool is_acyclic() const;

  // Index-level access for graph algorithms.
  std::size_t vertex_count() const noexcept { return ids_.size(); }
  std::size_t index_of(std::string_view id) const;
  const std::string& id_of(std::size_t index) const { return ids_.at(index); }
  const std::vector<std::size_t>& out(std::size_t index) const { return out_.at(index); }
  std::size_t target_index() const noexcept { return target_index_; }

 private:
  std::vector<std::string> hosts_;
  std::string target_;
  std::vector<Node> nodes_;
  std::vector<std::pair<std::string, std::string>> edges_;

  std::vector<std::string> ids_;  // 0 = entry
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::vector<std::size_t>> out_;
  std::size_t target_index_ = 0;
};

/// Minimum-hop entry -> target path; equal-hop paths are ordered by their
/// node-id sequence and the smallest wins.
AttackPath shortest_attack_path(const AttackGraph& graph);

/// All simple entry -> target paths with at most max_hops hops, sorted by
/// (hop count, node-id sequence).
std::vector<AttackPath> enumerate_attack_paths(const AttackGraph& graph, std::size_t max_hops);

/// Sum or product of exploitabilities along a path (the entry contributes
/// nothing); for HopsMin the score is the hop count.
double path_score(const AttackGraph& graph, const AttackPath& path, PathObjective objective);

AttackPath best_path_by_exploitability(const AttackGraph& graph, PathObjective objective);

/// DOT digraph. Edges carry the target's exploitability; edges of `highlight`
/// are dashed. Throws if highlight is non-empty and not a path of the graph.
std::string export_dot(const AttackGraph& graph, const AttackPath& highlight);

/// One predicted hop distance from the path-estimator interchange file.
/// A negative distance marks an unreachable pair.
struct DistanceEstimate {
  std::string source;
  std::string destination;
  double predicted = 0.0;
};

std::vector<DistanceEstimate> parse_distance_estimates(std::string_view csv);
std::vector<DistanceEstimate> read_distance_estimates(const std::string& path);

/// Path an attacker follows when it only trusts predicted distances: from the
/// entry it repeatedly moves to the unvisited successor with the smallest
/// predicted distance to the target.
AttackPath path_from_estimates(const AttackGraph& graph,
                               const std::vector<DistanceEstimate>& estimates);

}  // namespace margame
