#pragma once

#include <string>

#include "margame/attack_graph.hpp"

#ifndef MARGAME_FIXTURE
#error "MARGAME_FIXTURE must point at data/cloud10.json"
#endif

inline const margame::AttackGraph& cloud10() {
  static const margame::AttackGraph g = margame::AttackGraph::from_file(MARGAME_FIXTURE);
  return g;
}

// Two-node graph A -> T.
inline margame::AttackGraph single_edge(double e = 0.5, double impact = 7.0) {
  return margame::AttackGraph({"h1"}, "A", "T", {{"T", "h1", {1, e, impact}}}, {{"A", "T"}});
}
