#pragma once

#include <string>
#include <vector>

namespace mpc {

enum class PatternId { st1, st2, st3, st4, custom };

struct StreamEdge {
  int src = 0;  // predicting stream v
  int dst = 0;  // predicted stream q
};

// Directed cross-stream prediction graph (same at every layer l >= 1).
struct TopologyPattern {
  PatternId id = PatternId::st1;
  int streams = 0;
  std::vector<StreamEdge> edges;

  bool has_edge(int src, int dst) const;
};

// st1: complete digraph with self-loops.
// st2: foveal cycle 0->1->2->3->0; parafoveal/peripheral predict all foveal
//      streams and themselves.
// st3: each foveal stream predicts its horizontal and vertical neighbor on
//      the 2x2 grid; parafoveal/peripheral as in st2.
// st4: all foveal streams predict all foveal streams (self-loops included);
//      parafoveal/peripheral as in st2.
TopologyPattern build_topology(PatternId id, int C, int F, int P);

PatternId parse_pattern(const std::string& name);
std::string pattern_name(PatternId id);

}  // namespace mpc
