#include "mpc/topology.hpp"

#include <algorithm>

#include "mpc/errors.hpp"

namespace mpc {

bool TopologyPattern::has_edge(int src, int dst) const {
  return std::any_of(edges.begin(), edges.end(), [&](const StreamEdge& e) {
    return e.src == src && e.dst == dst;
  });
}

TopologyPattern build_topology(PatternId id, int C, int F, int P) {
  int V = C + F + P;
  TopologyPattern t;
  t.id = id;
  t.streams = V;

  auto add = [&](int src, int dst) { t.edges.push_back({src, dst}); };
  // Parafoveal/peripheral streams (indices C..V-1) predict every foveal
  // stream and themselves; shared by st2-st4.
  auto add_coarse = [&] {
    for (int v = C; v < V; ++v) {
      for (int q = 0; q < C; ++q) add(v, q);
      add(v, v);
    }
  };

  switch (id) {
    case PatternId::st1:
      for (int v = 0; v < V; ++v)
        for (int q = 0; q < V; ++q) add(v, q);
      break;
    case PatternId::st2:
      if (C != 4) fail(ErrorKind::config, "st2 requires a 2x2 foveal grid");
      for (int v = 0; v < C; ++v) add(v, (v + 1) % C);
      add_coarse();
      break;
    case PatternId::st3: {
      if (C != 4) fail(ErrorKind::config, "st3 requires a 2x2 foveal grid");
      // Grid positions, row-major: 0=(0,0) 1=(0,1) 2=(1,0) 3=(1,1).
      for (int v = 0; v < C; ++v) {
        add(v, v ^ 1);  // horizontal neighbor
        add(v, v ^ 2);  // vertical neighbor
      }
      add_coarse();
      break;
    }
    case PatternId::st4:
      for (int v = 0; v < C; ++v)
        for (int q = 0; q < C; ++q) add(v, q);
      add_coarse();
      break;
    case PatternId::custom:
      fail(ErrorKind::config, "custom topology must supply its own edges");
  }
  return t;
}

PatternId parse_pattern(const std::string& name) {
  if (name == "st1") return PatternId::st1;
  if (name == "st2") return PatternId::st2;
  if (name == "st3") return PatternId::st3;
  if (name == "st4") return PatternId::st4;
  fail(ErrorKind::config, "unknown topology pattern: " + name);
}

std::string pattern_name(PatternId id) {
  switch (id) {
    case PatternId::st1: return "st1";
    case PatternId::st2: return "st2";
    case PatternId::st3: return "st3";
    case PatternId::st4: return "st4";
    case PatternId::custom: return "custom";
  }
  return "?";
}

}  // namespace mpc
