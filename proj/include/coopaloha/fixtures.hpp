#pragma once

#include <string>
#include <vector>

#include "coopaloha/graph.hpp"

namespace coopaloha::fixtures {

struct Fixture {
  std::string name;
  std::string description;
  SystemGraph graph;
};

// Users U1, U2 are indices 0, 1; stations B1, B2 are indices 0, 1.

/// One station hearing both users over two slots: U1 active {1,2}, U2 active {1}.
inline Fixture f1() {
  return {"F1", "1 station, tau=2; U1 slots {1,2}, U2 slot {1}; both heard by B1",
          SystemGraph({{0}, {0}}, {{1, 2}, {1}}, 1, 2)};
}

/// Two stations, one slot: U1 heard by B1 and B2, U2 heard by B1 only.
inline Fixture f2() {
  return {"F2", "2 stations, tau=1; U1 heard by B1 and B2, U2 by B1 only; both active at slot 1",
          SystemGraph({{0, 1}, {0}}, {{1}, {1}}, 2, 1)};
}

/// F1's slot pattern with a second station that hears U1 only.
inline Fixture f3() {
  return {"F3", "2 stations, tau=2; U1 slots {1,2} heard by B1 and B2, U2 slot {1} heard by B1",
          SystemGraph({{0, 1}, {0}}, {{1, 2}, {1}}, 2, 2)};
}

inline std::vector<Fixture> all() { return {f1(), f2(), f3()}; }

}  // namespace coopaloha::fixtures
