#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coopaloha/geometry.hpp"
#include "coopaloha/traffic.hpp"

namespace coopaloha {

/// Bipartite decoding graph: users against (station, slot) check nodes.
///
/// Check node (l, t), with station l in [0, m) and slot t in [1, tau], has the
/// flat id l * tau + (t - 1). User i is joined to (l, t) iff station l is
/// adjacent to i and i is active at slot t.
class SystemGraph {
 public:
  SystemGraph(std::vector<std::vector<std::size_t>> user_stations,
              std::vector<std::vector<std::size_t>> user_slots, std::size_t m, std::size_t tau)
      : m_(m), tau_(tau), user_stations_(std::move(user_stations)), user_slots_(std::move(user_slots)) {
    if (user_stations_.size() != user_slots_.size()) {
      throw std::invalid_argument("SystemGraph: adjacency covers " + std::to_string(user_stations_.size()) +
                                  " users but the frame plan covers " + std::to_string(user_slots_.size()));
    }
    check_edges_.resize(m_ * tau_);
    user_edges_.resize(user_stations_.size());
    for (std::size_t i = 0; i < user_stations_.size(); ++i) {
      for (std::size_t l : user_stations_[i]) {
        if (l >= m_) throw std::invalid_argument("SystemGraph: station index out of range");
        for (std::size_t t : user_slots_[i]) {
          if (t < 1 || t > tau_) throw std::invalid_argument("SystemGraph: slot out of range");
          const std::size_t c = check_id(l, t);
          user_edges_[i].push_back(c);
          check_edges_[c].push_back(i);
        }
      }
    }
  }

  std::size_t user_count() const noexcept { return user_stations_.size(); }
  std::size_t station_count() const noexcept { return m_; }
  std::size_t tau() const noexcept { return tau_; }
  std::size_t check_count() const noexcept { return m_ * tau_; }

  std::size_t check_id(std::size_t station, std::size_t slot) const noexcept { return station * tau_ + (slot - 1); }
  std::size_t station_of(std::size_t check) const noexcept { return check / tau_; }
  std::size_t slot_of(std::size_t check) const noexcept { return check % tau_ + 1; }

  /// Stations adjacent to a user, ascending.
  const std::vector<std::size_t>& user_stations(std::size_t i) const { return user_stations_.at(i); }
  /// Activation slots of a user, ascending, in 1..tau.
  const std::vector<std::size_t>& user_slots(std::size_t i) const { return user_slots_.at(i); }
  const std::vector<std::size_t>& user_edges(std::size_t i) const { return user_edges_.at(i); }
  /// Users in a check node, ascending.
  const std::vector<std::size_t>& check_edges(std::size_t c) const { return check_edges_.at(c); }

  std::size_t user_degree(std::size_t i) const { return user_edges_.at(i).size(); }
  std::size_t check_degree(std::size_t c) const { return check_edges_.at(c).size(); }
  bool covered(std::size_t i) const { return !user_stations_.at(i).empty(); }

  std::size_t edge_count() const noexcept {
    std::size_t e = 0;
    for (const auto& edges : user_edges_) e += edges.size();
    return e;
  }

 private:
  std::size_t m_;
  std::size_t tau_;
  std::vector<std::vector<std::size_t>> user_stations_;
  std::vector<std::vector<std::size_t>> user_slots_;
  std::vector<std::vector<std::size_t>> user_edges_;
  std::vector<std::vector<std::size_t>> check_edges_;
};

inline SystemGraph build_graph(const Deployment& dep, const FramePlan& plan) {
  if (dep.user_count() != plan.user_count()) {
    throw std::invalid_argument("build_graph: deployment has " + std::to_string(dep.user_count()) +
                                " users, frame plan has " + std::to_string(plan.user_count()));
  }
  return SystemGraph(dep.adjacency(), plan.activation, dep.station_count(), plan.tau);
}

struct DegreeStats {
  double mean = 0.0;
  double variance = 0.0;
  std::map<std::size_t, std::size_t> histogram;  // degree -> count
  std::size_t samples = 0;
};

namespace detail {
template <typename Range>
DegreeStats summarize_degrees(const Range& degrees) {
  DegreeStats s;
  double sum = 0.0;
  double sum2 = 0.0;
  for (std::size_t d : degrees) {
    ++s.histogram[d];
    sum += static_cast<double>(d);
    sum2 += static_cast<double>(d) * static_cast<double>(d);
    ++s.samples;
  }
  if (s.samples > 0) {
    s.mean = sum / static_cast<double>(s.samples);
    s.variance = sum2 / static_cast<double>(s.samples) - s.mean * s.mean;
  }
  return s;
}
}  // namespace detail

/// Degree statistics over all tau * m check nodes (population variance).
inline DegreeStats empirical_check_degree_stats(const SystemGraph& g) {
  std::vector<std::size_t> degrees(g.check_count());
  for (std::size_t c = 0; c < g.check_count(); ++c) degrees[c] = g.check_degree(c);
  return detail::summarize_degrees(degrees);
}

/// Same, restricted to the checks of the given stations.
inline DegreeStats empirical_check_degree_stats(const SystemGraph& g, const std::vector<std::size_t>& stations) {
  std::vector<std::size_t> degrees;
  for (std::size_t l : stations) {
    for (std::size_t t = 1; t <= g.tau(); ++t) degrees.push_back(g.check_degree(g.check_id(l, t)));
  }
  return detail::summarize_degrees(degrees);
}

/// One line per check node: "l t: u1 u2 ...".
inline void dump_adjacency(const SystemGraph& g, std::ostream& os) {
  for (std::size_t c = 0; c < g.check_count(); ++c) {
    os << g.station_of(c) << ' ' << g.slot_of(c) << ':';
    for (std::size_t u : g.check_edges(c)) os << ' ' << u;
    os << '\n';
  }
}

}  // namespace coopaloha
