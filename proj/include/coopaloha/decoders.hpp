#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "coopaloha/graph.hpp"
#include "coopaloha/random.hpp"

namespace coopaloha {

enum class Decoder { noncooperative, spatial, temporal, spatiotemporal };

inline constexpr Decoder kAllDecoders[] = {Decoder::noncooperative, Decoder::spatial, Decoder::temporal,
                                           Decoder::spatiotemporal};

inline std::string_view decoder_name(Decoder d) noexcept {
  switch (d) {
    case Decoder::noncooperative: return "noncoop";
    case Decoder::spatial: return "spatial";
    case Decoder::temporal: return "temporal";
    case Decoder::spatiotemporal: return "spatiotemporal";
  }
  return "?";
}

inline std::optional<Decoder> parse_decoder(std::string_view name) noexcept {
  for (Decoder d : kAllDecoders) {
    if (decoder_name(d) == name) return d;
  }
  return std::nullopt;
}

/// Outcome of one decoding pass over a SystemGraph.
struct DecodingResult {
  std::vector<bool> collected;        // per user
  std::vector<bool> resolved_checks;  // per check node: no user left in the residual
  /// Spatio-temporal: outer iterations s executed. Baselines: singleton
  /// decodes performed.
  std::size_t iterations_used = 0;
  /// Station that first decoded the user, for traces only.
  std::vector<std::optional<std::size_t>> collector;

  std::size_t collected_count() const noexcept {
    return static_cast<std::size_t>(std::count(collected.begin(), collected.end(), true));
  }

  std::vector<std::size_t> collected_users() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < collected.size(); ++i) {
      if (collected[i]) out.push_back(i);
    }
    return out;
  }
};

enum class TraceKind { temporal_collect, spatial_cancel, exit };

inline std::string_view trace_kind_name(TraceKind k) noexcept {
  switch (k) {
    case TraceKind::temporal_collect: return "temporal-collect";
    case TraceKind::spatial_cancel: return "spatial-cancel";
    case TraceKind::exit: return "exit";
  }
  return "?";
}

struct TraceEvent {
  std::size_t iteration = 0;
  std::size_t station = 0;
  TraceKind kind = TraceKind::exit;
  std::optional<std::size_t> user;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const TraceEvent& e) {
  os << "s=" << e.iteration << " l=" << e.station << ' ' << trace_kind_name(e.kind);
  if (e.user) os << " u=" << *e.user;
  return os;
}

/// Scan order of stations and slots. Decoded sets do not depend on it; it
/// exists so that this can be tested.
struct ProcessingOrder {
  std::vector<std::size_t> stations;  // permutation of [0, m)
  std::vector<std::size_t> slots;     // permutation of [1, tau]

  static ProcessingOrder identity(std::size_t m, std::size_t tau) {
    ProcessingOrder o{std::vector<std::size_t>(m), std::vector<std::size_t>(tau)};
    std::iota(o.stations.begin(), o.stations.end(), std::size_t{0});
    std::iota(o.slots.begin(), o.slots.end(), std::size_t{1});
    return o;
  }

  static ProcessingOrder shuffled(std::size_t m, std::size_t tau, RandomStream& rng) {
    auto o = identity(m, tau);
    auto shuffle = [&rng](std::vector<std::size_t>& v) {
      for (std::size_t k = v.size(); k > 1; --k) std::swap(v[k - 1], v[rng.below(k)]);
    };
    shuffle(o.stations);
    shuffle(o.slots);
    return o;
  }
};

struct DecodeOptions {
  const ProcessingOrder* order = nullptr;  // null: ascending
  std::size_t iteration_cap = 0;           // spatio-temporal only; 0 means tau * m
  std::vector<TraceEvent>* trace = nullptr;
};

namespace detail {

// Symbolic residual signal per check node: number of superposed users and the
// XOR of their ids, which is the remaining user's id whenever the count is one.
class Residual {
 public:
  explicit Residual(const SystemGraph& g) : count_(g.check_count()), xor_(g.check_count(), 0) {
    for (std::size_t c = 0; c < g.check_count(); ++c) {
      count_[c] = g.check_degree(c);
      for (std::size_t u : g.check_edges(c)) xor_[c] ^= static_cast<std::uint64_t>(u);
    }
  }

  std::size_t count(std::size_t c) const noexcept { return count_[c]; }
  bool singleton(std::size_t c) const noexcept { return count_[c] == 1; }
  std::size_t sole_user(std::size_t c) const noexcept { return static_cast<std::size_t>(xor_[c]); }

  void subtract(std::size_t c, std::size_t u) noexcept {
    --count_[c];
    xor_[c] ^= static_cast<std::uint64_t>(u);
  }

  std::vector<bool> resolved() const {
    std::vector<bool> out(count_.size());
    for (std::size_t c = 0; c < count_.size(); ++c) out[c] = count_[c] == 0;
    return out;
  }

 private:
  std::vector<std::size_t> count_;
  std::vector<std::uint64_t> xor_;
};

// Which (user, adjacent station) pairs have already had the user cancelled.
class CancelledAt {
 public:
  explicit CancelledAt(const SystemGraph& g) : flags_(g.user_count()) {
    for (std::size_t i = 0; i < g.user_count(); ++i) flags_[i].assign(g.user_stations(i).size(), false);
  }

  // Returns false if the pair was already marked.
  bool mark(const SystemGraph& g, std::size_t user, std::size_t station) {
    const auto& st = g.user_stations(user);
    const auto k = static_cast<std::size_t>(std::lower_bound(st.begin(), st.end(), station) - st.begin());
    if (flags_[user][k]) return false;
    flags_[user][k] = true;
    return true;
  }

 private:
  std::vector<std::vector<bool>> flags_;
};

class Engine {
 public:
  Engine(const SystemGraph& g, const DecodeOptions& opts)
      : g_(g),
        res_(g),
        cancelled_(g),
        order_(opts.order ? *opts.order : ProcessingOrder::identity(g.station_count(), g.tau())) {
    result_.collected.assign(g.user_count(), false);
    result_.collector.assign(g.user_count(), std::nullopt);
  }

  void collect(std::size_t u, std::size_t station) {
    if (!result_.collected[u]) {
      result_.collected[u] = true;
      result_.collector[u] = station;
    }
  }

  // Removes u from every local check of `station` where u is active.
  // Pushes checks that become singletons onto `work` when given.
  bool cancel_at_station(std::size_t u, std::size_t station, std::deque<std::size_t>* work) {
    if (!cancelled_.mark(g_, u, station)) return false;
    for (std::size_t t : g_.user_slots(u)) {
      const std::size_t c = g_.check_id(station, t);
      res_.subtract(c, u);
      if (work && res_.singleton(c)) work->push_back(c);
    }
    return true;
  }

  // Temporal SIC at one station until no local singleton remains. Appends the
  // users it collected to `out`.
  void local_temporal_sic(std::size_t station, std::vector<std::size_t>& out) {
    std::deque<std::size_t> work;
    for (std::size_t t : order_.slots) {
      const std::size_t c = g_.check_id(station, t);
      if (res_.singleton(c)) work.push_back(c);
    }
    while (!work.empty()) {
      const std::size_t c = work.front();
      work.pop_front();
      if (!res_.singleton(c)) continue;
      const std::size_t u = res_.sole_user(c);
      out.push_back(u);
      ++decodes_;
      cancel_at_station(u, station, &work);
    }
  }

  bool station_resolved(std::size_t station) const {
    for (std::size_t t = 1; t <= g_.tau(); ++t) {
      if (res_.count(g_.check_id(station, t)) != 0) return false;
    }
    return true;
  }

  const SystemGraph& g_;
  Residual res_;
  CancelledAt cancelled_;
  ProcessingOrder order_;
  DecodingResult result_;
  std::size_t decodes_ = 0;
};

}  // namespace detail

/// Slotted Aloha without cancellation: a user is collected iff some check
/// node has it as its only user in the original graph.
inline DecodingResult decode_noncooperative(const SystemGraph& g) {
  DecodingResult r;
  r.collected.assign(g.user_count(), false);
  r.collector.assign(g.user_count(), std::nullopt);
  r.resolved_checks.assign(g.check_count(), false);
  for (std::size_t c = 0; c < g.check_count(); ++c) {
    const auto& users = g.check_edges(c);
    r.resolved_checks[c] = users.size() <= 1;
    if (users.size() == 1) {
      const std::size_t u = users.front();
      if (!r.collected[u]) {
        r.collected[u] = true;
        r.collector[u] = g.station_of(c);
      }
      ++r.iterations_used;
    }
  }
  return r;
}

/// Each station runs SIC across its own slots; stations never exchange users.
inline DecodingResult decode_temporal(const SystemGraph& g, const DecodeOptions& opts = {}) {
  detail::Engine e(g, opts);
  std::vector<std::size_t> out;
  for (std::size_t l : e.order_.stations) {
    out.clear();
    e.local_temporal_sic(l, out);
    for (std::size_t u : out) e.collect(u, l);
  }
  e.result_.resolved_checks = e.res_.resolved();
  e.result_.iterations_used = e.decodes_;
  return std::move(e.result_);
}

/// Slot by slot, a user decoded at (l, t) is cancelled from (l', t) for every
/// station l' adjacent to it. No cancellation crosses slots.
inline DecodingResult decode_spatial(const SystemGraph& g, const DecodeOptions& opts = {}) {
  detail::Engine e(g, opts);
  std::vector<std::size_t> cancelled_in_slot(g.user_count(), 0);  // slot stamp, 0 = none
  std::deque<std::size_t> work;
  for (std::size_t t : e.order_.slots) {
    for (std::size_t l : e.order_.stations) {
      const std::size_t c = g.check_id(l, t);
      if (e.res_.singleton(c)) work.push_back(c);
    }
    while (!work.empty()) {
      const std::size_t c = work.front();
      work.pop_front();
      if (!e.res_.singleton(c)) continue;
      const std::size_t u = e.res_.sole_user(c);
      e.collect(u, g.station_of(c));
      ++e.decodes_;
      if (cancelled_in_slot[u] == t) continue;
      cancelled_in_slot[u] = t;
      for (std::size_t l : g.user_stations(u)) {
        const std::size_t c2 = g.check_id(l, t);
        e.res_.subtract(c2, u);
        if (e.res_.singleton(c2)) work.push_back(c2);
      }
    }
  }
  e.result_.resolved_checks = e.res_.resolved();
  e.result_.iterations_used = e.decodes_;
  return std::move(e.result_);
}

/// Cooperative decoder interleaving temporal SIC at each station with spatial
/// cancellation of users broadcast by neighbouring stations.
///
/// Iteration s: every remaining station runs temporal SIC to its fixpoint and
/// broadcasts what it collected to all stations adjacent to those users; a
/// station whose checks are all resolved, or that reaches the cap, leaves;
/// every other station cancels the received users it did not collect itself.
/// Stops early once every station has left or an iteration collected nobody.
inline DecodingResult decode_spatiotemporal(const SystemGraph& g, const DecodeOptions& opts = {}) {
  detail::Engine e(g, opts);
  const std::size_t m = g.station_count();
  const std::size_t cap = opts.iteration_cap ? opts.iteration_cap : g.tau() * m;
  auto emit = [&](std::size_t s, std::size_t l, TraceKind k, std::optional<std::size_t> u) {
    if (opts.trace) opts.trace->push_back({s, l, k, u});
  };

  std::vector<bool> active(m, true);
  std::vector<std::vector<std::size_t>> out(m);
  std::vector<std::vector<std::size_t>> inbox(m);

  for (std::size_t s = 1; s <= cap; ++s) {
    e.result_.iterations_used = s;
    bool progress = false;

    // Step 1: temporal SIC and transmit.
    for (std::size_t l : e.order_.stations) {
      out[l].clear();
      if (!active[l]) continue;
      e.local_temporal_sic(l, out[l]);
      for (std::size_t u : out[l]) {
        emit(s, l, TraceKind::temporal_collect, u);
        e.collect(u, l);
      }
      progress = progress || !out[l].empty();
    }
    for (std::size_t l : e.order_.stations) {
      for (std::size_t u : out[l]) {
        for (std::size_t k : g.user_stations(u)) inbox[k].push_back(u);
      }
    }

    // Step 2: termination check.
    for (std::size_t l : e.order_.stations) {
      if (active[l] && (s == cap || e.station_resolved(l))) {
        active[l] = false;
        emit(s, l, TraceKind::exit, std::nullopt);
      }
    }

    // Step 3: receive and cancel users collected elsewhere.
    for (std::size_t l : e.order_.stations) {
      auto& in = inbox[l];
      if (active[l]) {
        std::sort(in.begin(), in.end());
        in.erase(std::unique(in.begin(), in.end()), in.end());
        for (std::size_t u : in) {
          if (e.cancel_at_station(u, l, nullptr)) emit(s, l, TraceKind::spatial_cancel, u);
        }
      }
      in.clear();
    }

    if (!progress || std::none_of(active.begin(), active.end(), [](bool a) { return a; })) break;
  }
  e.result_.resolved_checks = e.res_.resolved();
  return std::move(e.result_);
}

inline DecodingResult decode(Decoder d, const SystemGraph& g, const DecodeOptions& opts = {}) {
  switch (d) {
    case Decoder::noncooperative: return decode_noncooperative(g);
    case Decoder::spatial: return decode_spatial(g, opts);
    case Decoder::temporal: return decode_temporal(g, opts);
    case Decoder::spatiotemporal: return decode_spatiotemporal(g, opts);
  }
  return {};
}

struct CollectionMetrics {
  double fraction_collected = 0.0;  // #collected / n, zero when n = 0
  double throughput = 0.0;          // #collected / (tau m)
};

inline CollectionMetrics count_metrics(const DecodingResult& res, const SystemGraph& g) {
  const auto k = static_cast<double>(res.collected_count());
  CollectionMetrics out;
  if (g.user_count() > 0) out.fraction_collected = k / static_cast<double>(g.user_count());
  if (g.check_count() > 0) out.throughput = k / static_cast<double>(g.check_count());
  return out;
}

}  // namespace coopaloha
