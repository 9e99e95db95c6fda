#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "coopaloha/analysis.hpp"
#include "coopaloha/decoders.hpp"
#include "coopaloha/geometry.hpp"
#include "coopaloha/graph.hpp"
#include "coopaloha/random.hpp"
#include "coopaloha/traffic.hpp"

namespace coopaloha {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Loads 0.05, 0.10, ..., 1.00.
inline std::vector<double> default_load_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 20; ++k) g.push_back(0.05 * k);
  return g;
}

struct ExperimentConfig {
  std::size_t m = 40;
  std::size_t tau = 40;
  double delta = 3.0;
  TemporalDegreeDistribution dist = TemporalDegreeDistribution::regular(2);
  std::vector<double> G_values = default_load_grid();
  std::size_t runs_per_point = 30;
  double epsilon = 0.05;
  std::uint64_t master_seed = 1;
  std::vector<Decoder> decoders{std::begin(kAllDecoders), std::end(kAllDecoders)};
  std::string output_path;

  void validate() const {
    if (m == 0 || tau == 0) throw ConfigError("config: m and tau must be at least 1");
    if (!(delta > 0.0)) throw ConfigError("config: delta must be positive");
    try {
      (void)radius_for_delta(delta, m);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    if (dist.q_max() > tau) {
      throw ConfigError("config: q_max=" + std::to_string(dist.q_max()) + " exceeds tau=" + std::to_string(tau));
    }
    for (double G : G_values) {
      if (!(G >= 0.0) || !std::isfinite(G)) throw ConfigError("config: loads must be finite and non-negative");
    }
    if (runs_per_point == 0) throw ConfigError("config: runs_per_point must be at least 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("config: epsilon must lie in (0, 1)");
    if (decoders.empty()) throw ConfigError("config: no decoders selected");
  }

  /// Number of users for a load: round(G tau m).
  std::size_t users_for(double G) const {
    return static_cast<std::size_t>(std::llround(G * static_cast<double>(tau * m)));
  }
};

/// Builds a config from a JSON document. Missing fields keep their defaults.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    if (j.contains("m")) cfg.m = j.at("m").get<std::size_t>();
    if (j.contains("tau")) cfg.tau = j.at("tau").get<std::size_t>();
    if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
    if (j.contains("dist")) {
      const auto& d = j.at("dist");
      if (d.is_string()) {
        cfg.dist = TemporalDegreeDistribution::parse(d.get<std::string>());
      } else {
        std::vector<std::pair<std::size_t, double>> pairs;
        for (const auto& item : d) {
          if (item.is_array() && item.size() == 2) {
            pairs.emplace_back(item[0].get<std::size_t>(), item[1].get<double>());
          } else if (item.is_object()) {
            pairs.emplace_back(item.at("q").get<std::size_t>(), item.at("p").get<double>());
          } else {
            throw ConfigError("config: dist entries must be [q, p] or {\"q\":..,\"p\":..}");
          }
        }
        cfg.dist = TemporalDegreeDistribution(pairs);
      }
    }
    if (j.contains("G_values")) cfg.G_values = j.at("G_values").get<std::vector<double>>();
    if (j.contains("runs_per_point")) cfg.runs_per_point = j.at("runs_per_point").get<std::size_t>();
    if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
    if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("decoders")) {
      cfg.decoders.clear();
      for (const auto& name : j.at("decoders").get<std::vector<std::string>>()) {
        const auto d = parse_decoder(name);
        if (!d) throw ConfigError("config: unknown decoder '" + name + "'");
        if (std::find(cfg.decoders.begin(), cfg.decoders.end(), *d) == cfg.decoders.end()) {
          cfg.decoders.push_back(*d);
        }
      }
    }
    if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

/// Aggregate over the runs of one (load, decoder) point.
struct LoadSweepRecord {
  double G = 0.0;  // realized load n / (tau m)
  std::size_t n = 0;
  Decoder decoder = Decoder::spatiotemporal;
  double mean_T = 0.0;
  double std_T = 0.0;
  double mean_P_coll = 0.0;
  double std_P_coll = 0.0;
  std::size_t runs = 0;
  std::optional<double> heuristic_P_coll;  // spatio-temporal rows only
  double mean_covered = 0.0;               // covered fraction, not written to CSV
};

namespace detail {

struct RunOutcome {
  std::size_t covered = 0;
  std::vector<std::size_t> collected;  // per enabled decoder
};

inline RunOutcome simulate_run(const ExperimentConfig& cfg, std::size_t n, std::size_t point, std::size_t run) {
  RunOutcome out;
  out.collected.assign(cfg.decoders.size(), 0);
  if (n == 0) return out;
  const auto rng = RandomStream::derive(cfg.master_seed, {point, run});
  auto geo_rng = rng.split(1);
  auto traffic_rng = rng.split(2);
  const Deployment dep = build_deployment(n, cfg.m, radius_for_delta(cfg.delta, cfg.m), geo_rng);
  const FramePlan plan = sample_frame_plan(cfg.dist, n, cfg.tau, traffic_rng);
  const SystemGraph g = build_graph(dep, plan);
  out.covered = dep.covered_count();
  for (std::size_t k = 0; k < cfg.decoders.size(); ++k) {
    out.collected[k] = decode(cfg.decoders[k], g).collected_count();
  }
  return out;
}

inline std::pair<double, double> mean_and_sample_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

template <typename Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t k = 0; k < count; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count && !failed; k = next++) {
        try {
          job(k);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Monte Carlo sweep over the configured loads. Every enabled decoder runs on
/// the same graph within a run. Run (point, run) draws from the stream
/// derived from (master_seed, point, run), so output does not depend on the
/// thread count.
inline std::vector<LoadSweepRecord> run_sweep(const ExperimentConfig& cfg, unsigned threads = 0) {
  cfg.validate();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t points = cfg.G_values.size();
  const std::size_t runs = cfg.runs_per_point;
  std::vector<detail::RunOutcome> outcomes(points * runs);
  detail::parallel_for(points * runs, threads, [&](std::size_t job) {
    const std::size_t p = job / runs;
    outcomes[job] = detail::simulate_run(cfg, cfg.users_for(cfg.G_values[p]), p, job % runs);
  });

  const double checks = static_cast<double>(cfg.tau * cfg.m);
  std::vector<LoadSweepRecord> records;
  for (std::size_t p = 0; p < points; ++p) {
    const std::size_t n = cfg.users_for(cfg.G_values[p]);
    const double G_eff = static_cast<double>(n) / checks;
    std::vector<double> covered;
    for (std::size_t r = 0; r < runs; ++r) {
      covered.push_back(n ? static_cast<double>(outcomes[p * runs + r].covered) / static_cast<double>(n) : 0.0);
    }
    const double mean_covered = detail::mean_and_sample_std(covered).first;
    std::optional<double> heuristic;
    for (std::size_t k = 0; k < cfg.decoders.size(); ++k) {
      std::vector<double> T;
      std::vector<double> P;
      for (std::size_t r = 0; r < runs; ++r) {
        const auto c = static_cast<double>(outcomes[p * runs + r].collected[k]);
        T.push_back(c / checks);
        P.push_back(n ? c / static_cast<double>(n) : 0.0);
      }
      LoadSweepRecord rec;
      rec.G = G_eff;
      rec.n = n;
      rec.decoder = cfg.decoders[k];
      std::tie(rec.mean_T, rec.std_T) = detail::mean_and_sample_std(T);
      std::tie(rec.mean_P_coll, rec.std_P_coll) = detail::mean_and_sample_std(P);
      rec.runs = runs;
      rec.mean_covered = mean_covered;
      if (rec.decoder == Decoder::spatiotemporal) {
        if (!heuristic) {
          heuristic = and_or_tree(AsymptoticParams(cfg.delta, G_eff, cfg.dist), cfg.tau * cfg.m).estimated_p_coll;
        }
        rec.heuristic_P_coll = heuristic;
      }
      records.push_back(rec);
    }
  }
  std::stable_sort(records.begin(), records.end(), [](const LoadSweepRecord& a, const LoadSweepRecord& b) {
    if (a.G != b.G) return a.G < b.G;
    return decoder_name(a.decoder) < decoder_name(b.decoder);
  });
  return records;
}

/// Records of one decoder, in sweep order.
inline std::vector<LoadSweepRecord> select_decoder(const std::vector<LoadSweepRecord>& records, Decoder d) {
  std::vector<LoadSweepRecord> out;
  for (const auto& r : records) {
    if (r.decoder == d) out.push_back(r);
  }
  return out;
}

inline const LoadSweepRecord& peak_throughput(const std::vector<LoadSweepRecord>& records) {
  if (records.empty()) throw std::invalid_argument("peak_throughput: no records");
  return *std::max_element(records.begin(), records.end(),
                           [](const auto& a, const auto& b) { return a.mean_T < b.mean_T; });
}

/// Largest load at which mean_P_coll stays at or above `level`, linearly
/// interpolated towards the first grid point that falls below it. Empty when
/// no swept load reaches the level.
inline std::optional<double> crossing_load(const std::vector<LoadSweepRecord>& records, double level) {
  if (records.empty()) throw std::invalid_argument("crossing_load: no records");
  if (!std::is_sorted(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.G < b.G; })) {
    throw std::invalid_argument("crossing_load: records must be sorted by G");
  }
  std::optional<std::size_t> last;
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (records[k].mean_P_coll >= level) last = k;
  }
  if (!last) return std::nullopt;
  const std::size_t k = *last;
  if (k + 1 == records.size()) return records[k].G;
  const auto& a = records[k];
  const auto& b = records[k + 1];
  const double frac = (a.mean_P_coll - level) / (a.mean_P_coll - b.mean_P_coll);
  return a.G + frac * (b.G - a.G);
}

/// G-bullet(delta, epsilon): the largest load with decoding probability at
/// least 1 - epsilon. Empty when no load qualifies, which callers report as 0.
inline std::optional<double> estimate_G_bullet(const std::vector<LoadSweepRecord>& records, double epsilon) {
  return crossing_load(records, 1.0 - epsilon);
}

inline constexpr const char* kCsvHeader = "G,n,decoder,mean_T,std_T,mean_P_coll,std_P_coll,runs,heuristic_P_coll";

inline void write_csv(const std::vector<LoadSweepRecord>& records, std::ostream& os) {
  auto fixed6 = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  std::vector<LoadSweepRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(), [](const LoadSweepRecord& a, const LoadSweepRecord& b) {
    if (a.G != b.G) return a.G < b.G;
    return decoder_name(a.decoder) < decoder_name(b.decoder);
  });
  os << kCsvHeader << '\n';
  for (const auto& r : sorted) {
    os << fixed6(r.G) << ',' << r.n << ',' << decoder_name(r.decoder) << ',' << fixed6(r.mean_T) << ','
       << fixed6(r.std_T) << ',' << fixed6(r.mean_P_coll) << ',' << fixed6(r.std_P_coll) << ',' << r.runs << ','
       << (r.heuristic_P_coll ? fixed6(*r.heuristic_P_coll) : std::string()) << '\n';
  }
}

inline void emit_csv(const std::vector<LoadSweepRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_csv(records, out);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

// Single-station reference system: one receiver hears all n users over tau
// slots and runs temporal SIC.

struct SingleStationPoint {
  double H = 0.0;  // n / tau
  std::size_t n = 0;
  double mean_T = 0.0;  // collected users per slot
  double mean_P_coll = 0.0;
};

inline std::size_t simulate_single_station(const TemporalDegreeDistribution& dist, std::size_t n, std::size_t tau,
                                           RandomStream& rng) {
  if (n == 0) return 0;
  const FramePlan plan = sample_frame_plan(dist, n, tau, rng);
  std::vector<std::vector<std::size_t>> stations(n, std::vector<std::size_t>{0});
  const SystemGraph g(std::move(stations), plan.activation, 1, tau);
  return decode_temporal(g).collected_count();
}

inline std::vector<SingleStationPoint> single_station_sweep(const TemporalDegreeDistribution& dist, std::size_t tau,
                                                            const std::vector<double>& H_values, std::size_t runs,
                                                            std::uint64_t seed) {
  std::vector<SingleStationPoint> out;
  for (std::size_t p = 0; p < H_values.size(); ++p) {
    const auto n = static_cast<std::size_t>(std::llround(H_values[p] * static_cast<double>(tau)));
    double collected = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
      auto rng = RandomStream::derive(seed, {p, r});
      collected += static_cast<double>(simulate_single_station(dist, n, tau, rng));
    }
    collected /= static_cast<double>(runs);
    SingleStationPoint pt;
    pt.n = n;
    pt.H = static_cast<double>(n) / static_cast<double>(tau);
    pt.mean_T = collected / static_cast<double>(tau);
    pt.mean_P_coll = n ? collected / static_cast<double>(n) : 0.0;
    out.push_back(pt);
  }
  return out;
}

}  // namespace coopaloha
