// End-to-end acceptance run: reproduces the reference experiments and checks
// each criterion at its stated tolerance, printing one PASS/FAIL line apiece.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "coopaloha/coopaloha.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace coopaloha;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

void report(int id, const char* title, const Verdict& v) {
  std::printf("%s C%d %s: %s\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str());
  std::fflush(stdout);
  if (!v.pass) ++g_failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ExperimentConfig reference_config(double delta) {
  ExperimentConfig cfg;
  cfg.delta = delta;
  cfg.m = 40;
  cfg.tau = 40;
  cfg.runs_per_point = 30;
  cfg.master_seed = 2024;
  return cfg;
}

std::map<Decoder, double> peaks(const std::vector<LoadSweepRecord>& records) {
  std::map<Decoder, double> out;
  for (Decoder d : kAllDecoders) out[d] = peak_throughput(select_decoder(records, d)).mean_T;
  return out;
}

// Load at which P(coll) first drops below 90% of its low-load plateau.
std::optional<double> decline_onset(const std::vector<LoadSweepRecord>& records) {
  const auto st = select_decoder(records, Decoder::spatiotemporal);
  return crossing_load(st, 0.9 * st.front().mean_P_coll);
}

Verdict criterion_peaks(const std::vector<LoadSweepRecord>& records) {
  const std::map<Decoder, double> target{{Decoder::spatiotemporal, 0.45},
                                         {Decoder::spatial, 0.23},
                                         {Decoder::temporal, 0.22},
                                         {Decoder::noncooperative, 0.16}};
  Verdict v;
  for (const auto& [d, peak] : peaks(records)) {
    const bool ok = std::abs(peak - target.at(d)) <= 0.05;
    v.pass = v.pass && ok;
    v.detail += std::string(decoder_name(d)) + "=" + fmt("%.3f", peak) + "(target " + fmt("%.2f", target.at(d)) +
                (ok ? ") " : ", out of band) ");
  }
  return v;
}

Verdict criterion_dense(const std::vector<LoadSweepRecord>& sparse, const std::vector<LoadSweepRecord>& dense) {
  Verdict v;
  // Paired runs share graphs, so per-instance dominance carries over to every mean.
  const auto nc = select_decoder(dense, Decoder::noncooperative);
  const auto sp = select_decoder(dense, Decoder::spatial);
  const auto te = select_decoder(dense, Decoder::temporal);
  const auto st = select_decoder(dense, Decoder::spatiotemporal);
  bool ordered = true;
  for (std::size_t i = 0; i < st.size(); ++i) {
    ordered = ordered && nc[i].mean_T <= sp[i].mean_T && nc[i].mean_T <= te[i].mean_T &&
              sp[i].mean_T <= st[i].mean_T && te[i].mean_T <= st[i].mean_T;
  }
  auto rank = [](const std::map<Decoder, double>& p) {
    std::vector<Decoder> r(std::begin(kAllDecoders), std::end(kAllDecoders));
    std::sort(r.begin(), r.end(), [&](Decoder a, Decoder b) { return p.at(a) > p.at(b); });
    return r;
  };
  const auto p3 = peaks(sparse);
  const auto p7 = peaks(dense);
  const bool same_rank = rank(p3) == rank(p7);
  const bool lower_peak = p7.at(Decoder::spatiotemporal) < p3.at(Decoder::spatiotemporal);
  const auto on3 = decline_onset(sparse);
  const auto on7 = decline_onset(dense);
  const bool earlier = on3 && on7 && *on7 < *on3;
  v.pass = ordered && same_rank && lower_peak && earlier;
  v.detail = std::string("per-load ordering ") + (ordered ? "holds" : "violated") + ", peak ranking " +
             (same_rank ? "matches" : "differs") + ", spatiotemporal peak " +
             fmt("%.3f", p7.at(Decoder::spatiotemporal)) + " vs " + fmt("%.3f", p3.at(Decoder::spatiotemporal)) +
             ", decline onset " + (on7 ? fmt("%.3f", *on7) : std::string("none")) + " vs " +
             (on3 ? fmt("%.3f", *on3) : std::string("none"));
  return v;
}

Verdict criterion_coverage() {
  const double delta = 3.0;
  const std::size_t m = 40;
  const double r = radius_for_delta(delta, m);
  std::size_t nominal = 0;
  std::size_t nominal_covered = 0;
  std::size_t all = 0;
  std::size_t all_covered = 0;
  for (std::uint64_t k = 0; nominal < 50000; ++k) {
    auto rng = RandomStream::derive(3003, {k});
    const auto dep = build_deployment(2000, m, r, rng);
    for (std::size_t i = 0; i < dep.user_count(); ++i) {
      ++all;
      all_covered += dep.covered(i) ? 1 : 0;
      if (!is_nominal(dep.user_positions()[i], r)) continue;
      ++nominal;
      nominal_covered += dep.covered(i) ? 1 : 0;
    }
  }
  const double frac = static_cast<double>(nominal_covered) / static_cast<double>(nominal);
  const double whole = static_cast<double>(all_covered) / static_cast<double>(all);
  const double target = coverage_probability(delta);
  Verdict v;
  v.pass = std::abs(frac - target) <= 0.01;
  v.detail = "nominal users " + std::to_string(nominal) + " covered " + fmt("%.4f", frac) + " vs " +
             fmt("%.6f", target) + " (whole square incl. boundary: " + fmt("%.4f", whole) + ")";
  return v;
}

Verdict criterion_gain(const std::vector<LoadSweepRecord>& records) {
  std::vector<double> H;
  for (int k = 1; k <= 48; ++k) H.push_back(0.025 * k);
  const auto single = single_station_sweep(TemporalDegreeDistribution::regular(2), 40, H, 2000, 4004);
  const auto best = std::max_element(single.begin(), single.end(),
                                     [](const auto& a, const auto& b) { return a.mean_T < b.mean_T; });
  const double coop = peak_throughput(select_decoder(records, Decoder::spatiotemporal)).mean_T;
  const double gain = coop * 40.0 / best->mean_T;
  Verdict v;
  v.pass = gain >= 30.0 && std::abs(best->mean_T - 0.55) <= 0.07;
  v.detail = "single-station peak " + fmt("%.3f", best->mean_T) + " at H=" + fmt("%.3f", best->H) +
             ", cooperative " + fmt("%.3f", coop) + " x 40 stations = gain " + fmt("%.1f", gain);
  return v;
}

Verdict criterion_heuristic(const std::vector<LoadSweepRecord>& records) {
  double worst = 0.0;
  double worst_G = 0.0;
  std::size_t outside = 0;
  std::size_t rows = 0;
  for (const auto& rec : select_decoder(records, Decoder::spatiotemporal)) {
    if (!rec.heuristic_P_coll) continue;
    ++rows;
    const double dev = std::abs(*rec.heuristic_P_coll - rec.mean_P_coll);
    if (dev > 0.15) ++outside;
    if (dev > worst) {
      worst = dev;
      worst_G = rec.G;
    }
  }
  Verdict v;
  v.pass = rows > 0 && outside == 0;
  v.detail = "max |estimate - simulation| = " + fmt("%.3f", worst) + " at G=" + fmt("%.2f", worst_G) + "; " +
             std::to_string(outside) + " of " + std::to_string(rows) + " loads beyond 0.15";
  return v;
}

Verdict criterion_bound() {
  const double H_star = find_threshold_H(TemporalDegreeDistribution::regular(2), 1e-4);
  Verdict v;
  v.detail = "H*=" + fmt("%.4f", H_star);
  for (double delta : {3.0, 7.0}) {
    auto cfg = reference_config(delta);
    const double bound = theorem1_bound(delta, H_star);
    cfg.G_values = {bound};
    cfg.runs_per_point = 4000;
    cfg.decoders = {Decoder::spatiotemporal};
    const auto rec = run_sweep(cfg).front();
    const bool ok = std::abs(rec.mean_P_coll - rec.mean_covered) <= 0.01;
    v.pass = v.pass && ok;
    v.detail += "; delta=" + fmt("%.0f", delta) + " bound G=" + fmt("%.5f", bound) + " (n=" +
                std::to_string(rec.n) + "): P_coll " + fmt("%.4f", rec.mean_P_coll) + " vs covered " +
                fmt("%.4f", rec.mean_covered);
  }
  return v;
}

Verdict criterion_invariants() {
  using testing_support::as_set;
  using testing_support::random_instance;
  using testing_support::subset;
  Verdict v;
  auto fail = [&](const std::string& what) {
    v.pass = false;
    v.detail += what + " FAILED; ";
  };

  bool ok = true;
  for (std::uint64_t seed = 0; seed < 200 && ok; ++seed) {
    const auto g = random_instance(seed);
    const auto nc = as_set(decode_noncooperative(g));
    const auto sp = as_set(decode_spatial(g));
    const auto te = as_set(decode_temporal(g));
    const auto st = as_set(decode_spatiotemporal(g));
    ok = subset(nc, sp) && subset(nc, te) && subset(sp, st) && subset(te, st);
    for (std::size_t u : st) ok = ok && g.covered(u);
  }
  ok ? void(v.detail += "dominance(200) ok; ") : fail("dominance");

  ok = true;
  for (std::uint64_t seed = 0; seed < 100 && ok; ++seed) {
    const auto g = random_instance(seed);
    const auto sp = decode_spatial(g).collected;
    const auto te = decode_temporal(g).collected;
    const auto st = decode_spatiotemporal(g).collected;
    auto rng = RandomStream::derive(71, {seed});
    for (int k = 0; k < 10 && ok; ++k) {
      const auto order = ProcessingOrder::shuffled(g.station_count(), g.tau(), rng);
      DecodeOptions opts;
      opts.order = &order;
      ok = decode_spatial(g, opts).collected == sp && decode_temporal(g, opts).collected == te &&
           decode_spatiotemporal(g, opts).collected == st;
    }
  }
  ok ? void(v.detail += "confluence(10 orders) ok; ") : fail("confluence");

  std::size_t classes = 0;
  std::size_t mismatches = 0;
  for (std::size_t m = 1; m <= 3; ++m) {
    for (std::size_t tau = 1; tau <= 3; ++tau) {
      for (std::size_t n = 1; n <= 6; ++n) {
        oracle::for_each_small_instance(m, tau, n, [&](const auto& adj, const auto& act) {
          ++classes;
          const auto g = oracle::graph_from_masks(adj, act, m, tau);
          if (testing_support::collected_mask(decode_spatiotemporal(g)) !=
              oracle::graph_cleaning_masks(adj, act, m, tau)) {
            ++mismatches;
          }
        });
      }
    }
  }
  mismatches == 0 ? void(v.detail += "exhaustive oracle " + std::to_string(classes) + " classes ok; ")
                  : fail("exhaustive oracle (" + std::to_string(mismatches) + " mismatches)");

  ok = true;
  for (std::uint64_t seed = 0; seed < 100 && ok; ++seed) {
    const auto g = random_instance(seed);
    DecodeOptions twice;
    twice.iteration_cap = 2 * g.tau() * g.station_count();
    const auto capped = decode_spatiotemporal(g);
    ok = capped.iterations_used <= g.tau() * g.station_count() &&
         decode_spatiotemporal(g, twice).collected == capped.collected;
  }
  ok ? void(v.detail += "cap ok; ") : fail("cap");

  ok = true;
  for (std::uint64_t seed = 0; seed < 50 && ok; ++seed) {
    const auto g = random_instance(seed);
    std::size_t check_side = 0;
    for (std::size_t c = 0; c < g.check_count(); ++c) check_side += g.check_degree(c);
    std::size_t user_side = 0;
    for (std::size_t i = 0; i < g.user_count(); ++i) user_side += g.user_degree(i);
    ok = check_side == user_side && user_side == g.edge_count();
  }
  ok ? void(v.detail += "handshake ok; ") : fail("handshake");

  {
    const double delta = 3.0;
    const std::size_t m = 400;
    const double r = radius_for_delta(delta, m);
    RandomStream rng(7007);
    const auto dep = build_deployment(10000, m, r, rng);
    std::map<std::size_t, std::size_t> hist;
    for (std::size_t i = 0; i < dep.user_count(); ++i) {
      if (is_nominal(dep.user_positions()[i], r)) ++hist[dep.spatial_degree(i)];
    }
    const double tv = oracle::tv_to_poisson(hist, delta);
    tv < 0.03 ? void(v.detail += "user-degree TV " + fmt("%.4f", tv) + "; ") : fail("user-degree TV");
  }
  {
    const std::size_t m = 200;
    const std::size_t tau = 200;
    const double G = 0.3;
    const double delta = 3.0;
    const auto n = static_cast<std::size_t>(G * tau * m);
    RandomStream rng(8008);
    auto geo = rng.split(1);
    auto traffic = rng.split(2);
    const double r = radius_for_delta(delta, m);
    const auto dep = build_deployment(n, m, r, geo);
    const auto g = build_graph(dep, sample_frame_plan(TemporalDegreeDistribution::regular(2), n, tau, traffic));
    std::vector<std::size_t> inner;
    for (std::size_t l = 0; l < m; ++l) {
      if (is_nominal(dep.station_positions()[l], r)) inner.push_back(l);
    }
    const double tv = oracle::tv_to_poisson(empirical_check_degree_stats(g, inner).histogram, G * delta * 2.0);
    tv < 0.03 ? void(v.detail += "check-degree TV " + fmt("%.4f", tv) + "; ") : fail("check-degree TV");
  }

  {
    const double h = 1e-5;
    double worst = 0.0;
    for (const auto& dist : {TemporalDegreeDistribution::regular(2),
                             TemporalDegreeDistribution({{1, 0.25}, {2, 0.25}, {5, 0.5}})}) {
      const AsymptoticParams p(3.0, 0.4, dist);
      const double d1 = (3.0 * Gamma(1.0, p) - 4.0 * Gamma(1.0 - h, p) + Gamma(1.0 - 2 * h, p)) / (2 * h);
      for (int k = 1; k <= 9; ++k) {
        const double x = 0.1 * k;
        const double dx = (Gamma(x + h, p) - Gamma(x - h, p)) / (2 * h);
        worst = std::max(worst, std::abs(gamma_edge(x, p) - dx / d1));
      }
    }
    worst <= 1e-6 ? void(v.detail += "gamma finite-difference " + fmt("%.1e", worst) + "; ")
                  : fail("gamma finite-difference");
  }

  {
    auto cfg = reference_config(3.0);
    cfg.runs_per_point = 5;
    std::ostringstream a;
    std::ostringstream b;
    write_csv(run_sweep(cfg, 1), a);
    write_csv(run_sweep(cfg, 0), b);
    a.str() == b.str() ? void(v.detail += "CSV rerun byte-identical") : fail("CSV rerun");
  }
  return v;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const auto sparse = run_sweep(reference_config(3.0));
  const auto dense = run_sweep(reference_config(7.0));
  emit_csv(sparse, "acceptance_delta3.csv");
  emit_csv(dense, "acceptance_delta7.csv");

  report(1, "reference sweep peaks (delta=3)", criterion_peaks(sparse));
  report(2, "denser deployment ordering (delta=7)", criterion_dense(sparse, dense));
  report(3, "coverage", criterion_coverage());
  report(4, "gain over a single station", criterion_gain(sparse));
  report(5, "and-or-tree estimate tracks simulation", criterion_heuristic(sparse));
  report(6, "flat region at the lower bound", criterion_bound());
  report(7, "invariant suites", criterion_invariants());

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of 7 criteria failed (%.1f s)\n", g_failures, secs);
  return g_failures == 0 ? 0 : 1;
}
