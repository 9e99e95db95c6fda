#pragma once

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "coopaloha/analysis.hpp"
#include "coopaloha/decoders.hpp"
#include "coopaloha/fixtures.hpp"
#include "coopaloha/graph.hpp"
#include "coopaloha/harness.hpp"

namespace coopaloha {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitIo = 2 };

namespace detail {

inline std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline void print_users(std::ostream& os, const std::vector<std::size_t>& users) {
  os << '{';
  for (std::size_t k = 0; k < users.size(); ++k) os << (k ? "," : "") << 'U' << users[k] + 1;
  os << '}';
}

inline int run_fixtures(std::ostream& out) {
  for (const auto& fx : fixtures::all()) {
    out << fx.name << ": " << fx.description << '\n';
    for (Decoder d : kAllDecoders) {
      std::vector<TraceEvent> trace;
      DecodeOptions opts;
      opts.trace = &trace;
      const auto res = decode(d, fx.graph, opts);
      out << "  " << decoder_name(d) << " collected ";
      print_users(out, res.collected_users());
      out << '\n';
      for (const auto& ev : trace) out << "    " << ev << '\n';
    }
  }
  return kExitOk;
}

}  // namespace detail

/// Command-line entry point. Returns 0 on success, 1 on usage or
/// configuration errors, 2 on I/O errors.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Cooperative framed slotted Aloha simulator and analysis"};
  app.require_subcommand(1);

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo load sweep over all configured decoders");
  std::string config_path;
  std::string output_override;
  unsigned threads = 0;
  sweep->add_option("--config", config_path, "JSON experiment config")->required();
  sweep->add_option("--output", output_override, "CSV path (overrides output_path; '-' for stdout)");
  sweep->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

  auto* analyze = app.add_subcommand("analyze", "And-or-tree estimate of the decoding probability");
  double a_delta = 0.0;
  double a_G = 0.0;
  std::string a_dist;
  std::size_t a_S = 10000;
  analyze->add_option("--delta", a_delta, "mean spatial degree")->required();
  analyze->add_option("--G", a_G, "normalized load")->required();
  analyze->add_option("--dist", a_dist, "temporal degree distribution, e.g. 2:1.0")->required();
  analyze->add_option("--S", a_S, "iteration cap");

  auto* threshold = app.add_subcommand("threshold", "Single-station threshold H* and the derived bounds");
  std::string t_dist;
  double t_tol = 1e-3;
  std::vector<double> t_deltas;
  threshold->add_option("--dist", t_dist, "temporal degree distribution, e.g. 2:1.0")->required();
  threshold->add_option("--tol", t_tol, "bisection tolerance");
  threshold->add_option("--delta", t_deltas, "delta values for the bound on G*");

  auto* fixtures_cmd = app.add_subcommand("fixtures", "Decode the hand-checked fixtures and print traces");

  auto* dump = app.add_subcommand("dump-graph", "Sample one system and print its check-node adjacency");
  std::size_t d_n = 20;
  std::size_t d_m = 4;
  std::size_t d_tau = 4;
  double d_delta = 3.0;
  std::string d_dist = "2:1.0";
  std::uint64_t d_seed = 1;
  dump->add_option("--n", d_n, "users");
  dump->add_option("--m", d_m, "stations");
  dump->add_option("--tau", d_tau, "slots per frame");
  dump->add_option("--delta", d_delta, "mean spatial degree");
  dump->add_option("--dist", d_dist, "temporal degree distribution");
  dump->add_option("--seed", d_seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitConfig;
  }

  try {
    if (*sweep) {
      const ExperimentConfig cfg = load_config(config_path);
      const auto records = run_sweep(cfg, threads);
      const std::string path = output_override.empty() ? cfg.output_path : output_override;
      const bool to_stdout = path.empty() || path == "-";
      if (to_stdout) {
        write_csv(records, out);
      } else {
        emit_csv(records, path);
      }
      std::ostream& summary = to_stdout ? err : out;
      for (Decoder d : cfg.decoders) {
        const auto rows = select_decoder(records, d);
        if (rows.empty()) continue;
        const auto& peak = peak_throughput(rows);
        const auto gb = estimate_G_bullet(rows, cfg.epsilon);
        summary << decoder_name(d) << ": peak_T=" << detail::fmt6(peak.mean_T) << " at G=" << detail::fmt6(peak.G)
                << " G_bullet=" << detail::fmt6(gb.value_or(0.0)) << '\n';
      }
      return kExitOk;
    }
    if (*analyze) {
      const AsymptoticParams params(a_delta, a_G, TemporalDegreeDistribution::parse(a_dist));
      const auto res = and_or_tree(params, a_S);
      out << "p_S=" << detail::fmt6(res.final_state.p) << " iterations=" << res.final_state.s << '\n';
      out << "estimate=" << detail::fmt6(res.estimated_p_coll) << '\n';
      out << "coverage=" << detail::fmt6(coverage_probability(a_delta)) << '\n';
      return kExitOk;
    }
    if (*threshold) {
      const auto dist = TemporalDegreeDistribution::parse(t_dist);
      const double h = find_threshold_H(dist, t_tol);
      out << "H*=" << detail::fmt6(h) << '\n';
      for (double delta : t_deltas) {
        out << "delta=" << delta << " G*_lower_bound=" << detail::fmt6(theorem1_bound(delta, h))
            << " T*_lower_bound=" << detail::fmt6(peak_throughput_bound(delta, h)) << '\n';
      }
      return kExitOk;
    }
    if (*fixtures_cmd) return detail::run_fixtures(out);
    if (*dump) {
      auto rng = RandomStream(d_seed);
      auto geo = rng.split(1);
      auto traffic = rng.split(2);
      const auto dep = build_deployment(d_n, d_m, radius_for_delta(d_delta, d_m), geo);
      const auto plan = sample_frame_plan(TemporalDegreeDistribution::parse(d_dist), d_n, d_tau, traffic);
      dump_adjacency(build_graph(dep, plan), out);
      return kExitOk;
    }
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace coopaloha
