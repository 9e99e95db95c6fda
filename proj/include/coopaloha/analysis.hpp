#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "coopaloha/traffic.hpp"

namespace coopaloha {

/// Asymptotic regime: mean spatial degree delta, normalized load G and the
/// temporal degree distribution.
struct AsymptoticParams {
  double delta;
  double G;
  TemporalDegreeDistribution dist;

  AsymptoticParams(double delta_, double G_, TemporalDegreeDistribution dist_)
      : delta(delta_), G(G_), dist(std::move(dist_)) {
    if (!(delta > 0.0)) throw std::invalid_argument("AsymptoticParams: delta must be positive");
    if (!(G >= 0.0)) throw std::invalid_argument("AsymptoticParams: G must be non-negative");
  }
};

namespace detail {
inline void require_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(std::string(what) + ": argument " + std::to_string(x) + " outside [0, 1]");
  }
}
}  // namespace detail

/// Node-oriented user degree polynomial: sum_q Lambda_q exp(-delta (1 - x^q)).
inline double Gamma(double x, const AsymptoticParams& p) {
  detail::require_unit_interval(x, "Gamma");
  double sum = 0.0;
  for (const auto& [q, lq] : p.dist.support()) {
    sum += lq * std::exp(-p.delta * (1.0 - std::pow(x, static_cast<double>(q))));
  }
  return sum;
}

/// Edge-oriented user degree polynomial Gamma'(x) / Gamma'(1).
inline double gamma_edge(double x, const AsymptoticParams& p) {
  detail::require_unit_interval(x, "gamma_edge");
  const double lambda = mean_degree(p.dist);
  double sum = 0.0;
  for (const auto& [q, lq] : p.dist.support()) {
    const auto qd = static_cast<double>(q);
    sum += qd * lq / lambda * std::pow(x, qd - 1.0) * std::exp(-p.delta * (1.0 - std::pow(x, qd)));
  }
  return sum;
}

/// Edge-oriented check degree polynomial exp(-G delta lambda (1 - x)).
inline double chi(double x, const AsymptoticParams& p) {
  detail::require_unit_interval(x, "chi");
  return std::exp(-p.G * p.delta * mean_degree(p.dist) * (1.0 - x));
}

struct AndOrState {
  double p = 1.0;
  double q = 1.0;
  std::size_t s = 0;
};

struct AndOrOutcome {
  AndOrState final_state;
  double estimated_p_coll = 0.0;  // 1 - Gamma(p_S); a heuristic, not an exact limit
};

/// And-or-tree evolution q_s = gamma(p_{s-1}), p_s = 1 - chi(1 - q_s) from
/// p_0 = q_0 = 1, for at most S iterations or until |p_s - p_{s-1}| < 1e-12.
inline AndOrOutcome and_or_tree(const AsymptoticParams& params, std::size_t S,
                                std::vector<AndOrState>* trajectory = nullptr) {
  if (S == 0) throw std::invalid_argument("and_or_tree: S must be at least 1");
  AndOrState st;
  if (trajectory) trajectory->push_back(st);
  for (std::size_t s = 1; s <= S; ++s) {
    const double prev = st.p;
    st.q = gamma_edge(st.p, params);
    st.p = 1.0 - chi(1.0 - st.q, params);
    st.s = s;
    if (trajectory) trajectory->push_back(st);
    if (std::abs(st.p - prev) < 1e-12) break;
  }
  return {st, 1.0 - Gamma(st.p, params)};
}

/// Density evolution for one station hearing every user, at load H = n / tau.
/// Returns the estimated decoding probability 1 - Lambda(p_S).
inline double single_station_de(const TemporalDegreeDistribution& dist, double H, std::size_t S = 10000) {
  if (!(H >= 0.0)) throw std::invalid_argument("single_station_de: H must be non-negative");
  const double lambda = mean_degree(dist);
  const auto support = dist.support();
  auto edge_poly = [&](double x) {
    double sum = 0.0;
    for (const auto& [q, lq] : support) {
      sum += static_cast<double>(q) * lq / lambda * std::pow(x, static_cast<double>(q) - 1.0);
    }
    return sum;
  };
  double p = 1.0;
  for (std::size_t s = 1; s <= S; ++s) {
    const double q = edge_poly(p);
    const double next = 1.0 - std::exp(-H * lambda * q);
    const bool done = std::abs(next - p) < 1e-12;
    p = next;
    if (done) break;
  }
  double node = 0.0;
  for (const auto& [q, lq] : support) node += lq * std::pow(p, static_cast<double>(q));
  return 1.0 - node;
}

/// Decoding probability counted as "success" when searching for H*.
inline constexpr double kThresholdSuccess = 1.0 - 1e-4;
inline constexpr std::size_t kThresholdIterations = 10000;

/// Bisection on [0, 1] for the supremum of loads H at which single-station
/// density evolution still reaches kThresholdSuccess.
inline double find_threshold_H(const TemporalDegreeDistribution& dist, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("find_threshold_H: tol must be positive");
  auto below = [&](double H) { return single_station_de(dist, H, kThresholdIterations) >= kThresholdSuccess; };
  double lo = 0.0;
  double hi = 1.0;
  if (below(hi)) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (below(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Lower bound H* / (8 e delta) on the multi-station threshold G*(delta).
inline double theorem1_bound(double delta, double H_star) {
  if (!(delta > 0.0)) throw std::invalid_argument("theorem1_bound: delta must be positive");
  if (!(H_star >= 0.0)) throw std::invalid_argument("theorem1_bound: H* must be non-negative");
  return H_star / (8.0 * std::numbers::e * delta);
}

inline double coverage_probability(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("coverage_probability: delta must be positive");
  return -std::expm1(-delta);
}

/// Lower bound on the peak normalized throughput, (H*/(8e)) (1 - e^-delta) / delta.
inline double peak_throughput_bound(double delta, double H_star) {
  if (!(delta > 0.0)) throw std::invalid_argument("peak_throughput_bound: delta must be positive");
  return H_star / (8.0 * std::numbers::e) * coverage_probability(delta) / delta;
}

}  // namespace coopaloha
