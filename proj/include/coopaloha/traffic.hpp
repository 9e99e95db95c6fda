#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coopaloha/random.hpp"

namespace coopaloha {

/// Temporal degree distribution Lambda_q with finite support q = 1..q_max.
class TemporalDegreeDistribution {
 public:
  /// Accepts (q, probability) pairs. The total must be within 1e-12 of one;
  /// it is then renormalized exactly. Anything looser is rejected.
  explicit TemporalDegreeDistribution(const std::vector<std::pair<std::size_t, double>>& pairs) {
    if (pairs.empty()) throw std::invalid_argument("degree distribution: no (q, probability) pairs");
    std::map<std::size_t, double> by_q;
    for (const auto& [q, p] : pairs) {
      if (q == 0) throw std::invalid_argument("degree distribution: q must be at least 1");
      if (!std::isfinite(p) || p < 0.0) {
        throw std::invalid_argument("degree distribution: invalid probability for q=" + std::to_string(q));
      }
      if (!by_q.emplace(q, p).second) {
        throw std::invalid_argument("degree distribution: duplicate q=" + std::to_string(q));
      }
    }
    double total = 0.0;
    for (const auto& [q, p] : by_q) total += p;
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("degree distribution: probabilities sum to " + std::to_string(total));
    }
    std::size_t q_max = 0;
    for (const auto& [q, p] : by_q) {
      if (p > 0.0) q_max = q;
    }
    probabilities_.assign(q_max, 0.0);
    for (const auto& [q, p] : by_q) {
      if (q <= q_max) probabilities_[q - 1] = p / total;
    }
    cdf_.resize(q_max);
    std::partial_sum(probabilities_.begin(), probabilities_.end(), cdf_.begin());
  }

  /// Parses "q:p,q:p,..." e.g. "2:1.0" or "1:0.5,3:0.5".
  static TemporalDegreeDistribution parse(std::string_view text) {
    std::vector<std::pair<std::size_t, double>> pairs;
    std::stringstream ss{std::string(text)};
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw std::invalid_argument("degree distribution: expected q:p, got '" + item + "'");
      }
      try {
        std::size_t used = 0;
        const long q = std::stol(item.substr(0, colon), &used);
        if (used != colon || q < 1) throw std::invalid_argument("q");
        const std::string p_text = item.substr(colon + 1);
        const double p = std::stod(p_text, &used);
        if (used != p_text.size()) throw std::invalid_argument("p");
        pairs.emplace_back(static_cast<std::size_t>(q), p);
      } catch (const std::logic_error&) {
        throw std::invalid_argument("degree distribution: cannot parse '" + item + "'");
      }
    }
    return TemporalDegreeDistribution(pairs);
  }

  static TemporalDegreeDistribution regular(std::size_t q) { return TemporalDegreeDistribution({{q, 1.0}}); }

  std::size_t q_max() const noexcept { return probabilities_.size(); }

  /// Lambda_q; zero outside the support.
  double probability(std::size_t q) const noexcept {
    return (q >= 1 && q <= probabilities_.size()) ? probabilities_[q - 1] : 0.0;
  }

  /// Non-zero (q, Lambda_q) entries, ascending in q.
  std::vector<std::pair<std::size_t, double>> support() const {
    std::vector<std::pair<std::size_t, double>> out;
    for (std::size_t q = 1; q <= probabilities_.size(); ++q) {
      if (probabilities_[q - 1] > 0.0) out.emplace_back(q, probabilities_[q - 1]);
    }
    return out;
  }

  /// Inverse-CDF draw of a temporal degree.
  std::size_t sample(RandomStream& rng) const {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return q_max();
    return static_cast<std::size_t>(it - cdf_.begin()) + 1;
  }

  std::string to_string() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [q, p] : support()) {
      os << (first ? "" : ",") << q << ':' << p;
      first = false;
    }
    return os.str();
  }

 private:
  std::vector<double> probabilities_;
  std::vector<double> cdf_;
};

/// lambda = E[Q].
inline double mean_degree(const TemporalDegreeDistribution& dist) {
  double lambda = 0.0;
  for (const auto& [q, p] : dist.support()) lambda += static_cast<double>(q) * p;
  return lambda;
}

/// Activation slots of every user within one frame. Slots are numbered 1..tau.
struct FramePlan {
  std::size_t tau = 0;
  std::vector<std::vector<std::size_t>> activation;

  std::size_t user_count() const noexcept { return activation.size(); }
  std::size_t temporal_degree(std::size_t user) const { return activation.at(user).size(); }
};

/// Draws Q_i ~ Lambda for every user, then a uniform Q_i-subset of {1..tau}.
inline FramePlan sample_frame_plan(const TemporalDegreeDistribution& dist, std::size_t n, std::size_t tau,
                                   RandomStream& rng) {
  if (tau == 0) throw std::invalid_argument("sample_frame_plan: tau must be at least 1");
  if (dist.q_max() > tau) {
    throw std::invalid_argument("sample_frame_plan: q_max=" + std::to_string(dist.q_max()) +
                                " exceeds tau=" + std::to_string(tau));
  }
  FramePlan plan{tau, std::vector<std::vector<std::size_t>>(n)};
  std::vector<std::size_t> pool(tau);
  std::iota(pool.begin(), pool.end(), std::size_t{1});
  for (auto& slots : plan.activation) {
    const std::size_t q = dist.sample(rng);
    // Partial Fisher-Yates: the first q entries become a uniform q-subset.
    for (std::size_t k = 0; k < q; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng.below(tau - k));
      std::swap(pool[k], pool[j]);
    }
    slots.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(q));
    std::sort(slots.begin(), slots.end());
  }
  return plan;
}

}  // namespace coopaloha
