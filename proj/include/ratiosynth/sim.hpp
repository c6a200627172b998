#pragma once

// Seeded Monte-Carlo rollouts of stationary policies.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ratiosynth/model.hpp"

namespace ratiosynth {

struct RolloutConfig {
  std::uint64_t steps = 100000;
  std::uint64_t rollouts = 8;
  std::uint64_t seed = 1;
};

struct RolloutStats {
  double mean_ratio = 0.0;
  /// Standard error of the mean across rollouts (0 for a single rollout).
  double stderr_ratio = 0.0;
  std::vector<double> ratios;
  /// Fraction of time steps spent in each state, averaged over rollouts.
  std::vector<double> visit_freq;
  /// Fraction of time steps at which each proposition held.
  std::vector<double> label_freq;
};

/// Throws Error(Param) for zero steps or rollouts.
RolloutStats simulate(const Mdp& m, const StationaryPolicy& p, const UtilityFn& r,
                      const UtilityFn& c, const RolloutConfig& cfg);

struct PairVisits {
  std::uint64_t good = 0;
  std::uint64_t bad = 0;
  /// Visits during the second half of each rollout.
  std::uint64_t good_late = 0;
  std::uint64_t bad_late = 0;
};

/// Visits to each pair's G and B states, summed over rollouts.
std::vector<PairVisits> acceptance_visits(const ProductMdp& pm, const StationaryPolicy& p,
                                          const RolloutConfig& cfg);

}  // namespace ratiosynth
