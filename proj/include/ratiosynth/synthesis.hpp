#pragma once

// Perturbation-based synthesis of efficient policies that satisfy a Rabin
// task with probability one.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ratiosynth/chain.hpp"
#include "ratiosynth/graph.hpp"
#include "ratiosynth/lp.hpp"
#include "ratiosynth/model.hpp"

namespace ratiosynth {

enum class DeltaMethod { Estimated, Exact };

std::string_view to_string(DeltaMethod m);

struct PerturbationPlan {
  StationaryPolicy mu_opt;
  StationaryPolicy mu_irr;
  double delta = 0.0;
  DeltaMethod method = DeltaMethod::Estimated;
  /// max-norm of D_R - J D_C.
  double d_inf = 0.0;
  double c_min = 0.0;
  /// Efficiency of mu_opt.
  double base_value = 0.0;
  /// D_inf vanished, so any delta loses nothing.
  bool degenerate = false;
};

/// Uniform over the component's actions (choice positions of `m`); states
/// outside the component get a uniform row over all their choices.
StationaryPolicy uniform_irreducible_policy(const Mdp& m, const SubMdp& sub);

/// delta = epsilon c_min / D_inf, clamped below 1.
PerturbationPlan perturbation_degree_estimated(const Mdp& m, const StationaryPolicy& mu_opt,
                                               const StationaryPolicy& mu_irr,
                                               const UtilityFn& r, const UtilityFn& c,
                                               double epsilon);

/// Bisection for the largest delta whose mixture loses at most epsilon.
PerturbationPlan perturbation_degree_exact(const Mdp& m, const StationaryPolicy& mu_opt,
                                           const StationaryPolicy& mu_irr, const UtilityFn& r,
                                           const UtilityFn& c, double epsilon,
                                           double width = 1e-6);

/// Optional replacement for the uniform irreducible policy; receives the
/// component as a standalone Mdp.
using IrreducibleFactory = std::function<StationaryPolicy(const Mdp&)>;

struct SynthesisOptions {
  DeltaMethod method = DeltaMethod::Estimated;
  double bisection_width = 1e-6;
  double k_margin = 1.0;
  double support_threshold = kSupportThreshold;
  bool allow_no_perturbation = true;
  IrreducibleFactory irreducible;
  SimplexOptions simplex;
};

struct AcceptanceWitness {
  std::vector<StateId> recurrent_class;
  /// Pair index whose G set the class meets while avoiding B, if any.
  std::optional<std::size_t> pair;
  /// Absorption probability from the initial state.
  double probability = 0.0;
};

struct AmecSummary {
  EndComponent component;
  double value = 0.0;
  double delta = 0.0;
  bool no_perturbation = false;
  /// The final policy runs this component's synthesized policy.
  bool used = false;
};

struct SynthesisReport {
  StationaryPolicy policy;
  /// Optimal value: best MAEC efficiency (communicating case) or the optimal
  /// surrogate average reward from the initial state (general case).
  double value = 0.0;
  /// Efficiency of `policy` from the initial state.
  double achieved = 0.0;
  double epsilon = 0.0;
  DeltaMethod method = DeltaMethod::Estimated;
  double delta = 0.0;
  double d_inf = 0.0;
  bool no_perturbation = false;
  bool degenerate_bound = false;
  std::size_t amec_chosen = 0;
  std::vector<AmecSummary> amecs;
  std::vector<AcceptanceWitness> certificates;
  bool accepted_wp1 = false;
  double k = 0.0;
  std::vector<std::string> notes;
};

/// Witnesses for the recurrent classes reachable from the initial state.
std::vector<AcceptanceWitness> acceptance_certificates(const ProductMdp& pm,
                                                       const StationaryPolicy& p,
                                                       const ChainAnalysis& ca);
/// Every reachable class is accepting and absorption is complete.
bool accepted_with_probability_one(const std::vector<AcceptanceWitness>& certs);

/// Algorithm for communicating products: best MAEC, perturb towards an
/// irreducible policy, attach the remaining states.
SynthesisReport synth_communicating(const ProductMdp& pm, const UtilityFn& r, const UtilityFn& c,
                                    double epsilon, const SynthesisOptions& opt = {});

struct RewardK {
  UtilityFn reward;
  double k = 0.0;
};

/// Reward equal to the component value on component actions and K elsewhere,
/// K = -max|r| / min c - margin.
RewardK build_reward_k(const Mdp& m, const std::vector<EndComponent>& amecs,
                       const std::vector<double>& values, const UtilityFn& r,
                       const UtilityFn& c, double margin = 1.0);

/// General products: per-AMEC synthesis stitched together through the
/// surrogate average-reward program.
SynthesisReport synth_general(const ProductMdp& pm, const UtilityFn& r, const UtilityFn& c,
                              double epsilon, const SynthesisOptions& opt = {});

}  // namespace ratiosynth
