#pragma once

// Exact analysis of finite Markov chains induced by stationary policies.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ratiosynth/model.hpp"

namespace ratiosynth {

/// Edges with probability at or below this are ignored when classifying states.
inline constexpr double kSupportTol = 1e-12;

struct ChainAnalysis {
  Mc chain;
  /// Bottom strongly connected components, each sorted, ordered by first state.
  std::vector<std::vector<StateId>> recurrent_classes;
  std::vector<StateId> transient;
  /// Recurrent class index per state, or -1 for transient states.
  std::vector<int> class_of;
  /// Limit matrix P* (Cesaro limit of the powers of P).
  Eigen::MatrixXd limit;
  /// absorb(s, k): probability of ending in recurrent class k from s.
  Eigen::MatrixXd absorb;
  /// Stationary distribution of each class, embedded in the full state space.
  std::vector<Eigen::VectorXd> stationary;

  bool unichain() const { return recurrent_classes.size() == 1; }
  /// Classes reached with positive probability from `from`.
  std::vector<std::size_t> reachable_classes(StateId from) const;
};

ChainAnalysis analyze(const Mc& chain);

/// W(from): long-run average of the state utility vector v.
double average_utility(const ChainAnalysis& ca, const Eigen::VectorXd& v, StateId from);
double average_utility(const ChainAnalysis& ca, const UtilityFn& u, const StationaryPolicy& p,
                       StateId from);

/// Per-class reward/cost ratio.
std::vector<double> class_ratios(const ChainAnalysis& ca, const Eigen::VectorXd& reward,
                                 const Eigen::VectorXd& cost);

/// Sum over recurrent classes of absorption probability times class ratio.
double efficiency(const ChainAnalysis& ca, const Eigen::VectorXd& reward,
                  const Eigen::VectorXd& cost, StateId from);
double efficiency(const ChainAnalysis& ca, const UtilityFn& r, const UtilityFn& c,
                  const StationaryPolicy& p, StateId from);

/// Analyzes the chain of `p` on `m` and returns its efficiency from m.initial.
double policy_efficiency(const Mdp& m, const StationaryPolicy& p, const UtilityFn& r,
                         const UtilityFn& c);

struct PotentialVector {
  Eigen::VectorXd g;
  /// max-norm of (I - P + P*) g - v.
  double residual = 0.0;
};

/// Solves (I - P + P*) g = v. Throws Error(SingularSystem) if the residual
/// exceeds 1e-8 relative to max(1, |v|).
PotentialVector potential_vector(const ChainAnalysis& ca, const Eigen::VectorXd& v);
PotentialVector potential_vector(const ChainAnalysis& ca, const UtilityFn& u,
                                 const StationaryPolicy& p);

/// (v' - v) + (P' - P) g, with g the potential of `mu` for `u`.
Eigen::VectorXd deviation_vector(const Mdp& m, const StationaryPolicy& mu,
                                 const StationaryPolicy& mu_prime, const UtilityFn& u);

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Efficiency change when mixing `mu_prime` into `mu` with weight delta,
/// computed directly (lhs) and through the deviation vectors (rhs).
/// Throws Error(NotUnichain) unless mu's chain is unichain.
IdentityCheck ratio_perturbation_identity_check(const Mdp& m, const StationaryPolicy& mu,
                                                const StationaryPolicy& mu_prime,
                                                const UtilityFn& r, const UtilityFn& c,
                                                double delta);

/// Same for the long-run average of a single utility.
IdentityCheck average_perturbation_identity_check(const Mdp& m, const StationaryPolicy& mu,
                                                  const StationaryPolicy& mu_prime,
                                                  const UtilityFn& u, double delta);

}  // namespace ratiosynth
