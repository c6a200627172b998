#pragma once

// Core domain types: labeled MDPs, deterministic Rabin automata, their
// product, stationary policies, utility functions and induced Markov chains.
//
// States and actions are dense indices. Each state stores its available
// actions as a list of `Choice`s sorted by action id; policies and utility
// functions are indexed by (state, choice position), so mass outside the
// available actions cannot be represented.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ratiosynth/error.hpp"

namespace ratiosynth {

using StateId = std::size_t;
using ActionId = std::size_t;
using PropId = std::size_t;
using AutStateId = std::size_t;

/// Set of atomic propositions as a bitmask (bit i = proposition i).
using LabelSet = std::uint32_t;
inline constexpr std::size_t kMaxProps = 20;

inline constexpr double kStochasticTol = 1e-9;
inline constexpr double kAlgebraTol = 1e-12;

struct Successor {
  StateId target = 0;
  double prob = 0.0;
};

struct Choice {
  ActionId action = 0;
  std::vector<Successor> successors;
};

struct Mdp {
  std::vector<std::string> state_names;
  std::vector<std::string> action_names;
  std::vector<std::string> prop_names;
  StateId initial = 0;
  /// Per state, available actions sorted by action id.
  std::vector<std::vector<Choice>> choices;
  std::vector<LabelSet> labels;

  std::size_t num_states() const { return choices.size(); }
  std::span<const Choice> available(StateId s) const { return choices[s]; }
  /// Position of `a` in `available(s)`, if available.
  std::optional<std::size_t> choice_index(StateId s, ActionId a) const;
  std::size_t num_choices() const;
};

struct Violation {
  enum class Kind {
    Stochasticity,
    NoAction,
    ProbabilityRange,
    BadTarget,
    BadInitial,
    BadLabel,
    DuplicateAction,
  };
  Kind kind;
  StateId state = 0;
  std::optional<ActionId> action;
  std::string message;
};

std::string_view to_string(Violation::Kind kind);

/// Checks every Mdp invariant; an empty result means the model is valid.
std::vector<Violation> validate_mdp(const Mdp& m);

/// Throws Error(Validation) listing the violations, if any.
void require_valid(const Mdp& m);

/// One Rabin pair: a run is accepted if it visits `fin` finitely often and
/// `inf` infinitely often.
struct RabinPair {
  std::vector<AutStateId> fin;  // B
  std::vector<AutStateId> inf;  // G
};

struct Dra {
  std::size_t num_states = 0;
  AutStateId initial = 0;
  std::vector<std::string> ap;
  /// delta[q][symbol], symbol a bitmask over `ap`. Total when valid.
  std::vector<std::vector<std::optional<AutStateId>>> delta;
  std::vector<RabinPair> pairs;

  std::size_t alphabet_size() const { return std::size_t{1} << ap.size(); }
};

/// Problems with a Dra (partial delta, empty pairs, bad indices).
std::vector<std::string> validate_dra(const Dra& d);

/// Accepts the ultimately periodic word prefix . cycle^omega?
bool dra_accepts_lasso(const Dra& d, std::span<const LabelSet> prefix,
                       std::span<const LabelSet> cycle);

struct AcceptancePair {
  std::vector<char> bad;   // B, indexed by state
  std::vector<char> good;  // G, indexed by state
};

struct ProductMdp {
  Mdp mdp;
  /// (base state, automaton state) per product state.
  std::vector<std::pair<StateId, AutStateId>> origin;
  std::vector<AcceptancePair> pairs;

  std::size_t num_states() const { return mdp.num_states(); }
};

/// Product construction; only states reachable from the initial product
/// state are kept.
ProductMdp build_product(const Mdp& m, const Dra& d);

/// Treats `m` as a product MDP whose acceptance pairs are given directly as
/// (B, G) state lists over `m`.
ProductMdp product_from_pairs(Mdp m,
                              const std::vector<std::pair<std::vector<StateId>,
                                                          std::vector<StateId>>>& pairs);

struct StationaryPolicy {
  /// rule[s][k] = probability of the k-th available choice at s.
  std::vector<std::vector<double>> rule;

  static StationaryPolicy uniform(const Mdp& m);
  /// Deterministic policy from choice positions.
  static StationaryPolicy deterministic(const Mdp& m, std::span<const std::size_t> pick);
};

/// Throws Error(PolicyMismatch) if `p` does not fit `m`.
void validate_policy(const Mdp& m, const StationaryPolicy& p);

/// (1 - delta) * a + delta * b.
StationaryPolicy mix(const StationaryPolicy& a, const StationaryPolicy& b, double delta);

enum class UtilityKind { Reward, Cost };

struct UtilityFn {
  UtilityKind kind = UtilityKind::Reward;
  /// value[s][k] for the k-th available choice at s.
  std::vector<std::vector<double>> value;

  static UtilityFn constant(const Mdp& m, double v, UtilityKind kind);
};

/// Shape check, plus strict positivity for costs. Throws Error(Validation).
void validate_utility(const Mdp& m, const UtilityFn& u);

/// Lifts a utility defined on the base MDP to the product (via base state).
UtilityFn lift_utility(const ProductMdp& pm, const Mdp& base, const UtilityFn& u);

/// v(s) = sum_a p(s)(a) u(s, a).
Eigen::VectorXd utility_vector(const StationaryPolicy& p, const UtilityFn& u);

struct Mc {
  Eigen::MatrixXd transition;
  Eigen::VectorXd initial;

  std::size_t num_states() const { return static_cast<std::size_t>(transition.rows()); }
};

/// P(i, j) = sum_a p(i)(a) P(j | i, a), initial distribution = point mass on
/// m.initial.
Mc induce_chain(const Mdp& m, const StationaryPolicy& p);

}  // namespace ratiosynth
