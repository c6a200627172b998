#pragma once

// Qualitative structure of MDPs: strongly connected components, maximal end
// components, accepting end components, almost-sure regions and attractors.

#include <cstddef>
#include <vector>

#include "ratiosynth/model.hpp"

namespace ratiosynth {

/// A set of states with, per state, a nonempty subset of its choices.
/// `actions[i]` holds choice positions (into `Mdp::choices[states[i]]`) for
/// `states[i]`. Both levels are sorted ascending.
struct SubMdp {
  std::vector<StateId> states;
  std::vector<std::vector<std::size_t>> actions;

  bool contains(StateId s) const;
  /// Position of s in `states`, or npos.
  std::size_t index_of(StateId s) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct EndComponent : SubMdp {
  /// Depth-first discovery order from states.front() along the component's
  /// own edges; every state appears, so the component is reachable from its
  /// first state (the reverse direction is checked by verify_end_component).
  std::vector<StateId> scc_witness;
};

bool operator==(const SubMdp& a, const SubMdp& b);

/// Component id per node; ids are in reverse topological order of the
/// condensation (a component only reaches components with smaller or equal id).
std::vector<std::size_t> strongly_connected_components(
    const std::vector<std::vector<std::size_t>>& adj, std::size_t* count = nullptr);

/// Every choice of `sub` stays inside `sub`.
bool is_closed(const Mdp& m, const SubMdp& sub);
/// Closed and strongly connected.
bool verify_end_component(const Mdp& m, const SubMdp& sub);
/// `inner` is contained in `outer`, states and actions.
bool sub_contains(const SubMdp& outer, const SubMdp& inner);

std::vector<EndComponent> mec_decompose(const Mdp& m);
/// MECs of the sub-MDP induced by the states with allowed[s] != 0.
std::vector<EndComponent> mec_decompose(const Mdp& m, const std::vector<char>& allowed);

std::vector<EndComponent> maec_decompose(const ProductMdp& pm);
std::vector<EndComponent> amec_filter(const ProductMdp& pm);

/// Sorted product states from which some policy reaches the AMEC states with
/// probability one.
std::vector<StateId> almost_sure_region(const ProductMdp& pm);

/// Extends `p` from `target` to every state by peeling: repeatedly pick the
/// lowest state outside the grown set having a choice (lowest first) with
/// positive probability into it. Rows of `p` outside `target` are replaced.
/// Throws Error(Unreachable) if some state cannot be attached.
StationaryPolicy attractor_policy(const Mdp& m, const std::vector<StateId>& target,
                                  StationaryPolicy p);

/// Sub-MDP seen as an Mdp in its own right, with index maps to the parent.
struct Restriction {
  Mdp mdp;
  std::vector<StateId> to_parent;
  /// choice_to_parent[s][k] = parent choice position of the k-th choice.
  std::vector<std::vector<std::size_t>> choice_to_parent;
  /// Parent state -> local state, or SubMdp::npos.
  std::vector<std::size_t> from_parent;
};

/// Requires `sub` closed. The local initial state is the parent's initial
/// state if it is kept, else the first state of `sub`.
Restriction restrict_mdp(const Mdp& m, const SubMdp& sub);
ProductMdp restrict_product(const ProductMdp& pm, const SubMdp& sub, Restriction* map = nullptr);
UtilityFn restrict_utility(const Restriction& r, const UtilityFn& u);
StationaryPolicy restrict_policy(const Restriction& r, const StationaryPolicy& p);
/// Maps sub-MDP components back to parent indices.
EndComponent lift_component(const Restriction& r, const EndComponent& ec);

/// The whole MDP as a SubMdp with all choices.
SubMdp full_sub_mdp(const Mdp& m);

/// States that have a choice leading into `reached` with positive
/// probability, iterated to a fixpoint (graph reachability, not almost-sure).
std::vector<char> can_reach(const Mdp& m, const std::vector<char>& target);

}  // namespace ratiosynth
