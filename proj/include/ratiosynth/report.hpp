#pragma once

// Machine-readable reports shared by the command line and the bindings.

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"
#include "ratiosynth/chain.hpp"
#include "ratiosynth/graph.hpp"
#include "ratiosynth/sim.hpp"
#include "ratiosynth/synthesis.hpp"

namespace ratiosynth {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "0.1.0";

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t x);

/// {"states": [...], "actions": {state: [action, ...]}} by name.
nlohmann::json component_json(const Mdp& m, const SubMdp& sub);

/// MECs, MAECs, AMECs and the almost-sure region of a product.
nlohmann::json decomposition_json(const ProductMdp& pm);

nlohmann::json synthesis_json(const Mdp& m, const SynthesisReport& rep);

/// Efficiency from the initial state, reachable recurrent classes with their
/// ratios and absorption probabilities, and the acceptance verdict.
nlohmann::json evaluation_json(const ProductMdp& pm, const StationaryPolicy& p, const UtilityFn& r,
                               const UtilityFn& c);

nlohmann::json rollout_json(const Mdp& m, const RolloutStats& st, const RolloutConfig& cfg);

/// `rollout,ratio` rows, one per rollout.
std::string rollout_csv(const RolloutStats& st);

nlohmann::json options_json(const SynthesisOptions& opt);

}  // namespace ratiosynth
