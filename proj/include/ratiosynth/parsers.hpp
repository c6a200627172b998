#pragma once

// Text formats: model files, Rabin automata (HOA subset), utility tables and
// policies. Grammars are in docs/formats.md.

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "ratiosynth/model.hpp"

namespace ratiosynth {

struct ParsedModel {
  Mdp mdp;
  std::optional<UtilityFn> reward;
  std::optional<UtilityFn> cost;
};

/// Throws ParseError on syntax errors and Error(Validation) when the model or
/// an inline utility table is incomplete or invalid.
ParsedModel parse_mdp(std::string_view text);

struct UtilityTables {
  std::optional<UtilityFn> reward;
  std::optional<UtilityFn> cost;
};

/// `reward`/`cost` lines against an existing model.
UtilityTables parse_utilities(std::string_view text, const Mdp& m);

/// Throws ParseError, Error(Nondeterminism) or Error(Incompleteness).
Dra parse_dra(std::string_view text);

/// Reads `policy` lines; `meta` lines go to `meta` if given.
StationaryPolicy parse_policy(std::string_view text, const Mdp& m,
                              std::map<std::string, std::string>* meta = nullptr);

std::string write_mdp(const Mdp& m, const UtilityFn* reward = nullptr,
                      const UtilityFn* cost = nullptr);
std::string write_utilities(const Mdp& m, const UtilityFn* reward, const UtilityFn* cost);
std::string write_dra(const Dra& d);
std::string write_policy(const Mdp& m, const StationaryPolicy& p,
                         const std::map<std::string, std::string>& meta = {});

/// Shortest decimal text that reads back as exactly `x`.
std::string format_double(double x);
/// `x` with 12 significant digits.
std::string format_12(double x);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view text);

}  // namespace ratiosynth
