#pragma once

// Grid-world generators for the two robot planning studies.

#include <map>
#include <string>
#include <vector>

#include "ratiosynth/model.hpp"
#include "ratiosynth/synthesis.hpp"

namespace ratiosynth {

/// 1-based (row, column); row 1 is the top row.
struct Cell {
  int row = 1;
  int col = 1;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct Destination {
  Cell cell;
  double reward = 0.0;
};

struct Case1Params {
  int rows = 9;
  int cols = 9;
  Cell start{1, 1};
  std::vector<Cell> obstacles;
  std::vector<Destination> destinations;
  Cell charging{8, 1};
  /// item_prob[row-1][col-1].
  std::vector<std::vector<double>> item_prob;
  /// Cost by Manhattan distance to the nearest destination.
  std::vector<double> cost_table;

  static Case1Params defaults();
  void validate() const;
};

/// Item-probability field growing with Manhattan distance d to the nearest
/// origin, p = p_max * (d / d_max)^exponent * (1 - row_tilt * (rows - row) / (rows - 1)),
/// d_max the largest such distance. A positive tilt favours lower rows.
std::vector<std::vector<double>> distance_field(int rows, int cols, const std::vector<Cell>& origins,
                                                double p_max, double exponent,
                                                double row_tilt = 0.0);

struct Case1Model {
  Mdp mdp;
  UtilityFn reward;
  UtilityFn cost;
  /// Always visit d, never b.
  Dra phi1;
  /// phi1 plus always visit c.
  Dra phi2;
};

Case1Model gen_case1(const Case1Params& p);

int manhattan_to_destinations(const Case1Params& p, Cell c);
double case1_cost(const Case1Params& p, Cell c);
std::string case1_state_name(Cell c, int carrying);

/// A cell's move under one of the four directions, if it stays on the grid
/// and off obstacles.
std::optional<Cell> case1_move(const Case1Params& p, Cell c, const std::string& action);

struct Case2Params {
  int size = 7;
  Cell start{4, 1};
  Cell command{3, 4};   // g
  Cell material{7, 7};  // r
  Cell blocked{4, 4};
  /// Per reached cell; reward[row-1][col-1].
  std::vector<std::vector<double>> reward;
  std::vector<std::vector<double>> cost;
  /// Extra reward for reaching the material cell with permission.
  double bonus = 0.0;

  static Case2Params defaults();
  void validate() const;
};

struct Case2Model {
  Mdp mdp;
  UtilityFn reward;
  UtilityFn cost;
  /// Infinitely often g followed later by r.
  Dra phi;
};

Case2Model gen_case2(const Case2Params& p);

/// Ring index (1 = outermost) of a cell.
int case2_ring(const Case2Params& p, Cell c);

/// Key/value parameter text: one `key value...` per line. Unknown keys raise
/// Error(Param).
Case1Params parse_case1_params(std::string_view text);
Case2Params parse_case2_params(std::string_view text);

struct DeltaRow {
  double epsilon = 0.0;
  double delta_es = 0.0;
  double delta_ex = 0.0;
  double limit_es = 0.0;
  double limit_ex = 0.0;
  double achieved_es = 0.0;
  double achieved_ex = 0.0;
  double value = 0.0;
};

/// Synthesizes for each epsilon with both delta methods and records the
/// limit probability of states carrying proposition `prop` (by name).
std::vector<DeltaRow> delta_table(const ProductMdp& pm, const UtilityFn& r, const UtilityFn& c,
                                  const std::vector<double>& epsilons, const std::string& prop,
                                  const SynthesisOptions& base = {});

/// Long-run probability of being in a state labeled `prop` from the initial state.
double label_limit_probability(const Mdp& m, const StationaryPolicy& p, const std::string& prop);

struct SweepRow {
  double bonus = 0.0;
  /// Best efficiency without the task.
  double optimum = 0.0;
  /// The unconstrained optimum's recurrent class visits both g and r.
  bool accepting_cycle = false;
  /// Value of the task-constrained synthesis.
  double constrained = 0.0;
};

std::vector<SweepRow> case2_sweep(const Case2Params& base, const std::vector<double>& bonuses,
                                  double epsilon = 1e-3);

}  // namespace ratiosynth
