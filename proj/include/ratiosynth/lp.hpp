#pragma once

// Dense two-phase primal simplex, the reward/cost ratio program via the
// Charnes-Cooper substitution, and the multichain average-reward program.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ratiosynth/model.hpp"

namespace ratiosynth {

/// maximize objective . x  subject to  eq_matrix x = eq_rhs,  x >= 0.
struct LpProblem {
  Eigen::VectorXd objective;
  Eigen::MatrixXd eq_matrix;
  Eigen::VectorXd eq_rhs;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double value = 0.0;
  std::size_t iterations = 0;
  /// Column index per basic row at the optimum.
  std::vector<std::size_t> basis;
};

enum class Pricing {
  /// Smallest improving index every time.
  Bland,
  /// Most improving reduced cost, falling back to Bland's rule while a run of
  /// degenerate pivots lasts.
  DantzigBland,
};

struct SimplexOptions {
  Pricing pricing = Pricing::DantzigBland;
  double pivot_tol = 1e-9;
  double optimality_tol = 1e-9;
  double feasibility_tol = 1e-9;
  std::size_t max_iterations = 1'000'000;
  std::size_t degenerate_run = 30;
  /// Pivots between recomputations of the tableau from the original data;
  /// 0 picks max(100, rows).
  std::size_t refactor_interval = 0;
};

/// Throws Error(NumericalFailure) on pivot breakdown or iteration overflow.
LpResult solve_lp(const LpProblem& p, const SimplexOptions& opt = {});

inline constexpr double kSupportThreshold = 1e-9;

struct LfpSolution {
  /// gamma[s][k], sums to 1.
  std::vector<std::vector<double>> gamma;
  double value = 0.0;
  /// Charnes-Cooper scale variable.
  double scale = 0.0;
};

/// Maximizes sum gamma R / sum gamma C over stationary occupation measures.
/// Throws Error(NotCommunicating) unless all of m forms one MEC.
LfpSolution solve_ratio_lfp(const Mdp& m, const UtilityFn& r, const UtilityFn& c,
                            const SimplexOptions& opt = {});

/// Normalizes gamma on its support and attaches the rest by attractor. If the
/// result is multichain, the best-ratio class is kept and the rest reattached,
/// so the returned chain is unichain.
StationaryPolicy decode_ratio_policy(const Mdp& m, const LfpSolution& sol, const UtilityFn& r,
                                     const UtilityFn& c,
                                     double threshold = kSupportThreshold);

struct AvgLpSolution {
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> y;
  /// Objective value: average reward weighted by the uniform start weights.
  double gain = 0.0;
};

AvgLpSolution solve_avg_reward_lp(const Mdp& m, const UtilityFn& reward,
                                  const SimplexOptions& opt = {});

/// x-normalized where the x row has mass, y-normalized elsewhere.
/// Throws Error(DegenerateDecoding) if both rows vanish.
StationaryPolicy decode_avg_policy(const Mdp& m, const AvgLpSolution& sol,
                                   double threshold = kSupportThreshold);

}  // namespace ratiosynth
