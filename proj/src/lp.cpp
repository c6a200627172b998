#include "ratiosynth/lp.hpp"

#include <numeric>

#include "ratiosynth/chain.hpp"
#include "ratiosynth/graph.hpp"

namespace ratiosynth {

namespace {

using Eigen::Index;

std::vector<std::size_t> choice_offsets(const Mdp& m) {
  std::vector<std::size_t> off(m.num_states() + 1, 0);
  for (StateId s = 0; s < m.num_states(); ++s) off[s + 1] = off[s] + m.choices[s].size();
  return off;
}

// Adds sum_a z(s,a) - sum_{t,a} P(s|t,a) z(t,a) to row `row0 + s` for every s,
// with z occupying columns starting at `col0`.
void add_flow_rows(const Mdp& m, const std::vector<std::size_t>& off, Eigen::MatrixXd& A,
                   Index row0, Index col0) {
  for (StateId s = 0; s < m.num_states(); ++s) {
    for (std::size_t k = 0; k < m.choices[s].size(); ++k) {
      const Index col = col0 + static_cast<Index>(off[s] + k);
      A(row0 + static_cast<Index>(s), col) += 1.0;
      for (const auto& succ : m.choices[s][k].successors)
        A(row0 + static_cast<Index>(succ.target), col) -= succ.prob;
    }
  }
}

void check_status(const LpResult& res, const char* what) {
  if (res.status == LpStatus::Infeasible)
    throw Error(ErrorKind::Infeasible, std::string(what) + " is infeasible");
  if (res.status == LpStatus::Unbounded)
    throw Error(ErrorKind::Unbounded, std::string(what) + " is unbounded");
}

std::vector<double> support_row(const std::vector<double>& row, double threshold) {
  std::vector<double> out(row.size(), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k] > threshold) {
      out[k] = row[k];
      total += row[k];
    }
  }
  if (total > 0.0)
    for (double& x : out) x /= total;
  return out;
}

double row_sum(const std::vector<double>& row) {
  return std::accumulate(row.begin(), row.end(), 0.0);
}

}  // namespace

LfpSolution solve_ratio_lfp(const Mdp& m, const UtilityFn& r, const UtilityFn& c,
                            const SimplexOptions& opt) {
  require_valid(m);
  validate_utility(m, r);
  validate_utility(m, c);
  auto mecs = mec_decompose(m);
  if (mecs.size() != 1 || mecs.front().states.size() != m.num_states())
    throw Error(ErrorKind::NotCommunicating, "the model does not form a single end component");

  const auto off = choice_offsets(m);
  const Index nc = static_cast<Index>(off.back());
  const Index n = static_cast<Index>(m.num_states());
  const Index scale_col = nc;

  LpProblem lp;
  lp.objective = Eigen::VectorXd::Zero(nc + 1);
  lp.eq_matrix = Eigen::MatrixXd::Zero(n + 2, nc + 1);
  lp.eq_rhs = Eigen::VectorXd::Zero(n + 2);
  add_flow_rows(m, off, lp.eq_matrix, 0, 0);
  for (StateId s = 0; s < m.num_states(); ++s) {
    for (std::size_t k = 0; k < m.choices[s].size(); ++k) {
      const Index col = static_cast<Index>(off[s] + k);
      lp.objective(col) = r.value[s][k];
      lp.eq_matrix(n, col) = c.value[s][k];
      lp.eq_matrix(n + 1, col) = 1.0;
    }
  }
  lp.eq_rhs(n) = 1.0;
  lp.eq_matrix(n + 1, scale_col) = -1.0;

  auto res = solve_lp(lp, opt);
  check_status(res, "ratio program");

  LfpSolution sol;
  sol.scale = res.x(scale_col);
  if (!(sol.scale > 0.0)) throw Error(ErrorKind::NumericalFailure, "vanishing scale variable");
  sol.value = res.value;
  for (StateId s = 0; s < m.num_states(); ++s) {
    std::vector<double> row;
    for (std::size_t k = 0; k < m.choices[s].size(); ++k)
      row.push_back(res.x(static_cast<Index>(off[s] + k)) / sol.scale);
    sol.gamma.push_back(std::move(row));
  }
  return sol;
}

StationaryPolicy decode_ratio_policy(const Mdp& m, const LfpSolution& sol, const UtilityFn& r,
                                     const UtilityFn& c, double threshold) {
  StationaryPolicy p;
  p.rule.resize(m.num_states());
  std::vector<StateId> support;
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (row_sum(sol.gamma.at(s)) > threshold) {
      p.rule[s] = support_row(sol.gamma[s], threshold);
      support.push_back(s);
    }
  }
  if (support.empty()) throw Error(ErrorKind::DegenerateDecoding, "occupation measure vanishes");
  p = attractor_policy(m, support, std::move(p));

  auto ca = analyze(induce_chain(m, p));
  if (ca.unichain()) return p;
  auto ratios = class_ratios(ca, utility_vector(p, r), utility_vector(p, c));
  std::size_t best = 0;
  for (std::size_t k = 1; k < ratios.size(); ++k)
    if (ratios[k] > ratios[best] + 1e-12) best = k;
  return attractor_policy(m, ca.recurrent_classes[best], std::move(p));
}

AvgLpSolution solve_avg_reward_lp(const Mdp& m, const UtilityFn& reward,
                                  const SimplexOptions& opt) {
  require_valid(m);
  validate_utility(m, reward);
  const auto off = choice_offsets(m);
  const Index nc = static_cast<Index>(off.back());
  const Index n = static_cast<Index>(m.num_states());
  const double alpha = 1.0 / static_cast<double>(n);

  LpProblem lp;
  lp.objective = Eigen::VectorXd::Zero(2 * nc);
  lp.eq_matrix = Eigen::MatrixXd::Zero(2 * n, 2 * nc);
  lp.eq_rhs = Eigen::VectorXd::Zero(2 * n);
  add_flow_rows(m, off, lp.eq_matrix, 0, 0);
  add_flow_rows(m, off, lp.eq_matrix, n, nc);
  for (StateId s = 0; s < m.num_states(); ++s) {
    for (std::size_t k = 0; k < m.choices[s].size(); ++k) {
      const Index col = static_cast<Index>(off[s] + k);
      lp.objective(col) = reward.value[s][k];
      lp.eq_matrix(n + static_cast<Index>(s), col) += 1.0;
    }
    lp.eq_rhs(n + static_cast<Index>(s)) = alpha;
  }

  auto res = solve_lp(lp, opt);
  check_status(res, "average-reward program");
  AvgLpSolution sol;
  sol.gain = res.value;
  for (StateId s = 0; s < m.num_states(); ++s) {
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < m.choices[s].size(); ++k) {
      xs.push_back(res.x(static_cast<Index>(off[s] + k)));
      ys.push_back(res.x(nc + static_cast<Index>(off[s] + k)));
    }
    sol.x.push_back(std::move(xs));
    sol.y.push_back(std::move(ys));
  }
  return sol;
}

StationaryPolicy decode_avg_policy(const Mdp& m, const AvgLpSolution& sol, double threshold) {
  StationaryPolicy p;
  p.rule.resize(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (row_sum(sol.x.at(s)) > threshold) {
      p.rule[s] = support_row(sol.x[s], threshold);
    } else if (row_sum(sol.y.at(s)) > threshold) {
      p.rule[s] = support_row(sol.y[s], threshold);
    } else {
      throw Error(ErrorKind::DegenerateDecoding,
                  "no occupation or deviation mass at state " + m.state_names[s]);
    }
  }
  return p;
}

}  // namespace ratiosynth
