#pragma once

// Random instance generators and brute-force oracles shared by the unit tests
// and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ratiosynth/chain.hpp"
#include "ratiosynth/graph.hpp"
#include "ratiosynth/lp.hpp"
#include "ratiosynth/model.hpp"

namespace testkit {

using namespace ratiosynth;
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}
inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline std::vector<double> random_distribution(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  double tot = 0.0;
  for (auto& x : w) tot += x = uniform(rng, 0.05, 1.0);
  for (auto& x : w) x /= tot;
  return w;
}

/// Distribution over `targets` (distinct states).
inline std::vector<Successor> spread(Rng& rng, std::vector<StateId> targets) {
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  auto w = random_distribution(rng, targets.size());
  std::vector<Successor> out;
  for (std::size_t i = 0; i < targets.size(); ++i) out.push_back({targets[i], w[i]});
  return out;
}

inline Mdp empty_mdp(std::size_t n, std::size_t actions) {
  Mdp m;
  for (std::size_t s = 0; s < n; ++s) m.state_names.push_back("s" + std::to_string(s));
  for (std::size_t a = 0; a < actions; ++a) m.action_names.push_back("a" + std::to_string(a));
  m.choices.resize(n);
  m.labels.assign(n, 0);
  return m;
}

/// Random action subset of size 1..max_actions per state, successors drawn
/// from `pool(s)` with 1..3 targets.
inline Mdp random_mdp(Rng& rng, std::size_t n, std::size_t max_actions,
                      const std::function<std::vector<StateId>(StateId)>& pool) {
  Mdp m = empty_mdp(n, max_actions);
  for (StateId s = 0; s < n; ++s) {
    std::vector<ActionId> acts(max_actions);
    for (std::size_t a = 0; a < max_actions; ++a) acts[a] = a;
    std::shuffle(acts.begin(), acts.end(), rng);
    acts.resize(pick(rng, 1, max_actions));
    std::sort(acts.begin(), acts.end());
    auto targets = pool(s);
    for (auto a : acts) {
      std::vector<StateId> succ;
      const std::size_t k = pick(rng, 1, std::min<std::size_t>(3, targets.size()));
      for (std::size_t i = 0; i < k; ++i) succ.push_back(targets[pick(rng, 0, targets.size() - 1)]);
      m.choices[s].push_back({a, spread(rng, succ)});
    }
  }
  return m;
}

inline Mdp random_general_mdp(Rng& rng, std::size_t n, std::size_t max_actions) {
  std::vector<StateId> all(n);
  for (StateId s = 0; s < n; ++s) all[s] = s;
  return random_mdp(rng, n, max_actions, [&](StateId) { return all; });
}

/// Every action of state s keeps some mass on s+1 (mod n), so the whole
/// model is one MEC.
inline Mdp random_communicating_mdp(Rng& rng, std::size_t n, std::size_t max_actions) {
  Mdp m = random_general_mdp(rng, n, max_actions);
  for (StateId s = 0; s < n; ++s) {
    for (auto& c : m.choices[s]) {
      std::vector<StateId> targets;
      for (const auto& x : c.successors) targets.push_back(x.target);
      targets.push_back((s + 1) % n);
      c.successors = spread(rng, targets);
    }
  }
  return m;
}

/// Transient states 0..t-1 feeding closed communicating blocks. One Rabin
/// pair: a G state in every block, and in some blocks a B state as well.
inline ProductMdp random_multichain_product(Rng& rng, std::size_t blocks, std::size_t max_block,
                                            std::size_t transient) {
  std::vector<std::size_t> sizes;
  std::size_t n = transient;
  for (std::size_t b = 0; b < blocks; ++b) n += sizes.emplace_back(pick(rng, 1, max_block));
  Mdp m = empty_mdp(n, 3);
  std::vector<StateId> all(n), bad, good;
  for (StateId s = 0; s < n; ++s) all[s] = s;
  std::size_t base = transient;
  for (std::size_t b = 0; b < blocks; ++b) {
    Mdp blk = random_communicating_mdp(rng, sizes[b], 3);
    for (StateId s = 0; s < sizes[b]; ++s) {
      m.choices[base + s] = blk.choices[s];
      for (auto& c : m.choices[base + s])
        for (auto& x : c.successors) x.target += base;
    }
    const StateId g = base + pick(rng, 0, sizes[b] - 1);
    good.push_back(g);
    if (sizes[b] > 1 && uniform(rng, 0, 1) < 0.4) {
      StateId x = base + pick(rng, 0, sizes[b] - 1);
      if (x != g) bad.push_back(x);
    }
    base += sizes[b];
  }
  Mdp head = random_mdp(rng, n, 3, [&](StateId) { return all; });
  for (StateId s = 0; s < transient; ++s) m.choices[s] = head.choices[s];
  return product_from_pairs(std::move(m), {{bad, good}});
}

inline UtilityFn random_utility(Rng& rng, const Mdp& m, UtilityKind kind, double lo, double hi) {
  UtilityFn u;
  u.kind = kind;
  u.value.resize(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s)
    for (std::size_t k = 0; k < m.choices[s].size(); ++k) u.value[s].push_back(uniform(rng, lo, hi));
  return u;
}
inline UtilityFn random_reward(Rng& rng, const Mdp& m) {
  return random_utility(rng, m, UtilityKind::Reward, -1.0, 3.0);
}
inline UtilityFn random_cost(Rng& rng, const Mdp& m) {
  return random_utility(rng, m, UtilityKind::Cost, 0.5, 2.0);
}

inline StationaryPolicy random_policy(Rng& rng, const Mdp& m) {
  StationaryPolicy p;
  for (StateId s = 0; s < m.num_states(); ++s) p.rule.push_back(random_distribution(rng, m.choices[s].size()));
  return p;
}

/// Calls f on every deterministic stationary policy.
inline void for_each_deterministic(const Mdp& m,
                                   const std::function<void(const StationaryPolicy&)>& f) {
  const std::size_t n = m.num_states();
  std::vector<std::size_t> pick_(n, 0);
  while (true) {
    f(StationaryPolicy::deterministic(m, pick_));
    std::size_t i = 0;
    while (i < n && ++pick_[i] == m.choices[i].size()) pick_[i++] = 0;
    if (i == n) return;
  }
}

/// Best efficiency from the initial state over deterministic stationary policies.
inline double brute_force_ratio(const Mdp& m, const UtilityFn& r, const UtilityFn& c) {
  double best = -std::numeric_limits<double>::infinity();
  for_each_deterministic(m, [&](const StationaryPolicy& p) {
    best = std::max(best, policy_efficiency(m, p, r, c));
  });
  return best;
}

inline double brute_force_average(const Mdp& m, const UtilityFn& r) {
  return brute_force_ratio(m, r, UtilityFn::constant(m, 1.0, UtilityKind::Cost));
}

// ---------------------------------------------------------------- end components

struct BruteEc {
  std::vector<StateId> states;
  std::vector<std::vector<std::size_t>> actions;
  bool operator==(const BruteEc&) const = default;
  bool operator<(const BruteEc& o) const {
    return std::tie(states, actions) < std::tie(o.states, o.actions);
  }
};

inline bool strongly_connected(const Mdp& m, const std::vector<StateId>& states,
                               const std::vector<std::vector<std::size_t>>& acts) {
  const std::size_t n = m.num_states();
  std::vector<std::vector<StateId>> fwd(n), bwd(n);
  for (std::size_t i = 0; i < states.size(); ++i)
    for (auto k : acts[i])
      for (const auto& x : m.choices[states[i]][k].successors)
        if (x.prob > 0.0) {
          fwd[states[i]].push_back(x.target);
          bwd[x.target].push_back(states[i]);
        }
  auto reach = [&](const std::vector<std::vector<StateId>>& g) {
    std::vector<char> seen(n, 0);
    std::vector<StateId> stack{states.front()};
    seen[states.front()] = 1;
    while (!stack.empty()) {
      StateId s = stack.back();
      stack.pop_back();
      for (auto t : g[s])
        if (!seen[t]) {
          seen[t] = 1;
          stack.push_back(t);
        }
    }
    return std::all_of(states.begin(), states.end(), [&](StateId s) { return seen[s] != 0; });
  };
  return reach(fwd) && reach(bwd);
}

/// For a state subset, the largest action sets staying inside; an EC with
/// this state set exists iff the result is strongly connected.
inline std::optional<BruteEc> ec_on(const Mdp& m, const std::vector<StateId>& states) {
  if (states.empty()) return std::nullopt;
  std::vector<char> in(m.num_states(), 0);
  for (auto s : states) in[s] = 1;
  BruteEc ec;
  ec.states = states;
  for (auto s : states) {
    std::vector<std::size_t> acts;
    for (std::size_t k = 0; k < m.choices[s].size(); ++k) {
      bool closed = true;
      for (const auto& x : m.choices[s][k].successors) closed = closed && (x.prob <= 0.0 || in[x.target]);
      if (closed) acts.push_back(k);
    }
    if (acts.empty()) return std::nullopt;
    ec.actions.push_back(std::move(acts));
  }
  if (!strongly_connected(m, ec.states, ec.actions)) return std::nullopt;
  return ec;
}

inline bool contains(const BruteEc& outer, const BruteEc& inner) {
  for (std::size_t i = 0; i < inner.states.size(); ++i) {
    auto it = std::find(outer.states.begin(), outer.states.end(), inner.states[i]);
    if (it == outer.states.end()) return false;
    const auto& oa = outer.actions[static_cast<std::size_t>(it - outer.states.begin())];
    for (auto k : inner.actions[i])
      if (std::find(oa.begin(), oa.end(), k) == oa.end()) return false;
  }
  return true;
}

/// Every state subset that carries an EC, each with its maximal action sets.
inline std::vector<BruteEc> all_state_ecs(const Mdp& m) {
  std::vector<BruteEc> out;
  const std::size_t n = m.num_states();
  for (std::uint32_t mask = 1; mask < (1U << n); ++mask) {
    std::vector<StateId> states;
    for (StateId s = 0; s < n; ++s)
      if ((mask >> s) & 1U) states.push_back(s);
    if (auto ec = ec_on(m, states)) out.push_back(*ec);
  }
  return out;
}

inline std::vector<BruteEc> maximal(std::vector<BruteEc> ecs) {
  std::vector<BruteEc> out;
  for (std::size_t i = 0; i < ecs.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < ecs.size() && !dominated; ++j)
      dominated = i != j && !(ecs[i] == ecs[j]) && contains(ecs[j], ecs[i]);
    if (!dominated) out.push_back(ecs[i]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<BruteEc> brute_mecs(const Mdp& m) { return maximal(all_state_ecs(m)); }

inline std::vector<BruteEc> brute_maecs(const ProductMdp& pm) {
  std::vector<BruteEc> accepting;
  for (const auto& ec : all_state_ecs(pm.mdp)) {
    for (const auto& pair : pm.pairs) {
      bool bad = false, good = false;
      for (auto s : ec.states) {
        bad = bad || pair.bad[s];
        good = good || pair.good[s];
      }
      if (good && !bad) {
        accepting.push_back(ec);
        break;
      }
    }
  }
  return maximal(accepting);
}

inline BruteEc to_brute(const SubMdp& sub) { return {sub.states, sub.actions}; }

inline std::vector<BruteEc> to_brute(const std::vector<EndComponent>& ecs) {
  std::vector<BruteEc> out;
  for (const auto& e : ecs) out.push_back(to_brute(e));
  std::sort(out.begin(), out.end());
  return out;
}

/// Maximal reachability probability of `target` by value iteration.
inline std::vector<double> max_reach_probability(const Mdp& m, const std::vector<char>& target,
                                                 int iterations = 20000) {
  const std::size_t n = m.num_states();
  std::vector<double> v(n, 0.0);
  for (StateId s = 0; s < n; ++s) v[s] = target[s] ? 1.0 : 0.0;
  for (int it = 0; it < iterations; ++it) {
    for (StateId s = 0; s < n; ++s) {
      if (target[s]) continue;
      double best = 0.0;
      for (const auto& c : m.choices[s]) {
        double acc = 0.0;
        for (const auto& x : c.successors) acc += x.prob * v[x.target];
        best = std::max(best, acc);
      }
      v[s] = best;
    }
  }
  return v;
}

// ---------------------------------------------------------------- linear algebra

/// (1/n) sum_{k<n} P^k.
inline Eigen::MatrixXd power_average(const Eigen::MatrixXd& p, int n) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p.rows(), p.cols());
  Eigen::MatrixXd pk = Eigen::MatrixXd::Identity(p.rows(), p.cols());
  for (int k = 0; k < n; ++k) {
    acc += pk;
    pk = pk * p;
  }
  return acc / n;
}

/// Random row-stochastic matrix; each row has 1..max_support nonzeros.
inline Eigen::MatrixXd random_stochastic(Rng& rng, std::size_t n, std::size_t max_support) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = pick(rng, 1, std::min(n, max_support));
    std::vector<StateId> targets;
    for (std::size_t j = 0; j < k; ++j) targets.push_back(pick(rng, 0, n - 1));
    for (const auto& x : spread(rng, targets))
      p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(x.target)) = x.prob;
  }
  return p;
}

inline Mc chain_of(const Eigen::MatrixXd& p, StateId start = 0) {
  Mc mc;
  mc.transition = p;
  mc.initial = Eigen::VectorXd::Zero(p.rows());
  mc.initial(static_cast<Eigen::Index>(start)) = 1.0;
  return mc;
}

/// Best objective over basic feasible solutions, or nullopt if none.
inline std::optional<double> vertex_enumeration(const LpProblem& p) {
  const Eigen::Index m = p.eq_matrix.rows(), n = p.eq_matrix.cols();
  std::optional<double> best;
  std::vector<Eigen::Index> cols;
  std::function<void(Eigen::Index)> rec = [&](Eigen::Index start) {
    if (static_cast<Eigen::Index>(cols.size()) == m) {
      Eigen::MatrixXd b(m, m);
      for (Eigen::Index i = 0; i < m; ++i) b.col(i) = p.eq_matrix.col(cols[static_cast<std::size_t>(i)]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
      if (lu.rank() < m) return;
      Eigen::VectorXd xb = lu.solve(p.eq_rhs);
      if ((b * xb - p.eq_rhs).norm() > 1e-9 || xb.minCoeff() < -1e-10) return;
      double val = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) val += p.objective(cols[static_cast<std::size_t>(i)]) * xb(i);
      if (!best || val > *best) best = val;
      return;
    }
    for (Eigen::Index j = start; j < n; ++j) {
      cols.push_back(j);
      rec(j + 1);
      cols.pop_back();
    }
  };
  rec(0);
  return best;
}

}  // namespace testkit
