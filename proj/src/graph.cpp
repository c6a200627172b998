#include "ratiosynth/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace ratiosynth {

bool SubMdp::contains(StateId s) const { return index_of(s) != npos; }

std::size_t SubMdp::index_of(StateId s) const {
  auto it = std::lower_bound(states.begin(), states.end(), s);
  if (it == states.end() || *it != s) return npos;
  return static_cast<std::size_t>(it - states.begin());
}

bool operator==(const SubMdp& a, const SubMdp& b) {
  return a.states == b.states && a.actions == b.actions;
}

std::vector<std::size_t> strongly_connected_components(
    const std::vector<std::vector<std::size_t>>& adj, std::size_t* count) {
  const std::size_t n = adj.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> frames;  // (node, next edge)
  std::size_t next_index = 0, next_comp = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      auto& [v, edge] = frames.back();
      if (edge < adj[v].size()) {
        std::size_t w = adj[v][edge++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      std::size_t done = v;
      frames.pop_back();
      if (!frames.empty()) {
        std::size_t parent = frames.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == index[done]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = next_comp;
        } while (w != done);
        ++next_comp;
      }
    }
  }
  if (count) *count = next_comp;
  return comp;
}

bool is_closed(const Mdp& m, const SubMdp& sub) {
  if (sub.actions.size() != sub.states.size()) return false;
  if (!std::is_sorted(sub.states.begin(), sub.states.end())) return false;
  for (std::size_t i = 0; i < sub.states.size(); ++i) {
    const StateId s = sub.states[i];
    if (s >= m.num_states() || sub.actions[i].empty()) return false;
    for (auto k : sub.actions[i]) {
      if (k >= m.choices[s].size()) return false;
      for (const auto& succ : m.choices[s][k].successors)
        if (succ.prob > 0.0 && !sub.contains(succ.target)) return false;
    }
  }
  return true;
}

bool verify_end_component(const Mdp& m, const SubMdp& sub) {
  if (sub.states.empty() || !is_closed(m, sub)) return false;
  std::vector<std::vector<std::size_t>> adj(sub.states.size());
  for (std::size_t i = 0; i < sub.states.size(); ++i)
    for (auto k : sub.actions[i])
      for (const auto& succ : m.choices[sub.states[i]][k].successors)
        if (succ.prob > 0.0) adj[i].push_back(sub.index_of(succ.target));
  std::size_t count = 0;
  strongly_connected_components(adj, &count);
  return count == 1;
}

bool sub_contains(const SubMdp& outer, const SubMdp& inner) {
  for (std::size_t i = 0; i < inner.states.size(); ++i) {
    auto j = outer.index_of(inner.states[i]);
    if (j == SubMdp::npos) return false;
    if (!std::includes(outer.actions[j].begin(), outer.actions[j].end(),
                       inner.actions[i].begin(), inner.actions[i].end()))
      return false;
  }
  return true;
}

namespace {

std::vector<StateId> dfs_order(const Mdp& m, const SubMdp& sub) {
  std::vector<StateId> order;
  if (sub.states.empty()) return order;
  std::vector<char> seen(sub.states.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    std::size_t i = stack.back();
    stack.pop_back();
    order.push_back(sub.states[i]);
    for (auto k : sub.actions[i]) {
      for (const auto& succ : m.choices[sub.states[i]][k].successors) {
        if (succ.prob <= 0.0) continue;
        std::size_t j = sub.index_of(succ.target);
        if (j != SubMdp::npos && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
  }
  return order;
}

bool sub_less(const SubMdp& a, const SubMdp& b) {
  if (a.states != b.states) return a.states < b.states;
  return a.actions < b.actions;
}

}  // namespace

std::vector<EndComponent> mec_decompose(const Mdp& m) {
  return mec_decompose(m, std::vector<char>(m.num_states(), 1));
}

std::vector<EndComponent> mec_decompose(const Mdp& m, const std::vector<char>& allowed) {
  const std::size_t n = m.num_states();
  std::vector<char> alive(n, 0);
  std::vector<std::vector<char>> enabled(n);
  for (StateId s = 0; s < n; ++s) {
    alive[s] = s < allowed.size() && allowed[s];
    enabled[s].assign(m.choices[s].size(), alive[s]);
  }

  std::vector<std::size_t> comp;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::vector<std::size_t>> adj(n);
    for (StateId s = 0; s < n; ++s) {
      if (!alive[s]) continue;
      for (std::size_t k = 0; k < m.choices[s].size(); ++k) {
        if (!enabled[s][k]) continue;
        for (const auto& succ : m.choices[s][k].successors)
          if (succ.prob > 0.0 && alive[succ.target]) adj[s].push_back(succ.target);
      }
    }
    comp = strongly_connected_components(adj);
    for (StateId s = 0; s < n; ++s) {
      if (!alive[s]) continue;
      bool any = false;
      for (std::size_t k = 0; k < m.choices[s].size(); ++k) {
        if (!enabled[s][k]) continue;
        for (const auto& succ : m.choices[s][k].successors) {
          if (succ.prob > 0.0 && (!alive[succ.target] || comp[succ.target] != comp[s])) {
            enabled[s][k] = 0;
            changed = true;
            break;
          }
        }
        any = any || enabled[s][k];
      }
      if (!any) {
        alive[s] = 0;
        changed = true;
      }
    }
  }

  std::vector<EndComponent> out;
  std::vector<std::size_t> slot(n, SubMdp::npos);
  for (StateId s = 0; s < n; ++s) {
    if (!alive[s]) continue;
    std::size_t& idx = slot[comp[s]];
    if (idx == SubMdp::npos) {
      idx = out.size();
      out.emplace_back();
    }
    out[idx].states.push_back(s);
    std::vector<std::size_t> acts;
    for (std::size_t k = 0; k < m.choices[s].size(); ++k)
      if (enabled[s][k]) acts.push_back(k);
    out[idx].actions.push_back(std::move(acts));
  }
  for (auto& ec : out) ec.scc_witness = dfs_order(m, ec);
  std::sort(out.begin(), out.end(), sub_less);
  return out;
}

std::vector<EndComponent> maec_decompose(const ProductMdp& pm) {
  const std::size_t n = pm.num_states();
  std::vector<EndComponent> candidates;
  for (const auto& pair : pm.pairs) {
    std::vector<char> allowed(n);
    for (StateId s = 0; s < n; ++s) allowed[s] = !pair.bad[s];
    for (auto& ec : mec_decompose(pm.mdp, allowed)) {
      bool meets = std::any_of(ec.states.begin(), ec.states.end(),
                               [&](StateId s) { return pair.good[s] != 0; });
      if (meets) candidates.push_back(std::move(ec));
    }
  }
  std::sort(candidates.begin(), candidates.end(), sub_less);
  candidates.erase(std::unique(candidates.begin(), candidates.end(),
                               [](const EndComponent& a, const EndComponent& b) {
                                 return static_cast<const SubMdp&>(a) == b;
                               }),
                   candidates.end());
  std::vector<EndComponent> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < candidates.size() && !dominated; ++j)
      dominated = i != j && sub_contains(candidates[j], candidates[i]);
    if (!dominated) out.push_back(candidates[i]);
  }
  return out;
}

std::vector<EndComponent> amec_filter(const ProductMdp& pm) {
  auto mecs = mec_decompose(pm.mdp);
  auto maecs = maec_decompose(pm);
  std::vector<EndComponent> out;
  for (auto& mec : mecs) {
    bool holds = std::any_of(maecs.begin(), maecs.end(),
                             [&](const EndComponent& a) { return sub_contains(mec, a); });
    if (holds) out.push_back(std::move(mec));
  }
  return out;
}

std::vector<char> can_reach(const Mdp& m, const std::vector<char>& target) {
  const std::size_t n = m.num_states();
  std::vector<std::vector<StateId>> pred(n);
  for (StateId s = 0; s < n; ++s)
    for (const auto& c : m.choices[s])
      for (const auto& succ : c.successors)
        if (succ.prob > 0.0) pred[succ.target].push_back(s);
  std::vector<char> reached(target);
  reached.resize(n, 0);
  std::vector<StateId> queue;
  for (StateId s = 0; s < n; ++s)
    if (reached[s]) queue.push_back(s);
  while (!queue.empty()) {
    StateId t = queue.back();
    queue.pop_back();
    for (StateId s : pred[t]) {
      if (!reached[s]) {
        reached[s] = 1;
        queue.push_back(s);
      }
    }
  }
  return reached;
}

std::vector<StateId> almost_sure_region(const ProductMdp& pm) {
  const Mdp& m = pm.mdp;
  const std::size_t n = m.num_states();
  std::vector<char> target(n, 0);
  for (const auto& ec : amec_filter(pm))
    for (StateId s : ec.states) target[s] = 1;

  std::vector<char> region(n, 1);
  while (true) {
    // Only choices that cannot leave the region survive; then keep the states
    // that can still reach the target with them.
    std::vector<std::vector<StateId>> pred(n);
    for (StateId s = 0; s < n; ++s) {
      if (!region[s]) continue;
      for (const auto& c : m.choices[s]) {
        bool stays = std::all_of(c.successors.begin(), c.successors.end(), [&](const Successor& x) {
          return x.prob <= 0.0 || region[x.target];
        });
        if (!stays) continue;
        for (const auto& succ : c.successors)
          if (succ.prob > 0.0) pred[succ.target].push_back(s);
      }
    }
    std::vector<char> reach(n, 0);
    std::vector<StateId> queue;
    for (StateId s = 0; s < n; ++s) {
      if (region[s] && target[s]) {
        reach[s] = 1;
        queue.push_back(s);
      }
    }
    while (!queue.empty()) {
      StateId t = queue.back();
      queue.pop_back();
      for (StateId s : pred[t]) {
        if (!reach[s]) {
          reach[s] = 1;
          queue.push_back(s);
        }
      }
    }
    if (reach == region) break;
    region = std::move(reach);
  }
  std::vector<StateId> out;
  for (StateId s = 0; s < n; ++s)
    if (region[s]) out.push_back(s);
  return out;
}

StationaryPolicy attractor_policy(const Mdp& m, const std::vector<StateId>& target,
                                  StationaryPolicy p) {
  const std::size_t n = m.num_states();
  p.rule.resize(n);
  std::vector<char> grown(n, 0);
  for (StateId s : target) grown.at(s) = 1;

  std::vector<std::vector<StateId>> pred(n);
  for (StateId s = 0; s < n; ++s)
    for (const auto& c : m.choices[s])
      for (const auto& succ : c.successors)
        if (succ.prob > 0.0) pred[succ.target].push_back(s);

  std::priority_queue<StateId, std::vector<StateId>, std::greater<>> eligible;
  std::vector<char> queued(n, 0);
  auto offer_preds = [&](StateId t) {
    for (StateId s : pred[t]) {
      if (!grown[s] && !queued[s]) {
        queued[s] = 1;
        eligible.push(s);
      }
    }
  };
  for (StateId s = 0; s < n; ++s)
    if (grown[s]) offer_preds(s);

  while (!eligible.empty()) {
    StateId s = eligible.top();
    eligible.pop();
    std::size_t pick = SubMdp::npos;
    for (std::size_t k = 0; k < m.choices[s].size() && pick == SubMdp::npos; ++k) {
      double into = 0.0;
      for (const auto& succ : m.choices[s][k].successors)
        if (grown[succ.target]) into += succ.prob;
      if (into > 0.0) pick = k;
    }
    p.rule[s].assign(m.choices[s].size(), 0.0);
    p.rule[s][pick] = 1.0;
    grown[s] = 1;
    offer_preds(s);
  }
  for (StateId s = 0; s < n; ++s) {
    if (!grown[s])
      throw Error(ErrorKind::Unreachable,
                  "state " + m.state_names[s] + " cannot reach the target set");
  }
  return p;
}

Restriction restrict_mdp(const Mdp& m, const SubMdp& sub) {
  if (!is_closed(m, sub)) throw Error(ErrorKind::Validation, "sub-MDP is not closed");
  Restriction r;
  r.to_parent = sub.states;
  r.from_parent.assign(m.num_states(), SubMdp::npos);
  for (std::size_t i = 0; i < sub.states.size(); ++i) r.from_parent[sub.states[i]] = i;
  Mdp& out = r.mdp;
  out.action_names = m.action_names;
  out.prop_names = m.prop_names;
  out.initial = r.from_parent[m.initial] != SubMdp::npos ? r.from_parent[m.initial] : 0;
  for (std::size_t i = 0; i < sub.states.size(); ++i) {
    const StateId s = sub.states[i];
    out.state_names.push_back(m.state_names[s]);
    out.labels.push_back(m.labels[s]);
    std::vector<Choice> cs;
    for (auto k : sub.actions[i]) {
      Choice c{m.choices[s][k].action, {}};
      for (const auto& succ : m.choices[s][k].successors)
        if (succ.prob > 0.0) c.successors.push_back({r.from_parent[succ.target], succ.prob});
      cs.push_back(std::move(c));
    }
    out.choices.push_back(std::move(cs));
    r.choice_to_parent.push_back(sub.actions[i]);
  }
  return r;
}

ProductMdp restrict_product(const ProductMdp& pm, const SubMdp& sub, Restriction* map) {
  Restriction r = restrict_mdp(pm.mdp, sub);
  ProductMdp out;
  for (StateId s : r.to_parent) out.origin.push_back(pm.origin[s]);
  for (const auto& pair : pm.pairs) {
    AcceptancePair ap;
    for (StateId s : r.to_parent) {
      ap.bad.push_back(pair.bad[s]);
      ap.good.push_back(pair.good[s]);
    }
    out.pairs.push_back(std::move(ap));
  }
  out.mdp = r.mdp;
  if (map) *map = std::move(r);
  return out;
}

UtilityFn restrict_utility(const Restriction& r, const UtilityFn& u) {
  UtilityFn out;
  out.kind = u.kind;
  for (std::size_t i = 0; i < r.to_parent.size(); ++i) {
    std::vector<double> row;
    for (auto k : r.choice_to_parent[i]) row.push_back(u.value[r.to_parent[i]][k]);
    out.value.push_back(std::move(row));
  }
  return out;
}

StationaryPolicy restrict_policy(const Restriction& r, const StationaryPolicy& p) {
  StationaryPolicy out;
  for (std::size_t i = 0; i < r.to_parent.size(); ++i) {
    std::vector<double> row;
    for (auto k : r.choice_to_parent[i]) row.push_back(p.rule[r.to_parent[i]][k]);
    out.rule.push_back(std::move(row));
  }
  return out;
}

EndComponent lift_component(const Restriction& r, const EndComponent& ec) {
  EndComponent out;
  for (std::size_t i = 0; i < ec.states.size(); ++i) {
    const std::size_t local = ec.states[i];
    out.states.push_back(r.to_parent[local]);
    std::vector<std::size_t> acts;
    for (auto k : ec.actions[i]) acts.push_back(r.choice_to_parent[local][k]);
    out.actions.push_back(std::move(acts));
  }
  for (StateId s : ec.scc_witness) out.scc_witness.push_back(r.to_parent[s]);
  // to_parent is increasing, so sortedness is preserved.
  return out;
}

SubMdp full_sub_mdp(const Mdp& m) {
  SubMdp sub;
  for (StateId s = 0; s < m.num_states(); ++s) {
    sub.states.push_back(s);
    std::vector<std::size_t> acts(m.choices[s].size());
    for (std::size_t k = 0; k < acts.size(); ++k) acts[k] = k;
    sub.actions.push_back(std::move(acts));
  }
  return sub;
}

}  // namespace ratiosynth
