#include "ratiosynth/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

namespace ratiosynth {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorKind::Nondeterminism: return "NondeterminismError";
    case ErrorKind::Incompleteness: return "IncompletenessError";
    case ErrorKind::PolicyMismatch: return "PolicyMismatch";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::NotUnichain: return "NotUnichain";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::Unbounded: return "Unbounded";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::NotCommunicating: return "NotCommunicating";
    case ErrorKind::DegenerateDecoding: return "DegenerateDecoding";
    case ErrorKind::Unreachable: return "Unreachable";
    case ErrorKind::NoMaec: return "NoMaec";
    case ErrorKind::TaskUnsatisfiable: return "TaskUnsatisfiable";
    case ErrorKind::Param: return "ParamError";
  }
  return "Error";
}

std::string_view to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::Stochasticity: return "StochasticityViolation";
    case Violation::Kind::NoAction: return "NoActionViolation";
    case Violation::Kind::ProbabilityRange: return "ProbabilityRangeViolation";
    case Violation::Kind::BadTarget: return "BadTargetViolation";
    case Violation::Kind::BadInitial: return "BadInitialViolation";
    case Violation::Kind::BadLabel: return "BadLabelViolation";
    case Violation::Kind::DuplicateAction: return "DuplicateActionViolation";
  }
  return "Violation";
}

std::optional<std::size_t> Mdp::choice_index(StateId s, ActionId a) const {
  const auto& cs = choices[s];
  auto it = std::lower_bound(cs.begin(), cs.end(), a,
                             [](const Choice& c, ActionId id) { return c.action < id; });
  if (it == cs.end() || it->action != a) return std::nullopt;
  return static_cast<std::size_t>(it - cs.begin());
}

std::size_t Mdp::num_choices() const {
  std::size_t total = 0;
  for (const auto& cs : choices) total += cs.size();
  return total;
}

std::vector<Violation> validate_mdp(const Mdp& m) {
  std::vector<Violation> out;
  const std::size_t n = m.num_states();
  auto name = [&](StateId s) {
    return s < m.state_names.size() ? m.state_names[s] : std::to_string(s);
  };
  if (n == 0 || m.initial >= n) {
    out.push_back({Violation::Kind::BadInitial, m.initial, std::nullopt,
                   "initial state out of range"});
  }
  if (m.labels.size() != n) {
    out.push_back({Violation::Kind::BadLabel, 0, std::nullopt,
                   "label table has " + std::to_string(m.labels.size()) + " entries for " +
                       std::to_string(n) + " states"});
  }
  const LabelSet allowed =
      m.prop_names.size() >= 32 ? ~LabelSet{0} : ((LabelSet{1} << m.prop_names.size()) - 1);
  for (StateId s = 0; s < n; ++s) {
    if (s < m.labels.size() && (m.labels[s] & ~allowed) != 0) {
      out.push_back({Violation::Kind::BadLabel, s, std::nullopt,
                     "state " + name(s) + " carries an undeclared proposition"});
    }
    const auto& cs = m.choices[s];
    if (cs.empty()) {
      out.push_back({Violation::Kind::NoAction, s, std::nullopt,
                     "state " + name(s) + " has no available action"});
      continue;
    }
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const Choice& c = cs[k];
      if (k > 0 && cs[k - 1].action >= c.action) {
        out.push_back({Violation::Kind::DuplicateAction, s, c.action,
                       "actions at state " + name(s) + " are duplicated or unsorted"});
      }
      double sum = 0.0;
      for (const auto& succ : c.successors) {
        if (succ.target >= n) {
          out.push_back({Violation::Kind::BadTarget, s, c.action,
                         "successor index out of range at state " + name(s)});
        }
        if (!std::isfinite(succ.prob) || succ.prob < 0.0 || succ.prob > 1.0) {
          std::ostringstream os;
          os << "probability " << succ.prob << " outside [0, 1] at state " << name(s);
          out.push_back({Violation::Kind::ProbabilityRange, s, c.action, os.str()});
        }
        sum += succ.prob;
      }
      if (std::abs(sum - 1.0) > kStochasticTol) {
        std::ostringstream os;
        os << "outgoing probabilities of state " << name(s) << " sum to " << sum;
        out.push_back({Violation::Kind::Stochasticity, s, c.action, os.str()});
      }
    }
  }
  return out;
}

void require_valid(const Mdp& m) {
  auto violations = validate_mdp(m);
  if (violations.empty()) return;
  std::ostringstream os;
  os << violations.size() << " model violation(s):";
  for (const auto& v : violations) os << "\n  " << to_string(v.kind) << ": " << v.message;
  throw Error(ErrorKind::Validation, os.str());
}

std::vector<std::string> validate_dra(const Dra& d) {
  std::vector<std::string> out;
  if (d.num_states == 0) out.emplace_back("automaton has no states");
  if (d.initial >= d.num_states) out.emplace_back("initial automaton state out of range");
  if (d.ap.size() > kMaxProps) out.emplace_back("too many atomic propositions");
  if (d.pairs.empty()) out.emplace_back("no Rabin pairs");
  if (d.delta.size() != d.num_states) {
    out.emplace_back("transition table has wrong number of rows");
    return out;
  }
  for (AutStateId q = 0; q < d.num_states; ++q) {
    if (d.delta[q].size() != d.alphabet_size()) {
      out.emplace_back("transition row " + std::to_string(q) + " has wrong width");
      continue;
    }
    for (std::size_t sym = 0; sym < d.delta[q].size(); ++sym) {
      if (!d.delta[q][sym]) {
        out.emplace_back("no transition from state " + std::to_string(q) + " on symbol " +
                         std::to_string(sym));
      } else if (*d.delta[q][sym] >= d.num_states) {
        out.emplace_back("transition target out of range");
      }
    }
  }
  for (const auto& pair : d.pairs) {
    for (auto q : pair.fin)
      if (q >= d.num_states) out.emplace_back("Rabin pair state out of range");
    for (auto q : pair.inf)
      if (q >= d.num_states) out.emplace_back("Rabin pair state out of range");
  }
  return out;
}

namespace {

AutStateId dra_step(const Dra& d, AutStateId q, LabelSet sym) {
  const auto& next = d.delta.at(q).at(sym);
  if (!next) {
    throw Error(ErrorKind::AlphabetMismatch, "automaton has no transition from state " +
                                                 std::to_string(q) + " on symbol " +
                                                 std::to_string(sym));
  }
  return *next;
}

}  // namespace

bool dra_accepts_lasso(const Dra& d, std::span<const LabelSet> prefix,
                       std::span<const LabelSet> cycle) {
  if (cycle.empty()) throw Error(ErrorKind::Param, "lasso cycle must be nonempty");
  AutStateId q = d.initial;
  for (auto sym : prefix) q = dra_step(d, q, sym);
  // Iterate the cycle until the state at a cycle boundary repeats; the states
  // visited from the first occurrence onward are exactly inf(run).
  std::map<AutStateId, std::size_t> seen;
  std::vector<std::vector<AutStateId>> visited_per_round;
  while (!seen.contains(q)) {
    seen[q] = visited_per_round.size();
    std::vector<AutStateId> round;
    for (auto sym : cycle) {
      q = dra_step(d, q, sym);
      round.push_back(q);
    }
    visited_per_round.push_back(std::move(round));
  }
  std::vector<char> inf(d.num_states, 0);
  for (std::size_t r = seen[q]; r < visited_per_round.size(); ++r)
    for (auto s : visited_per_round[r]) inf[s] = 1;
  for (const auto& pair : d.pairs) {
    bool bad = std::any_of(pair.fin.begin(), pair.fin.end(), [&](auto s) { return inf[s]; });
    bool good = std::any_of(pair.inf.begin(), pair.inf.end(), [&](auto s) { return inf[s]; });
    if (good && !bad) return true;
  }
  return false;
}

ProductMdp build_product(const Mdp& m, const Dra& d) {
  require_valid(m);
  if (d.ap.size() > kMaxProps) throw Error(ErrorKind::Param, "too many atomic propositions");
  if (d.delta.size() != d.num_states || d.initial >= d.num_states)
    throw Error(ErrorKind::Validation, "malformed automaton");

  // Translate each model label into an automaton symbol by proposition name.
  std::vector<std::optional<PropId>> ap_to_prop(d.ap.size());
  for (std::size_t j = 0; j < d.ap.size(); ++j) {
    auto it = std::find(m.prop_names.begin(), m.prop_names.end(), d.ap[j]);
    if (it != m.prop_names.end()) ap_to_prop[j] = static_cast<PropId>(it - m.prop_names.begin());
  }
  std::vector<LabelSet> symbol(m.num_states(), 0);
  for (StateId s = 0; s < m.num_states(); ++s) {
    for (std::size_t j = 0; j < d.ap.size(); ++j) {
      if (ap_to_prop[j] && (m.labels[s] >> *ap_to_prop[j]) & 1U) symbol[s] |= LabelSet{1} << j;
    }
  }
  auto step = [&](AutStateId q, StateId s) {
    if (q >= d.delta.size() || symbol[s] >= d.delta[q].size() || !d.delta[q][symbol[s]]) {
      throw Error(ErrorKind::AlphabetMismatch,
                  "automaton has no transition from state " + std::to_string(q) +
                      " for the label of model state " + m.state_names[s]);
    }
    return *d.delta[q][symbol[s]];
  };

  ProductMdp pm;
  Mdp& out = pm.mdp;
  out.action_names = m.action_names;
  out.prop_names = m.prop_names;

  std::map<std::pair<StateId, AutStateId>, StateId> index;
  std::deque<StateId> queue;
  auto intern = [&](StateId s, AutStateId q) {
    auto [it, inserted] = index.try_emplace({s, q}, pm.origin.size());
    if (inserted) {
      pm.origin.emplace_back(s, q);
      out.state_names.push_back(m.state_names[s] + "@" + std::to_string(q));
      out.labels.push_back(m.labels[s]);
      out.choices.emplace_back();
      queue.push_back(it->second);
    }
    return it->second;
  };

  out.initial = intern(m.initial, step(d.initial, m.initial));
  while (!queue.empty()) {
    StateId ps = queue.front();
    queue.pop_front();
    auto [s, q] = pm.origin[ps];
    std::vector<Choice> cs;
    for (const Choice& c : m.choices[s]) {
      Choice pc{c.action, {}};
      for (const auto& succ : c.successors) {
        if (succ.prob <= 0.0) continue;
        pc.successors.push_back({intern(succ.target, step(q, succ.target)), succ.prob});
      }
      cs.push_back(std::move(pc));
    }
    out.choices[ps] = std::move(cs);
  }

  const std::size_t n = pm.origin.size();
  for (const auto& pair : d.pairs) {
    AcceptancePair ap{std::vector<char>(n, 0), std::vector<char>(n, 0)};
    std::vector<char> fin(d.num_states, 0), inf(d.num_states, 0);
    for (auto q : pair.fin) fin.at(q) = 1;
    for (auto q : pair.inf) inf.at(q) = 1;
    for (StateId ps = 0; ps < n; ++ps) {
      ap.bad[ps] = fin[pm.origin[ps].second];
      ap.good[ps] = inf[pm.origin[ps].second];
    }
    pm.pairs.push_back(std::move(ap));
  }
  return pm;
}

ProductMdp product_from_pairs(
    Mdp m, const std::vector<std::pair<std::vector<StateId>, std::vector<StateId>>>& pairs) {
  ProductMdp pm;
  const std::size_t n = m.num_states();
  for (StateId s = 0; s < n; ++s) pm.origin.emplace_back(s, 0);
  for (const auto& [bad, good] : pairs) {
    AcceptancePair ap{std::vector<char>(n, 0), std::vector<char>(n, 0)};
    for (auto s : bad) ap.bad.at(s) = 1;
    for (auto s : good) ap.good.at(s) = 1;
    pm.pairs.push_back(std::move(ap));
  }
  pm.mdp = std::move(m);
  return pm;
}

StationaryPolicy StationaryPolicy::uniform(const Mdp& m) {
  StationaryPolicy p;
  p.rule.resize(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s) {
    const auto k = m.choices[s].size();
    p.rule[s].assign(k, k ? 1.0 / static_cast<double>(k) : 0.0);
  }
  return p;
}

StationaryPolicy StationaryPolicy::deterministic(const Mdp& m, std::span<const std::size_t> pick) {
  if (pick.size() != m.num_states())
    throw Error(ErrorKind::PolicyMismatch, "one choice per state required");
  StationaryPolicy p;
  p.rule.resize(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (pick[s] >= m.choices[s].size())
      throw Error(ErrorKind::PolicyMismatch, "choice out of range at state " + std::to_string(s));
    p.rule[s].assign(m.choices[s].size(), 0.0);
    p.rule[s][pick[s]] = 1.0;
  }
  return p;
}

void validate_policy(const Mdp& m, const StationaryPolicy& p) {
  if (p.rule.size() != m.num_states())
    throw Error(ErrorKind::PolicyMismatch, "policy covers " + std::to_string(p.rule.size()) +
                                               " states, model has " +
                                               std::to_string(m.num_states()));
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (p.rule[s].size() != m.choices[s].size())
      throw Error(ErrorKind::PolicyMismatch,
                  "policy references unavailable actions at state " + m.state_names[s]);
    double sum = 0.0;
    for (double x : p.rule[s]) {
      if (!std::isfinite(x) || x < -kStochasticTol)
        throw Error(ErrorKind::PolicyMismatch, "negative probability at state " + m.state_names[s]);
      sum += x;
    }
    if (std::abs(sum - 1.0) > kStochasticTol)
      throw Error(ErrorKind::PolicyMismatch, "policy row does not sum to 1 at state " +
                                                 m.state_names[s]);
  }
}

StationaryPolicy mix(const StationaryPolicy& a, const StationaryPolicy& b, double delta) {
  if (a.rule.size() != b.rule.size())
    throw Error(ErrorKind::PolicyMismatch, "policies have different state counts");
  StationaryPolicy out = a;
  for (std::size_t s = 0; s < a.rule.size(); ++s) {
    if (a.rule[s].size() != b.rule[s].size())
      throw Error(ErrorKind::PolicyMismatch, "policies disagree on available actions");
    for (std::size_t k = 0; k < a.rule[s].size(); ++k)
      out.rule[s][k] = (1.0 - delta) * a.rule[s][k] + delta * b.rule[s][k];
  }
  return out;
}

UtilityFn UtilityFn::constant(const Mdp& m, double v, UtilityKind kind) {
  UtilityFn u;
  u.kind = kind;
  u.value.resize(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s) u.value[s].assign(m.choices[s].size(), v);
  return u;
}

void validate_utility(const Mdp& m, const UtilityFn& u) {
  if (u.value.size() != m.num_states())
    throw Error(ErrorKind::Validation, "utility table does not match the state count");
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (u.value[s].size() != m.choices[s].size())
      throw Error(ErrorKind::Validation, "utility table does not match the actions of state " +
                                             m.state_names[s]);
    for (double x : u.value[s]) {
      if (!std::isfinite(x))
        throw Error(ErrorKind::Validation, "non-finite utility at state " + m.state_names[s]);
      if (u.kind == UtilityKind::Cost && !(x > 0.0))
        throw Error(ErrorKind::Validation, "cost must be strictly positive at state " +
                                               m.state_names[s]);
    }
  }
}

UtilityFn lift_utility(const ProductMdp& pm, const Mdp& base, const UtilityFn& u) {
  validate_utility(base, u);
  UtilityFn out;
  out.kind = u.kind;
  out.value.resize(pm.num_states());
  for (StateId ps = 0; ps < pm.num_states(); ++ps) {
    StateId s = pm.origin[ps].first;
    for (const Choice& c : pm.mdp.choices[ps]) {
      auto k = base.choice_index(s, c.action);
      out.value[ps].push_back(u.value[s][*k]);
    }
  }
  return out;
}

Eigen::VectorXd utility_vector(const StationaryPolicy& p, const UtilityFn& u) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.rule.size()));
  for (std::size_t s = 0; s < p.rule.size(); ++s) {
    double acc = 0.0;
    for (std::size_t k = 0; k < p.rule[s].size(); ++k) acc += p.rule[s][k] * u.value[s][k];
    v(static_cast<Eigen::Index>(s)) = acc;
  }
  return v;
}

Mc induce_chain(const Mdp& m, const StationaryPolicy& p) {
  validate_policy(m, p);
  const auto n = static_cast<Eigen::Index>(m.num_states());
  Mc mc;
  mc.transition = Eigen::MatrixXd::Zero(n, n);
  mc.initial = Eigen::VectorXd::Zero(n);
  mc.initial(static_cast<Eigen::Index>(m.initial)) = 1.0;
  for (StateId s = 0; s < m.num_states(); ++s) {
    for (std::size_t k = 0; k < m.choices[s].size(); ++k) {
      const double w = p.rule[s][k];
      if (w == 0.0) continue;
      for (const auto& succ : m.choices[s][k].successors)
        mc.transition(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(succ.target)) +=
            w * succ.prob;
    }
  }
  return mc;
}

}  // namespace ratiosynth
