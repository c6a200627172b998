#include "ratiosynth/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ratiosynth {

std::string_view to_string(DeltaMethod m) {
  return m == DeltaMethod::Estimated ? "es" : "ex";
}

StationaryPolicy uniform_irreducible_policy(const Mdp& m, const SubMdp& sub) {
  StationaryPolicy p = StationaryPolicy::uniform(m);
  for (std::size_t i = 0; i < sub.states.size(); ++i) {
    auto& row = p.rule[sub.states[i]];
    std::fill(row.begin(), row.end(), 0.0);
    const double w = 1.0 / static_cast<double>(sub.actions[i].size());
    for (auto k : sub.actions[i]) row[k] = w;
  }
  return p;
}

namespace {

double mixed_efficiency(const Mdp& m, const StationaryPolicy& a, const StationaryPolicy& b,
                        double delta, const UtilityFn& r, const UtilityFn& c) {
  return policy_efficiency(m, mix(a, b, delta), r, c);
}

double min_cost(const UtilityFn& c) {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& row : c.value)
    for (double x : row) out = std::min(out, x);
  return out;
}

}  // namespace

PerturbationPlan perturbation_degree_estimated(const Mdp& m, const StationaryPolicy& mu_opt,
                                               const StationaryPolicy& mu_irr,
                                               const UtilityFn& r, const UtilityFn& c,
                                               double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Param, "epsilon must be positive");
  auto ca = analyze(induce_chain(m, mu_opt));
  if (!ca.unichain())
    throw Error(ErrorKind::NotUnichain, "the policy to perturb is not unichain");
  PerturbationPlan plan;
  plan.mu_opt = mu_opt;
  plan.mu_irr = mu_irr;
  plan.method = DeltaMethod::Estimated;
  plan.base_value = efficiency(ca, r, c, mu_opt, m.initial);
  Eigen::VectorXd dr = deviation_vector(m, mu_opt, mu_irr, r);
  Eigen::VectorXd dc = deviation_vector(m, mu_opt, mu_irr, c);
  plan.d_inf = (dr - plan.base_value * dc).lpNorm<Eigen::Infinity>();
  plan.c_min = min_cost(c);
  if (plan.d_inf <= 1e-14) {
    plan.degenerate = true;
    plan.delta = 0.5;
    return plan;
  }
  plan.delta = epsilon * plan.c_min / plan.d_inf;
  if (plan.delta >= 1.0) plan.delta = 1.0 - 1e-9;
  return plan;
}

PerturbationPlan perturbation_degree_exact(const Mdp& m, const StationaryPolicy& mu_opt,
                                           const StationaryPolicy& mu_irr, const UtilityFn& r,
                                           const UtilityFn& c, double epsilon, double width) {
  PerturbationPlan plan = perturbation_degree_estimated(m, mu_opt, mu_irr, r, c, epsilon);
  plan.method = DeltaMethod::Exact;
  const double target = plan.base_value - epsilon;
  auto ok = [&](double delta) {
    return mixed_efficiency(m, mu_opt, mu_irr, delta, r, c) >= target - 1e-12;
  };
  double lo = ok(plan.delta) ? plan.delta : 0.0;
  double hi = 1.0 - width;
  if (ok(hi)) {
    plan.delta = std::max(hi, lo);
    return plan;
  }
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  plan.delta = lo;
  return plan;
}

std::vector<AcceptanceWitness> acceptance_certificates(const ProductMdp& pm,
                                                       const StationaryPolicy& p,
                                                       const ChainAnalysis& ca) {
  (void)p;
  std::vector<AcceptanceWitness> out;
  for (auto k : ca.reachable_classes(pm.mdp.initial)) {
    AcceptanceWitness w;
    w.recurrent_class = ca.recurrent_classes[k];
    w.probability = ca.absorb(static_cast<Eigen::Index>(pm.mdp.initial), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < pm.pairs.size() && !w.pair; ++i) {
      const auto& pair = pm.pairs[i];
      bool good = std::any_of(w.recurrent_class.begin(), w.recurrent_class.end(),
                              [&](StateId s) { return pair.good[s] != 0; });
      bool bad = std::any_of(w.recurrent_class.begin(), w.recurrent_class.end(),
                             [&](StateId s) { return pair.bad[s] != 0; });
      if (good && !bad) w.pair = i;
    }
    out.push_back(std::move(w));
  }
  return out;
}

bool accepted_with_probability_one(const std::vector<AcceptanceWitness>& certs) {
  double total = 0.0;
  for (const auto& w : certs) {
    if (!w.pair) return false;
    total += w.probability;
  }
  return total >= 1.0 - 1e-9;
}

namespace {

void finish_report(SynthesisReport& rep, const ProductMdp& pm, const UtilityFn& r,
                   const UtilityFn& c) {
  auto ca = analyze(induce_chain(pm.mdp, rep.policy));
  rep.achieved = efficiency(ca, r, c, rep.policy, pm.mdp.initial);
  rep.certificates = acceptance_certificates(pm, rep.policy, ca);
  rep.accepted_wp1 = accepted_with_probability_one(rep.certificates);
}

// Does the single recurrent class of `p` already satisfy some pair?
bool accepting_as_is(const ProductMdp& pm, const StationaryPolicy& p) {
  auto ca = analyze(induce_chain(pm.mdp, p));
  if (!ca.unichain()) return false;
  auto certs = acceptance_certificates(pm, p, ca);
  return accepted_with_probability_one(certs);
}

}  // namespace

SynthesisReport synth_communicating(const ProductMdp& pm, const UtilityFn& r, const UtilityFn& c,
                                    double epsilon, const SynthesisOptions& opt) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Param, "epsilon must be positive");
  validate_utility(pm.mdp, r);
  validate_utility(pm.mdp, c);
  auto maecs = maec_decompose(pm);
  if (maecs.empty())
    throw Error(ErrorKind::NoMaec, "no accepting end component, the task cannot be satisfied");

  SynthesisReport rep;
  rep.epsilon = epsilon;
  rep.method = opt.method;

  struct Local {
    Restriction map;
    ProductMdp sub;
    UtilityFn r, c;
    StationaryPolicy mu_opt;
  };
  std::vector<Local> locals;
  for (const auto& maec : maecs) {
    Local loc;
    loc.sub = restrict_product(pm, maec, &loc.map);
    loc.r = restrict_utility(loc.map, r);
    loc.c = restrict_utility(loc.map, c);
    auto lfp = solve_ratio_lfp(loc.sub.mdp, loc.r, loc.c, opt.simplex);
    loc.mu_opt = decode_ratio_policy(loc.sub.mdp, lfp, loc.r, loc.c, opt.support_threshold);
    AmecSummary summary;
    summary.component = maec;
    summary.value = lfp.value;
    rep.amecs.push_back(std::move(summary));
    locals.push_back(std::move(loc));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < rep.amecs.size(); ++i)
    if (rep.amecs[i].value > rep.amecs[best].value + 1e-12) best = i;
  rep.amec_chosen = best;
  rep.value = rep.amecs[best].value;
  rep.amecs[best].used = true;

  Local& loc = locals[best];
  StationaryPolicy local_policy;
  if (opt.allow_no_perturbation && accepting_as_is(loc.sub, loc.mu_opt)) {
    rep.no_perturbation = true;
    rep.delta = 0.0;
    local_policy = loc.mu_opt;
  } else {
    StationaryPolicy mu_irr = opt.irreducible
                                  ? opt.irreducible(loc.sub.mdp)
                                  : uniform_irreducible_policy(loc.sub.mdp,
                                                               full_sub_mdp(loc.sub.mdp));
    validate_policy(loc.sub.mdp, mu_irr);
    PerturbationPlan plan =
        opt.method == DeltaMethod::Estimated
            ? perturbation_degree_estimated(loc.sub.mdp, loc.mu_opt, mu_irr, loc.r, loc.c,
                                            epsilon)
            : perturbation_degree_exact(loc.sub.mdp, loc.mu_opt, mu_irr, loc.r, loc.c, epsilon,
                                        opt.bisection_width);
    rep.delta = plan.delta;
    rep.d_inf = plan.d_inf;
    rep.degenerate_bound = plan.degenerate;
    local_policy = mix(loc.mu_opt, mu_irr, plan.delta);
  }
  rep.amecs[best].delta = rep.delta;
  rep.amecs[best].no_perturbation = rep.no_perturbation;

  StationaryPolicy full;
  full.rule.resize(pm.num_states());
  for (std::size_t i = 0; i < loc.map.to_parent.size(); ++i) {
    const StateId s = loc.map.to_parent[i];
    full.rule[s].assign(pm.mdp.choices[s].size(), 0.0);
    for (std::size_t k = 0; k < loc.map.choice_to_parent[i].size(); ++k)
      full.rule[s][loc.map.choice_to_parent[i][k]] = local_policy.rule[i][k];
  }
  rep.policy = attractor_policy(pm.mdp, loc.map.to_parent, std::move(full));
  finish_report(rep, pm, r, c);
  return rep;
}

RewardK build_reward_k(const Mdp& m, const std::vector<EndComponent>& amecs,
                       const std::vector<double>& values, const UtilityFn& r,
                       const UtilityFn& c, double margin) {
  if (amecs.size() != values.size())
    throw Error(ErrorKind::Param, "one value per component required");
  double r_hat = 0.0;
  for (const auto& row : r.value)
    for (double x : row) r_hat = std::max(r_hat, std::abs(x));
  RewardK out;
  out.k = -r_hat / min_cost(c) - margin;
  out.reward.kind = UtilityKind::Reward;
  out.reward.value.resize(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s)
    out.reward.value[s].assign(m.choices[s].size(), out.k);
  for (std::size_t i = 0; i < amecs.size(); ++i)
    for (std::size_t j = 0; j < amecs[i].states.size(); ++j)
      for (auto k : amecs[i].actions[j]) out.reward.value[amecs[i].states[j]][k] = values[i];
  return out;
}

SynthesisReport synth_general(const ProductMdp& pm, const UtilityFn& r, const UtilityFn& c,
                              double epsilon, const SynthesisOptions& opt) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Param, "epsilon must be positive");
  validate_utility(pm.mdp, r);
  validate_utility(pm.mdp, c);
  const Mdp& m = pm.mdp;

  auto region = almost_sure_region(pm);
  if (region.empty())
    throw Error(ErrorKind::TaskUnsatisfiable, "no accepting end component exists");
  if (!std::binary_search(region.begin(), region.end(), m.initial))
    throw Error(ErrorKind::TaskUnsatisfiable,
                "the task cannot be satisfied with probability one from the initial state");

  // Work inside the almost-sure region, keeping only choices that stay there.
  SubMdp keep;
  keep.states = region;
  for (StateId s : region) {
    std::vector<std::size_t> acts;
    for (std::size_t k = 0; k < m.choices[s].size(); ++k) {
      const auto& succ = m.choices[s][k].successors;
      if (std::all_of(succ.begin(), succ.end(), [&](const Successor& x) {
            return x.prob <= 0.0 || std::binary_search(region.begin(), region.end(), x.target);
          }))
        acts.push_back(k);
    }
    keep.actions.push_back(std::move(acts));
  }
  Restriction wmap;
  ProductMdp work = restrict_product(pm, keep, &wmap);
  UtilityFn wr = restrict_utility(wmap, r);
  UtilityFn wc = restrict_utility(wmap, c);

  auto amecs = amec_filter(work);
  SynthesisReport rep;
  rep.epsilon = epsilon;
  rep.method = opt.method;

  std::vector<double> values;
  std::vector<Restriction> maps(amecs.size());
  std::vector<StationaryPolicy> policies;
  for (std::size_t i = 0; i < amecs.size(); ++i) {
    ProductMdp sub = restrict_product(work, amecs[i], &maps[i]);
    auto sr = synth_communicating(sub, restrict_utility(maps[i], wr),
                                  restrict_utility(maps[i], wc), epsilon, opt);
    values.push_back(sr.value);
    policies.push_back(std::move(sr.policy));
    AmecSummary summary;
    summary.component = lift_component(wmap, amecs[i]);
    summary.value = sr.value;
    summary.delta = sr.delta;
    summary.no_perturbation = sr.no_perturbation;
    rep.amecs.push_back(std::move(summary));
    if (sr.degenerate_bound) rep.degenerate_bound = true;
  }

  RewardK rk = build_reward_k(work.mdp, amecs, values, wr, wc, opt.k_margin);
  rep.k = rk.k;
  auto avg = solve_avg_reward_lp(work.mdp, rk.reward, opt.simplex);
  StationaryPolicy mu_k = decode_avg_policy(work.mdp, avg, opt.support_threshold);
  auto ca_k = analyze(induce_chain(work.mdp, mu_k));
  rep.value = average_utility(ca_k, rk.reward, mu_k, work.mdp.initial);

  StationaryPolicy stitched = mu_k;
  std::vector<char> recurrent(work.num_states(), 0);
  for (const auto& cls : ca_k.recurrent_classes)
    for (StateId s : cls) recurrent[s] = 1;
  for (std::size_t i = 0; i < amecs.size(); ++i) {
    bool hit = std::any_of(amecs[i].states.begin(), amecs[i].states.end(),
                           [&](StateId s) { return recurrent[s] != 0; });
    if (!hit) continue;
    rep.amecs[i].used = true;
    for (std::size_t j = 0; j < amecs[i].states.size(); ++j) {
      const StateId s = amecs[i].states[j];
      stitched.rule[s].assign(work.mdp.choices[s].size(), 0.0);
      for (std::size_t k = 0; k < maps[i].choice_to_parent[j].size(); ++k)
        stitched.rule[s][maps[i].choice_to_parent[j][k]] = policies[i].rule[j][k];
    }
  }
  for (const auto& cls : ca_k.recurrent_classes) {
    bool inside = std::any_of(amecs.begin(), amecs.end(),
                              [&](const EndComponent& a) { return a.contains(cls.front()); });
    if (!inside) rep.notes.push_back("surrogate policy has a recurrent class outside every AMEC");
  }

  rep.policy = StationaryPolicy::uniform(m);
  for (std::size_t i = 0; i < wmap.to_parent.size(); ++i) {
    const StateId s = wmap.to_parent[i];
    std::fill(rep.policy.rule[s].begin(), rep.policy.rule[s].end(), 0.0);
    for (std::size_t k = 0; k < wmap.choice_to_parent[i].size(); ++k)
      rep.policy.rule[s][wmap.choice_to_parent[i][k]] = stitched.rule[i][k];
  }

  bool first = true;
  rep.no_perturbation = true;
  for (std::size_t i = 0; i < rep.amecs.size(); ++i) {
    if (!rep.amecs[i].used) continue;
    if (first) {
      rep.amec_chosen = i;
      rep.delta = rep.amecs[i].delta;
      first = false;
    }
    rep.no_perturbation = rep.no_perturbation && rep.amecs[i].no_perturbation;
  }
  if (first) rep.no_perturbation = false;
  finish_report(rep, pm, r, c);
  return rep;
}

}  // namespace ratiosynth
