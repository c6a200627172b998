#include "ratiosynth/report.hpp"

#include <cstdio>

#include "ratiosynth/parsers.hpp"

namespace ratiosynth {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

namespace {

json names(const Mdp& m, const std::vector<StateId>& states) {
  json out = json::array();
  for (StateId s : states) out.push_back(m.state_names[s]);
  return out;
}

json components(const Mdp& m, const std::vector<EndComponent>& ecs) {
  json out = json::array();
  for (const auto& ec : ecs) out.push_back(component_json(m, ec));
  return out;
}

}  // namespace

json component_json(const Mdp& m, const SubMdp& sub) {
  json actions = json::object();
  for (std::size_t i = 0; i < sub.states.size(); ++i) {
    json acts = json::array();
    for (std::size_t k : sub.actions[i])
      acts.push_back(m.action_names[m.choices[sub.states[i]][k].action]);
    actions[m.state_names[sub.states[i]]] = acts;
  }
  return {{"states", names(m, sub.states)}, {"actions", actions}};
}

json decomposition_json(const ProductMdp& pm) {
  return {{"mecs", components(pm.mdp, mec_decompose(pm.mdp))},
          {"maecs", components(pm.mdp, maec_decompose(pm))},
          {"amecs", components(pm.mdp, amec_filter(pm))},
          {"almost_sure_region", names(pm.mdp, almost_sure_region(pm))}};
}

json synthesis_json(const Mdp& m, const SynthesisReport& rep) {
  json amecs = json::array();
  for (const auto& a : rep.amecs) {
    json e = component_json(m, a.component);
    e["value"] = a.value;
    e["delta"] = a.delta;
    e["no_perturbation"] = a.no_perturbation;
    e["used"] = a.used;
    amecs.push_back(e);
  }
  json certs = json::array();
  for (const auto& w : rep.certificates)
    certs.push_back({{"recurrent_class", names(m, w.recurrent_class)},
                     {"pair", w.pair ? json(*w.pair) : json(nullptr)},
                     {"probability", w.probability}});
  return {{"value", rep.value},
          {"achieved", rep.achieved},
          {"epsilon", rep.epsilon},
          {"method", std::string(to_string(rep.method))},
          {"delta", rep.delta},
          {"d_inf", rep.d_inf},
          {"no_perturbation", rep.no_perturbation},
          {"degenerate_bound", rep.degenerate_bound},
          {"k", rep.k},
          {"amec_chosen", rep.amec_chosen},
          {"amecs", amecs},
          {"certificates", certs},
          {"accepted_wp1", rep.accepted_wp1},
          {"notes", rep.notes}};
}

json evaluation_json(const ProductMdp& pm, const StationaryPolicy& p, const UtilityFn& r,
                     const UtilityFn& c) {
  const Mdp& m = pm.mdp;
  validate_policy(m, p);
  auto ca = analyze(induce_chain(m, p));
  const Eigen::VectorXd rv = utility_vector(p, r), cv = utility_vector(p, c);
  const auto ratios = class_ratios(ca, rv, cv);
  const auto certs = acceptance_certificates(pm, p, ca);
  json classes = json::array();
  json offending = json::array();
  double accepted = 0.0;
  for (std::size_t i = 0; i < certs.size(); ++i) {
    const auto& w = certs[i];
    const int k = ca.class_of[w.recurrent_class.front()];
    classes.push_back({{"states", names(m, w.recurrent_class)},
                       {"ratio", ratios[static_cast<std::size_t>(k)]},
                       {"probability", w.probability},
                       {"pair", w.pair ? json(*w.pair) : json(nullptr)}});
    if (w.pair) {
      accepted += w.probability;
    } else {
      offending.push_back(i);
    }
  }
  return {{"efficiency", efficiency(ca, rv, cv, m.initial)},
          {"recurrent_classes", classes},
          {"accepted_wp1", accepted_with_probability_one(certs)},
          {"acceptance_probability", accepted},
          {"offending_classes", offending}};
}

json rollout_json(const Mdp& m, const RolloutStats& st, const RolloutConfig& cfg) {
  json labels = json::object();
  for (std::size_t q = 0; q < m.prop_names.size(); ++q) labels[m.prop_names[q]] = st.label_freq[q];
  json visits = json::object();
  for (StateId s = 0; s < m.num_states(); ++s)
    if (st.visit_freq[s] > 0.0) visits[m.state_names[s]] = st.visit_freq[s];
  return {{"steps", cfg.steps},       {"rollouts", cfg.rollouts},  {"seed", cfg.seed},
          {"mean_ratio", st.mean_ratio}, {"stderr", st.stderr_ratio}, {"ratios", st.ratios},
          {"label_freq", labels},     {"visit_freq", visits}};
}

std::string rollout_csv(const RolloutStats& st) {
  std::string out = "rollout,ratio\n";
  for (std::size_t i = 0; i < st.ratios.size(); ++i)
    out += std::to_string(i) + "," + format_double(st.ratios[i]) + "\n";
  return out;
}

json options_json(const SynthesisOptions& opt) {
  return {{"method", std::string(to_string(opt.method))},
          {"bisection_width", opt.bisection_width},
          {"k_margin", opt.k_margin},
          {"support_threshold", opt.support_threshold},
          {"allow_no_perturbation", opt.allow_no_perturbation},
          {"pricing", opt.simplex.pricing == Pricing::Bland ? "bland" : "dantzig-bland"},
          {"pivot_tol", opt.simplex.pivot_tol},
          {"optimality_tol", opt.simplex.optimality_tol},
          {"feasibility_tol", opt.simplex.feasibility_tol},
          {"max_iterations", opt.simplex.max_iterations},
          {"degenerate_run", opt.simplex.degenerate_run},
          {"refactor_interval", opt.simplex.refactor_interval},
          {"chain_support_tol", kSupportTol},
          {"stochastic_tol", kStochasticTol}};
}

}  // namespace ratiosynth
