#include "ratiosynth/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ratiosynth/casestudies.hpp"
#include "ratiosynth/parsers.hpp"
#include "ratiosynth/report.hpp"

namespace ratiosynth {

using nlohmann::json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Param:
      return 1;
    case ErrorKind::Parse:
    case ErrorKind::Validation:
    case ErrorKind::AlphabetMismatch:
    case ErrorKind::Nondeterminism:
    case ErrorKind::Incompleteness:
    case ErrorKind::PolicyMismatch:
      return 2;
    case ErrorKind::TaskUnsatisfiable:
    case ErrorKind::NoMaec:
      return 3;
    default:
      return 4;
  }
}

namespace {

struct Inputs {
  std::string model;
  std::string dra;
  std::string utilities;
  std::string policy;
};

struct Knobs {
  double epsilon = 1e-3;
  std::string method = "es";
  double k_margin = 1.0;
  double bisection_width = 1e-6;
  double support = kSupportThreshold;
  double pivot = 1e-9;
  double optimality = 1e-9;
  double feasibility = 1e-9;
  std::size_t max_iterations = 1'000'000;
  std::size_t refactor = 0;
  std::string pricing = "dantzig-bland";
  bool no_shortcut = false;

  SynthesisOptions options() const {
    SynthesisOptions o;
    o.method = method == "ex" ? DeltaMethod::Exact : DeltaMethod::Estimated;
    o.k_margin = k_margin;
    o.bisection_width = bisection_width;
    o.support_threshold = support;
    o.allow_no_perturbation = !no_shortcut;
    o.simplex.pricing = pricing == "bland" ? Pricing::Bland : Pricing::DantzigBland;
    o.simplex.pivot_tol = pivot;
    o.simplex.optimality_tol = optimality;
    o.simplex.feasibility_tol = feasibility;
    o.simplex.max_iterations = max_iterations;
    o.simplex.refactor_interval = refactor;
    return o;
  }
};

struct Loaded {
  Mdp base;
  std::optional<ProductMdp> product;
  UtilityFn reward;
  UtilityFn cost;
  bool has_utilities = false;
  json hashes = json::object();
};

std::string read_hashed(const std::string& path, json& hashes) {
  std::string text = read_file(path);
  hashes[path] = hex64(fnv1a(text));
  return text;
}

Loaded load(const Inputs& in, bool need_utilities) {
  Loaded out;
  auto parsed = parse_mdp(read_hashed(in.model, out.hashes));
  out.base = std::move(parsed.mdp);
  if (parsed.reward && parsed.cost) {
    out.reward = *parsed.reward;
    out.cost = *parsed.cost;
    out.has_utilities = true;
  }
  if (!in.utilities.empty()) {
    auto tables = parse_utilities(read_hashed(in.utilities, out.hashes), out.base);
    if (tables.reward) out.reward = *tables.reward;
    if (tables.cost) out.cost = *tables.cost;
    out.has_utilities = (tables.reward || parsed.reward) && (tables.cost || parsed.cost);
    if (!tables.reward && parsed.reward) out.reward = *parsed.reward;
    if (!tables.cost && parsed.cost) out.cost = *parsed.cost;
  }
  if (need_utilities && !out.has_utilities)
    throw Error(ErrorKind::Validation, "reward and cost tables are required");
  if (!in.dra.empty()) {
    out.product = build_product(out.base, parse_dra(read_hashed(in.dra, out.hashes)));
    if (out.has_utilities) {
      out.reward = lift_utility(*out.product, out.base, out.reward);
      out.cost = lift_utility(*out.product, out.base, out.cost);
    }
  }
  return out;
}

json manifest(const std::string& command, const json& hashes, const json& extra) {
  json m = {{"tool_version", std::string(kToolVersion)},
            {"schema_version", kSchemaVersion},
            {"command", command},
            {"inputs", hashes}};
  for (const auto& [k, v] : extra.items()) m[k] = v;
  return m;
}

void emit(const json& report, const std::string& out) {
  const std::string text = report.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
}

json wrap(const std::string& command, const json& body, const json& man) {
  json r = {{"schema_version", kSchemaVersion}, {"command", command}};
  for (const auto& [k, v] : body.items()) r[k] = v;
  r["manifest"] = man;
  return r;
}

void add_model_flags(CLI::App* sub, Inputs& in, bool dra_required) {
  sub->add_option("--model", in.model, "Model file")->required();
  auto* d = sub->add_option("--dra", in.dra, "Rabin automaton (HOA subset)");
  if (dra_required) d->required();
  sub->add_option("--utilities", in.utilities, "Reward/cost tables overriding the model's");
}

void add_knobs(CLI::App* sub, Knobs& k) {
  sub->add_option("--epsilon", k.epsilon, "Suboptimality threshold")
      ->check(CLI::PositiveNumber);
  sub->add_option("--method", k.method, "Perturbation degree: es or ex")
      ->check(CLI::IsMember({"es", "ex"}));
  sub->add_option("--k-margin", k.k_margin, "Margin below the smallest ratio for the surrogate reward")
      ->check(CLI::PositiveNumber);
  sub->add_option("--bisection-width", k.bisection_width, "Final interval width of the exact search")
      ->check(CLI::PositiveNumber);
  sub->add_option("--tol-support", k.support, "Support threshold when decoding LP solutions");
  sub->add_option("--tol-pivot", k.pivot, "Smallest admissible simplex pivot");
  sub->add_option("--tol-optimality", k.optimality, "Reduced-cost tolerance");
  sub->add_option("--tol-feasibility", k.feasibility, "Constraint residual tolerance");
  sub->add_option("--max-iterations", k.max_iterations, "Simplex iteration cap");
  sub->add_option("--refactor-interval", k.refactor, "Pivots between tableau rebuilds (0: automatic)");
  sub->add_option("--pricing", k.pricing, "bland or dantzig-bland")
      ->check(CLI::IsMember({"bland", "dantzig-bland"}));
  sub->add_flag("--no-shortcut", k.no_shortcut,
                "Always perturb, even when the optimal policy already meets the task");
}

int cmd_decompose(const Inputs& in, const std::string& out) {
  auto L = load(in, false);
  const ProductMdp& pm = *L.product;
  json body = decomposition_json(pm);
  emit(wrap("decompose", body, manifest("decompose", L.hashes, json::object())), out);
  if (body["amecs"].empty()) {
    std::cerr << "error: no accepting maximal end component\n";
    return exit_code(ErrorKind::TaskUnsatisfiable);
  }
  return 0;
}

int cmd_synthesize(const Inputs& in, const Knobs& k, const std::string& out,
                   const std::string& policy_out) {
  auto L = load(in, true);
  const auto opt = k.options();
  auto rep = synth_general(*L.product, L.reward, L.cost, k.epsilon, opt);
  json man = manifest("synthesize", L.hashes, {{"options", options_json(opt)}});
  emit(wrap("synthesize", synthesis_json(L.product->mdp, rep), man), out);
  if (!policy_out.empty()) {
    write_file(policy_out, write_policy(L.product->mdp, rep.policy,
                                        {{"epsilon", format_double(k.epsilon)},
                                         {"method", std::string(to_string(rep.method))},
                                         {"value", format_double(rep.value)},
                                         {"delta", format_double(rep.delta)}}));
  }
  return 0;
}

int cmd_evaluate(const Inputs& in, const std::string& out) {
  auto L = load(in, true);
  auto p = parse_policy(read_hashed(in.policy, L.hashes), L.product->mdp);
  json body = evaluation_json(*L.product, p, L.reward, L.cost);
  emit(wrap("evaluate", body, manifest("evaluate", L.hashes, json::object())), out);
  return 0;
}

int cmd_simulate(const Inputs& in, const RolloutConfig& cfg, const std::string& out,
                 const std::string& csv) {
  auto L = load(in, true);
  const Mdp& m = L.product ? L.product->mdp : L.base;
  auto p = parse_policy(read_hashed(in.policy, L.hashes), m);
  auto st = simulate(m, p, L.reward, L.cost, cfg);
  json body = rollout_json(m, st, cfg);
  if (L.product) {
    auto visits = acceptance_visits(*L.product, p, cfg);
    json pairs = json::array();
    for (const auto& v : visits)
      pairs.push_back({{"good", v.good}, {"bad", v.bad}, {"good_late", v.good_late},
                       {"bad_late", v.bad_late}});
    body["pair_visits"] = pairs;
  }
  emit(wrap("simulate", body, manifest("simulate", L.hashes, {{"seed", cfg.seed}})), out);
  if (!csv.empty()) write_file(csv, rollout_csv(st));
  return 0;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Param, "bad number '" + item + "' in list");
    }
  }
  if (out.empty()) throw Error(ErrorKind::Param, "empty list");
  return out;
}

std::string csv_row(const std::vector<double>& xs) {
  std::string row;
  for (std::size_t i = 0; i < xs.size(); ++i) row += (i ? "," : "") + format_double(xs[i]);
  return row + "\n";
}

int cmd_casestudy(const std::string& name, const std::string& params_path, const std::string& dir,
                  const Knobs& k, const std::string& epsilons, const std::string& bonuses,
                  bool synthesize) {
  namespace fs = std::filesystem;
  json hashes = json::object();
  const std::string params = params_path.empty() ? "" : read_hashed(params_path, hashes);
  fs::create_directories(dir);
  auto path = [&](const std::string& f) { return (fs::path(dir) / f).string(); };
  const auto opt = k.options();
  json body = {{"case", name}, {"out_dir", dir}};

  auto run = [&](const Mdp& base, const Dra& dra, const UtilityFn& r, const UtilityFn& c,
                 const std::string& tag) {
    auto pm = build_product(base, dra);
    auto rep = synth_general(pm, lift_utility(pm, base, r), lift_utility(pm, base, c), k.epsilon, opt);
    write_file(path("policy_" + tag + ".txt"),
               write_policy(pm.mdp, rep.policy,
                            {{"epsilon", format_double(k.epsilon)},
                             {"method", std::string(to_string(rep.method))},
                             {"value", format_double(rep.value)},
                             {"delta", format_double(rep.delta)}}));
    body["synthesis"][tag] = synthesis_json(pm.mdp, rep);
    return pm;
  };

  if (name == "case1") {
    auto p = parse_case1_params(params);
    auto model = gen_case1(p);
    write_file(path("model.txt"), write_mdp(model.mdp, &model.reward, &model.cost));
    write_file(path("phi1.hoa"), write_dra(model.phi1));
    write_file(path("phi2.hoa"), write_dra(model.phi2));
    body["states"] = model.mdp.num_states();
    if (synthesize) {
      run(model.mdp, model.phi1, model.reward, model.cost, "phi1");
      auto pm = run(model.mdp, model.phi2, model.reward, model.cost, "phi2");
      auto rows = delta_table(pm, lift_utility(pm, model.mdp, model.reward),
                              lift_utility(pm, model.mdp, model.cost), parse_list(epsilons), "c", opt);
      std::string csv = "epsilon,delta_es,delta_ex,limit_es,limit_ex,achieved_es,achieved_ex,value\n";
      json table = json::array();
      for (const auto& row : rows) {
        csv += csv_row({row.epsilon, row.delta_es, row.delta_ex, row.limit_es, row.limit_ex,
                        row.achieved_es, row.achieved_ex, row.value});
        table.push_back({{"epsilon", row.epsilon}, {"delta_es", row.delta_es},
                         {"delta_ex", row.delta_ex}, {"limit_es", row.limit_es},
                         {"limit_ex", row.limit_ex}, {"achieved_es", row.achieved_es},
                         {"achieved_ex", row.achieved_ex}, {"value", row.value}});
      }
      write_file(path("delta_table.csv"), csv);
      body["delta_table"] = table;
    }
  } else if (name == "case2") {
    auto p = parse_case2_params(params);
    auto model = gen_case2(p);
    write_file(path("model.txt"), write_mdp(model.mdp, &model.reward, &model.cost));
    write_file(path("phi.hoa"), write_dra(model.phi));
    body["states"] = model.mdp.num_states();
    if (synthesize) {
      run(model.mdp, model.phi, model.reward, model.cost, "phi");
      auto rows = case2_sweep(p, parse_list(bonuses), k.epsilon);
      std::string csv = "bonus,optimum,accepting_cycle,constrained\n";
      json table = json::array();
      for (const auto& row : rows) {
        csv += format_double(row.bonus) + "," + format_double(row.optimum) + "," +
               (row.accepting_cycle ? "1" : "0") + "," + format_double(row.constrained) + "\n";
        table.push_back({{"bonus", row.bonus}, {"optimum", row.optimum},
                         {"accepting_cycle", row.accepting_cycle}, {"constrained", row.constrained}});
      }
      write_file(path("sweep.csv"), csv);
      body["sweep"] = table;
    }
  } else {
    throw Error(ErrorKind::Param, "unknown case study '" + name + "'");
  }
  json report = wrap("casestudy", body, manifest("casestudy", hashes, {{"options", options_json(opt)}}));
  write_file(path("report.json"), report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  return 0;
}

std::string default_bonuses() {
  std::string s;
  for (int i = 0; i <= 100; ++i) s += (i ? "," : "") + std::to_string(i);
  return s;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Efficiency-optimal policy synthesis under Rabin tasks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Inputs in;
  Knobs knobs;
  std::string out, policy_out, csv, case_name, params, dir;
  std::string epsilons = "0.005,0.01,0.05,0.1", bonuses = default_bonuses();
  bool skip_synthesis = false;
  RolloutConfig cfg;

  auto* dec = app.add_subcommand("decompose", "MECs, MAECs, AMECs and the almost-sure region");
  add_model_flags(dec, in, true);
  dec->add_option("--out", out, "Write the JSON report here instead of stdout");

  auto* syn = app.add_subcommand("synthesize", "Synthesize an epsilon-optimal policy");
  add_model_flags(syn, in, true);
  add_knobs(syn, knobs);
  syn->get_option("--epsilon")->required();
  syn->add_option("--out", out, "Write the JSON report here instead of stdout");
  syn->add_option("--policy-out", policy_out, "Write the policy here");

  auto* ev = app.add_subcommand("evaluate", "Analyze a policy on the product");
  add_model_flags(ev, in, true);
  ev->add_option("--policy", in.policy, "Policy file")->required();
  ev->add_option("--out", out, "Write the JSON report here instead of stdout");

  auto* sim = app.add_subcommand("simulate", "Monte-Carlo rollouts of a policy");
  add_model_flags(sim, in, false);
  sim->add_option("--policy", in.policy, "Policy file (over the product when --dra is given)")
      ->required();
  sim->add_option("--steps", cfg.steps, "Steps per rollout")->check(CLI::PositiveNumber);
  sim->add_option("--rollouts", cfg.rollouts, "Number of rollouts")->check(CLI::PositiveNumber);
  sim->add_option("--seed", cfg.seed, "Random seed");
  sim->add_option("--out", out, "Write the JSON report here instead of stdout");
  sim->add_option("--csv", csv, "Write per-rollout ratios as CSV");

  auto* cs = app.add_subcommand("casestudy", "Generate and solve a grid-world study");
  cs->add_option("name", case_name, "case1 or case2")
      ->required()
      ->check(CLI::IsMember({"case1", "case2"}));
  cs->add_option("--params", params, "Parameter file");
  cs->add_option("--out", dir, "Output directory")->required();
  add_knobs(cs, knobs);
  cs->add_option("--epsilons", epsilons, "Comma-separated thresholds for the delta table (case1)");
  cs->add_option("--bonuses", bonuses, "Comma-separated bonus values for the sweep (case2)");
  cs->add_flag("--generate-only", skip_synthesis, "Write the model and automata only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*dec) return cmd_decompose(in, out);
    if (*syn) return cmd_synthesize(in, knobs, out, policy_out);
    if (*ev) return cmd_evaluate(in, out);
    if (*sim) return cmd_simulate(in, cfg, out, csv);
    if (*cs) return cmd_casestudy(case_name, params, dir, knobs, epsilons, bonuses, !skip_synthesis);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace ratiosynth
