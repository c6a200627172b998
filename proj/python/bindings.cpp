#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ratiosynth/casestudies.hpp"
#include "ratiosynth/parsers.hpp"
#include "ratiosynth/report.hpp"

namespace py = pybind11;
using namespace ratiosynth;

namespace {

struct Loaded {
  Mdp base;
  ProductMdp product;
  UtilityFn reward;
  UtilityFn cost;
};

Loaded load(const std::string& model, const std::string& dra) {
  auto parsed = parse_mdp(model);
  if (!parsed.reward || !parsed.cost) throw Error(ErrorKind::Validation, "reward and cost tables are required");
  Loaded out;
  out.base = std::move(parsed.mdp);
  out.product = build_product(out.base, parse_dra(dra));
  out.reward = lift_utility(out.product, out.base, *parsed.reward);
  out.cost = lift_utility(out.product, out.base, *parsed.cost);
  return out;
}

py::object to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ratio-objective policy synthesis under Rabin tasks";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error;
  error.call_once_and_store_result([&]() { return py::exception<Error>(m, "RatioSynthError"); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error.get_stored(), py::make_tuple(std::string(to_string(e.kind())), e.what()));
    }
  });

  m.def(
      "decompose",
      [](const std::string& model, const std::string& dra) {
        auto pm = build_product(parse_mdp(model).mdp, parse_dra(dra));
        return to_py(decomposition_json(pm));
      },
      py::arg("model"), py::arg("dra"));

  m.def(
      "synthesize",
      [](const std::string& model, const std::string& dra, double epsilon, const std::string& method) {
        auto L = load(model, dra);
        SynthesisOptions opt;
        if (method == "ex") opt.method = DeltaMethod::Exact;
        else if (method != "es") throw Error(ErrorKind::Param, "method must be es or ex");
        auto rep = synth_general(L.product, L.reward, L.cost, epsilon, opt);
        return py::make_tuple(to_py(synthesis_json(L.product.mdp, rep)),
                              write_policy(L.product.mdp, rep.policy, {{"epsilon", format_double(epsilon)}}));
      },
      py::arg("model"), py::arg("dra"), py::arg("epsilon"), py::arg("method") = "es",
      "Returns (report, policy text) for the product of model and automaton.");

  m.def(
      "evaluate",
      [](const std::string& model, const std::string& dra, const std::string& policy) {
        auto L = load(model, dra);
        auto p = parse_policy(policy, L.product.mdp);
        return to_py(evaluation_json(L.product, p, L.reward, L.cost));
      },
      py::arg("model"), py::arg("dra"), py::arg("policy"));

  m.def(
      "simulate",
      [](const std::string& model, const std::string& dra, const std::string& policy, std::uint64_t steps,
         std::uint64_t rollouts, std::uint64_t seed) {
        auto L = load(model, dra);
        auto p = parse_policy(policy, L.product.mdp);
        RolloutConfig cfg{steps, rollouts, seed};
        return to_py(rollout_json(L.product.mdp, simulate(L.product.mdp, p, L.reward, L.cost, cfg), cfg));
      },
      py::arg("model"), py::arg("dra"), py::arg("policy"), py::arg("steps") = 100000,
      py::arg("rollouts") = 8, py::arg("seed") = 1);

  m.def(
      "generate_case1",
      [](const std::string& params) {
        auto model = gen_case1(parse_case1_params(params));
        py::dict out;
        out["model"] = write_mdp(model.mdp, &model.reward, &model.cost);
        out["phi1"] = write_dra(model.phi1);
        out["phi2"] = write_dra(model.phi2);
        return out;
      },
      py::arg("params") = "");

  m.def(
      "generate_case2",
      [](const std::string& params) {
        auto model = gen_case2(parse_case2_params(params));
        py::dict out;
        out["model"] = write_mdp(model.mdp, &model.reward, &model.cost);
        out["phi"] = write_dra(model.phi);
        return out;
      },
      py::arg("params") = "");

  m.def(
      "case2_sweep",
      [](const std::string& params, const std::vector<double>& bonuses, double epsilon) {
        py::list rows;
        for (const auto& r : case2_sweep(parse_case2_params(params), bonuses, epsilon)) {
          py::dict d;
          d["bonus"] = r.bonus;
          d["optimum"] = r.optimum;
          d["accepting_cycle"] = r.accepting_cycle;
          d["constrained"] = r.constrained;
          rows.append(d);
        }
        return rows;
      },
      py::arg("params"), py::arg("bonuses"), py::arg("epsilon") = 1e-3);
}
