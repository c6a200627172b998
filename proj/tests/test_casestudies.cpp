#include <gtest/gtest.h>

#include "ratiosynth/casestudies.hpp"
#include "support.hpp"

using namespace ratiosynth;
using namespace testkit;

namespace {

// Independent statement of the item-carrying law for one (s, a, s') triple.
double expected_probability(const Case1Params& p, Cell from, int carry, Cell to, int carry2,
                            bool adjacent) {
  if (!adjacent) return 0.0;
  const double pf = p.item_prob[static_cast<std::size_t>(to.row - 1)][static_cast<std::size_t>(to.col - 1)];
  bool at_dest = false;
  for (const auto& d : p.destinations) at_dest = at_dest || d.cell == from;
  const bool in_d = carry == 1 && at_dest;
  if (carry == 0) return carry2 == 1 ? pf : 1.0 - pf;
  if (!in_d) return carry2 == 1 ? 1.0 : 0.0;
  return carry2 == 1 ? pf : 1.0 - pf;
}

Cell parse_cell(const std::string& name, int* carry) {
  Cell c;
  std::sscanf(name.c_str(), "r%dc%d_%d", &c.row, &c.col, carry);
  return c;
}

Case1Params small_case1() {
  return parse_case1_params("grid 4 4\nstart 1 1\ncharging 3 1\nno_obstacles\n"
                            "destination 4 1 2\ndestination 1 4 1\nprob_field 0.8 1 0.3\n"
                            "cost_table 3.2 3.0 2.7 2.5\n");
}

}  // namespace

TEST(Case1, CostTableLookups) {
  auto p = Case1Params::defaults();
  const std::vector<double> table{3.2, 3.0, 2.7, 2.5, 1.5, 1.0, 1.0, 1.0, 1.0};
  std::vector<bool> seen(9, false);
  for (int r = 1; r <= 9; ++r)
    for (int c = 1; c <= 9; ++c) {
      const int d = manhattan_to_destinations(p, {r, c});
      ASSERT_LT(d, 9);
      EXPECT_EQ(case1_cost(p, {r, c}), table[static_cast<std::size_t>(d)]);
      seen[static_cast<std::size_t>(d)] = true;
    }
  EXPECT_EQ(std::count(seen.begin(), seen.end(), true), 9);
  EXPECT_EQ(case1_cost(p, {9, 3}), 2.7);
}

TEST(Case1, TransitionLawScan) {
  auto p = Case1Params::defaults();
  auto model = gen_case1(p);
  const auto& m = model.mdp;
  EXPECT_EQ(m.num_states(), 2u * (81u - p.obstacles.size()));
  EXPECT_EQ(m.state_names[m.initial], "r1c1_0");
  for (StateId s = 0; s < m.num_states(); ++s) {
    int carry = 0;
    Cell from = parse_cell(m.state_names[s], &carry);
    for (ActionId a = 0; a < 4; ++a) {
      auto k = m.choice_index(s, a);
      auto target = case1_move(p, from, m.action_names[a]);
      ASSERT_EQ(k.has_value(), target.has_value());
      if (!k) continue;
      EXPECT_EQ(model.cost.value[s][*k], case1_cost(p, from));
      std::vector<double> row(m.num_states(), 0.0);
      for (const auto& x : m.choices[s][*k].successors) row[x.target] += x.prob;
      for (StateId t = 0; t < m.num_states(); ++t) {
        int carry2 = 0;
        Cell to = parse_cell(m.state_names[t], &carry2);
        EXPECT_DOUBLE_EQ(row[t], expected_probability(p, from, carry, to, carry2, to == *target));
      }
    }
  }
}

TEST(Case1, CarryingAwayFromDestinationKeepsItem) {
  auto p = Case1Params::defaults();
  auto model = gen_case1(p);
  const auto& m = model.mdp;
  auto s = std::find(m.state_names.begin(), m.state_names.end(), "r5c5_1") - m.state_names.begin();
  for (const auto& c : m.choices[static_cast<std::size_t>(s)]) {
    ASSERT_EQ(c.successors.size(), 1u);
    EXPECT_EQ(c.successors[0].prob, 1.0);
    EXPECT_EQ(m.state_names[c.successors[0].target].back(), '1');
  }
}

TEST(Case1, RewardsAtDestinationsWithItem) {
  auto p = Case1Params::defaults();
  auto model = gen_case1(p);
  const auto& m = model.mdp;
  for (StateId s = 0; s < m.num_states(); ++s) {
    double expect = 0.0;
    if (m.state_names[s] == "r9c1_1") expect = 2.0;
    if (m.state_names[s] == "r1c9_1") expect = 1.0;
    for (double v : model.reward.value[s]) EXPECT_EQ(v, expect);
  }
}

TEST(Case1, AutomataMatchTheirFormulas) {
  auto model = gen_case1(Case1Params::defaults());
  // Symbols over (d, b) for phi1 and (d, b, c) for phi2.
  for (unsigned pre = 0; pre < 64; ++pre)
    for (unsigned cyc = 0; cyc < 512; ++cyc) {
      const std::size_t pre_len = pre % 3, cyc_len = 1 + cyc % 3;
      std::vector<LabelSet> prefix, cycle;
      for (std::size_t i = 0; i < pre_len; ++i) prefix.push_back((pre >> (3 * i)) & 7U);
      for (std::size_t i = 0; i < cyc_len; ++i) cycle.push_back((cyc >> (3 * i)) & 7U);
      bool b = false, d = false, c = false;
      for (auto x : prefix) b = b || (x & 2U);
      for (auto x : cycle) {
        b = b || (x & 2U);
        d = d || (x & 1U);
        c = c || (x & 4U);
      }
      EXPECT_EQ(dra_accepts_lasso(model.phi2, prefix, cycle), d && c && !b);
      auto drop_c = [](std::vector<LabelSet> w) {
        for (auto& x : w) x &= 3U;
        return w;
      };
      EXPECT_EQ(dra_accepts_lasso(model.phi1, drop_c(prefix), drop_c(cycle)), d && !b);
    }
  EXPECT_EQ(model.phi1.num_states, 3u);
  EXPECT_EQ(model.phi2.num_states, 5u);
}

TEST(Case1, ZeroFieldNeverFindsItems) {
  auto p = Case1Params::defaults();
  for (auto& row : p.item_prob) std::fill(row.begin(), row.end(), 0.0);
  auto model = gen_case1(p);
  std::vector<char> carrying(model.mdp.num_states(), 0);
  for (StateId s = 0; s < model.mdp.num_states(); ++s) carrying[s] = model.mdp.state_names[s].back() == '1';
  auto v = max_reach_probability(model.mdp, carrying, 200);
  EXPECT_EQ(v[model.mdp.initial], 0.0);
  auto pm = build_product(model.mdp, model.phi1);
  EXPECT_TRUE(almost_sure_region(pm).empty());
  EXPECT_EQ(policy_efficiency(model.mdp, StationaryPolicy::uniform(model.mdp), model.reward, model.cost), 0.0);
}

TEST(Case1, CustomFieldRegeneratesDeterministically) {
  const char* text = "prob_field 0.5 2\nprob 5 5 0.25\n";
  auto a = parse_case1_params(text), b = parse_case1_params(text);
  EXPECT_EQ(a.item_prob, b.item_prob);
  EXPECT_EQ(a.item_prob[4][4], 0.25);
  EXPECT_NE(a.item_prob, Case1Params::defaults().item_prob);
  auto ma = gen_case1(a), mb = gen_case1(b);
  EXPECT_EQ(ma.mdp.state_names, mb.mdp.state_names);
  EXPECT_EQ(ma.reward.value, mb.reward.value);
}

TEST(Case1, BadParamsAreRejected) {
  for (const char* text : {"grid 0 3\n", "prob 1 1 1.5\n", "cost_table 1 2\n", "start 2 2\n",
                           "colour red\n", "charging 10 1\n", "cost_table 1 0 1 1 1 1 1 1 1\n"}) {
    try {
      parse_case1_params(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Param) << text;
    }
  }
}

TEST(Case1, SmallGridTasksHold) {
  auto p = small_case1();
  auto model = gen_case1(p);
  for (const Dra* phi : {&model.phi1, &model.phi2}) {
    auto pm = build_product(model.mdp, *phi);
    auto r = lift_utility(pm, model.mdp, model.reward), c = lift_utility(pm, model.mdp, model.cost);
    auto rep = synth_general(pm, r, c, 0.01);
    EXPECT_TRUE(rep.accepted_wp1);
    EXPECT_GE(rep.achieved, rep.value - 0.01 - 1e-8);
    EXPECT_GT(label_limit_probability(pm.mdp, rep.policy, "d"), 0.0);
    if (phi == &model.phi2) EXPECT_GT(label_limit_probability(pm.mdp, rep.policy, "c"), 0.0);
  }
}

TEST(Case1, DeltaTableOnSmallGrid) {
  auto model = gen_case1(small_case1());
  auto pm = build_product(model.mdp, model.phi2);
  auto r = lift_utility(pm, model.mdp, model.reward), c = lift_utility(pm, model.mdp, model.cost);
  auto rows = delta_table(pm, r, c, {0.01, 0.02}, "c");
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& row : rows) {
    EXPECT_GE(row.delta_ex, row.delta_es);
    EXPECT_GE(row.achieved_es, row.value - row.epsilon - 1e-8);
    EXPECT_GE(row.achieved_ex, row.value - row.epsilon - 1e-8);
    EXPECT_GT(row.limit_es, 0.0);
  }
  if (rows[1].delta_es < 1.0 - 1e-9 && rows[0].delta_es > 0.0)
    EXPECT_NEAR(rows[1].delta_es / rows[0].delta_es, 2.0, 1e-9);
}

TEST(Case2, GeneratedModelIsDeterministic) {
  auto p = Case2Params::defaults();
  auto model = gen_case2(p);
  EXPECT_EQ(model.mdp.num_states(), 2u * 48u);
  for (const auto& cs : model.mdp.choices)
    for (const auto& c : cs) {
      ASSERT_EQ(c.successors.size(), 1u);
      EXPECT_EQ(c.successors[0].prob, 1.0);
    }
  EXPECT_EQ(model.phi.num_states, 3u);
}

TEST(Case2, ZeroBonusKeepsBaselineRewards) {
  auto p = Case2Params::defaults();
  auto model = gen_case2(p);
  const auto& m = model.mdp;
  for (StateId s = 0; s < m.num_states(); ++s)
    for (std::size_t k = 0; k < m.choices[s].size(); ++k) {
      int perm = 0;
      Cell to = parse_cell(m.state_names[m.choices[s][k].successors[0].target], &perm);
      EXPECT_EQ(model.reward.value[s][k], p.reward[static_cast<std::size_t>(to.row - 1)][static_cast<std::size_t>(to.col - 1)]);
    }
}

TEST(Case2, TaskAutomaton) {
  auto model = gen_case2(Case2Params::defaults());
  for (unsigned pre = 0; pre < 16; ++pre)
    for (unsigned cyc = 0; cyc < 256; ++cyc) {
      const std::size_t pre_len = pre % 3, cyc_len = 1 + cyc % 4;
      std::vector<LabelSet> prefix, cycle;
      for (std::size_t i = 0; i < pre_len; ++i) prefix.push_back((pre >> (2 * i)) & 3U);
      for (std::size_t i = 0; i < cyc_len; ++i) cycle.push_back((cyc >> (2 * i)) & 3U);
      bool g = false, r = false;
      for (auto x : cycle) {
        g = g || (x & 1U);
        r = r || (x & 2U);
      }
      EXPECT_EQ(dra_accepts_lasso(model.phi, prefix, cycle), g && r);
    }
}

TEST(Case2, BonusSwitchesTheOptimalCycle) {
  auto rows = case2_sweep(Case2Params::defaults(), {0.0, 100.0});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].accepting_cycle);
  EXPECT_TRUE(rows[1].accepting_cycle);
  EXPECT_LT(rows[0].constrained, rows[0].optimum);
  EXPECT_NEAR(rows[1].constrained, rows[1].optimum, 1e-9);
}

TEST(Case2, BadParamsAreRejected) {
  for (const char* text : {"size 6\n", "cost 1 1 0\n", "command 4 4\n", "bonus x\n", "speed 3\n"}) {
    try {
      parse_case2_params(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Param) << text;
    }
  }
}
