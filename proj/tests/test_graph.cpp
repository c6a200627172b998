#include <gtest/gtest.h>

#include "ratiosynth/parsers.hpp"
#include "support.hpp"

using namespace ratiosynth;
using namespace testkit;

namespace {

Mdp example1() { return parse_mdp(read_file(RATIOSYNTH_DATA_DIR "/example1.model")).mdp; }

ProductMdp example1_pairs() { return product_from_pairs(example1(), {{{2}, {3}}}); }

ProductMdp random_product(Rng& rng, std::size_t n, std::size_t pairs) {
  auto m = random_general_mdp(rng, n, 3);
  std::vector<std::pair<std::vector<StateId>, std::vector<StateId>>> acc;
  for (std::size_t i = 0; i < pairs; ++i) {
    std::vector<StateId> bad, good;
    for (StateId s = 0; s < n; ++s) {
      const double u = uniform(rng, 0, 1);
      if (u < 0.2) bad.push_back(s);
      else if (u < 0.5) good.push_back(s);
    }
    acc.push_back({bad, good});
  }
  return product_from_pairs(std::move(m), acc);
}

}  // namespace

TEST(Graph, Example1Mecs) {
  auto mecs = to_brute(mec_decompose(example1()));
  std::vector<BruteEc> expect{{{1}, {{0}}}, {{2, 3}, {{0}, {0, 1}}}};
  EXPECT_EQ(mecs, expect);
}

TEST(Graph, Example1MaecAndAmec) {
  auto pm = example1_pairs();
  EXPECT_EQ(to_brute(maec_decompose(pm)), (std::vector<BruteEc>{{{3}, {{1}}}}));
  EXPECT_EQ(to_brute(amec_filter(pm)), (std::vector<BruteEc>{{{2, 3}, {{0}, {0, 1}}}}));
}

TEST(Graph, StronglyConnectedSingleActionModel) {
  Mdp m = empty_mdp(4, 1);
  for (StateId s = 0; s < 4; ++s) m.choices[s].push_back({0, {{(s + 1) % 4, 1.0}}});
  auto mecs = mec_decompose(m);
  ASSERT_EQ(mecs.size(), 1u);
  EXPECT_EQ(mecs[0].states.size(), 4u);
  EXPECT_TRUE(verify_end_component(m, mecs[0]));
}

TEST(Graph, MecsMatchBruteForce) {
  Rng rng(21);
  for (int it = 0; it < 150; ++it) {
    auto m = random_general_mdp(rng, pick(rng, 1, 8), 3);
    auto got = mec_decompose(m);
    EXPECT_EQ(to_brute(got), brute_mecs(m));
    std::vector<int> owner(m.num_states(), -1);
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_TRUE(verify_end_component(m, got[i]));
      EXPECT_TRUE(is_closed(m, got[i]));
      for (auto s : got[i].states) {
        EXPECT_EQ(owner[s], -1);
        owner[s] = static_cast<int>(i);
      }
    }
    // Every end component sits inside exactly one returned MEC.
    for (const auto& ec : all_state_ecs(m)) {
      int hits = 0;
      for (const auto& mec : got) hits += contains(to_brute(mec), ec);
      EXPECT_EQ(hits, 1);
    }
  }
}

TEST(Graph, MaecsMatchBruteForce) {
  Rng rng(22);
  for (int it = 0; it < 150; ++it) {
    auto pm = random_product(rng, pick(rng, 1, 8), pick(rng, 1, 2));
    EXPECT_EQ(to_brute(maec_decompose(pm)), brute_maecs(pm));
    auto amecs = amec_filter(pm);
    auto maecs = maec_decompose(pm);
    for (const auto& a : amecs) {
      bool any = false;
      for (const auto& x : maecs) any = any || sub_contains(a, x);
      EXPECT_TRUE(any);
    }
    // AMECs are exactly the MECs holding some MAEC.
    std::vector<BruteEc> expect;
    for (const auto& mec : brute_mecs(pm.mdp))
      for (const auto& x : brute_maecs(pm))
        if (contains(mec, x)) {
          expect.push_back(mec);
          break;
        }
    std::sort(expect.begin(), expect.end());
    EXPECT_EQ(to_brute(amecs), expect);
  }
}

TEST(Graph, NoGoodStatesMeansNoMaec) {
  auto pm = product_from_pairs(example1(), {{{}, {}}});
  EXPECT_TRUE(maec_decompose(pm).empty());
  EXPECT_TRUE(amec_filter(pm).empty());
  EXPECT_TRUE(almost_sure_region(pm).empty());
}

TEST(Graph, WholeMecAccepting) {
  auto pm = product_from_pairs(example1(), {{{}, {2}}});
  auto amecs = amec_filter(pm);
  ASSERT_EQ(amecs.size(), 1u);
  EXPECT_EQ(to_brute(amecs[0]), to_brute(maec_decompose(pm)[0]));
}

TEST(Graph, AlmostSureRegionOfExample1) {
  auto region = almost_sure_region(example1_pairs());
  EXPECT_EQ(region, (std::vector<StateId>{0, 2, 3}));
}

TEST(Graph, AlmostSureRegionMatchesValueIteration) {
  Rng rng(23);
  for (int it = 0; it < 150; ++it) {
    auto pm = random_product(rng, pick(rng, 2, 8), 1);
    std::vector<char> target(pm.num_states(), 0);
    for (const auto& a : amec_filter(pm))
      for (auto s : a.states) target[s] = 1;
    auto v = max_reach_probability(pm.mdp, target);
    auto region = almost_sure_region(pm);
    for (StateId s = 0; s < pm.num_states(); ++s) {
      const bool in = std::binary_search(region.begin(), region.end(), s);
      EXPECT_EQ(in, v[s] > 1.0 - 1e-6) << "state " << s << " value " << v[s];
    }
  }
}

TEST(Graph, AttractorOnFullTargetKeepsPolicy) {
  auto m = example1();
  auto p = StationaryPolicy::uniform(m);
  auto q = attractor_policy(m, {0, 1, 2, 3}, p);
  EXPECT_EQ(q.rule, p.rule);
}

TEST(Graph, AttractorOnLine) {
  Mdp m = empty_mdp(3, 2);
  for (StateId s = 0; s < 3; ++s) {
    m.choices[s].push_back({0, {{s == 0 ? 0 : s - 1, 1.0}}});
    m.choices[s].push_back({1, {{s == 2 ? 2 : s + 1, 1.0}}});
  }
  auto p = StationaryPolicy::uniform(m);
  auto q = attractor_policy(m, {2}, p);
  EXPECT_EQ(q.rule[0], (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(q.rule[1], (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(q.rule[2], p.rule[2]);
}

TEST(Graph, AttractorStallsOnExample1) {
  auto m = example1();
  std::vector<char> target{0, 0, 1, 1};
  auto reach = can_reach(m, target);
  EXPECT_FALSE(reach[1]);
  try {
    attractor_policy(m, {2, 3}, StationaryPolicy::uniform(m));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unreachable);
  }
  // Without state 2 in the way, state 1 takes a2.
  Mdp cut = m;
  cut.choices[0].erase(cut.choices[0].begin());
  cut.choices[1] = {{0, {{2, 1.0}}}};
  auto q = attractor_policy(cut, {2, 3}, StationaryPolicy::uniform(cut));
  EXPECT_EQ(cut.action_names[cut.choices[0][0].action], "a2");
  EXPECT_EQ(q.rule[0], std::vector<double>{1.0});
}

TEST(Graph, AttractorLeavesOutsideStatesTransient) {
  Rng rng(24);
  int checked = 0;
  for (int it = 0; it < 200 && checked < 60; ++it) {
    auto m = random_general_mdp(rng, pick(rng, 2, 8), 3);
    auto mecs = mec_decompose(m);
    if (mecs.empty()) continue;
    const auto& target = mecs.front();
    std::vector<char> in(m.num_states(), 0);
    for (auto s : target.states) in[s] = 1;
    auto reach = can_reach(m, in);
    if (std::find(reach.begin(), reach.end(), 0) != reach.end()) continue;
    ++checked;
    auto p = StationaryPolicy::uniform(m);
    for (std::size_t i = 0; i < target.states.size(); ++i) {
      auto& row = p.rule[target.states[i]];
      std::fill(row.begin(), row.end(), 0.0);
      for (auto k : target.actions[i]) row[k] = 1.0 / static_cast<double>(target.actions[i].size());
    }
    auto q = attractor_policy(m, target.states, p);
    auto ca = analyze(induce_chain(m, q));
    for (StateId s = 0; s < m.num_states(); ++s) {
      if (!in[s]) EXPECT_EQ(ca.class_of[s], -1);
      EXPECT_NEAR(ca.absorb.row(static_cast<Eigen::Index>(s)).sum(), 1.0, 1e-9);
    }
  }
  EXPECT_GE(checked, 20);
}
