#include <gtest/gtest.h>

#include "ratiosynth/parsers.hpp"
#include "support.hpp"

using namespace ratiosynth;
using namespace testkit;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::Param;
}

const char* kInfG = R"(HOA: v1
States: 2
Start: 0
AP: 1 "g"
Acceptance: 2 Fin(0) & Inf(1)
--BODY--
State: 0
[!0] 0
[0] 1
State: 1 {1}
[!0] 0
[0] 1
--END--
)";

}  // namespace

TEST(Parsers, Example1Model) {
  auto pm = parse_mdp(read_file(RATIOSYNTH_DATA_DIR "/example1.model"));
  EXPECT_EQ(pm.mdp.num_states(), 4u);
  EXPECT_EQ(pm.mdp.action_names, (std::vector<std::string>{"a1", "a2"}));
  EXPECT_EQ(pm.mdp.state_names, (std::vector<std::string>{"1", "2", "3", "4"}));
  ASSERT_TRUE(pm.reward && pm.cost);
  EXPECT_EQ(pm.reward->value[3][1], 1.0);
}

TEST(Parsers, EmptyModelIsParseError) {
  EXPECT_EQ(kind_of([] { parse_mdp(""); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([] { parse_mdp("# only a comment\n"); }), ErrorKind::Parse);
}

TEST(Parsers, ProbabilityAboveOneIsValidationError) {
  const char* text = "states x\ninitial x\nactions a\ntrans x a x 1.1\n";
  EXPECT_EQ(kind_of([&] { parse_mdp(text); }), ErrorKind::Validation);
}

TEST(Parsers, DuplicateTransitionIsRejected) {
  const char* text = "states x y\ninitial x\nactions a\ntrans x a y 0.5\ntrans x a y 0.5\ntrans y a y 1\n";
  EXPECT_EQ(kind_of([&] { parse_mdp(text); }), ErrorKind::Parse);
}

TEST(Parsers, ParseErrorCarriesPosition) {
  try {
    parse_mdp("states x\ninitial x\nactions a\ntrans x a x one\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_GT(e.column(), 1u);
  }
}

TEST(Parsers, MissingCostEntryIsAnError) {
  const char* text = "states x y\ninitial x\nactions a\ntrans x a y 1\ntrans y a x 1\ncost x a 1\n";
  EXPECT_EQ(kind_of([&] { parse_mdp(text); }), ErrorKind::Validation);
}

TEST(Parsers, AcceptAllAutomaton) {
  auto d = parse_dra("HOA: v1\nStates: 1\nStart: 0\nAP: 0\nAcceptance: 2 Fin(0) & Inf(1)\n"
                     "--BODY--\nState: 0 {1}\n[t] 0\n--END--\n");
  EXPECT_TRUE(validate_dra(d).empty());
  ASSERT_EQ(d.pairs.size(), 1u);
  EXPECT_TRUE(d.pairs[0].fin.empty());
  EXPECT_EQ(d.pairs[0].inf, std::vector<AutStateId>{0});
}

TEST(Parsers, InfinitelyOftenG) {
  auto d = parse_dra(kInfG);
  ASSERT_EQ(d.pairs.size(), 1u);
  EXPECT_EQ(d.pairs[0].inf, std::vector<AutStateId>{1});
  // Brute force over short lassos: accepted iff the cycle contains g.
  for (unsigned pre = 0; pre < 8; ++pre)
    for (unsigned cyc = 1; cyc < 16; ++cyc) {
      std::vector<LabelSet> prefix, cycle;
      for (unsigned i = 0; i < 3; ++i) prefix.push_back((pre >> i) & 1U);
      bool has_g = false;
      for (unsigned i = 0; i < 4 && (cyc >> i); ++i) {
        cycle.push_back((cyc >> i) & 1U);
        has_g = has_g || ((cyc >> i) & 1U);
      }
      EXPECT_EQ(dra_accepts_lasso(d, prefix, cycle), has_g);
    }
}

TEST(Parsers, OverlappingGuardsAreNondeterministic) {
  const char* text = "HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"g\"\nAcceptance: 2 Fin(0) & Inf(1)\n"
                     "--BODY--\nState: 0 {1}\n[0] 0\n[t] 0\n--END--\n";
  EXPECT_EQ(kind_of([&] { parse_dra(text); }), ErrorKind::Nondeterminism);
}

TEST(Parsers, MissingGuardIsIncomplete) {
  const char* text = "HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"g\"\nAcceptance: 2 Fin(0) & Inf(1)\n"
                     "--BODY--\nState: 0 {1}\n[0] 0\n--END--\n";
  EXPECT_EQ(kind_of([&] { parse_dra(text); }), ErrorKind::Incompleteness);
}

TEST(Parsers, NonRabinAcceptanceIsRejected) {
  const char* text = "HOA: v1\nStates: 1\nStart: 0\nAP: 0\nAcceptance: 1 Fin(0)\n"
                     "--BODY--\nState: 0 {0}\n[t] 0\n--END--\n";
  EXPECT_EQ(kind_of([&] { parse_dra(text); }), ErrorKind::Parse);
}

TEST(Parsers, ModelRoundTrip) {
  Rng rng(3);
  for (int it = 0; it < 30; ++it) {
    auto m = random_general_mdp(rng, 7, 3);
    m.prop_names = {"p", "q"};
    for (auto& l : m.labels) l = static_cast<LabelSet>(pick(rng, 0, 3));
    auto r = random_reward(rng, m), c = random_cost(rng, m);
    auto text = write_mdp(m, &r, &c);
    auto back = parse_mdp(text);
    EXPECT_EQ(write_mdp(back.mdp, &*back.reward, &*back.cost), text);
    EXPECT_EQ(back.mdp.labels, m.labels);
    for (StateId s = 0; s < m.num_states(); ++s) {
      ASSERT_EQ(back.mdp.choices[s].size(), m.choices[s].size());
      for (std::size_t k = 0; k < m.choices[s].size(); ++k) {
        EXPECT_EQ(back.reward->value[s][k], r.value[s][k]);
        EXPECT_EQ(back.cost->value[s][k], c.value[s][k]);
        const auto& a = m.choices[s][k].successors;
        const auto& b = back.mdp.choices[s][k].successors;
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t j = 0; j < a.size(); ++j) {
          EXPECT_EQ(a[j].target, b[j].target);
          EXPECT_EQ(a[j].prob, b[j].prob);
        }
      }
    }
  }
}

TEST(Parsers, AutomatonRoundTrip) {
  auto d = parse_dra(read_file(RATIOSYNTH_DATA_DIR "/example1.hoa"));
  auto back = parse_dra(write_dra(d));
  EXPECT_EQ(back.num_states, d.num_states);
  EXPECT_EQ(back.initial, d.initial);
  EXPECT_EQ(back.ap, d.ap);
  EXPECT_EQ(back.delta, d.delta);
  ASSERT_EQ(back.pairs.size(), d.pairs.size());
  EXPECT_EQ(back.pairs[0].fin, d.pairs[0].fin);
  EXPECT_EQ(back.pairs[0].inf, d.pairs[0].inf);
  EXPECT_EQ(write_dra(back), write_dra(d));
}

TEST(Parsers, UniformPolicyBytesAreStable) {
  Mdp m = empty_mdp(2, 2);
  m.choices[0] = {{0, {{1, 1.0}}}, {1, {{0, 1.0}}}};
  m.choices[1] = {{0, {{0, 1.0}}}, {1, {{1, 1.0}}}};
  auto p = StationaryPolicy::uniform(m);
  auto a = write_policy(m, p, {{"epsilon", "0.01"}});
  EXPECT_EQ(a, write_policy(m, p, {{"epsilon", "0.01"}}));
  EXPECT_EQ(a, "meta epsilon 0.01\npolicy s0 a0 0.5\npolicy s0 a1 0.5\npolicy s1 a0 0.5\npolicy s1 a1 0.5\n");
}

TEST(Parsers, MixedPolicyRoundTrip) {
  Rng rng(5);
  for (int it = 0; it < 30; ++it) {
    auto m = random_general_mdp(rng, 6, 3);
    auto p = random_policy(rng, m);
    std::map<std::string, std::string> meta;
    auto back = parse_policy(write_policy(m, p, {{"method", "es"}}), m, &meta);
    EXPECT_EQ(meta.at("method"), "es");
    for (StateId s = 0; s < m.num_states(); ++s)
      for (std::size_t k = 0; k < p.rule[s].size(); ++k) EXPECT_NEAR(back.rule[s][k], p.rule[s][k], 1e-12);
  }
}

TEST(Parsers, PolicyMassOnUnavailableActionIsRefused) {
  auto pm = parse_mdp(read_file(RATIOSYNTH_DATA_DIR "/example1.model"));
  EXPECT_EQ(kind_of([&] { parse_policy("policy 2 a2 1\n", pm.mdp); }), ErrorKind::PolicyMismatch);
  auto p = StationaryPolicy::uniform(pm.mdp);
  p.rule[1] = {0.5, 0.5};
  EXPECT_EQ(kind_of([&] { write_policy(pm.mdp, p); }), ErrorKind::PolicyMismatch);
}

TEST(Parsers, SeparateUtilityTable) {
  auto pm = parse_mdp(read_file(RATIOSYNTH_DATA_DIR "/example1.model"));
  auto t = parse_utilities("reward * * 2\ncost * a1 1\ncost * a2 3\n", pm.mdp);
  ASSERT_TRUE(t.reward && t.cost);
  EXPECT_EQ(t.reward->value[0][1], 2.0);
  EXPECT_EQ(t.cost->value[3][1], 3.0);
  EXPECT_EQ(kind_of([&] { parse_utilities("cost * a1 1\n", pm.mdp); }), ErrorKind::Validation);
}

TEST(Parsers, FormatDoubleIsExact) {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    double x = uniform(rng, -1e3, 1e3);
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
}
