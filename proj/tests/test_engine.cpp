#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"

using namespace chrc;
using namespace testing_chrc;

TEST(Initial, Shape) {
  auto c = initial_configuration(goal("c(X,Y)"));
  EXPECT_EQ(c.goal.size(), 1u);
  EXPECT_TRUE(c.store.empty());
  EXPECT_EQ(c.builtin.text(), "true");
  EXPECT_TRUE(c.history.empty());
  EXPECT_EQ(c.next_id, 1);
}

TEST(Initial, EmptyGoalIsFinal) {
  auto p = prog("a <=> true.");
  EXPECT_TRUE(is_final(p, initial_configuration({}), Semantics::abstract));
}

TEST(Initial, EquationGivesOneSolve) {
  auto s = successors(Program{}, initial_configuration(goal("X=0")), Semantics::abstract);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].label.kind, StepKind::solve);
}

TEST(Successors, PaperRule1) {
  auto p = prog("r1 @ c(X,Y) <=> c(X,Y), c(X,Y).");
  auto s = successors(p, config({{"c(X,Y)", 1}}), Semantics::abstract);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].label.rule, "r1");
  EXPECT_TRUE(s[0].after.store.empty());
  ASSERT_EQ(s[0].after.goal.size(), 2u);
  EXPECT_EQ(to_string(s[0].after.goal[0]), "c(X,Y)");
  EXPECT_EQ(to_string(s[0].after.goal[1]), "c(X,Y)");
}

TEST(Successors, FailedHasNone) {
  auto p = prog("a <=> true.");
  auto c = config({{"a", 1}}, {eq("X", "0"), eq("X", "1")});
  EXPECT_TRUE(successors(p, c, Semantics::abstract).empty());
  EXPECT_TRUE(is_final(p, c, Semantics::abstract));
}

TEST(Successors, PropagationHistory) {
  auto p = prog("r @ a ==> a.");
  auto c = config({{"a", 1}});
  auto o = apply_successors(p, c, Semantics::abstract);
  ASSERT_EQ(o.size(), 1u);
  auto again = apply_successors(p, o[0].after, Semantics::abstract);
  EXPECT_EQ(again.size(), 1u);
  EXPECT_EQ(to_string(o[0].after.goal.at(0)), "a");

  auto t = apply_successors(p, c, Semantics::theoretical);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_TRUE(apply_successors(p, t[0].after, Semantics::theoretical).empty());
  EXPECT_EQ(t[0].after.history.size(), 1u);
}

TEST(Successors, MatchingModuloBuiltins) {
  auto p = prog("r4 @ c(0,0) <=> true.");
  EXPECT_TRUE(apply_successors(p, config({{"c(X,Y)", 1}}, {eq("X", "0")}), Semantics::abstract).empty());
  auto s = apply_successors(p, config({{"c(X,Y)", 1}}, {eq("X", "0"), eq("Y", "0")}), Semantics::abstract);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_TRUE(s[0].after.store.empty());
}

TEST(Successors, RepeatedHeadVariable) {
  auto p = prog("d @ p(X,X) <=> true.");
  EXPECT_TRUE(apply_successors(p, config({{"p(A,B)", 1}}), Semantics::abstract).empty());
  EXPECT_EQ(apply_successors(p, config({{"p(A,B)", 1}}, {eq("A", "B")}), Semantics::abstract).size(), 1u);
}

TEST(Successors, GuardWithExistential) {
  auto p = prog("g @ p(X) <=> X = Z | q.");
  EXPECT_EQ(apply_successors(p, config({{"p(A)", 1}}), Semantics::abstract).size(), 1u);
  auto p2 = prog("g @ p(X) <=> X = k | q.");
  EXPECT_TRUE(apply_successors(p2, config({{"p(A)", 1}}), Semantics::abstract).empty());
  EXPECT_EQ(apply_successors(p2, config({{"p(A)", 1}}, {eq("A", "k")}), Semantics::abstract).size(), 1u);
}

TEST(Successors, FreshBodyVariables) {
  auto p = prog("f @ p(X) <=> q(X,Y).");
  auto s = apply_successors(p, config({{"p(A)", 1}}), Semantics::abstract);
  ASSERT_EQ(s.size(), 1u);
  ASSERT_EQ(s[0].label.introduced.size(), 1u);
  EXPECT_EQ(s[0].label.introduced[0].second, "_V2_1");
  EXPECT_EQ(to_string(s[0].after.goal.at(0)), "q(A,_V2_1)");
}

TEST(Successors, MultiHeadOrder) {
  auto p = prog("m @ a(X) \\ b(X) <=> true.");
  auto c = config({{"a(k)", 1}, {"b(k)", 2}, {"b(k)", 3}});
  auto s = apply_successors(p, c, Semantics::abstract);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].label.removed_ids, std::vector<int>{2});
  EXPECT_EQ(s[1].label.removed_ids, std::vector<int>{3});
  EXPECT_EQ(s[0].label.kept_ids, std::vector<int>{1});
}

TEST(Normalize, SolveThenIntroduce) {
  Configuration c = initial_configuration(goal("X=0, c(X)"));
  auto n = normalize(c);
  EXPECT_TRUE(n.goal.empty());
  ASSERT_EQ(n.store.size(), 1u);
  EXPECT_EQ(to_string(n.store[0]), "c(X)#1");
  EXPECT_EQ(n.builtin.text(), "X=0");
}

TEST(Normalize, FixpointAndFailure) {
  auto c = config({{"a", 1}});
  EXPECT_EQ(normalize(c), c);
  EXPECT_TRUE(normalize(initial_configuration(goal("X=0, X=1"))).failed());
}

TEST(Final, Cases) {
  EXPECT_TRUE(is_final(prog("b <=> true."), config({{"a", 1}}), Semantics::abstract));
  EXPECT_FALSE(is_final(prog("a <=> a."), config({{"a", 1}}), Semantics::abstract));
}

TEST(Run, PaperScript) {
  auto comp = paper_run();
  EXPECT_TRUE(comp.final);
  EXPECT_EQ(comp.apply_count(), 4u);
  EXPECT_TRUE(comp.last().store.empty());
  EXPECT_EQ(comp.last().builtin.text(), "X=0,Y=0");
  EXPECT_TRUE(replays(prog(kPaperProgram), comp));
}

TEST(Run, SelfLoopTruncated) {
  auto p = prog("c <=> c.");
  auto comp = run(p, goal("c"), Semantics::abstract, Strategy::first_choice(), 10);
  EXPECT_FALSE(comp.final);
  EXPECT_EQ(comp.apply_count(), 10u);
  EXPECT_TRUE(comp.last().goal.empty());
}

TEST(Run, EmptyProgramEmptyGoal) {
  auto comp = run(Program{}, {}, Semantics::abstract, Strategy::first_choice(), 10);
  EXPECT_TRUE(comp.steps.empty());
  EXPECT_TRUE(comp.final);
}

TEST(Run, ScriptMismatchThrows) {
  auto p = prog(kPaperProgram);
  EXPECT_THROW(run(p, goal("c(X,Y)"), Semantics::abstract, Strategy::scripted({"r4"}), 10), EngineError);
}

namespace {

std::vector<std::pair<Program, Goal>> property_instances() {
  std::vector<std::pair<Program, Goal>> out;
  std::mt19937_64 rng(99);
  corpus::Shape s;
  s.variables = 2;
  s.goal_variables = 2;
  s.max_arity = 2;
  s.single_headed = false;
  for (int i = 0; i < 150; ++i) {
    auto in = corpus::random_instance(s, rng);
    out.emplace_back(in.program, in.goal);
  }
  return out;
}

}  // namespace

TEST(EngineProperties, ReplayMonotoneAndHistory) {
  std::size_t seed = 0;
  for (const auto& [p, g] : property_instances()) {
    for (Semantics sem : {Semantics::abstract, Semantics::theoretical}) {
      auto comp = run(p, g, sem, Strategy::random_choice(++seed), 30);
      ASSERT_TRUE(replays(p, comp)) << to_string(p);
      for (std::size_t i = 1; i <= comp.steps.size(); ++i) {
        const auto& before = comp.at(i - 1);
        const auto& after = comp.at(i);
        EXPECT_TRUE(after.builtin.implies(before.builtin));
        if (sem == Semantics::theoretical && comp.steps[i - 1].label.kind == StepKind::apply &&
            !p.find_rule(comp.steps[i - 1].label.rule)->kept.empty())
          EXPECT_GT(after.history.size(), before.history.size());
      }
    }
  }
}

TEST(EngineProperties, RangeRestrictedIntroducesNoVariables) {
  std::mt19937_64 rng(5);
  corpus::Shape s;
  s.variables = 2;
  s.goal_variables = 2;
  s.max_arity = 2;
  s.single_headed = false;
  for (int i = 0; i < 150; ++i) {
    auto in = corpus::random_instance(s, rng);
    ASSERT_TRUE(classify(in.program).range_restricted);
    auto comp = run(in.program, in.goal, Semantics::abstract, Strategy::random_choice(i), 30);
    auto vars = [](const Configuration& c) {
      std::set<std::string> v = c.builtin.variables();
      for (const auto& a : c.store)
        for (const auto& x : vars_of(a.atom)) v.insert(x);
      for (const auto& item : c.goal) collect_vars(item, v);
      return v;
    };
    const auto initial = vars(comp.initial);
    for (std::size_t k = 1; k <= comp.steps.size(); ++k) {
      auto now = vars(comp.at(k));
      EXPECT_TRUE(std::includes(initial.begin(), initial.end(), now.begin(), now.end()));
    }
  }
}

TEST(EngineProperties, FiniteBranching) {
  for (const auto& [p, g] : property_instances()) {
    auto c = normalize(initial_configuration(g));
    std::size_t bound = c.goal.size();
    for (const auto& r : p.rules) {
      std::size_t k = 1;
      for (std::size_t i = 0; i < r.head_size(); ++i) k *= c.store.size();
      bound += k;
    }
    EXPECT_LE(successors(p, c, Semantics::abstract).size(), bound);
  }
}
