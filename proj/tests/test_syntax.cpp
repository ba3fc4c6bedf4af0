#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace chrc;
using namespace testing_chrc;

TEST(Parse, SimplificationRule) {
  auto p = prog("r4 @ c(0,0) <=> true.");
  ASSERT_EQ(p.rules.size(), 1u);
  const Rule& r = p.rules[0];
  EXPECT_EQ(r.name, "r4");
  EXPECT_TRUE(r.kept.empty());
  ASSERT_EQ(r.removed.size(), 1u);
  EXPECT_EQ(to_string(r.removed[0]), "c(0,0)");
  EXPECT_TRUE(r.guard.empty());
  EXPECT_TRUE(r.body.empty());
}

TEST(Parse, PropagationRule) {
  auto p = prog("r3 @ c(0,Y) ==> Y = 0.");
  const Rule& r = p.rules.at(0);
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(to_string(r.kept[0]), "c(0,Y)");
  EXPECT_TRUE(r.removed.empty());
  ASSERT_EQ(r.body.size(), 1u);
  EXPECT_EQ(to_string(r.body[0]), "Y=0");
}

TEST(Parse, SimpagationGuardAndComments) {
  auto p = prog("% leading comment\nkeep @ a(X) \\ b(X, Y) <=> X = Y | c(Y), X = k. % trailing\n");
  const Rule& r = p.rules.at(0);
  EXPECT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.removed.size(), 1u);
  ASSERT_EQ(r.guard.size(), 1u);
  EXPECT_EQ(to_string(r.guard[0]), "X=Y");
  EXPECT_EQ(r.body.size(), 2u);
  EXPECT_EQ(p.constants, (std::set<std::string>{"k"}));
}

TEST(Parse, EmptyProgram) {
  auto p = prog("");
  EXPECT_TRUE(p.rules.empty());
  EXPECT_TRUE(p.constants.empty());
}

TEST(Parse, UnnamedRulesGetNames) {
  auto p = prog("a <=> b.\nb <=> true.");
  ASSERT_EQ(p.rules.size(), 2u);
  EXPECT_NE(p.rules[0].name, p.rules[1].name);
}

TEST(Parse, Errors) {
  EXPECT_THROW(prog("r @ p(f(X)) <=> true."), ParseError);
  EXPECT_THROW(prog("r @ p(X) <=> true"), ParseError);
  EXPECT_THROW(prog("r @ p(X) <=> true. r @ q <=> true."), ParseError);
  EXPECT_THROW(prog("p(X) <=> p(X,X)."), ParseError);
  EXPECT_THROW(prog("p(X) <=> q(_V1_2)."), ParseError);
  EXPECT_THROW(prog("true <=> a."), ParseError);
  EXPECT_THROW(prog("a <=> b ; c."), ParseError);
}

TEST(Parse, ErrorPosition) {
  try {
    prog("a <=> b.\nr @ p(f(X)) <=> true.");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Goal, Atoms) {
  auto g = goal("c(X,Y)");
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(to_string(g[0]), "c(X,Y)");
}

TEST(Goal, Multiset) {
  auto g = goal("a, a, X=0");
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(to_string(g[0]), "a");
  EXPECT_EQ(to_string(g[1]), "a");
  EXPECT_TRUE(std::holds_alternative<Equation>(g[2]));
  EXPECT_TRUE(goal("").empty());
}

TEST(Goal, Errors) {
  EXPECT_THROW(goal("p(f(a))"), ParseError);
  auto p = prog("c(X) <=> true.");
  EXPECT_THROW(parse_goal("c(a,b)", &p), ParseError);
}

TEST(Classify, PaperProgram) {
  auto f = classify(prog(kPaperProgram));
  EXPECT_TRUE(f.range_restricted);
  EXPECT_TRUE(f.single_headed);
  EXPECT_FALSE(f.propositional);
}

TEST(Classify, Flags) {
  EXPECT_FALSE(classify(prog("p(X) <=> q(X,Y).")).range_restricted);
  EXPECT_FALSE(classify(prog("a, b <=> true.")).single_headed);
  EXPECT_TRUE(classify(prog("a <=> b.")).propositional);
  EXPECT_FALSE(classify(prog("a <=> X = k | b.")).range_restricted);
  EXPECT_FALSE(classify(prog("p(X) <=> X = Y | true.")).range_restricted);
}

TEST(Classify, StableUnderReorderAndRenaming) {
  auto a = classify(prog("r1 @ p(X) <=> q(X,Y).\nr2 @ a, b <=> true."));
  auto b = classify(prog("r2 @ a, b <=> true.\nr1 @ p(U) <=> q(U,W)."));
  EXPECT_EQ(a, b);
}

TEST(Link, GoalSymbols) {
  auto p = prog(kPaperProgram);
  auto t = link(p, goal("c(X,Y), d(a)"));
  EXPECT_EQ(t.constants, (std::set<std::string>{"0", "a"}));
  EXPECT_EQ(t.predicates.at("d"), 1u);
  EXPECT_EQ(t.predicates.at("c"), 2u);
}

TEST(RoundTrip, PrintThenParse) {
  const char* programs[] = {
      kPaperProgram,
      "k @ a(X) \\ b(X,Y) <=> X = Y | c(Y), X = k.\n",
      "p ==> q.\nq <=> true.\n",
      "s @ p(X), p(Y) <=> X = Y, p(Z).\n",
  };
  for (const char* text : programs) {
    auto p1 = prog(text);
    auto p2 = prog(to_string(p1));
    EXPECT_EQ(p1, p2) << text;
    EXPECT_EQ(to_string(p1), to_string(p2));
  }
}
