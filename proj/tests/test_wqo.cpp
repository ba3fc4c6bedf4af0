#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"

using namespace chrc;
using namespace testing_chrc;

TEST(Leq, Reflexive) {
  auto c = config({{"c(X,Y)", 1}, {"c(X,Y)", 2}}, {eq("X", "0")});
  EXPECT_TRUE(leq(c, c));
}

TEST(Leq, IdentifiersIgnored) {
  EXPECT_TRUE(leq(config({{"a", 1}}), config({{"a", 3}, {"a", 7}})));
  EXPECT_FALSE(leq(config({{"a", 3}, {"a", 7}}), config({{"a", 1}})));
}

TEST(Leq, BuiltinsMustBeEquivalent) {
  auto a = config({{"a", 1}}, {eq("X", "0")});
  auto b = config({{"a", 1}});
  EXPECT_FALSE(leq(a, b));
  EXPECT_FALSE(leq(b, a));
}

TEST(Leq, GoalMultiplicities) {
  Configuration a, b;
  a.goal = goal("a, X=0");
  b.goal = goal("a, a, X=0");
  EXPECT_TRUE(leq(a, b));
  EXPECT_FALSE(leq(b, a));
}

namespace {

Configuration random_config(std::mt19937_64& rng) {
  const char* atoms[] = {"a", "p(X)", "p(k)", "q(X,Y)"};
  std::uniform_int_distribution<int> pick(0, 3), count(0, 3), coin(0, 2);
  std::vector<std::pair<std::string, int>> s;
  int id = 1;
  for (int i = count(rng); i > 0; --i) s.emplace_back(atoms[pick(rng)], id++);
  std::vector<Equation> eqs;
  if (coin(rng) == 0) eqs.push_back(eq("X", "k"));
  return config(s, eqs);
}

}  // namespace

TEST(LeqProperties, ReflexiveTransitiveIdInvariant) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 3000; ++i) {
    auto a = random_config(rng), b = random_config(rng), c = random_config(rng);
    EXPECT_TRUE(leq(a, a));
    if (leq(a, b) && leq(b, c)) EXPECT_TRUE(leq(a, c));
    auto shifted = b;
    for (auto& x : shifted.store) x.id += 100;
    EXPECT_EQ(leq(a, b), leq(a, shifted));
  }
}
