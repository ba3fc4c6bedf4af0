#include <gtest/gtest.h>

#include <chrono>

#include "helpers.hpp"

using namespace chrc;
using namespace testing_chrc;

TEST(Explore, Chain) {
  auto r = oracle::explore(prog("p <=> q.\nq <=> true."), goal("p"), Semantics::abstract, 1000, 100);
  EXPECT_TRUE(r.terminating_found);
  EXPECT_FALSE(r.cycle_found);
  EXPECT_FALSE(r.truncated);
  EXPECT_EQ(r.states_visited, 3u);
}

TEST(Explore, SelfLoop) {
  auto r = oracle::explore(prog("c <=> c."), goal("c"), Semantics::abstract, 1000, 100);
  EXPECT_FALSE(r.terminating_found);
  EXPECT_TRUE(r.cycle_found);
  EXPECT_EQ(r.states_visited, 1u);
}

TEST(Explore, EmptyGoal) {
  auto r = oracle::explore(prog("c <=> c."), {}, Semantics::abstract, 1000, 100);
  EXPECT_EQ(r.states_visited, 1u);
  EXPECT_TRUE(r.terminating_found);
}

TEST(Explore, Truncation) {
  auto r = oracle::explore(prog("c ==> c."), goal("c"), Semantics::abstract, 50, 1000);
  EXPECT_TRUE(r.truncated);
  EXPECT_FALSE(r.terminating_found);
  auto t = oracle::explore(prog("c ==> c."), goal("c"), Semantics::theoretical, 50, 1000);
  EXPECT_TRUE(t.truncated);
  EXPECT_FALSE(t.terminating_found);
  auto once = oracle::explore(prog("c ==> d."), goal("c"), Semantics::theoretical, 50, 1000);
  EXPECT_FALSE(once.truncated);
  EXPECT_TRUE(once.terminating_found);
  EXPECT_FALSE(once.cycle_found);
}

TEST(StateKey, IdentifiersRenumbered) {
  EXPECT_EQ(oracle::state_key(config({{"a", 1}, {"b", 2}})), oracle::state_key(config({{"b", 4}, {"a", 9}})));
  EXPECT_NE(oracle::state_key(config({{"a", 1}})), oracle::state_key(config({{"a", 1}, {"a", 2}})));
}

TEST(Enumeration, SmallCounts) {
  EXPECT_EQ(oracle::enumerate_strictly_increasing(0, 0), 2u);
  EXPECT_EQ(oracle::enumerate_strictly_increasing(1, 0), 2u);
  EXPECT_LE(oracle::enumerate_strictly_increasing(0, 0), bound_L(0, 0));
  EXPECT_LE(oracle::enumerate_strictly_increasing(1, 0), bound_L(1, 0));
  EXPECT_THROW(oracle::enumerate_strictly_increasing(3, 1), oracle::ScaleError);
  EXPECT_THROW(oracle::enumerate_strictly_increasing(1, 2), oracle::ScaleError);
}

TEST(Enumeration, OneVariableOneConstant) {
  auto start = std::chrono::steady_clock::now();
  const auto n = oracle::enumerate_strictly_increasing(1, 1);
  auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LE(n, bound_L(1, 1));
  EXPECT_LT(secs, 10.0);
  EXPECT_LE(oracle::enumerate_strictly_increasing(2, 1), bound_L(2, 1));
}
