#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace chrc;
using namespace testing_chrc;

namespace {

std::size_t node(const Forest& f, const std::string& label) {
  for (std::size_t i = 0; i < f.nodes.size(); ++i)
    if (f.label_text(i) == label) return i;
  ADD_FAILURE() << "no node " << label;
  return 0;
}

std::vector<std::pair<BuiltinStore, BuiltinStore>> pairs(
    const std::vector<std::pair<std::vector<Equation>, std::vector<Equation>>>& in) {
  std::vector<std::pair<BuiltinStore, BuiltinStore>> out;
  for (const auto& [c, d] : in) {
    BuiltinStore a, b;
    for (const auto& e : c) a.add(e);
    for (const auto& e : d) b.add(e);
    out.emplace_back(a, b);
  }
  return out;
}

}  // namespace

TEST(Forest, PaperTree) {
  auto p = prog(kPaperProgram);
  auto delta = paper_run();
  auto f = build_forest(p, delta);
  EXPECT_EQ(f.text(),
            "c(X,Y)#1^0\n"
            "  c(X,Y)#2^0\n"
            "    □\n"
            "  c(X,Y)#3^0\n"
            "    c(X,Y)#3^1\n"
            "      □\n");
  EXPECT_EQ(f.nodes.size(), 6u);
  EXPECT_EQ(std::count_if(f.nodes.begin(), f.nodes.end(), [](const ForestNode& n) { return n.is_box(); }), 2);
}

TEST(Forest, SingleAtomAndEmpty) {
  auto p = prog("a <=> true.");
  auto d = run(p, goal("a"), Semantics::abstract, Strategy::first_choice(), 10);
  EXPECT_EQ(build_forest(p, d).text(), "a#1^0\n  □\n");
  auto e = run(p, {}, Semantics::abstract, Strategy::first_choice(), 10);
  EXPECT_TRUE(build_forest(p, e).nodes.empty());
}

TEST(Forest, Rejections) {
  auto multi = prog("a, b <=> true.");
  auto d = run(multi, goal("a, b"), Semantics::abstract, Strategy::first_choice(), 10);
  try {
    build_forest(multi, d);
    FAIL();
  } catch (const ForestError& e) {
    EXPECT_EQ(e.kind(), ForestError::Kind::not_single_headed);
  }
  auto loop = prog("c <=> c.");
  auto l = run(loop, goal("c"), Semantics::abstract, Strategy::first_choice(), 3);
  try {
    build_forest(loop, l);
    FAIL();
  } catch (const ForestError& e) {
    EXPECT_EQ(e.kind(), ForestError::Kind::non_terminating);
  }
}

TEST(Forest, SuperscriptsCountPropagations) {
  auto p = prog("r @ p(X) ==> X = a.\ns @ p(a) ==> q.\nt @ p(a) <=> true.\nu @ q <=> true.");
  auto d = run(p, goal("p(Y)"), Semantics::theoretical, Strategy::first_choice(), 20);
  ASSERT_TRUE(d.final);
  auto f = build_forest(p, d);
  EXPECT_EQ(f.label_text(f.roots[0]), "p(Y)#1^0");
  node(f, "p(Y)#1^1");
  node(f, "p(Y)#1^2");
}

TEST(ScComputations, Paper) {
  auto f = build_forest(prog(kPaperProgram), paper_run());
  auto paths = sc_computations(f);
  ASSERT_EQ(paths.size(), 2u);
  std::vector<std::string> left, right;
  for (auto n : paths[0]) left.push_back(f.label_text(n));
  for (auto n : paths[1]) right.push_back(f.label_text(n));
  EXPECT_EQ(left, (std::vector<std::string>{"c(X,Y)#1^0", "c(X,Y)#2^0", "□"}));
  EXPECT_EQ(right, (std::vector<std::string>{"c(X,Y)#1^0", "c(X,Y)#3^0", "c(X,Y)#3^1", "□"}));
}

TEST(ScComputations, ChainAndEmpty) {
  auto p = prog("a <=> true.");
  EXPECT_EQ(sc_computations(build_forest(p, run(p, goal("a"), Semantics::abstract, {}, 5))).size(), 1u);
  EXPECT_TRUE(sc_computations(Forest{}).empty());
}

TEST(REqual, Cases) {
  auto f = build_forest(prog(kPaperProgram), paper_run());
  auto rho = r_equal(*f.nodes[node(f, "c(X,Y)#1^0")].label, *f.nodes[node(f, "c(X,Y)#3^1")].label);
  ASSERT_TRUE(rho);
  EXPECT_EQ(*rho, (Renaming{{"X", "X"}, {"Y", "Y"}}));

  auto r2 = r_equal(atom("c(X,Y)"), atom("c(U,V)"));
  ASSERT_TRUE(r2);
  EXPECT_EQ(*r2, (Renaming{{"U", "X"}, {"V", "Y"}}));
  EXPECT_FALSE(r_equal(atom("c(X,X)"), atom("c(U,V)")));
  EXPECT_FALSE(r_equal(atom("c(X,Y)"), atom("c(U,U)")));
  EXPECT_FALSE(r_equal(atom("c(X,a)"), atom("c(U,b)")));
  EXPECT_EQ(r_class(atom("c(X,Y)")), r_class(atom("c(U,V)")));
  EXPECT_NE(r_class(atom("c(X,X)")), r_class(atom("c(U,V)")));
}

TEST(Repetitiveness, Cases) {
  auto f = build_forest(prog(kPaperProgram), paper_run());
  auto r = repetitiveness(f);
  EXPECT_EQ(r.level, 3u);
  EXPECT_EQ(r.degree, 1u);
  auto p = prog("a <=> true.");
  auto chain = repetitiveness(build_forest(p, run(p, goal("a"), Semantics::abstract, {}, 5)));
  EXPECT_EQ(chain.level, 1u);
  EXPECT_EQ(chain.degree, 1u);
  auto empty = repetitiveness(Forest{});
  EXPECT_EQ(empty.level, 0u);
  EXPECT_EQ(empty.degree, 0u);
}

TEST(Eta, Cases) {
  EXPECT_EQ(eta(pairs({{{}, {}}}), {"X"}).text(), "<true ; true>");
  EXPECT_EQ(eta(pairs({{{}, {eq("X", "0")}}, {{eq("X", "0")}, {eq("X", "0"), eq("Y", "0")}}}), {"X"}).text(),
            "<true ; X=0>");
  EXPECT_EQ(eta({}, {"X"}).text(), "ε");
  EXPECT_EQ(eta(pairs({{{}, {}}, {{}, {eq("X", "a")}}}), {"X"}).text(), "<true ; X=a>");
}

TEST(NodeSequence, Paper) {
  auto delta = paper_run();
  auto f = build_forest(prog(kPaperProgram), delta);
  EXPECT_EQ(node_sequence(delta, f, node(f, "c(X,Y)#1^0")).text(), "<true ; X=0,Y=0>");
  EXPECT_EQ(node_sequence(delta, f, node(f, "c(X,Y)#2^0")).text(), "<true ; X=0>");
  EXPECT_EQ(node_sequence(delta, f, node(f, "c(X,Y)#3^0")).text(), "<X=0 ; X=0,Y=0>");
  EXPECT_EQ(node_sequence(delta, f, node(f, "c(X,Y)#3^1")).text(), "<X=0,Y=0 ; X=0,Y=0>");
}

TEST(SequenceLength, Cases) {
  ReactiveSequence three;
  ProjectedStore t = project(BuiltinStore{}, {"X"});
  BuiltinStore xa;
  xa.add(eq("X", "a"));
  three.pairs = {{t, t}, {t, t}, {t, t}};
  EXPECT_TRUE(max_sequence_length_check(three, {"X"}));
  three.pairs.push_back({t, project(xa, {"X"})});
  EXPECT_FALSE(max_sequence_length_check(three, {"X"}));
  EXPECT_TRUE(max_sequence_length_check({}, {}));
  ReactiveSequence two;
  two.pairs = {{t, t}, {t, t}};
  EXPECT_TRUE(max_sequence_length_check(two, {}));
  two.pairs.push_back({t, t});
  EXPECT_FALSE(max_sequence_length_check(two, {}));
}

TEST(StrictlyIncreasing, Definition) {
  auto inc = eta(pairs({{{}, {eq("X", "Y")}}, {{eq("X", "Y"), eq("Y", "a")}, {eq("X", "a"), eq("Y", "a")}}}),
                 {"X", "Y"});
  EXPECT_TRUE(strictly_increasing(inc, {"X", "Y"}));
  ReactiveSequence bad;
  ProjectedStore t = project(BuiltinStore{}, {"X"});
  bad.pairs = {{t, t}, {t, t}};
  EXPECT_FALSE(strictly_increasing(bad, {"X"}));
}

namespace {

const char* kChain = "a @ c(X) <=> c(X).\nb @ c(X) <=> true.\n";

}  // namespace

TEST(Compress, TwoRepetitiveChain) {
  auto p = prog(kChain);
  auto delta = run(p, goal("c(X)"), Semantics::abstract, Strategy::scripted({"a", "b"}), 10);
  ASSERT_TRUE(delta.final);
  auto f = build_forest(p, delta);
  EXPECT_EQ(f.text(), "c(X)#1^0\n  c(X)#2^0\n    □\n");
  EXPECT_EQ(repetitiveness(f).level, 2u);
  const auto n = node(f, "c(X)#1^0"), n2 = node(f, "c(X)#2^0");
  EXPECT_EQ(node_sequence(delta, f, n).text(), "<true ; true>");
  EXPECT_EQ(node_sequence(delta, f, n2).text(), "<true ; true>");
  auto out = compress(p, delta, n, n2);
  EXPECT_EQ(out.apply_count(), 1u);
  EXPECT_TRUE(out.final);
  EXPECT_TRUE(replays(p, out));
  EXPECT_EQ(repetitiveness(build_forest(p, out)).level, 1u);
}

TEST(Compress, Preconditions) {
  auto p = prog(kChain);
  auto delta = run(p, goal("c(X), c(Y)"), Semantics::abstract, Strategy::scripted({"b", "b"}), 10);
  auto f = build_forest(p, delta);
  const auto x = node(f, "c(X)#1^0"), y = node(f, "c(Y)#2^0");
  try {
    compress(p, delta, x, x);
    FAIL();
  } catch (const ForestError& e) {
    EXPECT_EQ(e.kind(), ForestError::Kind::precondition);
  }
  try {
    compress(p, delta, x, y);
    FAIL();
  } catch (const ForestError& e) {
    EXPECT_EQ(e.kind(), ForestError::Kind::precondition);
  }
}

TEST(Compress, DifferentSequencesRejected) {
  auto p = prog("a @ c(X) <=> X = k, c(X).\nb @ c(X) <=> true.\n");
  auto delta = run(p, goal("c(X)"), Semantics::abstract, Strategy::scripted({"a", "b"}), 10);
  auto f = build_forest(p, delta);
  EXPECT_THROW(compress(p, delta, node(f, "c(X)#1^0"), node(f, "c(X)#2^0")), ForestError);
}
