#pragma once

#include <string>

#include "chrc/chrc.hpp"

namespace testing_chrc {

inline chrc::Program prog(const std::string& text) { return chrc::parse_program(text); }

inline chrc::Goal goal(const std::string& text) { return chrc::parse_goal(text); }

inline chrc::Atom atom(const std::string& text) { return std::get<chrc::Atom>(chrc::parse_goal(text).front()); }

inline chrc::Equation eq(const std::string& l, const std::string& r) {
  auto term = [](const std::string& s) {
    return std::isupper(static_cast<unsigned char>(s[0])) || s[0] == '_' ? chrc::Term::var(s) : chrc::Term::constant(s);
  };
  return {term(l), term(r)};
}

/// A configuration with an empty goal whose store holds `atoms` with the
/// given identifiers and whose built-in store holds `eqs`.
inline chrc::Configuration config(const std::vector<std::pair<std::string, int>>& atoms,
                                  const std::vector<chrc::Equation>& eqs = {}) {
  chrc::Configuration c;
  for (const auto& [text, id] : atoms) {
    c.store.push_back({atom(text), id});
    c.next_id = std::max(c.next_id, id + 1);
  }
  std::sort(c.store.begin(), c.store.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& e : eqs) c.builtin.add(e);
  return c;
}

inline const char* kPaperProgram =
    "r1 @ c(X,Y) <=> c(X,Y), c(X,Y).\n"
    "r2 @ c(X,Y) <=> X = 0.\n"
    "r3 @ c(0,Y) ==> Y = 0.\n"
    "r4 @ c(0,0) <=> true.\n";

inline chrc::Computation paper_run() {
  auto p = prog(kPaperProgram);
  return chrc::run(p, goal("c(X,Y)"), chrc::Semantics::abstract, chrc::Strategy::scripted({"r1", "r2", "r3", "r4"}),
                   100);
}

}  // namespace testing_chrc
