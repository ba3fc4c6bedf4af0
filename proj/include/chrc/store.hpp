#pragma once

// The built-in theory: conjunctions of equations between variables and
// constants over a Herbrand universe with at least two constants.
//
// A store keeps every constrained variable mapped directly to the
// representative of its class. Representatives are chosen canonically
// (a constant if the class has one, else the lexicographically least
// variable), so two consistent stores are logically equivalent iff their
// maps are equal.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "chrc/syntax.hpp"

namespace chrc {

class BuiltinStore {
 public:
  BuiltinStore() = default;

  static BuiltinStore from(const std::vector<Equation>& eqs) {
    BuiltinStore s;
    for (const auto& e : eqs) s.add(e);
    return s;
  }

  bool consistent() const { return consistent_; }

  Term find(const Term& t) const {
    if (!t.is_var()) return t;
    auto it = rep_.find(t.name);
    return it == rep_.end() ? t : it->second;
  }

  /// In-place conjunction with `e`.
  void add(const Equation& e) {
    if (!consistent_) return;
    Term a = find(e.lhs);
    Term b = find(e.rhs);
    if (a == b) return;
    if (a.is_const() && b.is_const()) {
      consistent_ = false;
      rep_.clear();
      return;
    }
    // winner: constant first, then least variable name
    Term win = a, lose = b;
    if (b.is_const() || (a.is_var() && b.is_var() && b.name < a.name)) std::swap(win, lose);
    for (auto& [v, r] : rep_)
      if (r == lose) r = win;
    rep_[lose.name] = win;
  }

  BuiltinStore with(const Equation& e) const {
    BuiltinStore s = *this;
    s.add(e);
    return s;
  }

  bool equal(const Term& a, const Term& b) const {
    return !consistent_ || find(a) == find(b);
  }

  /// CT |= *this -> other.
  bool implies(const BuiltinStore& other) const {
    if (!consistent_) return true;
    if (!other.consistent_) return false;
    for (const auto& [v, r] : other.rep_)
      if (find(Term::var(v)) != find(r)) return false;
    return true;
  }

  /// Constrained variables with their representatives; unconstrained
  /// variables are absent.
  const std::map<std::string, Term>& bindings() const { return rep_; }

  std::set<std::string> variables() const {
    std::set<std::string> out;
    for (const auto& [v, r] : rep_) {
      out.insert(v);
      if (r.is_var()) out.insert(r.name);
    }
    return out;
  }

  /// Solved form: one `v=rep` per non-representative variable.
  std::vector<Equation> equations() const {
    std::vector<Equation> out;
    for (const auto& [v, r] : rep_) out.push_back({Term::var(v), r});
    return out;
  }

  /// Canonical text: sorted `lhs=rhs` joined by commas, `true` or `false`.
  std::string text() const;

  bool operator==(const BuiltinStore& o) const {
    if (!consistent_ || !o.consistent_) return consistent_ == o.consistent_;
    return rep_ == o.rep_;
  }

 private:
  std::map<std::string, Term> rep_;
  bool consistent_ = true;
};

inline std::string canonical_text(const std::vector<Equation>& eqs, bool consistent) {
  if (!consistent) return "false";
  if (eqs.empty()) return "true";
  std::vector<std::string> parts;
  parts.reserve(eqs.size());
  for (const auto& e : eqs) parts.push_back(to_string(e));
  std::sort(parts.begin(), parts.end());
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += ',';
    s += parts[i];
  }
  return s;
}

inline std::string BuiltinStore::text() const { return canonical_text(equations(), consistent_); }

/// A store restricted to a set of variables (all others existentially
/// quantified), in canonical solved form.
struct ProjectedStore {
  std::set<std::string> variables;
  std::vector<Equation> equations;  // sorted by text
  bool consistent = true;

  BuiltinStore store() const {
    if (!consistent) return BuiltinStore::from({{Term::constant("0"), Term::constant("1")}});
    return BuiltinStore::from(equations);
  }

  std::string text() const { return canonical_text(equations, consistent); }

  /// Equality up to logical equivalence; the variable set does not take part.
  bool operator==(const ProjectedStore& o) const {
    return consistent == o.consistent && (!consistent || equations == o.equations);
  }
};

inline ProjectedStore project(const BuiltinStore& s, const std::set<std::string>& keep) {
  ProjectedStore p;
  p.variables = keep;
  if (!s.consistent()) {
    p.consistent = false;
    return p;
  }
  // least kept variable of every variable-represented class
  std::map<Term, std::string> class_rep;
  for (const auto& v : keep) {
    Term r = s.find(Term::var(v));
    if (r.is_var()) class_rep.emplace(r, v);  // keep is ordered, first is least
  }
  for (const auto& v : keep) {
    Term r = s.find(Term::var(v));
    if (r.is_const()) {
      p.equations.push_back({Term::var(v), r});
    } else {
      const std::string& least = class_rep.at(r);
      if (least != v) p.equations.push_back({Term::var(v), Term::var(least)});
    }
  }
  std::sort(p.equations.begin(), p.equations.end(),
            [](const Equation& a, const Equation& b) { return to_string(a) < to_string(b); });
  return p;
}

/// CT |= s -> exists existentials . (/\ eqs)
inline bool entails(const BuiltinStore& s, const std::set<std::string>& existentials,
                    const std::vector<Equation>& eqs) {
  if (!s.consistent()) return true;
  BuiltinStore local = BuiltinStore::from(eqs);
  if (!local.consistent()) return false;
  auto free = [&](const Term& t) { return t.is_const() || !existentials.count(t.name); };
  // group the congruence classes of eqs; every pair of free members must be
  // equal in s, existential members are witnessed by any free member
  std::map<Term, std::vector<Term>> classes;
  for (const auto& [v, r] : local.bindings()) {
    Term t = Term::var(v);
    if (free(t)) classes[r].push_back(t);
  }
  for (auto& [r, members] : classes) {
    if (free(r)) members.push_back(r);
    for (std::size_t i = 1; i < members.size(); ++i)
      if (!s.equal(members[0], members[i])) return false;
  }
  return true;
}

inline BuiltinStore add_equation(const BuiltinStore& s, const Equation& e) { return s.with(e); }

inline bool equivalent(const BuiltinStore& a, const BuiltinStore& b) { return a == b; }
inline bool equivalent(const ProjectedStore& a, const ProjectedStore& b) { return a == b; }

inline bool implies(const ProjectedStore& a, const ProjectedStore& b) {
  return a.store().implies(b.store());
}

}  // namespace chrc
