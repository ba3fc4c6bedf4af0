#pragma once

// Transition systems over configurations <G, S, B, T>_n. Under the
// theoretical semantics the propagation history T blocks re-firing a rule
// instance; under the abstract semantics T is kept empty and ignored.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chrc/store.hpp"
#include "chrc/syntax.hpp"

namespace chrc {

enum class Semantics { theoretical, abstract };  // omega_t, omega_o

inline const char* to_string(Semantics s) { return s == Semantics::theoretical ? "t" : "o"; }

struct IdentifiedAtom {
  Atom atom;
  int id = 0;

  bool operator==(const IdentifiedAtom&) const = default;
};

inline std::string to_string(const IdentifiedAtom& a) {
  return to_string(a.atom) + "#" + std::to_string(a.id);
}

struct PropagationToken {
  std::vector<int> ids;  // kept ids ++ removed ids
  std::string rule;

  auto operator<=>(const PropagationToken&) const = default;
  bool operator==(const PropagationToken&) const = default;
};

struct Configuration {
  Goal goal;
  std::vector<IdentifiedAtom> store;  // ascending id
  BuiltinStore builtin;
  std::set<PropagationToken> history;
  int next_id = 1;
  int fresh = 0;  // fresh-variable counter

  bool failed() const { return !builtin.consistent(); }

  const IdentifiedAtom* find(int id) const {
    auto it = std::lower_bound(store.begin(), store.end(), id,
                               [](const IdentifiedAtom& a, int i) { return a.id < i; });
    return it != store.end() && it->id == id ? &*it : nullptr;
  }

  bool operator==(const Configuration&) const = default;
};

/// Built-in store together with the unsolved equations of the goal.
inline BuiltinStore all_builtins(const Configuration& c) {
  BuiltinStore b = c.builtin;
  for (const auto& item : c.goal)
    if (const auto* e = std::get_if<Equation>(&item)) b.add(*e);
  return b;
}

inline std::string store_text(const Configuration& c) {
  std::string s;
  for (std::size_t i = 0; i < c.store.size(); ++i) {
    if (i) s += ", ";
    s += to_string(c.store[i]);
  }
  return s;
}

enum class StepKind { solve, introduce, apply };

inline const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::solve: return "solve";
    case StepKind::introduce: return "introduce";
    default: return "apply";
  }
}

struct TransitionLabel {
  StepKind kind = StepKind::solve;
  std::size_t goal_index = 0;  // solve / introduce
  std::string rule;            // apply
  std::vector<int> kept_ids;
  std::vector<int> removed_ids;
  std::vector<std::pair<std::string, Term>> theta;         // head variable -> term
  std::vector<std::pair<std::string, std::string>> introduced;  // rule variable -> fresh name

  /// Identity of the transition within its source configuration.
  bool same_choice(const TransitionLabel& o) const {
    return kind == o.kind && goal_index == o.goal_index && rule == o.rule && kept_ids == o.kept_ids &&
           removed_ids == o.removed_ids;
  }

  std::vector<int> matched_ids() const {
    std::vector<int> ids = kept_ids;
    ids.insert(ids.end(), removed_ids.begin(), removed_ids.end());
    return ids;
  }

  bool operator==(const TransitionLabel&) const = default;
};

struct Step {
  TransitionLabel label;
  Configuration after;
};

struct Computation {
  Semantics semantics = Semantics::abstract;
  Configuration initial;
  std::vector<Step> steps;
  bool final = false;

  /// Configuration at position i: 0 is the initial one, i > 0 follows step i-1.
  const Configuration& at(std::size_t i) const { return i == 0 ? initial : steps[i - 1].after; }
  const Configuration& last() const { return steps.empty() ? initial : steps.back().after; }
  std::size_t apply_count() const {
    return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](const Step& s) {
      return s.label.kind == StepKind::apply;
    }));
  }
};

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Configuration initial_configuration(const Goal& goal) {
  Configuration c;
  c.goal = goal;
  return c;
}

// ---------------------------------------------------------------------------
// Single transitions

inline Step solve(const Configuration& c, std::size_t index) {
  Step s{{StepKind::solve, index, {}, {}, {}, {}, {}}, c};
  s.after.builtin.add(std::get<Equation>(c.goal[index]));
  s.after.goal.erase(s.after.goal.begin() + static_cast<std::ptrdiff_t>(index));
  return s;
}

inline Step introduce(const Configuration& c, std::size_t index) {
  Step s{{StepKind::introduce, index, {}, {}, {}, {}, {}}, c};
  Configuration& n = s.after;
  n.store.push_back({std::get<Atom>(c.goal[index]), n.next_id++});
  n.goal.erase(n.goal.begin() + static_cast<std::ptrdiff_t>(index));
  return s;
}

namespace detail {

using Binding = std::map<std::string, Term>;

// Match a rule head atom against a stored atom modulo the built-in store:
// head variables bind to class representatives, head constants must equal
// the representative of the stored argument.
inline bool match_atom(const Atom& head, const Atom& stored, const BuiltinStore& b, Binding& theta) {
  if (head.predicate != stored.predicate || head.arity() != stored.arity()) return false;
  for (std::size_t i = 0; i < head.arity(); ++i) {
    const Term rep = b.find(stored.args[i]);
    const Term& h = head.args[i];
    if (h.is_const()) {
      if (rep != h) return false;
    } else {
      auto [it, fresh] = theta.emplace(h.name, rep);
      if (!fresh && it->second != rep) return false;
    }
  }
  return true;
}

inline Term substitute(const Term& t, const Binding& theta) {
  if (!t.is_var()) return t;
  auto it = theta.find(t.name);
  return it == theta.end() ? t : it->second;
}

inline Atom substitute(const Atom& a, const Binding& theta) {
  Atom out{a.predicate, {}};
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) out.args.push_back(substitute(t, theta));
  return out;
}

inline Equation substitute(const Equation& e, const Binding& theta) {
  return {substitute(e.lhs, theta), substitute(e.rhs, theta)};
}

inline Item substitute(const Item& i, const Binding& theta) {
  return std::visit([&](const auto& x) -> Item { return substitute(x, theta); }, i);
}

inline std::set<std::string> head_vars(const Rule& r) {
  std::set<std::string> h = vars_of(r.kept);
  for (const auto& v : vars_of(r.removed)) h.insert(v);
  return h;
}

// Builds the Apply successor once theta (over head variables) is fixed.
// Returns nothing when the guard is not entailed or the history blocks it.
inline std::optional<Step> fire(const Rule& r, const Configuration& c, Semantics sem, const Binding& theta,
                                const std::vector<int>& kept_ids, const std::vector<int>& removed_ids) {
  const std::set<std::string> head = head_vars(r);

  // guard-local variables are renamed out of the configuration's namespace
  Binding guard_theta = theta;
  std::set<std::string> existentials;
  for (const auto& v : vars_of(r.guard)) {
    if (head.count(v)) continue;
    std::string local = "?" + v;
    guard_theta.emplace(v, Term::var(local));
    existentials.insert(local);
  }
  std::vector<Equation> guard;
  guard.reserve(r.guard.size());
  for (const auto& e : r.guard) guard.push_back(substitute(e, guard_theta));
  if (!entails(c.builtin, existentials, guard)) return std::nullopt;

  PropagationToken token{kept_ids, r.name};
  token.ids.insert(token.ids.end(), removed_ids.begin(), removed_ids.end());
  if (sem == Semantics::theoretical && c.history.count(token)) return std::nullopt;

  Step s;
  s.label.kind = StepKind::apply;
  s.label.rule = r.name;
  s.label.kept_ids = kept_ids;
  s.label.removed_ids = removed_ids;
  for (const auto& [v, t] : theta) s.label.theta.emplace_back(v, t);

  Configuration n = c;
  Binding body_theta = theta;
  for (const auto& v : vars_of(r.body)) {
    if (head.count(v)) continue;
    std::string name = "_V" + std::to_string(n.next_id) + "_" + std::to_string(++n.fresh);
    body_theta.emplace(v, Term::var(name));
    s.label.introduced.emplace_back(v, name);
  }
  for (const auto& item : r.body) n.goal.push_back(substitute(item, body_theta));
  std::erase_if(n.store, [&](const IdentifiedAtom& a) {
    return std::find(removed_ids.begin(), removed_ids.end(), a.id) != removed_ids.end();
  });
  if (sem == Semantics::theoretical) n.history.insert(std::move(token));
  s.after = std::move(n);
  return s;
}

// Injective assignments of store members to the rule's head atoms, in
// lexicographic order of store positions.
inline void enumerate_matches(const Rule& r, const Configuration& c, Semantics sem, std::vector<Step>& out) {
  std::vector<const Atom*> heads;
  for (const auto& a : r.kept) heads.push_back(&a);
  for (const auto& a : r.removed) heads.push_back(&a);
  std::vector<int> chosen;
  std::vector<bool> used(c.store.size(), false);

  std::function<void(std::size_t, const Binding&)> go = [&](std::size_t k, const Binding& theta) {
    if (k == heads.size()) {
      std::vector<int> kept(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(r.kept.size()));
      std::vector<int> removed(chosen.begin() + static_cast<std::ptrdiff_t>(r.kept.size()), chosen.end());
      if (auto s = fire(r, c, sem, theta, kept, removed)) out.push_back(std::move(*s));
      return;
    }
    for (std::size_t i = 0; i < c.store.size(); ++i) {
      if (used[i]) continue;
      Binding next = theta;
      if (!match_atom(*heads[k], c.store[i].atom, c.builtin, next)) continue;
      used[i] = true;
      chosen.push_back(c.store[i].id);
      go(k + 1, next);
      chosen.pop_back();
      used[i] = false;
    }
  };
  go(0, {});
}

}  // namespace detail

/// All Apply successors: rules in program order, store members in id order.
inline std::vector<Step> apply_successors(const Program& p, const Configuration& c, Semantics sem) {
  std::vector<Step> out;
  if (c.failed()) return out;
  for (const auto& r : p.rules) detail::enumerate_matches(r, c, sem, out);
  return out;
}

/// Every one-step successor: Solve steps, then Introduce steps, then Apply.
inline std::vector<Step> successors(const Program& p, const Configuration& c, Semantics sem) {
  std::vector<Step> out;
  if (c.failed()) return out;
  for (std::size_t i = 0; i < c.goal.size(); ++i)
    if (std::holds_alternative<Equation>(c.goal[i])) out.push_back(solve(c, i));
  for (std::size_t i = 0; i < c.goal.size(); ++i)
    if (std::holds_alternative<Atom>(c.goal[i])) out.push_back(introduce(c, i));
  auto applies = apply_successors(p, c, sem);
  std::move(applies.begin(), applies.end(), std::back_inserter(out));
  return out;
}

/// The next step of normalization: the first built-in of the goal, else its
/// first CHR constraint.
inline std::optional<Step> normalize_step(const Configuration& c) {
  if (c.failed() || c.goal.empty()) return std::nullopt;
  for (std::size_t i = 0; i < c.goal.size(); ++i)
    if (std::holds_alternative<Equation>(c.goal[i])) return solve(c, i);
  return introduce(c, 0);
}

/// Exhaustive Solve/Introduce; appends the steps taken to `trace` if given.
inline Configuration normalize(const Configuration& c, std::vector<Step>* trace = nullptr) {
  Configuration cur = c;
  while (auto s = normalize_step(cur)) {
    cur = s->after;
    if (trace) trace->push_back(std::move(*s));
  }
  return cur;
}

inline Configuration normalize(const Program&, const Configuration& c) { return normalize(c); }

inline bool is_final(const Program& p, const Configuration& c, Semantics sem) {
  if (c.failed()) return true;
  return c.goal.empty() && apply_successors(p, c, sem).empty();
}

/// One Apply followed by normalization.
struct MacroStep {
  std::vector<Step> steps;
  const Configuration& result() const { return steps.back().after; }
};

inline std::vector<MacroStep> macro_successors(const Program& p, const Configuration& normalized, Semantics sem) {
  std::vector<MacroStep> out;
  for (auto& s : apply_successors(p, normalized, sem)) {
    MacroStep m;
    m.steps.push_back(std::move(s));
    Configuration n = normalize(m.steps.back().after, &m.steps);
    (void)n;
    out.push_back(std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Running

struct Strategy {
  enum class Kind { first, random, script };
  Kind kind = Kind::first;
  std::uint64_t seed = 0;
  std::vector<std::string> script;  // rule names, optionally `rule#id`

  static Strategy first_choice() { return {}; }
  static Strategy random_choice(std::uint64_t seed) { return {Kind::random, seed, {}}; }
  static Strategy scripted(std::vector<std::string> s) { return {Kind::script, 0, std::move(s)}; }
};

/// A prefix of a computation of at most `max_steps` Apply transitions,
/// followed by whatever Solve/Introduce steps remain.
inline Computation run(const Program& p, const Goal& g, Semantics sem, const Strategy& strategy,
                       std::size_t max_steps) {
  Computation comp;
  comp.semantics = sem;
  comp.initial = initial_configuration(g);
  std::mt19937_64 rng(strategy.seed);
  std::size_t applies = 0;
  std::size_t script_pos = 0;
  Configuration cur = comp.initial;

  auto push = [&](Step s) {
    cur = s.after;
    comp.steps.push_back(std::move(s));
  };

  for (;;) {
    if (cur.failed()) break;
    if (strategy.kind != Strategy::Kind::random || applies >= max_steps) {
      if (auto s = normalize_step(cur)) {
        push(std::move(*s));
        continue;
      }
      if (applies >= max_steps) break;
      auto applies_here = apply_successors(p, cur, sem);
      if (applies_here.empty()) break;
      if (strategy.kind == Strategy::Kind::first) {
        push(std::move(applies_here.front()));
      } else {
        if (script_pos >= strategy.script.size()) break;
        const std::string& want = strategy.script[script_pos++];
        std::string rule = want;
        std::optional<int> id;
        if (auto hash = want.find('#'); hash != std::string::npos) {
          rule = want.substr(0, hash);
          id = std::stoi(want.substr(hash + 1));
        }
        auto it = std::find_if(applies_here.begin(), applies_here.end(), [&](const Step& s) {
          if (s.label.rule != rule) return false;
          if (!id) return true;
          auto ids = s.label.matched_ids();
          return std::find(ids.begin(), ids.end(), *id) != ids.end();
        });
        if (it == applies_here.end()) throw EngineError("script step '" + want + "' is not applicable");
        push(std::move(*it));
      }
      ++applies;
    } else {
      auto all = successors(p, cur, sem);
      if (all.empty()) break;
      std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
      Step s = std::move(all[pick(rng)]);
      if (s.label.kind == StepKind::apply) ++applies;
      push(std::move(s));
    }
  }
  comp.final = is_final(p, cur, sem);
  return comp;
}

/// Re-executes the recorded labels from the initial configuration and
/// checks every recorded configuration. Returns an explanation on mismatch.
inline std::optional<std::string> replay_error(const Program& p, const Computation& comp) {
  Configuration cur = comp.initial;
  for (std::size_t i = 0; i < comp.steps.size(); ++i) {
    const auto& want = comp.steps[i];
    auto succ = successors(p, cur, comp.semantics);
    auto it = std::find_if(succ.begin(), succ.end(),
                           [&](const Step& s) { return s.label.same_choice(want.label); });
    if (it == succ.end()) return "step " + std::to_string(i + 1) + " is not enabled";
    if (!(it->after == want.after)) return "step " + std::to_string(i + 1) + " yields a different configuration";
    cur = it->after;
  }
  if (comp.final != is_final(p, cur, comp.semantics)) return "finality flag does not match";
  return std::nullopt;
}

inline bool replays(const Program& p, const Computation& comp) { return !replay_error(p, comp); }

}  // namespace chrc
