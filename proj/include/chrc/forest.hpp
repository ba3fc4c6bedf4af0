#pragma once

// Forests of repetitions for terminating computations of single-headed
// programs, reactive sequences and the compression of a computation along
// two r-equal repetitions with equal sequences.
//
// A repetition h#l^i is the identified constraint h#l after i propagation
// firings on it. Each Apply step rewriting a repetition gives the node one
// child per CHR constraint of the rule body, plus the continuation h#l^(i+1)
// for propagation rules, or a single box for an empty simplification.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chrc/engine.hpp"
#include "chrc/store.hpp"

namespace chrc {

class ForestError : public std::runtime_error {
 public:
  enum class Kind { non_terminating, not_single_headed, precondition, replay_failed };

  ForestError(Kind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Repetition {
  Atom atom;
  int id = 0;  // 0 while the constraint was never introduced
  int superscript = 0;

  bool operator==(const Repetition&) const = default;
};

inline std::string to_string(const Repetition& r) {
  return to_string(r.atom) + "#" + std::to_string(r.id) + "^" + std::to_string(r.superscript);
}

struct ForestNode {
  std::optional<Repetition> label;  // empty for a box
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;
  std::optional<std::size_t> continuation;  // child h#l^(i+1) after a propagation step
  std::optional<std::size_t> rewritten_at;  // step index of the Apply rewriting this repetition
  std::string rule;

  bool is_box() const { return !label.has_value(); }
};

struct Forest {
  std::vector<ForestNode> nodes;
  std::vector<std::size_t> roots;
  std::vector<std::optional<std::size_t>> goal_roots;  // parallel to the initial goal
  std::map<std::size_t, std::size_t> rewritten_by_step;

  std::size_t add(ForestNode n) {
    nodes.push_back(std::move(n));
    return nodes.size() - 1;
  }

  bool in_subtree(std::size_t root, std::size_t n) const {
    for (std::optional<std::size_t> cur = n; cur; cur = nodes[*cur].parent)
      if (*cur == root) return true;
    return false;
  }

  std::vector<std::size_t> subtree(std::size_t root) const {
    std::vector<std::size_t> out{root};
    for (std::size_t i = 0; i < out.size(); ++i)
      for (auto c : nodes[out[i]].children) out.push_back(c);
    return out;
  }

  std::string label_text(std::size_t n) const {
    return nodes[n].is_box() ? "□" : to_string(*nodes[n].label);
  }

  /// Indented text rendering, one node per line.
  std::string text() const {
    std::string out;
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    for (auto it = roots.rbegin(); it != roots.rend(); ++it) stack.emplace_back(*it, 0);
    while (!stack.empty()) {
      auto [n, depth] = stack.back();
      stack.pop_back();
      out += std::string(2 * depth, ' ') + label_text(n) + "\n";
      const auto& ch = nodes[n].children;
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.emplace_back(*it, depth + 1);
    }
    return out;
  }
};

namespace detail {

inline void require_single_headed(const Program& p) {
  for (const auto& r : p.rules)
    if (r.head_size() != 1)
      throw ForestError(ForestError::Kind::not_single_headed, "rule '" + r.name + "' is not single-headed");
}

}  // namespace detail

inline Forest build_forest(const Program& p, const Computation& delta) {
  detail::require_single_headed(p);
  if (!delta.final)
    throw ForestError(ForestError::Kind::non_terminating, "the computation does not end in a final configuration");

  Forest f;
  std::map<int, std::size_t> live;
  std::vector<std::optional<std::size_t>> pending;

  for (const auto& a : delta.initial.store) {
    auto n = f.add({Repetition{a.atom, a.id, 0}, {}, {}, {}, {}, {}});
    f.roots.push_back(n);
    live[a.id] = n;
  }
  for (const auto& item : delta.initial.goal) {
    if (const auto* a = std::get_if<Atom>(&item)) {
      auto n = f.add({Repetition{*a, 0, 0}, {}, {}, {}, {}, {}});
      f.roots.push_back(n);
      pending.emplace_back(n);
    } else {
      pending.emplace_back();
    }
  }
  f.goal_roots = pending;

  for (std::size_t k = 0; k < delta.steps.size(); ++k) {
    const Configuration& before = delta.at(k);
    const Step& step = delta.steps[k];
    const auto& label = step.label;
    switch (label.kind) {
      case StepKind::solve:
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(label.goal_index));
        break;
      case StepKind::introduce: {
        auto n = *pending[label.goal_index];
        f.nodes[n].label->id = before.next_id;
        live[before.next_id] = n;
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(label.goal_index));
        break;
      }
      case StepKind::apply: {
        const Rule* r = p.find_rule(label.rule);
        if (!r) throw ForestError(ForestError::Kind::precondition, "unknown rule '" + label.rule + "'");
        const int id = label.matched_ids().front();
        const std::size_t n = live.at(id);
        f.nodes[n].rewritten_at = k;
        f.nodes[n].rule = r->name;
        f.rewritten_by_step[k] = n;
        bool any_atom = false;
        for (std::size_t j = before.goal.size(); j < step.after.goal.size(); ++j) {
          if (const auto* a = std::get_if<Atom>(&step.after.goal[j])) {
            auto c = f.add({Repetition{*a, 0, 0}, n, {}, {}, {}, {}});
            f.nodes[n].children.push_back(c);
            pending.emplace_back(c);
            any_atom = true;
          } else {
            pending.emplace_back();
          }
        }
        if (r->is_propagation()) {
          Repetition next = *f.nodes[n].label;
          next.superscript++;
          auto c = f.add({next, n, {}, {}, {}, {}});
          f.nodes[n].children.push_back(c);
          f.nodes[n].continuation = c;
          live[id] = c;
        } else {
          live.erase(id);
          if (!any_atom) {
            auto box = f.add({std::nullopt, n, {}, {}, {}, {}});
            f.nodes[n].children.push_back(box);
          }
        }
        break;
      }
    }
  }
  return f;
}

/// Root-to-leaf paths, left to right.
inline std::vector<std::vector<std::size_t>> sc_computations(const Forest& f) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> path;
  auto go = [&](auto&& self, std::size_t n) -> void {
    path.push_back(n);
    if (f.nodes[n].children.empty()) out.push_back(path);
    for (auto c : f.nodes[n].children) self(self, c);
    path.pop_back();
  };
  for (auto r : f.roots) go(go, r);
  return out;
}

/// Injective variable renaming rho with a = b rho, if one exists.
using Renaming = std::map<std::string, std::string>;

inline std::optional<Renaming> r_equal(const Atom& a, const Atom& b) {
  if (a.predicate != b.predicate || a.arity() != b.arity()) return std::nullopt;
  Renaming rho;
  std::map<std::string, std::string> inverse;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    const Term& x = a.args[i];
    const Term& y = b.args[i];
    if (x.kind != y.kind) return std::nullopt;
    if (x.is_const()) {
      if (x != y) return std::nullopt;
      continue;
    }
    auto [it, fresh] = rho.emplace(y.name, x.name);
    if (!fresh && it->second != x.name) return std::nullopt;
    auto [jt, fresh2] = inverse.emplace(x.name, y.name);
    if (!fresh2 && jt->second != y.name) return std::nullopt;
  }
  return rho;
}

inline std::optional<Renaming> r_equal(const Repetition& a, const Repetition& b) { return r_equal(a.atom, b.atom); }

/// Canonical representative of an atom's r-equality class.
inline std::string r_class(const Atom& a) {
  std::map<std::string, std::size_t> seen;
  std::string s = a.predicate + "(";
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (i) s += ',';
    const Term& t = a.args[i];
    if (t.is_var()) {
      auto [it, fresh] = seen.emplace(t.name, seen.size());
      s += "#" + std::to_string(it->second);
    } else {
      s += t.name;
    }
  }
  return s + ")";
}

struct Repetitiveness {
  std::size_t level = 0;   // l: the forest is l-repetitive
  std::size_t degree = 0;  // dg

  auto operator<=>(const Repetitiveness&) const = default;
};

inline Repetitiveness repetitiveness(const Forest& f) {
  Repetitiveness out;
  std::vector<std::pair<std::size_t, std::size_t>> per_path;  // (p, classes achieving p)
  for (const auto& path : sc_computations(f)) {
    std::map<std::string, std::size_t> counts;
    for (auto n : path)
      if (!f.nodes[n].is_box()) counts[r_class(f.nodes[n].label->atom)]++;
    std::size_t p = 0, k = 0;
    for (const auto& [cls, c] : counts) {
      if (c > p) p = c, k = 0;
      if (c == p) ++k;
    }
    per_path.emplace_back(p, k);
    out.level = std::max(out.level, p);
  }
  for (const auto& [p, k] : per_path)
    if (p == out.level && p > 0) out.degree += k;
  return out;
}

// ---------------------------------------------------------------------------
// Reactive sequences

struct ReactiveSequence {
  std::vector<std::pair<ProjectedStore, ProjectedStore>> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }

  std::string text() const {
    if (pairs.empty()) return "ε";
    std::string s;
    for (const auto& [c, d] : pairs) s += "<" + c.text() + " ; " + d.text() + ">";
    return s;
  }

  bool operator==(const ReactiveSequence& o) const { return pairs == o.pairs; }
};

/// Projection to X, removal of non-final stuttering pairs, fusion of
/// connected neighbours.
inline ReactiveSequence eta(const std::vector<std::pair<BuiltinStore, BuiltinStore>>& raw,
                            const std::set<std::string>& X) {
  std::vector<std::pair<ProjectedStore, ProjectedStore>> projected;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    ProjectedStore c = project(raw[i].first, X);
    ProjectedStore d = project(raw[i].second, X);
    if (c == d && i + 1 != raw.size()) continue;
    projected.emplace_back(std::move(c), std::move(d));
  }
  ReactiveSequence out;
  for (auto& pr : projected) {
    if (!out.pairs.empty() && implies(out.pairs.back().second, pr.first))
      out.pairs.back().second = std::move(pr.second);
    else
      out.pairs.push_back(std::move(pr));
  }
  return out;
}

/// The strictly-increasing condition; the last pair may stutter.
inline bool strictly_increasing(const ReactiveSequence& s, const std::set<std::string>& X) {
  for (std::size_t j = 0; j < s.pairs.size(); ++j) {
    for (const auto* ps : {&s.pairs[j].first, &s.pairs[j].second})
      for (const auto& e : ps->equations)
        for (const Term* t : {&e.lhs, &e.rhs})
          if (t->is_var() && !X.count(t->name)) return false;
    if (j + 1 < s.pairs.size()) {
      if (implies(s.pairs[j].second, s.pairs[j + 1].first)) return false;
      if (implies(s.pairs[j].first, s.pairs[j].second)) return false;
    }
  }
  return true;
}

inline bool max_sequence_length_check(const ReactiveSequence& s, const std::set<std::string>& X) {
  return s.size() <= X.size() + 2;
}

/// The pairs (all built-ins before, all built-ins after) of the Apply steps
/// that rewrite node n or any repetition below it, in computation order.
inline std::vector<std::pair<BuiltinStore, BuiltinStore>> raw_pairs(const Computation& delta, const Forest& f,
                                                                    std::size_t n) {
  std::vector<std::size_t> steps;
  for (auto m : f.subtree(n))
    if (f.nodes[m].rewritten_at) steps.push_back(*f.nodes[m].rewritten_at);
  std::sort(steps.begin(), steps.end());
  std::vector<std::pair<BuiltinStore, BuiltinStore>> raw;
  for (auto k : steps) raw.emplace_back(all_builtins(delta.at(k)), all_builtins(delta.at(k + 1)));
  return raw;
}

inline ReactiveSequence node_sequence(const Computation& delta, const Forest& f, std::size_t n) {
  if (f.nodes[n].is_box()) return {};
  return eta(raw_pairs(delta, f, n), vars_of(f.nodes[n].label->atom));
}

inline ProjectedStore rename(const ProjectedStore& s, const Renaming& rho) {
  if (!s.consistent) return s;
  auto ren = [&](const Term& t) {
    if (!t.is_var()) return t;
    auto it = rho.find(t.name);
    return it == rho.end() ? t : Term::var(it->second);
  };
  BuiltinStore b;
  std::set<std::string> vars;
  for (const auto& v : s.variables) vars.insert(rho.count(v) ? rho.at(v) : v);
  for (const auto& e : s.equations) b.add({ren(e.lhs), ren(e.rhs)});
  return project(b, vars);
}

inline ReactiveSequence rename(const ReactiveSequence& s, const Renaming& rho) {
  ReactiveSequence out;
  for (const auto& [c, d] : s.pairs) out.pairs.emplace_back(rename(c, rho), rename(d, rho));
  return out;
}

/// Propagation rules fired on a repetition's identified constraint before it.
inline std::set<std::string> fired_before(const Forest& f, std::size_t n) {
  std::set<std::string> out;
  for (std::size_t cur = n; f.nodes[cur].parent;) {
    std::size_t up = *f.nodes[cur].parent;
    if (f.nodes[up].continuation != cur) break;
    out.insert(f.nodes[up].rule);
    cur = up;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Compression

namespace detail {

inline void compress_preconditions(const Program& p, const Computation& delta, const Forest& f, std::size_t n,
                                   std::size_t n2) {
  using K = ForestError::Kind;
  if (n >= f.nodes.size() || n2 >= f.nodes.size()) throw ForestError(K::precondition, "node out of range");
  if (n == n2) throw ForestError(K::precondition, "the two nodes must be distinct");
  if (f.nodes[n].is_box() || f.nodes[n2].is_box())
    throw ForestError(K::precondition, "both nodes must be labelled by repetitions");
  if (!f.in_subtree(n, n2))
    throw ForestError(K::precondition, "the second node is not in the subtree of the first");
  auto rho = r_equal(*f.nodes[n].label, *f.nodes[n2].label);
  if (!rho) throw ForestError(K::precondition, "the repetitions are not r-equal");
  if (!(node_sequence(delta, f, n) == rename(node_sequence(delta, f, n2), *rho)))
    throw ForestError(K::precondition, "the node sequences differ up to renaming");
  if (delta.semantics == Semantics::theoretical && fired_before(f, n) != fired_before(f, n2))
    throw ForestError(K::precondition, "the repetitions fired different propagation rules");
  (void)p;
}

}  // namespace detail

/// Replaces the rewriting work of node n by that of n2 (which lies below n)
/// and replays the result into a terminating computation for the same goal.
inline Computation compress(const Program& p, const Computation& delta, std::size_t n, std::size_t n2) {
  using K = ForestError::Kind;
  const Forest f = build_forest(p, delta);
  detail::compress_preconditions(p, delta, f, n, n2);

  std::set<std::size_t> dropped;
  for (auto m : f.subtree(n))
    if (!f.in_subtree(n2, m)) dropped.insert(m);
  auto alias = [&](std::size_t x) { return x == n ? n2 : x; };

  Computation out;
  out.semantics = delta.semantics;
  out.initial = delta.initial;
  Configuration cur = out.initial;

  std::vector<std::optional<std::size_t>> pending;
  for (const auto& g : f.goal_roots) pending.push_back(g ? std::optional(alias(*g)) : std::nullopt);
  std::map<int, std::size_t> live;
  for (std::size_t i = 0; i < delta.initial.store.size(); ++i) live[delta.initial.store[i].id] = alias(f.roots[i]);

  auto push = [&](Step s) {
    cur = s.after;
    out.steps.push_back(std::move(s));
  };
  auto drain = [&] {
    while (auto s = normalize_step(cur)) {
      if (s->label.kind == StepKind::solve) {
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(s->label.goal_index));
      } else {
        live[cur.next_id] = *pending[s->label.goal_index];
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(s->label.goal_index));
      }
      push(std::move(*s));
    }
  };

  for (const auto& [k, x] : f.rewritten_by_step) {
    if (dropped.count(x)) continue;
    drain();
    if (cur.failed()) break;
    const std::string& rule = f.nodes[x].rule;
    auto owner = std::find_if(live.begin(), live.end(), [&](const auto& e) { return e.second == x; });
    if (owner == live.end())
      throw ForestError(K::replay_failed, "repetition " + f.label_text(x) + " is not live in the compressed run");
    const int id = owner->first;
    auto succ = apply_successors(p, cur, out.semantics);
    auto it = std::find_if(succ.begin(), succ.end(),
                           [&](const Step& s) { return s.label.rule == rule && s.label.matched_ids().front() == id; });
    if (it == succ.end())
      throw ForestError(K::replay_failed, "rule '" + rule + "' does not apply to " + f.label_text(x));

    const std::size_t goal_before = cur.goal.size();
    Step s = std::move(*it);
    std::vector<std::size_t> body_children;
    for (auto c : f.nodes[x].children)
      if (c != f.nodes[x].continuation && !f.nodes[c].is_box()) body_children.push_back(alias(c));
    std::size_t next_child = 0;
    for (std::size_t j = goal_before; j < s.after.goal.size(); ++j) {
      if (std::holds_alternative<Atom>(s.after.goal[j]))
        pending.emplace_back(body_children.at(next_child++));
      else
        pending.emplace_back();
    }
    if (f.nodes[x].continuation)
      live[id] = alias(*f.nodes[x].continuation);
    else
      live.erase(id);
    push(std::move(s));
  }
  drain();
  out.final = is_final(p, cur, out.semantics);
  if (!out.final) throw ForestError(K::replay_failed, "the compressed run does not end in a final configuration");
  return out;
}

}  // namespace chrc
