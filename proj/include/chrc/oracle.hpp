#pragma once

// Brute-force reference procedures used to cross-check the deciders.
// Nothing here relies on the quasi-order, forests or pruning.

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "chrc/engine.hpp"
#include "chrc/store.hpp"

namespace chrc::oracle {

struct ExplorationReport {
  std::size_t states_visited = 0;
  bool terminating_found = false;
  bool cycle_found = false;
  bool truncated = false;
  std::size_t max_depth_reached = 0;
};

/// State identity with identifiers renumbered. Under the theoretical
/// semantics tokens mentioning removed constraints are dropped (identifiers
/// are never reused, so they can not block anything again) and the
/// remaining tokens are renamed along with the store.
inline std::string state_key(const Configuration& c) {
  std::map<int, std::string> text;
  for (const auto& a : c.store) text[a.id] = to_string(a.atom);
  std::vector<const PropagationToken*> tokens;
  std::map<int, std::vector<const PropagationToken*>> by_id;
  for (const auto& t : c.history) {
    if (!std::all_of(t.ids.begin(), t.ids.end(), [&](int i) { return text.count(i) > 0; })) continue;
    tokens.push_back(&t);
    for (int i : t.ids) by_id[i].push_back(&t);
  }

  std::vector<std::pair<std::string, int>> order;
  for (const auto& a : c.store) {
    std::vector<std::string> sig;
    if (auto it = by_id.find(a.id); it != by_id.end())
      for (const auto* t : it->second) {
        std::string s = t->rule + "(";
        for (int i : t->ids) s += (i == a.id ? std::string("*") : text[i]) + ",";
        sig.push_back(s + ")");
      }
    std::sort(sig.begin(), sig.end());
    std::string key = text[a.id] + "[";
    for (const auto& s : sig) key += s + ";";
    order.emplace_back(key + "]", a.id);
  }
  std::sort(order.begin(), order.end());
  std::map<int, int> renumber;
  std::string out = c.builtin.text() + "|";
  for (std::size_t i = 0; i < order.size(); ++i) {
    renumber[order[i].second] = static_cast<int>(i);
    out += order[i].first + ";";
  }
  std::vector<std::string> goal;
  for (const auto& g : c.goal) goal.push_back(to_string(g));
  std::sort(goal.begin(), goal.end());
  out += "|";
  for (const auto& g : goal) out += g + ";";
  std::vector<std::string> hist;
  for (const auto* t : tokens) {
    std::string s = t->rule;
    for (int i : t->ids) s += "," + std::to_string(renumber[i]);
    hist.push_back(s);
  }
  std::sort(hist.begin(), hist.end());
  out += "|";
  for (const auto& h : hist) out += h + ";";
  return out;
}

/// Breadth-first exploration of normalized configurations under
/// Apply-then-normalize steps. Cycle detection runs on the explored graph.
/// States beyond any of the limits are not explored and mark the report
/// as truncated.
inline ExplorationReport explore(const Program& p, const Goal& g, Semantics sem, std::size_t max_states,
                                 std::size_t max_depth,
                                 std::size_t max_store = std::numeric_limits<std::size_t>::max()) {
  ExplorationReport rep;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<std::size_t>> edges;
  std::deque<std::pair<Configuration, std::size_t>> queue;  // (state, depth)
  std::vector<Configuration> states;

  auto intern = [&](const Configuration& c, std::size_t depth) -> std::optional<std::size_t> {
    const std::string k = state_key(c);
    if (auto it = index.find(k); it != index.end()) return it->second;
    if (states.size() >= max_states || c.store.size() > max_store) {
      rep.truncated = true;
      return std::nullopt;
    }
    index.emplace(k, states.size());
    states.push_back(c);
    edges.emplace_back();
    queue.emplace_back(c, depth);
    return states.size() - 1;
  };

  intern(normalize(initial_configuration(g)), 0);
  while (!queue.empty()) {
    auto [c, depth] = std::move(queue.front());
    queue.pop_front();
    const std::size_t self = index.at(state_key(c));
    rep.max_depth_reached = std::max(rep.max_depth_reached, depth);
    if (c.failed()) {
      rep.terminating_found = true;
      continue;
    }
    auto next = successors(p, c, sem);  // goal is empty: Apply steps only
    if (next.empty()) {
      rep.terminating_found = true;
      continue;
    }
    if (depth >= max_depth) {
      rep.truncated = true;
      continue;
    }
    for (const auto& s : next) {
      Configuration n = s.after;
      while (!n.goal.empty() && !n.failed()) {
        // built-ins first, then constraints in goal order
        auto it = std::find_if(n.goal.begin(), n.goal.end(),
                               [](const Item& i) { return std::holds_alternative<Equation>(i); });
        if (it != n.goal.end()) {
          n.builtin.add(std::get<Equation>(*it));
          n.goal.erase(it);
        } else {
          n.store.push_back({std::get<Atom>(n.goal.front()), n.next_id++});
          n.goal.erase(n.goal.begin());
        }
      }
      if (auto to = intern(n, depth + 1)) edges[self].push_back(*to);
    }
  }
  rep.states_visited = states.size();

  // iterative three-colour DFS for a back edge
  std::vector<int> colour(states.size(), 0);
  for (std::size_t s = 0; s < states.size() && !rep.cycle_found; ++s) {
    if (colour[s]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
    colour[s] = 1;
    while (!stack.empty() && !rep.cycle_found) {
      auto& [v, i] = stack.back();
      if (i < edges[v].size()) {
        std::size_t w = edges[v][i++];
        if (colour[w] == 1) rep.cycle_found = true;
        else if (colour[w] == 0) {
          colour[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        colour[v] = 2;
        stack.pop_back();
      }
    }
  }
  return rep;
}

class ScaleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All consistent stores over `vars` and `consts`, one per equivalence class.
inline std::vector<ProjectedStore> all_stores(const std::vector<std::string>& vars,
                                              const std::vector<std::string>& consts) {
  std::vector<Term> targets;
  for (const auto& c : consts) targets.push_back(Term::constant(c));
  for (const auto& v : vars) targets.push_back(Term::var(v));
  std::map<std::string, ProjectedStore> seen;
  std::set<std::string> keep(vars.begin(), vars.end());
  // every map var -> (itself | another var | constant) generates a store
  std::vector<std::size_t> choice(vars.size(), 0);
  const std::size_t options = targets.size() + 1;
  for (;;) {
    BuiltinStore b;
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (choice[i] > 0) b.add({Term::var(vars[i]), targets[choice[i] - 1]});
    if (b.consistent()) {
      ProjectedStore ps = project(b, keep);
      seen.emplace(ps.text(), ps);
    }
    std::size_t k = 0;
    while (k < choice.size() && ++choice[k] == options) choice[k++] = 0;
    if (k == choice.size()) break;
  }
  std::vector<ProjectedStore> out;
  for (auto& [t, s] : seen) out.push_back(std::move(s));
  return out;
}

/// Number of strictly increasing reactive sequences (up to logical
/// equivalence) over w variables and u constants, counting the empty one.
inline std::size_t enumerate_strictly_increasing(std::size_t u, std::size_t w) {
  if (u > 2 || w > 1) throw ScaleError("enumeration is limited to u <= 2 constants and w <= 1 variables");
  std::vector<std::string> vars, consts;
  for (std::size_t i = 0; i < w; ++i) vars.push_back("X" + std::to_string(i));
  for (std::size_t i = 0; i < u; ++i) consts.push_back("c" + std::to_string(i));
  const auto stores = all_stores(vars, consts);
  const std::size_t n = stores.size();
  // strictly[i][j]: stores[j] is strictly stronger than stores[i]
  std::vector<std::vector<bool>> weaker(n, std::vector<bool>(n)), stronger(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const BuiltinStore a = stores[i].store(), b = stores[j].store();
      weaker[i][j] = b.implies(a);  // stores[j] entails stores[i]
      stronger[i][j] = weaker[i][j] && !a.implies(b);
    }

  std::set<std::string> found{""};
  std::vector<std::pair<std::size_t, std::size_t>> seq;
  auto text = [&] {
    std::string s;
    for (auto [c, d] : seq) s += "<" + stores[c].text() + ";" + stores[d].text() + ">";
    return s;
  };
  // extend with a non-stuttering pair (may continue) or a stuttering pair (must stop)
  auto go = [&](auto&& self) -> void {
    for (std::size_t c = 0; c < n; ++c) {
      if (!seq.empty() && !stronger[seq.back().second][c]) continue;
      for (std::size_t d = 0; d < n; ++d) {
        if (!weaker[c][d]) continue;
        seq.emplace_back(c, d);
        found.insert(text());
        if (c != d) self(self);
        seq.pop_back();
      }
    }
  };
  go(go);
  return found.size();
}

}  // namespace chrc::oracle
