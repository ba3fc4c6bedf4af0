#pragma once

// Decision procedures.
//
// Divergence (range-restricted programs, abstract semantics): depth-first
// construction of the finite reachability tree over normalized macro-steps.
// A node is cut as soon as one of its ancestors is below it in the
// quasi-order; such a node witnesses an infinite computation.
//
// Termination existence (single-headed programs): iterative deepening over
// macro-step derivations. At level m a derivation is abandoned as soon as a
// root-to-node path of its forest holds more than m pairwise r-equal
// repetitions. Levels up to the bound L are complete.

#include <algorithm>
#include <atomic>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "chrc/engine.hpp"
#include "chrc/forest.hpp"
#include "chrc/syntax.hpp"
#include "chrc/wqo.hpp"

namespace chrc {

using BigInt = boost::multiprecision::cpp_int;

class DecideError : public std::runtime_error {
 public:
  enum class Kind { not_range_restricted, not_single_headed };

  DecideError(Kind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct BoundParameters {
  std::size_t u = 0;  // distinct constants
  std::size_t w = 0;  // maximal CHR arity
  std::size_t r = 0;  // propagation rules
};

inline BoundParameters bound_parameters(const Program& p, const Goal& g) {
  SymbolTable t = link(p, g);
  BoundParameters b;
  b.u = t.constants.size();
  for (const auto& [pred, arity] : t.predicates) b.w = std::max(b.w, arity);
  b.r = static_cast<std::size_t>(std::count_if(p.rules.begin(), p.rules.end(),
                                               [](const Rule& r) { return r.is_propagation(); }));
  return b;
}

/// Sum over k = 0..w+2 of (2^(w(u+w)))^k, i.e. (2^(w(u+w)(w+3)) - 1) / (2^(w(u+w)) - 1),
/// which is w+3 = 3 when w = 0.
inline BigInt bound_L(std::size_t u, std::size_t w) {
  const BigInt ratio = BigInt(1) << (w * (u + w));
  BigInt term = 1, sum = 0;
  for (std::size_t k = 0; k <= w + 2; ++k) {
    sum += term;
    term *= ratio;
  }
  return sum;
}

inline BigInt effective_cap(const BoundParameters& b, Semantics sem) {
  BigInt L = bound_L(b.u, b.w);
  return sem == Semantics::theoretical ? (BigInt(1) << b.r) * L : L;
}

inline BigInt effective_cap(const Program& p, const Goal& g, Semantics sem) {
  return effective_cap(bound_parameters(p, g), sem);
}

// ---------------------------------------------------------------------------
// Divergence

struct DivergenceVerdict {
  enum class Result { divergent, all_finite };
  Result result = Result::all_finite;
  /// For divergent: the path from the initial configuration; `ancestor` and
  /// `descendant` are positions in it (see Computation::at).
  std::optional<Computation> witness;
  std::size_t ancestor = 0;
  std::size_t descendant = 0;
  std::size_t nodes_expanded = 0;
};

inline const char* to_string(DivergenceVerdict::Result r) {
  return r == DivergenceVerdict::Result::divergent ? "Divergent" : "AllFinite";
}

namespace detail {

inline std::string divergence_key(const Configuration& c) {
  std::vector<std::string> atoms;
  for (const auto& a : c.store) atoms.push_back(to_string(a.atom));
  std::sort(atoms.begin(), atoms.end());
  std::string k = c.builtin.text() + "|";
  for (const auto& a : atoms) k += a + ";";
  return k;
}

class DivergenceSearch {
 public:
  DivergenceSearch(const Program& p, const std::atomic<std::size_t>* stop_below, std::size_t branch)
      : p_(p), stop_below_(stop_below), branch_(branch) {}

  // `path` holds the normalized configurations from the root, `positions`
  // their positions in `steps` terms (Computation::at indices).
  bool dfs(std::vector<Configuration>& path, std::vector<std::size_t>& positions, std::vector<Step>& steps) {
    if (stop_below_ && stop_below_->load() < branch_) return false;
    const Configuration& cur = path.back();
    const std::string key = divergence_key(cur);
    if (safe_.count(key)) return false;
    ++expanded_;
    for (auto& m : macro_successors(p_, cur, Semantics::abstract)) {
      const std::size_t mark = steps.size();
      for (auto& s : m.steps) steps.push_back(std::move(s));
      const Configuration& t = steps.back().after;
      for (std::size_t i = 0; i < path.size(); ++i) {
        if (leq(path[i], t)) {
          ancestor_ = positions[i];
          descendant_ = steps.size();
          return true;
        }
      }
      path.push_back(t);
      positions.push_back(steps.size());
      if (dfs(path, positions, steps)) return true;
      path.pop_back();
      positions.pop_back();
      steps.resize(mark);
    }
    safe_.insert(key);
    return false;
  }

  std::size_t ancestor_ = 0, descendant_ = 0, expanded_ = 0;

 private:
  const Program& p_;
  std::set<std::string> safe_;
  const std::atomic<std::size_t>* stop_below_;
  std::size_t branch_;
};

// Runs `task(i)` for i in [0, n) on up to `threads` workers.
template <class Task>
void for_each_parallel(std::size_t n, unsigned threads, Task task) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(threads, n); ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) task(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

inline DivergenceVerdict decide_divergence(const Program& p, const Goal& g, unsigned threads = 1) {
  if (!classify(p).range_restricted)
    throw DecideError(DecideError::Kind::not_range_restricted, "divergence analysis requires a range-restricted program");

  DivergenceVerdict v;
  Computation comp;
  comp.semantics = Semantics::abstract;
  comp.initial = initial_configuration(g);
  Configuration root = normalize(comp.initial, &comp.steps);
  const std::size_t root_pos = comp.steps.size();

  if (threads <= 1) {
    detail::DivergenceSearch search(p, nullptr, 0);
    std::vector<Configuration> path{root};
    std::vector<std::size_t> positions{root_pos};
    std::vector<Step> steps = comp.steps;
    const bool found = search.dfs(path, positions, steps);
    v.nodes_expanded = search.expanded_;
    if (found) {
      comp.steps = std::move(steps);
      comp.final = false;
      v.result = DivergenceVerdict::Result::divergent;
      v.ancestor = search.ancestor_;
      v.descendant = search.descendant_;
      v.witness = std::move(comp);
    }
    return v;
  }

  // Split on the root's macro-successors; the lowest successful branch wins.
  auto branches = macro_successors(p, root, Semantics::abstract);
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  std::atomic<std::size_t> best{none};
  struct Outcome {
    bool found = false;
    std::vector<Step> steps;
    std::size_t ancestor = 0, descendant = 0, expanded = 0;
  };
  std::vector<Outcome> outcomes(branches.size());
  detail::for_each_parallel(branches.size(), threads, [&](std::size_t i) {
    if (best.load() < i) return;
    Outcome& o = outcomes[i];
    o.steps = comp.steps;
    for (const auto& s : branches[i].steps) o.steps.push_back(s);
    const Configuration& t = o.steps.back().after;
    if (leq(root, t)) {
      o.found = true;
      o.ancestor = root_pos;
      o.descendant = o.steps.size();
    } else {
      detail::DivergenceSearch search(p, &best, i);
      std::vector<Configuration> path{root, t};
      std::vector<std::size_t> positions{root_pos, o.steps.size()};
      o.found = search.dfs(path, positions, o.steps);
      o.ancestor = search.ancestor_;
      o.descendant = search.descendant_;
      o.expanded = search.expanded_;
    }
    if (o.found) {
      std::size_t cur = best.load();
      while (i < cur && !best.compare_exchange_weak(cur, i)) {
      }
    }
  });
  v.nodes_expanded = 1;
  for (const auto& o : outcomes) v.nodes_expanded += o.expanded;
  if (best.load() != none) {
    Outcome& o = outcomes[best.load()];
    comp.steps = std::move(o.steps);
    v.result = DivergenceVerdict::Result::divergent;
    v.ancestor = o.ancestor;
    v.descendant = o.descendant;
    v.witness = std::move(comp);
  }
  return v;
}

/// Independent check of a divergence witness.
inline bool check_divergence_witness(const Program& p, const DivergenceVerdict& v) {
  if (v.result != DivergenceVerdict::Result::divergent) return true;
  if (!v.witness || !replays(p, *v.witness)) return false;
  if (v.ancestor >= v.descendant || v.descendant > v.witness->steps.size()) return false;
  return leq(v.witness->at(v.ancestor), v.witness->at(v.descendant));
}

// ---------------------------------------------------------------------------
// Termination existence

struct TerminationOptions {
  std::optional<BigInt> cap;  // default: min(effective cap, 64)
  bool complete = false;      // search up to the full bound
  bool minimize = true;       // compress the witness
  unsigned threads = 1;
};

struct TerminationVerdict {
  enum class Result { terminating, no_terminating, exhausted_at_cap };
  Result result = Result::exhausted_at_cap;
  std::optional<Computation> witness;
  BigInt cap_used = 0;
  BigInt complete_bound = 0;
  bool complete = false;
  std::size_t level = 0;  // deepening level that produced the verdict
  std::size_t compressions = 0;
};

inline const char* to_string(TerminationVerdict::Result r) {
  switch (r) {
    case TerminationVerdict::Result::terminating: return "Terminating";
    case TerminationVerdict::Result::no_terminating: return "NoTerminating";
    default: return "ExhaustedAtCap";
  }
}

namespace detail {

// Path statistics of a live repetition: occurrences per prune class on the
// path from its root, and (theoretical semantics) the propagation rules
// already fired on its identified constraint.
struct Lineage {
  std::map<std::string, std::size_t> counts;
  std::set<std::string> fired;
};

struct SearchNode {
  Configuration config;
  std::map<int, Lineage> lineage;
};

class TerminationSearch {
 public:
  TerminationSearch(const Program& p, Semantics sem, std::size_t level,
                    const std::atomic<std::size_t>* stop_below = nullptr, std::size_t branch = 0)
      : p_(p), sem_(sem), level_(level), stop_below_(stop_below), branch_(branch) {}

  std::string prune_class(const Atom& a, const std::set<std::string>& fired) const {
    std::string k = r_class(a);
    if (sem_ == Semantics::theoretical) {
      k += "|";
      for (const auto& r : fired) k += r + ",";
    }
    return k;
  }

  // Adds one repetition to a lineage; false when the level is exceeded.
  bool extend(Lineage& l, const Atom& a) {
    std::size_t& c = l.counts[prune_class(a, l.fired)];
    if (++c > level_) {
      pruned_ = true;
      return false;
    }
    return true;
  }

  /// Roots for the initial configuration, which must be normalized.
  std::optional<SearchNode> root(const Configuration& c) {
    SearchNode n{c, {}};
    for (const auto& a : c.store) {
      Lineage l;
      if (!extend(l, a.atom)) return std::nullopt;
      n.lineage.emplace(a.id, std::move(l));
    }
    return n;
  }

  // Apply successors with the steps that shrink the store first; stable
  // within equal growth so the canonical order breaks ties.
  std::vector<Step> ordered_successors(const Configuration& c) const {
    auto applies = apply_successors(p_, c, sem_);
    auto growth = [&](const Step& s) {
      const Rule& r = *p_.find_rule(s.label.rule);
      long n = -static_cast<long>(r.removed.size());
      for (const auto& item : r.body) n += std::holds_alternative<Atom>(item) ? 1 : 0;
      return n;
    };
    std::stable_sort(applies.begin(), applies.end(),
                     [&](const Step& a, const Step& b) { return growth(a) < growth(b); });
    return applies;
  }

  bool dfs(const SearchNode& node, std::vector<Step>& steps) {
    if (stop_below_ && stop_below_->load() < branch_) return false;
    if (node.config.failed()) return true;
    auto applies = ordered_successors(node.config);
    if (applies.empty()) return true;
    const std::string key = memo_key(node);
    if (dead_.count(key)) return false;
    for (auto& s : applies) {
      auto child = expand(node, s);
      if (!child) continue;
      const std::size_t mark = steps.size();
      steps.push_back(std::move(s));
      child->config = normalize(steps.back().after, &steps);
      if (dfs(*child, steps)) return true;
      steps.resize(mark);
    }
    dead_.insert(key);
    return false;
  }

  // Lineages after an Apply step (before normalization fills in the store).
  std::optional<SearchNode> expand(const SearchNode& node, const Step& s) {
    const Rule& r = *p_.find_rule(s.label.rule);
    const int id = s.label.matched_ids().front();
    const Lineage& parent = node.lineage.at(id);
    SearchNode child{{}, node.lineage};
    int next = node.config.next_id;
    for (std::size_t j = node.config.goal.size(); j < s.after.goal.size(); ++j) {
      const auto* a = std::get_if<Atom>(&s.after.goal[j]);
      if (!a) continue;
      Lineage l{parent.counts, {}};
      if (!extend(l, *a)) return std::nullopt;
      child.lineage[next++] = std::move(l);
    }
    if (r.is_propagation()) {
      Lineage l = parent;
      l.fired.insert(r.name);
      if (!extend(l, node.config.find(id)->atom)) return std::nullopt;
      child.lineage[id] = std::move(l);
    } else {
      child.lineage.erase(id);
    }
    return child;
  }

  bool pruned() const { return pruned_; }

 private:
  std::string memo_key(const SearchNode& n) const {
    std::vector<std::string> parts;
    for (const auto& a : n.config.store) {
      const Lineage& l = n.lineage.at(a.id);
      std::string s = to_string(a.atom) + "{";
      for (const auto& [cls, c] : l.counts) s += cls + ":" + std::to_string(c) + ";";
      s += "}[";
      for (const auto& r : l.fired) s += r + ",";
      parts.push_back(s + "]");
    }
    std::sort(parts.begin(), parts.end());
    std::string k = n.config.builtin.text() + "|";
    for (const auto& p : parts) k += p;
    return k;
  }

  const Program& p_;
  Semantics sem_;
  std::size_t level_;
  bool pruned_ = false;
  std::set<std::string> dead_;
  const std::atomic<std::size_t>* stop_below_;
  std::size_t branch_;
};

struct LevelOutcome {
  std::optional<Computation> witness;
  bool pruned = false;
};

inline LevelOutcome search_level(const Program& p, const Goal& g, Semantics sem, std::size_t level,
                                 unsigned threads) {
  LevelOutcome out;
  Computation comp;
  comp.semantics = sem;
  comp.initial = initial_configuration(g);
  Configuration start = normalize(comp.initial, &comp.steps);

  TerminationSearch search(p, sem, level);
  auto root = search.root(start);
  if (!root) {
    out.pruned = true;
    return out;
  }
  if (threads <= 1) {
    std::vector<Step> steps = comp.steps;
    if (search.dfs(*root, steps)) {
      comp.steps = std::move(steps);
      comp.final = true;
      out.witness = std::move(comp);
    }
    out.pruned = search.pruned();
    return out;
  }

  if (is_final(p, start, sem)) {
    comp.final = true;
    out.witness = std::move(comp);
    return out;
  }
  auto branches = search.ordered_successors(start);
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  std::atomic<std::size_t> best{none};
  std::vector<std::optional<std::vector<Step>>> found(branches.size());
  std::vector<char> pruned(branches.size(), 0);
  for_each_parallel(branches.size(), threads, [&](std::size_t i) {
    if (best.load() < i) return;
    TerminationSearch local(p, sem, level, &best, i);
    auto child = local.expand(*root, branches[i]);
    if (!child) {
      pruned[i] = 1;
      return;
    }
    std::vector<Step> steps = comp.steps;
    steps.push_back(branches[i]);
    child->config = normalize(steps.back().after, &steps);
    if (local.dfs(*child, steps)) {
      found[i] = std::move(steps);
      std::size_t cur = best.load();
      while (i < cur && !best.compare_exchange_weak(cur, i)) {
      }
    }
    pruned[i] = local.pruned();
  });
  out.pruned = std::any_of(pruned.begin(), pruned.end(), [](char c) { return c != 0; });
  if (best.load() != none) {
    comp.steps = std::move(*found[best.load()]);
    comp.final = true;
    out.witness = std::move(comp);
  }
  return out;
}

// Repeatedly compresses r-equal repetitions with equal sequences while the
// forest's (repetitiveness, degree) decreases.
inline std::size_t minimize_witness(const Program& p, Computation& w, std::size_t max_rounds = 32) {
  std::size_t rounds = 0;
  for (; rounds < max_rounds; ++rounds) {
    const Forest f = build_forest(p, w);
    const Repetitiveness before = repetitiveness(f);
    bool improved = false;
    for (const auto& path : sc_computations(f)) {
      for (std::size_t i = 0; i < path.size() && !improved; ++i) {
        for (std::size_t j = i + 1; j < path.size() && !improved; ++j) {
          const auto& a = f.nodes[path[i]];
          const auto& b = f.nodes[path[j]];
          if (a.is_box() || b.is_box() || !r_equal(*a.label, *b.label)) continue;
          try {
            Computation c = compress(p, w, path[i], path[j]);
            if (repetitiveness(build_forest(p, c)) < before && replays(p, c)) {
              w = std::move(c);
              improved = true;
            }
          } catch (const ForestError&) {
          }
        }
      }
      if (improved) break;
    }
    if (!improved) break;
  }
  return rounds;
}

}  // namespace detail

/// Search at a single deepening level; exposed for testing monotonicity.
inline std::optional<Computation> search_termination_at_level(const Program& p, const Goal& g, Semantics sem,
                                                              std::size_t level) {
  return detail::search_level(p, g, sem, level, 1).witness;
}

inline TerminationVerdict decide_termination_existence(const Program& p, const Goal& g, Semantics sem,
                                                       const TerminationOptions& opt = {}) {
  if (!classify(p).single_headed)
    throw DecideError(DecideError::Kind::not_single_headed, "termination analysis requires a single-headed program");

  TerminationVerdict v;
  v.complete_bound = effective_cap(p, g, sem);
  BigInt cap = opt.complete ? v.complete_bound : opt.cap.value_or(std::min<BigInt>(v.complete_bound, 64));
  if (cap < 1) cap = 1;
  const std::size_t max_level =
      cap > std::numeric_limits<std::size_t>::max() / 2 ? std::numeric_limits<std::size_t>::max() / 2
                                                       : static_cast<std::size_t>(cap);

  // levels 1, 2, 4, ... and finally the cap itself
  for (std::size_t level = 1;; level = std::min(level * 2, max_level)) {
    auto outcome = detail::search_level(p, g, sem, level, opt.threads);
    v.level = level;
    v.cap_used = level;
    if (outcome.witness) {
      v.result = TerminationVerdict::Result::terminating;
      v.complete = true;
      if (opt.minimize) v.compressions = detail::minimize_witness(p, *outcome.witness);
      v.witness = std::move(outcome.witness);
      return v;
    }
    if (!outcome.pruned || BigInt(level) >= v.complete_bound) {
      v.result = TerminationVerdict::Result::no_terminating;
      v.complete = true;
      return v;
    }
    if (level >= max_level) break;
  }
  v.result = TerminationVerdict::Result::exhausted_at_cap;
  v.complete = false;
  return v;
}

/// Independent check of a termination witness.
inline bool check_termination_witness(const Program& p, const TerminationVerdict& v) {
  if (v.result != TerminationVerdict::Result::terminating) return true;
  return v.witness && v.witness->final && replays(p, *v.witness) &&
         is_final(p, v.witness->last(), v.witness->semantics);
}

}  // namespace chrc
