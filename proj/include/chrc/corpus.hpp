#pragma once

// Seeded generator of small random programs and goals, and the
// differential check of both deciders against the oracle.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chrc/decide.hpp"
#include "chrc/oracle.hpp"
#include "chrc/syntax.hpp"

namespace chrc::corpus {

struct Shape {
  std::size_t max_rules = 3;
  std::size_t predicates = 3;
  std::size_t max_arity = 1;
  std::size_t constants = 2;
  std::size_t variables = 0;  // rule variable pool; 0 gives ground programs
  std::size_t goal_variables = 0;
  std::size_t max_goal = 3;
  std::size_t max_body = 2;
  bool single_headed = true;
  bool range_restricted = true;
  bool equations = true;
  bool propagation = true;
};

struct Instance {
  std::string program_text;
  std::string goal_text;
  Program program;
  Goal goal;
};

namespace detail {

class Builder {
 public:
  Builder(const Shape& s, std::mt19937_64& rng) : s_(s), rng_(rng) {
    for (std::size_t i = 0; i < s.predicates; ++i) arity_.push_back(pick(0, s.max_arity));
  }

  Instance build() {
    Instance in;
    const std::size_t rules = pick(1, s_.max_rules);
    for (std::size_t i = 0; i < rules; ++i) in.program_text += rule(i + 1) + "\n";
    in.goal_text = goal();
    in.program = parse_program(in.program_text);
    in.goal = parse_goal(in.goal_text, &in.program);
    return in;
  }

 private:
  std::size_t pick(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::string constant() { return std::string(1, static_cast<char>('a' + pick(0, s_.constants - 1))); }

  std::string term(const std::vector<std::string>& vars) {
    if (s_.constants == 0 || (!vars.empty() && chance(0.6))) return vars[pick(0, vars.size() - 1)];
    return constant();
  }

  std::string atom(std::size_t pred, const std::vector<std::string>& vars) {
    std::string s(1, static_cast<char>('p' + pred));
    if (arity_[pred] == 0) return s;
    s += "(";
    for (std::size_t i = 0; i < arity_[pred]; ++i) s += (i ? "," : "") + term(vars);
    return s + ")";
  }

  std::string random_atom(const std::vector<std::string>& vars) { return atom(pick(0, s_.predicates - 1), vars); }

  std::string equation(const std::vector<std::string>& vars) {
    std::string l = term(vars), r = term(vars);
    return l + " = " + r;
  }

  std::vector<std::string> var_pool(const char* prefix, std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(std::string(prefix) + std::to_string(i));
    return v;
  }

  std::string rule(std::size_t index) {
    const auto pool = var_pool("X", s_.variables);
    const std::size_t heads = s_.single_headed ? 1 : pick(1, 2);
    std::vector<std::string> head_atoms;
    for (std::size_t i = 0; i < heads; ++i) head_atoms.push_back(random_atom(pool));
    // variables that actually occur in the head
    std::vector<std::string> head_vars;
    for (const auto& v : pool)
      for (const auto& h : head_atoms)
        if (h.find(v) != std::string::npos) {
          head_vars.push_back(v);
          break;
        }
    std::vector<std::string> body_vars = head_vars;
    if (!s_.range_restricted && s_.variables > 0) body_vars.push_back("Z");
    if (s_.constants == 0 && body_vars.empty()) body_vars.push_back("Z");

    std::string text = "r" + std::to_string(index) + " @ ";
    const std::size_t kind = pick(0, s_.propagation ? (heads > 1 ? 2 : 1) : 0);
    auto joined = [&](std::size_t from, std::size_t to) {
      std::string s;
      for (std::size_t i = from; i < to; ++i) s += (i > from ? ", " : "") + head_atoms[i];
      return s;
    };
    std::string arrow = " <=> ";
    if (kind == 1) arrow = " ==> ";
    if (kind == 2) text += joined(0, 1) + " \\ " + joined(1, heads);
    else text += joined(0, heads);
    text += arrow;

    const bool equations_ok = s_.equations && !(head_vars.empty() && s_.constants == 0);
    if (equations_ok && chance(0.25) && (!head_vars.empty() || s_.constants > 0))
      text += equation(head_vars.empty() && s_.range_restricted ? std::vector<std::string>{} : head_vars) + " | ";

    std::vector<std::string> body;
    const std::size_t items = pick(0, s_.max_body);
    for (std::size_t i = 0; i < items; ++i) {
      if (equations_ok && chance(0.3)) {
        auto vars = s_.range_restricted ? head_vars : body_vars;
        if (vars.empty() && s_.constants == 0) continue;
        body.push_back(equation(vars));
      } else {
        body.push_back(random_atom(s_.range_restricted ? head_vars : body_vars));
      }
    }
    if (body.empty()) text += "true";
    for (std::size_t i = 0; i < body.size(); ++i) text += (i ? ", " : "") + body[i];
    return text + ".";
  }

  std::string goal() {
    const auto pool = var_pool("G", s_.goal_variables);
    std::string g;
    const std::size_t n = pick(1, s_.max_goal);
    for (std::size_t i = 0; i < n; ++i) g += (i ? ", " : "") + random_atom(pool);
    return g;
  }

  const Shape& s_;
  std::mt19937_64& rng_;
  std::vector<std::size_t> arity_;
};

}  // namespace detail

inline Instance random_instance(const Shape& shape, std::mt19937_64& rng) {
  return detail::Builder(shape, rng).build();
}

/// Ground range-restricted multi-headed programs for the divergence check.
inline Shape divergence_shape() {
  Shape s;
  s.single_headed = false;
  s.variables = 0;
  s.constants = 2;
  s.max_rules = 3;
  s.max_goal = 3;
  return s;
}

/// Single-headed programs whose complete bound is small: arity 0 (with
/// equations over fresh variables) or ground over one constant. Under the
/// theoretical semantics the exhaustive search is polynomial in the bound
/// with one dimension per lineage and fired set, so goals are single atoms.
inline Shape termination_shape(bool propositional, Semantics sem = Semantics::abstract) {
  Shape s;
  s.single_headed = true;
  s.max_rules = sem == Semantics::theoretical ? 2 : 3;
  s.max_goal = sem == Semantics::theoretical ? 1 : 2;
  if (propositional) {
    s.max_arity = 0;
    s.constants = 1;
    s.variables = 0;
    s.range_restricted = false;
  } else {
    s.max_arity = 1;
    s.constants = 1;
    s.variables = 0;
  }
  return s;
}

struct Comparison {
  bool comparable = false;  // the oracle result is exact, or conclusive on its own
  bool agree = true;
  std::string detail;
};

inline Comparison compare_divergence(const Instance& in, std::size_t max_store = 3) {
  Comparison c;
  auto rep = oracle::explore(in.program, in.goal, Semantics::abstract, 5000, 100, max_store);
  if (rep.truncated && !rep.cycle_found) return c;
  auto v = decide_divergence(in.program, in.goal);
  c.comparable = true;
  const bool divergent = v.result == DivergenceVerdict::Result::divergent;
  c.agree = divergent == rep.cycle_found && check_divergence_witness(in.program, v);
  if (!c.agree) c.detail = std::string("decider says ") + to_string(v.result) + ", oracle cycle_found=" +
                           (rep.cycle_found ? "true" : "false");
  return c;
}

inline Comparison compare_termination(const Instance& in, Semantics sem, std::size_t max_store = 6) {
  Comparison c;
  auto rep = oracle::explore(in.program, in.goal, sem, 5000, 100, max_store);
  if (rep.truncated && !rep.terminating_found) return c;
  TerminationOptions opt;
  opt.complete = true;
  auto v = decide_termination_existence(in.program, in.goal, sem, opt);
  c.comparable = true;
  const bool term = v.result == TerminationVerdict::Result::terminating;
  const bool none = v.result == TerminationVerdict::Result::no_terminating && v.complete;
  c.agree = (rep.terminating_found ? term : none) && check_termination_witness(in.program, v);
  if (!c.agree)
    c.detail = std::string("decider says ") + to_string(v.result) + ", oracle terminating_found=" +
               (rep.terminating_found ? "true" : "false");
  return c;
}

struct Report {
  std::uint64_t seed = 0;
  std::size_t generated = 0;
  std::size_t divergence_compared = 0, divergence_agreed = 0;
  std::size_t termination_compared = 0, termination_agreed = 0;
  std::vector<std::string> disagreements;
};

/// Generates `n` instances of each kind and compares deciders with the oracle.
inline Report differential(std::uint64_t seed, std::size_t n) {
  Report r;
  r.seed = seed;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    Instance d = random_instance(divergence_shape(), rng);
    const Semantics sem = i % 3 == 0 ? Semantics::theoretical : Semantics::abstract;
    Instance t = random_instance(termination_shape(i % 2 == 0, sem), rng);
    r.generated += 2;
    auto cd = compare_divergence(d);
    if (cd.comparable) {
      ++r.divergence_compared;
      if (cd.agree) ++r.divergence_agreed;
      else r.disagreements.push_back("divergence: " + cd.detail + "\n" + d.program_text + "goal: " + d.goal_text);
    }
    auto ct = compare_termination(t, sem);
    if (ct.comparable) {
      ++r.termination_compared;
      if (ct.agree) ++r.termination_agreed;
      else r.disagreements.push_back("termination: " + ct.detail + "\n" + t.program_text + "goal: " + t.goal_text);
    }
  }
  return r;
}

}  // namespace chrc::corpus
