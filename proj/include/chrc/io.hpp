#pragma once

// JSON encoding of computations, forests and verdicts, and decoding of
// witness traces for replay.

#include <string>
#include <vector>

#include "json.hpp"

#include "chrc/decide.hpp"
#include "chrc/engine.hpp"
#include "chrc/forest.hpp"

namespace chrc::io {

using nlohmann::json;

inline json store_json(const Configuration& c) {
  json a = json::array();
  for (const auto& s : c.store) a.push_back(to_string(s));
  return a;
}

inline json goal_json(const Goal& g) {
  json a = json::array();
  for (const auto& i : g) a.push_back(to_string(i));
  return a;
}

inline json step_json(const Step& s) {
  json j;
  j["kind"] = to_string(s.label.kind);
  if (s.label.kind == StepKind::apply) {
    j["rule"] = s.label.rule;
    j["kept_ids"] = s.label.kept_ids;
    j["removed_ids"] = s.label.removed_ids;
    j["matched_ids"] = s.label.matched_ids();
    json theta = json::object();
    for (const auto& [v, t] : s.label.theta) theta[v] = to_string(t);
    j["theta"] = theta;
    json fresh = json::object();
    for (const auto& [v, f] : s.label.introduced) fresh[v] = f;
    j["fresh"] = fresh;
  } else {
    j["goal_index"] = s.label.goal_index;
  }
  j["builtin_after"] = s.after.builtin.text();
  j["store_after"] = store_json(s.after);
  j["goal_after"] = goal_json(s.after.goal);
  return j;
}

inline json computation_json(const Computation& c) {
  json j;
  j["semantics"] = to_string(c.semantics);
  j["initial_goal"] = goal_json(c.initial.goal);
  json steps = json::array();
  for (const auto& s : c.steps) steps.push_back(step_json(s));
  j["steps"] = steps;
  j["apply_steps"] = c.apply_count();
  j["final"] = c.final;
  j["final_builtin"] = c.last().builtin.text();
  j["final_store"] = store_json(c.last());
  return j;
}

inline json forest_json(const Forest& f) {
  json nodes = json::array();
  for (std::size_t i = 0; i < f.nodes.size(); ++i) {
    const auto& n = f.nodes[i];
    json j;
    j["index"] = i;
    j["label"] = f.label_text(i);
    j["box"] = n.is_box();
    if (n.parent) j["parent"] = *n.parent;
    else j["parent"] = nullptr;
    j["children"] = n.children;
    nodes.push_back(j);
  }
  return json{{"roots", f.roots}, {"nodes", nodes}};
}

inline std::string big(const BigInt& b) { return b.str(); }

inline json verdict_json(const DivergenceVerdict& v) {
  json j;
  j["analysis"] = "divergence";
  j["semantics"] = "o";
  j["result"] = to_string(v.result);
  j["complete"] = true;
  j["nodes_expanded"] = v.nodes_expanded;
  if (v.witness) {
    j["witness"] = computation_json(*v.witness);
    j["witness"]["ancestor"] = v.ancestor;
    j["witness"]["descendant"] = v.descendant;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

inline json verdict_json(const TerminationVerdict& v, Semantics sem) {
  json j;
  j["analysis"] = "termination";
  j["semantics"] = to_string(sem);
  j["result"] = to_string(v.result);
  j["cap_used"] = big(v.cap_used);
  j["complete_bound"] = big(v.complete_bound);
  j["complete"] = v.complete;
  j["compressions"] = v.compressions;
  j["witness"] = v.witness ? computation_json(*v.witness) : json(nullptr);
  return j;
}

/// Rebuilds a computation from the transition labels of a JSON trace by
/// re-executing them. Throws EngineError if a label is not enabled.
inline Computation replay_trace(const Program& p, const Goal& g, Semantics sem, const json& trace) {
  Computation c;
  c.semantics = sem;
  c.initial = initial_configuration(g);
  Configuration cur = c.initial;
  std::size_t n = 0;
  for (const auto& s : trace.at("steps")) {
    ++n;
    TransitionLabel want;
    const std::string kind = s.at("kind").get<std::string>();
    if (kind == "solve") want.kind = StepKind::solve;
    else if (kind == "introduce") want.kind = StepKind::introduce;
    else if (kind == "apply") want.kind = StepKind::apply;
    else throw EngineError("step " + std::to_string(n) + ": unknown kind '" + kind + "'");
    if (want.kind == StepKind::apply) {
      want.rule = s.at("rule").get<std::string>();
      want.kept_ids = s.at("kept_ids").get<std::vector<int>>();
      want.removed_ids = s.at("removed_ids").get<std::vector<int>>();
    } else {
      want.goal_index = s.at("goal_index").get<std::size_t>();
    }
    auto succ = successors(p, cur, sem);
    auto it = std::find_if(succ.begin(), succ.end(), [&](const Step& x) { return x.label.same_choice(want); });
    if (it == succ.end()) throw EngineError("step " + std::to_string(n) + " is not enabled");
    if (s.contains("builtin_after") && s["builtin_after"].get<std::string>() != it->after.builtin.text())
      throw EngineError("step " + std::to_string(n) + ": built-in store differs from the trace");
    if (s.contains("store_after") && s["store_after"] != store_json(it->after))
      throw EngineError("step " + std::to_string(n) + ": CHR store differs from the trace");
    cur = it->after;
    c.steps.push_back(*it);
  }
  c.final = is_final(p, cur, sem);
  return c;
}

}  // namespace chrc::io
