// Command-line front end: classify, run, analyze, bound, corpus, verify.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "chrc/chrc.hpp"

namespace {

using chrc::io::json;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kUndecided = 2;
constexpr int kPrecondition = 3;

struct Precondition : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

chrc::Program load_program(const std::string& path) {
  try {
    return chrc::parse_program(read_file(path));
  } catch (const chrc::ParseError& e) {
    throw std::runtime_error(path + ":" + e.what());
  }
}

chrc::Goal load_goal(const std::string& text, const chrc::Program& p) {
  try {
    return chrc::parse_goal(text, &p);
  } catch (const chrc::ParseError& e) {
    throw std::runtime_error(std::string("goal: ") + e.what());
  }
}

chrc::Semantics semantics_of(const std::string& s) {
  return s == "t" ? chrc::Semantics::theoretical : chrc::Semantics::abstract;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

void print_trace(const chrc::Computation& c) {
  std::size_t i = 0;
  for (const auto& s : c.steps) {
    std::cout << ++i << ". " << chrc::to_string(s.label.kind);
    if (s.label.kind == chrc::StepKind::apply) {
      std::cout << " " << s.label.rule << " on";
      for (int id : s.label.matched_ids()) std::cout << " #" << id;
    }
    std::cout << "  builtin: " << s.after.builtin.text() << "  store: [" << chrc::store_text(s.after) << "]\n";
  }
  std::cout << "final: " << (c.final ? "true" : "false") << "\n";
}

struct Options {
  std::string program, goal, semantics = "o", analysis, strategy = "first", script, witness;
  std::string cap;
  bool json = false, emit_forest = false, complete = false, minimize = true;
  std::uint64_t seed = 0;
  std::size_t max_steps = 1000, count = 100;
  unsigned parallel = 1;
};

int cmd_classify(const Options& o) {
  auto p = load_program(o.program);
  auto f = chrc::classify(p);
  if (o.json) {
    emit({{"command", "classify"},
          {"range_restricted", f.range_restricted},
          {"single_headed", f.single_headed},
          {"propositional", f.propositional},
          {"rules", p.rules.size()}});
  } else {
    std::cout << "range_restricted: " << (f.range_restricted ? "true" : "false") << "\n"
              << "single_headed: " << (f.single_headed ? "true" : "false") << "\n"
              << "propositional: " << (f.propositional ? "true" : "false") << "\n"
              << "rules: " << p.rules.size() << "\n";
  }
  return kOk;
}

int cmd_run(const Options& o) {
  auto p = load_program(o.program);
  auto g = load_goal(o.goal, p);
  chrc::Strategy s;
  if (o.strategy == "random") s = chrc::Strategy::random_choice(o.seed);
  else if (o.strategy == "script" || !o.script.empty()) {
    std::vector<std::string> names;
    std::stringstream ss(o.script);
    for (std::string item; std::getline(ss, item, ',');)
      if (!item.empty()) names.push_back(item);
    s = chrc::Strategy::scripted(names);
  }
  auto comp = chrc::run(p, g, semantics_of(o.semantics), s, o.max_steps);
  std::optional<chrc::Forest> forest;
  std::string forest_note;
  if (o.emit_forest) {
    try {
      forest = chrc::build_forest(p, comp);
    } catch (const chrc::ForestError& e) {
      forest_note = e.what();
    }
  }
  if (o.json) {
    json j{{"command", "run"}, {"trace", chrc::io::computation_json(comp)}, {"replays", chrc::replays(p, comp)}};
    if (forest) j["forest"] = chrc::io::forest_json(*forest);
    else if (o.emit_forest) j["forest_error"] = forest_note;
    emit(j);
  } else {
    print_trace(comp);
    if (forest) std::cout << "forest:\n" << forest->text();
    else if (o.emit_forest) std::cout << "forest: " << forest_note << "\n";
  }
  return kOk;
}

void print_verdict(const json& v) {
  for (const char* k : {"analysis", "semantics", "result", "cap_used", "complete_bound", "complete"}) {
    if (!v.contains(k)) continue;
    const auto& x = v[k];
    std::cout << k << ": " << (x.is_string() ? x.get<std::string>() : x.dump()) << "\n";
  }
}

int cmd_analyze(const Options& o) {
  auto p = load_program(o.program);
  auto g = load_goal(o.goal, p);
  const auto sem = semantics_of(o.semantics);
  json v;
  int code = kOk;
  const chrc::Computation* witness = nullptr;
  std::optional<chrc::Computation> keep;
  if (o.analysis == "divergence") {
    if (sem != chrc::Semantics::abstract)
      throw Precondition("divergence analysis is only defined for the abstract semantics (o)");
    if (!chrc::classify(p).range_restricted)
      throw Precondition("divergence analysis requires a range-restricted program");
    auto d = chrc::decide_divergence(p, g, o.parallel);
    v = chrc::io::verdict_json(d);
    keep = d.witness;
  } else {
    if (!chrc::classify(p).single_headed)
      throw Precondition("termination analysis requires a single-headed program");
    chrc::TerminationOptions opt;
    opt.complete = o.complete;
    opt.minimize = o.minimize;
    opt.threads = o.parallel;
    if (!o.cap.empty()) opt.cap = chrc::BigInt(o.cap);
    auto t = chrc::decide_termination_existence(p, g, sem, opt);
    v = chrc::io::verdict_json(t, sem);
    keep = t.witness;
    if (t.result == chrc::TerminationVerdict::Result::exhausted_at_cap) code = kUndecided;
  }
  if (keep) witness = &*keep;
  std::optional<chrc::Forest> forest;
  if (o.emit_forest && witness && chrc::classify(p).single_headed && witness->final) forest = chrc::build_forest(p, *witness);

  if (o.json) {
    v["command"] = "analyze";
    if (forest) v["forest"] = chrc::io::forest_json(*forest);
    emit(v);
  } else {
    print_verdict(v);
    if (witness && v.contains("witness") && v["witness"].contains("ancestor"))
      std::cout << "pair: positions " << v["witness"]["ancestor"] << " <= " << v["witness"]["descendant"] << "\n";
    if (witness) {
      std::cout << "witness:\n";
      print_trace(*witness);
    }
    if (forest) std::cout << "forest:\n" << forest->text();
  }
  return code;
}

int cmd_bound(const Options& o) {
  auto p = load_program(o.program);
  chrc::Goal g = o.goal.empty() ? chrc::Goal{} : load_goal(o.goal, p);
  auto b = chrc::bound_parameters(p, g);
  const auto L = chrc::bound_L(b.u, b.w);
  const auto cap = chrc::effective_cap(b, semantics_of(o.semantics));
  if (o.json) {
    emit({{"command", "bound"},
          {"u", b.u},
          {"w", b.w},
          {"r", b.r},
          {"L", L.str()},
          {"semantics", o.semantics},
          {"effective_cap", cap.str()}});
  } else {
    std::cout << "u: " << b.u << "\nw: " << b.w << "\nr: " << b.r << "\nL: " << L << "\nsemantics: " << o.semantics
              << "\neffective_cap: " << cap << "\n";
  }
  return kOk;
}

int cmd_corpus(const Options& o) {
  auto r = chrc::corpus::differential(o.seed, o.count);
  if (o.json) {
    emit({{"command", "corpus"},
          {"seed", r.seed},
          {"generated", r.generated},
          {"divergence_compared", r.divergence_compared},
          {"divergence_agreed", r.divergence_agreed},
          {"termination_compared", r.termination_compared},
          {"termination_agreed", r.termination_agreed},
          {"disagreements", r.disagreements}});
  } else {
    std::cout << "seed: " << r.seed << "\ngenerated: " << r.generated << "\ndivergence: " << r.divergence_agreed
              << "/" << r.divergence_compared << " agree\ntermination: " << r.termination_agreed << "/"
              << r.termination_compared << " agree\n";
    for (const auto& d : r.disagreements) std::cout << "disagreement: " << d << "\n";
  }
  return r.disagreements.empty() ? kOk : kInputError;
}

// Replays a verdict produced by `analyze --json` and re-checks its claim.
int cmd_verify(const Options& o) {
  auto p = load_program(o.program);
  auto g = load_goal(o.goal, p);
  const json v = json::parse(read_file(o.witness));
  const std::string result = v.at("result").get<std::string>();
  bool ok = true;
  std::string why;
  if (v.contains("witness") && !v["witness"].is_null()) {
    const auto sem = semantics_of(v.at("semantics").get<std::string>());
    try {
      auto c = chrc::io::replay_trace(p, g, sem, v["witness"]);
      if (result == "Terminating") {
        ok = c.final;
        if (!ok) why = "witness does not end in a final configuration";
      } else if (result == "Divergent") {
        const auto a = v["witness"].at("ancestor").get<std::size_t>();
        const auto d = v["witness"].at("descendant").get<std::size_t>();
        ok = a < d && d <= c.steps.size() && chrc::leq(c.at(a), c.at(d));
        if (!ok) why = "recorded pair is not ordered";
      }
    } catch (const chrc::EngineError& e) {
      ok = false;
      why = e.what();
    }
  } else if (result == "Terminating" || result == "Divergent") {
    ok = false;
    why = "verdict has no witness";
  }
  if (o.json) {
    json j{{"command", "verify"}, {"result", result}, {"valid", ok}};
    if (!ok) j["reason"] = why;
    emit(j);
  } else {
    std::cout << "result: " << result << "\nvalid: " << (ok ? "true" : "false") << "\n";
    if (!ok) std::cout << "reason: " << why << "\n";
  }
  return ok ? kOk : kInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpreter and termination analyser for constraint handling rules over constants"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool needs_goal) {
    sub->add_option("--program", o.program, "Program file (.chr)")->required()->check(CLI::ExistingFile);
    auto goal = sub->add_option("--goal", o.goal, "Goal, e.g. \"c(X,Y), X = 0\"");
    if (needs_goal) goal->required();
    sub->add_flag("--json", o.json, "Machine-readable output");
  };
  auto semantics = [&](CLI::App* sub) {
    sub->add_option("--semantics", o.semantics, "o (no history) or t (propagation history)")
        ->check(CLI::IsMember({"o", "t"}));
  };

  auto* classify = app.add_subcommand("classify", "Report dialect flags of a program");
  classify->add_option("--program", o.program, "Program file (.chr)")->required()->check(CLI::ExistingFile);
  classify->add_flag("--json", o.json, "Machine-readable output");

  auto* run = app.add_subcommand("run", "Execute a computation and print its trace");
  common(run, true);
  semantics(run);
  run->add_option("--strategy", o.strategy, "first, random or script")
      ->check(CLI::IsMember({"first", "random", "script"}));
  run->add_option("--script", o.script, "Comma-separated rule names, each optionally rule#id");
  run->add_option("--seed", o.seed, "Seed for the random strategy");
  run->add_option("--max-steps", o.max_steps, "Maximum number of rule applications");
  run->add_flag("--emit-forest", o.emit_forest, "Print the forest of the computation");

  auto* analyze = app.add_subcommand("analyze", "Decide divergence or existence of a terminating computation");
  common(analyze, true);
  semantics(analyze);
  analyze->add_option("--analysis", o.analysis, "divergence or termination")
      ->required()
      ->check(CLI::IsMember({"divergence", "termination"}));
  analyze->add_option("--cap", o.cap, "Repetitiveness cap for the termination search");
  analyze->add_flag("--complete", o.complete, "Search up to the complete bound");
  analyze->add_flag("!--no-minimize", o.minimize, "Keep the witness as found");
  analyze->add_option("--parallel", o.parallel, "Worker threads")->check(CLI::Range(1u, 256u));
  analyze->add_flag("--emit-forest", o.emit_forest, "Print the forest of the witness");

  auto* bound = app.add_subcommand("bound", "Print the bound parameters and the cap");
  common(bound, false);
  semantics(bound);

  auto* corpus = app.add_subcommand("corpus", "Compare the deciders with exhaustive exploration on random instances");
  corpus->add_option("--seed", o.seed, "Corpus seed");
  corpus->add_option("--count", o.count, "Instances per kind");
  corpus->add_flag("--json", o.json, "Machine-readable output");

  auto* verify = app.add_subcommand("verify", "Replay a witness produced by analyze --json");
  common(verify, true);
  verify->add_option("--witness", o.witness, "Verdict JSON file")->required()->check(CLI::ExistingFile);
  verify->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    if (*classify) return cmd_classify(o);
    if (*run) return cmd_run(o);
    if (*analyze) return cmd_analyze(o);
    if (*bound) return cmd_bound(o);
    if (*corpus) return cmd_corpus(o);
    if (*verify) return cmd_verify(o);
  } catch (const Precondition& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPrecondition;
  } catch (const chrc::DecideError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
