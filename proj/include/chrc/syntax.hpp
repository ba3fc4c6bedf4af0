#pragma once

// Abstract syntax of CHR over constants (no function symbols of arity > 0),
// with `=` as the only built-in, plus a parser for the Prolog-like concrete
// syntax and the dialect classifier.

#include <cctype>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace chrc {

struct Term {
  enum class Kind : std::uint8_t { constant, variable };

  Kind kind = Kind::constant;
  std::string name;

  static Term var(std::string n) { return {Kind::variable, std::move(n)}; }
  static Term constant(std::string n) { return {Kind::constant, std::move(n)}; }

  bool is_var() const { return kind == Kind::variable; }
  bool is_const() const { return kind == Kind::constant; }

  auto operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  std::size_t arity() const { return args.size(); }
  auto operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
};

struct Equation {
  Term lhs;
  Term rhs;

  auto operator<=>(const Equation&) const = default;
  bool operator==(const Equation&) const = default;
};

/// A goal or rule-body member: a CHR constraint or a built-in equation.
using Item = std::variant<Atom, Equation>;

/// Multiset of constraints. Order is kept for readable traces only.
using Goal = std::vector<Item>;

struct Rule {
  std::string name;
  std::vector<Atom> kept;
  std::vector<Atom> removed;
  std::vector<Equation> guard;
  std::vector<Item> body;

  bool is_propagation() const { return removed.empty(); }
  bool is_simplification() const { return kept.empty(); }
  std::size_t head_size() const { return kept.size() + removed.size(); }

  bool operator==(const Rule&) const = default;
};

struct Program {
  std::vector<Rule> rules;
  std::set<std::string> constants;
  std::map<std::string, std::size_t> predicates;

  const Rule* find_rule(std::string_view name) const {
    for (const auto& r : rules)
      if (r.name == name) return &r;
    return nullptr;
  }

  bool operator==(const Program&) const = default;
};

struct DialectFlags {
  bool range_restricted = true;
  bool single_headed = true;
  bool propositional = true;

  bool operator==(const DialectFlags&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg)
      : std::runtime_error(format(line, column, msg)), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(std::size_t line, std::size_t column, const std::string& msg) {
    if (line == 0) return msg;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + msg;
  }

  std::size_t line_;
  std::size_t column_;
};

// ---------------------------------------------------------------------------
// Variables and printing

inline void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.is_var()) out.insert(t.name);
}
inline void collect_vars(const Atom& a, std::set<std::string>& out) {
  for (const auto& t : a.args) collect_vars(t, out);
}
inline void collect_vars(const Equation& e, std::set<std::string>& out) {
  collect_vars(e.lhs, out);
  collect_vars(e.rhs, out);
}
inline void collect_vars(const Item& i, std::set<std::string>& out) {
  std::visit([&](const auto& x) { collect_vars(x, out); }, i);
}
template <class T>
std::set<std::string> vars_of(const std::vector<T>& xs) {
  std::set<std::string> out;
  for (const auto& x : xs) collect_vars(x, out);
  return out;
}
inline std::set<std::string> vars_of(const Atom& a) {
  std::set<std::string> out;
  collect_vars(a, out);
  return out;
}

inline std::string to_string(const Term& t) { return t.name; }

inline std::string to_string(const Atom& a) {
  std::string s = a.predicate;
  if (a.args.empty()) return s;
  s += '(';
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ',';
    s += a.args[i].name;
  }
  s += ')';
  return s;
}

inline std::string to_string(const Equation& e) { return e.lhs.name + "=" + e.rhs.name; }

inline std::string to_string(const Item& i) {
  return std::visit([](const auto& x) { return to_string(x); }, i);
}

template <class T>
std::string join(const std::vector<T>& xs, const char* sep = ", ") {
  if (xs.empty()) return "true";
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += sep;
    s += to_string(xs[i]);
  }
  return s;
}

inline std::string to_string(const Rule& r) {
  std::string s = r.name + " @ ";
  if (r.is_propagation()) {
    s += join(r.kept) + " ==> ";
  } else if (r.is_simplification()) {
    s += join(r.removed) + " <=> ";
  } else {
    s += join(r.kept) + " \\ " + join(r.removed) + " <=> ";
  }
  if (!r.guard.empty()) s += join(r.guard) + " | ";
  s += join(r.body) + ".";
  return s;
}

inline std::string to_string(const Program& p) {
  std::string s;
  for (const auto& r : p.rules) s += to_string(r) + "\n";
  return s;
}

// ---------------------------------------------------------------------------
// Parser

namespace detail {

struct Token {
  enum class Kind { ident, var, lparen, rparen, comma, dot, at, backslash, bar, eq, simp, prop, end };
  Kind kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

inline bool is_reserved_fresh_name(std::string_view n) {
  // _V<digits>_<digits> is the engine's namespace for fresh body variables.
  if (n.size() < 5 || n.substr(0, 2) != "_V") return false;
  std::size_t i = 2;
  std::size_t digits = 0;
  while (i < n.size() && std::isdigit(static_cast<unsigned char>(n[i]))) ++i, ++digits;
  if (!digits || i >= n.size() || n[i] != '_') return false;
  ++i;
  digits = 0;
  while (i < n.size() && std::isdigit(static_cast<unsigned char>(n[i]))) ++i, ++digits;
  return digits && i == n.size();
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_blank();
      if (pos_ >= src_.size()) {
        out.push_back({Token::Kind::end, "", line_, col_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool op_char(char c) {
    return std::string_view("<=>\\|@+-*/:;!?#&^~$`'\"[]{}").find(c) != std::string_view::npos;
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Token next() {
    const std::size_t line = line_, col = col_;
    const char c = src_[pos_];
    auto single = [&](Token::Kind k) {
      advance();
      return Token{k, std::string(1, c), line, col};
    };
    switch (c) {
      case '(': return single(Token::Kind::lparen);
      case ')': return single(Token::Kind::rparen);
      case ',': return single(Token::Kind::comma);
      case '.': return single(Token::Kind::dot);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string s;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        s += src_[pos_];
        advance();
      }
      if (pos_ < src_.size() && ident_char(src_[pos_]))
        throw ParseError(line, col, "malformed numeral");
      return {Token::Kind::ident, s, line, col};
    }
    if (ident_char(c)) {
      std::string s;
      while (pos_ < src_.size() && ident_char(src_[pos_])) {
        s += src_[pos_];
        advance();
      }
      const bool is_var = std::isupper(static_cast<unsigned char>(s[0])) || s[0] == '_';
      return {is_var ? Token::Kind::var : Token::Kind::ident, s, line, col};
    }
    if (op_char(c)) {
      std::string s;
      while (pos_ < src_.size() && op_char(src_[pos_])) {
        s += src_[pos_];
        advance();
      }
      if (s == "<=>") return {Token::Kind::simp, s, line, col};
      if (s == "==>") return {Token::Kind::prop, s, line, col};
      if (s == "=") return {Token::Kind::eq, s, line, col};
      if (s == "\\") return {Token::Kind::backslash, s, line, col};
      if (s == "|") return {Token::Kind::bar, s, line, col};
      if (s == "@") return {Token::Kind::at, s, line, col};
      throw ParseError(line, col, "unknown operator '" + s + "' (the only built-in is '=')");
    }
    throw ParseError(line, col, std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  Parser(std::string_view src, std::map<std::string, std::size_t> arities)
      : toks_(Lexer(src).run()), arities_(std::move(arities)) {}

  Program program() {
    Program p;
    std::set<std::string> names;
    std::size_t index = 0;
    while (peek().kind != Token::Kind::end) {
      ++index;
      const Token& start = peek();
      Rule r = rule(index);
      if (r.name.empty()) {
        r.name = "rule" + std::to_string(index);
        while (names.count(r.name)) r.name += "_";
      }
      if (!names.insert(r.name).second)
        throw ParseError(start.line, start.column, "duplicate rule name '" + r.name + "'");
      p.rules.push_back(std::move(r));
    }
    p.constants = constants_;
    p.predicates = arities_;
    return p;
  }

  Goal goal() {
    Goal g;
    if (peek().kind == Token::Kind::end) return g;
    g = items(false);
    if (peek().kind == Token::Kind::dot) take();
    expect(Token::Kind::end, "end of goal");
    return g;
  }

  const std::set<std::string>& constants() const { return constants_; }
  const std::map<std::string, std::size_t>& arities() const { return arities_; }

 private:
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  const Token& expect(Token::Kind k, const char* what) {
    const Token& t = peek();
    if (t.kind != k) {
      std::string got = t.kind == Token::Kind::end ? "end of input" : "'" + t.text + "'";
      throw ParseError(t.line, t.column, std::string("expected ") + what + ", got " + got);
    }
    return take();
  }

  Rule rule(std::size_t) {
    Rule r;
    if (peek().kind == Token::Kind::ident && peek(1).kind == Token::Kind::at) {
      r.name = take().text;
      take();
    }
    std::vector<Atom> first = heads();
    bool has_backslash = false;
    std::vector<Atom> second;
    if (peek().kind == Token::Kind::backslash) {
      take();
      has_backslash = true;
      second = heads();
    }
    const Token& arrow = peek();
    if (arrow.kind == Token::Kind::simp) {
      take();
      if (has_backslash) {
        r.kept = std::move(first);
        r.removed = std::move(second);
      } else {
        r.removed = std::move(first);
      }
    } else if (arrow.kind == Token::Kind::prop) {
      take();
      if (has_backslash)
        throw ParseError(arrow.line, arrow.column, "'\\' is only allowed in simpagation rules");
      r.kept = std::move(first);
    } else {
      expect(Token::Kind::simp, "'<=>' or '==>'");
    }

    std::vector<Item> before_bar = items(true);
    if (peek().kind == Token::Kind::bar) {
      const Token& bar = take();
      for (const auto& i : before_bar) {
        if (!std::holds_alternative<Equation>(i))
          throw ParseError(bar.line, bar.column, "guards may only contain '=' constraints");
        r.guard.push_back(std::get<Equation>(i));
      }
      r.body = items(true);
    } else {
      r.body = std::move(before_bar);
    }
    expect(Token::Kind::dot, "'.' at end of rule");
    return r;
  }

  std::vector<Atom> heads() {
    std::vector<Atom> out;
    for (;;) {
      const Token& t = peek();
      if (t.kind != Token::Kind::ident || t.text == "true" ||
          std::isdigit(static_cast<unsigned char>(t.text[0])))
        throw ParseError(t.line, t.column, "expected a CHR constraint in rule head");
      out.push_back(atom());
      if (peek().kind == Token::Kind::eq)
        throw ParseError(peek().line, peek().column, "built-in constraints are not allowed in heads");
      if (peek().kind != Token::Kind::comma) break;
      take();
    }
    return out;
  }

  // Comma-separated list of atoms, equations and `true` (the empty conjunction).
  std::vector<Item> items(bool in_rule) {
    std::vector<Item> out;
    for (;;) {
      const Token& t = peek();
      if (t.kind == Token::Kind::ident && t.text == "true" && peek(1).kind != Token::Kind::eq &&
          peek(1).kind != Token::Kind::lparen) {
        take();
      } else if (t.kind == Token::Kind::var ||
                 (t.kind == Token::Kind::ident && peek(1).kind == Token::Kind::eq)) {
        Term lhs = term();
        expect(Token::Kind::eq, "'='");
        Term rhs = term();
        out.emplace_back(Equation{lhs, rhs});
      } else if (t.kind == Token::Kind::ident) {
        if (std::isdigit(static_cast<unsigned char>(t.text[0])))
          throw ParseError(t.line, t.column, "a numeral cannot be a constraint");
        out.emplace_back(atom());
      } else {
        expect(Token::Kind::ident, in_rule ? "a constraint or 'true'" : "a goal constraint");
      }
      if (peek().kind != Token::Kind::comma) break;
      take();
    }
    return out;
  }

  Atom atom() {
    const Token& name = expect(Token::Kind::ident, "predicate name");
    Atom a{name.text, {}};
    if (name.text == "true")
      throw ParseError(name.line, name.column, "'true' is reserved");
    if (peek().kind == Token::Kind::lparen) {
      take();
      for (;;) {
        a.args.push_back(term());
        if (peek().kind != Token::Kind::comma) break;
        take();
      }
      expect(Token::Kind::rparen, "')'");
    }
    auto [it, fresh] = arities_.emplace(a.predicate, a.arity());
    if (!fresh && it->second != a.arity())
      throw ParseError(name.line, name.column,
                       "predicate '" + a.predicate + "' used with arity " + std::to_string(a.arity()) +
                           " but previously with arity " + std::to_string(it->second));
    return a;
  }

  Term term() {
    const Token& t = peek();
    if (t.kind == Token::Kind::var) {
      take();
      if (t.text == "_") throw ParseError(t.line, t.column, "anonymous variables are not supported");
      if (is_reserved_fresh_name(t.text))
        throw ParseError(t.line, t.column, "variable name '" + t.text + "' is reserved for fresh variables");
      if (peek().kind == Token::Kind::lparen)
        throw ParseError(t.line, t.column, "compound terms are not supported");
      return Term::var(t.text);
    }
    if (t.kind == Token::Kind::ident) {
      take();
      if (peek().kind == Token::Kind::lparen)
        throw ParseError(t.line, t.column,
                         "compound term '" + t.text + "(...)': function symbols of arity > 0 are not supported");
      constants_.insert(t.text);
      return Term::constant(t.text);
    }
    expect(Token::Kind::var, "a variable or constant");
    return {};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, std::size_t> arities_;
  std::set<std::string> constants_;
};

}  // namespace detail

inline Program parse_program(std::string_view text) {
  return detail::Parser(text, {}).program();
}

/// Parses a goal. When `program` is given, predicate arities are checked
/// against its table.
inline Goal parse_goal(std::string_view text, const Program* program = nullptr) {
  detail::Parser parser(text, program ? program->predicates : std::map<std::string, std::size_t>{});
  return parser.goal();
}

/// Constants and predicate arities of a program together with a goal.
struct SymbolTable {
  std::set<std::string> constants;
  std::map<std::string, std::size_t> predicates;
};

inline SymbolTable link(const Program& p, const Goal& g) {
  SymbolTable t{p.constants, p.predicates};
  for (const auto& item : g) {
    if (const auto* a = std::get_if<Atom>(&item)) {
      auto [it, fresh] = t.predicates.emplace(a->predicate, a->arity());
      if (!fresh && it->second != a->arity())
        throw ParseError(0, 0, "goal uses predicate '" + a->predicate + "' with inconsistent arity");
      for (const auto& arg : a->args)
        if (arg.is_const()) t.constants.insert(arg.name);
    } else {
      const auto& e = std::get<Equation>(item);
      for (const Term* x : {&e.lhs, &e.rhs})
        if (x->is_const()) t.constants.insert(x->name);
    }
  }
  return t;
}

inline DialectFlags classify(const Program& p) {
  DialectFlags f;
  for (const auto& [pred, arity] : p.predicates)
    if (arity != 0) f.propositional = false;
  for (const auto& r : p.rules) {
    std::set<std::string> head = vars_of(r.kept);
    for (const auto& v : vars_of(r.removed)) head.insert(v);
    std::set<std::string> used = vars_of(r.guard);
    for (const auto& v : vars_of(r.body)) used.insert(v);
    for (const auto& v : used)
      if (!head.count(v)) f.range_restricted = false;
    if (r.head_size() != 1) f.single_headed = false;
    if (!r.guard.empty()) f.propositional = false;
    for (const auto& b : r.body)
      if (std::holds_alternative<Equation>(b)) f.propositional = false;
  }
  return f;
}

}  // namespace chrc
