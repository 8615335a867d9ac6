#pragma once

// Signatures, terms, identities and quasi-identities, plus the line-oriented
// text DSL used by theory files:
//
//   sig f/2 g/1
//   f(x,f(y,z)) = f(f(x,y),z)
//   f(x,y) = f(y,x) -> x = y
//
// Identifiers declared in the signature are operation symbols and must be
// applied with exactly their arity; every other identifier is a variable.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace hyperq {

enum class ParseErrorKind {
  malformed_token,
  duplicate_symbol,
  zero_arity,
  arity_mismatch,
  unbalanced_parentheses,
  empty_input,
  missing_equals,
  unexpected_trailing_input,
};

inline std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::malformed_token: return "malformed-token";
    case ParseErrorKind::duplicate_symbol: return "duplicate-symbol";
    case ParseErrorKind::zero_arity: return "zero-arity";
    case ParseErrorKind::arity_mismatch: return "arity-mismatch";
    case ParseErrorKind::unbalanced_parentheses: return "unbalanced-parentheses";
    case ParseErrorKind::empty_input: return "empty-input";
    case ParseErrorKind::missing_equals: return "missing-equals";
    case ParseErrorKind::unexpected_trailing_input: return "unexpected-trailing-input";
  }
  return "unknown";
}

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ParseErrorKind kind() const noexcept { return kind_; }

 private:
  ParseErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Signature

struct Symbol {
  std::string name;
  std::size_t arity = 0;

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

class Signature {
 public:
  Signature() = default;

  explicit Signature(std::vector<Symbol> symbols) {
    for (auto& s : symbols) add(std::move(s.name), s.arity);
  }

  void add(std::string name, std::size_t arity) {
    if (arity == 0)
      throw ParseError(ParseErrorKind::zero_arity, "symbol '" + name + "' has arity 0");
    if (index_.contains(name))
      throw ParseError(ParseErrorKind::duplicate_symbol, "symbol '" + name + "' declared twice");
    index_.emplace(name, symbols_.size());
    symbols_.push_back({std::move(name), arity});
  }

  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  const Symbol& operator[](std::size_t i) const { return symbols_.at(i); }
  const std::vector<Symbol>& symbols() const noexcept { return symbols_; }
  auto begin() const noexcept { return symbols_.begin(); }
  auto end() const noexcept { return symbols_.end(); }

  std::optional<std::size_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(std::string_view name) const { return find(name).has_value(); }

  std::size_t max_arity() const {
    std::size_t m = 0;
    for (const auto& s : symbols_) m = std::max(m, s.arity);
    return m;
  }

  // Same symbols in the same order.
  friend bool operator==(const Signature& a, const Signature& b) { return a.symbols_ == b.symbols_; }

  // Same symbols with the same arities, order ignored.
  bool same_symbols(const Signature& other) const {
    if (size() != other.size()) return false;
    return std::all_of(symbols_.begin(), symbols_.end(), [&](const Symbol& s) {
      auto j = other.find(s.name);
      return j && other[*j].arity == s.arity;
    });
  }

 private:
  std::vector<Symbol> symbols_;
  std::unordered_map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Term
//
// Immutable, reference-counted nodes. Copies share structure, so the terms
// produced by substitution and hypersubstitution are DAGs; structural
// equality and hashing ignore sharing.

class Term {
 public:
  static Term var(std::string name) {
    auto n = std::make_shared<Node>();
    n->is_var = true;
    n->name = std::move(name);
    n->size = 1;
    n->hash = std::hash<std::string>{}(n->name) * 0x9e3779b97f4a7c15ULL + 1;
    return Term(std::move(n));
  }

  static Term app(std::string symbol, std::vector<Term> args) {
    auto n = std::make_shared<Node>();
    n->is_var = false;
    n->name = std::move(symbol);
    std::uint64_t size = 1;
    std::size_t h = std::hash<std::string>{}(n->name) + 0x51ed27;
    for (const auto& a : args) {
      size = saturating_add(size, a.size());
      h = (h ^ a.hash()) * 0x100000001b3ULL + 0x9e37;
    }
    n->size = size;
    n->hash = h;
    n->args = std::move(args);
    return Term(std::move(n));
  }

  bool is_var() const noexcept { return node_->is_var; }
  // Variable name, or operation symbol for applications.
  const std::string& name() const noexcept { return node_->name; }
  std::span<const Term> args() const noexcept { return node_->args; }
  std::size_t arity() const noexcept { return node_->args.size(); }
  // Number of nodes of the term read as a tree (saturates instead of overflowing).
  std::uint64_t size() const noexcept { return node_->size; }
  std::size_t hash() const noexcept { return node_->hash; }
  // Identity of the shared node; equal ids imply equal terms.
  const void* id() const noexcept { return node_.get(); }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash() || a.size() != b.size() || a.is_var() != b.is_var() || a.name() != b.name())
      return false;
    return std::equal(a.args().begin(), a.args().end(), b.args().begin(), b.args().end());
  }

 private:
  struct Node {
    bool is_var = true;
    std::string name;
    std::vector<Term> args;
    std::uint64_t size = 1;
    std::size_t hash = 0;
  };

  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
  }

  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept { return t.hash(); }
};

// Total order: size, variables before applications, name, then arguments.
inline int compare(const Term& a, const Term& b) {
  if (a.id() == b.id()) return 0;
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  if (a.is_var() != b.is_var()) return a.is_var() ? -1 : 1;
  if (int c = a.name().compare(b.name()); c != 0) return c < 0 ? -1 : 1;
  for (std::size_t i = 0; i < std::min(a.arity(), b.arity()); ++i)
    if (int c = compare(a.args()[i], b.args()[i]); c != 0) return c;
  if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
  return 0;
}

struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return compare(a, b) < 0; }
};

inline void print(std::string& out, const Term& t) {
  out += t.name();
  if (t.is_var()) return;
  out += '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) out += ',';
    print(out, t.args()[i]);
  }
  out += ')';
}

inline std::string to_string(const Term& t) {
  std::string s;
  print(s, t);
  return s;
}

// Canonical variable names x1, x2, ... used in hypersubstitution images and
// term-operation witnesses.
inline std::string canonical_var(std::size_t i) { return "x" + std::to_string(i); }

// 1-based index of a canonical variable name, or 0.
inline std::size_t canonical_var_index(std::string_view name) {
  if (name.size() < 2 || name[0] != 'x' || name[1] == '0') return 0;
  std::size_t v = 0;
  for (char c : name.substr(1)) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return 0;
    if (v > 1'000'000) return 0;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

// ---------------------------------------------------------------------------
// Equations and quasi-identities

struct Equation {
  Term lhs;
  Term rhs;

  friend bool operator==(const Equation&, const Equation&) = default;
};

struct QuasiIdentity {
  std::vector<Equation> premises;
  Equation conclusion;

  bool is_identity() const noexcept { return premises.empty(); }
  friend bool operator==(const QuasiIdentity&, const QuasiIdentity&) = default;
};

struct Theory {
  Signature signature;
  std::vector<QuasiIdentity> axioms;
};

inline std::string to_string(const Equation& e) { return to_string(e.lhs) + " = " + to_string(e.rhs); }

inline std::string to_string(const QuasiIdentity& q) {
  std::string s;
  for (std::size_t i = 0; i < q.premises.size(); ++i) {
    if (i) s += " & ";
    s += to_string(q.premises[i]);
  }
  if (!q.premises.empty()) s += " -> ";
  s += to_string(q.conclusion);
  return s;
}

inline std::string to_string(const Signature& sig) {
  std::string s = "sig";
  for (const auto& sym : sig) s += " " + sym.name + "/" + std::to_string(sym.arity);
  return s;
}

inline std::string to_string(const Theory& t) {
  std::string s = to_string(t.signature) + "\n";
  for (const auto& q : t.axioms) s += to_string(q) + "\n";
  return s;
}

// ---------------------------------------------------------------------------
// Variables and substitution

namespace detail {
inline void collect_vars(const Term& t, std::vector<std::string>& out, std::unordered_set<std::string>& seen,
                         std::unordered_set<const void*>& visited) {
  if (!visited.insert(t.id()).second) return;
  if (t.is_var()) {
    if (seen.insert(t.name()).second) out.push_back(t.name());
    return;
  }
  for (const auto& a : t.args()) collect_vars(a, out, seen, visited);
}
}  // namespace detail

// Variables in first-occurrence (left-to-right) order.
inline std::vector<std::string> variables_of(const Term& t) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::unordered_set<const void*> visited;
  detail::collect_vars(t, out, seen, visited);
  return out;
}

inline std::vector<std::string> variables_of(const Equation& e) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::unordered_set<const void*> visited;
  detail::collect_vars(e.lhs, out, seen, visited);
  detail::collect_vars(e.rhs, out, seen, visited);
  return out;
}

// Premises in order, then the conclusion: the single shared variable tuple.
inline std::vector<std::string> variables_of(const QuasiIdentity& q) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::unordered_set<const void*> visited;
  for (const auto& p : q.premises) {
    detail::collect_vars(p.lhs, out, seen, visited);
    detail::collect_vars(p.rhs, out, seen, visited);
  }
  detail::collect_vars(q.conclusion.lhs, out, seen, visited);
  detail::collect_vars(q.conclusion.rhs, out, seen, visited);
  return out;
}

using Substitution = std::map<std::string, Term, std::less<>>;

namespace detail {
inline Term substitute(const Term& t, const Substitution& m, std::unordered_map<const void*, Term>& memo) {
  if (auto it = memo.find(t.id()); it != memo.end()) return it->second;
  Term result = t;
  if (t.is_var()) {
    if (auto it = m.find(t.name()); it != m.end()) result = it->second;
  } else {
    std::vector<Term> args;
    args.reserve(t.arity());
    bool changed = false;
    for (const auto& a : t.args()) {
      args.push_back(substitute(a, m, memo));
      changed = changed || args.back().id() != a.id();
    }
    if (changed) result = Term::app(t.name(), std::move(args));
  }
  memo.emplace(t.id(), result);
  return result;
}
}  // namespace detail

// Simultaneous substitution; unmapped variables stay fixed.
inline Term substitute_vars(const Term& t, const Substitution& m) {
  if (m.empty()) return t;
  std::unordered_map<const void*, Term> memo;
  return detail::substitute(t, m, memo);
}

inline Equation substitute_vars(const Equation& e, const Substitution& m) {
  return {substitute_vars(e.lhs, m), substitute_vars(e.rhs, m)};
}

// ---------------------------------------------------------------------------
// Well-formedness

inline void check_term(const Signature& sig, const Term& t) {
  if (t.is_var()) {
    if (sig.contains(t.name()))
      throw ParseError(ParseErrorKind::arity_mismatch, "symbol '" + t.name() + "' used as a variable");
    return;
  }
  auto idx = sig.find(t.name());
  if (!idx) throw ParseError(ParseErrorKind::malformed_token, "undeclared symbol '" + t.name() + "'");
  if (sig[*idx].arity != t.arity())
    throw ParseError(ParseErrorKind::arity_mismatch, "symbol '" + t.name() + "' expects " +
                                                         std::to_string(sig[*idx].arity) + " arguments, got " +
                                                         std::to_string(t.arity()));
  for (const auto& a : t.args()) check_term(sig, a);
}

inline void check_quasi_identity(const Signature& sig, const QuasiIdentity& q) {
  for (const auto& p : q.premises) {
    check_term(sig, p.lhs);
    check_term(sig, p.rhs);
  }
  check_term(sig, q.conclusion.lhs);
  check_term(sig, q.conclusion.rhs);
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

enum class Tok { ident, number, lparen, rparen, comma, slash, equals, amp, arrow, end };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (ident_start(c)) {
      while (i < s.size() && ident_char(s[i])) ++i;
      out.push_back({Tok::ident, std::string(s.substr(start, i - start)), start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({Tok::number, std::string(s.substr(start, i - start)), start});
      continue;
    }
    switch (c) {
      case '(': out.push_back({Tok::lparen, "(", i++}); continue;
      case ')': out.push_back({Tok::rparen, ")", i++}); continue;
      case ',': out.push_back({Tok::comma, ",", i++}); continue;
      case '/': out.push_back({Tok::slash, "/", i++}); continue;
      case '=': out.push_back({Tok::equals, "=", i++}); continue;
      case '&': out.push_back({Tok::amp, "&", i++}); continue;
      case '-':
        if (i + 1 < s.size() && s[i + 1] == '>') {
          out.push_back({Tok::arrow, "->", i});
          i += 2;
          continue;
        }
        break;
      default: break;
    }
    throw ParseError(ParseErrorKind::malformed_token,
                     "unexpected character '" + std::string(1, c) + "' at offset " + std::to_string(i));
  }
  out.push_back({Tok::end, "", s.size()});
  return out;
}

class TermParser {
 public:
  TermParser(std::vector<Token> toks, const Signature& sig) : toks_(std::move(toks)), sig_(sig) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool at_end() const { return peek().kind == Tok::end; }

  Term term() {
    const Token& t = next();
    if (t.kind == Tok::end) throw ParseError(ParseErrorKind::empty_input, "expected a term");
    if (t.kind == Tok::rparen)
      throw ParseError(ParseErrorKind::unbalanced_parentheses, "unexpected ')' at offset " + std::to_string(t.pos));
    if (t.kind != Tok::ident)
      throw ParseError(ParseErrorKind::malformed_token, "expected identifier at offset " + std::to_string(t.pos));
    auto sym = sig_.find(t.text);
    if (!sym) {
      if (peek().kind == Tok::lparen)
        throw ParseError(ParseErrorKind::malformed_token, "undeclared symbol '" + t.text + "' applied");
      return Term::var(t.text);
    }
    std::size_t arity = sig_[*sym].arity;
    std::vector<Term> args;
    if (peek().kind != Tok::lparen)
      throw ParseError(ParseErrorKind::arity_mismatch,
                       "symbol '" + t.text + "' expects " + std::to_string(arity) + " arguments, got 0");
    std::size_t open = next().pos;
    if (peek().kind == Tok::rparen) {
      next();
    } else {
      while (true) {
        if (peek().kind == Tok::end)
          throw ParseError(ParseErrorKind::unbalanced_parentheses,
                           "unclosed '(' at offset " + std::to_string(open));
        args.push_back(term());
        const Token& sep = next();
        if (sep.kind == Tok::rparen) break;
        if (sep.kind == Tok::end)
          throw ParseError(ParseErrorKind::unbalanced_parentheses,
                           "unclosed '(' at offset " + std::to_string(open));
        if (sep.kind != Tok::comma)
          throw ParseError(ParseErrorKind::malformed_token, "expected ',' or ')' at offset " + std::to_string(sep.pos));
      }
    }
    if (args.size() != arity)
      throw ParseError(ParseErrorKind::arity_mismatch, "symbol '" + t.text + "' expects " + std::to_string(arity) +
                                                           " arguments, got " + std::to_string(args.size()));
    return Term::app(t.text, std::move(args));
  }

  Equation equation() {
    Term lhs = term();
    if (peek().kind != Tok::equals) {
      if (peek().kind == Tok::rparen)
        throw ParseError(ParseErrorKind::unbalanced_parentheses, "unexpected ')' at offset " + std::to_string(peek().pos));
      throw ParseError(ParseErrorKind::missing_equals, "expected '=' at offset " + std::to_string(peek().pos));
    }
    next();
    return {std::move(lhs), term()};
  }

  void expect_end() {
    if (at_end()) return;
    if (peek().kind == Tok::rparen)
      throw ParseError(ParseErrorKind::unbalanced_parentheses, "unexpected ')' at offset " + std::to_string(peek().pos));
    throw ParseError(ParseErrorKind::unexpected_trailing_input,
                     "unexpected '" + peek().text + "' at offset " + std::to_string(peek().pos));
  }

 private:
  std::vector<Token> toks_;
  const Signature& sig_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Signature parse_signature(std::string_view text) {
  auto toks = detail::tokenize(text);
  if (toks.front().kind == detail::Tok::end) throw ParseError(ParseErrorKind::empty_input, "empty signature");
  if (toks.front().kind != detail::Tok::ident || toks.front().text != "sig")
    throw ParseError(ParseErrorKind::malformed_token, "signature must start with 'sig'");
  Signature sig;
  std::size_t i = 1;
  if (toks[i].kind == detail::Tok::end) throw ParseError(ParseErrorKind::malformed_token, "signature has no symbols");
  while (toks[i].kind != detail::Tok::end) {
    if (toks[i].kind != detail::Tok::ident || toks[i + 1].kind != detail::Tok::slash ||
        toks[i + 2].kind != detail::Tok::number)
      throw ParseError(ParseErrorKind::malformed_token,
                       "expected NAME/ARITY at offset " + std::to_string(toks[i].pos));
    if (toks[i + 2].text.size() > 6)
      throw ParseError(ParseErrorKind::malformed_token, "arity too large: " + toks[i + 2].text);
    sig.add(toks[i].text, std::stoul(toks[i + 2].text));
    i += 3;
  }
  return sig;
}

inline Term parse_term(std::string_view text, const Signature& sig) {
  detail::TermParser p(detail::tokenize(text), sig);
  Term t = p.term();
  p.expect_end();
  return t;
}

inline Equation parse_equation(std::string_view text, const Signature& sig) {
  detail::TermParser p(detail::tokenize(text), sig);
  Equation e = p.equation();
  p.expect_end();
  return e;
}

inline QuasiIdentity parse_quasi_identity(std::string_view text, const Signature& sig) {
  detail::TermParser p(detail::tokenize(text), sig);
  std::vector<Equation> eqs{p.equation()};
  while (p.peek().kind == detail::Tok::amp) {
    p.next();
    eqs.push_back(p.equation());
  }
  if (p.peek().kind == detail::Tok::arrow) {
    p.next();
    Equation conclusion = p.equation();
    p.expect_end();
    return {std::move(eqs), std::move(conclusion)};
  }
  p.expect_end();
  if (eqs.size() > 1) throw ParseError(ParseErrorKind::malformed_token, "premises given without '->' conclusion");
  return {{}, std::move(eqs.front())};
}

namespace detail {
inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Splits into lines, tracking 1-based line numbers; skips blank and '#' lines.
inline std::vector<std::pair<std::size_t, std::string_view>> content_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    out.emplace_back(line_no, line);
  }
  return out;
}

template <class F>
auto at_line(std::size_t line_no, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ParseError(e.kind(), "line " + std::to_string(line_no) + ": " +
                                   std::string(e.what()).substr(std::string(to_string(e.kind())).size() + 2));
  }
}
}  // namespace detail

// Theory file: first content line `sig ...`, then one quasi-identity per line.
inline Theory parse_theory(std::string_view text) {
  auto lines = detail::content_lines(text);
  if (lines.empty()) throw ParseError(ParseErrorKind::empty_input, "theory file has no signature line");
  Theory th;
  th.signature = detail::at_line(lines.front().first, [&] { return parse_signature(lines.front().second); });
  for (std::size_t i = 1; i < lines.size(); ++i) {
    th.axioms.push_back(
        detail::at_line(lines[i].first, [&] { return parse_quasi_identity(lines[i].second, th.signature); }));
  }
  return th;
}

}  // namespace hyperq
