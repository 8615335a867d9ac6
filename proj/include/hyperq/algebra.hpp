#pragma once

// Finite algebras on {0,..,n-1} given by operation tables.
//
// Tables are row-major with lexicographic argument order: the entry for
// f(a1,...,ak) sits at index a1*n^(k-1) + a2*n^(k-2) + ... + ak. Environments
// over variables v1..vk are enumerated in the same order, so environment
// index e assigns v1 the most significant base-n digit of e.

#include <functional>
#include <map>
#include <numeric>
#include <unordered_set>
#include <sstream>

#include "hyperq/hypersubst.hpp"

namespace hyperq {

using Element = std::uint32_t;
using Table = std::vector<Element>;
using Environment = std::vector<std::pair<std::string, Element>>;

struct TableHash {
  std::size_t operator()(const Table& t) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (Element e : t) h = (h ^ e) * 0x100000001b3ULL;
    return h;
  }
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// n^k, throwing when the result would not fit comfortably in memory-sized
// loops.
inline std::uint64_t checked_power(std::uint64_t n, std::size_t k, std::uint64_t limit = std::uint64_t{1} << 40) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (n != 0 && r > limit / n) throw std::length_error("search space too large");
    r *= n;
  }
  return r;
}

class FiniteAlgebra {
 public:
  FiniteAlgebra(std::string name, Signature sig, std::size_t carrier_size, std::vector<Table> tables)
      : name_(std::move(name)), sig_(std::move(sig)), n_(carrier_size), tables_(std::move(tables)) {
    if (n_ == 0) throw std::invalid_argument("carrier must be non-empty");
    if (tables_.size() != sig_.size()) throw std::invalid_argument("one table per symbol required");
    for (std::size_t i = 0; i < sig_.size(); ++i) {
      if (tables_[i].size() != checked_power(n_, sig_[i].arity, 1u << 24))
        throw std::invalid_argument("table for '" + sig_[i].name + "' has wrong size");
      for (Element e : tables_[i])
        if (e >= n_) throw std::invalid_argument("table for '" + sig_[i].name + "' has entry outside carrier");
    }
  }

  const std::string& name() const noexcept { return name_; }
  const Signature& signature() const noexcept { return sig_; }
  std::size_t carrier_size() const noexcept { return n_; }
  const std::vector<Table>& tables() const noexcept { return tables_; }
  const Table& table(std::size_t symbol) const { return tables_.at(symbol); }
  const Table& table(std::string_view symbol) const {
    auto i = sig_.find(symbol);
    if (!i) throw std::invalid_argument("unknown symbol '" + std::string(symbol) + "'");
    return tables_[*i];
  }

  Element apply(std::size_t symbol, std::span<const Element> args) const {
    std::size_t idx = 0;
    for (Element a : args) idx = idx * n_ + a;
    return tables_[symbol][idx];
  }

  FiniteAlgebra renamed(std::string name) const {
    FiniteAlgebra copy = *this;
    copy.name_ = std::move(name);
    return copy;
  }

  // Same algebra with tables permuted to follow `sig`, which must declare the
  // same symbols with the same arities.
  FiniteAlgebra with_signature(const Signature& sig) const {
    if (!sig_.same_symbols(sig)) throw std::invalid_argument("signature mismatch");
    std::vector<Table> t;
    for (const auto& s : sig) t.push_back(table(s.name));
    return FiniteAlgebra(name_, sig, n_, std::move(t));
  }

  // Equality of structure; names are ignored.
  friend bool operator==(const FiniteAlgebra& a, const FiniteAlgebra& b) {
    return a.n_ == b.n_ && a.sig_ == b.sig_ && a.tables_ == b.tables_;
  }

 private:
  std::string name_;
  Signature sig_;
  std::size_t n_;
  std::vector<Table> tables_;
};

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {
inline Element eval_rec(const FiniteAlgebra& a, const Term& t, const Environment& env,
                        std::unordered_map<const void*, Element>& memo) {
  if (auto it = memo.find(t.id()); it != memo.end()) return it->second;
  Element v = 0;
  if (t.is_var()) {
    auto it = std::find_if(env.begin(), env.end(), [&](const auto& p) { return p.first == t.name(); });
    if (it == env.end()) throw EvalError("unbound variable '" + t.name() + "'");
    v = it->second;
    if (v >= a.carrier_size()) throw EvalError("variable '" + t.name() + "' bound outside the carrier");
  } else {
    auto sym = a.signature().find(t.name());
    if (!sym || a.signature()[*sym].arity != t.arity())
      throw EvalError("symbol '" + t.name() + "' not interpreted in " + a.name());
    std::size_t idx = 0;
    for (const auto& arg : t.args()) idx = idx * a.carrier_size() + eval_rec(a, arg, env, memo);
    v = a.table(*sym)[idx];
  }
  memo.emplace(t.id(), v);
  return v;
}
}  // namespace detail

inline Element eval_term(const FiniteAlgebra& a, const Term& t, const Environment& env) {
  std::unordered_map<const void*, Element> memo;
  return detail::eval_rec(a, t, env, memo);
}

// Evaluates terms over a contiguous block of environments at once. Results
// are memoised per shared node, so hypersubstitution images (which are DAGs)
// are evaluated in time proportional to their distinct nodes.
class BatchEvaluator {
 public:
  static constexpr std::size_t default_block = 4096;

  BatchEvaluator(const FiniteAlgebra& a, std::vector<std::string> vars)
      : alg_(a), vars_(std::move(vars)), env_count_(checked_power(a.carrier_size(), vars_.size())) {
    strides_.resize(vars_.size());
    std::uint64_t s = 1;
    for (std::size_t i = vars_.size(); i-- > 0;) {
      strides_[i] = s;
      s *= a.carrier_size();
    }
  }

  const std::vector<std::string>& variables() const noexcept { return vars_; }
  std::uint64_t environment_count() const noexcept { return env_count_; }

  void set_block(std::uint64_t first, std::size_t count) {
    first_ = first;
    count_ = count;
    memo_.clear();
  }

  std::size_t block_size() const noexcept { return count_; }

  const Table& eval(const Term& t) {
    if (auto it = memo_.find(t.id()); it != memo_.end()) return it->second.second;
    Table out(count_);
    if (t.is_var()) {
      auto it = std::find(vars_.begin(), vars_.end(), t.name());
      if (it == vars_.end()) throw EvalError("unbound variable '" + t.name() + "'");
      std::uint64_t stride = strides_[static_cast<std::size_t>(it - vars_.begin())];
      Element n = static_cast<Element>(alg_.carrier_size());
      for (std::size_t e = 0; e < count_; ++e) out[e] = static_cast<Element>(((first_ + e) / stride) % n);
    } else {
      auto sym = alg_.signature().find(t.name());
      if (!sym || alg_.signature()[*sym].arity != t.arity())
        throw EvalError("symbol '" + t.name() + "' not interpreted in " + alg_.name());
      const Table& table = alg_.table(*sym);
      std::vector<const Table*> args;
      args.reserve(t.arity());
      for (const auto& a : t.args()) args.push_back(&eval(a));
      const std::size_t n = alg_.carrier_size();
      if (args.size() == 2) {
        const Table& l = *args[0];
        const Table& r = *args[1];
        for (std::size_t e = 0; e < count_; ++e) out[e] = table[l[e] * n + r[e]];
      } else {
        for (std::size_t e = 0; e < count_; ++e) {
          std::size_t idx = 0;
          for (const Table* a : args) idx = idx * n + (*a)[e];
          out[e] = table[idx];
        }
      }
    }
    auto [it, _] = memo_.emplace(t.id(), std::make_pair(t, std::move(out)));
    return it->second.second;
  }

  Environment environment(std::uint64_t index) const {
    Environment env;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      env.emplace_back(vars_[i], static_cast<Element>((index / strides_[i]) % alg_.carrier_size()));
    return env;
  }

 private:
  const FiniteAlgebra& alg_;
  std::vector<std::string> vars_;
  std::uint64_t env_count_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t first_ = 0;
  std::size_t count_ = 0;
  std::unordered_map<const void*, std::pair<Term, Table>> memo_;
};

// ---------------------------------------------------------------------------
// Term operations and clone slices

struct TermOperation {
  std::size_t arity = 0;
  Table table;
  // A term over x1..x{arity} inducing `table`.
  Term witness = Term::var(canonical_var(1));
};

inline std::vector<std::string> canonical_vars(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 1; i <= n; ++i) v.push_back(canonical_var(i));
  return v;
}

inline TermOperation term_operation(const FiniteAlgebra& a, const Term& t, std::size_t arity) {
  for (const auto& v : variables_of(t)) {
    std::size_t k = canonical_var_index(v);
    if (k == 0 || k > arity)
      throw EvalError("stray variable '" + v + "' in a term over x1..x" + std::to_string(arity));
  }
  BatchEvaluator ev(a, canonical_vars(arity));
  ev.set_block(0, static_cast<std::size_t>(ev.environment_count()));
  return {arity, ev.eval(t), t};
}

struct CloneSlice {
  std::size_t arity = 0;
  // Ordered by witness size, then witness text; projections first.
  std::vector<TermOperation> ops;
  bool complete = false;

  std::size_t size() const noexcept { return ops.size(); }

  std::optional<std::size_t> find(const Table& t) const {
    for (std::size_t i = 0; i < ops.size(); ++i)
      if (ops[i].table == t) return i;
    return std::nullopt;
  }
};

inline constexpr std::size_t default_clone_cap = 100'000;

// All n-ary term operations: projections closed under composition with the
// fundamental operations. Tables are discovered in order of their smallest
// witness size, so each witness is minimal in node count (ties broken by
// printed text).
inline CloneSlice enumerate_term_operations(const FiniteAlgebra& a, std::size_t arity,
                                            std::size_t cap = default_clone_cap) {
  if (arity == 0) throw std::invalid_argument("clone slice arity must be at least 1");
  const std::size_t n = a.carrier_size();
  const std::uint64_t points = checked_power(n, arity, 1u << 20);
  // Number of distinct n-ary operations, when it is small enough to matter.
  std::optional<std::uint64_t> all_ops;
  try {
    all_ops = checked_power(n, static_cast<std::size_t>(points), std::uint64_t{1} << 40);
  } catch (const std::length_error&) {
  }

  CloneSlice slice{arity, {}, false};
  std::map<std::uint64_t, std::vector<std::size_t>> by_size;
  std::unordered_map<Table, std::size_t, TableHash> index;
  std::vector<std::string> printed;

  // Tables back to back, for the inner product loop.
  std::vector<Element> flat;
  std::vector<std::uint64_t> wsize;

  auto add = [&](Table t, Term w) {
    flat.insert(flat.end(), t.begin(), t.end());
    wsize.push_back(w.size());
    index.emplace(t, slice.ops.size());
    by_size[w.size()].push_back(slice.ops.size());
    printed.push_back(to_string(w));
    slice.ops.push_back({arity, std::move(t), std::move(w)});
  };

  for (std::size_t i = 1; i <= arity; ++i) {
    Term proj = Term::var(canonical_var(i));
    TermOperation op = term_operation(a, proj, arity);
    if (!index.contains(op.table)) {
      if (slice.ops.size() >= cap) return slice;
      add(std::move(op.table), std::move(proj));
    }
  }
  if (all_ops && slice.ops.size() == *all_ops) {
    slice.complete = true;
    return slice;
  }

  // Printed text of g(t1..tm) orders first by g, then by the texts of t1..tm
  // in turn (separators sort below identifier characters). Visiting symbols
  // and arguments in that order meets every fresh table first through its
  // least witness, so a level needs no string comparisons.
  const Signature& sig = a.signature();
  std::vector<std::size_t> symbols(sig.size());
  std::iota(symbols.begin(), symbols.end(), 0);
  std::sort(symbols.begin(), symbols.end(),
            [&](std::size_t x, std::size_t y) { return sig[x].name + "(" < sig[y].name + "("; });

  // Small operation spaces get a flat table keyed by the base-n code:
  // -1 unseen, -2 found on the current level, otherwise an op index.
  constexpr std::uint64_t dense_limit = std::uint64_t{1} << 22;
  const bool dense = all_ops && *all_ops <= dense_limit;
  std::vector<std::int32_t> state;
  if (dense) {
    state.assign(static_cast<std::size_t>(*all_ops), -1);
    for (std::size_t i = 0; i < slice.ops.size(); ++i) {
      std::uint64_t code = 0;
      for (Element e : slice.ops[i].table) code = code * n + e;
      state[code] = static_cast<std::int32_t>(i);
    }
  }

  struct Candidate {
    Table table;
    std::size_t symbol;
    std::vector<std::size_t> args;
  };

  const std::size_t max_arity = sig.max_arity();
  std::uint64_t last_level = 1;
  for (std::uint64_t s = 2; s <= 1 + max_arity * last_level; ++s) {
    std::vector<std::size_t> ranked(slice.ops.size());
    std::iota(ranked.begin(), ranked.end(), 0);
    std::sort(ranked.begin(), ranked.end(), [&](std::size_t x, std::size_t y) { return printed[x] < printed[y]; });
    std::map<std::uint64_t, std::vector<std::size_t>> ranked_by_size;
    for (std::size_t i : ranked) ranked_by_size[wsize[i]].push_back(i);

    std::vector<Candidate> fresh;
    std::unordered_set<Table, TableHash> fresh_tables;
    std::vector<std::uint64_t> fresh_codes;
    bool over_cap = false;
    bool stop = false;
    Table buf(points);
    for (std::size_t g : symbols) {
      if (over_cap || stop) break;
      const std::size_t m = sig[g].arity;
      if (m > s - 1) continue;
      const Table& gt = a.table(g);
      std::vector<std::size_t> chosen(m);

      // prefix[p] holds the first m-1 arguments at point p, scaled by n.
      std::vector<std::size_t> prefix(points);
      auto visit = [&](std::size_t last) {
        const Element* row = flat.data() + last * points;
        std::uint64_t code = 0;
        for (std::uint64_t p = 0; p < points; ++p) {
          buf[p] = gt[prefix[p] + row[p]];
          code = code * n + buf[p];
        }
        if (dense) {
          if (state[code] != -1) return;
        } else if (index.contains(buf) || fresh_tables.contains(buf)) {
          return;
        }
        if (slice.ops.size() + fresh.size() >= cap) {
          over_cap = true;
          return;
        }
        if (dense) {
          state[code] = -2;
          fresh_codes.push_back(code);
        } else {
          fresh_tables.insert(buf);
        }
        chosen[m - 1] = last;
        fresh.push_back({buf, g, chosen});
        // Nothing later on this level can be new.
        if (all_ops && slice.ops.size() + fresh.size() == *all_ops) stop = true;
      };

      // Position `pos` takes operations in text order, leaving at least one
      // node for each later argument; the last one takes exactly what is left.
      std::function<void(std::size_t, std::uint64_t)> choose = [&](std::size_t pos, std::uint64_t remaining) {
        if (pos + 1 == m) {
          auto it = ranked_by_size.find(remaining);
          if (it == ranked_by_size.end()) return;
          for (std::uint64_t p = 0; p < points; ++p) {
            std::size_t k = 0;
            for (std::size_t i = 0; i + 1 < m; ++i) k = k * n + flat[chosen[i] * points + p];
            prefix[p] = k * n;
          }
          for (std::size_t i : it->second) {
            visit(i);
            if (over_cap || stop) return;
          }
          return;
        }
        const std::uint64_t room = remaining - (m - pos - 1);
        for (std::size_t i : ranked) {
          if (wsize[i] > room) continue;
          chosen[pos] = i;
          choose(pos + 1, remaining - wsize[i]);
          if (over_cap || stop) return;
        }
      };
      choose(0, s - 1);
    }
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      if (dense) state[fresh_codes[i]] = static_cast<std::int32_t>(slice.ops.size());
      std::vector<Term> args;
      for (std::size_t j : fresh[i].args) args.push_back(slice.ops[j].witness);
      add(std::move(fresh[i].table), Term::app(sig[fresh[i].symbol].name, std::move(args)));
    }
    if (!fresh.empty()) last_level = s;
    if (over_cap) return slice;
    if (all_ops && slice.ops.size() == *all_ops) break;
  }
  slice.complete = true;
  return slice;
}

using CloneSlices = std::map<std::size_t, CloneSlice>;

// One slice per arity occurring in the signature.
inline CloneSlices clone_slices(const FiniteAlgebra& a, std::size_t cap = default_clone_cap) {
  CloneSlices out;
  for (const auto& s : a.signature())
    if (!out.contains(s.arity)) out.emplace(s.arity, enumerate_term_operations(a, s.arity, cap));
  return out;
}

inline bool all_complete(const CloneSlices& slices) {
  return std::all_of(slices.begin(), slices.end(), [](const auto& p) { return p.second.complete; });
}

// ---------------------------------------------------------------------------
// Derived algebras

inline FiniteAlgebra derived_algebra(const FiniteAlgebra& a, const Hypersubstitution& h) {
  if (!(h.signature() == a.signature()))
    throw std::invalid_argument("hypersubstitution signature differs from the algebra's");
  std::vector<Table> tables;
  for (std::size_t i = 0; i < a.signature().size(); ++i)
    tables.push_back(term_operation(a, h.image(i), a.signature()[i].arity).table);
  return FiniteAlgebra(a.name() + "^sigma", a.signature(), a.carrier_size(), std::move(tables));
}

// A choice of one term operation per symbol, with the hypersubstitution
// built from the chosen witnesses.
struct SemanticHsub {
  std::vector<std::size_t> choice;  // index into the slice of matching arity
  Hypersubstitution witness;
};

struct SemanticHsubs {
  std::vector<SemanticHsub> items;
  // Set when some slice is incomplete: the list is then only a lower bound.
  bool lower_bound = false;
};

// Visits the cartesian product of slice members over the symbols, first
// symbol most significant. `f(choice)` returns false to stop early; the
// return value reports whether the walk ran to completion.
template <class F>
bool for_each_semantic_choice(const Signature& sig, const CloneSlices& slices, F&& f) {
  std::vector<const CloneSlice*> per_symbol;
  for (const auto& s : sig) {
    auto it = slices.find(s.arity);
    if (it == slices.end()) throw std::invalid_argument("no clone slice for arity " + std::to_string(s.arity));
    if (it->second.ops.empty()) return true;
    per_symbol.push_back(&it->second);
  }
  std::vector<std::size_t> idx(sig.size(), 0);
  while (true) {
    if (!f(std::as_const(idx))) return false;
    std::size_t k = sig.size();
    while (true) {
      if (k == 0) return true;
      --k;
      if (++idx[k] < per_symbol[k]->ops.size()) break;
      idx[k] = 0;
    }
  }
}

inline Hypersubstitution witness_hsub(const Signature& sig, const CloneSlices& slices,
                                      const std::vector<std::size_t>& choice) {
  std::vector<Term> images;
  for (std::size_t i = 0; i < sig.size(); ++i) images.push_back(slices.at(sig[i].arity).ops[choice[i]].witness);
  return Hypersubstitution(sig, std::move(images));
}

inline FiniteAlgebra derived_from_choice(const FiniteAlgebra& a, const CloneSlices& slices,
                                         const std::vector<std::size_t>& choice) {
  std::vector<Table> tables;
  for (std::size_t i = 0; i < a.signature().size(); ++i)
    tables.push_back(slices.at(a.signature()[i].arity).ops[choice[i]].table);
  return FiniteAlgebra(a.name() + "^sigma", a.signature(), a.carrier_size(), std::move(tables));
}

inline SemanticHsubs semantic_hsubs(const FiniteAlgebra& a, const CloneSlices& slices) {
  SemanticHsubs out;
  out.lower_bound = !all_complete(slices);
  for_each_semantic_choice(a.signature(), slices, [&](const std::vector<std::size_t>& choice) {
    out.items.push_back({choice, witness_hsub(a.signature(), slices, choice)});
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Algebra files
//
//   algebra left_zero
//   carrier 2
//   op f/2 = [0,0,1,1]
//   end

inline std::string format_algebra(const FiniteAlgebra& a) {
  std::string s = "algebra " + a.name() + "\ncarrier " + std::to_string(a.carrier_size()) + "\n";
  for (std::size_t i = 0; i < a.signature().size(); ++i) {
    s += "op " + a.signature()[i].name + "/" + std::to_string(a.signature()[i].arity) + " = [";
    const auto& t = a.table(i);
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (j) s += ',';
      s += std::to_string(t[j]);
    }
    s += "]\n";
  }
  s += "end\n";
  return s;
}

namespace detail {

inline std::string strip_spaces(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

inline std::uint64_t parse_uint(std::string_view s, const char* what) {
  if (s.empty() || s.size() > 9 || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw ParseError(ParseErrorKind::malformed_token, std::string("expected ") + what + ", got '" + std::string(s) + "'");
  return std::stoull(std::string(s));
}

}  // namespace detail

inline std::vector<FiniteAlgebra> parse_algebras(std::string_view text) {
  std::vector<FiniteAlgebra> out;
  struct Pending {
    std::string name;
    std::optional<std::size_t> carrier;
    Signature sig;
    std::vector<Table> tables;
  };
  std::optional<Pending> cur;
  std::size_t last_line = 0;
  for (auto [line_no, line] : detail::content_lines(text)) {
    last_line = line_no;
    detail::at_line(line_no, [&, line = line] {
      auto sp = line.find_first_of(" \t");
      std::string_view kw = line.substr(0, sp);
      std::string_view rest = sp == std::string_view::npos ? std::string_view{} : detail::trim(line.substr(sp));
      if (kw == "algebra") {
        if (cur) throw ParseError(ParseErrorKind::malformed_token, "'algebra' before 'end'");
        std::string name = detail::strip_spaces(rest);
        if (name.empty() || !detail::ident_start(name.front()) ||
            !std::all_of(name.begin(), name.end(), detail::ident_char))
          throw ParseError(ParseErrorKind::malformed_token, "bad algebra name '" + std::string(rest) + "'");
        cur = Pending{std::move(name), std::nullopt, {}, {}};
      } else if (!cur) {
        throw ParseError(ParseErrorKind::malformed_token, "expected 'algebra NAME'");
      } else if (kw == "carrier") {
        if (cur->carrier) throw ParseError(ParseErrorKind::malformed_token, "carrier given twice");
        auto n = detail::parse_uint(detail::strip_spaces(rest), "carrier size");
        if (n == 0) throw ParseError(ParseErrorKind::malformed_token, "carrier must be non-empty");
        cur->carrier = static_cast<std::size_t>(n);
      } else if (kw == "op") {
        if (!cur->carrier) throw ParseError(ParseErrorKind::malformed_token, "'op' before 'carrier'");
        std::string body = detail::strip_spaces(rest);
        auto slash = body.find('/');
        auto eq = body.find('=');
        if (slash == std::string::npos || eq == std::string::npos || eq < slash || body.size() < eq + 3 ||
            body[eq + 1] != '[' || body.back() != ']')
          throw ParseError(ParseErrorKind::malformed_token, "expected 'op NAME/ARITY = [e0,...]'");
        std::string name = body.substr(0, slash);
        if (name.empty() || !detail::ident_start(name.front()) ||
            !std::all_of(name.begin(), name.end(), detail::ident_char))
          throw ParseError(ParseErrorKind::malformed_token, "bad symbol name '" + name + "'");
        auto arity = detail::parse_uint(std::string_view(body).substr(slash + 1, eq - slash - 1), "arity");
        cur->sig.add(name, static_cast<std::size_t>(arity));
        Table t;
        std::string_view entries = std::string_view(body).substr(eq + 2, body.size() - eq - 3);
        while (!entries.empty()) {
          auto comma = entries.find(',');
          auto v = detail::parse_uint(entries.substr(0, comma), "table entry");
          if (v >= *cur->carrier)
            throw ParseError(ParseErrorKind::malformed_token, "table entry " + std::to_string(v) + " outside carrier");
          t.push_back(static_cast<Element>(v));
          if (comma == std::string_view::npos) break;
          entries.remove_prefix(comma + 1);
          if (entries.empty()) throw ParseError(ParseErrorKind::malformed_token, "trailing ',' in table");
        }
        std::uint64_t expected = checked_power(*cur->carrier, static_cast<std::size_t>(arity), 1u << 24);
        if (t.size() != expected)
          throw ParseError(ParseErrorKind::arity_mismatch, "table for '" + name + "' has " + std::to_string(t.size()) +
                                                               " entries, expected " + std::to_string(expected));
        cur->tables.push_back(std::move(t));
      } else if (kw == "end") {
        if (!rest.empty()) throw ParseError(ParseErrorKind::unexpected_trailing_input, "text after 'end'");
        if (!cur->carrier) throw ParseError(ParseErrorKind::malformed_token, "algebra without carrier");
        if (cur->sig.empty()) throw ParseError(ParseErrorKind::malformed_token, "algebra without operations");
        out.emplace_back(std::move(cur->name), std::move(cur->sig), *cur->carrier, std::move(cur->tables));
        cur.reset();
      } else {
        throw ParseError(ParseErrorKind::malformed_token, "unknown keyword '" + std::string(kw) + "'");
      }
      return 0;
    });
  }
  if (cur)
    throw ParseError(ParseErrorKind::malformed_token,
                     "line " + std::to_string(last_line) + ": algebra '" + cur->name + "' missing 'end'");
  if (out.empty()) throw ParseError(ParseErrorKind::empty_input, "no algebra in input");
  return out;
}

inline FiniteAlgebra parse_algebra(std::string_view text) {
  auto all = parse_algebras(text);
  if (all.size() != 1) throw ParseError(ParseErrorKind::unexpected_trailing_input, "expected exactly one algebra");
  return std::move(all.front());
}

}  // namespace hyperq
