#pragma once

// Hypersubstitutions: arity-preserving maps from operation symbols to terms
// over the canonical variables x1..xn, extended to all terms by
//
//   sigma(x)            = x
//   sigma(f(p1,...,pn)) = sigma(f)(sigma(p1), ..., sigma(pn))
//
// together with composition and breadth-first generation of finitely
// generated monoids of hypersubstitutions.

#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "hyperq/syntax.hpp"

namespace hyperq {

class Hypersubstitution {
 public:
  // Identity: every symbol f of arity n maps to f(x1,...,xn).
  explicit Hypersubstitution(Signature sig) : sig_(std::move(sig)) {
    images_.reserve(sig_.size());
    for (const auto& s : sig_) images_.push_back(fundamental_term(s));
  }

  Hypersubstitution(Signature sig, std::vector<Term> images) : sig_(std::move(sig)), images_(std::move(images)) {
    if (images_.size() != sig_.size())
      throw std::invalid_argument("hypersubstitution needs exactly one image per symbol");
    for (std::size_t i = 0; i < sig_.size(); ++i) check_image(sig_[i], images_[i]);
  }

  const Signature& signature() const noexcept { return sig_; }
  const std::vector<Term>& images() const noexcept { return images_; }
  const Term& image(std::size_t symbol) const { return images_.at(symbol); }
  const Term& image(std::string_view symbol) const {
    auto i = sig_.find(symbol);
    if (!i) throw std::invalid_argument("unknown symbol '" + std::string(symbol) + "'");
    return images_[*i];
  }

  std::uint64_t max_image_size() const {
    std::uint64_t m = 0;
    for (const auto& t : images_) m = std::max(m, t.size());
    return m;
  }

  std::size_t hash() const noexcept {
    std::size_t h = 0x84222325;
    for (const auto& t : images_) h = (h ^ t.hash()) * 0x100000001b3ULL;
    return h;
  }

  friend bool operator==(const Hypersubstitution& a, const Hypersubstitution& b) {
    return a.images_ == b.images_ && a.sig_ == b.sig_;
  }

  static Term fundamental_term(const Symbol& s) {
    std::vector<Term> args;
    for (std::size_t i = 1; i <= s.arity; ++i) args.push_back(Term::var(canonical_var(i)));
    return Term::app(s.name, std::move(args));
  }

 private:
  void check_image(const Symbol& s, const Term& t) const {
    check_term(sig_, t);
    for (const auto& v : variables_of(t)) {
      std::size_t k = canonical_var_index(v);
      if (k == 0 || k > s.arity)
        throw std::invalid_argument("image of '" + s.name + "' uses variable '" + v + "' outside x1..x" +
                                    std::to_string(s.arity));
    }
  }

  Signature sig_;
  std::vector<Term> images_;
};

struct HypersubstitutionHash {
  std::size_t operator()(const Hypersubstitution& h) const noexcept { return h.hash(); }
};

inline Hypersubstitution identity_hsub(const Signature& sig) { return Hypersubstitution(sig); }

inline std::string to_string(const Hypersubstitution& h) {
  std::string s;
  for (std::size_t i = 0; i < h.signature().size(); ++i) {
    if (i) s += ", ";
    s += h.signature()[i].name + " -> " + to_string(h.image(i));
  }
  return s;
}

namespace detail {

// Replaces canonical variables x1..xn of `image` by `args`, sharing the
// argument nodes.
inline Term instantiate_image(const Term& image, std::span<const Term> args,
                              std::unordered_map<const void*, Term>& memo) {
  if (auto it = memo.find(image.id()); it != memo.end()) return it->second;
  Term result = image;
  if (image.is_var()) {
    std::size_t k = canonical_var_index(image.name());
    if (k >= 1 && k <= args.size()) result = args[k - 1];
  } else {
    std::vector<Term> out;
    out.reserve(image.arity());
    for (const auto& a : image.args()) out.push_back(instantiate_image(a, args, memo));
    result = Term::app(image.name(), std::move(out));
  }
  memo.emplace(image.id(), result);
  return result;
}

class HsubApplier {
 public:
  explicit HsubApplier(const Hypersubstitution& h) : h_(h) {}

  Term operator()(const Term& t) {
    if (t.is_var()) return t;
    if (auto it = memo_.find(t.id()); it != memo_.end()) return it->second;
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const auto& a : t.args()) args.push_back((*this)(a));
    auto sym = h_.signature().find(t.name());
    if (!sym) throw std::invalid_argument("symbol '" + t.name() + "' not in hypersubstitution signature");
    std::unordered_map<const void*, Term> local;
    Term result = instantiate_image(h_.image(*sym), args, local);
    memo_.emplace(t.id(), result);
    return result;
  }

 private:
  const Hypersubstitution& h_;
  std::unordered_map<const void*, Term> memo_;
};

}  // namespace detail

inline Term apply_hsub(const Hypersubstitution& h, const Term& t) { return detail::HsubApplier(h)(t); }

inline Equation apply_hsub(const Hypersubstitution& h, const Equation& e) {
  detail::HsubApplier ap(h);
  Term l = ap(e.lhs);
  return {std::move(l), ap(e.rhs)};
}

// sigma acts on every premise and on the conclusion.
inline QuasiIdentity apply_hsub(const Hypersubstitution& h, const QuasiIdentity& q) {
  detail::HsubApplier ap(h);
  std::vector<Equation> premises;
  premises.reserve(q.premises.size());
  for (const auto& p : q.premises) {
    Term l = ap(p.lhs);
    premises.push_back({std::move(l), ap(p.rhs)});
  }
  Term l = ap(q.conclusion.lhs);
  Term r = ap(q.conclusion.rhs);
  return {std::move(premises), {std::move(l), std::move(r)}};
}

// (first ∘ second): apply `second`, then `first`.
//   apply_hsub(compose(a, b), t) == apply_hsub(a, apply_hsub(b, t))
inline Hypersubstitution compose(const Hypersubstitution& first, const Hypersubstitution& second) {
  if (!(first.signature() == second.signature()))
    throw std::invalid_argument("compose: hypersubstitutions over different signatures");
  detail::HsubApplier ap(first);
  std::vector<Term> images;
  images.reserve(second.images().size());
  for (const auto& img : second.images()) images.push_back(ap(img));
  return Hypersubstitution(second.signature(), std::move(images));
}

// ---------------------------------------------------------------------------
// Monoids

struct MonoidBudget {
  std::size_t max_elements = 10'000;
  std::uint64_t max_image_size = 15;
};

struct HsubMonoid {
  Signature signature;
  std::vector<Hypersubstitution> generators;
  // elements[0] is the identity; the rest in breadth-first discovery order.
  std::vector<Hypersubstitution> elements;
  // False when generation was cut short by the budget.
  bool saturated = true;

  std::size_t size() const noexcept { return elements.size(); }

  bool contains(const Hypersubstitution& h) const {
    return std::find(elements.begin(), elements.end(), h) != elements.end();
  }
};

inline HsubMonoid trivial_monoid(const Signature& sig) {
  return HsubMonoid{sig, {}, {identity_hsub(sig)}, true};
}

// Closure of {identity} under right multiplication by generators; images are
// deduplicated syntactically.
inline HsubMonoid generate_monoid(const Signature& sig, std::vector<Hypersubstitution> gens,
                                  MonoidBudget budget = {}) {
  for (const auto& g : gens)
    if (!(g.signature() == sig)) throw std::invalid_argument("generate_monoid: generator over another signature");
  HsubMonoid m{sig, std::move(gens), {}, true};
  std::unordered_set<Hypersubstitution, HypersubstitutionHash> seen;
  m.elements.push_back(identity_hsub(sig));
  seen.insert(m.elements.front());
  for (std::size_t i = 0; i < m.elements.size(); ++i) {
    for (const auto& g : m.generators) {
      Hypersubstitution next = compose(m.elements[i], g);
      if (next.max_image_size() > budget.max_image_size) {
        m.saturated = false;
        continue;
      }
      if (seen.contains(next)) continue;
      if (m.elements.size() >= budget.max_elements) {
        m.saturated = false;
        return m;
      }
      seen.insert(next);
      m.elements.push_back(std::move(next));
    }
  }
  return m;
}

// All terms over `vars` with at most `max_size` nodes, ordered by size then
// by `compare`.
inline std::vector<Term> terms_up_to(const Signature& sig, const std::vector<std::string>& vars,
                                     std::uint64_t max_size) {
  std::vector<std::vector<Term>> by_size(max_size + 1);
  if (max_size >= 1)
    for (const auto& v : vars) by_size[1].push_back(Term::var(v));
  for (std::uint64_t s = 2; s <= max_size; ++s) {
    for (const auto& sym : sig) {
      // distribute s-1 nodes over sym.arity children, each >= 1
      std::vector<std::uint64_t> parts(sym.arity, 1);
      if (sym.arity > s - 1) continue;
      std::function<void(std::size_t, std::uint64_t)> split = [&](std::size_t pos, std::uint64_t remaining) {
        if (pos + 1 == sym.arity) {
          parts[pos] = remaining;
          std::vector<std::size_t> idx(sym.arity, 0);
          for (std::size_t i = 0; i < sym.arity; ++i)
            if (by_size[parts[i]].empty()) return;
          while (true) {
            std::vector<Term> args;
            for (std::size_t i = 0; i < sym.arity; ++i) args.push_back(by_size[parts[i]][idx[i]]);
            by_size[s].push_back(Term::app(sym.name, std::move(args)));
            std::size_t k = sym.arity;
            bool done = true;
            while (k > 0) {
              --k;
              if (++idx[k] < by_size[parts[k]].size()) {
                done = false;
                break;
              }
              idx[k] = 0;
            }
            if (done) return;
          }
        }
        std::uint64_t rest = sym.arity - pos - 1;
        for (std::uint64_t p = 1; p + rest <= remaining; ++p) {
          parts[pos] = p;
          split(pos + 1, remaining - p);
        }
      };
      split(0, s - 1);
    }
    std::sort(by_size[s].begin(), by_size[s].end(), TermLess{});
  }
  std::vector<Term> out;
  for (auto& level : by_size)
    for (auto& t : level) out.push_back(std::move(t));
  return out;
}

// All hypersubstitutions whose images have at most `max_image_size` nodes,
// in lexicographic order over symbols (first symbol most significant) with
// images ordered by size then structure.
inline std::vector<Hypersubstitution> hsubs_up_to(const Signature& sig, std::uint64_t max_image_size) {
  std::vector<std::vector<Term>> choices;
  for (const auto& s : sig) {
    std::vector<std::string> vars;
    for (std::size_t i = 1; i <= s.arity; ++i) vars.push_back(canonical_var(i));
    choices.push_back(terms_up_to(sig, vars, max_image_size));
  }
  std::vector<Hypersubstitution> out;
  std::vector<std::size_t> idx(sig.size(), 0);
  if (std::any_of(choices.begin(), choices.end(), [](const auto& c) { return c.empty(); })) return out;
  while (true) {
    std::vector<Term> images;
    for (std::size_t i = 0; i < sig.size(); ++i) images.push_back(choices[i][idx[i]]);
    out.emplace_back(sig, std::move(images));
    std::size_t k = sig.size();
    while (k > 0) {
      --k;
      if (++idx[k] < choices[k].size()) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
    if (sig.empty()) return out;
  }
}

// ---------------------------------------------------------------------------
// Hypersubstitution files
//
//   hsub f -> f(x2,x1)
//   hsub g -> x1
//
// A blank line separates consecutive hypersubstitutions; symbols without a
// line keep their identity image.

inline std::vector<Hypersubstitution> parse_hsubs(std::string_view text, const Signature& sig) {
  std::vector<Hypersubstitution> out;
  std::optional<std::vector<Term>> current;
  std::vector<bool> assigned;
  auto flush = [&] {
    if (current) out.emplace_back(sig, std::move(*current));
    current.reset();
  };
  std::size_t line_no = 0;
  while (true) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = detail::trim(text.substr(0, nl));
    if (line.empty()) {
      flush();
    } else if (line.front() != '#') {
      detail::at_line(line_no, [&] {
        auto toks = detail::tokenize(line);
        if (toks.size() < 4 || toks[0].kind != detail::Tok::ident || toks[0].text != "hsub" ||
            toks[1].kind != detail::Tok::ident || toks[2].kind != detail::Tok::arrow)
          throw ParseError(ParseErrorKind::malformed_token, "expected 'hsub NAME -> TERM'");
        auto sym = sig.find(toks[1].text);
        if (!sym) throw ParseError(ParseErrorKind::malformed_token, "unknown symbol '" + toks[1].text + "'");
        if (!current) {
          current.emplace();
          for (const auto& s : sig) current->push_back(Hypersubstitution::fundamental_term(s));
          assigned.assign(sig.size(), false);
        }
        if (assigned[*sym])
          throw ParseError(ParseErrorKind::duplicate_symbol, "symbol '" + toks[1].text + "' mapped twice");
        assigned[*sym] = true;
        auto arrow_end = line.find("->") + 2;
        Term image = parse_term(line.substr(arrow_end), sig);
        for (const auto& v : variables_of(image)) {
          std::size_t k = canonical_var_index(v);
          if (k == 0 || k > sig[*sym].arity)
            throw ParseError(ParseErrorKind::malformed_token,
                             "image uses '" + v + "' outside x1..x" + std::to_string(sig[*sym].arity));
        }
        (*current)[*sym] = std::move(image);
        return 0;
      });
    }
    if (nl == std::string_view::npos) break;
    text = text.substr(nl + 1);
  }
  flush();
  return out;
}

inline std::string format_hsub(const Hypersubstitution& h) {
  std::string s;
  for (std::size_t i = 0; i < h.signature().size(); ++i)
    s += "hsub " + h.signature()[i].name + " -> " + to_string(h.image(i)) + "\n";
  return s;
}

}  // namespace hyperq
