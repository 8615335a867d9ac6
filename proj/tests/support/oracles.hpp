#pragma once

// Slow, obviously-correct reference implementations. They share only the
// data types (Term, FiniteAlgebra, ...) with the library.

#include <functional>
#include <map>
#include <set>

#include "hyperq/hyperq.hpp"

namespace oracle {

using namespace hyperq;

inline std::size_t pow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

// Table entry for a tuple, first argument most significant.
inline Element lookup(const FiniteAlgebra& a, std::size_t symbol, const std::vector<Element>& args) {
  std::size_t k = 0;
  for (Element e : args) k = k * a.carrier_size() + e;
  return a.tables()[symbol][k];
}

inline Element eval(const FiniteAlgebra& a, const Term& t, const std::map<std::string, Element>& env) {
  if (t.is_var()) return env.at(t.name());
  std::vector<Element> args;
  for (const auto& s : t.args()) args.push_back(eval(a, s, env));
  return lookup(a, *a.signature().find(t.name()), args);
}

// Calls f(env) for every assignment of `vars`; stops when f returns false.
inline bool all_envs(std::size_t n, const std::vector<std::string>& vars,
                     const std::function<bool(const std::map<std::string, Element>&)>& f) {
  std::vector<Element> v(vars.size(), 0);
  while (true) {
    std::map<std::string, Element> env;
    for (std::size_t i = 0; i < vars.size(); ++i) env[vars[i]] = v[i];
    if (!f(env)) return false;
    std::size_t i = vars.size();
    while (true) {
      if (i == 0) return true;
      --i;
      if (++v[i] < n) break;
      v[i] = 0;
    }
  }
}

inline std::vector<std::string> vars_of(const QuasiIdentity& q) {
  std::set<std::string> s;
  std::function<void(const Term&)> walk = [&](const Term& t) {
    if (t.is_var()) s.insert(t.name());
    for (const auto& c : t.args()) walk(c);
  };
  for (const auto& p : q.premises) walk(p.lhs), walk(p.rhs);
  walk(q.conclusion.lhs);
  walk(q.conclusion.rhs);
  return {s.begin(), s.end()};
}

inline bool satisfies(const FiniteAlgebra& a, const QuasiIdentity& q) {
  return all_envs(a.carrier_size(), vars_of(q), [&](const auto& env) {
    for (const auto& p : q.premises)
      if (eval(a, p.lhs, env) != eval(a, p.rhs, env)) return true;
    return eval(a, q.conclusion.lhs, env) == eval(a, q.conclusion.rhs, env);
  });
}

inline bool satisfies(const FiniteAlgebra& a, const Theory& t) {
  for (const auto& q : t.axioms)
    if (!satisfies(a, q)) return false;
  return true;
}

inline Table tabulate(const FiniteAlgebra& a, const Term& t, std::size_t arity) {
  std::vector<std::string> vars;
  for (std::size_t i = 1; i <= arity; ++i) vars.push_back("x" + std::to_string(i));
  Table out;
  all_envs(a.carrier_size(), vars, [&](const auto& env) {
    out.push_back(eval(a, t, env));
    return true;
  });
  return out;
}

inline FiniteAlgebra derived(const FiniteAlgebra& a, const Hypersubstitution& h) {
  std::vector<Table> tables;
  for (std::size_t i = 0; i < a.signature().size(); ++i)
    tables.push_back(tabulate(a, h.images()[i], a.signature()[i].arity));
  return FiniteAlgebra(a.name(), a.signature(), a.carrier_size(), std::move(tables));
}

inline Term apply(const Hypersubstitution& h, const Term& t) {
  if (t.is_var()) return t;
  std::map<std::string, Term> bind;
  for (std::size_t i = 0; i < t.arity(); ++i) bind.emplace("x" + std::to_string(i + 1), apply(h, t.args()[i]));
  std::function<Term(const Term&)> inst = [&](const Term& s) -> Term {
    if (s.is_var()) return bind.at(s.name());
    std::vector<Term> args;
    for (const auto& c : s.args()) args.push_back(inst(c));
    return Term::app(s.name(), std::move(args));
  };
  return inst(h.image(t.name()));
}

// Brute-force clone slice: every table on n^arity points is a candidate
// (indexed as a base-n numeral); iterate "table reachable as g(h1,...,hm)
// from reachable tables" to a fixpoint.
inline std::set<Table> clone(const FiniteAlgebra& a, std::size_t arity) {
  const std::size_t n = a.carrier_size();
  const std::size_t points = pow(n, arity);
  const std::size_t total = pow(n, points);
  auto decode = [&](std::size_t id) {
    Table t(points);
    for (std::size_t p = points; p-- > 0;) {
      t[p] = static_cast<Element>(id % n);
      id /= n;
    }
    return t;
  };
  auto encode = [&](const Table& t) {
    std::size_t id = 0;
    for (Element e : t) id = id * n + e;
    return id;
  };
  std::vector<bool> in(total, false);
  std::vector<Table> members;
  for (std::size_t i = 0; i < arity; ++i) {
    Table t(points);
    for (std::size_t p = 0; p < points; ++p) t[p] = static_cast<Element>(p / pow(n, arity - 1 - i) % n);
    if (!in[encode(t)]) {
      in[encode(t)] = true;
      members.push_back(t);
    }
  }
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t g = 0; g < a.signature().size(); ++g) {
      const std::size_t m = a.signature()[g].arity;
      const std::size_t count = members.size();
      std::vector<std::size_t> idx(m, 0);
      while (true) {
        Table t(points);
        for (std::size_t p = 0; p < points; ++p) {
          std::vector<Element> args;
          for (std::size_t i = 0; i < m; ++i) args.push_back(members[idx[i]][p]);
          t[p] = lookup(a, g, args);
        }
        if (!in[encode(t)]) {
          in[encode(t)] = true;
          members.push_back(t);
          grew = true;
        }
        std::size_t k = m;
        while (k > 0 && ++idx[k - 1] == count) idx[--k] = 0;
        if (k == 0) break;
      }
    }
  }
  std::set<Table> out;
  for (std::size_t id = 0; id < total; ++id)
    if (in[id]) out.insert(decode(id));
  return out;
}

// Theorem-side oracle: every magma whose table lies in the binary clone
// of `a` satisfies `t`.
inline bool derived_all_satisfy(const FiniteAlgebra& a, const Theory& t) {
  for (const auto& table : clone(a, 2))
    if (!oracle::satisfies(FiniteAlgebra("d", a.signature(), a.carrier_size(), {table}), t)) return false;
  return true;
}

// Naive bounded Birkhoff saturation over explicit pairs. Terms with at most
// `max_size` nodes over `vars`; one-hole replacement and substitution are
// applied literally.
struct Closure {
  std::vector<Term> universe;
  std::set<std::pair<std::size_t, std::size_t>> pairs;

  bool contains(const Term& l, const Term& r) const {
    auto find = [&](const Term& t) -> std::optional<std::size_t> {
      for (std::size_t i = 0; i < universe.size(); ++i)
        if (universe[i] == t) return i;
      return std::nullopt;
    };
    auto a = find(l), b = find(r);
    return a && b && pairs.contains({*a, *b});
  }
};

inline std::vector<Term> small_terms(const Signature& sig, const std::vector<std::string>& vars,
                                     std::uint64_t max_size) {
  std::vector<std::vector<Term>> by(max_size + 1);
  for (const auto& v : vars) by[1].push_back(Term::var(v));
  for (std::uint64_t s = 2; s <= max_size; ++s)
    for (const auto& sym : sig) {
      std::function<void(std::size_t, std::uint64_t, std::vector<Term>&)> go = [&](std::size_t i, std::uint64_t left,
                                                                                    std::vector<Term>& args) {
        if (i == sym.arity) {
          if (left == 0) by[s].push_back(Term::app(sym.name, args));
          return;
        }
        for (std::uint64_t k = 1; k <= left; ++k)
          for (const auto& t : by[k]) {
            args.push_back(t);
            go(i + 1, left - k, args);
            args.pop_back();
          }
      };
      std::vector<Term> args;
      go(0, s - 1, args);
    }
  std::vector<Term> out;
  for (auto& level : by) out.insert(out.end(), level.begin(), level.end());
  return out;
}

inline Closure closure(const Signature& sig, const std::vector<Equation>& seed, const std::vector<std::string>& vars,
                       std::uint64_t max_size, const std::vector<Hypersubstitution>& sigmas) {
  Closure c;
  c.universe = small_terms(sig, vars, max_size);
  std::map<std::string, std::size_t> id;
  for (std::size_t i = 0; i < c.universe.size(); ++i) id[to_string(c.universe[i])] = i;
  auto find = [&](const Term& t) -> std::optional<std::size_t> {
    if (t.size() > max_size) return std::nullopt;
    auto it = id.find(to_string(t));
    if (it == id.end()) return std::nullopt;
    return it->second;
  };
  const std::size_t u = c.universe.size();
  for (std::size_t i = 0; i < u; ++i) c.pairs.insert({i, i});
  for (const auto& e : seed) c.pairs.insert({*find(e.lhs), *find(e.rhs)});

  // Every substitution of the variables by universe terms.
  std::vector<Substitution> substs;
  {
    std::vector<std::size_t> idx(vars.size(), 0);
    while (true) {
      Substitution s;
      for (std::size_t i = 0; i < vars.size(); ++i) s.emplace(vars[i], c.universe[idx[i]]);
      substs.push_back(std::move(s));
      std::size_t k = vars.size();
      while (k > 0 && ++idx[k - 1] == u) idx[--k] = 0;
      if (k == 0) break;
    }
  }
  std::function<Term(const Term&, const Substitution&)> subst = [&](const Term& t, const Substitution& s) -> Term {
    if (t.is_var()) return s.at(t.name());
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(subst(a, s));
    return Term::app(t.name(), std::move(args));
  };

  bool grew = true;
  while (grew) {
    grew = false;
    auto add = [&](std::optional<std::size_t> a, std::optional<std::size_t> b) {
      if (a && b && c.pairs.insert({*a, *b}).second) grew = true;
    };
    auto snapshot = c.pairs;
    for (auto [a, b] : snapshot) {
      add(b, a);
      for (auto [p, q] : snapshot)
        if (p == b) add(a, q);
      for (const auto& s : substs) add(find(subst(c.universe[a], s)), find(subst(c.universe[b], s)));
      for (const auto& h : sigmas) add(find(apply(h, c.universe[a])), find(apply(h, c.universe[b])));
      // One-hole replacement: a term g(..., t_a, ...) becomes g(..., t_b, ...).
      for (std::size_t ctx = 0; ctx < u; ++ctx) {
        const Term& t = c.universe[ctx];
        for (std::size_t i = 0; i < t.arity(); ++i) {
          if (!(t.args()[i] == c.universe[a])) continue;
          std::vector<Term> args(t.args().begin(), t.args().end());
          args[i] = c.universe[b];
          add(ctx, find(Term::app(t.name(), std::move(args))));
        }
      }
    }
  }
  return c;
}

}  // namespace oracle
