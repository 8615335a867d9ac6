#pragma once

// Decision procedures over finite algebras:
//
//   check_identity              A |= s = t
//   check_quasi_identity        A |= p1 & ... & pk -> c
//   check_hyperidentity         every hypersubstitution image of s = t holds
//   check_hyper_quasi_identity  every hypersubstitution image of the
//                               implication holds (sigma applied uniformly)
//
// Hyper checks quantify either over a given monoid M of hypersubstitutions
// or, when M is absent, over all choices of term operations per symbol
// (the clone slices of A). Two hypersubstitutions inducing the same term
// operations in A induce the same satisfaction, so the finite semantic
// quantifier decides the unrestricted one. Counterexamples are the least
// hypersubstitution in enumeration order, then the lexicographically least
// environment.

#include "hyperq/algebra.hpp"

namespace hyperq {

struct Counterexample {
  Environment env;
  Element lhs = 0;
  Element rhs = 0;
};

struct Verdict {
  bool holds = true;
  std::optional<Counterexample> counterexample;
};

struct HyperCounterexample {
  Hypersubstitution sigma;
  QuasiIdentity induced;
  Counterexample at;
};

struct HyperVerdict {
  bool holds = true;
  // False when the hypersubstitution scope came from a truncated clone
  // slice: a passing verdict is then only a lower bound.
  bool complete = true;
  std::optional<HyperCounterexample> counterexample;
  std::size_t hsubs_checked = 0;

  bool inconclusive() const noexcept { return holds && !complete; }
};

namespace detail {

inline Verdict first_violation(const FiniteAlgebra& a, std::span<const Equation> premises, const Equation& conclusion,
                               const std::vector<std::string>& vars) {
  BatchEvaluator ev(a, vars);
  const std::uint64_t total = ev.environment_count();
  for (std::uint64_t first = 0; first < total; first += BatchEvaluator::default_block) {
    const auto count = static_cast<std::size_t>(std::min<std::uint64_t>(BatchEvaluator::default_block, total - first));
    ev.set_block(first, count);
    std::vector<Element> live(count, 1);
    for (const auto& p : premises) {
      const Table& l = ev.eval(p.lhs);
      const Table& r = ev.eval(p.rhs);
      for (std::size_t e = 0; e < count; ++e) live[e] &= static_cast<Element>(l[e] == r[e]);
    }
    const Table& l = ev.eval(conclusion.lhs);
    const Table& r = ev.eval(conclusion.rhs);
    for (std::size_t e = 0; e < count; ++e) {
      if (live[e] && l[e] != r[e]) return Verdict{false, Counterexample{ev.environment(first + e), l[e], r[e]}};
    }
  }
  return Verdict{};
}

}  // namespace detail

inline Verdict check_identity(const FiniteAlgebra& a, const Equation& e) {
  return detail::first_violation(a, {}, e, variables_of(e));
}

inline Verdict check_quasi_identity(const FiniteAlgebra& a, const QuasiIdentity& q) {
  if (q.is_identity()) return check_identity(a, q.conclusion);
  return detail::first_violation(a, q.premises, q.conclusion, variables_of(q));
}

// The set of hypersubstitutions a hyper check quantifies over.
class HyperScope {
 public:
  // All term-operation choices of `a` (clone slices computed with `cap`).
  static HyperScope semantic(const FiniteAlgebra& a, std::size_t cap = default_clone_cap) {
    return semantic(a, clone_slices(a, cap));
  }

  static HyperScope semantic(const FiniteAlgebra& a, CloneSlices slices) {
    HyperScope s;
    s.sig_ = a.signature();
    s.slices_ = std::move(slices);
    return s;
  }

  static HyperScope from_monoid(const HsubMonoid& m) {
    HyperScope s;
    s.sig_ = m.signature;
    s.monoid_ = m.elements;
    return s;
  }

  static HyperScope for_algebra(const FiniteAlgebra& a, const HsubMonoid* m, std::size_t cap = default_clone_cap) {
    return m ? from_monoid(*m) : semantic(a, cap);
  }

  bool is_semantic() const noexcept { return slices_.has_value(); }
  bool complete() const { return !slices_ || all_complete(*slices_); }
  const CloneSlices* slices() const { return slices_ ? &*slices_ : nullptr; }
  const Signature& signature() const noexcept { return sig_; }

  // f(sigma) -> bool (false stops); returns true when every element was visited.
  template <class F>
  bool for_each(F&& f) const {
    if (slices_) {
      return for_each_semantic_choice(sig_, *slices_, [&](const std::vector<std::size_t>& choice) {
        return f(witness_hsub(sig_, *slices_, choice));
      });
    }
    for (const auto& h : monoid_)
      if (!f(h)) return false;
    return true;
  }

 private:
  HyperScope() = default;

  Signature sig_;
  std::optional<CloneSlices> slices_;
  std::vector<Hypersubstitution> monoid_;
};

inline HyperVerdict check_hyper_quasi_identity(const FiniteAlgebra& a, const QuasiIdentity& q,
                                               const HyperScope& scope) {
  HyperVerdict v;
  v.complete = scope.complete();
  scope.for_each([&](const Hypersubstitution& sigma) {
    ++v.hsubs_checked;
    QuasiIdentity induced = apply_hsub(sigma, q);
    Verdict plain = check_quasi_identity(a, induced);
    if (plain.holds) return true;
    v.holds = false;
    v.counterexample = HyperCounterexample{sigma, std::move(induced), std::move(*plain.counterexample)};
    return false;
  });
  return v;
}

inline HyperVerdict check_hyper_quasi_identity(const FiniteAlgebra& a, const QuasiIdentity& q,
                                               const HsubMonoid* m = nullptr, std::size_t cap = default_clone_cap) {
  return check_hyper_quasi_identity(a, q, HyperScope::for_algebra(a, m, cap));
}

inline HyperVerdict check_hyperidentity(const FiniteAlgebra& a, const Equation& e, const HyperScope& scope) {
  return check_hyper_quasi_identity(a, QuasiIdentity{{}, e}, scope);
}

inline HyperVerdict check_hyperidentity(const FiniteAlgebra& a, const Equation& e, const HsubMonoid* m = nullptr,
                                        std::size_t cap = default_clone_cap) {
  return check_hyperidentity(a, e, HyperScope::for_algebra(a, m, cap));
}

// ---------------------------------------------------------------------------
// Theories

enum class Mode { plain, hyper };

inline std::string_view to_string(Mode m) { return m == Mode::plain ? "plain" : "hyper"; }

struct AxiomReport {
  std::size_t index = 0;
  // Plain-mode failures carry the identity hypersubstitution as witness.
  HyperVerdict verdict;
};

struct TheoryReport {
  std::vector<AxiomReport> axioms;
  bool holds = true;
  bool complete = true;

  bool inconclusive() const noexcept { return holds && !complete; }
};

inline void require_same_signature(const FiniteAlgebra& a, const Signature& sig) {
  if (!a.signature().same_symbols(sig))
    throw std::invalid_argument("signature mismatch: algebra '" + a.name() + "' has " + to_string(a.signature()) +
                                ", theory has " + to_string(sig));
}

inline HyperVerdict check_plain(const FiniteAlgebra& a, const QuasiIdentity& q) {
  Verdict p = check_quasi_identity(a, q);
  HyperVerdict v;
  v.hsubs_checked = 1;
  v.holds = p.holds;
  if (!p.holds) v.counterexample = HyperCounterexample{identity_hsub(a.signature()), q, std::move(*p.counterexample)};
  return v;
}

// `scope` is only consulted in hyper mode.
inline TheoryReport check_theory(const FiniteAlgebra& a, const Theory& t, Mode mode, const HyperScope* scope) {
  require_same_signature(a, t.signature);
  TheoryReport r;
  for (std::size_t i = 0; i < t.axioms.size(); ++i) {
    HyperVerdict v = mode == Mode::plain ? check_plain(a, t.axioms[i]) : check_hyper_quasi_identity(a, t.axioms[i], *scope);
    r.holds = r.holds && v.holds;
    r.complete = r.complete && v.complete;
    r.axioms.push_back({i, std::move(v)});
  }
  return r;
}

inline TheoryReport check_theory(const FiniteAlgebra& a, const Theory& t, Mode mode, const HsubMonoid* m = nullptr,
                                 std::size_t cap = default_clone_cap) {
  if (mode == Mode::plain || t.axioms.empty()) return check_theory(a, t, mode, static_cast<const HyperScope*>(nullptr));
  require_same_signature(a, t.signature);
  HyperScope scope = HyperScope::for_algebra(a, m, cap);
  return check_theory(a, t, mode, &scope);
}

// Plain satisfaction of every axiom, stopping at the first failure.
inline bool satisfies(const FiniteAlgebra& a, const Theory& t) {
  return std::all_of(t.axioms.begin(), t.axioms.end(),
                     [&](const QuasiIdentity& q) { return check_quasi_identity(a, q).holds; });
}

}  // namespace hyperq
