#pragma once

// Closure under derived algebras, and the per-algebra equivalence
//
//   every axiom of S is hyper-quasi-satisfied in A
//     <=>  every derived algebra A^sigma satisfies S
//
// for the full hypersubstitution monoid or a given submonoid M. A class
// defined by S is never materialised; it is represented by S together with
// explicit finite witness algebras.

#include <random>
#include <thread>
#include <unordered_set>

#include "hyperq/satisfaction.hpp"

namespace hyperq {

struct DerivedAlgebra {
  FiniteAlgebra algebra;
  Hypersubstitution witness;
};

struct DerivedSet {
  std::vector<DerivedAlgebra> algebras;
  // False when a clone slice was truncated.
  bool complete = true;
};

namespace detail {
struct TablesHash {
  std::size_t operator()(const std::vector<Table>& ts) const noexcept {
    std::size_t h = 0;
    for (const auto& t : ts) h = (h ^ TableHash{}(t)) * 0x100000001b3ULL;
    return h;
  }
};
}  // namespace detail

// One algebra per distinct tuple of tables, in scope order. The first entry
// corresponds to the first hypersubstitution of the scope; A itself is always
// present.
inline DerivedSet enumerate_derived_algebras(const FiniteAlgebra& a, const HyperScope& scope) {
  DerivedSet out;
  out.complete = scope.complete();
  std::unordered_set<std::vector<Table>, detail::TablesHash> seen;
  auto keep = [&](FiniteAlgebra d, Hypersubstitution w) {
    if (!seen.insert(d.tables()).second) return;
    d = d.renamed(a.name() + "^" + std::to_string(out.algebras.size()));
    out.algebras.push_back({std::move(d), std::move(w)});
  };
  if (const CloneSlices* slices = scope.slices()) {
    for_each_semantic_choice(a.signature(), *slices, [&](const std::vector<std::size_t>& choice) {
      keep(derived_from_choice(a, *slices, choice), witness_hsub(a.signature(), *slices, choice));
      return true;
    });
  } else {
    scope.for_each([&](const Hypersubstitution& h) {
      keep(derived_algebra(a, h), h);
      return true;
    });
  }
  return out;
}

inline DerivedSet enumerate_derived_algebras(const FiniteAlgebra& a, const HsubMonoid* m = nullptr,
                                             std::size_t cap = default_clone_cap) {
  return enumerate_derived_algebras(a, HyperScope::for_algebra(a, m, cap));
}

// ---------------------------------------------------------------------------
// Solidity

struct DerivedVerdict {
  DerivedAlgebra derived;
  TheoryReport report;
};

struct SolidityEntry {
  std::string algebra;
  bool in_qv = false;
  std::vector<DerivedVerdict> derived;
  // Every derived algebra satisfies the basis (meaningful when in_qv).
  bool closed = true;
  bool complete = true;
};

struct SolidityReport {
  std::vector<SolidityEntry> entries;
  bool solid = true;
  bool complete = true;

  bool inconclusive() const noexcept { return solid && !complete; }
};

// Algebras outside QV are listed but do not affect the solid flag.
inline SolidityReport check_solid(std::span<const FiniteAlgebra> algebras, const Theory& basis,
                                  const HsubMonoid* m = nullptr, std::size_t cap = default_clone_cap) {
  SolidityReport r;
  for (const auto& a : algebras) {
    require_same_signature(a, basis.signature);
    SolidityEntry e;
    e.algebra = a.name();
    e.in_qv = satisfies(a, basis);
    if (e.in_qv) {
      DerivedSet ds = enumerate_derived_algebras(a, m, cap);
      e.complete = ds.complete;
      for (auto& d : ds.algebras) {
        TheoryReport tr = check_theory(d.algebra, basis, Mode::plain);
        e.closed = e.closed && tr.holds;
        e.derived.push_back({std::move(d), std::move(tr)});
      }
      r.solid = r.solid && e.closed;
      r.complete = r.complete && e.complete;
    }
    r.entries.push_back(std::move(e));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Theorem harness

enum class TheoremStatus { agree, disagree, skipped, inconclusive };

inline std::string_view to_string(TheoremStatus s) {
  switch (s) {
    case TheoremStatus::agree: return "agree";
    case TheoremStatus::disagree: return "disagree";
    case TheoremStatus::skipped: return "skipped";
    case TheoremStatus::inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct TheoremEntry {
  std::string label;
  bool member = false;
  // Basis hyper-quasi-satisfied in the algebra.
  bool lhs = false;
  // Every derived algebra satisfies the basis.
  bool rhs = false;
  bool agree = true;
  TheoremStatus status = TheoremStatus::skipped;
  std::size_t derived_count = 0;
};

struct TheoremReport {
  std::vector<TheoremEntry> entries;
  std::size_t total = 0;
  std::size_t agreeing = 0;  // includes skipped non-members
  std::size_t skipped = 0;
  std::size_t inconclusive = 0;
  std::size_t disagreeing = 0;

  bool verified() const noexcept { return disagreeing == 0 && inconclusive == 0; }

  void add(TheoremEntry e) {
    ++total;
    switch (e.status) {
      case TheoremStatus::agree: ++agreeing; break;
      case TheoremStatus::skipped:
        ++agreeing;
        ++skipped;
        break;
      case TheoremStatus::inconclusive: ++inconclusive; break;
      case TheoremStatus::disagree: ++disagreeing; break;
    }
    entries.push_back(std::move(e));
  }
};

// Both sides are computed independently: the left side applies each
// hypersubstitution to the basis and evaluates in A, the right side builds
// the derived algebras' tables and evaluates the basis there. `scope` is
// only built when A satisfies the basis.
template <class ScopeFn>
TheoremEntry verify_theorem_4_1_with(const FiniteAlgebra& a, const Theory& basis, ScopeFn&& scope_for) {
  require_same_signature(a, basis.signature);
  TheoremEntry e;
  e.label = a.name();
  e.member = satisfies(a, basis);
  if (!e.member) {
    // The identity hypersubstitution already refutes both sides.
    e.lhs = e.rhs = false;
    e.agree = true;
    e.status = TheoremStatus::skipped;
    return e;
  }
  const HyperScope& scope = scope_for();
  e.lhs = check_theory(a, basis, Mode::hyper, &scope).holds;
  DerivedSet ds = enumerate_derived_algebras(a, scope);
  e.derived_count = ds.algebras.size();
  e.rhs = std::all_of(ds.algebras.begin(), ds.algebras.end(),
                      [&](const DerivedAlgebra& d) { return satisfies(d.algebra, basis); });
  e.agree = e.lhs == e.rhs;
  if (scope.complete())
    e.status = e.agree ? TheoremStatus::agree : TheoremStatus::disagree;
  else
    e.status = (!e.lhs && !e.rhs) ? TheoremStatus::agree : TheoremStatus::inconclusive;
  return e;
}

inline TheoremEntry verify_theorem_4_1(const FiniteAlgebra& a, const Theory& basis, const HyperScope& scope) {
  return verify_theorem_4_1_with(a, basis, [&]() -> const HyperScope& { return scope; });
}

inline TheoremEntry verify_theorem_4_1(const FiniteAlgebra& a, const Theory& basis, const HsubMonoid* m = nullptr,
                                       std::size_t cap = default_clone_cap) {
  std::optional<HyperScope> scope;
  return verify_theorem_4_1_with(a, basis, [&]() -> const HyperScope& {
    scope.emplace(HyperScope::for_algebra(a, m, cap));
    return *scope;
  });
}

// Magmas on {0..n-1} with one binary symbol, identified by their table read
// as a base-n numeral (entry 0 most significant).
inline FiniteAlgebra magma_from_id(std::size_t n, std::uint64_t id, const Signature& sig) {
  if (sig.size() != 1 || sig[0].arity != 2) throw std::invalid_argument("magma sweep needs exactly one binary symbol");
  const std::size_t cells = n * n;
  Table t(cells);
  std::uint64_t x = id;
  for (std::size_t i = cells; i-- > 0;) {
    t[i] = static_cast<Element>(x % n);
    x /= n;
  }
  return FiniteAlgebra(std::to_string(id), sig, n, {std::move(t)});
}

inline std::uint64_t magma_id(const FiniteAlgebra& a) {
  std::uint64_t id = 0;
  for (Element e : a.table(0)) id = id * a.carrier_size() + e;
  return id;
}

struct SweepOptions {
  std::optional<std::size_t> sample;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::size_t clone_cap = default_clone_cap;
};

inline constexpr std::size_t max_exhaustive_carrier = 3;

// Table ids to visit: all of them (n <= 3), or `sample` distinct ids drawn
// with a seeded generator; ascending either way.
inline std::vector<std::uint64_t> sweep_ids(std::size_t n, const SweepOptions& opt) {
  const std::uint64_t total = checked_power(n, n * n, std::uint64_t{1} << 62);
  std::vector<std::uint64_t> ids;
  if (!opt.sample || *opt.sample >= total) {
    if (n > max_exhaustive_carrier)
      throw std::invalid_argument("carrier > " + std::to_string(max_exhaustive_carrier) + " requires sampling");
    ids.resize(total);
    for (std::uint64_t i = 0; i < total; ++i) ids[i] = i;
    return ids;
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::uint64_t> dist(0, total - 1);
  std::unordered_set<std::uint64_t> chosen;
  while (chosen.size() < *opt.sample) chosen.insert(dist(rng));
  ids.assign(chosen.begin(), chosen.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline TheoremReport sweep_theorem(std::size_t n, const Theory& basis, const HsubMonoid* m = nullptr,
                                   const SweepOptions& opt = {}) {
  if (n == 0) throw std::invalid_argument("carrier must be non-empty");
  if (basis.signature.size() != 1 || basis.signature[0].arity != 2)
    throw std::invalid_argument("magma sweep needs exactly one binary symbol");
  const auto ids = sweep_ids(n, opt);
  std::vector<TheoremEntry> entries(ids.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < ids.size(); i += stride)
      entries[i] = verify_theorem_4_1(magma_from_id(n, ids[i], basis.signature), basis, m, opt.clone_cap);
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(opt.jobs, ids.size()));
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
  }
  TheoremReport r;
  for (auto& e : entries) r.add(std::move(e));
  return r;
}

}  // namespace hyperq
