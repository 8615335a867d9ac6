#pragma once

// Bounded equational closures of a set of identities:
//
//   E(S)     reflexivity, symmetry, transitivity, replacement, substitution
//   E^H(S)   E plus "from p = q infer sigma(p) = sigma(q)" for every
//            hypersubstitution sigma in a budget
//   E_M^H(S) the same with sigma restricted to a monoid M
//
// All closures live inside a finite universe: the terms with at most
// `max_term_size` nodes over a fixed variable pool. A rule instance is used
// only when all of its terms lie in the universe, which makes saturation
// finite; the resulting statements are bounded versions of the unbounded
// ones. The derived relation is an equivalence, stored as a partition of the
// universe.

#include <numeric>

#include "hyperq/hypersubst.hpp"

namespace hyperq {

struct Bounds {
  std::uint64_t max_term_size = 7;
  // Saturation rounds; a round processes every pending pair once.
  std::size_t max_steps = 1'000;
  // Image size of the hypersubstitutions used by hyper_closure.
  std::uint64_t image_size = 5;
  // Variables in the universe: those of the seed, padded up to this many.
  std::size_t max_vars = 3;
};

namespace detail {
inline std::vector<std::string> variable_pool(std::span<const Equation> seed, std::size_t max_vars) {
  std::vector<std::string> pool;
  std::unordered_set<std::string> seen;
  for (const auto& e : seed)
    for (const auto& v : variables_of(e))
      if (seen.insert(v).second) pool.push_back(v);
  static const char* const fill[] = {"x", "y", "z", "u", "v", "w"};
  std::size_t k = 0;
  while (pool.size() < max_vars) {
    std::string name = k < std::size(fill) ? fill[k] : "v" + std::to_string(k - std::size(fill) + 1);
    ++k;
    if (seen.insert(name).second) pool.push_back(name);
  }
  std::sort(pool.begin(), pool.end());
  return pool;
}

struct KeyHash {
  std::size_t operator()(const std::vector<std::uint32_t>& k) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (auto x : k) h = (h ^ x) * 0x100000001b3ULL;
    return h;
  }
};
}  // namespace detail

// The finite universe of terms a closure lives in, interned by id. Ids follow
// the `compare` order on terms.
class TermUniverse {
 public:
  static constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();

  TermUniverse(Signature sig, std::vector<std::string> vars, std::uint64_t max_size)
      : sig_(std::move(sig)), vars_(std::move(vars)), max_size_(max_size) {
    terms_ = terms_up_to(sig_, vars_, max_size_);
    index_.reserve(terms_.size());
    for (std::uint32_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i], i);
    nodes_.resize(terms_.size());
    for (std::uint32_t i = 0; i < terms_.size(); ++i) {
      const Term& t = terms_[i];
      Node& n = nodes_[i];
      n.size = static_cast<std::uint32_t>(t.size());
      if (t.is_var()) {
        n.symbol = none;
        n.var = static_cast<std::uint32_t>(std::find(vars_.begin(), vars_.end(), t.name()) - vars_.begin());
      } else {
        n.symbol = static_cast<std::uint32_t>(*sig_.find(t.name()));
        std::vector<std::uint32_t> key{n.symbol};
        for (const auto& a : t.args()) {
          n.children.push_back(index_.at(a));
          key.push_back(n.children.back());
        }
        app_index_.emplace(std::move(key), i);
      }
    }
  }

  const Signature& signature() const noexcept { return sig_; }
  const std::vector<std::string>& variables() const noexcept { return vars_; }
  std::uint64_t max_term_size() const noexcept { return max_size_; }
  std::size_t size() const noexcept { return terms_.size(); }
  const Term& term(std::uint32_t id) const { return terms_.at(id); }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  std::uint32_t find(const Term& t) const {
    if (t.size() > max_size_) return none;
    auto it = index_.find(t);
    return it == index_.end() ? none : it->second;
  }

  std::uint32_t node_size(std::uint32_t id) const { return nodes_[id].size; }
  bool is_var(std::uint32_t id) const { return nodes_[id].symbol == none; }
  std::uint32_t symbol(std::uint32_t id) const { return nodes_[id].symbol; }
  std::uint32_t var_index(std::uint32_t id) const { return nodes_[id].var; }
  const std::vector<std::uint32_t>& children(std::uint32_t id) const { return nodes_[id].children; }

  std::uint32_t app(const std::vector<std::uint32_t>& key) const {
    auto it = app_index_.find(key);
    return it == app_index_.end() ? none : it->second;
  }

  // Image of `id` under the variable assignment `subst` (pool index -> id,
  // `none` meaning unchanged), or `none` if it leaves the universe.
  std::uint32_t instantiate(std::uint32_t id, std::span<const std::uint32_t> subst,
                            std::vector<std::uint32_t>& key) const {
    const Node& n = nodes_[id];
    if (n.symbol == none) return subst[n.var] == none ? id : subst[n.var];
    std::vector<std::uint32_t> k{n.symbol};
    for (auto c : n.children) {
      auto r = instantiate(c, subst, key);
      if (r == none) return none;
      k.push_back(r);
    }
    return app(k);
  }

  friend bool operator==(const TermUniverse& a, const TermUniverse& b) {
    return a.max_size_ == b.max_size_ && a.sig_ == b.sig_ && a.vars_ == b.vars_;
  }

 private:
  struct Node {
    std::uint32_t symbol = none;
    std::uint32_t var = 0;
    std::uint32_t size = 1;
    std::vector<std::uint32_t> children;
  };

  Signature sig_;
  std::vector<std::string> vars_;
  std::uint64_t max_size_;
  std::vector<Term> terms_;
  std::unordered_map<Term, std::uint32_t, TermHash> index_;
  std::vector<Node> nodes_;
  std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, detail::KeyHash> app_index_;
};

// A bounded closure: a partition of the universe. Contains t = t for every
// universe term and is symmetric.
class ClosureSet {
 public:
  ClosureSet(std::shared_ptr<const TermUniverse> u, std::vector<std::uint32_t> rep, bool saturated, std::size_t rounds)
      : u_(std::move(u)), rep_(std::move(rep)), saturated_(saturated), rounds_(rounds) {}

  const TermUniverse& universe() const noexcept { return *u_; }
  std::shared_ptr<const TermUniverse> universe_ptr() const noexcept { return u_; }
  bool saturated() const noexcept { return saturated_; }
  std::size_t rounds() const noexcept { return rounds_; }
  std::uint64_t max_term_size() const noexcept { return u_->max_term_size(); }

  // Least universe id of the class of `id`.
  std::uint32_t representative(std::uint32_t id) const { return rep_.at(id); }

  bool contains(const Equation& e) const {
    auto l = u_->find(e.lhs);
    auto r = u_->find(e.rhs);
    return l != TermUniverse::none && r != TermUniverse::none && rep_[l] == rep_[r];
  }

  std::size_t class_count() const {
    std::size_t c = 0;
    for (std::uint32_t i = 0; i < rep_.size(); ++i) c += rep_[i] == i;
    return c;
  }

  // Number of identities, counting t = t and both orientations.
  std::uint64_t size() const {
    std::vector<std::uint64_t> count(rep_.size(), 0);
    for (auto r : rep_) ++count[r];
    std::uint64_t s = 0;
    for (auto c : count) s += c * c;
    return s;
  }

  // Classes as lists of ids in ascending order, ordered by representative.
  std::vector<std::vector<std::uint32_t>> classes() const {
    std::vector<std::vector<std::uint32_t>> by_rep(rep_.size());
    for (std::uint32_t i = 0; i < rep_.size(); ++i) by_rep[rep_[i]].push_back(i);
    std::vector<std::vector<std::uint32_t>> out;
    for (auto& c : by_rep)
      if (!c.empty()) out.push_back(std::move(c));
    return out;
  }

  // Every identity, sorted by (lhs, rhs) in universe order.
  std::vector<Equation> identities(bool include_trivial = true) const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (const auto& c : classes())
      for (auto a : c)
        for (auto b : c)
          if (include_trivial || a != b) pairs.emplace_back(a, b);
    std::sort(pairs.begin(), pairs.end());
    std::vector<Equation> out;
    out.reserve(pairs.size());
    for (auto [a, b] : pairs) out.push_back({u_->term(a), u_->term(b)});
    return out;
  }

  // t = representative(t) for every non-representative t: a generating set
  // whose closure under the equivalence rules is this set.
  std::vector<Equation> spanning() const {
    std::vector<Equation> out;
    for (std::uint32_t i = 0; i < rep_.size(); ++i)
      if (rep_[i] != i) out.push_back({u_->term(i), u_->term(rep_[i])});
    return out;
  }

  bool subset_of(const ClosureSet& other) const {
    if (!(*u_ == *other.u_)) throw std::invalid_argument("closures over different universes");
    for (std::uint32_t i = 0; i < rep_.size(); ++i)
      if (other.rep_[i] != other.rep_[rep_[i]]) return false;
    return true;
  }

  friend bool operator==(const ClosureSet& a, const ClosureSet& b) {
    return *a.u_ == *b.u_ && a.rep_ == b.rep_;
  }

 private:
  std::shared_ptr<const TermUniverse> u_;
  std::vector<std::uint32_t> rep_;
  bool saturated_;
  std::size_t rounds_;
};

namespace detail {

class Saturator {
 public:
  Saturator(std::shared_ptr<const TermUniverse> u, std::span<const Hypersubstitution> sigmas)
      : u_(std::move(u)), parent_(u_->size()), members_(u_->size()) {
    std::iota(parent_.begin(), parent_.end(), 0u);
    for (std::uint32_t i = 0; i < u_->size(); ++i) members_[i] = {i};
    classes_ = u_->size();
    for (const auto& s : sigmas) {
      std::vector<std::uint32_t> img(u_->size());
      detail::HsubApplier ap(s);
      for (std::uint32_t i = 0; i < u_->size(); ++i) img[i] = u_->find(ap(u_->term(i)));
      sigma_images_.push_back(std::move(img));
    }
  }

  void seed(std::span<const Equation> eqs) {
    for (const auto& e : eqs) {
      auto l = u_->find(e.lhs);
      auto r = u_->find(e.rhs);
      if (l != TermUniverse::none && r != TermUniverse::none) merge(l, r);
    }
  }

  ClosureSet run(std::size_t max_steps) {
    congruence();
    std::size_t rounds = 0;
    while (!pending_.empty() && classes_ > 1) {
      if (rounds == max_steps) return finish(false, rounds);
      ++rounds;
      auto batch = std::move(pending_);
      pending_.clear();
      for (const auto& [left, right] : batch) {
        for (auto p : left)
          for (auto q : right) {
            if (classes_ == 1) break;
            process(p, q);
          }
      }
      congruence();
    }
    return finish(true, rounds);
  }

 private:
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool merge(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (members_[a].size() < members_[b].size()) std::swap(a, b);
    pending_.emplace_back(members_[a], members_[b]);
    members_[a].insert(members_[a].end(), members_[b].begin(), members_[b].end());
    members_[b].clear();
    members_[b].shrink_to_fit();
    parent_[b] = a;
    --classes_;
    return true;
  }

  // Replacement: terms with the same symbol and pairwise related arguments
  // are related.
  void congruence() {
    bool changed = true;
    std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, KeyHash> sig;
    while (changed && classes_ > 1) {
      changed = false;
      sig.clear();
      for (std::uint32_t t = 0; t < u_->size(); ++t) {
        if (u_->is_var(t)) continue;
        std::vector<std::uint32_t> key{u_->symbol(t)};
        for (auto c : u_->children(t)) key.push_back(find(c));
        auto [it, inserted] = sig.emplace(std::move(key), t);
        if (!inserted && merge(it->second, t)) changed = true;
      }
    }
  }

  void process(std::uint32_t p, std::uint32_t q) {
    for (const auto& img : sigma_images_) {
      auto a = img[p];
      auto b = img[q];
      if (a != TermUniverse::none && b != TermUniverse::none) merge(a, b);
    }
    substitutions(p, q);
  }

  // Every substitution s with s(p) and s(q) inside the universe.
  void substitutions(std::uint32_t p, std::uint32_t q) {
    const std::size_t nv = u_->variables().size();
    std::vector<std::uint32_t> occ_p(nv, 0), occ_q(nv, 0);
    count_vars(p, occ_p);
    count_vars(q, occ_q);
    std::vector<std::uint32_t> vars;
    for (std::uint32_t v = 0; v < nv; ++v)
      if (occ_p[v] || occ_q[v]) vars.push_back(v);
    std::vector<std::uint32_t> subst(nv, TermUniverse::none);
    std::vector<std::uint32_t> key;
    const std::uint64_t bound = u_->max_term_size();
    const std::uint32_t n_terms = static_cast<std::uint32_t>(u_->size());
    auto rec = [&](auto&& self, std::size_t k, std::uint64_t size_p, std::uint64_t size_q) -> void {
      if (classes_ == 1) return;
      if (k == vars.size()) {
        auto a = u_->instantiate(p, subst, key);
        auto b = u_->instantiate(q, subst, key);
        if (a != TermUniverse::none && b != TermUniverse::none) merge(a, b);
        return;
      }
      const std::uint32_t v = vars[k];
      for (std::uint32_t img = 0; img < n_terms; ++img) {
        const std::uint64_t grow = u_->node_size(img) - 1;
        const std::uint64_t sp = size_p + occ_p[v] * grow;
        const std::uint64_t sq = size_q + occ_q[v] * grow;
        // universe ids are ordered by size
        if (sp > bound || sq > bound) break;
        subst[v] = img;
        self(self, k + 1, sp, sq);
      }
      subst[v] = TermUniverse::none;
    };
    rec(rec, 0, u_->node_size(p), u_->node_size(q));
  }

  void count_vars(std::uint32_t t, std::vector<std::uint32_t>& occ) const {
    if (u_->is_var(t)) {
      ++occ[u_->var_index(t)];
      return;
    }
    for (auto c : u_->children(t)) count_vars(c, occ);
  }

  ClosureSet finish(bool saturated, std::size_t rounds) {
    std::vector<std::uint32_t> rep(u_->size());
    std::vector<std::uint32_t> least(u_->size(), TermUniverse::none);
    for (std::uint32_t i = 0; i < u_->size(); ++i) {
      auto r = find(i);
      if (least[r] == TermUniverse::none) least[r] = i;
      rep[i] = least[r];
    }
    return ClosureSet(u_, std::move(rep), saturated, rounds);
  }

  std::shared_ptr<const TermUniverse> u_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::vector<std::uint32_t>> members_;
  std::size_t classes_ = 0;
  std::vector<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>> pending_;
  std::vector<std::vector<std::uint32_t>> sigma_images_;
};

inline void check_bounds(const Bounds& b) {
  if (b.max_term_size == 0 || b.max_steps == 0 || b.max_vars == 0)
    throw std::invalid_argument("bounds must be positive");
}

inline std::shared_ptr<const TermUniverse> make_universe(const Signature& sig, std::span<const Equation> seed,
                                                         const Bounds& b) {
  check_bounds(b);
  for (const auto& e : seed) {
    check_term(sig, e.lhs);
    check_term(sig, e.rhs);
  }
  return std::make_shared<const TermUniverse>(sig, variable_pool(seed, b.max_vars), b.max_term_size);
}

}  // namespace detail

// Closure of `seed` inside `universe` under the equational rules and the
// given hypersubstitutions.
inline ClosureSet closure_in(std::shared_ptr<const TermUniverse> universe, std::span<const Equation> seed,
                             std::span<const Hypersubstitution> sigmas, std::size_t max_steps) {
  detail::Saturator s(std::move(universe), sigmas);
  s.seed(seed);
  return s.run(max_steps);
}

inline ClosureSet closure_with(const Signature& sig, std::span<const Equation> seed,
                               std::span<const Hypersubstitution> sigmas, const Bounds& b) {
  return closure_in(detail::make_universe(sig, seed, b), seed, sigmas, b.max_steps);
}

inline ClosureSet birkhoff_closure(const Signature& sig, std::span<const Equation> seed, const Bounds& b = {}) {
  return closure_with(sig, seed, {}, b);
}

inline ClosureSet hyper_closure(const Signature& sig, std::span<const Equation> seed, const Bounds& b = {}) {
  auto sigmas = hsubs_up_to(sig, b.image_size);
  return closure_with(sig, seed, sigmas, b);
}

inline ClosureSet m_hyper_closure(const Signature& sig, std::span<const Equation> seed, const HsubMonoid& m,
                                  const Bounds& b = {}) {
  if (!(m.signature == sig)) throw std::invalid_argument("monoid over another signature");
  return closure_with(sig, seed, m.elements, b);
}

// Re-closing an existing closure keeps its variable pool; the term bound
// comes from `b`.
inline std::shared_ptr<const TermUniverse> universe_for(const ClosureSet& seed, const Bounds& b) {
  detail::check_bounds(b);
  const auto& u = seed.universe();
  if (u.max_term_size() == b.max_term_size) return seed.universe_ptr();
  return std::make_shared<const TermUniverse>(u.signature(), u.variables(), b.max_term_size);
}

inline ClosureSet birkhoff_closure(const ClosureSet& seed, const Bounds& b = {}) {
  return closure_in(universe_for(seed, b), seed.spanning(), {}, b.max_steps);
}

inline ClosureSet hyper_closure(const ClosureSet& seed, const Bounds& b = {}) {
  auto sigmas = hsubs_up_to(seed.universe().signature(), b.image_size);
  return closure_in(universe_for(seed, b), seed.spanning(), sigmas, b.max_steps);
}

inline ClosureSet m_hyper_closure(const ClosureSet& seed, const HsubMonoid& m, const Bounds& b = {}) {
  if (!(m.signature == seed.universe().signature())) throw std::invalid_argument("monoid over another signature");
  return closure_in(universe_for(seed, b), seed.spanning(), m.elements, b.max_steps);
}

// ---------------------------------------------------------------------------
// Closure under the hypersubstitution rule

struct RuleCheck {
  bool closed = true;
  // First violation: an identity of the set whose sigma-image is missing.
  std::optional<Equation> source;
  std::optional<Hypersubstitution> sigma;
  std::optional<Equation> missing;
};

// Images larger than the set's term bound are ignored.
inline RuleCheck is_closed_under_rule6(const ClosureSet& set, std::span<const Hypersubstitution> sigmas) {
  const auto& u = set.universe();
  for (const auto& sigma : sigmas) {
    detail::HsubApplier ap(sigma);
    std::vector<std::uint32_t> img(u.size());
    for (std::uint32_t i = 0; i < u.size(); ++i) img[i] = u.find(ap(u.term(i)));
    for (const auto& cls : set.classes()) {
      for (std::size_t i = 0; i < cls.size(); ++i)
        for (std::size_t j = i + 1; j < cls.size(); ++j) {
          auto a = img[cls[i]];
          auto b = img[cls[j]];
          if (a == TermUniverse::none || b == TermUniverse::none) continue;
          if (set.representative(a) != set.representative(b))
            return {false, Equation{u.term(cls[i]), u.term(cls[j])}, sigma, Equation{u.term(a), u.term(b)}};
        }
    }
  }
  return {};
}

// For an explicit list: every sigma-image within `max_term_size` must be in
// the list (in either orientation) or be trivial.
inline RuleCheck is_closed_under_rule6(std::span<const Equation> set, std::span<const Hypersubstitution> sigmas,
                                       std::uint64_t max_term_size) {
  auto present = [&](const Equation& e) {
    if (e.lhs == e.rhs) return true;
    return std::any_of(set.begin(), set.end(), [&](const Equation& f) {
      return (f.lhs == e.lhs && f.rhs == e.rhs) || (f.lhs == e.rhs && f.rhs == e.lhs);
    });
  };
  for (const auto& sigma : sigmas)
    for (const auto& e : set) {
      Equation img = apply_hsub(sigma, e);
      if (img.lhs.size() > max_term_size || img.rhs.size() > max_term_size) continue;
      if (!present(img)) return {false, e, sigma, img};
    }
  return {};
}

struct ClosureComparison {
  ClosureSet e;
  ClosureSet eh;
  std::optional<ClosureSet> emh;
  bool e_equals_eh = false;
  std::optional<bool> e_equals_emh;
  RuleCheck seed_closed_full;
  std::optional<RuleCheck> seed_closed_m;
};

namespace detail {
inline ClosureComparison compare_in(std::shared_ptr<const TermUniverse> u, std::span<const Equation> seed,
                                    const HsubMonoid* m, const Bounds& b) {
  const Signature& sig = u->signature();
  auto full = hsubs_up_to(sig, b.image_size);
  ClosureSet e = closure_in(u, seed, {}, b.max_steps);
  ClosureSet eh = closure_in(u, seed, full, b.max_steps);
  ClosureComparison c{e, eh, std::nullopt, e == eh, std::nullopt, is_closed_under_rule6(e, full), std::nullopt};
  if (m) {
    if (!(m->signature == sig)) throw std::invalid_argument("monoid over another signature");
    ClosureSet emh = closure_in(u, seed, m->elements, b.max_steps);
    c.e_equals_emh = e == emh;
    c.seed_closed_m = is_closed_under_rule6(e, m->elements);
    c.emh = std::move(emh);
  }
  return c;
}
}  // namespace detail

// E, E^H and (when M is given) E_M^H of one seed in one universe, with
// equality flags and whether E itself is closed under the hypersubstitution
// rules.
inline ClosureComparison compare_closures(const Signature& sig, std::span<const Equation> seed, const HsubMonoid* m,
                                          const Bounds& b = {}) {
  return detail::compare_in(detail::make_universe(sig, seed, b), seed, m, b);
}

inline ClosureComparison compare_closures(const ClosureSet& seed, const HsubMonoid* m, const Bounds& b = {}) {
  auto eqs = seed.spanning();
  return detail::compare_in(universe_for(seed, b), eqs, m, b);
}

}  // namespace hyperq
