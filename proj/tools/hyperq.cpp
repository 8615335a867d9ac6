// hyperq: command-line front end.
//
//   hyperq check     --algebra A.alg --theory T.thy --mode id|qid|hyper|hqid [--monoid M.hsub]
//   hyperq derive    --algebra A.alg --hsub H.hsub
//   hyperq clone     --algebra A.alg --arity N [--cap K]
//   hyperq solid     --algebra A.alg [--algebra B.alg ...] --theory T.thy [--monoid M.hsub]
//   hyperq theorem41 --carrier N --theory T.thy [--sample K --seed S] [--monoid M.hsub]
//   hyperq infer     --theory T.thy --rules E|EH|EMH [--monoid M.hsub] [--compare]
//
// Exit codes: 0 holds / solid / agree / equal, 1 a check failed, 2 input
// error, 3 inconclusive (clone slice truncated by the cap).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hyperq/hyperq.hpp"
#include "json.hpp"

namespace {

using json = nlohmann::json;
using namespace hyperq;

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_input = 2;
constexpr int exit_inconclusive = 3;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class F>
auto parse_file(const std::string& path, F&& parse) {
  std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

struct Common {
  std::string format = "text";
  std::optional<std::size_t> cap;
  std::size_t jobs = 1;
  std::string monoid_path;
  std::size_t monoid_size = MonoidBudget{}.max_elements;
  std::uint64_t monoid_image = MonoidBudget{}.max_image_size;

  bool json() const { return format == "json"; }

  std::size_t clone_cap() const {
    if (cap) return *cap;
    if (const char* env = std::getenv("HYPERQ_CLONE_CAP")) {
      try {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(env, &pos);
        if (pos == std::string_view(env).size() && v > 0) return static_cast<std::size_t>(v);
      } catch (const std::exception&) {
      }
      throw InputError("HYPERQ_CLONE_CAP must be a positive integer");
    }
    return default_clone_cap;
  }

  std::optional<HsubMonoid> monoid(const Signature& sig) const {
    if (monoid_path.empty()) return std::nullopt;
    auto gens = parse_file(monoid_path, [&](const std::string& t) { return parse_hsubs(t, sig); });
    return generate_monoid(sig, std::move(gens), MonoidBudget{monoid_size, monoid_image});
  }
};

void add_common(CLI::App* cmd, Common& c, bool with_monoid) {
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--cap", c.cap, "Clone slice cap (overrides HYPERQ_CLONE_CAP)")->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
  if (with_monoid) {
    cmd->add_option("--monoid", c.monoid_path, "Hypersubstitution file with monoid generators");
    cmd->add_option("--monoid-size", c.monoid_size, "Monoid element budget")->check(CLI::PositiveNumber);
    cmd->add_option("--monoid-image", c.monoid_image, "Monoid image size budget")->check(CLI::PositiveNumber);
  }
}

std::vector<FiniteAlgebra> load_algebras(const std::vector<std::string>& paths) {
  std::vector<FiniteAlgebra> out;
  for (const auto& p : paths)
    for (auto& a : parse_file(p, [](const std::string& t) { return parse_algebras(t); })) out.push_back(std::move(a));
  return out;
}

FiniteAlgebra conform(const FiniteAlgebra& a, const Signature& sig) {
  if (!a.signature().same_symbols(sig))
    throw InputError("signature mismatch: algebra '" + a.name() + "' has " + to_string(a.signature()) +
                     ", theory has " + to_string(sig));
  return a.with_signature(sig);
}

std::string env_text(const Environment& env) {
  std::string s;
  for (const auto& [v, e] : env) s += (s.empty() ? "" : " ") + v + "=" + std::to_string(e);
  return s.empty() ? "(empty)" : s;
}

json env_json(const Environment& env) {
  json j = json::object();
  for (const auto& [v, e] : env) j[v] = e;
  return j;
}

json hsub_json(const Hypersubstitution& h) {
  json j = json::object();
  for (std::size_t i = 0; i < h.signature().size(); ++i) j[h.signature()[i].name] = to_string(h.image(i));
  return j;
}

json table_json(const Table& t) { return json(t); }

std::string table_text(const Table& t) {
  std::string s = "[";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s + "]";
}

// ---------------------------------------------------------------------------

struct CheckArgs {
  Common common;
  std::string algebra;
  std::string theory;
  std::string mode;
};

int cmd_check(const CheckArgs& args) {
  Theory th = parse_file(args.theory, [](const std::string& t) { return parse_theory(t); });
  const bool identities_only = args.mode == "id" || args.mode == "hyper";
  const Mode mode = (args.mode == "id" || args.mode == "qid") ? Mode::plain : Mode::hyper;
  if (identities_only)
    for (std::size_t i = 0; i < th.axioms.size(); ++i)
      if (!th.axioms[i].is_identity())
        throw InputError("mode '" + args.mode + "' needs identities; axiom " + std::to_string(i) +
                         " is a quasi-identity (use qid/hqid)");
  auto monoid = args.common.monoid(th.signature);
  bool failed = false;
  bool inconclusive = false;
  for (const auto& raw : load_algebras({args.algebra})) {
    FiniteAlgebra a = conform(raw, th.signature);
    TheoryReport r = check_theory(a, th, mode, monoid ? &*monoid : nullptr, args.common.clone_cap());
    failed = failed || !r.holds;
    inconclusive = inconclusive || r.inconclusive();
    for (const auto& ax : r.axioms) {
      const HyperVerdict& v = ax.verdict;
      const std::string status = !v.holds ? "fails" : v.complete ? "holds" : "inconclusive";
      if (args.common.json()) {
        json j{{"algebra", a.name()},
               {"index", ax.index},
               {"axiom", to_string(th.axioms[ax.index])},
               {"mode", args.mode},
               {"holds", v.holds},
               {"complete", v.complete},
               {"counterexample", nullptr}};
        if (v.counterexample) {
          const auto& c = *v.counterexample;
          j["counterexample"] = {{"sigma", hsub_json(c.sigma)},
                                 {"induced", to_string(c.induced)},
                                 {"env", env_json(c.at.env)},
                                 {"lhs", c.at.lhs},
                                 {"rhs", c.at.rhs}};
        }
        std::cout << j.dump() << "\n";
      } else {
        std::cout << a.name() << " axiom " << ax.index << " [" << args.mode << "] " << status << ": "
                  << to_string(th.axioms[ax.index]) << "\n";
        if (v.counterexample) {
          const auto& c = *v.counterexample;
          if (mode == Mode::hyper) std::cout << "  sigma: " << to_string(c.sigma) << "\n";
          if (mode == Mode::hyper) std::cout << "  induced: " << to_string(c.induced) << "\n";
          std::cout << "  counterexample: " << env_text(c.at.env) << " gives " << c.at.lhs << " != " << c.at.rhs
                    << "\n";
        }
      }
    }
  }
  if (failed) return exit_failed;
  return inconclusive ? exit_inconclusive : exit_ok;
}

struct DeriveArgs {
  std::string algebra;
  std::string hsub;
  std::string name;
};

int cmd_derive(const DeriveArgs& args) {
  auto algebras = load_algebras({args.algebra});
  if (algebras.size() != 1) throw InputError(args.algebra + ": expected exactly one algebra");
  const FiniteAlgebra& a = algebras.front();
  auto hs = parse_file(args.hsub, [&](const std::string& t) { return parse_hsubs(t, a.signature()); });
  if (hs.size() != 1) throw InputError(args.hsub + ": expected exactly one hypersubstitution");
  FiniteAlgebra d = derived_algebra(a, hs.front());
  std::cout << format_algebra(d.renamed(args.name.empty() ? a.name() + "_derived" : args.name));
  return exit_ok;
}

struct CloneArgs {
  Common common;
  std::string algebra;
  std::size_t arity = 2;
};

int cmd_clone(const CloneArgs& args) {
  auto algebras = load_algebras({args.algebra});
  bool incomplete = false;
  for (const auto& a : algebras) {
    CloneSlice s = enumerate_term_operations(a, args.arity, args.common.clone_cap());
    incomplete = incomplete || !s.complete;
    if (args.common.json()) {
      for (const auto& op : s.ops)
        std::cout << json{{"algebra", a.name()}, {"arity", s.arity}, {"table", table_json(op.table)},
                          {"witness", to_string(op.witness)}}
                         .dump()
                  << "\n";
      std::cout << json{{"algebra", a.name()}, {"arity", s.arity}, {"count", s.size()}, {"complete", s.complete}}.dump()
                << "\n";
    } else {
      std::cout << a.name() << " arity=" << s.arity << " ops=" << s.size() << " complete=" << std::boolalpha
                << s.complete << "\n";
      for (const auto& op : s.ops) std::cout << table_text(op.table) << " " << to_string(op.witness) << "\n";
    }
  }
  return incomplete ? exit_inconclusive : exit_ok;
}

struct SolidArgs {
  Common common;
  std::vector<std::string> algebras;
  std::string theory;
};

int cmd_solid(const SolidArgs& args) {
  Theory th = parse_file(args.theory, [](const std::string& t) { return parse_theory(t); });
  auto monoid = args.common.monoid(th.signature);
  std::vector<FiniteAlgebra> algebras;
  for (const auto& a : load_algebras(args.algebras)) algebras.push_back(conform(a, th.signature));
  SolidityReport r = check_solid(algebras, th, monoid ? &*monoid : nullptr, args.common.clone_cap());
  for (const auto& e : r.entries) {
    std::size_t bad = 0;
    for (const auto& d : e.derived) bad += !d.report.holds;
    if (args.common.json()) {
      json j{{"algebra", e.algebra}, {"in_qv", e.in_qv}, {"derived", e.derived.size()},
             {"closed", e.closed},   {"complete", e.complete}, {"violations", json::array()}};
      for (const auto& d : e.derived)
        if (!d.report.holds) j["violations"].push_back({{"sigma", hsub_json(d.derived.witness)},
                                                        {"tables", d.derived.algebra.tables()}});
      std::cout << j.dump() << "\n";
    } else {
      std::cout << e.algebra << " in_qv=" << std::boolalpha << e.in_qv;
      if (e.in_qv) std::cout << " derived=" << e.derived.size() << " closed=" << e.closed << " complete=" << e.complete;
      std::cout << "\n";
      for (const auto& d : e.derived)
        if (!d.report.holds) {
          std::cout << "  not in QV: sigma " << to_string(d.derived.witness) << "\n";
          for (const auto& ax : d.report.axioms)
            if (!ax.verdict.holds) std::cout << "    fails axiom " << ax.index << ": " << to_string(th.axioms[ax.index]) << "\n";
        }
    }
  }
  if (args.common.json())
    std::cout << json{{"solid", r.solid}, {"complete", r.complete}}.dump() << "\n";
  else
    std::cout << "solid=" << std::boolalpha << r.solid << (r.inconclusive() ? " (inconclusive)" : "") << "\n";
  if (!r.solid) return exit_failed;
  return r.inconclusive() ? exit_inconclusive : exit_ok;
}

struct TheoremArgs {
  Common common;
  std::optional<std::size_t> carrier;
  std::vector<std::string> algebras;
  std::string theory;
  std::optional<std::size_t> sample;
  std::uint64_t seed = 0;
};

int cmd_theorem41(const TheoremArgs& args) {
  Theory th = parse_file(args.theory, [](const std::string& t) { return parse_theory(t); });
  auto monoid = args.common.monoid(th.signature);
  const HsubMonoid* m = monoid ? &*monoid : nullptr;
  TheoremReport r;
  if (args.carrier) {
    if (th.signature.size() != 1 || th.signature[0].arity != 2)
      throw InputError("theorem41 sweeps need a signature with exactly one binary symbol");
    if (*args.carrier == 0) throw InputError("--carrier must be positive");
    if (*args.carrier > max_exhaustive_carrier && !args.sample)
      throw InputError("--carrier > " + std::to_string(max_exhaustive_carrier) + " requires --sample");
    r = sweep_theorem(*args.carrier, th, m, SweepOptions{args.sample, args.seed, args.common.jobs, args.common.clone_cap()});
  } else {
    if (args.algebras.empty()) throw InputError("give --carrier or at least one --algebra");
    for (const auto& a : load_algebras(args.algebras))
      r.add(verify_theorem_4_1(conform(a, th.signature), th, m, args.common.clone_cap()));
  }
  for (const auto& e : r.entries) {
    if (args.common.json())
      std::cout << json{{"algebra", e.label}, {"member", e.member}, {"lhs", e.lhs}, {"rhs", e.rhs},
                        {"agree", e.agree},   {"status", std::string(to_string(e.status))}}
                       .dump()
                << "\n";
    else
      std::cout << e.label << " lhs=" << std::boolalpha << e.lhs << " rhs=" << e.rhs << " agree=" << e.agree << "\n";
  }
  if (args.common.json())
    std::cout << json{{"agree", r.agreeing}, {"total", r.total}, {"skipped", r.skipped},
                      {"inconclusive", r.inconclusive}, {"disagree", r.disagreeing}}
                     .dump()
              << "\n";
  else
    std::cout << "agree " << r.agreeing << "/" << r.total << "\n";
  if (r.disagreeing) return exit_failed;
  return r.inconclusive ? exit_inconclusive : exit_ok;
}

struct InferArgs {
  Common common;
  std::string theory;
  std::string rules = "E";
  Bounds bounds;
  bool nontrivial = false;
  bool compare = false;
};

int cmd_infer(const InferArgs& args) {
  Theory th = parse_file(args.theory, [](const std::string& t) { return parse_theory(t); });
  std::vector<Equation> seed;
  for (std::size_t i = 0; i < th.axioms.size(); ++i) {
    if (!th.axioms[i].is_identity())
      throw InputError("infer works on identities; axiom " + std::to_string(i) + " is a quasi-identity");
    seed.push_back(th.axioms[i].conclusion);
  }
  auto monoid = args.common.monoid(th.signature);
  if (args.rules == "EMH" && !monoid) throw InputError("--rules EMH needs --monoid");
  if (args.compare) {
    ClosureComparison c = compare_closures(th.signature, seed, monoid ? &*monoid : nullptr, args.bounds);
    bool equal = c.e_equals_eh && c.e_equals_emh.value_or(true);
    if (args.common.json()) {
      json j{{"E", c.e.size()}, {"EH", c.eh.size()}, {"E_equals_EH", c.e_equals_eh},
             {"E_closed_under_rule6", c.seed_closed_full.closed}};
      if (c.emh) {
        j["EMH"] = c.emh->size();
        j["E_equals_EMH"] = *c.e_equals_emh;
        j["E_closed_under_rule6M"] = c.seed_closed_m->closed;
      }
      std::cout << j.dump() << "\n";
    } else {
      std::cout << std::boolalpha << "E size=" << c.e.size() << " saturated=" << c.e.saturated() << "\n";
      std::cout << "EH size=" << c.eh.size() << " saturated=" << c.eh.saturated() << "\n";
      if (c.emh) std::cout << "EMH size=" << c.emh->size() << " saturated=" << c.emh->saturated() << "\n";
      std::cout << "E=EH " << c.e_equals_eh << "\n";
      if (c.emh) std::cout << "E=EMH " << *c.e_equals_emh << "\n";
      std::cout << "E closed under rule6 " << c.seed_closed_full.closed << "\n";
      if (!c.seed_closed_full.closed)
        std::cout << "  " << to_string(*c.seed_closed_full.source) << " under " << to_string(*c.seed_closed_full.sigma)
                  << " gives " << to_string(*c.seed_closed_full.missing) << "\n";
    }
    return equal ? exit_ok : exit_failed;
  }
  ClosureSet set = args.rules == "E"    ? birkhoff_closure(th.signature, seed, args.bounds)
                   : args.rules == "EH" ? hyper_closure(th.signature, seed, args.bounds)
                                        : m_hyper_closure(th.signature, seed, *monoid, args.bounds);
  auto ids = set.identities(!args.nontrivial);
  if (args.common.json()) {
    std::cout << json{{"rules", args.rules}, {"size", set.size()}, {"saturated", set.saturated()}}.dump() << "\n";
    for (const auto& e : ids) std::cout << json{{"lhs", to_string(e.lhs)}, {"rhs", to_string(e.rhs)}}.dump() << "\n";
  } else {
    std::cout << "rules=" << args.rules << " size=" << set.size() << " saturated=" << std::boolalpha << set.saturated()
              << "\n";
    for (const auto& e : ids) std::cout << to_string(e) << "\n";
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperidentity and hyper-quasi-identity workbench for finite algebras"};
  app.require_subcommand(1);

  CheckArgs check;
  auto* c = app.add_subcommand("check", "Check a theory in an algebra");
  c->add_option("--algebra", check.algebra, "Algebra file")->required();
  c->add_option("--theory", check.theory, "Theory file")->required();
  c->add_option("--mode", check.mode, "id | qid | hyper | hqid")
      ->required()
      ->check(CLI::IsMember({"id", "qid", "hyper", "hqid"}));
  add_common(c, check.common, true);

  DeriveArgs derive;
  auto* d = app.add_subcommand("derive", "Print the derived algebra A^sigma");
  d->add_option("--algebra", derive.algebra, "Algebra file")->required();
  d->add_option("--hsub", derive.hsub, "Hypersubstitution file")->required();
  d->add_option("--name", derive.name, "Name of the derived algebra");

  CloneArgs clone;
  auto* cl = app.add_subcommand("clone", "List the term operations of a given arity");
  cl->add_option("--algebra", clone.algebra, "Algebra file")->required();
  cl->add_option("--arity", clone.arity, "Arity")->required()->check(CLI::PositiveNumber);
  add_common(cl, clone.common, false);

  SolidArgs solid;
  auto* so = app.add_subcommand("solid", "Check closure of a family under derived algebras");
  so->add_option("--algebra", solid.algebras, "Algebra file(s)")->required();
  so->add_option("--theory", solid.theory, "Theory file")->required();
  add_common(so, solid.common, true);

  TheoremArgs thm;
  auto* t = app.add_subcommand("theorem41", "Compare hyper-satisfaction with closure under derived algebras");
  t->add_option("--carrier", thm.carrier, "Sweep all magmas of this size");
  t->add_option("--algebra", thm.algebras, "Check these algebras instead of a sweep");
  t->add_option("--theory", thm.theory, "Theory file")->required();
  t->add_option("--sample", thm.sample, "Number of magmas to sample")->check(CLI::PositiveNumber);
  t->add_option("--seed", thm.seed, "Sampling seed");
  add_common(t, thm.common, true);

  InferArgs infer;
  auto* in = app.add_subcommand("infer", "Bounded equational closure of a set of identities");
  in->add_option("--theory", infer.theory, "Theory file of identities")->required();
  in->add_option("--rules", infer.rules, "E | EH | EMH")->check(CLI::IsMember({"E", "EH", "EMH"}));
  in->add_option("--max-size", infer.bounds.max_term_size, "Largest term, in nodes")->check(CLI::PositiveNumber);
  in->add_option("--image-size", infer.bounds.image_size, "Largest hypersubstitution image for EH")
      ->check(CLI::PositiveNumber);
  in->add_option("--max-vars", infer.bounds.max_vars, "Variable pool size")->check(CLI::PositiveNumber);
  in->add_option("--max-steps", infer.bounds.max_steps, "Saturation rounds")->check(CLI::PositiveNumber);
  in->add_flag("--nontrivial", infer.nontrivial, "Omit t = t from the listing");
  in->add_flag("--compare", infer.compare, "Compare E, EH (and EMH with --monoid)");
  add_common(in, infer.common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_input;
  }

  try {
    if (*c) return cmd_check(check);
    if (*d) return cmd_derive(derive);
    if (*cl) return cmd_clone(clone);
    if (*so) return cmd_solid(solid);
    if (*t) return cmd_theorem41(thm);
    if (*in) return cmd_infer(infer);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const EvalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_input;
  }
  return exit_input;
}
