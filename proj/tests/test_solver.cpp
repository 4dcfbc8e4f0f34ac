/* Copyright 2026 The keysub Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "keysub/errors.hpp"
#include "keysub/parser.hpp"
#include "keysub/solver.hpp"
#include "gen.hpp"
#include "planted.hpp"

using namespace keysub;

namespace {

Term T(const std::string& text, TermContext& ctx) { return parse_term(text, ctx); }

SolverConfig& dsks_config() {
  static SolverConfig cfg = make_config("dsks");
  return cfg;
}

SolverConfig& deo_config() {
  static SolverConfig cfg = make_config("deo");
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string scenario_path(const std::string& name) {
  return std::string(KEYSUB_SCENARIO_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("well-formedness checks monotonicity and origination") {
  TermContext ctx;
  ConstraintSystem ok;
  ok.constraints.push_back({{T("a", ctx)}, T("?v1", ctx)});
  CHECK_FALSE(check_wellformed(ok));

  ConstraintSystem shrinking;
  shrinking.constraints.push_back({{T("a", ctx), T("b", ctx)}, T("?v1", ctx)});
  shrinking.constraints.push_back({{T("a", ctx)}, T("?v2", ctx)});
  auto violation = check_wellformed(shrinking);
  REQUIRE(violation);
  CHECK(violation->index == 1);

  ConstraintSystem unbound;
  unbound.constraints.push_back({{T("?v9", ctx)}, T("?v1", ctx)});
  auto violation2 = check_wellformed(unbound);
  REQUIRE(violation2);
  CHECK(violation2->index == 0);

  // Variables of a structured deduce target originate at that constraint.
  ConstraintSystem structured;
  structured.constraints.push_back({{T("a", ctx)}, T("?g0", ctx)});
  structured.constraints.push_back({{T("a", ctx), T("sig(?x, sk(b))", ctx)}, T("?g1", ctx)});
  structured.eqs.equations.emplace_back(T("?g0", ctx), T("sig(?x, k)", ctx));
  CHECK_FALSE(check_wellformed(structured));
}

TEST_CASE("eliminate_variables strips exactly the bound members") {
  TermContext ctx;
  ConstraintSystem c;
  c.constraints.push_back({{T("a", ctx)}, T("?v1", ctx)});
  c.constraints.push_back({{T("a", ctx), T("?v1", ctx)}, T("?v2", ctx)});
  c.constraints.push_back({{T("a", ctx), T("?v1", ctx), T("?v2", ctx)}, T("?v3", ctx)});

  CHECK(eliminate_variables({T("a", ctx), T("?v1", ctx)}, c, 1) ==
        std::vector<Term>{T("a", ctx)});
  CHECK(eliminate_variables({T("a", ctx), T("b", ctx)}, c, 1) ==
        std::vector<Term>{T("a", ctx), T("b", ctx)});
  CHECK(eliminate_variables({T("?v1", ctx), T("?v2", ctx)}, c, 2).empty());
  CHECK_THROWS_AS(eliminate_variables({T("?v7", ctx)}, c, 1), PreconditionError);
}

TEST_CASE("termination measure comparisons") {
  TermContext ctx;
  Term big = T("sig(a, sk(b))", ctx);
  Term small1 = T("a", ctx);
  Term small2 = T("sk(b)", ctx);
  CHECK(multiset_subterm_less({small1, small2}, {big}));
  CHECK_FALSE(multiset_subterm_less({big}, {small1, small2}));
  CHECK(multiset_subterm_less({}, {small1}));
  CHECK_FALSE(multiset_subterm_less({small1}, {small1}));
  CHECK(measure_less(Measure{1, {big}}, Measure{2, {small1}}));
  CHECK_FALSE(measure_less(Measure{2, {small1}}, Measure{2, {small1}}));
}

TEST_CASE("step 1 enumerates narrowing candidates of the whole system") {
  TermContext ctx = TermContext::for_theory(dsks_theory());

  ConstraintSystem ground;
  ground.constraints.push_back({{T("a", ctx)}, T("?v1", ctx)});
  auto candidates = step1_guess(ground, dsks_theory());
  REQUIRE(candidates.size() == 1);
  CHECK(candidates[0].theta.empty());

  ConstraintSystem with_ver;
  with_ver.constraints.push_back({{T("a", ctx)}, T("?v1", ctx)});
  with_ver.eqs.equations.emplace_back(T("ver(?x, ?w, ?z)", ctx), T("1", ctx));
  bool discharged = false;
  for (const auto& cand : step1_guess(with_ver, dsks_theory())) {
    if (!cand.system.eqs.equations.empty() &&
        cand.system.eqs.equations[0].first == T("1", ctx) &&
        cand.system.eqs.equations[0].second == T("1", ctx)) {
      discharged = true;
      Term w = cand.theta.apply(T("?w", ctx));
      CHECK(w.is_app());
      CHECK(w.sym().name == "sig");
    }
  }
  CHECK(discharged);

  ConstraintSystem with_sig;
  with_sig.constraints.push_back({{T("a", ctx)}, T("?g", ctx)});
  with_sig.eqs.equations.emplace_back(T("?g", ctx), T("sig(?x, ?k)", ctx));
  bool forged = false;
  for (const auto& cand : step1_guess(with_sig, dsks_theory())) {
    Term k = cand.theta.apply(T("?k", ctx));
    if (k.is_app() && k.sym().name == "skp") forged = true;
  }
  CHECK(forged);
}

TEST_CASE("step 2 solves the syntactic system and prunes clashes") {
  TermContext ctx = TermContext::for_theory(dsks_theory());

  ConstraintSystem empty_s;
  empty_s.constraints.push_back({{T("a", ctx)}, T("?v1", ctx)});
  auto r1 = step2_unify(empty_s);
  REQUIRE(r1);
  CHECK(r1->sigma.empty());
  CHECK(r1->system.constraints.size() == 1);

  ConstraintSystem trivial;
  trivial.constraints.push_back({{T("a", ctx)}, T("?v1", ctx)});
  trivial.eqs.equations.emplace_back(T("1", ctx), T("1", ctx));
  auto r2 = step2_unify(trivial);
  REQUIRE(r2);
  CHECK(r2->sigma.empty());
  CHECK(r2->system.eqs.equations.empty());

  ConstraintSystem clash;
  clash.constraints.push_back({{T("a", ctx)}, T("?v1", ctx)});
  clash.eqs.equations.emplace_back(T("pk(?y)", ctx), T("sk(?z)", ctx));
  CHECK_FALSE(step2_unify(clash));
}

TEST_CASE("step 3 transforms to solved form") {
  TermContext ctx = TermContext::for_theory(dsks_theory());

  ConstraintSystem solved;
  solved.kind = ConstraintSystem::Kind::Extended;
  solved.constraints.push_back({{T("a", ctx)}, T("?v1", ctx)});
  auto r = step3_solve(solved, dsks_config());
  REQUIRE(r);
  CHECK(extract_solution(r->solved, dsks_theory()).apply(T("?v1", ctx)) == T("a", ctx));

  ConstraintSystem forgeable;
  forgeable.kind = ConstraintSystem::Kind::Extended;
  forgeable.constraints.push_back({{T("a", ctx), T("sk(b)", ctx)}, T("sig(a, sk(b))", ctx)});
  Step3Stats stats;
  auto r2 = step3_solve(forgeable, dsks_config(), &stats);
  REQUIRE(r2);
  CHECK(stats.audit_violations.empty());

  ConstraintSystem hopeless;
  hopeless.kind = ConstraintSystem::Kind::Extended;
  hopeless.constraints.push_back({{T("a", ctx)}, T("sk(b)", ctx)});
  CHECK_FALSE(step3_solve(hopeless, dsks_config()));
}

TEST_CASE("solve: private keys stay out of reach") {
  TermContext ctx = TermContext::for_theory(dsks_theory());
  ConstraintSystem c;
  c.constraints.push_back({{T("pub", ctx)}, T("?v1", ctx)});
  c.eqs.equations.emplace_back(T("?v1", ctx), T("sk(b)", ctx));
  auto result = solve(c, dsks_config());
  CHECK(result.verdict == Verdict::Unsat);
  CHECK(result.audit_violations.empty());
}

TEST_CASE("solve: a pinned forged-verification-key equation forces the signature") {
  TermContext ctx = TermContext::for_theory(dsks_theory());
  ConstraintSystem c;
  c.constraints.push_back(
      {{T("sig(a, sk(b))", ctx), T("pk(b)", ctx)}, T("?v1", ctx)});
  c.eqs.equations.emplace_back(T("ver(a, ?s, pkp(pk(b), sig(a, sk(b))))", ctx), T("1", ctx));
  c.eqs.equations.emplace_back(T("?v1", ctx), T("?s", ctx));
  auto result = solve(c, dsks_config());
  REQUIRE(result.verdict == Verdict::Sat);
  CHECK(result.solution->substitution.apply(T("?s", ctx)) == T("sig(a, sk(b))", ctx));
  CHECK(result.audit_violations.empty());
}

TEST_CASE("solve: the KAP-HY scenario finds the forged key pair") {
  auto parsed = parse_constraints(slurp(scenario_path("kap_hy.cstr")));
  REQUIRE(parsed.theory_ref == "dsks");
  CHECK_FALSE(check_wellformed(parsed.system));
  auto result = solve(parsed.system, dsks_config());
  REQUIRE(result.verdict == Verdict::Sat);

  TermContext ctx = TermContext::for_theory(dsks_theory());
  Term se = result.solution->substitution.apply(Term::var(parsed.ctx.var_id("se"), "se"));
  CHECK(se == T("skp(pk(b), sig(ua, sk(b)))", ctx));
  Term pe = result.solution->substitution.apply(Term::var(parsed.ctx.var_id("pe"), "pe"));
  CHECK(pe == T("pkp(pk(b), sig(ua, sk(b)))", ctx));
  CHECK(result.audit_violations.empty());

  // Witnesses replay under the saturated empty-theory system, and survive a
  // round trip through the derivation file format.
  IntruderSystem ground;
  ground.rules = dsks_config().saturated_rules;
  for (const Derivation& d : result.solution->witnesses) {
    CHECK(!check_derivation(d, ground));
    std::string rendered = render_derivation_file(d, ground, "dsks");
    Derivation back = resolve_derivation(parse_derivation(rendered), ground);
    CHECK(!check_derivation(back, ground));
  }
}

TEST_CASE("solve: the DEO forgery scenario binds the fresh message") {
  auto parsed = parse_constraints(slurp(scenario_path("deo_forge.cstr")));
  auto result = solve(parsed.system, deo_config());
  REQUIRE(result.verdict == Verdict::Sat);
  TermContext ctx = TermContext::for_theory(deo_theory());
  Term m = result.solution->substitution.apply(Term::var(parsed.ctx.var_id("m"), "m"));
  CHECK(m == T("f(pk(b), sig(ua, sk(b)))", ctx));
}

TEST_CASE("planted systems solve SAT with verified witnesses; hopeless goals UNSAT") {
  for (int which = 0; which < 2; ++which) {
    const IntruderSystem& I = which == 0 ? dsks_intruder() : deo_intruder();
    SolverConfig& cfg = which == 0 ? dsks_config() : deo_config();
    testgen::PlantedGen gen(I, 131 + which);
    for (int i = 0; i < 12; ++i) {
      ConstraintSystem c = gen.sat_system(3);
      auto result = solve(c, cfg);
      CHECK(result.verdict == Verdict::Sat);
      CHECK(result.audit_violations.empty());
    }
    for (int i = 0; i < 6; ++i) {
      ConstraintSystem c = gen.unsat_system();
      auto result = solve(c, cfg);
      CHECK(result.verdict == Verdict::Unsat);
      CHECK(result.audit_violations.empty());
    }
  }
}

TEST_CASE("the verdict is stable across branch-exploration orders") {
  testgen::PlantedGen gen(dsks_intruder(), 151);
  SolverConfig reversed = make_config("dsks");
  reversed.reversed = true;
  for (int i = 0; i < 8; ++i) {
    ConstraintSystem c = i % 3 == 0 ? gen.unsat_system() : gen.sat_system(2);
    auto forward = solve(c, dsks_config());
    auto backward = solve(c, reversed);
    CHECK(forward.verdict == backward.verdict);
  }

  // The attack scenario stays SAT under reversed exploration; the witness
  // substitution may differ but must still verify.
  auto parsed = parse_constraints(slurp(scenario_path("kap_hy.cstr")));
  auto backward = solve(parsed.system, reversed);
  CHECK(backward.verdict == Verdict::Sat);
}

TEST_CASE("eager variable elimination does not change the verdict") {
  testgen::PlantedGen gen(dsks_intruder(), 161);
  SolverConfig lazy = make_config("dsks");
  lazy.eager_var_elim = false;
  for (int i = 0; i < 8; ++i) {
    ConstraintSystem c = i % 3 == 0 ? gen.unsat_system() : gen.sat_system(2);
    auto eager_result = solve(c, dsks_config());
    auto lazy_result = solve(c, lazy);
    CHECK(eager_result.verdict == lazy_result.verdict);
  }
}

TEST_CASE("on ground goals the pipeline agrees with the deducibility oracle") {
  // With ground targets and no free equations, satisfiability is exactly the
  // conjunction of per-constraint deducibility modulo the theory: an
  // independent route through the bounded oracle.
  for (int which = 0; which < 2; ++which) {
    const IntruderSystem& I = which == 0 ? dsks_intruder() : deo_intruder();
    SolverConfig& cfg = which == 0 ? dsks_config() : deo_config();
    testgen::PlantedGen pgen(I, 181 + which);
    testgen::TermGen tgen(I.theory, 191 + which);
    int sat_seen = 0, unsat_seen = 0;
    for (int i = 0; i < 60; ++i) {
      std::vector<Term> E = pgen.base_knowledge();
      ConstraintSystem sys;
      sys.kind = ConstraintSystem::Kind::Initial;
      bool expected = true;
      int n = 1 + pgen.pick(3);
      for (int k = 0; k < n; ++k) {
        Term goal = pgen.pick(2) == 0 ? pgen.sized_derivable(E, 8)
                                      : normalize(tgen.sized_term(6), I.theory);
        Term v = pgen.fresh_var();
        sys.constraints.push_back({E, v});
        sys.eqs.equations.emplace_back(v, goal);
        std::vector<Term> norm_E = normalize(E, I.theory);
        expected = expected && deducible(norm_E, normalize(goal, I.theory), I,
                                         default_size_cap(norm_E, goal) + 4);
        if (pgen.pick(2) == 0) {
          Term extra = pgen.sized_derivable(E, 6);
          if (std::find(E.begin(), E.end(), extra) == E.end()) E.push_back(extra);
        }
      }
      auto result = solve(sys, cfg);
      REQUIRE(result.verdict != Verdict::Inconclusive);
      CHECK((result.verdict == Verdict::Sat) == expected);
      (expected ? sat_seen : unsat_seen)++;
    }
    CHECK(sat_seen > 10);
    CHECK(unsat_seen > 10);
  }
}

TEST_CASE("solve decides pure unifiability questions") {
  // No deduction constraints at all: the pipeline reduces to equational
  // unification.
  TermContext ctx = TermContext::for_theory(dsks_theory());
  ConstraintSystem sat;
  sat.eqs.equations.emplace_back(T("ver(a, ?s, pk(b))", ctx), T("1", ctx));
  auto r1 = solve(sat, dsks_config());
  REQUIRE(r1.verdict == Verdict::Sat);
  CHECK(r1.solution->substitution.apply(T("?s", ctx)) == T("sig(a, sk(b))", ctx));

  ConstraintSystem unsat;
  unsat.eqs.equations.emplace_back(T("pk(?y)", ctx), T("sk(?z)", ctx));
  CHECK(solve(unsat, dsks_config()).verdict == Verdict::Unsat);
}

TEST_CASE("an exhausted budget reports INCONCLUSIVE, not UNSAT") {
  auto parsed = parse_constraints(slurp(scenario_path("kap_hy.cstr")));
  SolverConfig tiny = make_config("dsks");
  tiny.node_budget = 1;
  auto result = solve(parsed.system, tiny);
  CHECK(result.verdict == Verdict::Inconclusive);
  CHECK(!result.note.empty());
}
