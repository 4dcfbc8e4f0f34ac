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

#include "gen.hpp"
#include "keysub/parser.hpp"
#include "keysub/unify.hpp"

using namespace keysub;

namespace {
Term T(const std::string& text, TermContext& ctx) { return parse_term(text, ctx); }
}  // namespace

TEST_CASE("mgu basics") {
  TermContext ctx;
  auto s = mgu(T("?x", ctx), T("a", ctx));
  REQUIRE(s);
  CHECK(s->apply(T("?x", ctx)) == T("a", ctx));

  CHECK_FALSE(mgu(T("sk(?y)", ctx), T("pk(?z)", ctx)));

  auto s2 = mgu(T("sig(?x, sk(?u))", ctx), T("sig(pk(c), sk(c))", ctx));
  REQUIRE(s2);
  CHECK(s2->apply(T("?x", ctx)) == T("pk(c)", ctx));
  CHECK(s2->apply(T("?u", ctx)) == T("c", ctx));
}

TEST_CASE("system solving") {
  TermContext ctx;
  UnificationSystem sys;
  sys.equations = {{T("?x", ctx), T("a", ctx)}, {T("?y", ctx), T("?x", ctx)}};
  auto s = solve_system(sys);
  REQUIRE(s);
  CHECK(s->apply(T("?x", ctx)) == T("a", ctx));
  CHECK(s->apply(T("?y", ctx)) == T("a", ctx));

  UnificationSystem occ;
  occ.equations = {{T("?x", ctx), T("sig(?x, k)", ctx)}};
  CHECK_FALSE(solve_system(occ));

  UnificationSystem sim;
  sim.equations = {{T("sig(?x2, sk(?y2))", ctx), T("sig(a, sk(b))", ctx)},
                   {T("pk(?y2)", ctx), T("pk(b)", ctx)}};
  auto s3 = solve_system(sim);
  REQUIRE(s3);
  for (const auto& [u, v] : sim.equations) CHECK(s3->apply(u) == s3->apply(v));
  CHECK(s3->apply(T("?x2", ctx)) == T("a", ctx));
  CHECK(s3->apply(T("?y2", ctx)) == T("b", ctx));
}

TEST_CASE("mgu soundness and idempotence on random pairs") {
  testgen::TermGen gen(dsks_theory(), 11, 4);
  int unified = 0;
  for (int i = 0; i < 500; ++i) {
    Term s = gen.term(3);
    Term t = gen.term(3);
    auto m = mgu(s, t);
    if (!m) continue;
    ++unified;
    CHECK(m->apply(s) == m->apply(t));
    CHECK(m->apply(m->apply(s)) == m->apply(s));  // idempotent
    CHECK(m->apply(m->apply(t)) == m->apply(t));
  }
  CHECK(unified > 20);
}

TEST_CASE("most generality: known unifiers factor through the mgu") {
  testgen::TermGen gen(dsks_theory(), 13, 4);
  testgen::TermGen ground_gen(dsks_theory(), 17);
  for (int i = 0; i < 200; ++i) {
    Term base = gen.term(3);
    if (vars(base).empty()) continue;
    // Known unifier: ground both sides the same way.
    Substitution tau;
    for (int v : vars(base)) tau.bind(v, ground_gen.sized_term(4));
    Term s = base;
    Term t = tau.apply(base);
    auto m = mgu(s, t);
    REQUIRE(m);
    // rho with tau = m . rho, found by matching the mgu images.
    std::vector<std::pair<Term, Term>> pairs;
    for (int v : vars(base)) pairs.emplace_back(m->apply(Term::var(v)), tau.apply(Term::var(v)));
    auto rho = match(pairs);
    REQUIRE(rho);
    for (int v : vars(base)) CHECK(rho->apply(m->apply(Term::var(v))) == tau.apply(Term::var(v)));
  }
}

TEST_CASE("satisfiability survives reordering of the equations") {
  testgen::TermGen gen(dsks_theory(), 19, 4);
  for (int i = 0; i < 200; ++i) {
    UnificationSystem sys;
    sys.equations = {{gen.term(3), gen.term(3)}, {gen.term(2), gen.term(2)}};
    UnificationSystem reversed;
    reversed.equations = {sys.equations[1], sys.equations[0]};
    auto a = solve_system(sys);
    auto b = solve_system(reversed);
    CHECK(a.has_value() == b.has_value());
    if (a && b) {
      for (const auto& [u, v] : sys.equations) {
        CHECK(a->apply(u) == a->apply(v));
        CHECK(b->apply(u) == b->apply(v));
      }
    }
  }
}

TEST_CASE("match is one-sided") {
  TermContext ctx;
  auto m = match(T("sig(?x, ?y)", ctx), T("sig(a, sk(b))", ctx));
  REQUIRE(m);
  CHECK(m->apply(T("?x", ctx)) == T("a", ctx));
  CHECK_FALSE(match(T("sig(?x, ?x)", ctx), T("sig(a, b)", ctx)));
  CHECK(match(T("sig(?x, ?x)", ctx), T("sig(a, a)", ctx)));
  CHECK_FALSE(match(T("a", ctx), T("?x", ctx)));
}
