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
#include "keysub/intruder.hpp"
#include "keysub/parser.hpp"
#include "keysub/saturation.hpp"

using namespace keysub;

namespace {

Term T(const std::string& text, TermContext& ctx) { return parse_term(text, ctx); }

std::vector<Term> TS(const std::string& text, TermContext& ctx) {
  std::vector<Term> out;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || (text[i] == ';' && depth == 0)) {
      out.push_back(parse_term(text.substr(start, i - start), ctx));
      start = i + 1;
    } else if (text[i] == '(') {
      ++depth;
    } else if (text[i] == ')') {
      --depth;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("one_step instantiates rules against the knowledge set") {
  TermContext ctx = TermContext::for_theory(dsks_theory());

  auto s1 = one_step(TS("a; b", ctx), dsks_intruder());
  CHECK(s1.count(T("sig(a, b)", ctx)) == 1);

  auto s2 = one_step(TS("pk(b); sig(a, sk(b))", ctx), dsks_intruder());
  CHECK(s2.count(T("skp(pk(b), sig(a, sk(b)))", ctx)) == 1);

  // Saturated empty-theory system: the composed rule fires directly.
  IntruderSystem sat_empty = with_empty_theory(
      with_rules(dsks_intruder(), saturated_rules(dsks_intruder()), "dsks-saturated"));
  auto s3 = one_step(TS("a; skp(pk(b), sig(a, sk(b)))", ctx), sat_empty);
  CHECK(s3.count(T("sig(a, sk(b))", ctx)) == 1);
}

TEST_CASE("deducible on the signature-forging scenario") {
  TermContext ctx = TermContext::for_theory(dsks_theory());

  CHECK(deducible(TS("a; b", ctx), T("a", ctx), dsks_intruder()));

  // From b's public key and b's signature over ua the intruder builds the
  // matching forged key pair.
  auto knowledge = TS("ua; pk(b); sig(ua, sk(b))", ctx);
  CHECK(deducible(knowledge, T("skp(pk(b), sig(ua, sk(b)))", ctx), dsks_intruder()));
  CHECK(deducible(knowledge, T("pkp(pk(b), sig(ua, sk(b)))", ctx), dsks_intruder()));

  CHECK_FALSE(deducible(TS("a", ctx), T("sk(b)", ctx), dsks_intruder()));
  CHECK_FALSE(deducible(knowledge, T("sk(b)", ctx), dsks_intruder()));
}

TEST_CASE("deducible modulo the theory sees collapsed conclusions") {
  TermContext ctx = TermContext::for_theory(dsks_theory());
  // sig(a, skp(pk(b), sig(a, sk(b)))) normalizes to sig(a, sk(b)): an
  // intruder owning the forged signature key can re-sign the message.
  auto knowledge = TS("a; pk(b); skp(pk(b), sig(a, sk(b)))", ctx);
  CHECK(deducible(knowledge, T("sig(a, sk(b))", ctx), dsks_intruder()));
  // Without the theory the same goal is out of reach for the base rules.
  CHECK_FALSE(deducible(knowledge, T("sig(a, sk(b))", ctx), with_empty_theory(dsks_intruder())));
}

TEST_CASE("check_derivation replays step by step") {
  TermContext ctx = TermContext::for_theory(dsks_theory());

  Derivation empty;
  empty.start = TS("a; b", ctx);
  empty.goal = T("a", ctx);
  CHECK(!check_derivation(empty, dsks_intruder()));

  // The key-forging derivation.
  Derivation forge;
  forge.start = TS("ua; pk(b); sig(ua, sk(b))", ctx);
  forge.goal = T("skp(pk(b), sig(ua, sk(b)))", ctx);
  Derivation::Step step;
  step.rule = "skp";
  step.sigma.bind(0, T("pk(b)", ctx));
  step.sigma.bind(1, T("sig(ua, sk(b))", ctx));
  step.produced = T("skp(pk(b), sig(ua, sk(b)))", ctx);
  forge.steps.push_back(step);
  CHECK(!check_derivation(forge, dsks_intruder()));

  // A step whose premise was never derived is rejected at its index.
  Derivation bad;
  bad.start = TS("a", ctx);
  bad.goal = T("sig(a, sk(b))", ctx);
  Derivation::Step bad_step;
  bad_step.rule = "sig";
  bad_step.sigma.bind(0, T("a", ctx));
  bad_step.sigma.bind(1, T("sk(b)", ctx));
  bad_step.produced = T("sig(a, sk(b))", ctx);
  bad.steps.push_back(bad_step);
  auto verdict = check_derivation(bad, dsks_intruder());
  REQUIRE(verdict);
  CHECK(*verdict == 0);

  // Valid steps but a goal never reached.
  Derivation short_run;
  short_run.start = TS("a; b", ctx);
  short_run.goal = T("sig(b, a)", ctx);
  Derivation::Step ok_step;
  ok_step.rule = "sig";
  ok_step.sigma.bind(0, T("a", ctx));
  ok_step.sigma.bind(1, T("b", ctx));
  ok_step.produced = T("sig(a, b)", ctx);
  short_run.steps.push_back(ok_step);
  auto verdict2 = check_derivation(short_run, dsks_intruder());
  REQUIRE(verdict2);
  CHECK(*verdict2 == 1);
}

TEST_CASE("derivations produced by the oracle replay cleanly") {
  TermContext ctx = TermContext::for_theory(dsks_theory());
  auto knowledge = TS("ua; pk(b); sig(ua, sk(b)); 0", ctx);
  IntruderSystem sat_empty = with_empty_theory(
      with_rules(dsks_intruder(), saturated_rules(dsks_intruder()), "dsks-saturated"));

  for (const char* goal :
       {"skp(pk(b), sig(ua, sk(b)))", "sig(ua, sk(b))", "ver(ua, ua, pk(b))", "1",
        "sig(sig(ua, ua), pkp(pk(b), ua))"}) {
    Term g = T(goal, ctx);
    DeduceOracle oracle(knowledge, sat_empty, default_size_cap(knowledge, g) + 4);
    auto derivation = oracle.derivation_of(g);
    REQUIRE(derivation);
    CHECK(!check_derivation(*derivation, sat_empty));
  }
}

TEST_CASE("deducibility is monotone in the knowledge set") {
  const IntruderSystem& I = dsks_intruder();
  testgen::TermGen gen(I.theory, 91);
  for (int i = 0; i < 100; ++i) {
    std::vector<Term> small, big;
    for (int k = 0; k < 3; ++k) small.push_back(normalize(gen.sized_term(5), I.theory));
    big = small;
    big.push_back(normalize(gen.sized_term(5), I.theory));
    Term goal = normalize(gen.sized_term(5), I.theory);
    std::size_t cap = default_size_cap(big, goal);
    if (deducible(small, goal, I, cap)) CHECK(deducible(big, goal, I, cap));
  }
}
