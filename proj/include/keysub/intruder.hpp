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
#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "keysub/rewrite.hpp"
#include "keysub/subst.hpp"
#include "keysub/term.hpp"

namespace keysub {

/// premises |- conclusion. Premises form a multiset, stored as a list fixed in
/// lexicographic order; order is irrelevant to semantics.
struct DeductionRule {
  std::string name;
  std::vector<Term> premises;
  Term conclusion;
};

/// Attacker message construction: a rule set interpreted modulo an equational
/// theory (theory.empty() means the empty theory).
struct IntruderSystem {
  std::string name;
  std::vector<DeductionRule> rules;
  RewriteTheory theory;

  bool modulo_theory() const { return !theory.rules.empty(); }
};

/// The deduction rule Var(t) |- t for a public operation t.
DeductionRule rule_for_term(std::string name, const Term& t);

/// Public-operation rules for every non-private symbol of R's signature
/// (one constructor rule per symbol, constants included).
std::vector<DeductionRule> public_constructor_rules(const RewriteTheory& R);

/// L_DSKS modulo the dsks theory: sig, ver, skp, pkp, 0, 1.
const IntruderSystem& dsks_intruder();
/// L_DEO modulo the deo theory: sig, ver, sskp, ppkp, f, 0, 1.
const IntruderSystem& deo_intruder();

IntruderSystem with_rules(const IntruderSystem& base, std::vector<DeductionRule> rules,
                          std::string name);
IntruderSystem with_empty_theory(const IntruderSystem& base);

std::string to_string(const DeductionRule& r);

/// One deduction round from E under the bounded instantiation regime:
/// non-variable premises are matched against members of E, rule variables left
/// unconstrained range over members of E only. The modulo-theory variant
/// normalizes premise instances and conclusions before comparison.
TermSet one_step(const std::vector<Term>& knowledge, const IntruderSystem& I);

/// A replayable ground derivation: each step produces one term.
struct Derivation {
  struct Step {
    std::string rule;
    Substitution sigma;
    Term produced;
  };
  std::vector<Term> start;
  Term goal;
  std::vector<Step> steps;
};

/// Replays D step by step. Returns the first failing step index, or nullopt
/// when the derivation is valid and reaches its goal.
std::optional<std::size_t> check_derivation(const Derivation& d, const IntruderSystem& I);

std::string to_string(const Derivation& d);

/// Bounded deducibility oracle: decides membership of a goal in the closure of
/// the knowledge set under I, restricted to produced terms of size <= cap.
/// "yes" answers are definitive; "no" answers are bounded by the cap. Used by
/// tests and witness checking only; the decision procedure never enumerates
/// closures.
class DeduceOracle {
 public:
  DeduceOracle(std::vector<Term> knowledge, const IntruderSystem& I, std::size_t size_cap);

  bool deducible(const Term& goal);
  /// A replayable derivation of goal, when deducible.
  std::optional<Derivation> derivation_of(const Term& goal);

  std::size_t cap() const { return cap_; }

 private:
  struct Proof {
    std::string rule;
    Substitution sigma;
    std::vector<Term> premise_instances;
  };

  bool search(const Term& t);
  bool try_rules(const Term& t);
  bool try_inverse_rewrite(const Term& t);
  bool prove_premises(const DeductionRule& rule, const Substitution& s0, const Term& goal);
  void mark_proved(const Term& t, Proof p);
  void emit(const Term& t, TermHashSet& done, std::vector<Derivation::Step>& steps);

  const IntruderSystem I_;
  std::size_t cap_;
  std::vector<Term> base_;       // normalized knowledge
  std::vector<Term> known_list_; // proved terms in insertion order (base first)
  TermHashSet known_;
  TermHashSet visiting_;
  std::unordered_map<Term, Proof, TermHash> proofs_;
  bool grew_ = false;
};

/// Default cap: max(size of goal, max member size) + 4.
std::size_t default_size_cap(const std::vector<Term>& knowledge, const Term& goal);

/// Convenience wrapper around DeduceOracle.
bool deducible(const std::vector<Term>& knowledge, const Term& goal, const IntruderSystem& I,
               std::size_t size_cap);
bool deducible(const std::vector<Term>& knowledge, const Term& goal, const IntruderSystem& I);

}  // namespace keysub
