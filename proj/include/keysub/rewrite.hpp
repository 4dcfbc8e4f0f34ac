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
#include <utility>
#include <vector>

#include "keysub/term.hpp"
#include "keysub/unify.hpp"

namespace keysub {

/// An oriented rule l -> r with Var(r) included in Var(l) and l not a variable.
struct RewriteRule {
  Term lhs;
  Term rhs;
};

/// An oriented rule set presenting an equational theory.
struct RewriteTheory {
  std::string name;
  std::vector<RewriteRule> rules;
  std::vector<Symbol> signature;
  /// Per-normalize-call rewrite step cap; hitting it raises StepBudgetError.
  int step_cap = 10000;

  bool empty() const { return rules.empty(); }
  std::optional<Symbol> find_symbol(const std::string& name) const;
};

/// The built-in theory for signature schemes with the key-substitution (DSKS)
/// property: sig, ver, sk, pk plus the forged key-pair constructors skp, pkp.
const RewriteTheory& dsks_theory();
/// The built-in theory for destructive-exclusive-ownership (DEO) forgeries:
/// adds the forged-message constructor f and uses sskp, ppkp key constructors.
const RewriteTheory& deo_theory();

/// The equational presentations the two built-in rule sets orient.
std::vector<std::pair<Term, Term>> dsks_axioms();
std::vector<std::pair<Term, Term>> deo_axioms();

enum class Strategy { Innermost, Outermost };

/// Unique normal form of t (the theory must be convergent; strategy choice
/// then cannot matter). Throws StepBudgetError past R.step_cap steps.
Term normalize(const Term& t, const RewriteTheory& R,
               Strategy strategy = Strategy::Innermost);
std::vector<Term> normalize(const std::vector<Term>& ts, const RewriteTheory& R);

bool is_normal(const Term& t, const RewriteTheory& R);

/// One rewrite step at the leftmost-outermost redex, if any.
std::optional<Term> rewrite_once(const Term& t, const RewriteTheory& R);

/// All critical pairs of R: overlaps of renamed-apart rules at non-variable
/// positions, each pair given as the two one-step reducts of the overlapped
/// term. Root overlaps of a rule with itself are skipped.
std::vector<std::pair<Term, Term>> critical_pairs(const RewriteTheory& R);

enum class TerminationStatus { Yes, Unknown };

struct ConvergenceReport {
  TerminationStatus terminating = TerminationStatus::Unknown;
  bool locally_confluent = false;
  std::size_t critical_pair_count = 0;
  std::vector<std::pair<Term, Term>> unjoined_pairs;

  bool convergent() const {
    return terminating == TerminationStatus::Yes && locally_confluent;
  }
};

/// Termination is attempted with a lexicographic path ordering over a searched
/// precedence; local confluence by critical-pair joinability. An unorientable
/// system reports terminating: unknown, never a fault.
ConvergenceReport check_convergence(const RewriteTheory& R);

}  // namespace keysub
