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

#include <set>
#include <utility>
#include <vector>

#include "keysub/rewrite.hpp"
#include "keysub/subst.hpp"
#include "keysub/term.hpp"
#include "keysub/unify.hpp"

namespace keysub {

/// One node of a basic-narrowing derivation. Positions introduced by earlier
/// substitutions are never in `basic`, so they are never narrowed.
struct NarrowingState {
  Term subject;
  std::set<Position> basic;
  Substitution accumulated;
  int depth = 0;
  /// Next free variable id for rule renaming; carried in the state so serial
  /// and parallel exploration produce identical successors.
  int fresh_next = 0;
};

NarrowingState initial_state(const Term& subject);

/// All one-step basic-narrowing successors, rules in theory order, narrowed
/// subterms in leftmost-outermost order of their first basic occurrence.
/// Equal subterms are narrowed at all their occurrences in one step.
std::vector<NarrowingState> narrow_step(const NarrowingState& state, const RewriteTheory& R);

struct ExploreOptions {
  bool parallel = false;
  /// Hard cap on explored states; exceeding it raises BudgetExceededError.
  std::size_t max_states = 1000000;
};

/// Exhausts the basic-narrowing tree from `subject` (breadth-first, the
/// zero-step state first). With parallel=true the frontier is expanded with
/// OpenMP; output order is identical to the serial path.
std::vector<NarrowingState> explore_basic_narrowing(const Term& subject,
                                                    const RewriteTheory& R,
                                                    const ExploreOptions& opts = {});

/// Internal tupling symbol used to narrow several terms under one subject so
/// accumulated substitutions propagate globally.
Term tuple_terms(const std::vector<Term>& parts);
std::vector<Term> untuple(const Term& tuple);

/// Complete set of unifiers of S modulo the theory of R, by basic narrowing of
/// the tupled equation sides followed by syntactic unification at every node.
/// Empty result means non-unifiable.
std::vector<Substitution> equational_unify(const UnificationSystem& S, const RewriteTheory& R,
                                           const ExploreOptions& opts = {});

/// All (t', theta) reachable by basic narrowing from t, the zero-step pair
/// included. For every normal substitution sigma some returned pair satisfies
/// normalize(apply(sigma, t)) == apply(sigma', t').
std::vector<std::pair<Term, Substitution>> guess_normal_forms(const Term& t,
                                                              const RewriteTheory& R,
                                                              const ExploreOptions& opts = {});

/// Probes the Hullot termination condition: basic narrowing from every rule
/// right-hand side terminates (within the state cap).
bool basic_narrowing_from_rhss_terminates(const RewriteTheory& R,
                                          std::size_t max_states = 20000);

}  // namespace keysub
