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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "keysub/term.hpp"
#include "keysub/unify.hpp"

namespace keysub {

/// One knowledge/deduction constraint E |> t: the attacker must build t from E.
struct DeductionConstraint {
  std::vector<Term> knowledge;
  Term target;
};

/// A sequence of deduction constraints with monotone knowledge plus a
/// unification system. Initial systems have variable targets; extended systems
/// arise from the solving steps.
struct ConstraintSystem {
  enum class Kind { Initial, Extended };

  std::vector<DeductionConstraint> constraints;
  UnificationSystem eqs;
  Kind kind = Kind::Initial;

  /// Every target is a variable: always satisfiable.
  bool solved_form() const {
    for (const auto& c : constraints)
      if (!c.target.is_var()) return false;
    return true;
  }
};

std::set<int> vars_of(const ConstraintSystem& c);
std::string to_string(const ConstraintSystem& c);

ConstraintSystem apply_to_system(const Substitution& s, const ConstraintSystem& c);

struct WellformedViolation {
  std::size_t index;
  std::string reason;
};

/// Checks monotone knowledge growth and variable origination: every variable
/// of E_i must be bound by an earlier target (directly, or through the
/// equation introduced for a structured deduce target).
std::optional<WellformedViolation> check_wellformed(const ConstraintSystem& c);

/// E with variable members removed. Requires every variable member to be the
/// target of an earlier constraint of `c` (the prefix before `index`);
/// violating that raises PreconditionError.
std::vector<Term> eliminate_variables(const std::vector<Term>& knowledge,
                                      const ConstraintSystem& c, std::size_t index);

/// Solver termination measure: (number of distinct variables, multiset of
/// constraint targets under the subterm ordering), compared lexicographically.
struct Measure {
  std::size_t nbv = 0;
  std::vector<Term> targets;
};

Measure measure_of(const ConstraintSystem& c);

/// Strict multiset extension of the strict-subterm order.
bool multiset_subterm_less(const std::vector<Term>& a, const std::vector<Term>& b);

/// True when `after` is lexicographically strictly below `before`.
bool measure_less(const Measure& after, const Measure& before);

}  // namespace keysub
