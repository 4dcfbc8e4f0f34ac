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

#include "keysub/subst.hpp"
#include "keysub/term.hpp"

namespace keysub {

/// A finite set of term equations, tagged with the theory they are to be
/// solved in ("" = empty theory, syntactic unification).
struct UnificationSystem {
  std::vector<std::pair<Term, Term>> equations;
  std::string theory;  // "" | "dsks" | "deo" | theory name
};

/// Most general unifier of s and t in the empty theory, or nullopt when no
/// unifier exists (symbol clash or occurs check). The result is idempotent and
/// deterministic: equations are processed left to right, variable-variable
/// equations bind the lower id.
std::optional<Substitution> mgu(const Term& s, const Term& t);

/// Simultaneous mgu of a list of equations.
std::optional<Substitution> mgu(std::vector<std::pair<Term, Term>> equations);

/// Simultaneous mgu of all equations of S. Requires the empty theory tag;
/// equational unification lives in narrowing.
std::optional<Substitution> solve_system(const UnificationSystem& s);

/// One-sided unification: sigma with apply(sigma, pattern) == subject, binding
/// only pattern variables. Consistent across repeated variables.
std::optional<Substitution> match(const Term& pattern, const Term& subject);
std::optional<Substitution> match(const std::vector<std::pair<Term, Term>>& pairs);

}  // namespace keysub
