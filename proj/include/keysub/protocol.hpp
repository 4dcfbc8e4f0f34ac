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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "keysub/constraint.hpp"
#include "keysub/term.hpp"

namespace keysub {

struct RoleEvent {
  enum class Kind { Send, Recv };
  Kind kind;
  std::vector<Term> message;
  /// Equations the receiving agent checks before proceeding.
  std::vector<std::pair<Term, Term>> checks;
};

struct Role {
  std::string name;
  /// Per-session fresh constants (nonces, DH shares).
  std::vector<std::string> fresh;
  std::vector<RoleEvent> events;
};

struct GoalSpec {
  enum class Kind { None, Secrecy, Reach };
  Kind kind = Kind::None;
  Term secret;
  std::vector<std::pair<Term, Term>> eqs;
};

struct ProtocolSpec {
  std::string name;
  std::string theory_ref;
  std::vector<Term> knowledge;
  std::map<std::string, int> sessions;  // missing role => 1
  std::vector<Role> roles;
  GoalSpec goal;
};

struct CompiledSystem {
  /// Event tags in schedule order, e.g. "A1.2" = second event of A session 1.
  std::vector<std::string> order;
  ConstraintSystem system;
};

class TermContext;  // parser.hpp

/// Enumerates all interleavings of the role instances' event sequences
/// (per-role order respected) and compiles each into a constraint system:
/// honest receives become deduction constraints, honest sends extend the
/// intruder knowledge, checks and the goal populate the unification system.
std::vector<CompiledSystem> compile(const ProtocolSpec& spec, TermContext& ctx,
                                    std::size_t max_interleavings = 100000);

}  // namespace keysub
