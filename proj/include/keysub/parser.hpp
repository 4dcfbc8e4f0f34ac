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
#include <vector>

#include "keysub/constraint.hpp"
#include "keysub/intruder.hpp"
#include "keysub/protocol.hpp"
#include "keysub/rewrite.hpp"
#include "keysub/term.hpp"

namespace keysub {

/// Shared symbol/variable tables for one parse unit. Unknown identifiers
/// become on-demand public symbols; every later use must agree on the arity.
class TermContext {
 public:
  TermContext() = default;
  static TermContext for_theory(const RewriteTheory& R);

  /// Interns a variable name; ids are assigned in order of first occurrence.
  int var_id(const std::string& name);
  const std::string& var_name(int id) const;
  bool has_var(const std::string& name) const { return var_ids_.count(name) > 0; }

  /// Looks up or registers a symbol with the given arity.
  Symbol symbol(const std::string& name, int arity, int line, int col);
  void declare_private(const std::string& name, int arity);

  int next_var_id() const { return static_cast<int>(var_names_.size()); }

 private:
  std::map<std::string, Symbol> signature_;
  std::map<std::string, int> var_ids_;
  std::vector<std::string> var_names_;
};

/// Parses a complete term in the concrete syntax: lowercase identifier =
/// constant, `?name` = variable, `f(t1,...,tn)` = application.
Term parse_term(const std::string& text, TermContext& ctx, int line = 1);

enum class InputKind { Protocol, Constraints, Theory, Derivation };

/// Dispatches on the header keyword of the first significant line.
InputKind classify_input(const std::string& text);

struct ParsedConstraints {
  ConstraintSystem system;
  std::string theory_ref;
  TermContext ctx;
};

/// `constraints:` header, then `theory:`, cumulative `knows:` lines,
/// `deduce: ?v` / `deduce: t`, and `eq: u = v` lines. A structured deduce
/// target becomes a fresh variable plus an equation.
ParsedConstraints parse_constraints(const std::string& text);

/// `theory <name>` header, optional `private f/n` lines, `rule lhs -> rhs`.
RewriteTheory parse_theory(const std::string& text);

struct ParsedProtocol {
  ProtocolSpec spec;
  TermContext ctx;
};
ParsedProtocol parse_protocol(const std::string& text);

struct ParsedDerivation {
  struct RawStep {
    std::string rule;
    std::vector<std::pair<std::string, Term>> bindings;
    Term produced;
  };
  std::string theory_ref;
  std::vector<Term> start;
  Term goal;
  std::vector<RawStep> steps;
  TermContext ctx;
};
ParsedDerivation parse_derivation(const std::string& text);

/// Binds the raw steps' named variables against the rules of I.
Derivation resolve_derivation(const ParsedDerivation& parsed, const IntruderSystem& I);

std::string render_term(const Term& t);
std::string render_theory(const RewriteTheory& R);
std::string render_constraints(const ConstraintSystem& c, const std::string& theory_ref);
/// One line per step: `<rule> {?x := t, ...} |- <term>`, variables named as in
/// the rule set of I.
std::string render_derivation(const Derivation& d, const IntruderSystem& I);
std::string render_derivation_file(const Derivation& d, const IntruderSystem& I,
                                   const std::string& theory_ref);
std::string render_protocol(const ProtocolSpec& spec);

}  // namespace keysub
