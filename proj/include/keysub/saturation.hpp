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

#include <string>
#include <vector>

#include "keysub/intruder.hpp"
#include "keysub/rewrite.hpp"

namespace keysub {

/// True when r1's conclusion equals r2's under a variable renaming that also
/// maps r1's premises onto a sub-multiset of r2's premises.
bool subsumes(const DeductionRule& r1, const DeductionRule& r2);

/// Renaming-canonical form: premises sorted, variables renumbered left to
/// right across premises then conclusion; exact duplicate premises collapsed.
DeductionRule canonical_rule(const DeductionRule& r);

/// One applied saturation inference, for auditing the construction order.
struct SaturationTraceEntry {
  std::string kind;  // "narrow" | "closure" | "subsumed"
  std::string produced;
  std::string from;
};

/// Closes L under composition of rules (unifying one rule's conclusion with a
/// non-variable premise of another), basic narrowing of rule sides, and
/// subsumption deletion, until every added rule is subsumed by a present one.
/// Generated rule sides are normalized w.r.t. R. Raises SaturationCapError
/// past `cap` generated rules.
std::vector<DeductionRule> saturate(const std::vector<DeductionRule>& L, const RewriteTheory& R,
                                    int cap = 256,
                                    std::vector<SaturationTraceEntry>* trace = nullptr);

/// saturate() applied to the built-in rule set of the named system.
std::vector<DeductionRule> saturated_rules(const IntruderSystem& I, int cap = 256);

}  // namespace keysub
