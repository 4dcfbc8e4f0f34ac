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
#include "keysub/subst.hpp"

namespace keysub {

Term Substitution::apply(const Term& t) const {
  if (bind_.empty()) return t;
  if (t.is_var()) {
    auto it = bind_.find(t.var_id());
    return it == bind_.end() ? t : it->second;
  }
  if (keysub::is_ground(t)) return t;
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  bool changed = false;
  for (const Term& c : t.children()) {
    Term nc = apply(c);
    changed = changed || nc != c;
    kids.push_back(std::move(nc));
  }
  return changed ? Term::app(t.sym(), std::move(kids)) : t;
}

std::vector<Term> Substitution::apply(const std::vector<Term>& ts) const {
  std::vector<Term> out;
  out.reserve(ts.size());
  for (const Term& t : ts) out.push_back(apply(t));
  return out;
}

Substitution compose(const Substitution& second, const Substitution& first) {
  Substitution out;
  for (const auto& [v, t] : first.bindings()) out.bind(v, second.apply(t));
  for (const auto& [v, t] : second.bindings())
    if (!first.lookup(v)) out.bind(v, t);
  return out;
}

std::string to_string(const Substitution& s) {
  std::string out = "{";
  bool sep = false;
  for (const auto& [v, t] : s.bindings()) {
    if (sep) out += ", ";
    sep = true;
    out += "?v" + std::to_string(v) + " := " + to_string(t);
  }
  return out + "}";
}

}  // namespace keysub
