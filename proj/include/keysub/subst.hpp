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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "keysub/term.hpp"

namespace keysub {

/// Finite-support mapping from variables to terms. Kept idempotent by the
/// operations that build substitutions (mgu, compose).
class Substitution {
 public:
  Substitution() = default;

  bool empty() const { return bind_.empty(); }
  std::size_t size() const { return bind_.size(); }

  std::optional<Term> lookup(int var_id) const {
    auto it = bind_.find(var_id);
    if (it == bind_.end()) return std::nullopt;
    return it->second;
  }

  /// Binds var_id := t, dropping identity bindings.
  void bind(int var_id, const Term& t) {
    if (t.is_var() && t.var_id() == var_id) return;
    bind_[var_id] = t;
  }

  std::set<int> support() const {
    std::set<int> out;
    for (const auto& [v, t] : bind_) out.insert(v);
    return out;
  }

  const std::map<int, Term>& bindings() const { return bind_; }

  Term apply(const Term& t) const;
  std::vector<Term> apply(const std::vector<Term>& ts) const;

  bool is_ground() const {
    for (const auto& [v, t] : bind_)
      if (!keysub::is_ground(t)) return false;
    return true;
  }

  Substitution restricted_to(const std::set<int>& var_ids) const {
    Substitution out;
    for (const auto& [v, t] : bind_)
      if (var_ids.count(v)) out.bind_[v] = t;
    return out;
  }

  friend bool operator==(const Substitution& a, const Substitution& b) {
    return a.bind_ == b.bind_;
  }

 private:
  std::map<int, Term> bind_;
};

/// compose(s, f) applies f first: apply(compose(s, f), t) == apply(s, apply(f, t)).
Substitution compose(const Substitution& second, const Substitution& first);

std::string to_string(const Substitution& s);

}  // namespace keysub
