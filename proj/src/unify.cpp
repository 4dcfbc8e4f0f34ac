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
#include "keysub/unify.hpp"

#include <deque>

#include "keysub/errors.hpp"

namespace keysub {

std::optional<Substitution> mgu(std::vector<std::pair<Term, Term>> equations) {
  std::deque<std::pair<Term, Term>> work(equations.begin(), equations.end());
  Substitution out;

  auto eliminate = [&](int v, const Term& img) {
    Substitution one;
    one.bind(v, img);
    for (auto& [l, r] : work) {
      l = one.apply(l);
      r = one.apply(r);
    }
    out = compose(one, out);
  };

  while (!work.empty()) {
    auto [s, t] = work.front();
    work.pop_front();
    if (s == t) continue;
    if (s.is_var() && t.is_var()) {
      // The higher id gets eliminated: the lowest id is the canonical
      // representative, so output is reproducible and freshly renamed rule
      // variables always collapse onto the older variables.
      if (s.var_id() > t.var_id())
        eliminate(s.var_id(), t);
      else
        eliminate(t.var_id(), s);
      continue;
    }
    if (s.is_var() || t.is_var()) {
      const Term& v = s.is_var() ? s : t;
      const Term& img = s.is_var() ? t : s;
      if (occurs(v.var_id(), img)) return std::nullopt;
      eliminate(v.var_id(), img);
      continue;
    }
    if (!(s.sym() == t.sym())) return std::nullopt;
    for (std::size_t i = s.children().size(); i-- > 0;)
      work.emplace_front(s.children()[i], t.children()[i]);
  }
  return out;
}

std::optional<Substitution> mgu(const Term& s, const Term& t) {
  return mgu(std::vector<std::pair<Term, Term>>{{s, t}});
}

std::optional<Substitution> solve_system(const UnificationSystem& s) {
  if (!s.theory.empty())
    throw PreconditionError("solve_system handles the empty theory only; use equational_unify");
  return mgu(s.equations);
}

std::optional<Substitution> match(const std::vector<std::pair<Term, Term>>& pairs) {
  Substitution out;
  std::deque<std::pair<Term, Term>> work(pairs.begin(), pairs.end());
  while (!work.empty()) {
    auto [p, s] = work.front();
    work.pop_front();
    if (p.is_var()) {
      auto existing = out.lookup(p.var_id());
      if (existing) {
        if (*existing != s) return std::nullopt;
      } else if (!(s.is_var() && s.var_id() == p.var_id())) {
        out.bind(p.var_id(), s);
      }
      continue;
    }
    if (s.is_var() || !(p.sym() == s.sym())) return std::nullopt;
    for (std::size_t i = 0; i < p.children().size(); ++i)
      work.emplace_back(p.children()[i], s.children()[i]);
  }
  return out;
}

std::optional<Substitution> match(const Term& pattern, const Term& subject) {
  return match(std::vector<std::pair<Term, Term>>{{pattern, subject}});
}

}  // namespace keysub
