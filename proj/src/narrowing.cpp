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
#include "keysub/narrowing.hpp"

#include <algorithm>
#include <map>

#include "keysub/errors.hpp"

namespace keysub {

NarrowingState initial_state(const Term& subject) {
  NarrowingState st;
  st.subject = subject;
  for (const Position& p : nonvar_positions(subject)) st.basic.insert(p);
  FreshVars f;
  f.reserve_above(subject);
  st.fresh_next = f.next;
  return st;
}

namespace {

struct RenamedRule {
  Term lhs;
  Term rhs;
  int consumed;  // number of fresh ids used
};

RenamedRule rename_rule(const RewriteRule& rule, int base) {
  std::set<int> ids = vars(rule.lhs);
  Substitution ren;
  int k = 0;
  for (int id : ids) ren.bind(id, Term::var(base + k++));
  return {ren.apply(rule.lhs), ren.apply(rule.rhs), k};
}

}  // namespace

std::vector<NarrowingState> narrow_step(const NarrowingState& state, const RewriteTheory& R) {
  std::vector<NarrowingState> out;
  if (R.rules.empty()) return out;

  // Distinct narrowable subterms, ordered by their leftmost basic occurrence.
  std::vector<Term> subjects_in_order;
  TermHashSet seen;
  for (const Position& p : state.basic) {
    Term u = subterm_at(state.subject, p);
    if (seen.insert(u).second) subjects_in_order.push_back(u);
  }

  for (const RewriteRule& rule : R.rules) {
    for (const Term& u : subjects_in_order) {
      RenamedRule rr = rename_rule(rule, state.fresh_next);
      auto sigma = mgu(u, rr.lhs);
      if (!sigma) continue;

      // Narrow every occurrence of u in one step; the rewrite happens at all
      // of them, new basic positions open only under basic occurrences.
      std::vector<Position> occ_all = positions_of(state.subject, u);
      std::vector<Position> occ_basic;
      for (const Position& p : occ_all)
        if (state.basic.count(p)) occ_basic.push_back(p);

      Term new_subject =
          replace_at_all(sigma->apply(state.subject), occ_all, sigma->apply(rr.rhs));

      NarrowingState succ;
      succ.subject = std::move(new_subject);
      for (const Position& q : state.basic) {
        bool under_replaced = false;
        for (const Position& p : occ_all)
          if (position_prefix(p, q)) {
            under_replaced = true;
            break;
          }
        if (!under_replaced) succ.basic.insert(q);
      }
      for (const Position& p : occ_basic) {
        for (const Position& w : nonvar_positions(rr.rhs)) {
          Position pq = p;
          pq.insert(pq.end(), w.begin(), w.end());
          succ.basic.insert(std::move(pq));
        }
      }
      succ.accumulated = compose(*sigma, state.accumulated);
      succ.depth = state.depth + 1;
      succ.fresh_next = state.fresh_next + rr.consumed;
      out.push_back(std::move(succ));
    }
  }
  return out;
}

std::vector<NarrowingState> explore_basic_narrowing(const Term& subject, const RewriteTheory& R,
                                                    const ExploreOptions& opts) {
  std::vector<NarrowingState> all;
  all.push_back(initial_state(subject));
  std::size_t frontier_begin = 0;
  while (frontier_begin < all.size()) {
    std::size_t frontier_end = all.size();
    std::size_t n = frontier_end - frontier_begin;
    std::vector<std::vector<NarrowingState>> buckets(n);
    if (opts.parallel && n > 1) {
#pragma omp parallel for schedule(dynamic, 16)
      for (long i = 0; i < static_cast<long>(n); ++i)
        buckets[i] = narrow_step(all[frontier_begin + i], R);
    } else {
      for (std::size_t i = 0; i < n; ++i) buckets[i] = narrow_step(all[frontier_begin + i], R);
    }
    for (auto& b : buckets)
      for (auto& s : b) {
        all.push_back(std::move(s));
        if (all.size() > opts.max_states)
          throw BudgetExceededError("basic narrowing exceeded " +
                                    std::to_string(opts.max_states) + " states");
      }
    frontier_begin = frontier_end;
  }
  return all;
}

Term tuple_terms(const std::vector<Term>& parts) {
  return Term::app(Symbol{"$tuple", static_cast<int>(parts.size()), false}, parts);
}

std::vector<Term> untuple(const Term& tuple) {
  if (tuple.is_var() || tuple.sym().name != "$tuple")
    throw PreconditionError("untuple on a non-tuple term");
  return tuple.children();
}

std::vector<Substitution> equational_unify(const UnificationSystem& S, const RewriteTheory& R,
                                           const ExploreOptions& opts) {
  std::vector<Term> parts;
  for (const auto& [u, v] : S.equations) {
    parts.push_back(u);
    parts.push_back(v);
  }
  std::set<int> sys_vars = vars(parts);

  std::vector<Substitution> out;
  std::vector<std::string> seen;
  auto emit = [&](const Substitution& s) {
    Substitution r = s.restricted_to(sys_vars);
    std::string key = to_string(r);
    if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
      seen.push_back(key);
      out.push_back(std::move(r));
    }
  };

  for (const NarrowingState& st : explore_basic_narrowing(tuple_terms(parts), R, opts)) {
    std::vector<Term> cur = untuple(st.subject);
    std::vector<std::pair<Term, Term>> eqs;
    for (std::size_t i = 0; i + 1 < cur.size(); i += 2) eqs.emplace_back(cur[i], cur[i + 1]);
    if (auto m = mgu(std::move(eqs))) emit(compose(*m, st.accumulated));
  }
  return out;
}

std::vector<std::pair<Term, Substitution>> guess_normal_forms(const Term& t,
                                                              const RewriteTheory& R,
                                                              const ExploreOptions& opts) {
  std::set<int> tvars = vars(t);
  std::vector<std::pair<Term, Substitution>> out;
  for (const NarrowingState& st : explore_basic_narrowing(t, R, opts)) {
    Substitution theta = st.accumulated.restricted_to(tvars);
    bool dup = false;
    for (const auto& [u, s] : out)
      if (u == st.subject && s == theta) {
        dup = true;
        break;
      }
    if (!dup) out.emplace_back(st.subject, std::move(theta));
  }
  return out;
}

bool basic_narrowing_from_rhss_terminates(const RewriteTheory& R, std::size_t max_states) {
  for (const RewriteRule& rule : R.rules) {
    try {
      ExploreOptions opts;
      opts.max_states = max_states;
      explore_basic_narrowing(rule.rhs, R, opts);
    } catch (const BudgetExceededError&) {
      return false;
    }
  }
  return true;
}

}  // namespace keysub
