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
#include "keysub/saturation.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

#include "keysub/errors.hpp"
#include "keysub/narrowing.hpp"
#include "keysub/unify.hpp"

namespace keysub {

namespace {

/// Variable-to-variable injective renaming under construction.
struct Renaming {
  std::map<int, int> fwd;
  std::set<int> used;

  bool extend(int from, int to) {
    auto it = fwd.find(from);
    if (it != fwd.end()) return it->second == to;
    if (used.count(to)) return false;
    fwd[from] = to;
    used.insert(to);
    return true;
  }
};

bool renaming_match(const Term& a, const Term& b, Renaming& ren) {
  if (a.is_var()) return b.is_var() && ren.extend(a.var_id(), b.var_id());
  if (b.is_var() || !(a.sym() == b.sym())) return false;
  for (std::size_t i = 0; i < a.children().size(); ++i)
    if (!renaming_match(a.children()[i], b.children()[i], ren)) return false;
  return true;
}

bool premises_embed(std::size_t i, const std::vector<Term>& ps1, const std::vector<Term>& ps2,
                    std::vector<bool>& taken, Renaming ren_state, Renaming& out) {
  if (i == ps1.size()) {
    out = std::move(ren_state);
    return true;
  }
  for (std::size_t j = 0; j < ps2.size(); ++j) {
    if (taken[j]) continue;
    Renaming next = ren_state;
    if (!renaming_match(ps1[i], ps2[j], next)) continue;
    taken[j] = true;
    if (premises_embed(i + 1, ps1, ps2, taken, std::move(next), out)) return true;
    taken[j] = false;
  }
  return false;
}

}  // namespace

bool subsumes(const DeductionRule& r1, const DeductionRule& r2) {
  if (r1.premises.size() > r2.premises.size()) return false;
  Renaming ren;
  if (!renaming_match(r1.conclusion, r2.conclusion, ren)) return false;
  std::vector<bool> taken(r2.premises.size(), false);
  Renaming out;
  return premises_embed(0, r1.premises, r2.premises, taken, std::move(ren), out);
}

namespace {

Term renumber_term(const Term& t, std::map<int, int>& seen, int& next) {
  if (t.is_var()) {
    auto it = seen.find(t.var_id());
    if (it == seen.end()) it = seen.emplace(t.var_id(), next++).first;
    return Term::var(it->second);  // display names dropped for canonicity
  }
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  for (const Term& c : t.children()) kids.push_back(renumber_term(c, seen, next));
  return Term::app(t.sym(), std::move(kids));
}

DeductionRule renumber(const DeductionRule& r) {
  std::map<int, int> seen;
  int next = 0;
  DeductionRule out;
  out.name = r.name;
  for (const Term& p : r.premises) out.premises.push_back(renumber_term(p, seen, next));
  out.conclusion = renumber_term(r.conclusion, seen, next);
  return out;
}

std::string rule_key(const DeductionRule& r) { return to_string(r); }

}  // namespace

DeductionRule canonical_rule(const DeductionRule& r) {
  // Collapse exact duplicate premises; intruder knowledge is a persistent set,
  // so multiplicity never constrains applicability.
  std::vector<Term> ps;
  for (const Term& p : r.premises)
    if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);
  std::sort(ps.begin(), ps.end());

  // Renaming-canonical: smallest rendering over premise orders.
  DeductionRule best = renumber(DeductionRule{r.name, ps, r.conclusion});
  std::string best_key = rule_key(best);
  while (std::next_permutation(ps.begin(), ps.end())) {
    DeductionRule cand = renumber(DeductionRule{r.name, ps, r.conclusion});
    std::string key = rule_key(cand);
    if (key < best_key) {
      best = std::move(cand);
      best_key = std::move(key);
    }
  }
  return best;
}

namespace {

Term shift_term(const Term& t, int offset) {
  if (t.is_var()) return Term::var(t.var_id() + offset, t.var_name());
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  for (const Term& c : t.children()) kids.push_back(shift_term(c, offset));
  return Term::app(t.sym(), std::move(kids));
}

DeductionRule shift_rule(const DeductionRule& r, int offset) {
  DeductionRule out = r;
  for (Term& p : out.premises) p = shift_term(p, offset);
  out.conclusion = shift_term(out.conclusion, offset);
  return out;
}

int max_var(const DeductionRule& r) {
  int m = -1;
  for (int v : vars(r.premises)) m = std::max(m, v);
  for (int v : vars(r.conclusion)) m = std::max(m, v);
  return m;
}

}  // namespace

std::vector<DeductionRule> saturate(const std::vector<DeductionRule>& L, const RewriteTheory& R,
                                    int cap, std::vector<SaturationTraceEntry>* trace) {
  struct Entry {
    DeductionRule rule;
    bool alive = true;
  };
  std::vector<Entry> entries;
  std::deque<std::size_t> queue;
  int generated = 0;
  int sat_counter = 0;

  auto normalize_rule = [&](DeductionRule r) {
    if (!R.rules.empty()) {
      for (Term& p : r.premises) p = normalize(p, R);
      r.conclusion = normalize(r.conclusion, R);
    }
    return r;
  };

  auto add = [&](DeductionRule cand, const std::string& kind, const std::string& from) {
    cand = canonical_rule(normalize_rule(std::move(cand)));
    for (const Entry& e : entries) {
      if (e.alive && subsumes(e.rule, cand)) {
        if (trace) trace->push_back({"subsumed", rule_key(cand), rule_key(e.rule)});
        return;
      }
    }
    for (Entry& e : entries)
      if (e.alive && subsumes(cand, e.rule)) e.alive = false;
    if (cand.name.empty() || kind != "init") cand.name = "sat" + std::to_string(++sat_counter);
    if (kind != "init" && ++generated > cap)
      throw SaturationCapError("saturation generated more than " + std::to_string(cap) +
                               " rules; theory outside supported fragment");
    if (trace && kind != "init") trace->push_back({kind, rule_key(cand), from});
    entries.push_back({std::move(cand), true});
    queue.push_back(entries.size() - 1);
  };

  for (const DeductionRule& r : L) add(r, "init", "");

  while (!queue.empty()) {
    std::size_t idx = queue.front();
    queue.pop_front();
    if (!entries[idx].alive) continue;
    DeductionRule r = entries[idx].rule;

    // Narrow: one basic-narrowing step on the tupled rule sides; added rules
    // re-enter the queue, so sequences of steps are covered.
    if (!R.rules.empty()) {
      std::vector<Term> parts = r.premises;
      parts.push_back(r.conclusion);
      NarrowingState st = initial_state(tuple_terms(parts));
      for (const NarrowingState& succ : narrow_step(st, R)) {
        std::vector<Term> cur = untuple(succ.subject);
        DeductionRule cand;
        cand.premises.assign(cur.begin(), cur.end() - 1);
        cand.conclusion = cur.back();
        add(std::move(cand), "narrow", rule_key(r));
      }
    }

    // Closure: unify one rule's conclusion with a non-variable premise of
    // another, in both pairings of r with every live rule.
    std::vector<DeductionRule> live;
    for (const Entry& e : entries)
      if (e.alive) live.push_back(e.rule);
    for (const DeductionRule& s : live) {
      DeductionRule s2 = shift_rule(s, max_var(r) + 1);
      auto close = [&](const DeductionRule& producer, const DeductionRule& consumer) {
        for (std::size_t pi = 0; pi < consumer.premises.size(); ++pi) {
          const Term& t = consumer.premises[pi];
          if (t.is_var()) continue;
          auto sigma = mgu(producer.conclusion, t);
          if (!sigma) continue;
          DeductionRule cand;
          for (const Term& p : producer.premises) cand.premises.push_back(sigma->apply(p));
          for (std::size_t pj = 0; pj < consumer.premises.size(); ++pj)
            if (pj != pi) cand.premises.push_back(sigma->apply(consumer.premises[pj]));
          cand.conclusion = sigma->apply(consumer.conclusion);
          add(std::move(cand), "closure", rule_key(producer) + " ; " + rule_key(consumer));
        }
      };
      close(r, s2);
      close(s2, r);
    }
  }

  std::vector<DeductionRule> out;
  for (const Entry& e : entries)
    if (e.alive) out.push_back(e.rule);
  return out;
}

std::vector<DeductionRule> saturated_rules(const IntruderSystem& I, int cap) {
  return saturate(I.rules, I.theory, cap);
}

}  // namespace keysub
