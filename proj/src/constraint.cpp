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
#include "keysub/constraint.hpp"

#include <algorithm>
#include <map>

#include "keysub/errors.hpp"
#include "keysub/subst.hpp"

namespace keysub {

std::set<int> vars_of(const ConstraintSystem& c) {
  std::set<int> out;
  auto merge = [&](const Term& t) {
    auto v = vars(t);
    out.insert(v.begin(), v.end());
  };
  for (const auto& dc : c.constraints) {
    for (const Term& t : dc.knowledge) merge(t);
    merge(dc.target);
  }
  for (const auto& [u, v] : c.eqs.equations) {
    merge(u);
    merge(v);
  }
  return out;
}

std::string to_string(const ConstraintSystem& c) {
  std::string out;
  for (const auto& dc : c.constraints)
    out += "{" + to_string(dc.knowledge) + "} |> " + to_string(dc.target) + "\n";
  for (const auto& [u, v] : c.eqs.equations)
    out += to_string(u) + " = " + to_string(v) + "\n";
  return out;
}

ConstraintSystem apply_to_system(const Substitution& s, const ConstraintSystem& c) {
  ConstraintSystem out;
  out.kind = c.kind;
  out.eqs.theory = c.eqs.theory;
  for (const auto& dc : c.constraints) {
    DeductionConstraint ndc;
    for (const Term& t : dc.knowledge) {
      Term nt = s.apply(t);
      if (std::find(ndc.knowledge.begin(), ndc.knowledge.end(), nt) == ndc.knowledge.end())
        ndc.knowledge.push_back(std::move(nt));
    }
    ndc.target = s.apply(dc.target);
    out.constraints.push_back(std::move(ndc));
  }
  for (const auto& [u, v] : c.eqs.equations)
    out.eqs.equations.emplace_back(s.apply(u), s.apply(v));
  return out;
}

std::optional<WellformedViolation> check_wellformed(const ConstraintSystem& c) {
  // Variables a structured deduce target binds through its equation in S count
  // as originated at that constraint.
  auto bound_through_eqs = [&](const Term& target) {
    std::set<int> out;
    if (!target.is_var()) {
      auto v = vars(target);
      out.insert(v.begin(), v.end());
      return out;
    }
    for (const auto& [u, v] : c.eqs.equations) {
      if (u == target) {
        auto w = vars(v);
        out.insert(w.begin(), w.end());
      } else if (v == target) {
        auto w = vars(u);
        out.insert(w.begin(), w.end());
      }
    }
    return out;
  };

  std::set<int> originated;
  for (std::size_t i = 0; i < c.constraints.size(); ++i) {
    const auto& dc = c.constraints[i];
    for (int v : vars(dc.knowledge)) {
      if (!originated.count(v))
        return WellformedViolation{
            i, "variable ?v" + std::to_string(v) + " in knowledge not bound by an earlier target"};
    }
    if (i > 0) {
      const auto& prev = c.constraints[i - 1].knowledge;
      for (const Term& t : prev) {
        if (std::find(dc.knowledge.begin(), dc.knowledge.end(), t) == dc.knowledge.end())
          return WellformedViolation{i, "knowledge not monotone: lost " + to_string(t)};
      }
    }
    if (dc.target.is_var()) originated.insert(dc.target.var_id());
    auto extra = bound_through_eqs(dc.target);
    originated.insert(extra.begin(), extra.end());
  }
  return std::nullopt;
}

std::vector<Term> eliminate_variables(const std::vector<Term>& knowledge,
                                      const ConstraintSystem& c, std::size_t index) {
  std::vector<Term> out;
  for (const Term& t : knowledge) {
    if (!t.is_var()) {
      out.push_back(t);
      continue;
    }
    bool earlier_target = false;
    for (std::size_t j = 0; j < index && j < c.constraints.size(); ++j) {
      if (c.constraints[j].target == t) {
        earlier_target = true;
        break;
      }
    }
    if (!earlier_target)
      throw PreconditionError("knowledge variable " + to_string(t) +
                              " is not the target of an earlier constraint");
  }
  return out;
}

Measure measure_of(const ConstraintSystem& c) {
  Measure m;
  m.nbv = vars_of(c).size();
  for (const auto& dc : c.constraints) m.targets.push_back(dc.target);
  return m;
}

namespace {

bool strict_subterm(const Term& s, const Term& t) {
  if (s == t) return false;
  auto subs = subterms(t);
  return subs.count(s) > 0;
}

}  // namespace

bool multiset_subterm_less(const std::vector<Term>& a, const std::vector<Term>& b) {
  // Multiset differences with multiplicity.
  std::map<Term, int> da, db;
  for (const Term& t : a) da[t]++;
  for (const Term& t : b) db[t]++;
  std::vector<Term> only_a, only_b;
  for (const auto& [t, n] : da) {
    int extra = n - (db.count(t) ? db[t] : 0);
    for (int k = 0; k < extra; ++k) only_a.push_back(t);
  }
  for (const auto& [t, n] : db) {
    int extra = n - (da.count(t) ? da[t] : 0);
    for (int k = 0; k < extra; ++k) only_b.push_back(t);
  }
  if (only_a.empty() && only_b.empty()) return false;
  for (const Term& x : only_a) {
    bool dominated = false;
    for (const Term& y : only_b) {
      if (strict_subterm(x, y)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) return false;
  }
  return true;
}

bool measure_less(const Measure& after, const Measure& before) {
  if (after.nbv != before.nbv) return after.nbv < before.nbv;
  return multiset_subterm_less(after.targets, before.targets);
}

}  // namespace keysub
