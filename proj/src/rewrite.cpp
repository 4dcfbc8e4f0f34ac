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
#include "keysub/rewrite.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "keysub/errors.hpp"

namespace keysub {

namespace {

// Builders for the built-in signature.
const Symbol kSig{"sig", 2, false};
const Symbol kVer{"ver", 3, false};
const Symbol kSk{"sk", 1, true};
const Symbol kPk{"pk", 1, true};
const Symbol kSkp{"skp", 2, false};
const Symbol kPkp{"pkp", 2, false};
const Symbol kSskp{"sskp", 2, false};
const Symbol kPpkp{"ppkp", 2, false};
const Symbol kF{"f", 2, false};
const Symbol kZero{"0", 0, false};
const Symbol kOne{"1", 0, false};

Term sig(Term m, Term k) { return Term::app(kSig, {std::move(m), std::move(k)}); }
Term ver(Term m, Term s, Term k) {
  return Term::app(kVer, {std::move(m), std::move(s), std::move(k)});
}
Term sk(Term a) { return Term::app(kSk, {std::move(a)}); }
Term pk(Term a) { return Term::app(kPk, {std::move(a)}); }
Term skp(Term a, Term b) { return Term::app(kSkp, {std::move(a), std::move(b)}); }
Term pkp(Term a, Term b) { return Term::app(kPkp, {std::move(a), std::move(b)}); }
Term sskp(Term a, Term b) { return Term::app(kSskp, {std::move(a), std::move(b)}); }
Term ppkp(Term a, Term b) { return Term::app(kPpkp, {std::move(a), std::move(b)}); }
Term fm(Term a, Term b) { return Term::app(kF, {std::move(a), std::move(b)}); }
Term one() { return Term::app(kOne, {}); }

const Term X = Term::var(0, "x");
const Term Y = Term::var(1, "y");
const Term Y1 = Term::var(2, "y1");
const Term Y2 = Term::var(3, "y2");

RewriteTheory make_dsks() {
  RewriteTheory R;
  R.name = "dsks";
  R.signature = {kSig, kVer, kSkp, kPkp, kZero, kOne, kSk, kPk};
  R.rules = {
      {ver(X, sig(X, sk(Y)), pk(Y)), one()},
      {ver(X, sig(X, skp(Y1, Y2)), pkp(Y1, Y2)), one()},
      {ver(X, sig(X, sk(Y)), pkp(pk(Y), sig(X, sk(Y)))), one()},
      {sig(X, skp(pk(Y), sig(X, sk(Y)))), sig(X, sk(Y))},
  };
  return R;
}

RewriteTheory make_deo() {
  RewriteTheory R;
  R.name = "deo";
  R.signature = {kSig, kVer, kSskp, kPpkp, kF, kZero, kOne, kSk, kPk};
  R.rules = {
      {ver(X, sig(X, sk(Y)), pk(Y)), one()},
      {ver(X, sig(X, sskp(Y1, Y2)), ppkp(Y1, Y2)), one()},
      {ver(fm(pk(Y), sig(X, sk(Y))), sig(X, sk(Y)), ppkp(pk(Y), sig(X, sk(Y)))), one()},
      {sig(fm(pk(Y), sig(X, sk(Y))), sskp(pk(Y), sig(X, sk(Y)))), sig(X, sk(Y))},
  };
  return R;
}

}  // namespace

const RewriteTheory& dsks_theory() {
  static const RewriteTheory R = make_dsks();
  return R;
}

const RewriteTheory& deo_theory() {
  static const RewriteTheory R = make_deo();
  return R;
}

std::vector<std::pair<Term, Term>> dsks_axioms() {
  return {
      {ver(X, sig(X, sk(Y)), pk(Y)), one()},
      {ver(X, sig(X, skp(Y1, Y2)), pkp(Y1, Y2)), one()},
      {sig(X, skp(pk(Y), sig(X, sk(Y)))), sig(X, sk(Y))},
  };
}

std::vector<std::pair<Term, Term>> deo_axioms() {
  return {
      {ver(X, sig(X, sk(Y)), pk(Y)), one()},
      {ver(X, sig(X, sskp(Y1, Y2)), ppkp(Y1, Y2)), one()},
      {sig(fm(pk(Y), sig(X, sk(Y))), sskp(pk(Y), sig(X, sk(Y)))), sig(X, sk(Y))},
  };
}

std::optional<Symbol> RewriteTheory::find_symbol(const std::string& sym_name) const {
  for (const Symbol& s : signature)
    if (s.name == sym_name) return s;
  return std::nullopt;
}

namespace {

struct StepBudget {
  int left;
  void tick(const RewriteTheory& R) {
    if (--left < 0)
      throw StepBudgetError("rewrite step cap exceeded in theory '" + R.name +
                            "' (non-terminating rule set?)");
  }
};

Term normalize_innermost(const Term& t, const RewriteTheory& R, StepBudget& budget) {
  if (t.is_var()) return t;
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  bool changed = false;
  for (const Term& c : t.children()) {
    Term nc = normalize_innermost(c, R, budget);
    changed = changed || nc != c;
    kids.push_back(std::move(nc));
  }
  Term u = changed ? Term::app(t.sym(), std::move(kids)) : t;
  for (const RewriteRule& rule : R.rules) {
    if (auto m = match(rule.lhs, u)) {
      budget.tick(R);
      return normalize_innermost(m->apply(rule.rhs), R, budget);
    }
  }
  return u;
}

std::optional<Term> rewrite_leftmost_outermost(const Term& t, const RewriteTheory& R) {
  for (const Position& p : nonvar_positions(t)) {
    Term sub = subterm_at(t, p);
    for (const RewriteRule& rule : R.rules) {
      if (auto m = match(rule.lhs, sub)) return replace_at(t, p, m->apply(rule.rhs));
    }
  }
  return std::nullopt;
}

}  // namespace

Term normalize(const Term& t, const RewriteTheory& R, Strategy strategy) {
  if (R.rules.empty()) return t;
  StepBudget budget{R.step_cap};
  if (strategy == Strategy::Innermost) return normalize_innermost(t, R, budget);
  Term cur = t;
  while (auto next = rewrite_leftmost_outermost(cur, R)) {
    budget.tick(R);
    cur = *next;
  }
  return cur;
}

std::vector<Term> normalize(const std::vector<Term>& ts, const RewriteTheory& R) {
  std::vector<Term> out;
  out.reserve(ts.size());
  for (const Term& t : ts) out.push_back(normalize(t, R));
  return out;
}

bool is_normal(const Term& t, const RewriteTheory& R) {
  return !rewrite_once(t, R).has_value();
}

std::optional<Term> rewrite_once(const Term& t, const RewriteTheory& R) {
  return rewrite_leftmost_outermost(t, R);
}

namespace {

Term shift_vars(const Term& t, int offset) {
  if (t.is_var()) return Term::var(t.var_id() + offset, t.var_name());
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  for (const Term& c : t.children()) kids.push_back(shift_vars(c, offset));
  return Term::app(t.sym(), std::move(kids));
}

}  // namespace

std::vector<std::pair<Term, Term>> critical_pairs(const RewriteTheory& R) {
  std::vector<std::pair<Term, Term>> out;
  for (std::size_t i = 0; i < R.rules.size(); ++i) {
    // Rename rule j's variables apart from rule i's.
    int offset = 0;
    for (int v : vars(R.rules[i].lhs)) offset = std::max(offset, v + 1);
    for (std::size_t j = 0; j < R.rules.size(); ++j) {
      Term lhs_j = shift_vars(R.rules[j].lhs, offset);
      Term rhs_j = shift_vars(R.rules[j].rhs, offset);
      for (const Position& p : nonvar_positions(R.rules[i].lhs)) {
        if (i == j && p.empty()) continue;
        auto sigma = mgu(subterm_at(R.rules[i].lhs, p), lhs_j);
        if (!sigma) continue;
        Term overlapped = sigma->apply(R.rules[i].lhs);
        Term by_root = sigma->apply(R.rules[i].rhs);
        Term by_inner = replace_at(overlapped, p, sigma->apply(rhs_j));
        out.emplace_back(by_root, by_inner);
      }
    }
  }
  return out;
}

namespace {

// Strict precedence on symbol names, kept transitively closed.
struct Precedence {
  std::map<std::string, std::set<std::string>> gt;

  bool greater(const std::string& f, const std::string& g) const {
    auto it = gt.find(f);
    return it != gt.end() && it->second.count(g);
  }

  bool add(const std::string& f, const std::string& g) {
    if (f == g || greater(g, f)) return false;
    std::set<std::string> below = {g};
    auto it = gt.find(g);
    if (it != gt.end()) below.insert(it->second.begin(), it->second.end());
    std::vector<std::string> above = {f};
    for (auto& [h, set] : gt)
      if (set.count(f)) above.push_back(h);
    for (const std::string& h : above) {
      if (below.count(h)) return false;
      gt[h].insert(below.begin(), below.end());
    }
    return true;
  }
};

enum class Tri { False, True, Unknown };

struct NeedPair {
  std::string a, b;
  bool set = false;
};

// Lexicographic path ordering. When an undecided precedence pair blocks the
// comparison, reports Unknown and records the pair for the search to branch on.
Tri lpo_gt(const Term& s, const Term& t, const Precedence& prec, NeedPair& need) {
  if (s == t) return Tri::False;
  if (s.is_var()) return Tri::False;
  if (t.is_var()) return occurs(t.var_id(), s) ? Tri::True : Tri::False;

  bool unknown_seen = false;
  for (const Term& si : s.children()) {
    if (si == t) return Tri::True;
    Tri r = lpo_gt(si, t, prec, need);
    if (r == Tri::True) return Tri::True;
    if (r == Tri::Unknown) unknown_seen = true;
  }

  auto all_args_smaller = [&](Tri head_result) -> Tri {
    Tri acc = head_result;
    for (const Term& tj : t.children()) {
      Tri r = lpo_gt(s, tj, prec, need);
      if (r == Tri::False) return unknown_seen ? Tri::Unknown : Tri::False;
      if (r == Tri::Unknown) acc = Tri::Unknown;
    }
    return acc;
  };

  if (s.sym() == t.sym()) {
    std::size_t k = 0;
    while (k < s.children().size() && s.children()[k] == t.children()[k]) ++k;
    if (k == s.children().size()) return unknown_seen ? Tri::Unknown : Tri::False;
    Tri lex = lpo_gt(s.children()[k], t.children()[k], prec, need);
    if (lex == Tri::False) return unknown_seen ? Tri::Unknown : Tri::False;
    return all_args_smaller(lex);
  }

  const std::string& f = s.sym().name;
  const std::string& g = t.sym().name;
  if (prec.greater(f, g)) return all_args_smaller(Tri::True);
  if (prec.greater(g, f)) return unknown_seen ? Tri::Unknown : Tri::False;
  if (!need.set) {
    need = {f, g, true};
  }
  return Tri::Unknown;
}

bool orient_all(const std::vector<RewriteRule>& rules, Precedence prec, int depth) {
  if (depth > 64) return false;
  for (const RewriteRule& rule : rules) {
    NeedPair need;
    Tri r = lpo_gt(rule.lhs, rule.rhs, prec, need);
    if (r == Tri::False) return false;
    if (r == Tri::Unknown) {
      if (!need.set) return false;
      Precedence p1 = prec;
      if (p1.add(need.a, need.b) && orient_all(rules, p1, depth + 1)) return true;
      Precedence p2 = prec;
      if (p2.add(need.b, need.a) && orient_all(rules, p2, depth + 1)) return true;
      return false;
    }
  }
  return true;
}

}  // namespace

ConvergenceReport check_convergence(const RewriteTheory& R) {
  ConvergenceReport report;
  report.terminating =
      orient_all(R.rules, Precedence{}, 0) ? TerminationStatus::Yes : TerminationStatus::Unknown;

  auto pairs = critical_pairs(R);
  report.critical_pair_count = pairs.size();
  report.locally_confluent = true;
  for (const auto& [left, right] : pairs) {
    try {
      if (normalize(left, R) != normalize(right, R)) {
        report.locally_confluent = false;
        report.unjoined_pairs.push_back({left, right});
      }
    } catch (const StepBudgetError&) {
      report.locally_confluent = false;
      report.unjoined_pairs.push_back({left, right});
    }
  }
  return report;
}

}  // namespace keysub
