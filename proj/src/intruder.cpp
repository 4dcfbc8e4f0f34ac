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
#include "keysub/intruder.hpp"

#include <algorithm>
#include <functional>

#include "keysub/errors.hpp"
#include "keysub/unify.hpp"

namespace keysub {

DeductionRule rule_for_term(std::string name, const Term& t) {
  if (t.is_app() && t.sym().is_private)
    throw PreconditionError("deduction rules never conclude private operations: " + to_string(t));
  std::vector<Term> premises;
  for (int v : vars(t)) premises.push_back(Term::var(v));
  std::sort(premises.begin(), premises.end());
  return DeductionRule{std::move(name), std::move(premises), t};
}

std::vector<DeductionRule> public_constructor_rules(const RewriteTheory& R) {
  std::vector<DeductionRule> out;
  for (const Symbol& s : R.signature) {
    if (s.is_private) continue;
    std::vector<Term> args;
    for (int i = 0; i < s.arity; ++i) args.push_back(Term::var(i, "x" + std::to_string(i + 1)));
    std::string name = s.name == "0" ? "zero" : s.name == "1" ? "one" : s.name;
    out.push_back(rule_for_term(name, Term::app(s, args)));
  }
  return out;
}

const IntruderSystem& dsks_intruder() {
  static const IntruderSystem I = [] {
    IntruderSystem sys;
    sys.name = "dsks";
    sys.theory = dsks_theory();
    sys.rules = public_constructor_rules(sys.theory);
    return sys;
  }();
  return I;
}

const IntruderSystem& deo_intruder() {
  static const IntruderSystem I = [] {
    IntruderSystem sys;
    sys.name = "deo";
    sys.theory = deo_theory();
    sys.rules = public_constructor_rules(sys.theory);
    return sys;
  }();
  return I;
}

IntruderSystem with_rules(const IntruderSystem& base, std::vector<DeductionRule> rules,
                          std::string name) {
  IntruderSystem out = base;
  out.rules = std::move(rules);
  out.name = std::move(name);
  return out;
}

IntruderSystem with_empty_theory(const IntruderSystem& base) {
  IntruderSystem out = base;
  out.theory = RewriteTheory{};
  out.name = base.name + "-empty";
  return out;
}

std::string to_string(const DeductionRule& r) {
  std::string out = to_string(r.premises);
  if (!out.empty()) out += " ";
  return out + "-> " + to_string(r.conclusion);
}

namespace {

Term maybe_normalize(const Term& t, const IntruderSystem& I) {
  return I.modulo_theory() ? normalize(t, I.theory) : t;
}

bool member(const Term& t, const std::vector<Term>& set) {
  return std::find(set.begin(), set.end(), t) != set.end();
}

/// Enumerates all substitutions instantiating `rule` against `knowledge` under
/// the bounded regime, invoking fn on each fully instantiated substitution.
void for_each_instantiation(const DeductionRule& rule, const std::vector<Term>& knowledge,
                            const IntruderSystem& I,
                            const std::function<void(const Substitution&)>& fn) {
  // Non-variable premises first: matching against members pins rule variables.
  std::vector<Term> nonvar, var_premises;
  for (const Term& p : rule.premises)
    (p.is_var() ? var_premises : nonvar).push_back(p);

  std::function<void(std::size_t, Substitution)> match_nonvar = [&](std::size_t i,
                                                                    Substitution s) {
    if (i == nonvar.size()) {
      // Remaining unconstrained variables range over knowledge members.
      std::vector<int> unbound;
      for (int v : vars(rule.premises))
        if (!s.lookup(v)) unbound.push_back(v);
      for (int v : vars(rule.conclusion))
        if (!s.lookup(v) && std::find(unbound.begin(), unbound.end(), v) == unbound.end())
          unbound.push_back(v);
      std::function<void(std::size_t, Substitution)> assign = [&](std::size_t j, Substitution s2) {
        if (j == unbound.size()) {
          // Every variable premise instance must be known.
          for (const Term& vp : var_premises) {
            Term inst = maybe_normalize(s2.apply(vp), I);
            if (!member(inst, knowledge)) return;
          }
          fn(s2);
          return;
        }
        for (const Term& e : knowledge) {
          Substitution s3 = s2;
          s3.bind(unbound[j], e);
          assign(j + 1, std::move(s3));
        }
      };
      assign(0, std::move(s));
      return;
    }
    for (const Term& e : knowledge) {
      if (auto m = match(s.apply(nonvar[i]), e)) match_nonvar(i + 1, compose(*m, s));
    }
  };
  match_nonvar(0, Substitution{});
}

}  // namespace

TermSet one_step(const std::vector<Term>& knowledge, const IntruderSystem& I) {
  std::vector<Term> E = knowledge;
  if (I.modulo_theory())
    for (Term& t : E) t = normalize(t, I.theory);
  TermSet out;
  for (const DeductionRule& rule : I.rules) {
    for_each_instantiation(rule, E, I, [&](const Substitution& s) {
      Term c = s.apply(rule.conclusion);
      if (!is_ground(c)) return;
      out.insert(maybe_normalize(c, I));
    });
  }
  return out;
}

std::optional<std::size_t> check_derivation(const Derivation& d, const IntruderSystem& I) {
  std::vector<Term> knowledge;
  for (const Term& t : d.start) knowledge.push_back(maybe_normalize(t, I));
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    const auto& step = d.steps[i];
    const DeductionRule* rule = nullptr;
    for (const DeductionRule& r : I.rules)
      if (r.name == step.rule) {
        rule = &r;
        break;
      }
    if (!rule) return i;
    for (const Term& p : rule->premises) {
      Term inst = step.sigma.apply(p);
      if (!is_ground(inst) || !member(maybe_normalize(inst, I), knowledge)) return i;
    }
    Term c = step.sigma.apply(rule->conclusion);
    if (!is_ground(c) || maybe_normalize(c, I) != maybe_normalize(step.produced, I)) return i;
    knowledge.push_back(maybe_normalize(step.produced, I));
  }
  if (!member(maybe_normalize(d.goal, I), knowledge)) return d.steps.size();
  return std::nullopt;
}

std::string to_string(const Derivation& d) {
  std::string out;
  for (const auto& s : d.steps)
    out += s.rule + " " + to_string(s.sigma) + " |- " + to_string(s.produced) + "\n";
  return out;
}

DeduceOracle::DeduceOracle(std::vector<Term> knowledge, const IntruderSystem& I,
                           std::size_t size_cap)
    : I_(I), cap_(size_cap) {
  for (const Term& t : knowledge) {
    Term n = maybe_normalize(t, I_);
    if (known_.insert(n).second) {
      base_.push_back(n);
      known_list_.push_back(n);
    }
  }
}

bool DeduceOracle::deducible(const Term& goal) {
  Term g = maybe_normalize(goal, I_);
  // The proved set only grows; iterate until the answer is stable, so a
  // subgoal rejected inside a cycle gets retried once proved elsewhere.
  while (true) {
    grew_ = false;
    visiting_.clear();
    if (search(g)) return true;
    if (!grew_) return false;
  }
}

void DeduceOracle::mark_proved(const Term& t, Proof p) {
  if (known_.insert(t).second) {
    known_list_.push_back(t);
    proofs_.emplace(t, std::move(p));
    grew_ = true;
  }
}

bool DeduceOracle::search(const Term& t) {
  if (known_.count(t)) return true;
  if (term_size(t) > cap_) return false;
  if (visiting_.count(t)) return false;
  visiting_.insert(t);
  bool ok = try_rules(t) || (I_.modulo_theory() && try_inverse_rewrite(t));
  visiting_.erase(t);
  return ok;
}

bool DeduceOracle::prove_premises(const DeductionRule& rule, const Substitution& s0,
                                  const Term& goal) {
  // Rule variables not pinned by the conclusion range over known terms.
  std::vector<int> unbound;
  for (int v : vars(rule.premises))
    if (!s0.lookup(v)) unbound.push_back(v);

  std::vector<Term> candidates = known_list_;  // snapshot; deterministic order
  std::function<bool(std::size_t, const Substitution&)> go = [&](std::size_t j,
                                                                 const Substitution& s) {
    if (j == unbound.size()) {
      std::vector<Term> insts;
      for (const Term& p : rule.premises) {
        Term inst = maybe_normalize(s.apply(p), I_);
        if (term_size(inst) > cap_) return false;
        insts.push_back(std::move(inst));
      }
      for (const Term& inst : insts)
        if (!search(inst)) return false;
      mark_proved(goal, Proof{rule.name, s, insts});
      return true;
    }
    for (const Term& e : candidates) {
      Substitution s2 = s;
      s2.bind(unbound[j], e);
      if (go(j + 1, s2)) return true;
    }
    return false;
  };
  return go(0, s0);
}

bool DeduceOracle::try_rules(const Term& t) {
  for (const DeductionRule& rule : I_.rules) {
    auto s0 = match(rule.conclusion, t);
    if (!s0) continue;
    if (prove_premises(rule, *s0, t)) return true;
  }
  return false;
}

bool DeduceOracle::try_inverse_rewrite(const Term& t) {
  // A normal goal can also be the normal form of a constructor application
  // that reduces at the root: match the rule's right side against the goal,
  // reconstruct the redex, and derive its arguments instead.
  for (const RewriteRule& rw : I_.theory.rules) {
    if (vars(rw.rhs) != vars(rw.lhs)) continue;  // oracle caveat: no free guessing
    auto s0 = match(rw.rhs, t);
    if (!s0) continue;
    Term redex = s0->apply(rw.lhs);
    if (!is_ground(redex)) continue;
    if (normalize(redex, I_.theory) != t) continue;
    const DeductionRule* ctor = nullptr;
    for (const DeductionRule& rule : I_.rules) {
      if (rule.conclusion.is_app() && rule.conclusion.sym() == redex.sym() &&
          rule.premises.size() == redex.children().size()) {
        bool plain = true;
        for (const Term& p : rule.conclusion.children())
          if (!p.is_var()) plain = false;
        if (plain) {
          ctor = &rule;
          break;
        }
      }
    }
    if (!ctor) continue;
    bool all = true;
    for (const Term& c : redex.children()) {
      if (term_size(c) > cap_ || !search(c)) {
        all = false;
        break;
      }
    }
    if (all) {
      Substitution sc;
      for (std::size_t i = 0; i < redex.children().size(); ++i)
        sc.bind(ctor->conclusion.children()[i].var_id(), redex.children()[i]);
      mark_proved(t, Proof{ctor->name, sc, redex.children()});
      return true;
    }
  }
  return false;
}

void DeduceOracle::emit(const Term& t, TermHashSet& done, std::vector<Derivation::Step>& steps) {
  if (done.count(t)) return;
  done.insert(t);
  auto it = proofs_.find(t);
  if (it == proofs_.end()) return;  // base knowledge
  for (const Term& p : it->second.premise_instances) emit(p, done, steps);
  steps.push_back({it->second.rule, it->second.sigma, t});
}

std::optional<Derivation> DeduceOracle::derivation_of(const Term& goal) {
  Term g = maybe_normalize(goal, I_);
  if (!deducible(g)) return std::nullopt;
  Derivation d;
  d.start = base_;
  d.goal = g;
  TermHashSet done(base_.begin(), base_.end());
  emit(g, done, d.steps);
  return d;
}

std::size_t default_size_cap(const std::vector<Term>& knowledge, const Term& goal) {
  std::size_t cap = term_size(goal);
  for (const Term& t : knowledge) cap = std::max(cap, term_size(t));
  return cap + 4;
}

bool deducible(const std::vector<Term>& knowledge, const Term& goal, const IntruderSystem& I,
               std::size_t size_cap) {
  DeduceOracle oracle(knowledge, I, size_cap);
  return oracle.deducible(goal);
}

bool deducible(const std::vector<Term>& knowledge, const Term& goal, const IntruderSystem& I) {
  return deducible(knowledge, goal, I, default_size_cap(knowledge, goal));
}

}  // namespace keysub
