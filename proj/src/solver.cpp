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
#include "keysub/solver.hpp"

#include <algorithm>
#include <chrono>

#include <json.hpp>

#include "keysub/errors.hpp"
#include "keysub/narrowing.hpp"
#include "keysub/unify.hpp"

namespace keysub {

using json = nlohmann::json;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Sat: return "SAT";
    case Verdict::Unsat: return "UNSAT";
    default: return "INCONCLUSIVE";
  }
}

SolverConfig make_config(const std::string& theory_name) {
  SolverConfig cfg;
  const IntruderSystem& I = theory_name == "deo" ? deo_intruder() : dsks_intruder();
  if (theory_name != "dsks" && theory_name != "deo")
    throw PreconditionError("unknown built-in theory '" + theory_name + "'");
  cfg.theory = I.theory;
  cfg.base_rules = I.rules;
  cfg.saturated_rules = saturated_rules(I);
  return cfg;
}

SolverConfig make_config(const RewriteTheory& theory) {
  auto report = check_convergence(theory);
  if (!report.convergent())
    throw PreconditionError("theory '" + theory.name +
                            "' is not verified convergent; the procedure requires a convergent "
                            "rewrite system");
  if (!basic_narrowing_from_rhss_terminates(theory))
    throw PreconditionError("basic narrowing from the right-hand sides of theory '" +
                            theory.name + "' did not terminate within the probe budget");
  SolverConfig cfg;
  cfg.theory = theory;
  cfg.base_rules = public_constructor_rules(theory);
  cfg.saturated_rules = saturate(cfg.base_rules, theory);
  return cfg;
}

namespace {

struct SystemShape {
  std::vector<std::size_t> knowledge_sizes;
  std::size_t eq_count = 0;
  std::string theory_tag;
  ConstraintSystem::Kind kind = ConstraintSystem::Kind::Initial;
};

std::pair<Term, SystemShape> tuple_system(const ConstraintSystem& c) {
  SystemShape shape;
  shape.eq_count = c.eqs.equations.size();
  shape.theory_tag = c.eqs.theory;
  shape.kind = c.kind;
  std::vector<Term> parts;
  for (const auto& dc : c.constraints) {
    shape.knowledge_sizes.push_back(dc.knowledge.size());
    for (const Term& t : dc.knowledge) parts.push_back(t);
    parts.push_back(dc.target);
  }
  for (const auto& [u, v] : c.eqs.equations) {
    parts.push_back(u);
    parts.push_back(v);
  }
  return {tuple_terms(parts), shape};
}

ConstraintSystem untuple_system(const Term& tuple, const SystemShape& shape) {
  std::vector<Term> parts = untuple(tuple);
  ConstraintSystem out;
  out.eqs.theory = shape.theory_tag;
  std::size_t k = 0;
  for (std::size_t size : shape.knowledge_sizes) {
    DeductionConstraint dc;
    for (std::size_t j = 0; j < size; ++j) {
      const Term& t = parts[k++];
      if (std::find(dc.knowledge.begin(), dc.knowledge.end(), t) == dc.knowledge.end())
        dc.knowledge.push_back(t);
    }
    dc.target = parts[k++];
    out.constraints.push_back(std::move(dc));
  }
  for (std::size_t j = 0; j < shape.eq_count; ++j) {
    Term u = parts[k++];
    Term v = parts[k++];
    out.eqs.equations.emplace_back(std::move(u), std::move(v));
  }
  bool all_var_targets = true;
  for (const auto& dc : out.constraints)
    if (!dc.target.is_var()) all_var_targets = false;
  out.kind = all_var_targets ? shape.kind : ConstraintSystem::Kind::Extended;
  return out;
}

}  // namespace

std::vector<Step1Candidate> step1_guess(const ConstraintSystem& c, const RewriteTheory& R,
                                        bool parallel, std::size_t max_states) {
  auto [tuple, shape] = tuple_system(c);
  std::set<int> cvars = vars_of(c);

  ExploreOptions opts;
  opts.parallel = parallel;
  opts.max_states = max_states;

  std::vector<Step1Candidate> out;
  std::vector<std::string> seen;
  for (const NarrowingState& st : explore_basic_narrowing(tuple, R, opts)) {
    Step1Candidate cand;
    cand.system = untuple_system(st.subject, shape);
    cand.theta = st.accumulated.restricted_to(cvars);
    std::string key = to_string(cand.system) + "|" + to_string(cand.theta);
    if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
      seen.push_back(std::move(key));
      out.push_back(std::move(cand));
    }
  }
  return out;
}

std::optional<Step2Result> step2_unify(const ConstraintSystem& c0) {
  auto sigma = mgu(c0.eqs.equations);
  if (!sigma) return std::nullopt;
  ConstraintSystem stripped = c0;
  stripped.eqs.equations.clear();
  Step2Result out;
  out.system = apply_to_system(*sigma, stripped);
  out.system.kind = ConstraintSystem::Kind::Extended;
  out.sigma = *sigma;
  return out;
}

namespace {

struct Budget {
  std::uint64_t nodes_left;
  std::chrono::steady_clock::time_point deadline;
  std::uint64_t used = 0;

  void tick() {
    ++used;
    if (nodes_left-- == 0)
      throw BudgetExceededError("node budget exhausted");
    if ((used & 0xff) == 0 && std::chrono::steady_clock::now() > deadline)
      throw BudgetExceededError("time budget exhausted");
  }
};

struct Step3Ctx {
  SolverConfig* cfg;
  Budget budget;
  std::vector<std::string> violations;

  void trace(const json& j) {
    if (cfg->trace) cfg->trace->record(j.dump());
  }
};

void audit_step(Step3Ctx& ctx, const char* rule, const Measure& before,
                const ConstraintSystem& after) {
  if (!ctx.cfg->audit_measure) return;
  Measure m_after = measure_of(after);
  if (!measure_less(m_after, before)) {
    ctx.violations.push_back(std::string("measure did not decrease on ") + rule + ": nbv " +
                             std::to_string(before.nbv) + " -> " + std::to_string(m_after.nbv));
  }
}

std::pair<DeductionRule, int> rename_rule_apart(const DeductionRule& r, int base) {
  std::set<int> ids = vars(r.premises);
  for (int v : vars(r.conclusion)) ids.insert(v);
  Substitution ren;
  int k = 0;
  for (int id : ids) ren.bind(id, Term::var(base + k++));
  return {DeductionRule{r.name, ren.apply(r.premises), ren.apply(r.conclusion)}, k};
}

std::optional<Step3Result> step3_rec(const ConstraintSystem& c, const Substitution& acc,
                                     int fresh_base, Step3Ctx& ctx) {
  ctx.budget.tick();

  // Leftmost unsolved constraint.
  std::size_t i = 0;
  while (i < c.constraints.size() && c.constraints[i].target.is_var()) ++i;
  if (i == c.constraints.size()) return Step3Result{c, acc};

  const Term& target = c.constraints[i].target;
  std::vector<Term> members = ctx.cfg->eager_var_elim
                                  ? eliminate_variables(c.constraints[i].knowledge, c, i)
                                  : c.constraints[i].knowledge;
  if (ctx.cfg->reversed) std::reverse(members.begin(), members.end());

  Measure before = measure_of(c);

  // Unif: some non-variable member of E unifies with the target.
  for (const Term& u : members) {
    if (u.is_var()) continue;
    auto sigma = mgu(u, target);
    if (!sigma) continue;
    ConstraintSystem next;
    next.kind = ConstraintSystem::Kind::Extended;
    next.eqs.theory = c.eqs.theory;
    for (std::size_t j = 0; j < c.constraints.size(); ++j)
      if (j != i) next.constraints.push_back(c.constraints[j]);
    next = apply_to_system(*sigma, next);
    audit_step(ctx, "unif", before, next);
    ctx.trace({{"event", "unif"},
               {"constraint", i},
               {"member", to_string(u)},
               {"target", to_string(target)}});
    if (auto r = step3_rec(next, compose(*sigma, acc), fresh_base, ctx)) return r;
  }

  // Apply: a deduction rule whose conclusion meets the target; non-variable
  // premises are matched against members of E, variable premises become new
  // constraints in place.
  std::vector<const DeductionRule*> rule_order;
  for (const DeductionRule& r : ctx.cfg->saturated_rules) rule_order.push_back(&r);
  if (ctx.cfg->reversed) std::reverse(rule_order.begin(), rule_order.end());

  for (const DeductionRule* rule_ptr : rule_order) {
    auto [rule, consumed] = rename_rule_apart(*rule_ptr, fresh_base);
    int next_fresh = fresh_base + consumed;

    std::vector<Term> var_premises, nonvar_premises;
    for (const Term& p : rule.premises)
      (p.is_var() ? var_premises : nonvar_premises).push_back(p);

    // Enumerate member tuples for the non-variable premises.
    std::vector<std::size_t> pick(nonvar_premises.size(), 0);
    while (true) {
      if (!nonvar_premises.empty() && members.empty()) break;
      std::vector<std::pair<Term, Term>> eqs;
      for (std::size_t k = 0; k < nonvar_premises.size(); ++k)
        eqs.emplace_back(members[pick[k]], nonvar_premises[k]);
      eqs.emplace_back(rule.conclusion, target);
      if (auto sigma = mgu(eqs)) {
        ConstraintSystem next;
        next.kind = ConstraintSystem::Kind::Extended;
        next.eqs.theory = c.eqs.theory;
        for (std::size_t j = 0; j < i; ++j) next.constraints.push_back(c.constraints[j]);
        for (const Term& y : var_premises)
          next.constraints.push_back(DeductionConstraint{c.constraints[i].knowledge, y});
        for (std::size_t j = i + 1; j < c.constraints.size(); ++j)
          next.constraints.push_back(c.constraints[j]);
        next = apply_to_system(*sigma, next);
        audit_step(ctx, "apply", before, next);
        ctx.trace({{"event", "apply"},
                   {"constraint", i},
                   {"rule", rule.name},
                   {"target", to_string(target)}});
        if (auto r = step3_rec(next, compose(*sigma, acc), next_fresh, ctx)) return r;
      }
      // Advance the pick vector (lexicographic, with repetition).
      if (nonvar_premises.empty()) break;
      std::size_t k = pick.size();
      while (k > 0) {
        if (++pick[k - 1] < members.size()) break;
        pick[k - 1] = 0;
        --k;
      }
      if (k == 0) break;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Step3Result> step3_solve(const ConstraintSystem& c, SolverConfig& config,
                                       Step3Stats* stats) {
  Step3Ctx ctx{&config,
               Budget{config.node_budget,
                      std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(config.time_budget_seconds))},
               {}};
  FreshVars fresh;
  for (int v : vars_of(c)) fresh.next = std::max(fresh.next, v + 1);
  auto result = step3_rec(c, Substitution{}, fresh.next, ctx);
  if (stats) {
    stats->nodes = ctx.budget.used;
    stats->audit_violations = ctx.violations;
  }
  return result;
}

Substitution extract_solution(const ConstraintSystem& solved, const RewriteTheory& R) {
  Substitution eps;
  for (const auto& dc : solved.constraints) {
    if (!dc.target.is_var())
      throw PreconditionError("extract_solution on a system not in solved form");
    if (eps.lookup(dc.target.var_id())) continue;
    bool bound = false;
    for (const Term& t : dc.knowledge) {
      // First ground member after normalization; a zero-step derivation.
      Term n = normalize(eps.apply(t), R);
      if (!n.is_var() && is_ground(n)) {
        eps.bind(dc.target.var_id(), n);
        bound = true;
        break;
      }
    }
    if (!bound)
      throw PreconditionError("no ground knowledge member to bind " + to_string(dc.target));
  }
  return eps;
}

std::optional<std::vector<Derivation>> verify_solution(const ConstraintSystem& input,
                                                       const Substitution& sigma,
                                                       const SolverConfig& config) {
  const RewriteTheory& R = config.theory;
  for (const auto& [u, v] : input.eqs.equations) {
    if (normalize(sigma.apply(u), R) != normalize(sigma.apply(v), R)) return std::nullopt;
  }
  IntruderSystem ground_system;
  ground_system.name = R.name + "-saturated-empty";
  ground_system.rules = config.saturated_rules;
  std::vector<Derivation> witnesses;
  for (const auto& dc : input.constraints) {
    std::vector<Term> knowledge;
    for (const Term& t : dc.knowledge) {
      Term n = normalize(sigma.apply(t), R);
      if (std::find(knowledge.begin(), knowledge.end(), n) == knowledge.end())
        knowledge.push_back(std::move(n));
    }
    Term goal = normalize(sigma.apply(dc.target), R);
    if (!is_ground(goal)) return std::nullopt;
    DeduceOracle oracle(knowledge, ground_system, default_size_cap(knowledge, goal));
    auto derivation = oracle.derivation_of(goal);
    if (!derivation) return std::nullopt;
    if (check_derivation(*derivation, ground_system)) return std::nullopt;
    witnesses.push_back(std::move(*derivation));
  }
  return witnesses;
}

SolveResult solve(const ConstraintSystem& c, SolverConfig& config) {
  SolveResult result;
  if (auto violation = check_wellformed(c))
    throw PreconditionError("constraint system not well-formed at index " +
                            std::to_string(violation->index) + ": " + violation->reason);
  auto trace = [&](const json& j) {
    if (config.trace) config.trace->record(j.dump());
  };

  std::set<int> input_vars = vars_of(c);
  FreshVars fresh;
  for (int v : input_vars) fresh.next = std::max(fresh.next, v + 1);

  const auto start_time = std::chrono::steady_clock::now();
  std::uint64_t nodes_remaining = config.node_budget;

  try {
    auto candidates = step1_guess(c, config.theory, config.parallel_narrowing,
                                  config.narrowing_state_cap);
    result.step1_candidates = candidates.size();
    if (config.reversed) std::reverse(candidates.begin(), candidates.end());

    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
      trace({{"event", "step1-candidate"}, {"index", ci}});
      auto step2 = step2_unify(candidates[ci].system);
      if (!step2) {
        trace({{"event", "step2"}, {"index", ci}, {"result", "clash"}});
        continue;
      }
      // One budget spans the whole solve call.
      SolverConfig step_cfg = config;
      step_cfg.node_budget = nodes_remaining;
      step_cfg.time_budget_seconds =
          config.time_budget_seconds -
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
      if (step_cfg.time_budget_seconds <= 0) throw BudgetExceededError("time budget exhausted");

      Step3Stats stats;
      auto step3 = step3_solve(step2->system, step_cfg, &stats);
      result.nodes += stats.nodes;
      nodes_remaining = stats.nodes >= nodes_remaining ? 0 : nodes_remaining - stats.nodes;
      for (const auto& v : stats.audit_violations) result.audit_violations.push_back(v);
      if (!step3) continue;

      // Assemble the substitution: narrowing, unification, transformation,
      // then the solved-form read-off; leftover input variables get fresh
      // public constants; images are normalized.
      Substitution total =
          compose(step3->sigma, compose(step2->sigma, candidates[ci].theta));
      Substitution eps = extract_solution(step3->solved, config.theory);
      total = compose(eps, total);

      Substitution leftovers;
      int fc = 0;
      for (int v : input_vars)
        for (int lv : vars(total.apply(Term::var(v))))
          if (!leftovers.lookup(lv)) leftovers.bind(lv, Term::constant("w" + std::to_string(fc++) + "_"));

      Substitution final_sub;
      for (int v : input_vars)
        final_sub.bind(v, normalize(leftovers.apply(total.apply(Term::var(v))), config.theory));

      auto witnesses = verify_solution(c, final_sub, config);
      if (!witnesses) {
        trace({{"event", "verify"}, {"index", ci}, {"result", "failed"}});
        continue;
      }
      trace({{"event", "verdict"}, {"verdict", "SAT"}, {"nodes", result.nodes}});
      result.verdict = Verdict::Sat;
      result.solution = Solution{final_sub, std::move(*witnesses)};
      return result;
    }
    trace({{"event", "verdict"}, {"verdict", "UNSAT"}, {"nodes", result.nodes}});
    result.verdict = Verdict::Unsat;
    return result;
  } catch (const BudgetExceededError& e) {
    trace({{"event", "verdict"}, {"verdict", "INCONCLUSIVE"}, {"reason", e.what()}});
    result.verdict = Verdict::Inconclusive;
    result.note = e.what();
    return result;
  }
}

}  // namespace keysub
