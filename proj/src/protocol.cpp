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
#include "keysub/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "keysub/errors.hpp"
#include "keysub/parser.hpp"
#include "keysub/subst.hpp"

namespace keysub {

namespace {

/// Per-session fresh constants: session 1 keeps the written name, later
/// sessions get a _<n> suffix.
Term rename_fresh(const Term& t, const std::vector<std::string>& fresh, int session) {
  if (t.is_var()) return t;
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  for (const Term& c : t.children()) kids.push_back(rename_fresh(c, fresh, session));
  Symbol sym = t.sym();
  if (sym.arity == 0 && session > 1 &&
      std::find(fresh.begin(), fresh.end(), sym.name) != fresh.end())
    sym.name += "_" + std::to_string(session);
  return Term::app(sym, std::move(kids));
}

std::string lowercase(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

struct Instance {
  std::string tag;
  std::vector<RoleEvent> events;
  Substitution var_renaming;
};

}  // namespace

std::vector<CompiledSystem> compile(const ProtocolSpec& spec, TermContext& ctx,
                                    std::size_t max_interleavings) {
  // Which role owns each variable name; goal equations resolve through this.
  std::map<int, std::size_t> var_owner;
  for (std::size_t r = 0; r < spec.roles.size(); ++r) {
    std::set<int> role_vars;
    for (const RoleEvent& ev : spec.roles[r].events) {
      for (const Term& t : ev.message)
        for (int v : vars(t)) role_vars.insert(v);
      for (const auto& [u, v] : ev.checks) {
        for (int id : vars(u)) role_vars.insert(id);
        for (int id : vars(v)) role_vars.insert(id);
      }
    }
    for (int v : role_vars) {
      if (var_owner.count(v) && var_owner[v] != r)
        throw PreconditionError("variable ?" + ctx.var_name(v) +
                                " is used by more than one role");
      var_owner[v] = r;
    }
  }

  // Instantiate sessions: fresh constants suffixed, variables renamed apart.
  std::vector<Instance> instances;
  std::map<std::pair<std::size_t, int>, Substitution> instance_renaming;
  for (std::size_t r = 0; r < spec.roles.size(); ++r) {
    const Role& role = spec.roles[r];
    int sessions = 1;
    if (auto it = spec.sessions.find(role.name); it != spec.sessions.end()) sessions = it->second;
    for (int s = 1; s <= sessions; ++s) {
      Instance inst;
      inst.tag = role.name + std::to_string(s);
      std::set<int> role_vars;
      for (const auto& [v, owner] : var_owner)
        if (owner == r) role_vars.insert(v);
      for (int v : role_vars) {
        std::string name = lowercase(role.name) + std::to_string(s) + "_" + ctx.var_name(v);
        inst.var_renaming.bind(v, Term::var(ctx.var_id(name), name));
      }
      for (const RoleEvent& ev : role.events) {
        RoleEvent nev = ev;
        for (Term& t : nev.message) t = inst.var_renaming.apply(rename_fresh(t, role.fresh, s));
        for (auto& [u, v] : nev.checks) {
          u = inst.var_renaming.apply(rename_fresh(u, role.fresh, s));
          v = inst.var_renaming.apply(rename_fresh(v, role.fresh, s));
        }
        inst.events.push_back(std::move(nev));
      }
      instance_renaming[{r, s}] = inst.var_renaming;
      instances.push_back(std::move(inst));
    }
  }

  // All merges of the instances' event sequences, per-instance order kept.
  std::vector<std::vector<std::size_t>> schedules;
  std::vector<std::size_t> idx(instances.size(), 0), current;
  std::function<void()> enumerate = [&]() {
    bool any = false;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      if (idx[i] < instances[i].events.size()) {
        any = true;
        current.push_back(i);
        ++idx[i];
        enumerate();
        --idx[i];
        current.pop_back();
      }
    }
    if (!any) {
      schedules.push_back(current);
      if (schedules.size() > max_interleavings)
        throw BudgetExceededError("interleaving enumeration exceeded " +
                                  std::to_string(max_interleavings));
    }
  };
  enumerate();

  auto goal_renaming = [&]() {
    Substitution ren;
    std::set<int> goal_vars;
    if (spec.goal.kind == GoalSpec::Kind::Secrecy) goal_vars = vars(spec.goal.secret);
    if (spec.goal.kind == GoalSpec::Kind::Reach) {
      for (const auto& [u, v] : spec.goal.eqs) {
        for (int id : vars(u)) goal_vars.insert(id);
        for (int id : vars(v)) goal_vars.insert(id);
      }
    }
    for (int v : goal_vars) {
      auto it = var_owner.find(v);
      if (it == var_owner.end())
        throw PreconditionError("goal variable ?" + ctx.var_name(v) +
                                " does not occur in any role");
      Substitution& inst = instance_renaming[{it->second, 1}];
      if (auto img = inst.lookup(v)) ren.bind(v, *img);
    }
    return ren;
  }();

  std::vector<CompiledSystem> out;
  int recv_counter = 0;
  for (const auto& schedule : schedules) {
    CompiledSystem compiled;
    ConstraintSystem& sys = compiled.system;
    sys.kind = ConstraintSystem::Kind::Initial;
    sys.eqs.theory = spec.theory_ref;

    std::vector<Term> knowledge;
    auto know = [&](const Term& t) {
      if (std::find(knowledge.begin(), knowledge.end(), t) == knowledge.end())
        knowledge.push_back(t);
    };
    for (const Term& t : spec.knowledge) know(t);

    std::vector<std::size_t> cursor(instances.size(), 0);
    for (std::size_t i : schedule) {
      const RoleEvent& ev = instances[i].events[cursor[i]];
      compiled.order.push_back(instances[i].tag + "." + std::to_string(cursor[i] + 1));
      ++cursor[i];
      if (ev.kind == RoleEvent::Kind::Send) {
        for (const Term& t : ev.message) know(t);
        continue;
      }
      for (const Term& t : ev.message) {
        if (knowledge.empty())
          throw PreconditionError("a receive occurs before the intruder knows anything");
        if (t.is_var()) {
          sys.constraints.push_back({knowledge, t});
        } else {
          std::string name;
          do name = "_r" + std::to_string(recv_counter++);
          while (ctx.has_var(name));
          Term v = Term::var(ctx.var_id(name), name);
          sys.constraints.push_back({knowledge, v});
          sys.eqs.equations.emplace_back(v, t);
        }
      }
      for (const auto& [u, v] : ev.checks) sys.eqs.equations.emplace_back(u, v);
    }

    if (spec.goal.kind == GoalSpec::Kind::Secrecy) {
      std::string name;
      do name = "_r" + std::to_string(recv_counter++);
      while (ctx.has_var(name));
      Term v = Term::var(ctx.var_id(name), name);
      sys.constraints.push_back({knowledge, v});
      sys.eqs.equations.emplace_back(v, goal_renaming.apply(spec.goal.secret));
    } else if (spec.goal.kind == GoalSpec::Kind::Reach) {
      for (const auto& [u, v] : spec.goal.eqs)
        sys.eqs.equations.emplace_back(goal_renaming.apply(u), goal_renaming.apply(v));
    }
    out.push_back(std::move(compiled));
  }
  return out;
}

}  // namespace keysub
