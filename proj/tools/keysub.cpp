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
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "keysub/errors.hpp"
#include "keysub/parser.hpp"
#include "keysub/protocol.hpp"
#include "keysub/narrowing.hpp"
#include "keysub/saturation.hpp"
#include "keysub/solver.hpp"

namespace {

using namespace keysub;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw Error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

RewriteTheory resolve_theory(const std::string& ref) {
  if (ref == "dsks" || ref.empty()) return dsks_theory();
  if (ref == "deo") return deo_theory();
  RewriteTheory R = parse_theory(slurp(ref));
  auto report = check_convergence(R);
  if (!report.convergent())
    throw Error("theory '" + R.name + "' not verified convergent (termination " +
                (report.terminating == TerminationStatus::Yes ? "yes" : "unknown") +
                ", locally confluent " + (report.locally_confluent ? "yes" : "no") + ")");
  return R;
}

SolverConfig resolve_config(const std::string& ref) {
  if (ref == "dsks" || ref.empty()) return make_config("dsks");
  if (ref == "deo") return make_config("deo");
  return make_config(resolve_theory(ref));
}

struct FileTrace : TraceSink {
  std::ofstream out;
  explicit FileTrace(const std::string& path) : out(path) {
    if (!out.good()) throw Error("cannot open trace file " + path);
  }
  void record(const std::string& line) override { out << line << '\n'; }
};

IntruderSystem witness_system(const SolverConfig& cfg) {
  IntruderSystem sys;
  sys.name = cfg.theory.name + "-saturated-empty";
  sys.rules = cfg.saturated_rules;
  return sys;
}

void print_solution(const SolveResult& result, TermContext& ctx, const SolverConfig& cfg) {
  std::cout << to_string(result.verdict) << "\n";
  if (result.verdict != Verdict::Sat) {
    if (!result.note.empty()) std::cerr << result.note << "\n";
    return;
  }
  for (const auto& [id, image] : result.solution->substitution.bindings()) {
    std::string name = ctx.var_name(id);
    if (name.empty() || name[0] == '_') continue;
    std::cout << "?" << name << " := " << to_string(image) << "\n";
  }
  IntruderSystem ground = witness_system(cfg);
  for (std::size_t i = 0; i < result.solution->witnesses.size(); ++i) {
    std::cout << "# witness " << (i + 1) << ":\n";
    std::cout << render_derivation(result.solution->witnesses[i], ground);
  }
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Sat: return 0;
    case Verdict::Unsat: return 1;
    default: return 2;
  }
}

int cmd_solve(const std::string& file, std::string theory_ref, std::uint64_t budget,
              const std::string& trace_path) {
  std::string text = slurp(file);
  InputKind kind = classify_input(text);

  std::unique_ptr<FileTrace> trace;
  if (!trace_path.empty()) trace = std::make_unique<FileTrace>(trace_path);

  if (kind == InputKind::Constraints) {
    auto parsed = parse_constraints(text);
    if (theory_ref.empty()) theory_ref = parsed.theory_ref;
    SolverConfig cfg = resolve_config(theory_ref);
    cfg.trace = trace.get();
    if (budget) cfg.node_budget = budget;
    auto result = solve(parsed.system, cfg);
    print_solution(result, parsed.ctx, cfg);
    return exit_code(result.verdict);
  }
  if (kind == InputKind::Protocol) {
    auto parsed = parse_protocol(text);
    if (theory_ref.empty()) theory_ref = parsed.spec.theory_ref;
    SolverConfig cfg = resolve_config(theory_ref);
    cfg.trace = trace.get();
    if (budget) cfg.node_budget = budget;
    auto compiled = compile(parsed.spec, parsed.ctx);
    bool inconclusive = false;
    for (const auto& cs : compiled) {
      auto result = solve(cs.system, cfg);
      if (result.verdict == Verdict::Sat) {
        std::cout << "SAT\n# interleaving:";
        for (const std::string& tag : cs.order) std::cout << " " << tag;
        std::cout << "\n";
        for (const auto& [id, image] : result.solution->substitution.bindings()) {
          std::string name = parsed.ctx.var_name(id);
          if (name.empty() || name[0] == '_') continue;
          std::cout << "?" << name << " := " << to_string(image) << "\n";
        }
        IntruderSystem ground = witness_system(cfg);
        for (std::size_t i = 0; i < result.solution->witnesses.size(); ++i) {
          std::cout << "# witness " << (i + 1) << ":\n";
          std::cout << render_derivation(result.solution->witnesses[i], ground);
        }
        return 0;
      }
      if (result.verdict == Verdict::Inconclusive) inconclusive = true;
    }
    std::cout << (inconclusive ? "INCONCLUSIVE" : "UNSAT") << "\n";
    return inconclusive ? 2 : 1;
  }
  throw Error("solve expects a constraints: or protocol: file");
}

int cmd_saturate(const std::string& ref) {
  SolverConfig cfg = resolve_config(ref);
  for (const DeductionRule& r : cfg.saturated_rules) std::cout << to_string(r) << "\n";
  return 0;
}

int cmd_normalize(const std::string& term_text, const std::string& theory_ref) {
  RewriteTheory R = resolve_theory(theory_ref);
  TermContext ctx = TermContext::for_theory(R);
  Term t = parse_term(term_text, ctx);
  std::cout << to_string(normalize(t, R)) << "\n";
  return 0;
}

int cmd_unify(const std::string& left, const std::string& right, const std::string& theory_ref) {
  RewriteTheory R = resolve_theory(theory_ref);
  if (theory_ref != "dsks" && theory_ref != "deo" && !theory_ref.empty() &&
      !basic_narrowing_from_rhss_terminates(R))
    throw Error("theory '" + R.name +
                "' lacks terminating basic narrowing from its rule right-hand sides; "
                "unification modulo it is not supported");
  TermContext ctx = TermContext::for_theory(R);
  UnificationSystem sys;
  sys.theory = R.name;
  sys.equations = {{parse_term(left, ctx), parse_term(right, ctx)}};
  auto unifiers = equational_unify(sys, R);
  if (unifiers.empty()) {
    std::cout << "no unifier\n";
    return 1;
  }
  for (const Substitution& u : unifiers) {
    std::cout << "{";
    bool sep = false;
    for (const auto& [id, image] : u.bindings()) {
      if (sep) std::cout << ", ";
      sep = true;
      std::string name = ctx.var_name(id);
      std::cout << "?" << (name.empty() ? "v" + std::to_string(id) : name) << " := "
                << to_string(image);
    }
    std::cout << "}\n";
  }
  return 0;
}

int cmd_check(const std::string& file, std::string theory_ref) {
  auto parsed = parse_derivation(slurp(file));
  if (theory_ref.empty()) theory_ref = parsed.theory_ref;
  SolverConfig cfg = resolve_config(theory_ref);
  IntruderSystem sys;
  sys.name = cfg.theory.name;
  sys.theory = cfg.theory;
  sys.rules = cfg.base_rules;
  for (const DeductionRule& r : cfg.saturated_rules) {
    bool dup = false;
    for (const DeductionRule& b : sys.rules)
      if (b.name == r.name) dup = true;
    if (!dup) sys.rules.push_back(r);
  }
  Derivation d = resolve_derivation(parsed, sys);
  auto verdict = check_derivation(d, sys);
  if (!verdict) {
    std::cout << "valid\n";
    return 0;
  }
  std::cout << "invalid at step " << (*verdict + 1) << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "keysub: narrowing-based reachability for protocols using signature schemes with "
      "key-substitution (dsks) or destructive-exclusive-ownership (deo) weaknesses"};
  app.require_subcommand(1);

  std::string file, theory_ref, trace_path, term_text, left, right;
  std::uint64_t budget = 0;
  if (const char* env = std::getenv("KEYSUB_BUDGET")) budget = std::strtoull(env, nullptr, 10);

  auto* solve_cmd = app.add_subcommand("solve", "decide reachability for a constraint or protocol file");
  solve_cmd->add_option("file", file, "constraints: or protocol: file")->required();
  solve_cmd->add_option("--theory", theory_ref, "dsks | deo | theory file");
  solve_cmd->add_option("--budget", budget, "search node budget");
  solve_cmd->add_option("--trace", trace_path, "write a JSON-lines decision log");

  auto* saturate_cmd = app.add_subcommand("saturate", "print the saturated deduction rules");
  saturate_cmd->add_option("theory", theory_ref, "dsks | deo | theory file")->required();

  auto* normalize_cmd = app.add_subcommand("normalize", "print the normal form of a term");
  normalize_cmd->add_option("term", term_text, "term")->required();
  normalize_cmd->add_option("--theory", theory_ref, "dsks | deo | theory file");

  auto* unify_cmd = app.add_subcommand("unify", "unify two terms modulo the theory");
  unify_cmd->add_option("left", left, "term")->required();
  unify_cmd->add_option("right", right, "term")->required();
  unify_cmd->add_option("--theory", theory_ref, "dsks | deo | theory file");

  auto* check_cmd = app.add_subcommand("check", "replay and validate a derivation file");
  check_cmd->add_option("file", file, "derivation: file")->required();
  check_cmd->add_option("--theory", theory_ref, "dsks | deo | theory file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return cmd_solve(file, theory_ref, budget, trace_path);
    if (saturate_cmd->parsed()) return cmd_saturate(theory_ref);
    if (normalize_cmd->parsed()) return cmd_normalize(term_text, theory_ref);
    if (unify_cmd->parsed()) return cmd_unify(left, right, theory_ref);
    if (check_cmd->parsed()) return cmd_check(file, theory_ref);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
