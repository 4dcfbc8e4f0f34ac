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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "keysub/constraint.hpp"
#include "keysub/intruder.hpp"
#include "keysub/rewrite.hpp"
#include "keysub/saturation.hpp"

namespace keysub {

/// Machine-readable decision log: one JSON record per solver step.
struct TraceSink {
  virtual ~TraceSink() = default;
  virtual void record(const std::string& jsonl_line) = 0;
};

struct SolverConfig {
  RewriteTheory theory;
  std::vector<DeductionRule> base_rules;      // L
  std::vector<DeductionRule> saturated_rules; // L', base rules first

  std::uint64_t node_budget = 1000000;
  double time_budget_seconds = 120.0;
  std::size_t narrowing_state_cap = 200000;

  /// Remove variable members from E before enumerating candidates. Off gives
  /// the literal transformation rules; the verdict must not change.
  bool eager_var_elim = true;
  /// Reversed branch-exploration order, for verdict-stability checks.
  bool reversed = false;
  /// Assert the (nbv, M) measure strictly decreases on every step.
  bool audit_measure = true;
  bool parallel_narrowing = false;
  TraceSink* trace = nullptr;
};

/// Config for a built-in theory name ("dsks" | "deo"), saturation included.
SolverConfig make_config(const std::string& theory_name);
/// Config for a user theory: validated convergent with terminating basic
/// narrowing from rule right-hand sides; L is its public constructor set.
SolverConfig make_config(const RewriteTheory& theory);

enum class Verdict { Sat, Unsat, Inconclusive };

std::string to_string(Verdict v);

struct Solution {
  /// Normalized ground bindings for the input system's variables.
  Substitution substitution;
  /// One replayable derivation per input constraint, in order.
  std::vector<Derivation> witnesses;
};

struct SolveResult {
  Verdict verdict = Verdict::Unsat;
  std::optional<Solution> solution;
  std::string note;
  std::uint64_t nodes = 0;
  std::size_t step1_candidates = 0;
  /// Termination-measure audit failures; empty on every supported theory.
  std::vector<std::string> audit_violations;
};

/// Step 1: every basic-narrowing derivative of the tupled constraint system
/// (the zero-step copy included), with the accumulated substitution.
struct Step1Candidate {
  ConstraintSystem system;
  Substitution theta;
};
std::vector<Step1Candidate> step1_guess(const ConstraintSystem& c, const RewriteTheory& R,
                                        bool parallel = false,
                                        std::size_t max_states = 200000);

/// Step 2: solve the unification system syntactically and push the unifier
/// through the deduction constraints. nullopt prunes the branch.
struct Step2Result {
  ConstraintSystem system;
  Substitution sigma;
};
std::optional<Step2Result> step2_unify(const ConstraintSystem& c0);

/// Step 3: depth-first transformation to solved form.
struct Step3Result {
  ConstraintSystem solved;
  Substitution sigma;
};
struct Step3Stats {
  std::uint64_t nodes = 0;
  std::vector<std::string> audit_violations;
};
std::optional<Step3Result> step3_solve(const ConstraintSystem& c, SolverConfig& config,
                                       Step3Stats* stats = nullptr);

/// Reads a satisfying substitution off a solved form: each target variable is
/// bound, left to right, to the first non-variable member of its knowledge set
/// after normalization. Raises PreconditionError when none exists.
Substitution extract_solution(const ConstraintSystem& solved, const RewriteTheory& R);

/// Independent re-verification: equations hold after normalization and every
/// constraint's goal is derivable from its instantiated knowledge, with the
/// witness derivations replayed through check_derivation. Returns the
/// witnesses; nullopt when verification fails.
std::optional<std::vector<Derivation>> verify_solution(const ConstraintSystem& input,
                                                       const Substitution& sigma,
                                                       const SolverConfig& config);

/// The full decision procedure: Step 1 over all narrowing branches, Step 2,
/// Step 3 with backtracking; SAT solutions are re-verified before returning.
SolveResult solve(const ConstraintSystem& c, SolverConfig& config);

}  // namespace keysub
