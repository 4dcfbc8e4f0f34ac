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

#include <stdexcept>
#include <string>

namespace keysub {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A position does not address a subterm.
struct InvalidPositionError : Error {
  using Error::Error;
};

/// The per-call rewrite step cap was hit; the theory is likely non-terminating.
struct StepBudgetError : Error {
  using Error::Error;
};

/// Saturation generated more rules than the configured cap.
struct SaturationCapError : Error {
  using Error::Error;
};

/// An operation was called on inputs violating its contract.
struct PreconditionError : Error {
  using Error::Error;
};

/// The solver's branch/time budget ran out. Reported as INCONCLUSIVE, never as UNSAT.
struct BudgetExceededError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& msg, int line, int col)
      : Error(msg + " at line " + std::to_string(line) + ", column " + std::to_string(col)),
        line(line),
        col(col) {}
  int line;
  int col;
};

}  // namespace keysub
