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

// Compares the serial reference and the OpenMP frontier-parallel basic
// narrowing exploration on identical workloads and checks they produce the
// same trees.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "keysub/narrowing.hpp"
#include "keysub/parser.hpp"
#include "keysub/rewrite.hpp"

using namespace keysub;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// Tuples of independently narrowable fragments: each fragment admits one or
/// more narrowing steps, so the frontier fans out combinatorially, which is
/// the workload the parallel exploration targets.
Term wide_subject(std::mt19937_64& rng, TermContext& ctx, int fragments, int tag) {
  static const char* const patterns[] = {
      "ver(a, ?w%d, pk(b))",
      "ver(?x%d, ?w%d, ?z%d)",
      "sig(?x%d, skp(pk(b), ?z%d))",
      "sig(?x%d, ?k%d)",
      "ver(?x%d, sig(?x%d, sk(?y%d)), ?z%d)",
  };
  std::vector<Term> parts;
  for (int k = 0; k < fragments; ++k) {
    const char* pattern = patterns[rng() % (sizeof(patterns) / sizeof(patterns[0]))];
    char buf[128];
    int id = tag * 100 + k;
    std::snprintf(buf, sizeof(buf), pattern, id, id, id, id);
    parts.push_back(parse_term(buf, ctx));
  }
  return tuple_terms(parts);
}

}  // namespace

int main() {
  const RewriteTheory& R = dsks_theory();
  std::mt19937_64 rng(2024);
  TermContext ctx = TermContext::for_theory(R);

  std::vector<Term> subjects;
  for (int i = 0; i < 40; ++i) subjects.push_back(wide_subject(rng, ctx, 5, i));

#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp threads: (compiled without OpenMP)\n");
#endif

  std::size_t serial_states = 0, parallel_states = 0;

  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<NarrowingState>> serial_trees;
  for (const Term& s : subjects) {
    serial_trees.push_back(explore_basic_narrowing(s, R));
    serial_states += serial_trees.back().size();
  }
  double serial_time = seconds_since(t0);

  ExploreOptions par;
  par.parallel = true;
  auto t1 = std::chrono::steady_clock::now();
  std::vector<std::vector<NarrowingState>> parallel_trees;
  for (const Term& s : subjects) {
    parallel_trees.push_back(explore_basic_narrowing(s, R, par));
    parallel_states += parallel_trees.back().size();
  }
  double parallel_time = seconds_since(t1);

  bool identical = serial_trees.size() == parallel_trees.size();
  for (std::size_t i = 0; identical && i < serial_trees.size(); ++i) {
    identical = serial_trees[i].size() == parallel_trees[i].size();
    for (std::size_t k = 0; identical && k < serial_trees[i].size(); ++k)
      identical = serial_trees[i][k].subject == parallel_trees[i][k].subject &&
                  serial_trees[i][k].accumulated == parallel_trees[i][k].accumulated;
  }

  std::printf("subjects:          %zu\n", subjects.size());
  std::printf("states (serial):   %zu in %.3f s\n", serial_states, serial_time);
  std::printf("states (parallel): %zu in %.3f s\n", parallel_states, parallel_time);
  std::printf("identical trees:   %s\n", identical ? "yes" : "NO");
  if (parallel_time > 0) std::printf("speedup:           %.2fx\n", serial_time / parallel_time);
  return identical ? 0 : 1;
}
