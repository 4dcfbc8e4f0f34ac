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
#include <memory>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

namespace keysub {

/// A function symbol. Constants are arity-0 symbols. Private symbols (sk, pk)
/// are representable in terms but never intruder-computable from agent names.
struct Symbol {
  std::string name;
  int arity = 0;
  bool is_private = false;

  friend bool operator==(const Symbol& a, const Symbol& b) {
    return a.arity == b.arity && a.name == b.name;
  }
  friend bool operator!=(const Symbol& a, const Symbol& b) { return !(a == b); }
};

/// A path of 1-based child indices; the empty path is the root.
using Position = std::vector<int>;

/// First-order term: a variable or an application (constants are nullary
/// applications). Immutable after construction; equality is structural.
/// Subtree sharing is a representation detail only.
class Term {
 public:
  Term() = default;

  static Term var(int id, std::string display_name = "");
  static Term app(Symbol sym, std::vector<Term> children);
  static Term constant(const std::string& name, bool is_private = false);

  bool valid() const { return node_ != nullptr; }
  bool is_var() const { return node_->is_var; }
  bool is_app() const { return !node_->is_var; }
  bool is_const() const { return !node_->is_var && node_->children.empty(); }

  int var_id() const { return node_->var_id; }
  const std::string& var_name() const { return node_->var_display; }
  const Symbol& sym() const { return node_->sym; }
  const std::vector<Term>& children() const { return node_->children; }

  std::size_t hash() const { return node_->hash; }
  /// Number of nodes in the tree (not the distinct-subterm size).
  std::size_t node_count() const { return node_->node_count; }

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

  /// Total structural order: variables before applications, variables by id,
  /// applications by (name, arity, children lexicographically).
  static int compare(const Term& a, const Term& b);
  friend bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }

 private:
  struct Node {
    bool is_var = false;
    int var_id = 0;
    std::string var_display;
    Symbol sym;
    std::vector<Term> children;
    std::size_t hash = 0;
    std::size_t node_count = 1;
  };
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

using TermSet = std::set<Term>;
using TermHashSet = std::unordered_set<Term, TermHash>;

/// All distinct subterms of t, including t itself.
TermSet subterms(const Term& t);

/// The number of distinct subterms of t.
std::size_t term_size(const Term& t);
std::size_t term_size(const std::vector<Term>& ts);

/// Ids of all variables occurring in t.
std::set<int> vars(const Term& t);
std::set<int> vars(const std::vector<Term>& ts);
bool occurs(int var_id, const Term& t);
bool is_ground(const Term& t);

/// All positions of t in preorder (root first, children left to right).
std::vector<Position> all_positions(const Term& t);
/// Positions whose subterm is not a variable, in the same order.
std::vector<Position> nonvar_positions(const Term& t);

bool position_valid(const Term& t, const Position& p);
/// True when p is a prefix of q (p addresses an ancestor-or-self of q).
bool position_prefix(const Position& p, const Position& q);

/// The subterm of t at p. Throws InvalidPositionError when p addresses nothing.
Term subterm_at(const Term& t, const Position& p);
/// t with the subterm at p replaced by s, all other positions intact.
Term replace_at(const Term& t, const Position& p, const Term& s);
/// Simultaneous replacement at several pairwise-disjoint positions.
Term replace_at_all(const Term& t, const std::vector<Position>& ps, const Term& s);

/// All positions of t whose subterm equals s.
std::vector<Position> positions_of(const Term& t, const Term& s);

/// Rendering in the concrete syntax: constants bare, variables with a leading
/// '?', applications f(t1,...,tn).
std::string to_string(const Term& t);
std::string to_string(const std::vector<Term>& ts);

/// Monotone fresh-variable source, one per solver/exploration run.
struct FreshVars {
  int next = 0;
  int fresh() { return next++; }
  void reserve_above(const Term& t);
  void reserve_above(const std::vector<Term>& ts);
};

}  // namespace keysub
