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
#include "keysub/term.hpp"

#include <algorithm>
#include <functional>

#include "keysub/errors.hpp"

namespace keysub {

namespace {

std::size_t hash_mix(std::size_t h, std::size_t v) {
  // boost::hash_combine mixing
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Term Term::var(int id, std::string display_name) {
  auto n = std::make_shared<Node>();
  n->is_var = true;
  n->var_id = id;
  n->var_display = std::move(display_name);
  n->hash = hash_mix(0x5bd1e995, static_cast<std::size_t>(id));
  n->node_count = 1;
  return Term(std::move(n));
}

Term Term::app(Symbol sym, std::vector<Term> children) {
  if (static_cast<int>(children.size()) != sym.arity)
    throw PreconditionError("arity mismatch constructing " + sym.name + "/" +
                            std::to_string(sym.arity) + " with " +
                            std::to_string(children.size()) + " children");
  auto n = std::make_shared<Node>();
  n->is_var = false;
  n->sym = std::move(sym);
  n->children = std::move(children);
  std::size_t h = std::hash<std::string>{}(n->sym.name);
  h = hash_mix(h, static_cast<std::size_t>(n->sym.arity));
  std::size_t count = 1;
  for (const Term& c : n->children) {
    h = hash_mix(h, c.hash());
    count += c.node_count();
  }
  n->hash = h;
  n->node_count = count;
  return Term(std::move(n));
}

Term Term::constant(const std::string& name, bool is_private) {
  return app(Symbol{name, 0, is_private}, {});
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash) return false;
  if (a.node_->is_var != b.node_->is_var) return false;
  if (a.node_->is_var) return a.node_->var_id == b.node_->var_id;
  if (!(a.node_->sym == b.node_->sym)) return false;
  for (std::size_t i = 0; i < a.node_->children.size(); ++i)
    if (a.node_->children[i] != b.node_->children[i]) return false;
  return true;
}

int Term::compare(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return 0;
  if (a.is_var() != b.is_var()) return a.is_var() ? -1 : 1;
  if (a.is_var()) return a.var_id() < b.var_id() ? -1 : (a.var_id() > b.var_id() ? 1 : 0);
  if (int c = a.sym().name.compare(b.sym().name)) return c;
  if (a.sym().arity != b.sym().arity) return a.sym().arity < b.sym().arity ? -1 : 1;
  for (std::size_t i = 0; i < a.children().size(); ++i)
    if (int c = compare(a.children()[i], b.children()[i])) return c;
  return 0;
}

TermSet subterms(const Term& t) {
  TermSet out;
  std::function<void(const Term&)> go = [&](const Term& s) {
    if (!out.insert(s).second) return;
    if (s.is_app())
      for (const Term& c : s.children()) go(c);
  };
  go(t);
  return out;
}

std::size_t term_size(const Term& t) {
  TermHashSet seen;
  std::function<void(const Term&)> go = [&](const Term& s) {
    if (!seen.insert(s).second) return;
    if (s.is_app())
      for (const Term& c : s.children()) go(c);
  };
  go(t);
  return seen.size();
}

std::size_t term_size(const std::vector<Term>& ts) {
  TermHashSet seen;
  std::function<void(const Term&)> go = [&](const Term& s) {
    if (!seen.insert(s).second) return;
    if (s.is_app())
      for (const Term& c : s.children()) go(c);
  };
  for (const Term& t : ts) go(t);
  return seen.size();
}

std::set<int> vars(const Term& t) {
  std::set<int> out;
  std::function<void(const Term&)> go = [&](const Term& s) {
    if (s.is_var()) {
      out.insert(s.var_id());
      return;
    }
    for (const Term& c : s.children()) go(c);
  };
  go(t);
  return out;
}

std::set<int> vars(const std::vector<Term>& ts) {
  std::set<int> out;
  for (const Term& t : ts) {
    auto v = vars(t);
    out.insert(v.begin(), v.end());
  }
  return out;
}

bool occurs(int var_id, const Term& t) {
  if (t.is_var()) return t.var_id() == var_id;
  for (const Term& c : t.children())
    if (occurs(var_id, c)) return true;
  return false;
}

bool is_ground(const Term& t) {
  if (t.is_var()) return false;
  for (const Term& c : t.children())
    if (!is_ground(c)) return false;
  return true;
}

namespace {

void collect_positions(const Term& t, Position& cur, bool nonvar_only,
                       std::vector<Position>& out) {
  if (!nonvar_only || t.is_app()) out.push_back(cur);
  if (t.is_app()) {
    for (std::size_t i = 0; i < t.children().size(); ++i) {
      cur.push_back(static_cast<int>(i) + 1);
      collect_positions(t.children()[i], cur, nonvar_only, out);
      cur.pop_back();
    }
  }
}

}  // namespace

std::vector<Position> all_positions(const Term& t) {
  std::vector<Position> out;
  Position cur;
  collect_positions(t, cur, false, out);
  return out;
}

std::vector<Position> nonvar_positions(const Term& t) {
  std::vector<Position> out;
  Position cur;
  collect_positions(t, cur, true, out);
  return out;
}

bool position_valid(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (int i : p) {
    if (cur->is_var() || i < 1 || i > static_cast<int>(cur->children().size())) return false;
    cur = &cur->children()[i - 1];
  }
  return true;
}

bool position_prefix(const Position& p, const Position& q) {
  if (p.size() > q.size()) return false;
  return std::equal(p.begin(), p.end(), q.begin());
}

Term subterm_at(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (int i : p) {
    if (cur->is_var() || i < 1 || i > static_cast<int>(cur->children().size()))
      throw InvalidPositionError("position addresses no subterm of " + to_string(t));
    cur = &cur->children()[i - 1];
  }
  return *cur;
}

Term replace_at(const Term& t, const Position& p, const Term& s) {
  if (p.empty()) return s;
  if (t.is_var() || p.front() < 1 || p.front() > static_cast<int>(t.children().size()))
    throw InvalidPositionError("position addresses no subterm of " + to_string(t));
  std::vector<Term> kids = t.children();
  Position rest(p.begin() + 1, p.end());
  kids[p.front() - 1] = replace_at(kids[p.front() - 1], rest, s);
  return Term::app(t.sym(), std::move(kids));
}

Term replace_at_all(const Term& t, const std::vector<Position>& ps, const Term& s) {
  Term out = t;
  for (const Position& p : ps) out = replace_at(out, p, s);
  return out;
}

std::vector<Position> positions_of(const Term& t, const Term& s) {
  std::vector<Position> out;
  Position cur;
  std::function<void(const Term&)> go = [&](const Term& u) {
    if (u == s) out.push_back(cur);
    if (u.is_app()) {
      for (std::size_t i = 0; i < u.children().size(); ++i) {
        cur.push_back(static_cast<int>(i) + 1);
        go(u.children()[i]);
        cur.pop_back();
      }
    }
  };
  go(t);
  return out;
}

std::string to_string(const Term& t) {
  if (!t.valid()) return "<null>";
  if (t.is_var()) {
    if (!t.var_name().empty()) return "?" + t.var_name();
    return "?v" + std::to_string(t.var_id());
  }
  std::string out = t.sym().name;
  if (!t.children().empty()) {
    out += "(";
    for (std::size_t i = 0; i < t.children().size(); ++i) {
      if (i) out += ", ";
      out += to_string(t.children()[i]);
    }
    out += ")";
  }
  return out;
}

std::string to_string(const std::vector<Term>& ts) {
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ", ";
    out += to_string(ts[i]);
  }
  return out;
}

void FreshVars::reserve_above(const Term& t) {
  for (int v : vars(t)) next = std::max(next, v + 1);
}

void FreshVars::reserve_above(const std::vector<Term>& ts) {
  for (const Term& t : ts) reserve_above(t);
}

}  // namespace keysub
