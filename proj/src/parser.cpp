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
#include "keysub/parser.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

#include "keysub/errors.hpp"

namespace keysub {

TermContext TermContext::for_theory(const RewriteTheory& R) {
  TermContext ctx;
  for (const Symbol& s : R.signature) ctx.signature_[s.name] = s;
  return ctx;
}

int TermContext::var_id(const std::string& name) {
  auto it = var_ids_.find(name);
  if (it != var_ids_.end()) return it->second;
  int id = static_cast<int>(var_names_.size());
  var_ids_[name] = id;
  var_names_.push_back(name);
  return id;
}

const std::string& TermContext::var_name(int id) const {
  static const std::string unknown;
  if (id < 0 || id >= static_cast<int>(var_names_.size())) return unknown;
  return var_names_[id];
}

Symbol TermContext::symbol(const std::string& name, int arity, int line, int col) {
  auto it = signature_.find(name);
  if (it != signature_.end()) {
    if (it->second.arity != arity)
      throw ParseError("arity mismatch: " + name + "/" + std::to_string(it->second.arity) +
                           " used with " + std::to_string(arity) + " arguments",
                       line, col);
    return it->second;
  }
  Symbol s{name, arity, false};
  signature_[name] = s;
  return s;
}

void TermContext::declare_private(const std::string& name, int arity) {
  signature_[name] = Symbol{name, arity, true};
}

namespace {

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;
  int line = 1;

  int col() const { return static_cast<int>(pos) + 1; }
  bool done() const { return pos >= s.size(); }
  char peek() const { return pos < s.size() ? s[pos] : '\0'; }
  void skip_spaces() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool eat(char c) {
    skip_spaces();
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) throw ParseError(std::string("expected '") + c + "'", line, col());
  }
  bool eat_word(const std::string& w) {
    skip_spaces();
    if (s.compare(pos, w.size(), w) == 0) {
      std::size_t end = pos + w.size();
      if (end == s.size() || !(std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_')) {
        pos = end;
        return true;
      }
    }
    return false;
  }
};

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string read_ident(Cursor& cur) {
  cur.skip_spaces();
  if (!ident_start(cur.peek()))
    throw ParseError("expected an identifier", cur.line, cur.col());
  std::size_t start = cur.pos;
  while (!cur.done() && ident_char(cur.s[cur.pos])) ++cur.pos;
  return cur.s.substr(start, cur.pos - start);
}

int read_int(Cursor& cur) {
  cur.skip_spaces();
  int col = cur.col();
  std::string word = read_ident(cur);
  for (char c : word)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ParseError("expected a number, got '" + word + "'", cur.line, col);
  if (word.size() > 6) throw ParseError("number '" + word + "' out of range", cur.line, col);
  return std::stoi(word);
}

Term parse_term_at(Cursor& cur, TermContext& ctx) {
  cur.skip_spaces();
  if (cur.eat('?')) {
    std::string name = read_ident(cur);
    return Term::var(ctx.var_id(name), name);
  }
  if (std::isupper(static_cast<unsigned char>(cur.peek())))
    throw ParseError("identifiers are lowercase; variables start with '?'", cur.line, cur.col());
  int col = cur.col();
  std::string name = read_ident(cur);
  std::vector<Term> args;
  if (cur.eat('(')) {
    if (!cur.eat(')')) {
      args.push_back(parse_term_at(cur, ctx));
      while (cur.eat(',')) args.push_back(parse_term_at(cur, ctx));
      cur.skip_spaces();
      if (!cur.eat(')'))
        throw ParseError("unclosed '(' in application of " + name, cur.line, cur.col());
    }
  }
  Symbol sym = ctx.symbol(name, static_cast<int>(args.size()), cur.line, col);
  return Term::app(sym, std::move(args));
}

std::vector<Term> parse_term_list(Cursor& cur, TermContext& ctx) {
  std::vector<Term> out;
  out.push_back(parse_term_at(cur, ctx));
  while (cur.eat(',')) out.push_back(parse_term_at(cur, ctx));
  return out;
}

std::pair<Term, Term> parse_equation(Cursor& cur, TermContext& ctx) {
  Term u = parse_term_at(cur, ctx);
  cur.skip_spaces();
  if (!cur.eat('=')) throw ParseError("expected '=' in equation", cur.line, cur.col());
  Term v = parse_term_at(cur, ctx);
  return {u, v};
}

std::vector<std::pair<Term, Term>> parse_equation_list(Cursor& cur, TermContext& ctx) {
  std::vector<std::pair<Term, Term>> out;
  out.push_back(parse_equation(cur, ctx));
  while (cur.eat(',')) out.push_back(parse_equation(cur, ctx));
  return out;
}

void expect_line_end(Cursor& cur) {
  cur.skip_spaces();
  if (!cur.done())
    throw ParseError("unexpected trailing input '" + cur.s.substr(cur.pos) + "'", cur.line,
                     cur.col());
}

struct Line {
  std::string text;
  int number;
};

std::vector<Line> significant_lines(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::size_t begin = raw.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    std::size_t end = raw.find_last_not_of(" \t\r");
    out.push_back({raw.substr(begin, end - begin + 1), number});
  }
  return out;
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

/// Splits "key: rest" and returns rest when the key matches.
std::optional<std::string> keyed(const Line& line, const std::string& key) {
  if (!starts_with(line.text, key + ":")) return std::nullopt;
  std::string rest = line.text.substr(key.size() + 1);
  std::size_t begin = rest.find_first_not_of(" \t");
  return begin == std::string::npos ? "" : rest.substr(begin);
}

}  // namespace

Term parse_term(const std::string& text, TermContext& ctx, int line) {
  Cursor cur{text, 0, line};
  Term t = parse_term_at(cur, ctx);
  expect_line_end(cur);
  return t;
}

InputKind classify_input(const std::string& text) {
  auto lines = significant_lines(text);
  if (lines.empty()) throw ParseError("empty input", 1, 1);
  const std::string& head = lines.front().text;
  if (starts_with(head, "protocol:")) return InputKind::Protocol;
  if (starts_with(head, "constraints:")) return InputKind::Constraints;
  if (starts_with(head, "derivation:")) return InputKind::Derivation;
  if (starts_with(head, "theory ") || head == "theory") return InputKind::Theory;
  throw ParseError("unknown header '" + head + "' (expected protocol:, constraints:, theory, or derivation:)",
                   lines.front().number, 1);
}

ParsedConstraints parse_constraints(const std::string& text) {
  auto lines = significant_lines(text);
  if (lines.empty() || !starts_with(lines.front().text, "constraints:"))
    throw ParseError("constraint files start with 'constraints:'",
                     lines.empty() ? 1 : lines.front().number, 1);

  ParsedConstraints out;
  std::vector<Term> knowledge;
  int goal_counter = 0;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    if (auto rest = keyed(line, "theory")) {
      out.theory_ref = *rest;
      continue;
    }
    if (auto rest = keyed(line, "knows")) {
      Cursor cur{*rest, 0, line.number};
      for (Term& t : parse_term_list(cur, out.ctx)) {
        if (std::find(knowledge.begin(), knowledge.end(), t) == knowledge.end())
          knowledge.push_back(std::move(t));
      }
      expect_line_end(cur);
      continue;
    }
    if (auto rest = keyed(line, "deduce")) {
      Cursor cur{*rest, 0, line.number};
      Term t = parse_term_at(cur, out.ctx);
      expect_line_end(cur);
      if (knowledge.empty())
        throw ParseError("deduce before any knows line", line.number, 1);
      if (t.is_var()) {
        out.system.constraints.push_back({knowledge, t});
      } else {
        // Structured target: fresh variable plus an equation in S.
        std::string name;
        do {
          name = "_g" + std::to_string(goal_counter++);
        } while (out.ctx.has_var(name));
        Term v = Term::var(out.ctx.var_id(name), name);
        out.system.constraints.push_back({knowledge, v});
        out.system.eqs.equations.emplace_back(v, t);
      }
      continue;
    }
    if (auto rest = keyed(line, "eq")) {
      Cursor cur{*rest, 0, line.number};
      out.system.eqs.equations.push_back(parse_equation(cur, out.ctx));
      expect_line_end(cur);
      continue;
    }
    throw ParseError("unknown constraint line '" + line.text + "'", line.number, 1);
  }
  out.system.kind = ConstraintSystem::Kind::Initial;
  out.system.eqs.theory = out.theory_ref;
  return out;
}

RewriteTheory parse_theory(const std::string& text) {
  auto lines = significant_lines(text);
  if (lines.empty() || !starts_with(lines.front().text, "theory"))
    throw ParseError("theory files start with 'theory <name>'",
                     lines.empty() ? 1 : lines.front().number, 1);
  RewriteTheory R;
  {
    Cursor cur{lines.front().text, 0, lines.front().number};
    cur.eat_word("theory");
    R.name = read_ident(cur);
    expect_line_end(cur);
  }
  TermContext ctx;
  std::vector<std::pair<std::string, int>> privates;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    Cursor cur{line.text, 0, line.number};
    if (cur.eat_word("private")) {
      do {
        std::string name = read_ident(cur);
        cur.expect('/');
        int arity = read_int(cur);
        ctx.declare_private(name, arity);
        privates.emplace_back(name, arity);
      } while (cur.eat(','));
      expect_line_end(cur);
      continue;
    }
    if (cur.eat_word("rule")) {
      auto arrow = line.text.find("->");
      if (arrow == std::string::npos)
        throw ParseError("expected '->' in rule", line.number, 1);
      std::string lhs_text = line.text.substr(4, arrow - 4);
      std::string rhs_text = line.text.substr(arrow + 2);
      Term lhs = parse_term(lhs_text, ctx, line.number);
      Term rhs = parse_term(rhs_text, ctx, line.number);
      if (lhs.is_var())
        throw ParseError("rule left-hand side must not be a variable", line.number, 1);
      auto lhs_vars = vars(lhs);
      for (int v : vars(rhs))
        if (!lhs_vars.count(v))
          throw ParseError("rule right-hand side introduces a fresh variable", line.number, 1);
      R.rules.push_back({lhs, rhs});
      continue;
    }
    throw ParseError("unknown theory line '" + line.text + "'", line.number, 1);
  }

  // Collect the signature from the rules plus privacy declarations.
  std::map<std::string, Symbol> sig;
  std::function<void(const Term&)> collect = [&](const Term& t) {
    if (t.is_app()) {
      sig[t.sym().name] = t.sym();
      for (const Term& c : t.children()) collect(c);
    }
  };
  for (const auto& rule : R.rules) {
    collect(rule.lhs);
    collect(rule.rhs);
  }
  for (const auto& [name, arity] : privates) sig[name] = Symbol{name, arity, true};
  for (const auto& [name, sym] : sig) R.signature.push_back(sym);
  return R;
}

ParsedProtocol parse_protocol(const std::string& text) {
  auto lines = significant_lines(text);
  if (lines.empty() || !starts_with(lines.front().text, "protocol:"))
    throw ParseError("protocol files start with 'protocol:'",
                     lines.empty() ? 1 : lines.front().number, 1);
  ParsedProtocol out;
  {
    auto rest = keyed(lines.front(), "protocol");
    Cursor cur{*rest, 0, lines.front().number};
    out.spec.name = read_ident(cur);
    expect_line_end(cur);
  }
  Role* current = nullptr;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    Cursor cur{line.text, 0, line.number};

    if (auto rest = keyed(line, "theory")) {
      out.spec.theory_ref = *rest;
      continue;
    }
    if (auto rest = keyed(line, "knowledge")) {
      Cursor kcur{*rest, 0, line.number};
      for (Term& t : parse_term_list(kcur, out.ctx)) out.spec.knowledge.push_back(std::move(t));
      expect_line_end(kcur);
      continue;
    }
    if (auto rest = keyed(line, "sessions")) {
      Cursor scur{*rest, 0, line.number};
      do {
        scur.skip_spaces();
        std::size_t start = scur.pos;
        while (!scur.done() && ident_char(scur.s[scur.pos])) ++scur.pos;
        std::string role = scur.s.substr(start, scur.pos - start);
        scur.expect('=');
        out.spec.sessions[role] = read_int(scur);
      } while (scur.eat(','));
      expect_line_end(scur);
      continue;
    }
    if (cur.eat_word("role")) {
      cur.skip_spaces();
      std::size_t start = cur.pos;
      while (!cur.done() && ident_char(cur.s[cur.pos])) ++cur.pos;
      std::string name = cur.s.substr(start, cur.pos - start);
      if (name.empty()) throw ParseError("expected a role name", line.number, cur.col());
      cur.expect(':');
      expect_line_end(cur);
      out.spec.roles.push_back(Role{name, {}, {}});
      current = &out.spec.roles.back();
      continue;
    }
    if (cur.eat_word("fresh")) {
      if (!current) throw ParseError("'fresh' outside a role", line.number, 1);
      do current->fresh.push_back(read_ident(cur));
      while (cur.eat(','));
      expect_line_end(cur);
      continue;
    }
    if (cur.eat_word("send")) {
      if (!current) throw ParseError("'send' outside a role", line.number, 1);
      RoleEvent ev{RoleEvent::Kind::Send, parse_term_list(cur, out.ctx), {}};
      expect_line_end(cur);
      current->events.push_back(std::move(ev));
      continue;
    }
    if (cur.eat_word("recv")) {
      if (!current) throw ParseError("'recv' outside a role", line.number, 1);
      RoleEvent ev{RoleEvent::Kind::Recv, parse_term_list(cur, out.ctx), {}};
      if (cur.eat_word("check")) ev.checks = parse_equation_list(cur, out.ctx);
      expect_line_end(cur);
      current->events.push_back(std::move(ev));
      continue;
    }
    if (cur.eat_word("goal")) {
      if (cur.eat_word("secrecy")) {
        cur.expect(':');
        out.spec.goal.kind = GoalSpec::Kind::Secrecy;
        out.spec.goal.secret = parse_term_at(cur, out.ctx);
        expect_line_end(cur);
      } else if (cur.eat_word("reach")) {
        cur.expect(':');
        out.spec.goal.kind = GoalSpec::Kind::Reach;
        out.spec.goal.eqs = parse_equation_list(cur, out.ctx);
        expect_line_end(cur);
      } else {
        throw ParseError("goal is 'goal secrecy: t' or 'goal reach: u = v, ...'", line.number, 1);
      }
      continue;
    }
    throw ParseError("unknown protocol line '" + line.text + "'", line.number, 1);
  }
  return out;
}

ParsedDerivation parse_derivation(const std::string& text) {
  auto lines = significant_lines(text);
  if (lines.empty() || !starts_with(lines.front().text, "derivation:"))
    throw ParseError("derivation files start with 'derivation:'",
                     lines.empty() ? 1 : lines.front().number, 1);
  ParsedDerivation out;
  bool have_goal = false;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    if (auto rest = keyed(line, "theory")) {
      out.theory_ref = *rest;
      continue;
    }
    if (auto rest = keyed(line, "start")) {
      Cursor cur{*rest, 0, line.number};
      out.start = parse_term_list(cur, out.ctx);
      expect_line_end(cur);
      continue;
    }
    if (auto rest = keyed(line, "goal")) {
      Cursor cur{*rest, 0, line.number};
      out.goal = parse_term_at(cur, out.ctx);
      expect_line_end(cur);
      have_goal = true;
      continue;
    }
    if (auto rest = keyed(line, "step")) {
      Cursor cur{*rest, 0, line.number};
      ParsedDerivation::RawStep step;
      step.rule = read_ident(cur);
      cur.expect('{');
      cur.skip_spaces();
      if (cur.peek() != '}') {
        do {
          cur.skip_spaces();
          if (!cur.eat('?'))
            throw ParseError("expected '?var := term' binding", cur.line, cur.col());
          std::string name = read_ident(cur);
          cur.expect(':');
          cur.expect('=');
          step.bindings.emplace_back(name, parse_term_at(cur, out.ctx));
        } while (cur.eat(','));
      }
      cur.expect('}');
      cur.expect('|');
      cur.expect('-');
      step.produced = parse_term_at(cur, out.ctx);
      expect_line_end(cur);
      out.steps.push_back(std::move(step));
      continue;
    }
    throw ParseError("unknown derivation line '" + line.text + "'", line.number, 1);
  }
  if (!have_goal) throw ParseError("derivation file lacks a goal line", 1, 1);
  return out;
}

Derivation resolve_derivation(const ParsedDerivation& parsed, const IntruderSystem& I) {
  Derivation d;
  d.start = parsed.start;
  d.goal = parsed.goal;
  for (const auto& raw : parsed.steps) {
    const DeductionRule* rule = nullptr;
    for (const DeductionRule& r : I.rules)
      if (r.name == raw.rule) rule = &r;
    if (!rule) throw PreconditionError("unknown deduction rule '" + raw.rule + "'");
    std::map<std::string, int> names;
    std::function<void(const Term&)> index = [&](const Term& t) {
      if (t.is_var()) {
        names[t.var_name().empty() ? "v" + std::to_string(t.var_id()) : t.var_name()] =
            t.var_id();
        return;
      }
      for (const Term& c : t.children()) index(c);
    };
    for (const Term& p : rule->premises) index(p);
    index(rule->conclusion);

    Derivation::Step step;
    step.rule = raw.rule;
    step.produced = raw.produced;
    for (const auto& [name, term] : raw.bindings) {
      auto it = names.find(name);
      if (it == names.end())
        throw PreconditionError("rule '" + raw.rule + "' has no variable ?" + name);
      step.sigma.bind(it->second, term);
    }
    d.steps.push_back(std::move(step));
  }
  return d;
}

std::string render_term(const Term& t) { return to_string(t); }

std::string render_theory(const RewriteTheory& R) {
  std::string out = "theory " + R.name + "\n";
  std::vector<const Symbol*> privates;
  for (const Symbol& s : R.signature)
    if (s.is_private) privates.push_back(&s);
  std::sort(privates.begin(), privates.end(),
            [](const Symbol* a, const Symbol* b) { return a->name < b->name; });
  for (const Symbol* s : privates)
    out += "private " + s->name + "/" + std::to_string(s->arity) + "\n";
  for (const auto& rule : R.rules)
    out += "rule " + to_string(rule.lhs) + " -> " + to_string(rule.rhs) + "\n";
  return out;
}

std::string render_constraints(const ConstraintSystem& c, const std::string& theory_ref) {
  std::string out = "constraints:\n";
  if (!theory_ref.empty()) out += "theory: " + theory_ref + "\n";
  std::vector<Term> seen;
  for (const auto& dc : c.constraints) {
    std::vector<Term> fresh;
    for (const Term& t : dc.knowledge)
      if (std::find(seen.begin(), seen.end(), t) == seen.end()) {
        fresh.push_back(t);
        seen.push_back(t);
      }
    if (!fresh.empty()) out += "knows: " + to_string(fresh) + "\n";
    out += "deduce: " + to_string(dc.target) + "\n";
  }
  for (const auto& [u, v] : c.eqs.equations)
    out += "eq: " + to_string(u) + " = " + to_string(v) + "\n";
  return out;
}

namespace {

std::string render_step(const Derivation::Step& step, const IntruderSystem& I) {
  const DeductionRule* rule = nullptr;
  for (const DeductionRule& r : I.rules)
    if (r.name == step.rule) rule = &r;
  std::string out = step.rule + " {";
  bool sep = false;
  for (const auto& [id, term] : step.sigma.bindings()) {
    if (sep) out += ", ";
    sep = true;
    std::string name = "v" + std::to_string(id);
    if (rule) {
      std::function<const std::string*(const Term&)> find = [&](const Term& t) -> const std::string* {
        if (t.is_var())
          return t.var_id() == id && !t.var_name().empty() ? &t.var_name() : nullptr;
        for (const Term& c : t.children())
          if (auto* n = find(c)) return n;
        return nullptr;
      };
      for (const Term& p : rule->premises)
        if (auto* n = find(p)) name = *n;
      if (auto* n = find(rule->conclusion)) name = *n;
    }
    out += "?" + name + " := " + to_string(term);
  }
  out += "} |- " + to_string(step.produced);
  return out;
}

}  // namespace

std::string render_derivation(const Derivation& d, const IntruderSystem& I) {
  std::string out;
  for (const auto& step : d.steps) out += render_step(step, I) + "\n";
  return out;
}

std::string render_derivation_file(const Derivation& d, const IntruderSystem& I,
                                   const std::string& theory_ref) {
  std::string out = "derivation:\n";
  if (!theory_ref.empty()) out += "theory: " + theory_ref + "\n";
  out += "start: " + to_string(d.start) + "\n";
  out += "goal: " + to_string(d.goal) + "\n";
  for (const auto& step : d.steps) out += "step: " + render_step(step, I) + "\n";
  return out;
}

std::string render_protocol(const ProtocolSpec& spec) {
  std::string out = "protocol: " + spec.name + "\n";
  if (!spec.theory_ref.empty()) out += "theory: " + spec.theory_ref + "\n";
  if (!spec.knowledge.empty()) out += "knowledge: " + to_string(spec.knowledge) + "\n";
  if (!spec.sessions.empty()) {
    out += "sessions: ";
    bool sep = false;
    for (const auto& [role, n] : spec.sessions) {
      if (sep) out += ", ";
      sep = true;
      out += role + "=" + std::to_string(n);
    }
    out += "\n";
  }
  for (const Role& role : spec.roles) {
    out += "role " + role.name + ":\n";
    if (!role.fresh.empty()) {
      out += "  fresh ";
      for (std::size_t i = 0; i < role.fresh.size(); ++i)
        out += (i ? ", " : "") + role.fresh[i];
      out += "\n";
    }
    for (const RoleEvent& ev : role.events) {
      out += ev.kind == RoleEvent::Kind::Send ? "  send " : "  recv ";
      out += to_string(ev.message);
      if (!ev.checks.empty()) {
        out += " check ";
        for (std::size_t i = 0; i < ev.checks.size(); ++i) {
          if (i) out += ", ";
          out += to_string(ev.checks[i].first) + " = " + to_string(ev.checks[i].second);
        }
      }
      out += "\n";
    }
  }
  if (spec.goal.kind == GoalSpec::Kind::Secrecy)
    out += "goal secrecy: " + to_string(spec.goal.secret) + "\n";
  if (spec.goal.kind == GoalSpec::Kind::Reach) {
    out += "goal reach: ";
    for (std::size_t i = 0; i < spec.goal.eqs.size(); ++i) {
      if (i) out += ", ";
      out += to_string(spec.goal.eqs[i].first) + " = " + to_string(spec.goal.eqs[i].second);
    }
    out += "\n";
  }
  return out;
}

}  // namespace keysub
