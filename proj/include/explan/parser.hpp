/*
 * include/explan/parser.hpp
 *
 * Copyright 2026 The explan authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "explan/errors.hpp"
#include "explan/model.hpp"

namespace explan {

// PDDL front end for the subset
//   :strips :typing :negative-preconditions :action-costs
// documented in docs/format.md. Keywords (tokens starting with ':') are
// folded to lower case; identifiers keep their spelling and compare
// case-sensitively.

namespace sexpr {

struct Node {
  bool is_list = false;
  std::string atom;
  std::vector<Node> items;
  int line = 0;
  int col = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Node parse_one() {
    skip_ws();
    if (eof()) throw SyntaxError("unexpected end of input", line_, col_);
    return parse_node();
  }

  bool at_end() {
    skip_ws();
    return eof();
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (!eof()) {
      const char c = peek();
      if (c == ';') {
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  Node parse_node() {
    Node n;
    n.line = line_;
    n.col = col_;
    if (peek() == '(') {
      advance();
      n.is_list = true;
      while (true) {
        skip_ws();
        if (eof()) throw SyntaxError("unclosed '('", n.line, n.col);
        if (peek() == ')') {
          advance();
          return n;
        }
        n.items.push_back(parse_node());
      }
    }
    if (peek() == ')') throw SyntaxError("unexpected ')'", line_, col_);
    while (!eof() && !std::isspace(static_cast<unsigned char>(peek())) &&
           peek() != '(' && peek() != ')' && peek() != ';') {
      n.atom += peek();
      advance();
    }
    if (!n.atom.empty() && n.atom[0] == ':') {
      std::transform(n.atom.begin(), n.atom.end(), n.atom.begin(),
                     [](unsigned char c) { return std::tolower(c); });
    }
    return n;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace sexpr

namespace detail {

using sexpr::Node;

inline const std::string& want_atom(const Node& n, const char* what) {
  if (n.is_list) throw SyntaxError(std::string("expected ") + what, n.line, n.col);
  return n.atom;
}

inline void want_list(const Node& n, const char* what) {
  if (!n.is_list) throw SyntaxError(std::string("expected ") + what, n.line, n.col);
}

inline bool head_is(const Node& n, const std::string& kw) {
  return n.is_list && !n.items.empty() && !n.items[0].is_list &&
         n.items[0].atom == kw;
}

// `a b - t c d - t2 e` ; names without a trailing type get "object".
inline std::vector<TypedName> parse_typed_list(const std::vector<Node>& items,
                                               std::size_t begin) {
  std::vector<TypedName> out;
  std::vector<std::string> pending;
  for (std::size_t i = begin; i < items.size(); ++i) {
    const std::string& tok = want_atom(items[i], "name in typed list");
    if (tok == "-") {
      if (i + 1 >= items.size())
        throw SyntaxError("dangling '-' in typed list", items[i].line,
                          items[i].col);
      const std::string& ty = want_atom(items[i + 1], "type name");
      for (auto& p : pending) out.push_back({p, ty});
      pending.clear();
      ++i;
    } else {
      pending.push_back(tok);
    }
  }
  for (auto& p : pending) out.push_back({p, "object"});
  return out;
}

inline Literal parse_atom_literal(const Node& n) {
  want_list(n, "atom");
  if (n.items.empty()) throw SyntaxError("empty atom", n.line, n.col);
  Literal l;
  l.predicate = want_atom(n.items[0], "predicate name");
  for (std::size_t i = 1; i < n.items.size(); ++i)
    l.args.push_back(want_atom(n.items[i], "argument"));
  return l;
}

inline long long parse_cost_literal(const Node& n) {
  const std::string& s = want_atom(n, "integer cost");
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isdigit(c);
      }))
    throw SyntaxError(
        "action costs must be non-negative integers, got '" + s + "'", n.line,
        n.col);
  return std::stoll(s);
}

inline void parse_precondition_one(const Node& n, ActionSchema& a,
                                   bool negative_ok) {
  if (head_is(n, "and")) {
    for (std::size_t i = 1; i < n.items.size(); ++i)
      parse_precondition_one(n.items[i], a, negative_ok);
    return;
  }
  if (head_is(n, "not")) {
    if (!negative_ok)
      throw UnsupportedFeature(
          "negated precondition without :negative-preconditions");
    if (n.items.size() != 2)
      throw SyntaxError("(not ...) takes one atom", n.line, n.col);
    Literal l = parse_atom_literal(n.items[1]);
    l.negated = true;
    a.pre.push_back(std::move(l));
    return;
  }
  if (head_is(n, "=")) throw UnsupportedFeature("equality preconditions");
  if (head_is(n, "or") || head_is(n, "imply") || head_is(n, "exists") ||
      head_is(n, "forall"))
    throw UnsupportedFeature("non-conjunctive precondition (" +
                             n.items[0].atom + " ...)");
  a.pre.push_back(parse_atom_literal(n));
}

inline void parse_precondition(const Node& n, ActionSchema& a,
                               bool negative_ok) {
  want_list(n, "precondition");
  if (n.items.empty()) return;  // () or (and)
  parse_precondition_one(n, a, negative_ok);
}

inline void parse_effect_one(const Node& n, ActionSchema& a, bool costs_ok) {
  if (head_is(n, "and")) {
    for (std::size_t i = 1; i < n.items.size(); ++i)
      parse_effect_one(n.items[i], a, costs_ok);
    return;
  }
  if (head_is(n, "not")) {
    if (n.items.size() != 2)
      throw SyntaxError("(not ...) takes one atom", n.line, n.col);
    a.del.push_back(parse_atom_literal(n.items[1]));
    return;
  }
  if (head_is(n, "increase")) {
    if (!costs_ok)
      throw UnsupportedFeature("(increase ...) without :action-costs");
    if (n.items.size() != 3 || !head_is(n.items[1], "total-cost"))
      throw SyntaxError("expected (increase (total-cost) <int>)", n.line,
                        n.col);
    a.cost = parse_cost_literal(n.items[2]);
    return;
  }
  if (head_is(n, "when") || head_is(n, "forall"))
    throw UnsupportedFeature("conditional/quantified effects");
  a.add.push_back(parse_atom_literal(n));
}

inline void parse_effect(const Node& n, ActionSchema& a, bool costs_ok) {
  want_list(n, "effect");
  if (n.items.empty()) return;
  parse_effect_one(n, a, costs_ok);
}

inline GroundAtom check_ground_atom(const Node& n, const DomainModel& d,
                                    const TypeTable& types,
                                    const std::vector<TypedName>& objects,
                                    const char* where) {
  Literal l = parse_atom_literal(n);
  const PredicateSchema* p = d.find_predicate(l.predicate);
  if (!p) throw UnknownPredicate(l.predicate + std::string(" in ") + where);
  if (p->params.size() != l.args.size())
    throw ArityMismatch("(" + l.predicate + ") in " + where);
  GroundAtom atom;
  atom.predicate = l.predicate;
  for (std::size_t i = 0; i < l.args.size(); ++i) {
    const TypedName* obj = nullptr;
    for (const auto& o : objects)
      if (o.name == l.args[i]) obj = &o;
    if (!obj) throw UnknownObject(l.args[i] + std::string(" in ") + where);
    if (!types.is_subtype(obj->type, p->params[i].type))
      throw InvalidModel("object " + obj->name + " has type " + obj->type +
                         ", predicate " + l.predicate + " expects " +
                         p->params[i].type);
    atom.args.push_back(l.args[i]);
  }
  return atom;
}

}  // namespace detail

inline DomainModel parse_domain(const std::string& text) {
  static const std::set<std::string> kSupported = {
      ":strips", ":typing", ":negative-preconditions", ":action-costs"};

  sexpr::Lexer lex(text);
  sexpr::Node root = lex.parse_one();
  if (!detail::head_is(root, "define"))
    throw SyntaxError("expected (define ...)", root.line, root.col);
  if (root.items.size() < 2 || !detail::head_is(root.items[1], "domain") ||
      root.items[1].items.size() != 2)
    throw SyntaxError("expected (domain <name>)", root.line, root.col);

  DomainModel d;
  d.name = detail::want_atom(root.items[1].items[1], "domain name");

  bool negative_preconditions = false;
  bool typing = false;

  for (std::size_t s = 2; s < root.items.size(); ++s) {
    const sexpr::Node& sec = root.items[s];
    detail::want_list(sec, "domain section");
    if (sec.items.empty())
      throw SyntaxError("empty domain section", sec.line, sec.col);
    const std::string& kw = detail::want_atom(sec.items[0], "section keyword");

    if (kw == ":requirements") {
      for (std::size_t i = 1; i < sec.items.size(); ++i) {
        const std::string& r = detail::want_atom(sec.items[i], "requirement");
        if (!kSupported.count(r)) throw UnsupportedFeature("requirement " + r);
        d.requirements.push_back(r);
        if (r == ":negative-preconditions") negative_preconditions = true;
        if (r == ":typing") typing = true;
        if (r == ":action-costs") d.has_action_costs = true;
      }
    } else if (kw == ":types") {
      if (!typing) throw UnsupportedFeature("(:types) without :typing");
      auto typed = detail::parse_typed_list(sec.items, 1);
      for (auto& t : typed) d.types.push_back({t.name, t.type});
    } else if (kw == ":predicates") {
      for (std::size_t i = 1; i < sec.items.size(); ++i) {
        const sexpr::Node& p = sec.items[i];
        detail::want_list(p, "predicate declaration");
        if (p.items.empty())
          throw SyntaxError("empty predicate declaration", p.line, p.col);
        PredicateSchema ps;
        ps.name = detail::want_atom(p.items[0], "predicate name");
        if (d.find_predicate(ps.name))
          throw InvalidModel("duplicate predicate " + ps.name);
        ps.params = detail::parse_typed_list(p.items, 1);
        for (const auto& prm : ps.params)
          if (prm.name.empty() || prm.name[0] != '?')
            throw SyntaxError("predicate parameters must be ?variables",
                              p.line, p.col);
        d.predicates.push_back(std::move(ps));
      }
    } else if (kw == ":functions") {
      if (!d.has_action_costs)
        throw UnsupportedFeature("(:functions) without :action-costs");
      for (std::size_t i = 1; i < sec.items.size(); ++i) {
        const sexpr::Node& f = sec.items[i];
        if (!f.is_list) {
          if (f.atom == "-") {
            ++i;  // "- number"
            continue;
          }
          throw SyntaxError("expected function declaration", f.line, f.col);
        }
        if (f.items.size() != 1 ||
            detail::want_atom(f.items[0], "function name") != "total-cost")
          throw UnsupportedFeature("numeric fluents other than (total-cost)");
      }
    } else if (kw == ":action") {
      if (sec.items.size() < 2)
        throw SyntaxError("expected action name", sec.line, sec.col);
      ActionSchema a;
      a.name = detail::want_atom(sec.items[1], "action name");
      a.cost = d.has_action_costs ? 0 : 1;
      for (const auto& other : d.actions)
        if (other.name == a.name)
          throw InvalidModel("duplicate action " + a.name);

      std::size_t i = 2;
      while (i < sec.items.size()) {
        const std::string& key =
            detail::want_atom(sec.items[i], "action keyword");
        if (i + 1 >= sec.items.size())
          throw SyntaxError("missing value after " + key, sec.items[i].line,
                            sec.items[i].col);
        const sexpr::Node& val = sec.items[i + 1];
        if (key == ":parameters") {
          detail::want_list(val, "parameter list");
          a.params = detail::parse_typed_list(val.items, 0);
          for (const auto& prm : a.params)
            if (prm.name.empty() || prm.name[0] != '?')
              throw SyntaxError("action parameters must be ?variables",
                                val.line, val.col);
        } else if (key == ":precondition") {
          detail::parse_precondition(val, a, negative_preconditions);
        } else if (key == ":effect") {
          detail::parse_effect(val, a, d.has_action_costs);
        } else {
          throw UnsupportedFeature("action keyword " + key);
        }
        i += 2;
      }
      d.actions.push_back(std::move(a));
    } else {
      throw UnsupportedFeature("domain section " + kw);
    }
  }

  validate_domain(d);
  return d;
}

inline ProblemInstance parse_problem(const std::string& text,
                                     const DomainModel& domain) {
  sexpr::Lexer lex(text);
  sexpr::Node root = lex.parse_one();
  if (!detail::head_is(root, "define"))
    throw SyntaxError("expected (define ...)", root.line, root.col);
  if (root.items.size() < 2 || !detail::head_is(root.items[1], "problem") ||
      root.items[1].items.size() != 2)
    throw SyntaxError("expected (problem <name>)", root.line, root.col);

  ProblemInstance p;
  p.name = detail::want_atom(root.items[1].items[1], "problem name");
  TypeTable types(domain);

  for (std::size_t s = 2; s < root.items.size(); ++s) {
    const sexpr::Node& sec = root.items[s];
    detail::want_list(sec, "problem section");
    if (sec.items.empty())
      throw SyntaxError("empty problem section", sec.line, sec.col);
    const std::string& kw = detail::want_atom(sec.items[0], "section keyword");

    if (kw == ":domain") {
      if (sec.items.size() != 2)
        throw SyntaxError("expected (:domain <name>)", sec.line, sec.col);
      p.domain_name = detail::want_atom(sec.items[1], "domain name");
      if (p.domain_name != domain.name)
        throw InvalidModel("problem references domain '" + p.domain_name +
                           "', parsed domain is '" + domain.name + "'");
    } else if (kw == ":requirements") {
      // tolerated; the domain's requirements govern
    } else if (kw == ":objects") {
      auto objs = detail::parse_typed_list(sec.items, 1);
      for (const auto& o : objs) {
        if (!types.known(o.type))
          throw InvalidModel("object " + o.name + " has unknown type " +
                             o.type);
        for (const auto& prev : p.objects)
          if (prev.name == o.name)
            throw InvalidModel("duplicate object " + o.name);
        p.objects.push_back(o);
      }
    } else if (kw == ":init") {
      for (std::size_t i = 1; i < sec.items.size(); ++i) {
        if (detail::head_is(sec.items[i], "=")) continue;  // (= (total-cost) 0)
        GroundAtom a = detail::check_ground_atom(sec.items[i], domain, types,
                                                 p.objects, ":init");
        bool dup = false;
        for (const auto& prev : p.init)
          if (prev == a) dup = true;
        if (!dup) p.init.push_back(std::move(a));
      }
    } else if (kw == ":goal") {
      if (sec.items.size() != 2)
        throw SyntaxError("expected (:goal <condition>)", sec.line, sec.col);
      const sexpr::Node& g = sec.items[1];
      std::vector<const sexpr::Node*> atoms;
      if (detail::head_is(g, "and")) {
        for (std::size_t i = 1; i < g.items.size(); ++i)
          atoms.push_back(&g.items[i]);
      } else {
        detail::want_list(g, "goal condition");
        if (!g.items.empty()) atoms.push_back(&g);
      }
      for (const sexpr::Node* a : atoms) {
        if (detail::head_is(*a, "not"))
          throw UnsupportedFeature("negated goal atoms");
        GroundAtom atom =
            detail::check_ground_atom(*a, domain, types, p.objects, ":goal");
        bool dup = false;
        for (const auto& prev : p.goal)
          if (prev == atom) dup = true;
        if (!dup) p.goal.push_back(std::move(atom));
      }
    } else if (kw == ":metric") {
      // (:metric minimize (total-cost)) — implied by cost-optimal search
    } else {
      throw UnsupportedFeature("problem section " + kw);
    }
  }
  if (p.domain_name.empty())
    throw InvalidModel("problem is missing (:domain ...)");
  return p;
}

}  // namespace explan
