/*
 * include/explan/model.hpp
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

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "explan/errors.hpp"

namespace explan {

// Lifted task representation for the supported subset:
// :strips :typing :negative-preconditions :action-costs

struct TypedName {
  std::string name;
  std::string type;  // "object" when untyped
};

struct TypeDef {
  std::string name;
  std::string parent;  // "object" at the root
};

struct PredicateSchema {
  std::string name;
  std::vector<TypedName> params;
};

struct Literal {
  std::string predicate;
  std::vector<std::string> args;  // ?variables or constants
  bool negated = false;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> params;
  std::vector<Literal> pre;      // may contain negated literals
  std::vector<Literal> add;
  std::vector<Literal> del;
  long long cost = 1;            // non-negative integer
};

struct DomainModel {
  std::string name;
  std::vector<std::string> requirements;
  std::vector<TypeDef> types;
  std::vector<PredicateSchema> predicates;
  std::vector<ActionSchema> actions;
  bool has_action_costs = false;

  const PredicateSchema* find_predicate(const std::string& n) const {
    for (const auto& p : predicates)
      if (p.name == n) return &p;
    return nullptr;
  }
};

struct GroundAtom {
  std::string predicate;
  std::vector<std::string> args;

  bool operator==(const GroundAtom& o) const {
    return predicate == o.predicate && args == o.args;
  }
};

struct ProblemInstance {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;
  std::vector<GroundAtom> init;
  std::vector<GroundAtom> goal;
};

// Type hierarchy lookup. "object" is the implicit root.
class TypeTable {
 public:
  explicit TypeTable(const DomainModel& d) {
    for (const auto& t : d.types) parent_[t.name] = t.parent;
  }

  bool is_subtype(const std::string& t, const std::string& ancestor) const {
    if (ancestor == "object" || t == ancestor) return true;
    std::string cur = t;
    int guard = 0;
    while (true) {
      auto it = parent_.find(cur);
      if (it == parent_.end()) return false;
      cur = it->second;
      if (cur == ancestor) return true;
      if (cur == "object") return false;
      if (++guard > 1000) throw InvalidModel("type hierarchy cycle at " + t);
    }
  }

  bool known(const std::string& t) const {
    return t == "object" || parent_.count(t) > 0;
  }

 private:
  std::map<std::string, std::string> parent_;
};

namespace detail {

inline void check_literal(const DomainModel& d, const ActionSchema& a,
                          const Literal& lit) {
  const PredicateSchema* p = d.find_predicate(lit.predicate);
  if (!p) throw UnknownPredicate(lit.predicate + " in action " + a.name);
  if (p->params.size() != lit.args.size())
    throw ArityMismatch("(" + lit.predicate + ") takes " +
                        std::to_string(p->params.size()) + " args, got " +
                        std::to_string(lit.args.size()) + " in action " +
                        a.name);
  for (const auto& arg : lit.args) {
    if (arg.empty()) throw InvalidModel("empty argument in action " + a.name);
    if (arg[0] == '?') {
      bool found = false;
      for (const auto& prm : a.params)
        if (prm.name == arg) found = true;
      if (!found)
        throw InvalidModel("unbound variable " + arg + " in action " + a.name);
    }
  }
}

inline bool same_literal(const Literal& x, const Literal& y) {
  return x.predicate == y.predicate && x.args == y.args;
}

}  // namespace detail

// Enforces the domain invariants: declared predicates with matching arity,
// no schema adding and deleting the same literal, costs >= 0.
inline void validate_domain(const DomainModel& d) {
  TypeTable types(d);
  for (const auto& pred : d.predicates)
    for (const auto& prm : pred.params)
      if (!types.known(prm.type))
        throw InvalidModel("predicate " + pred.name + " uses unknown type " +
                           prm.type);
  for (const auto& a : d.actions) {
    if (a.cost < 0)
      throw InvalidModel("negative cost in action " + a.name);
    for (const auto& prm : a.params)
      if (!types.known(prm.type))
        throw InvalidModel("action " + a.name + " uses unknown type " +
                           prm.type);
    for (const auto& l : a.pre) detail::check_literal(d, a, l);
    for (const auto& l : a.add) detail::check_literal(d, a, l);
    for (const auto& l : a.del) detail::check_literal(d, a, l);
    for (const auto& x : a.add)
      for (const auto& y : a.del)
        if (detail::same_literal(x, y))
          throw InvalidModel("action " + a.name + " adds and deletes (" +
                             x.predicate + ")");
  }
}

// --- canonical printing (parse/print round-trips are part of the contract) ---

namespace detail {

inline void print_typed_list(std::ostringstream& os,
                             const std::vector<TypedName>& list) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) os << " ";
    os << list[i].name << " - " << list[i].type;
  }
}

inline void print_literal(std::ostringstream& os, const Literal& l) {
  if (l.negated) os << "(not ";
  os << "(" << l.predicate;
  for (const auto& a : l.args) os << " " << a;
  os << ")";
  if (l.negated) os << ")";
}

}  // namespace detail

inline std::string print_domain(const DomainModel& d) {
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    os << "  (:requirements";
    for (const auto& r : d.requirements) os << " " << r;
    os << ")\n";
  }
  if (!d.types.empty()) {
    os << "  (:types";
    for (const auto& t : d.types) os << " " << t.name << " - " << t.parent;
    os << ")\n";
  }
  os << "  (:predicates\n";
  for (const auto& p : d.predicates) {
    os << "    (" << p.name;
    if (!p.params.empty()) {
      os << " ";
      detail::print_typed_list(os, p.params);
    }
    os << ")\n";
  }
  os << "  )\n";
  if (d.has_action_costs) os << "  (:functions (total-cost) - number)\n";
  for (const auto& a : d.actions) {
    os << "  (:action " << a.name << "\n    :parameters (";
    detail::print_typed_list(os, a.params);
    os << ")\n    :precondition (and";
    for (const auto& l : a.pre) {
      os << " ";
      detail::print_literal(os, l);
    }
    os << ")\n    :effect (and";
    for (const auto& l : a.add) {
      os << " ";
      detail::print_literal(os, l);
    }
    for (const auto& l : a.del) {
      os << " (not ";
      detail::print_literal(os, l);
      os << ")";
    }
    if (d.has_action_costs)
      os << " (increase (total-cost) " << a.cost << ")";
    os << ")\n  )\n";
  }
  os << ")\n";
  return os.str();
}

inline std::string print_problem(const ProblemInstance& p) {
  std::ostringstream os;
  os << "(define (problem " << p.name << ")\n  (:domain " << p.domain_name
     << ")\n  (:objects ";
  detail::print_typed_list(os, p.objects);
  os << ")\n  (:init";
  for (const auto& a : p.init) {
    os << " (" << a.predicate;
    for (const auto& arg : a.args) os << " " << arg;
    os << ")";
  }
  os << ")\n  (:goal (and";
  for (const auto& a : p.goal) {
    os << " (" << a.predicate;
    for (const auto& arg : a.args) os << " " << arg;
    os << ")";
  }
  os << "))\n)\n";
  return os.str();
}

}  // namespace explan
