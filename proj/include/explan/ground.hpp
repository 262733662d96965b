/*
 * include/explan/ground.hpp
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
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "explan/errors.hpp"
#include "explan/model.hpp"

namespace explan {

// Fixed-universe bit set over fluent ids.
class State {
 public:
  State() = default;
  explicit State(std::size_t n_fluents) : words_((n_fluents + 63) / 64, 0) {}

  void set(int id) { words_[id >> 6] |= (std::uint64_t{1} << (id & 63)); }
  void reset(int id) { words_[id >> 6] &= ~(std::uint64_t{1} << (id & 63)); }
  bool test(int id) const {
    return (words_[id >> 6] >> (id & 63)) & 1;
  }

  bool contains_all(const std::vector<int>& ids) const {
    for (int id : ids)
      if (!test(id)) return false;
    return true;
  }

  bool operator==(const State& o) const { return words_ == o.words_; }
  bool operator!=(const State& o) const { return !(*this == o); }
  bool operator<(const State& o) const { return words_ < o.words_; }

  std::size_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint64_t w : words_) {
      h ^= w;
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::vector<std::uint64_t> words_;
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

struct GroundAction {
  std::string name;          // "schema arg1 arg2", space-joined
  std::vector<int> pre;      // sorted fluent ids
  std::vector<int> add;
  std::vector<int> del;
  long long cost = 1;
};

struct Plan {
  std::vector<int> actions;  // ground action ids
  long long cost = 0;

  bool operator==(const Plan& o) const { return actions == o.actions; }
};

// states[0] = init, states[k+1] = apply(states[k], plan[k])
struct StateTrace {
  std::vector<State> states;
};

struct GroundTask {
  std::string domain_name;
  std::string problem_name;
  std::vector<std::string> fluent_names;  // dense ids 0..|F|-1
  int n_real_fluents = 0;                 // ids >= n_real_fluents are synthetic
                                          // complements from compiling away
                                          // negative preconditions
  std::vector<GroundAction> actions;
  std::vector<int> init_ids;  // sorted
  std::vector<int> goal_ids;  // sorted

  std::size_t n_fluents() const { return fluent_names.size(); }
  bool is_synthetic(int id) const { return id >= n_real_fluents; }

  State make_state(const std::vector<int>& ids) const {
    State s(n_fluents());
    for (int id : ids) s.set(id);
    return s;
  }
  State init_state() const { return make_state(init_ids); }
  State goal_state() const { return make_state(goal_ids); }

  bool satisfies_goal(const State& s) const {
    return s.contains_all(goal_ids);
  }

  int action_id(const std::string& name) const {
    for (std::size_t i = 0; i < actions.size(); ++i)
      if (actions[i].name == name) return static_cast<int>(i);
    return -1;
  }

  // "LeftSqueeze l2 l1" -> "LeftSqueeze-l2-l1"
  static std::string dash_name(const std::string& name) {
    std::string out = name;
    std::replace(out.begin(), out.end(), ' ', '-');
    return out;
  }

  // Real (declared-predicate) atom names of a state, sorted. Synthetic
  // complement fluents are compilation artifacts, not observable facts, so
  // they stay out of cross-model state comparisons.
  std::vector<std::string> observable_names(const State& s) const {
    std::vector<std::string> out;
    for (int id = 0; id < n_real_fluents; ++id)
      if (s.test(id)) out.push_back(fluent_names[id]);
    return out;  // fluent_names is lexicographically sorted per id block
  }

  std::vector<std::string> applicable_missing(const State& s, int aid) const {
    std::vector<std::string> missing;
    for (int f : actions[aid].pre)
      if (!s.test(f)) missing.push_back(fluent_names[f]);
    return missing;
  }
};

struct GroundOptions {
  long long max_ground_actions = 1000000;
};

namespace detail {

inline std::string atom_name(const std::string& pred,
                             const std::vector<std::string>& args) {
  std::string s = pred;
  for (const auto& a : args) s += " " + a;
  return s;
}

struct RawAction {
  std::string name;
  std::vector<std::string> pre_pos;
  std::vector<std::string> pre_neg;
  std::vector<std::string> add;
  std::vector<std::string> del;
  long long cost = 1;
};

inline void enumerate_bindings(
    const ActionSchema& schema, const TypeTable& types,
    const std::vector<TypedName>& objects, std::size_t param_index,
    std::map<std::string, std::string>& binding,
    const std::function<void(const std::map<std::string, std::string>&)>& fn) {
  if (param_index == schema.params.size()) {
    fn(binding);
    return;
  }
  const TypedName& prm = schema.params[param_index];
  for (const auto& obj : objects) {
    if (!types.is_subtype(obj.type, prm.type)) continue;
    binding[prm.name] = obj.name;
    enumerate_bindings(schema, types, objects, param_index + 1, binding, fn);
  }
  binding.erase(prm.name);
}

inline std::string substitute_atom(
    const Literal& lit, const std::map<std::string, std::string>& binding,
    const std::vector<TypedName>& objects, const std::string& action_name) {
  std::vector<std::string> args;
  for (const auto& a : lit.args) {
    if (!a.empty() && a[0] == '?') {
      args.push_back(binding.at(a));
    } else {
      bool known = false;
      for (const auto& o : objects)
        if (o.name == a) known = true;
      if (!known) throw UnknownObject(a + " in action " + action_name);
      args.push_back(a);
    }
  }
  return atom_name(lit.predicate, args);
}

}  // namespace detail

// Exhaustive typed instantiation. Deterministic: the fluent universe is every
// well-typed instantiation of every declared predicate (both models of an
// explicable planning problem declare the same predicates, so they ground
// over the same universe), atoms get ids in lexicographic name order, and
// ground actions are sorted by name. Negative preconditions are compiled away
// through complementary "not <atom>" fluents so everything downstream sees
// pure STRIPS. Actions whose precondition mentions an atom that is neither in
// the initial state nor in any add effect are pruned (syntactic check only).
inline GroundTask ground(const DomainModel& domain,
                         const ProblemInstance& problem,
                         const GroundOptions& opts = {}) {
  TypeTable types(domain);

  // Sort objects by name so binding enumeration is input-order independent.
  std::vector<TypedName> objects = problem.objects;
  std::sort(objects.begin(), objects.end(),
            [](const TypedName& a, const TypedName& b) { return a.name < b.name; });

  // Universe of real atoms.
  std::vector<std::string> atoms;
  for (const auto& pred : domain.predicates) {
    std::vector<std::vector<std::string>> cands(pred.params.size());
    bool viable = true;
    for (std::size_t i = 0; i < pred.params.size(); ++i) {
      for (const auto& obj : objects)
        if (types.is_subtype(obj.type, pred.params[i].type))
          cands[i].push_back(obj.name);
      if (cands[i].empty()) viable = false;
    }
    if (!viable) continue;
    std::vector<std::size_t> idx(pred.params.size(), 0);
    while (true) {
      std::vector<std::string> args;
      for (std::size_t i = 0; i < idx.size(); ++i)
        args.push_back(cands[i][idx[i]]);
      atoms.push_back(detail::atom_name(pred.name, args));
      std::size_t k = idx.size();
      bool done = true;
      while (k > 0) {
        --k;
        if (++idx[k] < cands[k].size()) {
          done = false;
          break;
        }
        idx[k] = 0;
      }
      if (done) break;
    }
  }
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());

  // Instantiate schemas.
  long long estimated = 0;
  for (const auto& schema : domain.actions) {
    long long combos = 1;
    for (const auto& prm : schema.params) {
      long long c = 0;
      for (const auto& obj : objects)
        if (types.is_subtype(obj.type, prm.type)) ++c;
      combos *= c;
      if (combos > opts.max_ground_actions)
        throw GroundingExplosion(combos, opts.max_ground_actions);
    }
    estimated += combos;
    if (estimated > opts.max_ground_actions)
      throw GroundingExplosion(estimated, opts.max_ground_actions);
  }

  std::vector<detail::RawAction> raw;
  for (const auto& schema : domain.actions) {
    std::map<std::string, std::string> binding;
    detail::enumerate_bindings(
        schema, types, objects, 0, binding,
        [&](const std::map<std::string, std::string>& b) {
          detail::RawAction ra;
          ra.name = schema.name;
          for (const auto& prm : schema.params) ra.name += " " + b.at(prm.name);
          ra.cost = schema.cost;
          for (const auto& l : schema.pre) {
            auto atom = detail::substitute_atom(l, b, objects, schema.name);
            (l.negated ? ra.pre_neg : ra.pre_pos).push_back(atom);
          }
          for (const auto& l : schema.add)
            ra.add.push_back(detail::substitute_atom(l, b, objects, schema.name));
          for (const auto& l : schema.del)
            ra.del.push_back(detail::substitute_atom(l, b, objects, schema.name));
          raw.push_back(std::move(ra));
        });
  }

  // Complementary fluents for atoms used in negative preconditions.
  std::vector<std::string> complemented;
  for (const auto& ra : raw)
    for (const auto& a : ra.pre_neg) complemented.push_back(a);
  std::sort(complemented.begin(), complemented.end());
  complemented.erase(std::unique(complemented.begin(), complemented.end()),
                     complemented.end());

  GroundTask task;
  task.domain_name = domain.name;
  task.problem_name = problem.name;
  task.fluent_names = atoms;
  task.n_real_fluents = static_cast<int>(atoms.size());
  for (const auto& a : complemented)
    task.fluent_names.push_back("not " + a);

  std::map<std::string, int> id_map;
  for (std::size_t i = 0; i < task.fluent_names.size(); ++i)
    id_map[task.fluent_names[i]] = static_cast<int>(i);
  auto id_of = [&id_map](const std::string& a) -> int {
    auto it = id_map.find(a);
    if (it == id_map.end())
      throw InvalidModel("atom outside typed universe: (" + a + ")");
    return it->second;
  };

  std::set<std::string> complemented_set(complemented.begin(),
                                         complemented.end());

  // Init (with closure over complements) and goal.
  std::vector<int> init_ids;
  std::set<std::string> init_atoms;
  for (const auto& a : problem.init)
    init_atoms.insert(detail::atom_name(a.predicate, a.args));
  for (const auto& a : init_atoms) init_ids.push_back(id_of(a));
  for (const auto& a : complemented)
    if (!init_atoms.count(a)) init_ids.push_back(id_of("not " + a));
  std::sort(init_ids.begin(), init_ids.end());
  task.init_ids = init_ids;

  for (const auto& a : problem.goal)
    task.goal_ids.push_back(id_of(detail::atom_name(a.predicate, a.args)));
  std::sort(task.goal_ids.begin(), task.goal_ids.end());
  task.goal_ids.erase(std::unique(task.goal_ids.begin(), task.goal_ids.end()),
                      task.goal_ids.end());

  // Assemble ground actions with compiled preconditions and complement
  // maintenance: net-adding f deletes (not f); net-deleting f adds (not f).
  std::vector<GroundAction> actions;
  for (const auto& ra : raw) {
    GroundAction ga;
    ga.name = ra.name;
    ga.cost = ra.cost;
    std::set<int> pre, add, del;
    for (const auto& a : ra.pre_pos) pre.insert(id_of(a));
    for (const auto& a : ra.pre_neg) pre.insert(id_of("not " + a));
    std::set<std::string> adds(ra.add.begin(), ra.add.end());
    std::set<std::string> dels(ra.del.begin(), ra.del.end());
    for (const auto& a : adds) {
      add.insert(id_of(a));
      if (complemented_set.count(a)) del.insert(id_of("not " + a));
    }
    for (const auto& a : dels) {
      del.insert(id_of(a));
      if (!adds.count(a) && complemented_set.count(a))
        add.insert(id_of("not " + a));
    }
    ga.pre.assign(pre.begin(), pre.end());
    ga.add.assign(add.begin(), add.end());
    ga.del.assign(del.begin(), del.end());
    actions.push_back(std::move(ga));
  }

  // Static pruning: a precondition atom that is neither initially true nor
  // added by any action can never hold.
  std::vector<char> possibly_true(task.n_fluents(), 0);
  for (int id : task.init_ids) possibly_true[id] = 1;
  for (const auto& ga : actions)
    for (int id : ga.add) possibly_true[id] = 1;
  std::vector<GroundAction> kept;
  for (auto& ga : actions) {
    bool ok = true;
    for (int id : ga.pre)
      if (!possibly_true[id]) ok = false;
    if (ok) kept.push_back(std::move(ga));
  }

  std::sort(kept.begin(), kept.end(),
            [](const GroundAction& a, const GroundAction& b) {
              return a.name < b.name;
            });
  for (std::size_t i = 1; i < kept.size(); ++i)
    if (kept[i].name == kept[i - 1].name)
      throw InvalidModel("duplicate ground action " + kept[i].name);
  task.actions = std::move(kept);

  if (static_cast<long long>(task.actions.size()) > opts.max_ground_actions)
    throw GroundingExplosion(static_cast<long long>(task.actions.size()),
                             opts.max_ground_actions);
  return task;
}

// Transition function: (state \ del(a)) ∪ add(a). Pure.
inline State apply(const GroundTask& task, const State& state, int action_id) {
  const GroundAction& a = task.actions.at(action_id);
  std::vector<std::string> missing = task.applicable_missing(state, action_id);
  if (!missing.empty()) throw PreconditionViolation(std::move(missing));
  State next = state;
  for (int f : a.del) next.reset(f);
  for (int f : a.add) next.set(f);
  return next;
}

inline bool applicable(const GroundTask& task, const State& state,
                       int action_id) {
  return state.contains_all(task.actions[action_id].pre);
}

inline State apply_unchecked(const GroundTask& task, const State& state,
                             int action_id) {
  const GroundAction& a = task.actions[action_id];
  State next = state;
  for (int f : a.del) next.reset(f);
  for (int f : a.add) next.set(f);
  return next;
}

struct ValidationResult {
  StateTrace trace;
  long long cost = 0;
};

// Replays the plan; every step's precondition must hold and the final state
// must contain the goal.
inline ValidationResult validate_plan(const GroundTask& task,
                                      const Plan& plan) {
  ValidationResult r;
  State s = task.init_state();
  r.trace.states.push_back(s);
  for (std::size_t k = 0; k < plan.actions.size(); ++k) {
    const int aid = plan.actions[k];
    if (aid < 0 || aid >= static_cast<int>(task.actions.size()))
      throw InvalidPlan("action id " + std::to_string(aid) + " out of range");
    std::vector<std::string> missing = task.applicable_missing(s, aid);
    if (!missing.empty()) throw StepFailure(k, std::move(missing));
    s = apply_unchecked(task, s, aid);
    r.trace.states.push_back(s);
    r.cost += task.actions[aid].cost;
  }
  std::vector<std::string> missing_goal;
  for (int g : task.goal_ids)
    if (!s.test(g)) missing_goal.push_back(task.fluent_names[g]);
  if (!missing_goal.empty()) throw GoalUnsatisfied(std::move(missing_goal));
  return r;
}

// Trace without the goal check, for distance computations over plan prefixes.
inline StateTrace trace_prefix(const GroundTask& task,
                               const std::vector<int>& actions) {
  StateTrace t;
  State s = task.init_state();
  t.states.push_back(s);
  for (std::size_t k = 0; k < actions.size(); ++k) {
    std::vector<std::string> missing = task.applicable_missing(s, actions[k]);
    if (!missing.empty()) throw StepFailure(k, std::move(missing));
    s = apply_unchecked(task, s, actions[k]);
    t.states.push_back(s);
  }
  return t;
}

inline Plan make_plan(const GroundTask& task, std::vector<int> actions) {
  Plan p;
  p.actions = std::move(actions);
  for (int aid : p.actions) p.cost += task.actions.at(aid).cost;
  return p;
}

}  // namespace explan
