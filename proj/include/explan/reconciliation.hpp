/*
 * include/explan/reconciliation.hpp
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

#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <unordered_map>
#include <vector>

#include "explan/distances.hpp"
#include "explan/expected.hpp"
#include "explan/ground.hpp"
#include "explan/regression.hpp"

namespace explan {

// Robot model, the human's mental model of it, and the action-name bridge.
// Both tasks must ground over the same observable fluent universe with
// identical initial and goal states (atom names).
struct ExplicablePlanningProblem {
  GroundTask robot;
  GroundTask human;
  ActionMapping mapping;
};

namespace detail {

inline std::vector<std::string> observable_ids_to_names(const GroundTask& t,
                                                        const std::vector<int>& ids) {
  std::vector<std::string> out;
  for (int id : ids)
    if (!t.is_synthetic(id)) out.push_back(t.fluent_names[id]);
  return out;
}

}  // namespace detail

inline ExplicablePlanningProblem make_explicable_problem(
    const GroundTask& robot, const GroundTask& human, ActionMapping mapping) {
  std::vector<std::string> fr(robot.fluent_names.begin(),
                              robot.fluent_names.begin() + robot.n_real_fluents);
  std::vector<std::string> fh(human.fluent_names.begin(),
                              human.fluent_names.begin() + human.n_real_fluents);
  if (fr != fh)
    throw ModelMismatch("fluent universes differ (same predicates and objects "
                        "are required)");
  if (detail::observable_ids_to_names(robot, robot.init_ids) !=
      detail::observable_ids_to_names(human, human.init_ids))
    throw ModelMismatch("initial states differ by atom name");
  if (detail::observable_ids_to_names(robot, robot.goal_ids) !=
      detail::observable_ids_to_names(human, human.goal_ids))
    throw ModelMismatch("goal states differ by atom name");
  ExplicablePlanningProblem epp;
  epp.robot = robot;
  epp.human = human;
  epp.mapping = std::move(mapping);
  return epp;
}

// Per-depth views of the expected plans: action-name sets, causal-link sets
// and observable state names for every prefix length, so plan prefixes can be
// compared against "the expected plan so far".
class ExpectedPrefixIndex {
 public:
  ExpectedPrefixIndex(const GroundTask& human_task,
                      const ExpectedPlanSet& expected, LinkMode mode)
      : expected_(&expected) {
    for (const Plan& plan : expected.plans) {
      Member m;
      m.length = plan.actions.size();
      for (int aid : plan.actions)
        m.names.push_back(human_task.actions.at(aid).name);
      m.name_sets.resize(m.length + 1);
      for (std::size_t l = 0; l < m.length; ++l) {
        m.name_sets[l + 1] = m.name_sets[l];
        m.name_sets[l + 1].insert(m.names[l]);
      }
      StateTrace trace = trace_prefix(human_task, plan.actions);
      for (const State& s : trace.states)
        m.state_names.push_back(human_task.observable_names(s));
      m.link_sets.resize(m.length + 1);
      for (std::size_t l = 0; l <= m.length; ++l) {
        std::vector<int> truncated(plan.actions.begin(),
                                   plan.actions.begin() + l);
        auto links = extract_causal_links(human_task, truncated, mode);
        m.link_sets[l] = link_name_set(human_task, truncated, links,
                                       ActionMapping{},
                                       MapDirection::kRobotToHuman);
      }
      members_.push_back(std::move(m));
    }
  }

  struct Member {
    std::size_t length = 0;
    std::vector<std::string> names;
    std::vector<std::set<std::string>> name_sets;                    // by prefix length
    std::vector<std::vector<std::string>> state_names;               // by depth
    std::vector<std::set<std::array<std::string, 3>>> link_sets;     // by prefix length
  };

  const std::vector<Member>& members() const { return members_; }
  const ExpectedPlanSet& expected() const { return *expected_; }

 private:
  const ExpectedPlanSet* expected_;
  std::vector<Member> members_;
};

// h(v): predicted explicability of the robot plan prefix against the closest
// expected-plan prefix. Each expected plan is truncated to
// min(|prefix|, |expected|); the composite-minimizing member supplies Δ. The
// human-model plan to the exact search state is itself a planning problem, so
// the truncated expected prefix stands in for it. An empty prefix scores 1.0
// (expand-first optimism, mirroring the open list's initial +inf).
inline double prefix_heuristic(const GroundTask& robot_task,
                               const std::vector<int>& prefix,
                               const ExpectedPrefixIndex& index,
                               const RegressionModel& model,
                               const ActionMapping& mapping, LinkMode mode,
                               CompositeKind composite = CompositeKind::kSquaredSum) {
  if (index.members().empty()) throw EmptyExpectedSet();
  if (prefix.empty()) return 1.0;

  std::set<std::string> names_r;
  for (int aid : prefix)
    names_r.insert(mapping.translate(robot_task.actions.at(aid).name,
                                     MapDirection::kRobotToHuman));
  auto links = extract_causal_links(robot_task, prefix, mode);
  auto links_r = link_name_set(robot_task, prefix, links, mapping,
                               MapDirection::kRobotToHuman);
  StateTrace trace = trace_prefix(robot_task, prefix);
  std::vector<std::vector<std::string>> trace_r;
  for (const State& s : trace.states)
    trace_r.push_back(robot_task.observable_names(s));

  bool have = false;
  double best_comp = 0.0;
  DistanceVector best_dv;
  for (const auto& m : index.members()) {
    const std::size_t l = std::min(prefix.size(), m.length);
    DistanceVector dv;
    dv.action_d = detail::jaccard_complement(names_r, m.name_sets[l]);
    dv.causal_d = detail::jaccard_complement_t(links_r, m.link_sets[l]);
    std::vector<std::vector<std::string>> trace_h(
        m.state_names.begin(), m.state_names.begin() + l + 1);
    dv.state_d = state_sequence_distance_names(trace_r, trace_h);
    const double c = composite_distance(dv, composite);
    if (!have || c < best_comp) {
      have = true;
      best_comp = c;
      best_dv = dv;
    }
  }
  return model.predict(best_dv);
}

struct Solution {
  Plan plan;
  long long cost = 0;
  double predicted_score = 0.0;
  int index = 0;  // emission order
};

struct SolutionStream {
  std::vector<Solution> solutions;
  int best = -1;           // index of the best-so-far solution
  bool complete = false;   // open list exhausted (vs. node budget hit)
  long long expansions = 0;
  long long reopened = 0;  // closed states reached again with higher h

  bool best_monotone() const {
    double best_seen = -1.0;
    for (const Solution& s : solutions) {
      const double b = std::max(best_seen, s.predicted_score);
      if (b < best_seen) return false;
      best_seen = b;
    }
    return true;
  }

  const Solution* best_solution() const {
    return best < 0 ? nullptr : &solutions[best];
  }
};

struct ReconciliationParams {
  long long max_cost = 0;
  int k_expected = 16;
  long long node_budget = 1000000;
  LinkMode mode = LinkMode::kLiteralAdjacent;
  CompositeKind composite = CompositeKind::kSquaredSum;
};

// Cost-bounded anytime greedy best-first search over the robot model, guided
// by the learned explicability of plan prefixes. Goal nodes emit their plan
// and the search continues; every loopless plan within the bound is
// eventually emitted, so run to exhaustion enumerates them all. Duplicate
// detection is per path: h depends on the prefix, not the state alone, so a
// state reached by a different prefix is a different search object. The
// closed list only records the best h seen per state to surface reopening
// (a closed state reached again through a strictly better-looking prefix);
// pruning on it would lose candidate plans.
//
// Emitted scores are full-plan predictions against the complete expected
// plans (the prefix heuristic's truncation no longer applies at a goal).
inline SolutionStream reconciliation_search(
    const ExplicablePlanningProblem& epp, const ReconciliationParams& params,
    const RegressionModel& model,
    const std::function<void(const Solution&)>& emit = {}) {
  if (params.max_cost < 0) throw DataError("max_cost must be >= 0");
  ExpectedPlanSet expected =
      generate_expected_set(epp.human, params.k_expected);
  ExpectedPrefixIndex index(epp.human, expected, params.mode);

  struct RNode {
    State state;
    long long g;
    double h;
    int parent;
    int action;
  };
  struct Entry {
    double h;
    long long seq;
    int node;
    bool operator<(const Entry& o) const {  // max-heap on h, FIFO ties
      if (h != o.h) return h < o.h;
      return seq > o.seq;
    }
  };

  std::vector<RNode> nodes;
  std::priority_queue<Entry> open;
  std::unordered_map<State, double, StateHash> closed;

  nodes.push_back({epp.robot.init_state(), 0, 1.0, -1, -1});
  long long seq = 0;
  open.push({1.0, seq++, 0});

  SolutionStream stream;
  auto prefix_of = [&](int node_id) {
    std::vector<int> actions;
    for (int cur = node_id; nodes[cur].parent >= 0; cur = nodes[cur].parent)
      actions.push_back(nodes[cur].action);
    std::reverse(actions.begin(), actions.end());
    return actions;
  };

  bool budget_hit = false;
  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    if (++stream.expansions > params.node_budget) {
      budget_hit = true;
      break;
    }
    const RNode n = nodes[e.node];

    auto it = closed.find(n.state);
    if (it == closed.end()) {
      closed.emplace(n.state, n.h);
    } else if (n.h > it->second) {
      ++stream.reopened;
      it->second = n.h;
    }

    if (epp.robot.satisfies_goal(n.state)) {
      Plan plan = make_plan(epp.robot, prefix_of(e.node));
      SelectionResult sel = distance_minimizing_plan(
          epp.robot, plan, epp.human, expected, epp.mapping, params.mode,
          params.composite);
      Solution sol;
      sol.cost = plan.cost;
      sol.plan = std::move(plan);
      sol.predicted_score = model.predict(sel.features);
      sol.index = static_cast<int>(stream.solutions.size());
      if (stream.best < 0 ||
          sol.predicted_score > stream.solutions[stream.best].predicted_score)
        stream.best = sol.index;
      stream.solutions.push_back(sol);
      if (emit) emit(stream.solutions.back());
    }

    for (int aid = 0; aid < static_cast<int>(epp.robot.actions.size()); ++aid) {
      if (!applicable(epp.robot, n.state, aid)) continue;
      const long long g2 = n.g + epp.robot.actions[aid].cost;
      if (g2 > params.max_cost) continue;
      State succ = apply_unchecked(epp.robot, n.state, aid);
      bool loop = false;
      for (int cur = e.node; cur >= 0; cur = nodes[cur].parent)
        if (nodes[cur].state == succ) {
          loop = true;
          break;
        }
      if (loop) continue;
      std::vector<int> child_prefix = prefix_of(e.node);
      child_prefix.push_back(aid);
      const double h = prefix_heuristic(epp.robot, child_prefix, index, model,
                                        epp.mapping, params.mode,
                                        params.composite);
      nodes.push_back({std::move(succ), g2, h, e.node, aid});
      open.push({h, seq++, static_cast<int>(nodes.size()) - 1});
    }
  }

  stream.complete = !budget_hit;
  if (stream.complete && stream.solutions.empty())
    throw NoSolutionWithinBound(params.max_cost);
  return stream;
}

struct BruteForceResult {
  Plan plan;
  double score = 0.0;
  long long plans_enumerated = 0;
};

// Exhaustive oracle: all loopless plans within the bound, scored as full
// plans, argmax returned (ties to the lexicographically smallest action-id
// sequence, which depth-first order in ascending action ids visits first).
inline BruteForceResult brute_force_explicable(
    const ExplicablePlanningProblem& epp, long long max_cost,
    const RegressionModel& model, int k_expected = 16,
    long long enumeration_cap = 1000000,
    LinkMode mode = LinkMode::kLiteralAdjacent,
    CompositeKind composite = CompositeKind::kSquaredSum) {
  ExpectedPlanSet expected = generate_expected_set(epp.human, k_expected);

  BruteForceResult best;
  bool found = false;
  long long visits = 0;
  std::vector<int> path;
  std::vector<State> on_path;
  on_path.push_back(epp.robot.init_state());

  std::function<void(long long)> dfs = [&](long long g) {
    if (++visits > enumeration_cap)
      throw EnumerationCapExceeded(enumeration_cap);
    const State s = on_path.back();  // copy: on_path may reallocate below
    if (epp.robot.satisfies_goal(s)) {
      Plan plan = make_plan(epp.robot, path);
      SelectionResult sel = distance_minimizing_plan(
          epp.robot, plan, epp.human, expected, epp.mapping, mode, composite);
      const double score = model.predict(sel.features);
      ++best.plans_enumerated;
      if (!found || score > best.score) {
        found = true;
        best.plan = std::move(plan);
        best.score = score;
      }
    }
    for (int aid = 0; aid < static_cast<int>(epp.robot.actions.size()); ++aid) {
      if (!applicable(epp.robot, s, aid)) continue;
      const long long g2 = g + epp.robot.actions[aid].cost;
      if (g2 > max_cost) continue;
      State succ = apply_unchecked(epp.robot, s, aid);
      bool loop = false;
      for (const State& prev : on_path)
        if (prev == succ) {
          loop = true;
          break;
        }
      if (loop) continue;
      path.push_back(aid);
      on_path.push_back(std::move(succ));
      dfs(g2);
      on_path.pop_back();
      path.pop_back();
    }
  };
  dfs(0);
  if (!found) throw NoSolutionWithinBound(max_cost);
  return best;
}

}  // namespace explan
