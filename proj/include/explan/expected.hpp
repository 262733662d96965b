/*
 * include/explan/expected.hpp
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
#include <functional>
#include <limits>
#include <queue>
#include <unordered_map>
#include <vector>

#include "explan/distances.hpp"
#include "explan/errors.hpp"
#include "explan/ground.hpp"

namespace explan {

enum class SearchHeuristic { kHMax, kBlind };

constexpr long long kInfCost = std::numeric_limits<long long>::max() / 4;

// h_max: cost to reach the most expensive goal fluent under delete
// relaxation. Admissible and consistent on this STRIPS subset.
inline long long hmax(const GroundTask& task, const State& state) {
  std::vector<long long> val(task.n_fluents(), kInfCost);
  for (std::size_t f = 0; f < task.n_fluents(); ++f)
    if (state.test(static_cast<int>(f))) val[f] = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const GroundAction& a : task.actions) {
      long long reach = 0;
      for (int p : a.pre) {
        if (val[p] > reach) reach = val[p];
        if (reach >= kInfCost) break;
      }
      if (reach >= kInfCost) continue;
      const long long through = reach + a.cost;
      for (int f : a.add) {
        if (through < val[f]) {
          val[f] = through;
          changed = true;
        }
      }
    }
  }
  long long h = 0;
  for (int g : task.goal_ids) {
    if (val[g] >= kInfCost) return kInfCost;
    if (val[g] > h) h = val[g];
  }
  return h;
}

// Memoizes h_max per state; the enumerative searches revisit states heavily.
class HMaxCache {
 public:
  explicit HMaxCache(const GroundTask& task, SearchHeuristic kind)
      : task_(task), kind_(kind) {}

  long long operator()(const State& s) {
    if (kind_ == SearchHeuristic::kBlind) return 0;
    auto it = cache_.find(s);
    if (it != cache_.end()) return it->second;
    const long long h = hmax(task_, s);
    cache_.emplace(s, h);
    return h;
  }

 private:
  const GroundTask& task_;
  SearchHeuristic kind_;
  std::unordered_map<State, long long, StateHash> cache_;
};

struct SearchLimits {
  long long node_budget = 1000000;
};

// Cost-optimal plan via A*. Deterministic: successors are generated in
// ascending action-id order and the open list breaks f-ties FIFO.
inline Plan optimal_plan(const GroundTask& task,
                         SearchHeuristic heuristic = SearchHeuristic::kHMax,
                         const SearchLimits& limits = {}) {
  struct Node {
    State state;
    long long g;
    int parent;
    int action;
  };
  struct Entry {
    long long f;
    long long seq;
    int node;
    bool operator>(const Entry& o) const {
      if (f != o.f) return f > o.f;
      return seq > o.seq;
    }
  };

  HMaxCache h(task, heuristic);
  std::vector<Node> nodes;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
  std::unordered_map<State, long long, StateHash> best_g;

  const State init = task.init_state();
  const long long h0 = h(init);
  if (h0 >= kInfCost) throw Unsolvable();
  nodes.push_back({init, 0, -1, -1});
  best_g[init] = 0;
  long long seq = 0;
  open.push({h0, seq++, 0});

  long long expansions = 0;
  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    const Node n = nodes[e.node];
    auto it = best_g.find(n.state);
    if (it != best_g.end() && it->second < n.g) continue;  // stale entry
    if (task.satisfies_goal(n.state)) {
      std::vector<int> actions;
      int cur = e.node;
      while (nodes[cur].parent >= 0) {
        actions.push_back(nodes[cur].action);
        cur = nodes[cur].parent;
      }
      std::reverse(actions.begin(), actions.end());
      return make_plan(task, actions);
    }
    if (++expansions > limits.node_budget)
      throw ResourceLimit(limits.node_budget);

    for (int aid = 0; aid < static_cast<int>(task.actions.size()); ++aid) {
      if (!applicable(task, n.state, aid)) continue;
      State succ = apply_unchecked(task, n.state, aid);
      const long long g2 = n.g + task.actions[aid].cost;
      auto bit = best_g.find(succ);
      if (bit != best_g.end() && bit->second <= g2) continue;
      const long long hs = h(succ);
      if (hs >= kInfCost) continue;
      best_g[succ] = g2;
      nodes.push_back({std::move(succ), g2, e.node, aid});
      open.push({g2 + hs, seq++, static_cast<int>(nodes.size()) - 1});
    }
  }
  throw Unsolvable();
}

struct GenerationMeta {
  long long expansions = 0;
  bool truncated = false;
};

// All cost-optimal plans of the task, in lexicographic action-id order.
struct ExpectedPlanSet {
  std::vector<Plan> plans;
  long long optimal_cost = 0;
  GenerationMeta meta;
};

// Exhaustive loopless depth-first enumeration bounded at the optimal cost;
// h_max prunes branches that can no longer finish within the bound. Capped at
// k_max members with an explicit truncation flag, never silently.
inline ExpectedPlanSet generate_expected_set(const GroundTask& task, int k_max,
                                             SearchLimits limits = {}) {
  if (k_max < 1) throw DataError("k_max must be >= 1");
  ExpectedPlanSet out;
  out.optimal_cost = optimal_plan(task, SearchHeuristic::kHMax, limits).cost;

  HMaxCache h(task, SearchHeuristic::kHMax);
  std::vector<int> path;
  std::vector<State> on_path;
  on_path.push_back(task.init_state());
  bool done = false;

  std::function<void(long long)> dfs = [&](long long g) {
    if (done) return;
    if (++out.meta.expansions > limits.node_budget)
      throw ResourceLimit(limits.node_budget);
    const State s = on_path.back();  // copy: on_path may reallocate below
    if (g == out.optimal_cost && task.satisfies_goal(s)) {
      if (static_cast<int>(out.plans.size()) == k_max) {
        out.meta.truncated = true;
        done = true;
        return;
      }
      out.plans.push_back(make_plan(task, path));
    }
    for (int aid = 0; aid < static_cast<int>(task.actions.size()); ++aid) {
      if (done) return;
      if (!applicable(task, s, aid)) continue;
      const long long g2 = g + task.actions[aid].cost;
      if (g2 > out.optimal_cost) continue;
      State succ = apply_unchecked(task, s, aid);
      bool loop = false;
      for (const State& prev : on_path)
        if (prev == succ) loop = true;
      if (loop) continue;
      const long long hs = h(succ);
      if (hs >= kInfCost || g2 + hs > out.optimal_cost) continue;
      path.push_back(aid);
      on_path.push_back(std::move(succ));
      dfs(g2);
      on_path.pop_back();
      path.pop_back();
    }
  };
  dfs(0);
  return out;
}

struct SelectionResult {
  int chosen = -1;            // index into the expected plan set
  DistanceVector features;    // Δ against the chosen plan
  double composite = 0.0;
};

// Picks the expected plan minimizing the composite distance to the robot
// plan; ties go to the lowest index.
inline SelectionResult distance_minimizing_plan(
    const GroundTask& robot_task, const Plan& robot_plan,
    const GroundTask& human_task, const ExpectedPlanSet& expected,
    const ActionMapping& mapping, LinkMode mode,
    CompositeKind composite = CompositeKind::kSquaredSum) {
  if (expected.plans.empty()) throw EmptyExpectedSet();
  SelectionResult best;
  for (std::size_t i = 0; i < expected.plans.size(); ++i) {
    DistanceVector dv = distance_vector(robot_task, robot_plan, human_task,
                                        expected.plans[i], mapping, mode);
    const double c = composite_distance(dv, composite);
    if (best.chosen < 0 || c < best.composite) {
      best.chosen = static_cast<int>(i);
      best.features = dv;
      best.composite = c;
    }
  }
  return best;
}

}  // namespace explan
