/*
 * include/explan/distances.hpp
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

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "explan/errors.hpp"
#include "explan/ground.hpp"
#include "explan/text.hpp"

namespace explan {

// Plan distance measures between a robot plan and a plan from the human
// mental model:
//   action distance        1 - |A∩A'| / |A∪A'|   over unique action names
//   causal link distance   1 - |Cl∩Cl'| / |Cl∪Cl'|
//   state sequence distance (1/n) [ Σ_{k=1..n'} d(s_k, s_k') + n - n' ]
// All three live in [0, 1]; the Jaccard complement of two empty sets is
// defined as 0 (identical empty behavior is not distant).

struct DistanceVector {
  double action_d = 0.0;
  double causal_d = 0.0;
  double state_d = 0.0;

  double sum() const { return action_d + causal_d + state_d; }
};

enum class CompositeKind {
  kSquaredSum,   // (a + c + s)^2, range [0, 9]
  kSquaredNorm,  // a^2 + c^2 + s^2, range [0, 3]
};

inline double composite_distance(const DistanceVector& dv,
                                 CompositeKind kind = CompositeKind::kSquaredSum) {
  if (kind == CompositeKind::kSquaredNorm)
    return dv.action_d * dv.action_d + dv.causal_d * dv.causal_d +
           dv.state_d * dv.state_d;
  const double s = dv.sum();
  return s * s;
}

enum class MapDirection { kRobotToHuman, kHumanToRobot };

// Explicit name mapping between the two action vocabularies. Injective on the
// mapped names; names absent from the map pass through verbatim (so an
// identically named action in both models counts as the same action).
class ActionMapping {
 public:
  ActionMapping() = default;

  void add(const std::string& robot_name, const std::string& human_name) {
    if (forward_.count(robot_name))
      throw DataError("duplicate mapping for robot action: " + robot_name);
    if (reverse_.count(human_name))
      throw DataError("mapping is not injective; human action mapped twice: " +
                      human_name);
    forward_[robot_name] = human_name;
    reverse_[human_name] = robot_name;
  }

  // Returns the translated name; `mapped` reports whether it was an explicit
  // entry (pass-through names are flagged false).
  std::string translate(const std::string& name, MapDirection dir,
                        bool* mapped = nullptr) const {
    const auto& table = dir == MapDirection::kRobotToHuman ? forward_ : reverse_;
    auto it = table.find(name);
    if (mapped) *mapped = it != table.end();
    return it == table.end() ? name : it->second;
  }

  std::size_t size() const { return forward_.size(); }

  static ActionMapping parse(const std::string& text) {
    ActionMapping m;
    int lineno = 0;
    for (const std::string& raw : split(text, '\n')) {
      ++lineno;
      std::string line = raw;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw DataError("mapping line " + std::to_string(lineno) +
                        " needs robotName<TAB>humanName");
      m.add(trim(line.substr(0, tab)), trim(line.substr(tab + 1)));
    }
    return m;
  }

  static ActionMapping load(const std::string& path) {
    return parse(read_file(path));
  }

 private:
  std::map<std::string, std::string> forward_;
  std::map<std::string, std::string> reverse_;
};

struct MappedPlan {
  std::vector<std::string> names;
  std::vector<bool> pass_through;  // true where no explicit entry applied
};

inline MappedPlan map_plan(const GroundTask& task, const Plan& plan,
                           const ActionMapping& mapping, MapDirection dir) {
  MappedPlan out;
  for (int aid : plan.actions) {
    bool mapped = false;
    out.names.push_back(
        mapping.translate(task.actions.at(aid).name, dir, &mapped));
    out.pass_through.push_back(!mapped);
  }
  return out;
}

namespace detail {

inline double jaccard_complement(const std::set<std::string>& a,
                                 const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& x : a)
    if (b.count(x)) ++inter;
  const std::size_t uni = a.size() + b.size() - inter;
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

template <typename T>
inline double jaccard_complement_t(const std::set<T>& a, const std::set<T>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& x : a)
    if (b.count(x)) ++inter;
  const std::size_t uni = a.size() + b.size() - inter;
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace detail

// δ_A. Unordered: repeats collapse into the unique-action set.
inline double action_distance_names(const std::vector<std::string>& names_r,
                                    const std::vector<std::string>& names_h) {
  std::set<std::string> a(names_r.begin(), names_r.end());
  std::set<std::string> b(names_h.begin(), names_h.end());
  return detail::jaccard_complement(a, b);
}

inline double action_distance(const GroundTask& task_r, const Plan& plan_r,
                              const GroundTask& task_h, const Plan& plan_h,
                              const ActionMapping& mapping) {
  return action_distance_names(
      map_plan(task_r, plan_r, mapping, MapDirection::kRobotToHuman).names,
      map_plan(task_h, plan_h, ActionMapping{}, MapDirection::kRobotToHuman)
          .names);
}

// Producer/consumer pair through a fluent.
struct CausalLink {
  int producer_pos;  // position in the plan
  int fluent;        // fluent id in the producing task
  int consumer_pos;
};

enum class LinkMode {
  kLiteralAdjacent,   // only <a_i, p, a_{i+1}> between consecutive actions
  kProducerConsumer,  // <a_i, p, a_j>, i<j, with no intervening delete/re-add
};

inline LinkMode link_mode_from_string(const std::string& s) {
  if (s == "literal-adjacent") return LinkMode::kLiteralAdjacent;
  if (s == "producer-consumer") return LinkMode::kProducerConsumer;
  throw DataError("unknown causal link mode: " + s);
}

inline std::string to_string(LinkMode m) {
  return m == LinkMode::kLiteralAdjacent ? "literal-adjacent"
                                         : "producer-consumer";
}

// Extraction is syntactic over the action definitions; the plan must be
// executable in the task (validity is the caller-visible precondition and is
// checked by replaying the prefix).
inline std::vector<CausalLink> extract_causal_links(
    const GroundTask& task, const std::vector<int>& actions, LinkMode mode) {
  try {
    trace_prefix(task, actions);
  } catch (const Error& e) {
    throw InvalidPlan(e.what());
  }
  std::vector<CausalLink> links;
  const int n = static_cast<int>(actions.size());
  for (int i = 0; i < n; ++i) {
    const GroundAction& prod = task.actions[actions[i]];
    for (int p : prod.add) {
      const int j_end = mode == LinkMode::kLiteralAdjacent ? std::min(i + 2, n) : n;
      for (int j = i + 1; j < j_end; ++j) {
        const GroundAction& mid = task.actions[actions[j]];
        const bool consumes =
            std::binary_search(mid.pre.begin(), mid.pre.end(), p);
        if (consumes) links.push_back({i, p, j});
        if (mode == LinkMode::kProducerConsumer) {
          // a later producer or a deleter cuts the chain at this fluent
          if (std::binary_search(mid.del.begin(), mid.del.end(), p) ||
              std::binary_search(mid.add.begin(), mid.add.end(), p))
            break;
        }
      }
    }
  }
  return links;
}

inline std::vector<CausalLink> extract_causal_links(const GroundTask& task,
                                                    const Plan& plan,
                                                    LinkMode mode) {
  return extract_causal_links(task, plan.actions, mode);
}

// Links as (producer name, fluent name, consumer name) triples, with action
// names run through the mapping. Set semantics for the Jaccard.
inline std::set<std::array<std::string, 3>> link_name_set(
    const GroundTask& task, const std::vector<int>& actions,
    const std::vector<CausalLink>& links, const ActionMapping& mapping,
    MapDirection dir) {
  std::set<std::array<std::string, 3>> out;
  for (const CausalLink& l : links) {
    out.insert({mapping.translate(task.actions[actions[l.producer_pos]].name, dir),
                task.fluent_names[l.fluent],
                mapping.translate(task.actions[actions[l.consumer_pos]].name, dir)});
  }
  return out;
}

inline double causal_link_distance(const GroundTask& task_r, const Plan& plan_r,
                                   const GroundTask& task_h, const Plan& plan_h,
                                   const ActionMapping& mapping, LinkMode mode) {
  auto links_r = extract_causal_links(task_r, plan_r, mode);
  auto links_h = extract_causal_links(task_h, plan_h, mode);
  auto set_r = link_name_set(task_r, plan_r.actions, links_r, mapping,
                             MapDirection::kRobotToHuman);
  auto set_h = link_name_set(task_h, plan_h.actions, links_h, ActionMapping{},
                             MapDirection::kRobotToHuman);
  return detail::jaccard_complement_t(set_r, set_h);
}

// d(s, s') over atom-name sets.
inline double state_distance(const std::vector<std::string>& s1,
                             const std::vector<std::string>& s2) {
  std::set<std::string> a(s1.begin(), s1.end());
  std::set<std::string> b(s2.begin(), s2.end());
  return detail::jaccard_complement(a, b);
}

// δ_S over two traces given as per-step atom-name sets (position 0 is the
// shared initial state and is excluded; the sum runs over post-action
// states). Handles unequal lengths: the unmatched suffix counts as maximal
// difference. Both plans empty -> 0.
inline double state_sequence_distance_names(
    const std::vector<std::vector<std::string>>& trace_r,
    const std::vector<std::vector<std::string>>& trace_h) {
  const std::size_t len_r = trace_r.empty() ? 0 : trace_r.size() - 1;
  const std::size_t len_h = trace_h.empty() ? 0 : trace_h.size() - 1;
  const std::size_t n = std::max(len_r, len_h);
  const std::size_t n_prime = std::min(len_r, len_h);
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 1; k <= n_prime; ++k)
    sum += state_distance(trace_r[k], trace_h[k]);
  sum += static_cast<double>(n - n_prime);
  return sum / static_cast<double>(n);
}

inline std::vector<std::vector<std::string>> observable_trace(
    const GroundTask& task, const StateTrace& trace) {
  std::vector<std::vector<std::string>> out;
  out.reserve(trace.states.size());
  for (const State& s : trace.states) out.push_back(task.observable_names(s));
  return out;
}

inline double state_sequence_distance(const GroundTask& task_r,
                                      const StateTrace& trace_r,
                                      const GroundTask& task_h,
                                      const StateTrace& trace_h) {
  return state_sequence_distance_names(observable_trace(task_r, trace_r),
                                       observable_trace(task_h, trace_h));
}

// Full vector for a robot plan / human plan pair.
inline DistanceVector distance_vector(const GroundTask& task_r,
                                      const Plan& plan_r,
                                      const GroundTask& task_h,
                                      const Plan& plan_h,
                                      const ActionMapping& mapping,
                                      LinkMode mode) {
  DistanceVector dv;
  dv.action_d = action_distance(task_r, plan_r, task_h, plan_h, mapping);
  dv.causal_d = causal_link_distance(task_r, plan_r, task_h, plan_h, mapping, mode);
  dv.state_d = state_sequence_distance(task_r, trace_prefix(task_r, plan_r.actions),
                                       task_h, trace_prefix(task_h, plan_h.actions));
  return dv;
}

}  // namespace explan
