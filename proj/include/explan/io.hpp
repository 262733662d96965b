/*
 * include/explan/io.hpp
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

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "explan/errors.hpp"
#include "explan/ground.hpp"
#include "explan/text.hpp"

namespace explan {

// --- plan files ---
// One ground action per line as "(name arg1 arg2)"; ';' starts a comment;
// an optional trailing "; cost = N" records the plan cost.

inline std::string write_plan_text(const GroundTask& task, const Plan& plan) {
  std::ostringstream os;
  for (int aid : plan.actions) os << "(" << task.actions.at(aid).name << ")\n";
  os << "; cost = " << plan.cost << "\n";
  return os.str();
}

inline Plan parse_plan_text(const GroundTask& task, const std::string& text) {
  std::vector<int> ids;
  std::optional<long long> declared_cost;
  for (const std::string& raw : split(text, '\n')) {
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line[0] == ';') {
      std::string c = trim(line.substr(1));
      if (c.rfind("cost", 0) == 0) {
        auto eq = c.find('=');
        if (eq != std::string::npos) {
          try {
            declared_cost = std::stoll(trim(c.substr(eq + 1)));
          } catch (...) {
            throw InvalidPlan("bad cost comment: " + line);
          }
        }
      }
      continue;
    }
    if (line.front() != '(' || line.back() != ')')
      throw InvalidPlan("expected (name args...), got: " + line);
    std::string name = trim(line.substr(1, line.size() - 2));
    // collapse internal whitespace runs
    std::string norm;
    bool in_ws = false;
    for (char ch : name) {
      if (std::isspace(static_cast<unsigned char>(ch))) {
        in_ws = true;
      } else {
        if (in_ws && !norm.empty()) norm += ' ';
        in_ws = false;
        norm += ch;
      }
    }
    int aid = task.action_id(norm);
    if (aid < 0) throw UnknownAction(norm);
    ids.push_back(aid);
  }
  Plan p = make_plan(task, std::move(ids));
  if (declared_cost && *declared_cost != p.cost)
    throw InvalidPlan("declared cost " + std::to_string(*declared_cost) +
                      " does not match recomputed cost " +
                      std::to_string(p.cost));
  return p;
}

inline Plan read_plan_file(const GroundTask& task, const std::string& path) {
  return parse_plan_text(task, read_file(path));
}

inline void write_plan_file(const GroundTask& task, const Plan& plan,
                            const std::string& path) {
  write_file(path, write_plan_text(task, plan));
}

// --- ground task serialization ---
// Versioned structured text with an explicit fluent-id table so external
// tools can cross-check grounding byte for byte.

inline std::string serialize_task(const GroundTask& task) {
  std::ostringstream os;
  os << "explan-groundtask v1\n";
  os << "domain " << task.domain_name << "\n";
  os << "problem " << task.problem_name << "\n";
  os << "fluents " << task.n_fluents() << " real " << task.n_real_fluents
     << "\n";
  for (std::size_t i = 0; i < task.n_fluents(); ++i)
    os << "f " << i << " " << task.fluent_names[i] << "\n";
  os << "actions " << task.actions.size() << "\n";
  for (std::size_t i = 0; i < task.actions.size(); ++i) {
    const GroundAction& a = task.actions[i];
    os << "a " << i << " cost " << a.cost << " " << a.name << "\n";
    os << "  pre";
    for (int f : a.pre) os << " " << f;
    os << "\n  add";
    for (int f : a.add) os << " " << f;
    os << "\n  del";
    for (int f : a.del) os << " " << f;
    os << "\n";
  }
  os << "init";
  for (int f : task.init_ids) os << " " << f;
  os << "\ngoal";
  for (int f : task.goal_ids) os << " " << f;
  os << "\nend\n";
  return os.str();
}

namespace detail {

inline std::vector<int> parse_id_list(const std::string& line,
                                      std::size_t offset) {
  std::vector<int> out;
  std::istringstream is(line.substr(offset));
  int v;
  while (is >> v) out.push_back(v);
  return out;
}

}  // namespace detail

inline GroundTask deserialize_task(const std::string& text) {
  std::vector<std::string> lines = split(text, '\n');
  std::size_t k = 0;
  auto next_line = [&]() -> std::string {
    if (k >= lines.size()) throw DataError("truncated ground task file");
    return lines[k++];
  };
  if (trim(next_line()) != "explan-groundtask v1")
    throw DataError("not an explan-groundtask v1 file");

  GroundTask task;
  {
    std::string l = next_line();
    if (l.rfind("domain ", 0) != 0) throw DataError("expected domain line");
    task.domain_name = trim(l.substr(7));
  }
  {
    std::string l = next_line();
    if (l.rfind("problem ", 0) != 0) throw DataError("expected problem line");
    task.problem_name = trim(l.substr(8));
  }
  std::size_t n_fluents = 0;
  {
    std::istringstream is(next_line());
    std::string kw, real_kw;
    is >> kw >> n_fluents >> real_kw >> task.n_real_fluents;
    if (kw != "fluents" || real_kw != "real")
      throw DataError("expected fluents line");
  }
  for (std::size_t i = 0; i < n_fluents; ++i) {
    std::string l = next_line();
    std::istringstream is(l);
    std::string kw;
    std::size_t id;
    is >> kw >> id;
    if (kw != "f" || id != i) throw DataError("bad fluent table line: " + l);
    std::string rest;
    std::getline(is, rest);
    task.fluent_names.push_back(trim(rest));
  }
  std::size_t n_actions = 0;
  {
    std::istringstream is(next_line());
    std::string kw;
    is >> kw >> n_actions;
    if (kw != "actions") throw DataError("expected actions line");
  }
  for (std::size_t i = 0; i < n_actions; ++i) {
    std::string l = next_line();
    std::istringstream is(l);
    std::string kw, costkw;
    std::size_t id;
    GroundAction a;
    is >> kw >> id >> costkw >> a.cost;
    if (kw != "a" || id != i || costkw != "cost")
      throw DataError("bad action line: " + l);
    std::string rest;
    std::getline(is, rest);
    a.name = trim(rest);
    std::string pre_l = next_line();
    if (trim(pre_l).rfind("pre", 0) != 0) throw DataError("expected pre line");
    a.pre = detail::parse_id_list(pre_l, pre_l.find("pre") + 3);
    std::string add_l = next_line();
    if (trim(add_l).rfind("add", 0) != 0) throw DataError("expected add line");
    a.add = detail::parse_id_list(add_l, add_l.find("add") + 3);
    std::string del_l = next_line();
    if (trim(del_l).rfind("del", 0) != 0) throw DataError("expected del line");
    a.del = detail::parse_id_list(del_l, del_l.find("del") + 3);
    task.actions.push_back(std::move(a));
  }
  {
    std::string l = next_line();
    if (l.rfind("init", 0) != 0) throw DataError("expected init line");
    task.init_ids = detail::parse_id_list(l, 4);
  }
  {
    std::string l = next_line();
    if (l.rfind("goal", 0) != 0) throw DataError("expected goal line");
    task.goal_ids = detail::parse_id_list(l, 4);
  }
  if (trim(next_line()) != "end") throw DataError("expected end line");
  return task;
}

}  // namespace explan
