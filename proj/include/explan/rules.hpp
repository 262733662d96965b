/*
 * include/explan/rules.hpp
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

#include <string>
#include <vector>

#include "explan/errors.hpp"
#include "explan/ground.hpp"
#include "explan/text.hpp"

namespace explan {

// Declarative expectation rules: a synthetic stand-in for human raters. Each
// action occurrence in a plan is labeled explicable (1) or not (0); the plan
// score is the fraction of explicable actions.
//
// Rule file grammar (one rule per line, '#' comments, first match wins):
//   always "<glob>"
//   never "<glob>"
//   requires-before "<glob>" "<glob>"   explicable iff some earlier action
//                                       matches the second glob
//   forbids-before "<glob>" "<glob>"    explicable iff no earlier action
//                                       matches the second glob
//   forbids-during "<glob>" "<open>" "<close>"
//                                       inexplicable while more openers than
//                                       closers have occurred earlier
// Globs match the full ground action name ("pickup cup1 kitchen"), case
// insensitively, with '*' wildcards; '|' separates alternatives.

namespace glob {

inline bool match_one(const std::string& pattern, const std::string& text) {
  // iterative glob with '*' backtracking
  std::size_t p = 0, t = 0, star = std::string::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() &&
        (pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

inline bool match(const std::string& patterns, const std::string& name) {
  const std::string text = to_lower(name);
  for (const std::string& alt : split(patterns, '|'))
    if (match_one(to_lower(trim(alt)), text)) return true;
  return false;
}

}  // namespace glob

struct ExpectationRule {
  enum class Kind { kAlways, kNever, kRequiresBefore, kForbidsBefore, kForbidsDuring };
  Kind kind = Kind::kAlways;
  std::string subject;
  std::string ref;    // earlier-occurrence glob / opener
  std::string close;  // closer for forbids-during
};

class ExpectationRules {
 public:
  // 1/0 labels per action occurrence; UncoveredAction if a name matches no rule.
  std::vector<int> label(const std::vector<std::string>& names) const {
    std::vector<int> labels;
    for (std::size_t i = 0; i < names.size(); ++i) {
      const ExpectationRule* rule = nullptr;
      for (const auto& r : rules_) {
        if (glob::match(r.subject, names[i])) {
          rule = &r;
          break;
        }
      }
      if (!rule) throw UncoveredAction(names[i]);
      labels.push_back(evaluate(*rule, names, i) ? 1 : 0);
    }
    return labels;
  }

  double score(const std::vector<std::string>& names) const {
    if (names.empty()) return 1.0;  // nothing to find inexplicable
    const std::vector<int> labels = label(names);
    int explicable = 0;
    for (int l : labels) explicable += l;
    return static_cast<double>(explicable) / static_cast<double>(names.size());
  }

  double score(const GroundTask& task, const Plan& plan) const {
    std::vector<std::string> names;
    for (int aid : plan.actions) names.push_back(task.actions.at(aid).name);
    return score(names);
  }

  static ExpectationRules parse(const std::string& text) {
    ExpectationRules rs;
    int lineno = 0;
    for (const std::string& raw : split(text, '\n')) {
      ++lineno;
      std::string line = trim(raw);
      if (line.empty() || line[0] == '#') continue;
      std::istringstream is(line);
      std::string verb;
      is >> verb;
      auto globs = parse_quoted(line, lineno);
      ExpectationRule r;
      if (verb == "always" || verb == "never") {
        if (globs.size() != 1)
          throw DataError("rules line " + std::to_string(lineno) +
                          ": expected one quoted glob");
        r.kind = verb == "always" ? ExpectationRule::Kind::kAlways
                                  : ExpectationRule::Kind::kNever;
        r.subject = globs[0];
      } else if (verb == "requires-before" || verb == "forbids-before") {
        if (globs.size() != 2)
          throw DataError("rules line " + std::to_string(lineno) +
                          ": expected two quoted globs");
        r.kind = verb == "requires-before"
                     ? ExpectationRule::Kind::kRequiresBefore
                     : ExpectationRule::Kind::kForbidsBefore;
        r.subject = globs[0];
        r.ref = globs[1];
      } else if (verb == "forbids-during") {
        if (globs.size() != 3)
          throw DataError("rules line " + std::to_string(lineno) +
                          ": expected three quoted globs");
        r.kind = ExpectationRule::Kind::kForbidsDuring;
        r.subject = globs[0];
        r.ref = globs[1];
        r.close = globs[2];
      } else {
        throw DataError("rules line " + std::to_string(lineno) +
                        ": unknown verb '" + verb + "'");
      }
      rs.rules_.push_back(std::move(r));
    }
    return rs;
  }

  static ExpectationRules load(const std::string& path) {
    return parse(read_file(path));
  }

  std::size_t size() const { return rules_.size(); }

 private:
  static std::vector<std::string> parse_quoted(const std::string& line,
                                               int lineno) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
      if (line[i] == '"') {
        auto end = line.find('"', i + 1);
        if (end == std::string::npos)
          throw DataError("rules line " + std::to_string(lineno) +
                          ": unterminated quote");
        out.push_back(line.substr(i + 1, end - i - 1));
        i = end + 1;
      } else {
        ++i;
      }
    }
    return out;
  }

  static bool evaluate(const ExpectationRule& r,
                       const std::vector<std::string>& names, std::size_t pos) {
    switch (r.kind) {
      case ExpectationRule::Kind::kAlways:
        return true;
      case ExpectationRule::Kind::kNever:
        return false;
      case ExpectationRule::Kind::kRequiresBefore:
        for (std::size_t j = 0; j < pos; ++j)
          if (glob::match(r.ref, names[j])) return true;
        return false;
      case ExpectationRule::Kind::kForbidsBefore:
        for (std::size_t j = 0; j < pos; ++j)
          if (glob::match(r.ref, names[j])) return false;
        return true;
      case ExpectationRule::Kind::kForbidsDuring: {
        int open = 0;
        for (std::size_t j = 0; j < pos; ++j) {
          if (glob::match(r.ref, names[j])) ++open;
          if (glob::match(r.close, names[j])) --open;
        }
        return open <= 0;
      }
    }
    return true;
  }

  std::vector<ExpectationRule> rules_;
};

// Score per the paper's protocol stand-in: per-action 0/1 labels, plan score
// = explicable count / plan length.
inline double plan_score_synthetic(const GroundTask& task, const Plan& plan,
                                   const ExpectationRules& rules) {
  return rules.score(task, plan);
}

}  // namespace explan
