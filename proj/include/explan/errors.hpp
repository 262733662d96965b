/*
 * include/explan/errors.hpp
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

#include <stdexcept>
#include <string>
#include <vector>

namespace explan {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- parsing ---

struct SyntaxError : Error {
  SyntaxError(const std::string& msg, int line, int col)
      : Error("syntax error at " + std::to_string(line) + ":" +
              std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  int line;
  int col;
};

struct UnsupportedFeature : Error {
  explicit UnsupportedFeature(const std::string& what)
      : Error("unsupported feature: " + what) {}
};

struct ArityMismatch : Error {
  explicit ArityMismatch(const std::string& what)
      : Error("arity mismatch: " + what) {}
};

struct UnknownPredicate : Error {
  explicit UnknownPredicate(const std::string& name)
      : Error("unknown predicate: " + name) {}
};

struct UnknownObject : Error {
  explicit UnknownObject(const std::string& name)
      : Error("unknown object: " + name) {}
};

struct InvalidModel : Error {
  explicit InvalidModel(const std::string& what)
      : Error("invalid model: " + what) {}
};

// --- grounding / execution ---

struct GroundingExplosion : Error {
  explicit GroundingExplosion(long long count, long long cap)
      : Error("grounding explosion: " + std::to_string(count) +
              " ground actions exceed cap " + std::to_string(cap)) {}
};

struct PreconditionViolation : Error {
  explicit PreconditionViolation(std::vector<std::string> missing_fluents)
      : Error(make_message(missing_fluents)), missing(std::move(missing_fluents)) {}
  std::vector<std::string> missing;

 private:
  static std::string make_message(const std::vector<std::string>& m) {
    std::string s = "precondition violation; missing:";
    for (const auto& f : m) s += " (" + f + ")";
    return s;
  }
};

struct StepFailure : Error {
  StepFailure(std::size_t index, std::vector<std::string> missing_fluents)
      : Error(make_message(index, missing_fluents)),
        index(index),
        missing(std::move(missing_fluents)) {}
  std::size_t index;
  std::vector<std::string> missing;

 private:
  static std::string make_message(std::size_t i,
                                  const std::vector<std::string>& m) {
    std::string s = "plan step " + std::to_string(i) + " inapplicable; missing:";
    for (const auto& f : m) s += " (" + f + ")";
    return s;
  }
};

struct GoalUnsatisfied : Error {
  explicit GoalUnsatisfied(std::vector<std::string> missing_fluents)
      : Error(make_message(missing_fluents)), missing(std::move(missing_fluents)) {}
  std::vector<std::string> missing;

 private:
  static std::string make_message(const std::vector<std::string>& m) {
    std::string s = "goal unsatisfied; missing:";
    for (const auto& f : m) s += " (" + f + ")";
    return s;
  }
};

struct UnknownAction : Error {
  explicit UnknownAction(const std::string& name)
      : Error("unknown ground action: (" + name + ")") {}
};

struct ModelMismatch : Error {
  explicit ModelMismatch(const std::string& what)
      : Error("robot/human model mismatch: " + what) {}
};

struct InvalidPlan : Error {
  explicit InvalidPlan(const std::string& what)
      : Error("invalid plan: " + what) {}
};

// --- search ---

struct Unsolvable : Error {
  Unsolvable() : Error("task is unsolvable") {}
};

struct ResourceLimit : Error {
  explicit ResourceLimit(long long budget)
      : Error("search exceeded node budget " + std::to_string(budget)) {}
};

struct EmptyExpectedSet : Error {
  EmptyExpectedSet() : Error("expected plan set is empty") {}
};

struct NoSolutionWithinBound : Error {
  explicit NoSolutionWithinBound(long long max_cost)
      : Error("no solution within cost bound " + std::to_string(max_cost)) {}
};

struct EnumerationCapExceeded : Error {
  explicit EnumerationCapExceeded(long long cap)
      : Error("plan enumeration exceeded cap " + std::to_string(cap)) {}
};

// --- learning ---

struct DegenerateDesign : Error {
  DegenerateDesign() : Error("singular normal equations (lambda=0 on rank-deficient data)") {}
};

struct ZeroVariance : Error {
  ZeroVariance() : Error("targets have zero variance; R^2 undefined") {}
};

struct TooFewSamples : Error {
  TooFewSamples(std::size_t n, std::size_t need)
      : Error("too few samples: " + std::to_string(n) + " < " + std::to_string(need)) {}
};

struct MalformedModel : Error {
  explicit MalformedModel(const std::string& what)
      : Error("malformed model: " + what) {}
};

struct UncoveredAction : Error {
  explicit UncoveredAction(const std::string& name)
      : Error("no expectation rule covers action: (" + name + ")") {}
};

struct DataError : Error {
  explicit DataError(const std::string& what) : Error(what) {}
};

}  // namespace explan
