/*
 * include/explan/model_io.hpp
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

#include <cmath>
#include <string>

#include <json.hpp>

#include "explan/errors.hpp"
#include "explan/regression.hpp"
#include "explan/text.hpp"

namespace explan {

// Versioned model file, documented in docs/model-format.md.

namespace detail {

inline nlohmann::ordered_json tree_to_json(const Tree& t) {
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const TreeNode& n : t.nodes) {
    nlohmann::ordered_json j;
    if (n.leaf) {
      j["value"] = n.value;
    } else {
      j["feature"] = n.feature;
      j["threshold"] = n.threshold;
      j["left"] = n.left;
      j["right"] = n.right;
    }
    nodes.push_back(std::move(j));
  }
  return nodes;
}

inline Tree tree_from_json(const nlohmann::json& nodes) {
  Tree t;
  if (!nodes.is_array() || nodes.empty())
    throw MalformedModel("tree needs a nonempty node array");
  const int n = static_cast<int>(nodes.size());
  for (int i = 0; i < n; ++i) {
    const auto& j = nodes[i];
    TreeNode node;
    if (j.contains("value")) {
      node.leaf = true;
      node.value = j.at("value").get<double>();
    } else {
      node.leaf = false;
      node.feature = j.at("feature").get<int>();
      node.threshold = j.at("threshold").get<double>();
      node.left = j.at("left").get<int>();
      node.right = j.at("right").get<int>();
      if (node.feature < 0 || node.feature >= kNumFeatures)
        throw MalformedModel("split feature out of range");
      // children after parent: rules out cycles
      if (node.left <= i || node.left >= n || node.right <= i ||
          node.right >= n)
        throw MalformedModel("tree child indices must follow the parent");
    }
    t.nodes.push_back(node);
  }
  return t;
}

}  // namespace detail

inline std::string serialize_model(const RegressionModel& m) {
  nlohmann::ordered_json j;
  j["format"] = "explan-model";
  j["version"] = 1;
  j["kind"] = to_string(m.kind);
  if (!std::isnan(m.cv_r2)) j["cv_r2"] = m.cv_r2;
  switch (m.kind) {
    case ModelKind::kRidge:
      j["lambda"] = m.ridge.lambda;
      j["intercept"] = m.ridge.intercept;
      j["weights"] = m.ridge.weights;
      break;
    case ModelKind::kTree:
      j["max_depth"] = m.tree_hyper.max_depth;
      j["min_split"] = m.tree_hyper.min_split;
      j["nodes"] = detail::tree_to_json(m.tree);
      break;
    case ModelKind::kForest:
      j["n_trees"] = m.forest_hyper.n_trees;
      j["max_depth"] = m.forest_hyper.max_depth;
      j["min_split"] = m.forest_hyper.min_split;
      j["feature_subset"] = m.forest_hyper.feature_subset;
      j["bootstrap"] = m.forest_hyper.bootstrap;
      j["seed"] = m.forest_hyper.seed;
      j["trees"] = nlohmann::ordered_json::array();
      for (const Tree& t : m.forest) j["trees"].push_back(detail::tree_to_json(t));
      break;
  }
  return j.dump(2) + "\n";
}

inline RegressionModel deserialize_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedModel(e.what());
  }
  try {
    if (j.at("format") != "explan-model" || j.at("version") != 1)
      throw MalformedModel("expected explan-model version 1");
    RegressionModel m;
    m.kind = model_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("cv_r2")) m.cv_r2 = j["cv_r2"].get<double>();
    switch (m.kind) {
      case ModelKind::kRidge: {
        m.ridge.lambda = j.at("lambda").get<double>();
        m.ridge.intercept = j.at("intercept").get<double>();
        auto w = j.at("weights");
        if (!w.is_array() || w.size() != kNumFeatures)
          throw MalformedModel("ridge needs 3 weights");
        for (int i = 0; i < kNumFeatures; ++i)
          m.ridge.weights[i] = w[i].get<double>();
        break;
      }
      case ModelKind::kTree:
        m.tree_hyper.max_depth = j.at("max_depth").get<int>();
        m.tree_hyper.min_split = j.at("min_split").get<int>();
        m.tree = detail::tree_from_json(j.at("nodes"));
        break;
      case ModelKind::kForest:
        m.forest_hyper.n_trees = j.at("n_trees").get<int>();
        m.forest_hyper.max_depth = j.at("max_depth").get<int>();
        m.forest_hyper.min_split = j.at("min_split").get<int>();
        m.forest_hyper.feature_subset = j.at("feature_subset").get<int>();
        m.forest_hyper.bootstrap = j.at("bootstrap").get<bool>();
        m.forest_hyper.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& t : j.at("trees"))
          m.forest.push_back(detail::tree_from_json(t));
        if (m.forest.empty()) throw MalformedModel("forest has no trees");
        break;
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedModel(e.what());
  }
}

inline RegressionModel load_model(const std::string& path) {
  return deserialize_model(read_file(path));
}

inline void save_model(const RegressionModel& m, const std::string& path) {
  write_file(path, serialize_model(m));
}

}  // namespace explan
