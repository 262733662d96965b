/*
 * include/explan/manifest.hpp
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

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "explan/text.hpp"
#include "explan/version.hpp"

namespace explan {

inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

// Provenance record written next to every set of outputs: which subcommand
// ran, over which inputs (content digests), with which seeds, producing what.
class RunManifest {
 public:
  explicit RunManifest(std::string subcommand)
      : subcommand_(std::move(subcommand)),
        start_(std::chrono::steady_clock::now()) {}

  void add_input(const std::string& path) {
    inputs_.push_back({path, fnv1a_hex(read_file(path))});
  }
  void add_output(const std::string& path) { outputs_.push_back(path); }
  void set_seed(std::uint64_t seed) {
    has_seed_ = true;
    seed_ = seed;
  }

  void write(const std::string& path) const {
    nlohmann::ordered_json j;
    j["tool"] = "explan";
    j["version"] = kVersion;
    j["subcommand"] = subcommand_;
    if (has_seed_) j["seed"] = seed_;
    j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [p, digest] : inputs_) {
      nlohmann::ordered_json e;
      e["path"] = p;
      e["fnv1a64"] = digest;
      j["inputs"].push_back(std::move(e));
    }
    j["outputs"] = outputs_;
    j["wall_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start_)
            .count();
    write_file(path, j.dump(2) + "\n");
  }

 private:
  std::string subcommand_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::string> outputs_;
  bool has_seed_ = false;
  std::uint64_t seed_ = 0;
};

}  // namespace explan
