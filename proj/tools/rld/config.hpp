// Copyright 2026 The logit-refine Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Flat key=value run configuration for the rld tool.
//
// Lines are "key = value"; everything after '#' is a comment. Every key the
// tool understands has a default (possibly empty), so the resolved table is a
// complete description of a run and can be echoed next to its outputs.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rld/dataset.hpp"
#include "rld/losses.hpp"
#include "rld/mlp.hpp"
#include "rld/train.hpp"

namespace rld::cli {

class RunConfig {
 public:
  /// All keys at their defaults.
  RunConfig();

  /// Parses config text over the defaults. Unknown or repeated keys and
  /// malformed lines throw ConfigError naming the line.
  static RunConfig parse(std::string_view text, std::string_view source = "<config>");
  static RunConfig load(const std::filesystem::path& path);

  void set(const std::string& key, std::string value);
  const std::string& raw(const std::string& key) const;
  bool is_set(const std::string& key) const;

  /// Throws ConfigError "missing required config key '<key>'" when empty.
  const std::string& require(const std::string& key) const;

  std::string text() const;       // sorted "key=value" lines
  std::uint64_t hash() const;     // over every key except output.dir

  DatasetSpec dataset_spec() const;
  MlpSpec teacher_spec() const;
  MlpSpec student_spec(std::uint64_t init_seed) const;
  TrainConfig train_config() const;
  DistillSpec distill_spec() const;
  std::vector<std::uint64_t> seeds() const;
  std::vector<double> doubles(const std::string& key) const;

  std::uint32_t u32(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  double real(const std::string& key) const;
  bool flag(const std::string& key) const;

 private:
  std::map<std::string, std::string> values_;
};

/// Keys recognised by RunConfig, sorted.
std::vector<std::string> known_keys();

}  // namespace rld::cli
