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

#include "rld/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "rld/error.hpp"

namespace rld::cli {
namespace {

// Empty default means "no default": such keys are only read by commands that
// require them, or are derived from the method (distill.alpha / distill.beta).
const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> table = {
      {"dataset.file", ""},
      {"dataset.num_classes", "10"},
      {"dataset.dim", "32"},
      {"dataset.train_per_class", "500"},
      {"dataset.val_per_class", "100"},
      {"dataset.class_sep", "2"},
      {"dataset.noise_sigma", "1"},
      {"dataset.seed", "7"},
      {"teacher.checkpoint", ""},
      {"teacher.widths", "32,128,128,10"},
      {"teacher.init_seed", "1"},
      {"teacher.shuffle_seed", "1"},
      {"student.widths", "32,16,10"},
      {"student.checkpoint", ""},
      {"train.batch_size", "64"},
      {"train.epochs", "60"},
      {"train.lr", "0.05"},
      {"train.lr_decay_epochs", "38,45,53"},
      {"train.lr_decay_factor", "0.1"},
      {"train.momentum", "0.9"},
      {"train.weight_decay", "0.0005"},
      {"train.teacher_cache", "false"},
      {"distill.method", "RLD"},
      {"distill.alpha", ""},
      {"distill.beta", ""},
      {"distill.tau", "4"},
      {"distill.mask", "GE"},
      {"distill.kd_weight", "1"},
      {"distill.lr_mix", "0.5"},
      {"grid.alphas", "1"},
      {"grid.betas", "2,4,8,16"},
      {"grid.taus", "2,3,4,5"},
      {"seeds", "0,1,2"},
      {"output.dir", "rld-out"},
      {"eval.model", ""},
      {"eval.reference", ""},
      {"check_grads.instances", "50"},
      {"check_grads.seed", "24301"},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, std::string_view text,
                            std::string_view what) {
  throw Error(ErrorCode::kConfigError, "config key '" + key + "': '" +
                                           std::string(text) + "' is not " +
                                           std::string(what));
}

template <typename T>
T parse_number(const std::string& key, std::string_view text, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    bad_value(key, text, what);
  }
  return value;
}

std::vector<std::uint32_t> widths(const std::string& key, std::string_view text) {
  std::vector<std::uint32_t> out;
  for (std::string_view item : split_list(text)) {
    out.push_back(parse_number<std::uint32_t>(key, item, "a list of layer widths"));
  }
  return out;
}

}  // namespace

std::vector<std::string> known_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, v] : defaults()) keys.push_back(k);
  return keys;
}

RunConfig::RunConfig() : values_(defaults()) {}

RunConfig RunConfig::parse(std::string_view text, std::string_view source) {
  RunConfig cfg;
  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfigError, where + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!defaults().contains(key)) {
      throw Error(ErrorCode::kConfigError, where + ": unknown config key '" + key + "'");
    }
    if (auto [it, fresh] = seen.emplace(key, line_no); !fresh) {
      throw Error(ErrorCode::kConfigError, where + ": key '" + key +
                                               "' already set on line " +
                                               std::to_string(it->second));
    }
    cfg.values_[key] = std::string(trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

void RunConfig::set(const std::string& key, std::string value) {
  if (!defaults().contains(key)) {
    throw Error(ErrorCode::kConfigError, "unknown config key '" + key + "'");
  }
  values_[key] = std::move(value);
}

const std::string& RunConfig::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw Error(ErrorCode::kConfigError, "unknown config key '" + key + "'");
  }
  return it->second;
}

bool RunConfig::is_set(const std::string& key) const { return !raw(key).empty(); }

const std::string& RunConfig::require(const std::string& key) const {
  const std::string& v = raw(key);
  if (v.empty()) {
    throw Error(ErrorCode::kConfigError, "missing required config key '" + key + "'");
  }
  return v;
}

std::string RunConfig::text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t RunConfig::hash() const {
  std::string text;
  for (const auto& [k, v] : values_) {
    if (k != "output.dir") text += k + "=" + v + "\n";
  }
  return fnv1a64(text);
}

std::uint32_t RunConfig::u32(const std::string& key) const {
  return parse_number<std::uint32_t>(key, require(key), "an unsigned 32-bit integer");
}

std::uint64_t RunConfig::u64(const std::string& key) const {
  return parse_number<std::uint64_t>(key, require(key), "an unsigned 64-bit integer");
}

double RunConfig::real(const std::string& key) const {
  return parse_number<double>(key, require(key), "a real number");
}

bool RunConfig::flag(const std::string& key) const {
  const std::string& v = require(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "true or false");
}

std::vector<double> RunConfig::doubles(const std::string& key) const {
  std::vector<double> out;
  for (std::string_view item : split_list(raw(key))) {
    out.push_back(parse_number<double>(key, item, "a list of real numbers"));
  }
  if (out.empty()) {
    throw Error(ErrorCode::kConfigError, "config key '" + key + "' must not be empty");
  }
  return out;
}

std::vector<std::uint64_t> RunConfig::seeds() const {
  std::vector<std::uint64_t> out;
  for (std::string_view item : split_list(raw("seeds"))) {
    out.push_back(parse_number<std::uint64_t>("seeds", item, "a list of seeds"));
  }
  if (out.empty()) throw Error(ErrorCode::kConfigError, "config key 'seeds' must not be empty");
  return out;
}

DatasetSpec RunConfig::dataset_spec() const {
  DatasetSpec spec;
  spec.num_classes = u32("dataset.num_classes");
  spec.dim = u32("dataset.dim");
  spec.train_per_class = u32("dataset.train_per_class");
  spec.val_per_class = u32("dataset.val_per_class");
  spec.class_sep = real("dataset.class_sep");
  spec.noise_sigma = real("dataset.noise_sigma");
  spec.seed = u64("dataset.seed");
  spec.validate();
  return spec;
}

MlpSpec RunConfig::teacher_spec() const {
  MlpSpec spec{widths("teacher.widths", raw("teacher.widths")), Activation::kReLU,
               u64("teacher.init_seed")};
  spec.validate();
  return spec;
}

MlpSpec RunConfig::student_spec(std::uint64_t init_seed) const {
  MlpSpec spec{widths("student.widths", raw("student.widths")), Activation::kReLU,
               init_seed};
  spec.validate();
  return spec;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig cfg;
  cfg.batch_size = u32("train.batch_size");
  cfg.epochs = u32("train.epochs");
  cfg.lr = real("train.lr");
  cfg.lr_decay_epochs.clear();
  for (std::string_view item : split_list(raw("train.lr_decay_epochs"))) {
    cfg.lr_decay_epochs.push_back(
        parse_number<std::uint32_t>("train.lr_decay_epochs", item, "a list of epochs"));
  }
  cfg.lr_decay_factor = real("train.lr_decay_factor");
  cfg.momentum = real("train.momentum");
  cfg.weight_decay = real("train.weight_decay");
  cfg.shuffle_seed = u64("teacher.shuffle_seed");
  cfg.cache_teacher_logits = flag("train.teacher_cache");
  cfg.validate();
  return cfg;
}

DistillSpec RunConfig::distill_spec() const {
  DistillSpec spec = DistillSpec::defaults_for(parse_method(require("distill.method")));
  if (is_set("distill.alpha")) spec.alpha = real("distill.alpha");
  if (is_set("distill.beta")) spec.beta = real("distill.beta");
  spec.tau = real("distill.tau");
  spec.mask_strategy = parse_mask_strategy(require("distill.mask"));
  spec.kd_weight = real("distill.kd_weight");
  spec.lr_mix = real("distill.lr_mix");
  spec.validate();
  return spec;
}

}  // namespace rld::cli
