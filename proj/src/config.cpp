// Copyright (c) 2026 The ldlgen Authors. All Rights Reserved.
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

#include "ldlgen/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ldlgen {

namespace {

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected integer, got '" + value + "'");
  }
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected unsigned integer, got '" + value + "'");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw ConfigError(key + ": expected boolean, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key,
                                  const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      // dataset recipe
      {"source_domains", [](auto& c, auto& k, auto& v) { c.data.source_domains = parse_int(k, v); }},
      {"classes_per_domain",
       [](auto& c, auto& k, auto& v) {
         c.data.classes_per_domain.clear();
         for (const auto& tok : split_list(v)) {
           c.data.classes_per_domain.push_back(parse_int(k, tok));
         }
         if (c.data.classes_per_domain.empty()) throw ConfigError(k + ": empty list");
       }},
      {"samples_per_class", [](auto& c, auto& k, auto& v) { c.data.samples_per_class = parse_int(k, v); }},
      {"latent_dim", [](auto& c, auto& k, auto& v) { c.data.latent_dim = parse_int(k, v); }},
      {"input_dim", [](auto& c, auto& k, auto& v) { c.data.input_dim = parse_int(k, v); }},
      {"identity_scale", [](auto& c, auto& k, auto& v) { c.data.identity_scale = parse_real(k, v); }},
      {"within_noise", [](auto& c, auto& k, auto& v) { c.data.within_noise = parse_real(k, v); }},
      {"domain_shift", [](auto& c, auto& k, auto& v) { c.data.domain_shift = parse_real(k, v); }},
      {"views", [](auto& c, auto& k, auto& v) { c.data.views = parse_int(k, v); }},
      // training
      {"learning_rate", [](auto& c, auto& k, auto& v) { c.train.learning_rate = parse_real(k, v); }},
      {"decay_epochs",
       [](auto& c, auto& k, auto& v) {
         c.train.decay_epochs.clear();
         for (const auto& tok : split_list(v)) c.train.decay_epochs.push_back(parse_int(k, tok));
       }},
      {"decay_factor", [](auto& c, auto& k, auto& v) { c.train.decay_factor = parse_real(k, v); }},
      {"total_epochs", [](auto& c, auto& k, auto& v) { c.train.total_epochs = parse_int(k, v); }},
      {"momentum_m", [](auto& c, auto& k, auto& v) { c.train.momentum_m = parse_real(k, v); }},
      {"lambda", [](auto& c, auto& k, auto& v) { c.train.lambda = parse_real(k, v); }},
      {"ids_per_domain", [](auto& c, auto& k, auto& v) { c.train.ids_per_domain_per_batch = parse_int(k, v); }},
      {"images_per_id", [](auto& c, auto& k, auto& v) { c.train.images_per_id = parse_int(k, v); }},
      {"hidden_dim", [](auto& c, auto& k, auto& v) { c.train.hidden_dim = parse_int(k, v); }},
      {"feature_dim", [](auto& c, auto& k, auto& v) { c.train.feature_dim = parse_int(k, v); }},
      {"label_smoothing", [](auto& c, auto& k, auto& v) { c.train.label_smoothing = parse_real(k, v); }},
      {"triplet_margin", [](auto& c, auto& k, auto& v) { c.train.triplet_margin = parse_real(k, v); }},
      {"pinned_diagonal", [](auto& c, auto& k, auto& v) { c.train.pinned_diagonal = parse_real(k, v); }},
      {"variant", [](auto& c, auto&, auto& v) { c.train.variant = variant_from_string(v); }},
      // experiment
      {"seed", [](auto& c, auto& k, auto& v) { c.seed = parse_u64(k, v); }},
      {"repeats", [](auto& c, auto& k, auto& v) { c.repeats = parse_int(k, v); }},
      {"output_dir", [](auto& c, auto&, auto& v) { c.output_dir = v; }},
      {"variants",
       [](auto& c, auto& k, auto& v) {
         c.variants.clear();
         for (const auto& tok : split_list(v)) c.variants.push_back(variant_from_string(tok));
         if (c.variants.empty()) throw ConfigError(k + ": empty list");
       }},
      {"eval_sources", [](auto& c, auto& k, auto& v) { c.eval_sources = parse_bool(k, v); }},
      {"sweep",
       [](auto& c, auto& k, auto& v) {
         if (v != "m" && v != "lambda" && !v.empty()) {
           throw ConfigError(k + ": expected 'm' or 'lambda'");
         }
         c.sweep = v;
       }},
      {"sweep_values",
       [](auto& c, auto& k, auto& v) {
         c.sweep_values.clear();
         for (const auto& tok : split_list(v)) c.sweep_values.push_back(parse_real(k, tok));
       }},
  };
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  data.validate();
  train.validate();
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  if (!sweep.empty() && sweep_values.empty()) {
    throw ConfigError("sweep mode needs sweep_values");
  }
}

void apply_config_key(ExperimentConfig& config, const std::string& key,
                      const std::string& value) {
  auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(config, key, value);
}

void load_config_file(ExperimentConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // strip whitespace and comments
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    apply_config_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

std::vector<std::string> config_key_names() {
  std::vector<std::string> names;
  names.reserve(setters().size());
  for (const auto& [k, fn] : setters()) names.push_back(k);
  return names;
}

}  // namespace ldlgen
