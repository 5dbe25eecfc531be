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

#ifndef LDLGEN_CONFIG_HPP_
#define LDLGEN_CONFIG_HPP_

#include <string>
#include <vector>

#include "ldlgen/model.hpp"
#include "ldlgen/synth_data.hpp"

namespace ldlgen {

/// Everything one experiment needs: dataset recipe, training setup, output
/// location, the variant list for ablations and the seed protocol. Values
/// resolve as defaults < config file < command-line flags.
struct ExperimentConfig {
  SyntheticSpec data;
  TrainConfig train;
  uint64_t seed = 0;  // root seed; repeat r runs with seed + r
  int repeats = 5;
  std::string output_dir = "out";
  std::vector<Variant> variants = {Variant::kBaseline, Variant::kLdl1, Variant::kLdl3};
  bool eval_sources = false;
  std::string sweep;                 // "", "m" or "lambda" (ablate sweep mode)
  std::vector<double> sweep_values;  // values the sweep visits

  void validate() const;  // throws ConfigError
};

// Applies one `key=value` assignment. Unknown keys and malformed values
// throw ConfigError naming the key.
void apply_config_key(ExperimentConfig& config, const std::string& key,
                      const std::string& value);

// Flat key=value file; blank lines and lines starting with '#' are skipped.
void load_config_file(ExperimentConfig& config, const std::string& path);

// The documented key list (for --help and the README).
std::vector<std::string> config_key_names();

}  // namespace ldlgen

#endif  // LDLGEN_CONFIG_HPP_
