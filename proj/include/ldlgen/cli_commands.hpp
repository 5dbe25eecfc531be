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

#ifndef LDLGEN_CLI_COMMANDS_HPP_
#define LDLGEN_CLI_COMMANDS_HPP_

#include <iosfwd>
#include <string>

#include "ldlgen/config.hpp"

namespace ldlgen {

// Subcommand bodies, shared by the executable and the tests. All take a
// fully resolved config, throw ldlgen errors on failure and log progress to
// `log` (pass a null stream to silence).

// Writes source.csv, target.csv and layout.json into output_dir. Refuses to
// overwrite an existing dataset unless force is set.
void cmd_generate(const ExperimentConfig& config, bool force, std::ostream& log);

// Trains every (variant, repeat) against the generated dataset; writes a
// checkpoint, a history file and final matrix snapshots per run.
void cmd_train(const ExperimentConfig& config, std::ostream& log);

// Evaluates stored checkpoints on the held-out target (and per source domain
// when eval_sources is set); writes one report file per run.
void cmd_eval(const ExperimentConfig& config, std::ostream& log);

// Paired comparison across the configured variants and repeats, regenerating
// data per seed. Writes ablation.csv / ablation.json / similarity_table.csv,
// or a sweep CSV when config.sweep is set.
void cmd_ablate(const ExperimentConfig& config, std::ostream& log);

// With a matrix path: prints the per-class cross-domain similarity table for
// a saved tracking-matrix snapshot. Without one: summarizes a previous
// ablate run from output_dir.
void cmd_report(const ExperimentConfig& config, const std::string& matrix_path,
                std::ostream& out);

}  // namespace ldlgen

#endif  // LDLGEN_CLI_COMMANDS_HPP_
