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

#ifndef LDLGEN_EXPERIMENT_HPP_
#define LDLGEN_EXPERIMENT_HPP_

#include <optional>
#include <vector>

#include "ldlgen/eval.hpp"
#include "ldlgen/model.hpp"
#include "ldlgen/synth_data.hpp"

namespace ldlgen {

/// Query/gallery split of one evaluation set: samples with view 0 become the
/// queries, everything else the gallery.
struct RetrievalSplit {
  Eigen::MatrixXd query, gallery;
  std::vector<int> query_ids, query_views, gallery_ids, gallery_views;
};

RetrievalSplit split_query_gallery(const Dataset& dataset,
                                   const Eigen::MatrixXd& features,
                                   std::optional<int> only_domain = std::nullopt);

/// Everything the comparisons need from one generate->train->evaluate run.
struct ArmResult {
  TrainArm arm;
  uint64_t run_seed = 0;
  RetrievalScores target;           // retrieval on the held-out domain
  DomainGap source_gap;             // centroid diagnostic on source features
  double mean_cross_similarity = 0; // tracking-matrix aggregate over classes
  double mean_diff = 0;
  TrainOutput train_output;
};

// Regenerates the dataset from the run seed, trains the arm, evaluates the
// target split and the source-feature domain gap. Runs sharing a seed share
// data, parameter init and batch order, so arm comparisons are paired.
ArmResult run_arm(const SyntheticSpec& data_spec, const TrainConfig& train_config,
                  TrainArm arm, uint64_t run_seed);

// The concrete training runs a variant stands for.
std::vector<TrainArm> arms_of(Variant variant);

}  // namespace ldlgen

#endif  // LDLGEN_EXPERIMENT_HPP_
