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

#include "ldlgen/experiment.hpp"

namespace ldlgen {

RetrievalSplit split_query_gallery(const Dataset& dataset,
                                   const Eigen::MatrixXd& features,
                                   std::optional<int> only_domain) {
  if (features.rows() != dataset.size()) {
    throw ShapeMismatch("one feature row per dataset sample required");
  }
  std::vector<Eigen::Index> q_rows, g_rows;
  for (Eigen::Index i = 0; i < dataset.size(); ++i) {
    if (only_domain && dataset.domain_ids[i] != *only_domain) continue;
    (dataset.view_ids[i] == 0 ? q_rows : g_rows).push_back(i);
  }
  RetrievalSplit split;
  split.query.resize(static_cast<Eigen::Index>(q_rows.size()), features.cols());
  split.gallery.resize(static_cast<Eigen::Index>(g_rows.size()), features.cols());
  for (size_t i = 0; i < q_rows.size(); ++i) {
    split.query.row(static_cast<Eigen::Index>(i)) = features.row(q_rows[i]);
    split.query_ids.push_back(dataset.class_ids[q_rows[i]]);
    split.query_views.push_back(dataset.view_ids[q_rows[i]]);
  }
  for (size_t i = 0; i < g_rows.size(); ++i) {
    split.gallery.row(static_cast<Eigen::Index>(i)) = features.row(g_rows[i]);
    split.gallery_ids.push_back(dataset.class_ids[g_rows[i]]);
    split.gallery_views.push_back(dataset.view_ids[g_rows[i]]);
  }
  return split;
}

ArmResult run_arm(const SyntheticSpec& data_spec, const TrainConfig& train_config,
                  TrainArm arm, uint64_t run_seed) {
  SyntheticSpec spec = data_spec;
  spec.seed = seed_stream(run_seed, "data");
  GeneratedData data = generate(spec);

  TrainConfig cfg = train_config;
  cfg.seed = run_seed;

  ArmResult result;
  result.arm = arm;
  result.run_seed = run_seed;
  result.train_output = train(cfg, data.source, data.source_layout, arm);

  const Eigen::MatrixXd target_features =
      extract_features(result.train_output.params, data.target.inputs);
  const RetrievalSplit split = split_query_gallery(data.target, target_features);
  result.target = retrieval_eval(split.query, split.query_ids, split.query_views,
                                 split.gallery, split.gallery_ids, split.gallery_views);

  if (data.source_layout.domain_count() >= 2) {
    const Eigen::MatrixXd source_features =
        extract_features(result.train_output.params, data.source.inputs);
    result.source_gap =
        domain_gap(source_features, data.source.domain_ids, data.source.class_ids);
  }
  if (result.train_output.engine) {
    const auto report = result.train_output.engine->similarity_report();
    double sim = 0.0, diff = 0.0;
    for (const auto& row : report) {
      double row_sum = 0.0;
      for (const auto& [d, s] : row.cross) row_sum += s;
      sim += row_sum / static_cast<double>(row.cross.size());
      diff += row.diff;
    }
    result.mean_cross_similarity = sim / static_cast<double>(report.size());
    result.mean_diff = diff / static_cast<double>(report.size());
  }
  return result;
}

std::vector<TrainArm> arms_of(Variant variant) {
  switch (variant) {
    case Variant::kBaseline: return {TrainArm::kBaseline};
    case Variant::kLdl1: return {TrainArm::kLdl1};
    case Variant::kLdl2: return {TrainArm::kLdl2};
    case Variant::kLdl3: return {TrainArm::kLdl3};
    case Variant::kOnehotCompare: return {TrainArm::kOneHot, TrainArm::kPinnedLdl};
  }
  return {};
}

}  // namespace ldlgen
