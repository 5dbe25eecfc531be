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

#ifndef LDLGEN_EVAL_HPP_
#define LDLGEN_EVAL_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldlgen/common.hpp"

namespace ldlgen {

struct RetrievalScores {
  double map = 0.0;
  double rank1 = 0.0;
  double rank5 = 0.0;
  double rank10 = 0.0;
};

/// Ranks the gallery by Euclidean distance per query. Gallery entries
/// sharing both the id and the view of the query are excluded (same-camera
/// rule). mAP is the mean of per-query average precision; Rank-k the
/// fraction of queries with a correct match in the top k. Every query must
/// have at least one valid match.
RetrievalScores retrieval_eval(const Eigen::MatrixXd& query_features,
                               const std::vector<int>& query_ids,
                               const std::vector<int>& query_views,
                               const Eigen::MatrixXd& gallery_features,
                               const std::vector<int>& gallery_ids,
                               const std::vector<int>& gallery_views);

struct DomainGap {
  double between = 0.0;  // mean pairwise distance of domain centroids
  double within = 0.0;   // mean pairwise class-centroid distance inside a domain
  double ratio = 0.0;    // between / within, 0 when within vanishes
};

DomainGap domain_gap(const Eigen::MatrixXd& features,
                     const std::vector<int>& domain_ids,
                     const std::vector<int>& class_ids);

// CSV with columns f0..f{F-1},class_id,domain_id.
void feature_dump(const Eigen::MatrixXd& features, const std::vector<int>& class_ids,
                  const std::vector<int>& domain_ids, const std::string& path);

struct EvalReport {
  RetrievalScores retrieval;
  DomainGap gap;
};

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& doc);

}  // namespace ldlgen

#endif  // LDLGEN_EVAL_HPP_
