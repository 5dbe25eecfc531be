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

#ifndef LDLGEN_SYNTH_DATA_HPP_
#define LDLGEN_SYNTH_DATA_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ldlgen/common.hpp"
#include "ldlgen/domain_layout.hpp"

namespace ldlgen {

/// Recipe for a multi-domain identity dataset with controlled domain shift.
/// `source_domains` training domains plus one held-out target domain; every
/// identity lives in exactly one domain, and the target's classes and style
/// map are never seen during training.
struct SyntheticSpec {
  int source_domains = 3;
  // One entry per domain (sources first, target last); a single entry is
  // broadcast to all source_domains + 1 domains.
  std::vector<int> classes_per_domain = {20};
  int samples_per_class = 24;
  int latent_dim = 16;
  int input_dim = 32;
  double identity_scale = 1.0;   // spread of per-class latent identities
  double within_noise = 0.25;    // latent noise within a class
  double domain_shift = 1.0;     // strength of per-domain style maps
  int views = 4;                 // camera stand-in; view 0 becomes the query split
  uint64_t seed = 0;

  std::vector<int> domain_class_counts() const;  // broadcast, length K+1
  void validate() const;                         // throws InvalidSpec
};

/// Immutable after generation; rows of `inputs` align with the id vectors.
struct Dataset {
  Eigen::MatrixXd inputs;
  std::vector<int> class_ids;
  std::vector<int> domain_ids;
  std::vector<int> view_ids;

  Eigen::Index size() const { return inputs.rows(); }
  int input_dim() const { return static_cast<int>(inputs.cols()); }
};

struct GeneratedData {
  Dataset source;
  DomainLayout source_layout;
  Dataset target;  // domain id = source_domains, class ids continue after the sources
};

// Deterministic under spec.seed. Per class a latent identity; per domain an
// affine style map (rotation-like linear part plus bias, both scaled by
// domain_shift); per sample latent noise and a per-view offset.
GeneratedData generate(const SyntheticSpec& spec);

// One epoch of PK batches: per source domain, ids_per_domain distinct
// classes x images_per_id samples each. Every class appears in at least one
// batch per epoch; samples are drawn without replacement until a class's
// pool runs out. Domains smaller than ids_per_domain contribute all their
// classes.
std::vector<std::vector<int>> pk_batches(const Dataset& dataset,
                                         const DomainLayout& layout,
                                         int ids_per_domain, int images_per_id,
                                         Rng& rng);

// CSV export/import: header row, then one sample per row (vector components,
// class_id, domain_id, view_id). Values round-trip exactly.
void save_dataset_csv(const Dataset& dataset, const std::string& path);
Dataset load_dataset_csv(const std::string& path);

}  // namespace ldlgen

#endif  // LDLGEN_SYNTH_DATA_HPP_
