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

#ifndef LDLGEN_LDL_ENGINE_HPP_
#define LDLGEN_LDL_ENGINE_HPP_

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ldlgen/domain_layout.hpp"

namespace ldlgen {

/// How the per-epoch commit turns the tracking matrix into label
/// distributions:
///   kRelationOnly   — plain copy (class-relation information only).
///   kZeroSameDomain — same-domain entries zeroed, cross-domain entries
///                     rescaled by one factor, diagonal kept.
///   kEqualAttention — full method: zeroing plus per-domain redistribution so
///                     every cross domain receives mass proportional to its
///                     class count.
enum class CommitVariant { kRelationOnly, kZeroSameDomain, kEqualAttention };

struct ClassSimilarityRow {
  int class_id = 0;
  int domain_id = 0;
  // (cross domain, mean tracking-matrix mass on that domain's classes)
  std::vector<std::pair<int, double>> cross;
  double diff = 0.0;  // max - min over cross
};

/// Maintains the pair of row-stochastic C x C matrices at the heart of the
/// method: a tracking matrix refreshed every iteration from classifier
/// softmax outputs, and a label-distribution set committed from it once per
/// epoch. Rows of both always sum to 1 within 1e-9 and stay nonnegative.
class LdlEngine {
 public:
  // Both matrices start uniform at 1/C. Requires C >= 2 and K >= 2 (the
  // cross-domain average divides by K - 1).
  explicit LdlEngine(DomainLayout layout);

  const DomainLayout& layout() const { return layout_; }
  const Eigen::MatrixXd& tracking() const { return tracking_; }
  const Eigen::MatrixXd& distributions() const { return distributions_; }
  int committed_epoch() const { return committed_epoch_; }

  // Row `class_index` of the tracking matrix becomes the convex combination
  // (1 - m) * row + m * prediction. The prediction must be a probability
  // vector (sum within 1e-6 of 1, entries >= 0); it is renormalized exactly
  // so row sums stay at 1.
  void momentum_update(int class_index, const Eigen::VectorXd& prediction, double m);

  // One momentum step per distinct class in the batch, applied to the mean
  // of that class's prediction vectors. Rows of absent classes are untouched.
  void batch_update(std::span<const int> classes, const Eigen::MatrixXd& predictions,
                    double m);

  // Mean mass the committed row of `class_index` puts on the classes of a
  // cross domain. Anchored to the last commit (uniform before the first).
  double domain_similarity(int class_index, int domain) const;

  // Average of domain_similarity over all cross domains. Diagnostic only:
  // the committed distributions do not depend on it.
  double mean_cross_similarity(int class_index) const;

  // Copies the tracking matrix into the label-distribution set and applies
  // the variant's revision row by row. `pinned_diagonal` overrides each
  // row's own-class value before redistribution (the fixed-identity
  // comparison protocol).
  void commit_epoch(CommitVariant variant,
                    std::optional<double> pinned_diagonal = std::nullopt);

  // Mass each cross domain holds in the committed row of `class_index`.
  // After an equal-attention commit this equals (1 - l_ii) * N_d / sum N_d'.
  std::map<int, double> per_domain_mass(int class_index) const;

  // Live per-class cross-domain similarities from the tracking matrix, with
  // the max-min spread per class.
  std::vector<ClassSimilarityRow> similarity_report() const;

  // Replaces the tracking matrix with externally provided rows. Each row
  // must be a probability vector; values are renormalized exactly.
  void load_tracking(const Eigen::MatrixXd& matrix);

 private:
  void check_prediction(const Eigen::VectorXd& p) const;

  DomainLayout layout_;
  Eigen::MatrixXd tracking_;        // M_T, refreshed every iteration
  Eigen::MatrixXd distributions_;   // M_L, rebuilt at each commit
  Eigen::MatrixXd committed_base_;  // tracking snapshot the last commit saw
  int committed_epoch_ = 0;
};

// The same per-class cross-domain table for any row-stochastic matrix, e.g.
// one loaded from a snapshot file.
std::vector<ClassSimilarityRow> similarity_table(const Eigen::MatrixXd& matrix,
                                                 const DomainLayout& layout);

// CSV snapshot of one matrix: two comment lines carrying the class count and
// the class-to-domain assignment, then one row per class.
void save_matrix_csv(const Eigen::MatrixXd& matrix, const DomainLayout& layout,
                     const std::string& path);
std::pair<Eigen::MatrixXd, DomainLayout> load_matrix_csv(const std::string& path);

}  // namespace ldlgen

#endif  // LDLGEN_LDL_ENGINE_HPP_
