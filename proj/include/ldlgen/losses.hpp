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

#ifndef LDLGEN_LOSSES_HPP_
#define LDLGEN_LOSSES_HPP_

#include <Eigen/Dense>
#include <vector>

#include "ldlgen/common.hpp"

namespace ldlgen {

// All functions here are pure; they are safe to call concurrently.

/// Numerically stabilized softmax (max subtraction). Entries are strictly
/// positive and sum to 1 within 1e-12.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

struct ScalarLoss {
  double value = 0.0;
  Eigen::VectorXd grad;  // with respect to the logits behind `probs`
};

/// Soft-target cross entropy -sum_i l_i log p_i, with p clamped below at
/// 1e-12. Because the target sums to 1, the logit gradient is p - l.
ScalarLoss soft_cross_entropy(const Eigen::VectorXd& probs, const Eigen::VectorXd& target);

/// Cross entropy against the label-smoothed one-hot target
/// y_k = (1 - eps) [k == true_class] + eps / C.
ScalarLoss smoothed_cross_entropy(const Eigen::VectorXd& probs, int true_class,
                                  double epsilon);

struct TripletLoss {
  double value = 0.0;
  Eigen::MatrixXd grad;  // with respect to the feature rows
};

/// Batch-hard triplet loss: per anchor, hinge on margin + (farthest positive
/// distance) - (nearest negative distance), averaged over anchors. The
/// subgradient flows only through each anchor's selected pair; coincident
/// points get zero gradient.
TripletLoss batch_hard_triplet(const Eigen::MatrixXd& features,
                               const std::vector<int>& ids, double margin);

enum class LossMode {
  kFull,        // cls + tri + lambda * ldl
  kLdlTriplet,  // tri + lambda * ldl, classification term dropped
};

struct LossBreakdown {
  double cls = 0.0;
  double tri = 0.0;
  double ldl = 0.0;
  double lambda = 0.0;
  double total = 0.0;
};

LossBreakdown overall_loss(double cls, double tri, double ldl, double lambda,
                           LossMode mode = LossMode::kFull);

}  // namespace ldlgen

#endif  // LDLGEN_LOSSES_HPP_
