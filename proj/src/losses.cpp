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

#include "ldlgen/losses.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ldlgen {

namespace {
constexpr double kLogClamp = 1e-12;

void check_probability_pair(const Eigen::VectorXd& probs, const Eigen::VectorXd& target) {
  if (probs.size() != target.size()) {
    throw LengthMismatch("probability vector length " + std::to_string(probs.size()) +
                         " != target length " + std::to_string(target.size()));
  }
  if (std::abs(probs.sum() - 1.0) > 1e-6 || std::abs(target.sum() - 1.0) > 1e-6) {
    throw NotAProbabilityVector("inputs must each sum to 1 within 1e-6");
  }
}

double euclidean(const Eigen::MatrixXd& f, Eigen::Index a, Eigen::Index b) {
  double sq = 0.0;
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    const double d = f(a, j) - f(b, j);
    sq += d * d;
  }
  return std::sqrt(sq);
}
}  // namespace

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  if (logits.size() == 0 || !logits.allFinite()) {
    throw NonFiniteInput("softmax requires finite, non-empty logits");
  }
  const double peak = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - peak).exp();
  return e / e.sum();
}

ScalarLoss soft_cross_entropy(const Eigen::VectorXd& probs, const Eigen::VectorXd& target) {
  check_probability_pair(probs, target);
  ScalarLoss out;
  out.grad = probs - target;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (target[i] != 0.0) {
      loss -= target[i] * std::log(std::max(probs[i], kLogClamp));
    }
  }
  out.value = loss;
  return out;
}

ScalarLoss smoothed_cross_entropy(const Eigen::VectorXd& probs, int true_class,
                                  double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw InvalidEpsilon("smoothing must lie in [0, 1)");
  }
  if (true_class < 0 || true_class >= probs.size()) {
    throw LengthMismatch("class index " + std::to_string(true_class) +
                         " out of range for length " + std::to_string(probs.size()));
  }
  Eigen::VectorXd target =
      Eigen::VectorXd::Constant(probs.size(), epsilon / static_cast<double>(probs.size()));
  target[true_class] += 1.0 - epsilon;
  return soft_cross_entropy(probs, target);
}

TripletLoss batch_hard_triplet(const Eigen::MatrixXd& features,
                               const std::vector<int>& ids, double margin) {
  const Eigen::Index n = features.rows();
  if (static_cast<Eigen::Index>(ids.size()) != n) {
    throw LengthMismatch("one id per feature row required");
  }
  TripletLoss out;
  out.grad = Eigen::MatrixXd::Zero(n, features.cols());

  Eigen::MatrixXd dist(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    dist(a, a) = 0.0;
    for (Eigen::Index b = a + 1; b < n; ++b) {
      dist(a, b) = dist(b, a) = euclidean(features, a, b);
    }
  }

  double total = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    Eigen::Index hardest_pos = -1, hardest_neg = -1;
    double d_pos = -1.0, d_neg = std::numeric_limits<double>::infinity();
    for (Eigen::Index b = 0; b < n; ++b) {
      if (b == a) continue;
      if (ids[b] == ids[a]) {
        if (dist(a, b) > d_pos) {
          d_pos = dist(a, b);
          hardest_pos = b;
        }
      } else if (dist(a, b) < d_neg) {
        d_neg = dist(a, b);
        hardest_neg = b;
      }
    }
    if (hardest_pos < 0 || hardest_neg < 0) {
      throw NoValidTriplet("anchor " + std::to_string(a) +
                           " lacks a positive or a negative in the batch");
    }
    const double hinge = margin + d_pos - d_neg;
    if (hinge <= 0.0) continue;
    total += hinge;
    // d||f_a - f_b|| / df_a = (f_a - f_b) / ||f_a - f_b||, zero at
    // coincident points.
    const double inv_n = 1.0 / static_cast<double>(n);
    if (d_pos > 0.0) {
      Eigen::RowVectorXd dir = (features.row(a) - features.row(hardest_pos)) / d_pos;
      out.grad.row(a) += inv_n * dir;
      out.grad.row(hardest_pos) -= inv_n * dir;
    }
    if (d_neg > 0.0) {
      Eigen::RowVectorXd dir = (features.row(a) - features.row(hardest_neg)) / d_neg;
      out.grad.row(a) -= inv_n * dir;
      out.grad.row(hardest_neg) += inv_n * dir;
    }
  }
  out.value = total / static_cast<double>(n);
  return out;
}

LossBreakdown overall_loss(double cls, double tri, double ldl, double lambda,
                           LossMode mode) {
  if (!(std::isfinite(cls) && std::isfinite(tri) && std::isfinite(ldl))) {
    throw NonFiniteInput("loss components must be finite");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw NonFiniteInput("lambda must be finite and nonnegative");
  }
  LossBreakdown b;
  b.cls = mode == LossMode::kLdlTriplet ? 0.0 : cls;
  b.tri = tri;
  b.ldl = ldl;
  b.lambda = lambda;
  b.total = b.cls + b.tri + lambda * b.ldl;
  return b;
}

}  // namespace ldlgen
