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

#ifndef LDLGEN_MODEL_HPP_
#define LDLGEN_MODEL_HPP_

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ldlgen/common.hpp"
#include "ldlgen/ldl_engine.hpp"
#include "ldlgen/losses.hpp"
#include "ldlgen/synth_data.hpp"

namespace ldlgen {

// ---------------------------------------------------------------------------
// A deliberately small encoder: two affine layers with a tanh in between,
// plus a linear classifier. Backprop and Adam are explicit so gradients can
// be checked against finite differences.
// ---------------------------------------------------------------------------

struct ModelDims {
  int input = 32;
  int hidden = 128;
  int feature = 64;
  int classes = 0;
};

enum TensorSlot { kW1, kB1, kW2, kB2, kWc, kBc, kTensorCount };

struct ModelParams {
  ModelDims dims;
  // w1, b1, w2, b2, wc, bc; biases stored as single-column matrices so the
  // optimizer and the finite-difference loops treat all slots uniformly.
  std::array<Eigen::MatrixXd, kTensorCount> tensors;
  std::array<Eigen::MatrixXd, kTensorCount> adam_m;
  std::array<Eigen::MatrixXd, kTensorCount> adam_v;
  long step_count = 0;
  uint64_t revision = 0;  // bumped by every optimizer step
};

using Gradients = std::array<Eigen::MatrixXd, kTensorCount>;

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero, Adam buffers zero.
ModelParams init_params(const ModelDims& dims, Rng& rng);

struct ForwardCache {
  Eigen::MatrixXd inputs;    // B x input
  Eigen::MatrixXd hidden;    // B x hidden, post-tanh
  Eigen::MatrixXd features;  // B x feature
  uint64_t revision = 0;
};

struct ForwardResult {
  Eigen::MatrixXd features;  // B x feature
  Eigen::MatrixXd logits;    // B x classes
  ForwardCache cache;
};

ForwardResult forward(const ModelParams& params, const Eigen::MatrixXd& inputs);

// Features only; for evaluation paths that never touch the classifier.
Eigen::MatrixXd extract_features(const ModelParams& params, const Eigen::MatrixXd& inputs);

// Reverse-mode gradients for both upstream paths: d(loss)/d(logits) from the
// classification-style losses and d(loss)/d(features) from the metric loss.
// The cache must come from a forward pass against the current parameters.
Gradients backward(const ModelParams& params, const ForwardCache& cache,
                   const Eigen::MatrixXd& grad_logits,
                   const Eigen::MatrixXd& grad_features);

// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8 and bias correction.
void adam_step(ModelParams& params, const Gradients& grads, double lr);

// ---------------------------------------------------------------------------
// Training configuration and loop.
// ---------------------------------------------------------------------------

/// Experiment variants. `kOnehotCompare` names the paired protocol
/// (one-hot cross entropy + triplet versus pinned-diagonal distribution +
/// triplet); it expands to the two concrete arms below.
enum class Variant { kBaseline, kLdl1, kLdl2, kLdl3, kOnehotCompare };

/// A concrete loss composition for one training run.
enum class TrainArm { kBaseline, kLdl1, kLdl2, kLdl3, kOneHot, kPinnedLdl };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);
std::string to_string(TrainArm a);

struct TrainConfig {
  double learning_rate = 3.5e-4;
  std::vector<int> decay_epochs = {30, 50};
  double decay_factor = 0.1;
  int total_epochs = 60;
  double momentum_m = 0.2;
  double lambda = 1.0;
  int ids_per_domain_per_batch = 16;
  int images_per_id = 4;
  uint64_t seed = 0;
  Variant variant = Variant::kLdl3;

  int hidden_dim = 128;
  int feature_dim = 64;
  double label_smoothing = 0.1;
  double triplet_margin = 0.3;
  double pinned_diagonal = 0.88;  // fixed own-identity mass in the compare protocol

  void validate() const;  // throws ConfigError
};

// Base rate scaled by decay_factor once per decay epoch already reached.
double scheduled_lr(const TrainConfig& config, int epoch);

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  LossBreakdown losses;  // mean over the epoch's iterations
  // Commit age of the distribution rows this epoch trained against
  // (0 = the uniform initialization). -1 when the arm has no such loss.
  int ldl_target_epoch = -1;
  bool has_ldl_diagnostics = false;
  double mass_residual_max = 0.0;      // equal-attention commits only
  double mean_cross_similarity = 0.0;  // from the tracking matrix
  double mean_diff = 0.0;
};

struct TrainOutput {
  ModelParams params;
  std::vector<EpochRecord> history;
  // Present whenever the dataset has >= 2 domains; tracks classifier
  // predictions in every arm so post-training similarity reports are
  // available even for the baseline.
  std::optional<LdlEngine> engine;
};

// Runs the full loop: per iteration forward, per-arm losses, tracking-matrix
// update, Adam step; per epoch an LR lookup, batch reshuffle and (for
// distribution arms) a commit. Deterministic given config.seed.
TrainOutput train(const TrainConfig& config, const Dataset& source,
                  const DomainLayout& layout, TrainArm arm);

// Checkpoint container: explicit shapes, optimizer state, format version.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace ldlgen

#endif  // LDLGEN_MODEL_HPP_
