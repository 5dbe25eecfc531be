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

#include "ldlgen/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace ldlgen {

namespace {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

std::array<std::pair<int, int>, kTensorCount> tensor_shapes(const ModelDims& d) {
  return {{{d.hidden, d.input},
           {d.hidden, 1},
           {d.feature, d.hidden},
           {d.feature, 1},
           {d.classes, d.feature},
           {d.classes, 1}}};
}

const char* tensor_names[kTensorCount] = {"w1", "b1", "w2", "b2", "wc", "bc"};

}  // namespace

ModelParams init_params(const ModelDims& dims, Rng& rng) {
  if (dims.input < 1 || dims.hidden < 1 || dims.feature < 1 || dims.classes < 1) {
    throw ShapeMismatch("all model dimensions must be positive");
  }
  ModelParams p;
  p.dims = dims;
  const auto shapes = tensor_shapes(dims);
  for (int t = 0; t < kTensorCount; ++t) {
    auto [rows, cols] = shapes[t];
    p.tensors[t] = Eigen::MatrixXd::Zero(rows, cols);
    p.adam_m[t] = Eigen::MatrixXd::Zero(rows, cols);
    p.adam_v[t] = Eigen::MatrixXd::Zero(rows, cols);
  }
  // Weight slots only; biases start at zero.
  for (int t : {kW1, kW2, kWc}) {
    auto& w = p.tensors[t];
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        w(i, j) = rng.uniform(-bound, bound);
      }
    }
  }
  return p;
}

ForwardResult forward(const ModelParams& params, const Eigen::MatrixXd& inputs) {
  if (inputs.cols() != params.dims.input) {
    throw ShapeMismatch("input width " + std::to_string(inputs.cols()) +
                        " != model input dim " + std::to_string(params.dims.input));
  }
  if (!inputs.allFinite()) throw NonFiniteInput("model inputs must be finite");
  ForwardResult r;
  Eigen::MatrixXd pre =
      (inputs * params.tensors[kW1].transpose()).rowwise() +
      params.tensors[kB1].col(0).transpose();
  r.cache.hidden = pre.array().tanh();
  r.features = (r.cache.hidden * params.tensors[kW2].transpose()).rowwise() +
               params.tensors[kB2].col(0).transpose();
  r.logits = (r.features * params.tensors[kWc].transpose()).rowwise() +
             params.tensors[kBc].col(0).transpose();
  r.cache.inputs = inputs;
  r.cache.features = r.features;
  r.cache.revision = params.revision;
  return r;
}

Eigen::MatrixXd extract_features(const ModelParams& params, const Eigen::MatrixXd& inputs) {
  return forward(params, inputs).features;
}

Gradients backward(const ModelParams& params, const ForwardCache& cache,
                   const Eigen::MatrixXd& grad_logits,
                   const Eigen::MatrixXd& grad_features) {
  if (cache.revision != params.revision) {
    throw StaleCache("forward cache predates the current parameters");
  }
  const Eigen::Index batch = cache.inputs.rows();
  if (grad_logits.rows() != batch || grad_logits.cols() != params.dims.classes ||
      grad_features.rows() != batch || grad_features.cols() != params.dims.feature) {
    throw ShapeMismatch("upstream gradient shapes do not match the forward pass");
  }
  Gradients g;
  g[kWc] = grad_logits.transpose() * cache.features;
  g[kBc] = grad_logits.colwise().sum().transpose();
  Eigen::MatrixXd gf = grad_logits * params.tensors[kWc] + grad_features;
  g[kW2] = gf.transpose() * cache.hidden;
  g[kB2] = gf.colwise().sum().transpose();
  Eigen::MatrixXd gh = gf * params.tensors[kW2];
  Eigen::MatrixXd gpre =
      gh.array() * (1.0 - cache.hidden.array().square());
  g[kW1] = gpre.transpose() * cache.inputs;
  g[kB1] = gpre.colwise().sum().transpose();
  return g;
}

void adam_step(ModelParams& params, const Gradients& grads, double lr) {
  for (int t = 0; t < kTensorCount; ++t) {
    if (grads[t].rows() != params.tensors[t].rows() ||
        grads[t].cols() != params.tensors[t].cols()) {
      throw ShapeMismatch("gradient shape mismatch on tensor " +
                          std::string(tensor_names[t]));
    }
    if (!grads[t].allFinite()) {
      throw NonFiniteGradient("non-finite gradient on tensor " +
                              std::string(tensor_names[t]));
    }
  }
  params.step_count += 1;
  const double t1 = 1.0 - std::pow(kBeta1, static_cast<double>(params.step_count));
  const double t2 = 1.0 - std::pow(kBeta2, static_cast<double>(params.step_count));
  for (int t = 0; t < kTensorCount; ++t) {
    params.adam_m[t] = kBeta1 * params.adam_m[t] + (1.0 - kBeta1) * grads[t];
    params.adam_v[t] =
        kBeta2 * params.adam_v[t].array() + (1.0 - kBeta2) * grads[t].array().square();
    params.tensors[t].array() -=
        lr * (params.adam_m[t].array() / t1) /
        ((params.adam_v[t].array() / t2).sqrt() + kAdamEps);
    if (!params.tensors[t].allFinite()) {
      throw NonFiniteGradient("parameters became non-finite after the update");
    }
  }
  params.revision += 1;
}

// ---------------------------------------------------------------------------
// Configuration and training loop.
// ---------------------------------------------------------------------------

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kBaseline: return "baseline";
    case Variant::kLdl1: return "LDL-1";
    case Variant::kLdl2: return "LDL-2";
    case Variant::kLdl3: return "LDL-3";
    case Variant::kOnehotCompare: return "onehot-compare";
  }
  return "?";
}

Variant variant_from_string(const std::string& name) {
  if (name == "baseline") return Variant::kBaseline;
  if (name == "LDL-1" || name == "ldl-1") return Variant::kLdl1;
  if (name == "LDL-2" || name == "ldl-2") return Variant::kLdl2;
  if (name == "LDL-3" || name == "ldl-3") return Variant::kLdl3;
  if (name == "onehot-compare") return Variant::kOnehotCompare;
  throw ConfigError("unknown variant '" + name + "'");
}

std::string to_string(TrainArm a) {
  switch (a) {
    case TrainArm::kBaseline: return "baseline";
    case TrainArm::kLdl1: return "LDL-1";
    case TrainArm::kLdl2: return "LDL-2";
    case TrainArm::kLdl3: return "LDL-3";
    case TrainArm::kOneHot: return "onehot";
    case TrainArm::kPinnedLdl: return "pinned-ldl";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (learning_rate <= 0.0 || decay_factor <= 0.0) {
    throw ConfigError("rates must be positive");
  }
  if (total_epochs < 1) throw ConfigError("total_epochs must be positive");
  for (size_t i = 0; i < decay_epochs.size(); ++i) {
    if (decay_epochs[i] >= total_epochs) {
      throw ConfigError("decay epochs must lie before total_epochs");
    }
    if (i > 0 && decay_epochs[i] <= decay_epochs[i - 1]) {
      throw ConfigError("decay epochs must be strictly increasing");
    }
  }
  if (momentum_m < 0.0 || momentum_m > 1.0) throw ConfigError("momentum_m outside [0, 1]");
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  if (ids_per_domain_per_batch < 1 || images_per_id < 2) {
    throw ConfigError("batch needs >= 1 id per domain and >= 2 images per id");
  }
  if (hidden_dim < 1 || feature_dim < 1) throw ConfigError("model dims must be positive");
  if (label_smoothing < 0.0 || label_smoothing >= 1.0) {
    throw ConfigError("label_smoothing outside [0, 1)");
  }
  if (triplet_margin < 0.0) throw ConfigError("triplet_margin must be nonnegative");
  if (pinned_diagonal <= 0.0 || pinned_diagonal >= 1.0) {
    throw ConfigError("pinned_diagonal outside (0, 1)");
  }
}

double scheduled_lr(const TrainConfig& config, int epoch) {
  if (epoch < 0 || epoch >= config.total_epochs) {
    throw ConfigError("epoch outside the training schedule");
  }
  int hits = 0;
  for (int e : config.decay_epochs) {
    if (e <= epoch) ++hits;
  }
  return config.learning_rate * std::pow(config.decay_factor, hits);
}

TrainOutput train(const TrainConfig& config, const Dataset& source,
                  const DomainLayout& layout, TrainArm arm) {
  config.validate();
  const bool uses_distributions =
      arm == TrainArm::kLdl1 || arm == TrainArm::kLdl2 || arm == TrainArm::kLdl3 ||
      arm == TrainArm::kPinnedLdl;
  if (uses_distributions && layout.domain_count() < 2) {
    throw InvalidLayout("distribution arms need at least two source domains");
  }

  TrainOutput out;
  if (layout.domain_count() >= 2) out.engine.emplace(layout);

  ModelDims dims{source.input_dim(), config.hidden_dim, config.feature_dim,
                 layout.class_count()};
  Rng init_rng(seed_stream(config.seed, "init"));
  out.params = init_params(dims, init_rng);
  Rng sampler_rng(seed_stream(config.seed, "sampler"));

  const CommitVariant commit_variant =
      arm == TrainArm::kLdl1   ? CommitVariant::kRelationOnly
      : arm == TrainArm::kLdl2 ? CommitVariant::kZeroSameDomain
                               : CommitVariant::kEqualAttention;
  const std::optional<double> pin =
      arm == TrainArm::kPinnedLdl ? std::optional<double>(config.pinned_diagonal)
                                  : std::nullopt;

  out.history.reserve(config.total_epochs);
  for (int epoch = 0; epoch < config.total_epochs; ++epoch) {
    const double lr = scheduled_lr(config, epoch);
    EpochRecord record;
    record.epoch = epoch;
    record.lr = lr;
    record.ldl_target_epoch =
        uses_distributions ? out.engine->committed_epoch() : -1;

    const auto batches = pk_batches(source, layout, config.ids_per_domain_per_batch,
                                    config.images_per_id, sampler_rng);
    LossBreakdown epoch_sum;
    for (const auto& batch : batches) {
      const Eigen::Index b = static_cast<Eigen::Index>(batch.size());
      Eigen::MatrixXd x(b, dims.input);
      std::vector<int> ids(batch.size());
      for (Eigen::Index i = 0; i < b; ++i) {
        x.row(i) = source.inputs.row(batch[i]);
        ids[i] = source.class_ids[batch[i]];
      }

      ForwardResult fwd = forward(out.params, x);
      Eigen::MatrixXd probs(b, dims.classes);
      for (Eigen::Index i = 0; i < b; ++i) {
        probs.row(i) = softmax(fwd.logits.row(i).transpose()).transpose();
      }

      Eigen::MatrixXd grad_logits = Eigen::MatrixXd::Zero(b, dims.classes);
      const double inv_b = 1.0 / static_cast<double>(b);
      double cls_loss = 0.0;
      if (arm != TrainArm::kPinnedLdl) {
        const double eps = arm == TrainArm::kOneHot ? 0.0 : config.label_smoothing;
        for (Eigen::Index i = 0; i < b; ++i) {
          ScalarLoss l = smoothed_cross_entropy(probs.row(i).transpose(), ids[i], eps);
          cls_loss += l.value * inv_b;
          grad_logits.row(i) += inv_b * l.grad.transpose();
        }
      }
      double ldl_loss = 0.0;
      if (uses_distributions) {
        for (Eigen::Index i = 0; i < b; ++i) {
          ScalarLoss l = soft_cross_entropy(
              probs.row(i).transpose(),
              out.engine->distributions().row(ids[i]).transpose());
          ldl_loss += l.value * inv_b;
          grad_logits.row(i) += config.lambda * inv_b * l.grad.transpose();
        }
      }
      TripletLoss tri = batch_hard_triplet(fwd.features, ids, config.triplet_margin);

      // Tracking update uses this iteration's predictions, before the
      // optimizer moves the classifier.
      if (out.engine) out.engine->batch_update(ids, probs, config.momentum_m);

      Gradients grads = backward(out.params, fwd.cache, grad_logits, tri.grad);
      adam_step(out.params, grads, lr);

      const LossBreakdown iter = overall_loss(
          cls_loss, tri.value, ldl_loss, config.lambda,
          arm == TrainArm::kPinnedLdl ? LossMode::kLdlTriplet : LossMode::kFull);
      epoch_sum.cls += iter.cls;
      epoch_sum.tri += iter.tri;
      epoch_sum.ldl += iter.ldl;
      epoch_sum.total += iter.total;
    }
    const double inv_iters = 1.0 / static_cast<double>(batches.size());
    record.losses.cls = epoch_sum.cls * inv_iters;
    record.losses.tri = epoch_sum.tri * inv_iters;
    record.losses.ldl = epoch_sum.ldl * inv_iters;
    record.losses.total = epoch_sum.total * inv_iters;
    record.losses.lambda = config.lambda;

    if (uses_distributions) {
      out.engine->commit_epoch(commit_variant, pin);
      record.has_ldl_diagnostics = true;
      if (commit_variant == CommitVariant::kEqualAttention) {
        // Residual of the mass law sum_{j in d} M_L[i,j] =
        // (1 - l_ii) N_d / sum N_d'.
        double worst = 0.0;
        const auto& ml = out.engine->distributions();
        for (int i = 0; i < layout.class_count(); ++i) {
          int cross_total = 0;
          for (int d = 0; d < layout.domain_count(); ++d) {
            if (d != layout.domain_of(i)) cross_total += layout.domain_size(d);
          }
          for (const auto& [d, mass] : out.engine->per_domain_mass(i)) {
            const double expected = (1.0 - ml(i, i)) * layout.domain_size(d) /
                                    static_cast<double>(cross_total);
            worst = std::max(worst, std::abs(mass - expected));
          }
        }
        record.mass_residual_max = worst;
      }
      double sim_sum = 0.0, diff_sum = 0.0;
      const auto report = out.engine->similarity_report();
      for (const auto& row : report) {
        double row_sum = 0.0;
        for (const auto& [d, s] : row.cross) row_sum += s;
        sim_sum += row_sum / static_cast<double>(row.cross.size());
        diff_sum += row.diff;
      }
      record.mean_cross_similarity = sim_sum / static_cast<double>(report.size());
      record.mean_diff = diff_sum / static_cast<double>(report.size());
    }
    out.history.push_back(std::move(record));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoint io.
// ---------------------------------------------------------------------------

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, int expect_rows,
                                 int expect_cols) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != expect_rows) {
    throw IoError("checkpoint tensor has wrong row count");
  }
  Eigen::MatrixXd m(expect_rows, expect_cols);
  for (int i = 0; i < expect_rows; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != expect_cols) {
      throw IoError("checkpoint tensor has wrong column count");
    }
    for (int j = 0; j < expect_cols; ++j) m(i, j) = row[j].get<double>();
  }
  return m;
}

}  // namespace

void save_checkpoint(const ModelParams& params, const std::string& path) {
  nlohmann::json doc;
  doc["format_version"] = 1;
  doc["dims"] = {{"input", params.dims.input},
                 {"hidden", params.dims.hidden},
                 {"feature", params.dims.feature},
                 {"classes", params.dims.classes}};
  doc["step_count"] = params.step_count;
  for (int t = 0; t < kTensorCount; ++t) {
    doc["tensors"][tensor_names[t]] = matrix_to_json(params.tensors[t]);
    doc["adam_m"][tensor_names[t]] = matrix_to_json(params.adam_m[t]);
    doc["adam_v"][tensor_names[t]] = matrix_to_json(params.adam_v[t]);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << doc.dump(1) << "\n";
  if (!out) throw IoError("write to " + path + " failed");
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  if (doc.value("format_version", 0) != 1) {
    throw IoError(path + ": unsupported checkpoint format version");
  }
  ModelDims dims{doc["dims"]["input"].get<int>(), doc["dims"]["hidden"].get<int>(),
                 doc["dims"]["feature"].get<int>(), doc["dims"]["classes"].get<int>()};
  ModelParams p;
  p.dims = dims;
  const auto shapes = tensor_shapes(dims);
  for (int t = 0; t < kTensorCount; ++t) {
    auto [rows, cols] = shapes[t];
    p.tensors[t] = matrix_from_json(doc["tensors"][tensor_names[t]], rows, cols);
    p.adam_m[t] = matrix_from_json(doc["adam_m"][tensor_names[t]], rows, cols);
    p.adam_v[t] = matrix_from_json(doc["adam_v"][tensor_names[t]], rows, cols);
  }
  p.step_count = doc["step_count"].get<long>();
  return p;
}

}  // namespace ldlgen
