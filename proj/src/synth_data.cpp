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

#include "ldlgen/synth_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ldlgen {

std::vector<int> SyntheticSpec::domain_class_counts() const {
  const size_t total = static_cast<size_t>(source_domains) + 1;
  if (classes_per_domain.size() == 1) {
    return std::vector<int>(total, classes_per_domain[0]);
  }
  return classes_per_domain;
}

void SyntheticSpec::validate() const {
  if (source_domains < 1) throw InvalidSpec("need at least one source domain");
  const auto counts = domain_class_counts();
  if (counts.size() != static_cast<size_t>(source_domains) + 1) {
    throw InvalidSpec("classes_per_domain needs one entry per domain (sources + target) or a single broadcast value");
  }
  for (int n : counts) {
    if (n < 1) throw InvalidSpec("every domain needs at least one class");
  }
  if (samples_per_class < 2) throw InvalidSpec("need at least two samples per class");
  if (latent_dim < 1 || input_dim < latent_dim) {
    throw InvalidSpec("require 1 <= latent_dim <= input_dim");
  }
  if (identity_scale <= 0.0) throw InvalidSpec("identity_scale must be positive");
  if (within_noise < 0.0 || domain_shift < 0.0) {
    throw InvalidSpec("noise scales must be nonnegative");
  }
  if (views < 2) throw InvalidSpec("need at least two views to split query/gallery");
}

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

Eigen::VectorXd random_vector(int n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

struct StyleMap {
  Eigen::MatrixXd linear;  // input_dim x input_dim
  Eigen::VectorXd bias;
};

}  // namespace

GeneratedData generate(const SyntheticSpec& spec) {
  spec.validate();
  const auto counts = spec.domain_class_counts();
  const int domains = spec.source_domains + 1;
  const int total_classes =
      std::accumulate(counts.begin(), counts.end(), 0, std::plus<int>());

  Rng id_rng(seed_stream(spec.seed, "identity"));
  Rng style_rng(seed_stream(spec.seed, "style"));
  Rng noise_rng(seed_stream(spec.seed, "noise"));

  // Latent identity per class, sources first, then the target block.
  std::vector<Eigen::VectorXd> identity(total_classes);
  for (int c = 0; c < total_classes; ++c) {
    identity[c] = spec.identity_scale * random_vector(spec.latent_dim, id_rng);
  }

  // Shared base: latent coordinates embedded into the first input dims plus
  // one bias common to all domains. At domain_shift = 0 every style map
  // collapses to this.
  const Eigen::VectorXd shared_bias = 0.5 * random_vector(spec.input_dim, style_rng);
  std::vector<StyleMap> style(domains);
  for (int d = 0; d < domains; ++d) {
    Eigen::MatrixXd g = random_matrix(spec.input_dim, spec.input_dim, style_rng);
    // Skew-symmetric generator makes I + shift * S rotation-like.
    Eigen::MatrixXd skew =
        (g - g.transpose()) / (2.0 * std::sqrt(static_cast<double>(spec.input_dim)));
    style[d].linear = Eigen::MatrixXd::Identity(spec.input_dim, spec.input_dim) +
                      spec.domain_shift * skew;
    style[d].bias = shared_bias +
                    spec.domain_shift * random_vector(spec.input_dim, style_rng);
  }
  // Per-domain, per-view offsets; view variation is within-class nuisance.
  std::vector<std::vector<Eigen::VectorXd>> view_offset(domains);
  for (int d = 0; d < domains; ++d) {
    view_offset[d].reserve(spec.views);
    for (int v = 0; v < spec.views; ++v) {
      view_offset[d].push_back(0.5 * spec.within_noise *
                               random_vector(spec.input_dim, style_rng));
    }
  }

  auto make_dataset = [&](int domain_lo, int domain_hi, int class_base) {
    Dataset ds;
    int rows = 0;
    for (int d = domain_lo; d < domain_hi; ++d) rows += counts[d] * spec.samples_per_class;
    ds.inputs.resize(rows, spec.input_dim);
    ds.class_ids.reserve(rows);
    ds.domain_ids.reserve(rows);
    ds.view_ids.reserve(rows);
    int row = 0;
    int cls = class_base;
    for (int d = domain_lo; d < domain_hi; ++d) {
      for (int k = 0; k < counts[d]; ++k, ++cls) {
        for (int s = 0; s < spec.samples_per_class; ++s, ++row) {
          Eigen::VectorXd z = identity[cls] +
                              spec.within_noise * random_vector(spec.latent_dim, noise_rng);
          Eigen::VectorXd embedded = Eigen::VectorXd::Zero(spec.input_dim);
          embedded.head(spec.latent_dim) = z;
          const int view = s % spec.views;
          ds.inputs.row(row) = (style[d].linear * embedded + style[d].bias +
                                view_offset[d][view])
                                   .transpose();
          ds.class_ids.push_back(cls);
          ds.domain_ids.push_back(d);
          ds.view_ids.push_back(view);
        }
      }
    }
    return ds;
  };

  GeneratedData out{
      make_dataset(0, spec.source_domains, 0),
      DomainLayout::from_counts(
          std::vector<int>(counts.begin(), counts.begin() + spec.source_domains)),
      make_dataset(spec.source_domains, domains,
                   total_classes - counts[spec.source_domains]),
  };
  return out;
}

std::vector<std::vector<int>> pk_batches(const Dataset& dataset,
                                         const DomainLayout& layout,
                                         int ids_per_domain, int images_per_id,
                                         Rng& rng) {
  if (ids_per_domain < 1 || images_per_id < 1) {
    throw InvalidSpec("batch shape values must be positive");
  }
  const int classes = layout.class_count();
  std::vector<std::vector<int>> samples_of(classes);
  for (Eigen::Index i = 0; i < dataset.size(); ++i) {
    const int c = dataset.class_ids[i];
    if (c < 0 || c >= classes) throw InvalidSpec("sample class id outside layout");
    samples_of[c].push_back(static_cast<int>(i));
  }
  for (int c = 0; c < classes; ++c) {
    if (static_cast<int>(samples_of[c].size()) < images_per_id) {
      throw InsufficientSamples("class " + std::to_string(c) + " has " +
                                std::to_string(samples_of[c].size()) +
                                " samples, needs " + std::to_string(images_per_id));
    }
  }

  const int domains = layout.domain_count();
  // Per-class sample pools, consumed without replacement and reshuffled when
  // empty.
  std::vector<std::vector<int>> sample_pool(classes);
  std::vector<size_t> sample_cursor(classes, 0);
  for (int c = 0; c < classes; ++c) {
    sample_pool[c] = samples_of[c];
    rng.shuffle(sample_pool[c]);
  }
  auto draw_samples = [&](int c, std::vector<int>& batch) {
    if (sample_cursor[c] + images_per_id > sample_pool[c].size()) {
      rng.shuffle(sample_pool[c]);
      sample_cursor[c] = 0;
    }
    for (int k = 0; k < images_per_id; ++k) {
      batch.push_back(sample_pool[c][sample_cursor[c]++]);
    }
  };

  // Per-domain class pools; the first pass through each pool is a full
  // permutation, so one epoch covers every class.
  std::vector<std::vector<int>> class_pool(domains);
  std::vector<size_t> class_cursor(domains, 0);
  int batches = 0;
  for (int d = 0; d < domains; ++d) {
    class_pool[d] = layout.classes_in(d);
    rng.shuffle(class_pool[d]);
    const int per_batch = std::min(ids_per_domain, layout.domain_size(d));
    batches = std::max(
        batches, (layout.domain_size(d) + per_batch - 1) / per_batch);
  }

  std::vector<std::vector<int>> epoch;
  epoch.reserve(batches);
  for (int b = 0; b < batches; ++b) {
    std::vector<int> batch;
    for (int d = 0; d < domains; ++d) {
      const int want = std::min(ids_per_domain, layout.domain_size(d));
      std::set<int> chosen;
      while (static_cast<int>(chosen.size()) < want) {
        if (class_cursor[d] >= class_pool[d].size()) {
          rng.shuffle(class_pool[d]);
          class_cursor[d] = 0;
        }
        const int c = class_pool[d][class_cursor[d]++];
        if (!chosen.insert(c).second) continue;  // already in this batch
        draw_samples(c, batch);
      }
    }
    epoch.push_back(std::move(batch));
  }
  return epoch;
}

void save_dataset_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (int j = 0; j < dataset.input_dim(); ++j) out << 'x' << j << ',';
  out << "class_id,domain_id,view_id\n";
  for (Eigen::Index i = 0; i < dataset.size(); ++i) {
    for (int j = 0; j < dataset.input_dim(); ++j) {
      out << format_double(dataset.inputs(i, j)) << ',';
    }
    out << dataset.class_ids[i] << ',' << dataset.domain_ids[i] << ','
        << dataset.view_ids[i] << "\n";
  }
  if (!out) throw IoError("write to " + path + " failed");
}

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  int dim = 0;
  {
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> header;
    while (std::getline(ss, tok, ',')) header.push_back(tok);
    if (header.size() < 4 || header[header.size() - 3] != "class_id" ||
        header[header.size() - 2] != "domain_id" || header.back() != "view_id") {
      throw IoError(path + ": unexpected dataset header");
    }
    dim = static_cast<int>(header.size()) - 3;
  }
  std::vector<std::vector<double>> rows;
  Dataset ds;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (static_cast<int>(vals.size()) != dim + 3) {
      throw IoError(path + ": row with wrong field count");
    }
    ds.class_ids.push_back(static_cast<int>(vals[dim]));
    ds.domain_ids.push_back(static_cast<int>(vals[dim + 1]));
    ds.view_ids.push_back(static_cast<int>(vals[dim + 2]));
    vals.resize(dim);
    rows.push_back(std::move(vals));
  }
  ds.inputs.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < dim; ++j) ds.inputs(static_cast<Eigen::Index>(i), j) = rows[i][j];
  }
  return ds;
}

}  // namespace ldlgen
