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

#include "ldlgen/ldl_engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ldlgen {

namespace {
constexpr double kSimilarityFloor = 1e-12;
constexpr double kPredictionSumTolerance = 1e-6;
}  // namespace

LdlEngine::LdlEngine(DomainLayout layout) : layout_(std::move(layout)) {
  const int c = layout_.class_count();
  const int k = layout_.domain_count();
  if (c < 2) {
    throw InvalidLayout("engine requires at least two classes");
  }
  if (k < 2) {
    throw InvalidLayout("engine requires at least two domains");
  }
  const double u = 1.0 / static_cast<double>(c);
  tracking_ = Eigen::MatrixXd::Constant(c, c, u);
  distributions_ = tracking_;
  committed_base_ = tracking_;
}

void LdlEngine::check_prediction(const Eigen::VectorXd& p) const {
  if (p.size() != layout_.class_count()) {
    throw NotAProbabilityVector("prediction length " + std::to_string(p.size()) +
                                " != class count " +
                                std::to_string(layout_.class_count()));
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) {
      throw NotAProbabilityVector("prediction entry " + std::to_string(i) +
                                  " is negative or non-finite");
    }
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > kPredictionSumTolerance) {
    throw NotAProbabilityVector("prediction sums to " + std::to_string(sum));
  }
}

void LdlEngine::momentum_update(int class_index, const Eigen::VectorXd& prediction,
                                double m) {
  if (class_index < 0 || class_index >= layout_.class_count()) {
    throw std::out_of_range("class index out of range");
  }
  if (!(m >= 0.0 && m <= 1.0)) {
    throw std::invalid_argument("momentum must lie in [0, 1]");
  }
  check_prediction(prediction);
  // Exact renormalization keeps the row-sum invariant at machine precision
  // even when the caller's vector is only 1e-6 close.
  Eigen::VectorXd p = prediction / prediction.sum();
  tracking_.row(class_index) = (1.0 - m) * tracking_.row(class_index) + m * p.transpose();
}

void LdlEngine::batch_update(std::span<const int> classes,
                             const Eigen::MatrixXd& predictions, double m) {
  if (static_cast<Eigen::Index>(classes.size()) != predictions.rows()) {
    throw NotAProbabilityVector("one prediction row per class label required");
  }
  if (classes.empty()) return;
  // Mean prediction per distinct class, in first-appearance order so the
  // update sequence is deterministic.
  std::vector<int> order;
  std::map<int, std::pair<Eigen::VectorXd, int>> sums;
  for (size_t i = 0; i < classes.size(); ++i) {
    auto [it, inserted] = sums.try_emplace(
        classes[i], Eigen::VectorXd::Zero(predictions.cols()), 0);
    if (inserted) order.push_back(classes[i]);
    it->second.first += predictions.row(static_cast<Eigen::Index>(i)).transpose();
    it->second.second += 1;
  }
  for (int cls : order) {
    const auto& [sum, count] = sums.at(cls);
    momentum_update(cls, sum / static_cast<double>(count), m);
  }
}

double LdlEngine::domain_similarity(int class_index, int domain) const {
  const int own = layout_.domain_of(class_index);
  if (domain < 0 || domain >= layout_.domain_count()) {
    throw InvalidLayout("domain index out of range");
  }
  if (domain == own) {
    throw SameDomainQuery("class " + std::to_string(class_index) +
                          " belongs to domain " + std::to_string(domain));
  }
  const auto& members = layout_.classes_in(domain);
  double sum = 0.0;
  for (int j : members) sum += committed_base_(class_index, j);
  return sum / static_cast<double>(members.size());
}

double LdlEngine::mean_cross_similarity(int class_index) const {
  const int own = layout_.domain_of(class_index);
  const int k = layout_.domain_count();
  double sum = 0.0;
  for (int d = 0; d < k; ++d) {
    if (d == own) continue;
    sum += domain_similarity(class_index, d);
  }
  return sum / static_cast<double>(k - 1);
}

void LdlEngine::commit_epoch(CommitVariant variant,
                             std::optional<double> pinned_diagonal) {
  if (pinned_diagonal && !(*pinned_diagonal > 0.0 && *pinned_diagonal < 1.0)) {
    throw std::invalid_argument("pinned diagonal must lie in (0, 1)");
  }
  committed_base_ = tracking_;
  Eigen::MatrixXd next = tracking_;
  const int c = layout_.class_count();

  if (variant != CommitVariant::kRelationOnly) {
    for (int i = 0; i < c; ++i) {
      const int own = layout_.domain_of(i);
      const double diag = pinned_diagonal ? *pinned_diagonal : next(i, i);
      next(i, i) = diag;
      for (int j : layout_.classes_in(own)) {
        if (j != i) next(i, j) = 0.0;
      }
      if (variant == CommitVariant::kZeroSameDomain) {
        // One factor over all surviving entries restores the row sum.
        double cross_sum = 0.0;
        for (int j = 0; j < c; ++j) {
          if (j != i && layout_.domain_of(j) != own) cross_sum += next(i, j);
        }
        if (cross_sum <= kSimilarityFloor) {
          throw DegenerateSimilarity("row " + std::to_string(i) +
                                     " has no cross-domain mass to rescale");
        }
        const double factor = (1.0 - diag) / cross_sum;
        for (int j = 0; j < c; ++j) {
          if (j != i && layout_.domain_of(j) != own) next(i, j) *= factor;
        }
      } else {
        // Equal attention: entry j <- l_j * (1 - l_i) / (s_i^{phi(j)} * sum
        // of cross-domain class counts). Each cross domain then holds mass
        // proportional to its class count.
        int cross_total = 0;
        for (int d = 0; d < layout_.domain_count(); ++d) {
          if (d != own) cross_total += layout_.domain_size(d);
        }
        for (int d = 0; d < layout_.domain_count(); ++d) {
          if (d == own) continue;
          const auto& members = layout_.classes_in(d);
          double s = 0.0;
          for (int j : members) s += committed_base_(i, j);
          s /= static_cast<double>(members.size());
          if (s <= kSimilarityFloor) {
            throw DegenerateSimilarity("similarity of class " + std::to_string(i) +
                                       " to domain " + std::to_string(d) +
                                       " vanishes");
          }
          const double scale = (1.0 - diag) / (s * static_cast<double>(cross_total));
          for (int j : members) next(i, j) = committed_base_(i, j) * scale;
        }
      }
    }
  }
  distributions_ = std::move(next);
  ++committed_epoch_;
}

std::map<int, double> LdlEngine::per_domain_mass(int class_index) const {
  const int own = layout_.domain_of(class_index);
  std::map<int, double> mass;
  for (int d = 0; d < layout_.domain_count(); ++d) {
    if (d == own) continue;
    double sum = 0.0;
    for (int j : layout_.classes_in(d)) sum += distributions_(class_index, j);
    mass[d] = sum;
  }
  return mass;
}

std::vector<ClassSimilarityRow> LdlEngine::similarity_report() const {
  return similarity_table(tracking_, layout_);
}

std::vector<ClassSimilarityRow> similarity_table(const Eigen::MatrixXd& matrix,
                                                 const DomainLayout& layout) {
  if (matrix.rows() != layout.class_count() || matrix.cols() != layout.class_count()) {
    throw ShapeMismatch("matrix shape does not match layout");
  }
  std::vector<ClassSimilarityRow> report;
  report.reserve(layout.class_count());
  for (int i = 0; i < layout.class_count(); ++i) {
    ClassSimilarityRow row;
    row.class_id = i;
    row.domain_id = layout.domain_of(i);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int d = 0; d < layout.domain_count(); ++d) {
      if (d == row.domain_id) continue;
      double sum = 0.0;
      for (int j : layout.classes_in(d)) sum += matrix(i, j);
      const double s = sum / static_cast<double>(layout.domain_size(d));
      row.cross.emplace_back(d, s);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    row.diff = hi - lo;
    report.push_back(std::move(row));
  }
  return report;
}

void LdlEngine::load_tracking(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != layout_.class_count() || matrix.cols() != layout_.class_count()) {
    throw NotAProbabilityVector("matrix shape does not match layout");
  }
  Eigen::MatrixXd next(matrix.rows(), matrix.cols());
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    Eigen::VectorXd row = matrix.row(i).transpose();
    check_prediction(row);
    next.row(i) = (row / row.sum()).transpose();
  }
  tracking_ = std::move(next);
}

void save_matrix_csv(const Eigen::MatrixXd& matrix, const DomainLayout& layout,
                     const std::string& path) {
  if (matrix.rows() != layout.class_count() || matrix.cols() != layout.class_count()) {
    throw IoError("matrix shape does not match layout");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "# class_count=" << layout.class_count() << "\n# domains=";
  for (int c = 0; c < layout.class_count(); ++c) {
    if (c) out << ',';
    out << layout.domain_of(c);
  }
  out << "\n";
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j) out << ',';
      out << format_double(matrix(i, j));
    }
    out << "\n";
  }
  if (!out) throw IoError("write to " + path + " failed");
}

std::pair<Eigen::MatrixXd, DomainLayout> load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# class_count=", 0) != 0) {
    throw IoError(path + ": missing class_count header");
  }
  const int c = std::stoi(line.substr(14));
  if (!std::getline(in, line) || line.rfind("# domains=", 0) != 0) {
    throw IoError(path + ": missing domains header");
  }
  std::vector<int> assignment;
  {
    std::stringstream ss(line.substr(10));
    std::string tok;
    while (std::getline(ss, tok, ',')) assignment.push_back(std::stoi(tok));
  }
  if (static_cast<int>(assignment.size()) != c) {
    throw IoError(path + ": domain assignment length != class_count");
  }
  Eigen::MatrixXd matrix(c, c);
  for (int i = 0; i < c; ++i) {
    if (!std::getline(in, line)) throw IoError(path + ": truncated matrix");
    std::stringstream ss(line);
    std::string tok;
    for (int j = 0; j < c; ++j) {
      if (!std::getline(ss, tok, ',')) throw IoError(path + ": short row");
      matrix(i, j) = std::stod(tok);
    }
  }
  return {std::move(matrix), DomainLayout(std::move(assignment))};
}

}  // namespace ldlgen
