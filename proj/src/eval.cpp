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

#include "ldlgen/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace ldlgen {

namespace {

double squared_distance(const Eigen::MatrixXd& a, Eigen::Index i,
                        const Eigen::MatrixXd& b, Eigen::Index j) {
  double sq = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const double d = a(i, k) - b(j, k);
    sq += d * d;
  }
  return sq;
}

}  // namespace

RetrievalScores retrieval_eval(const Eigen::MatrixXd& query_features,
                               const std::vector<int>& query_ids,
                               const std::vector<int>& query_views,
                               const Eigen::MatrixXd& gallery_features,
                               const std::vector<int>& gallery_ids,
                               const std::vector<int>& gallery_views) {
  const Eigen::Index q = query_features.rows();
  const Eigen::Index g = gallery_features.rows();
  if (static_cast<Eigen::Index>(query_ids.size()) != q ||
      static_cast<Eigen::Index>(query_views.size()) != q ||
      static_cast<Eigen::Index>(gallery_ids.size()) != g ||
      static_cast<Eigen::Index>(gallery_views.size()) != g ||
      query_features.cols() != gallery_features.cols()) {
    throw ShapeMismatch("query/gallery features and id lists must align");
  }
  if (q == 0) throw NoValidMatch("no queries");

  double ap_sum = 0.0;
  Eigen::Index hit1 = 0, hit5 = 0, hit10 = 0;
  std::vector<std::pair<double, Eigen::Index>> ranked;
  for (Eigen::Index i = 0; i < q; ++i) {
    ranked.clear();
    Eigen::Index relevant = 0;
    for (Eigen::Index j = 0; j < g; ++j) {
      if (gallery_ids[j] == query_ids[i] && gallery_views[j] == query_views[i]) {
        continue;  // same identity seen from the same view does not count
      }
      if (gallery_ids[j] == query_ids[i]) ++relevant;
      ranked.emplace_back(squared_distance(query_features, i, gallery_features, j), j);
    }
    if (relevant == 0) {
      throw NoValidMatch("query " + std::to_string(i) + " has no valid gallery match");
    }
    std::sort(ranked.begin(), ranked.end());
    Eigen::Index hits = 0;
    Eigen::Index first_hit = 0;
    double ap = 0.0;
    for (size_t r = 0; r < ranked.size(); ++r) {
      if (gallery_ids[ranked[r].second] == query_ids[i]) {
        ++hits;
        if (hits == 1) first_hit = static_cast<Eigen::Index>(r) + 1;
        ap += static_cast<double>(hits) / static_cast<double>(r + 1);
      }
    }
    ap_sum += ap / static_cast<double>(relevant);
    if (first_hit <= 1) ++hit1;
    if (first_hit <= 5) ++hit5;
    if (first_hit <= 10) ++hit10;
  }
  RetrievalScores s;
  s.map = ap_sum / static_cast<double>(q);
  s.rank1 = static_cast<double>(hit1) / static_cast<double>(q);
  s.rank5 = static_cast<double>(hit5) / static_cast<double>(q);
  s.rank10 = static_cast<double>(hit10) / static_cast<double>(q);
  return s;
}

DomainGap domain_gap(const Eigen::MatrixXd& features,
                     const std::vector<int>& domain_ids,
                     const std::vector<int>& class_ids) {
  const Eigen::Index n = features.rows();
  if (static_cast<Eigen::Index>(domain_ids.size()) != n ||
      static_cast<Eigen::Index>(class_ids.size()) != n) {
    throw ShapeMismatch("feature rows and id lists must align");
  }
  // Centroids per domain and per (domain, class).
  std::map<int, std::pair<Eigen::VectorXd, int>> dom;
  std::map<std::pair<int, int>, std::pair<Eigen::VectorXd, int>> cls;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto [dit, dnew] = dom.try_emplace(domain_ids[i], Eigen::VectorXd::Zero(features.cols()), 0);
    dit->second.first += features.row(i).transpose();
    dit->second.second += 1;
    auto [cit, cnew] = cls.try_emplace(std::make_pair(domain_ids[i], class_ids[i]),
                                       Eigen::VectorXd::Zero(features.cols()), 0);
    cit->second.first += features.row(i).transpose();
    cit->second.second += 1;
  }
  if (dom.size() < 2) throw SingleDomain("domain gap needs at least two domains");

  std::vector<Eigen::VectorXd> centroids;
  centroids.reserve(dom.size());
  for (auto& [d, acc] : dom) centroids.push_back(acc.first / acc.second);
  double between = 0.0;
  int pairs = 0;
  for (size_t a = 0; a < centroids.size(); ++a) {
    for (size_t b = a + 1; b < centroids.size(); ++b) {
      between += (centroids[a] - centroids[b]).norm();
      ++pairs;
    }
  }
  between /= static_cast<double>(pairs);

  // Within: mean pairwise class-centroid distance, averaged over domains
  // that have at least two classes.
  double within = 0.0;
  int within_domains = 0;
  for (const auto& [d, acc] : dom) {
    std::vector<Eigen::VectorXd> cc;
    for (const auto& [key, sum] : cls) {
      if (key.first == d) cc.push_back(sum.first / sum.second);
    }
    if (cc.size() < 2) continue;
    double total = 0.0;
    int count = 0;
    for (size_t a = 0; a < cc.size(); ++a) {
      for (size_t b = a + 1; b < cc.size(); ++b) {
        total += (cc[a] - cc[b]).norm();
        ++count;
      }
    }
    within += total / static_cast<double>(count);
    ++within_domains;
  }
  if (within_domains > 0) within /= static_cast<double>(within_domains);

  DomainGap gap;
  gap.between = between;
  gap.within = within;
  gap.ratio = within > 0.0 ? between / within : 0.0;
  return gap;
}

void feature_dump(const Eigen::MatrixXd& features, const std::vector<int>& class_ids,
                  const std::vector<int>& domain_ids, const std::string& path) {
  if (static_cast<Eigen::Index>(class_ids.size()) != features.rows() ||
      static_cast<Eigen::Index>(domain_ids.size()) != features.rows()) {
    throw ShapeMismatch("feature rows and id lists must align");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (Eigen::Index j = 0; j < features.cols(); ++j) out << 'f' << j << ',';
  out << "class_id,domain_id\n";
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      out << format_double(features(i, j)) << ',';
    }
    out << class_ids[i] << ',' << domain_ids[i] << "\n";
  }
  if (!out) throw IoError("write to " + path + " failed");
}

nlohmann::json report_to_json(const EvalReport& report) {
  return nlohmann::json{
      {"format_version", 1},
      {"map", report.retrieval.map},
      {"cmc",
       {{"rank1", report.retrieval.rank1},
        {"rank5", report.retrieval.rank5},
        {"rank10", report.retrieval.rank10}}},
      {"gap",
       {{"between", report.gap.between},
        {"within", report.gap.within},
        {"ratio", report.gap.ratio}}},
  };
}

EvalReport report_from_json(const nlohmann::json& doc) {
  if (doc.value("format_version", 0) != 1) {
    throw IoError("unsupported eval report format version");
  }
  EvalReport r;
  r.retrieval.map = doc.at("map").get<double>();
  r.retrieval.rank1 = doc.at("cmc").at("rank1").get<double>();
  r.retrieval.rank5 = doc.at("cmc").at("rank5").get<double>();
  r.retrieval.rank10 = doc.at("cmc").at("rank10").get<double>();
  r.gap.between = doc.at("gap").at("between").get<double>();
  r.gap.within = doc.at("gap").at("within").get<double>();
  r.gap.ratio = doc.at("gap").at("ratio").get<double>();
  return r;
}

}  // namespace ldlgen
