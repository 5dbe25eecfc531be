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

#include "ldlgen/domain_layout.hpp"

#include <algorithm>
#include <string>

namespace ldlgen {

DomainLayout::DomainLayout(std::vector<int> class_to_domain)
    : class_to_domain_(std::move(class_to_domain)) {
  if (class_to_domain_.empty()) {
    throw InvalidLayout("layout requires at least one class");
  }
  int max_domain = *std::max_element(class_to_domain_.begin(), class_to_domain_.end());
  int min_domain = *std::min_element(class_to_domain_.begin(), class_to_domain_.end());
  if (min_domain < 0) {
    throw InvalidLayout("negative domain index");
  }
  index_sets_.resize(static_cast<size_t>(max_domain) + 1);
  for (int c = 0; c < class_count(); ++c) {
    index_sets_[class_to_domain_[c]].push_back(c);
  }
  for (size_t d = 0; d < index_sets_.size(); ++d) {
    if (index_sets_[d].empty()) {
      throw InvalidLayout("domain " + std::to_string(d) + " has no classes");
    }
  }
}

DomainLayout DomainLayout::from_counts(const std::vector<int>& counts) {
  std::vector<int> assignment;
  for (size_t d = 0; d < counts.size(); ++d) {
    if (counts[d] < 1) {
      throw InvalidLayout("domain " + std::to_string(d) + " has no classes");
    }
    assignment.insert(assignment.end(), counts[d], static_cast<int>(d));
  }
  return DomainLayout(std::move(assignment));
}

int DomainLayout::domain_of(int class_index) const {
  if (class_index < 0 || class_index >= class_count()) {
    throw InvalidLayout("class index " + std::to_string(class_index) + " out of range");
  }
  return class_to_domain_[class_index];
}

const std::vector<int>& DomainLayout::classes_in(int domain) const {
  if (domain < 0 || domain >= domain_count()) {
    throw InvalidLayout("domain index " + std::to_string(domain) + " out of range");
  }
  return index_sets_[domain];
}

int DomainLayout::domain_size(int domain) const {
  return static_cast<int>(classes_in(domain).size());
}

}  // namespace ldlgen
