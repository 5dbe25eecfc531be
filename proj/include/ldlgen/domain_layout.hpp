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

#ifndef LDLGEN_DOMAIN_LAYOUT_HPP_
#define LDLGEN_DOMAIN_LAYOUT_HPP_

#include <vector>

#include "ldlgen/common.hpp"

namespace ldlgen {

/// Partition of classes into domains: which domain each class belongs to,
/// and the ordered index set of each domain.
///
/// The layout itself accepts a single domain (baseline training on one
/// source allows it); LdlEngine additionally requires at least two.
class DomainLayout {
 public:
  // class_to_domain[c] = domain of class c. Domains must be 0..K-1 with no
  // empty domain.
  explicit DomainLayout(std::vector<int> class_to_domain);

  // Contiguous blocks: counts[d] consecutive classes per domain d.
  static DomainLayout from_counts(const std::vector<int>& counts);

  int class_count() const { return static_cast<int>(class_to_domain_.size()); }
  int domain_count() const { return static_cast<int>(index_sets_.size()); }

  int domain_of(int class_index) const;
  const std::vector<int>& classes_in(int domain) const;
  int domain_size(int domain) const;
  const std::vector<int>& assignments() const { return class_to_domain_; }

  bool operator==(const DomainLayout& other) const {
    return class_to_domain_ == other.class_to_domain_;
  }

 private:
  std::vector<int> class_to_domain_;
  std::vector<std::vector<int>> index_sets_;
};

}  // namespace ldlgen

#endif  // LDLGEN_DOMAIN_LAYOUT_HPP_
