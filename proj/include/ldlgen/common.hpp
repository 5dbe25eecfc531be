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

#ifndef LDLGEN_COMMON_HPP_
#define LDLGEN_COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ldlgen {

// ---------------------------------------------------------------------------
// Error types. Each maps to one failure mode of the public API; callers can
// catch ldlgen::Error to handle any of them.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidLayout : Error { using Error::Error; };
struct NotAProbabilityVector : Error { using Error::Error; };
struct SameDomainQuery : Error { using Error::Error; };
struct DegenerateSimilarity : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct InvalidEpsilon : Error { using Error::Error; };
struct NoValidTriplet : Error { using Error::Error; };
struct NonFiniteInput : Error { using Error::Error; };
struct NonFiniteGradient : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct StaleCache : Error { using Error::Error; };
struct InvalidSpec : Error { using Error::Error; };
struct InsufficientSamples : Error { using Error::Error; };
struct NoValidMatch : Error { using Error::Error; };
struct SingleDomain : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Deterministic random source. mt19937_64 is fully specified by the standard;
// the distributions here are hand-rolled so streams are identical across
// compilers and standard libraries.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller. No caching of the second value, so the
  // stream position depends only on the number of calls.
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  double normal(double stddev) { return stddev * normal(); }

  // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  uint64_t below(uint64_t n) {
    if (n == 0) throw Error("Rng::below: n must be positive");
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

// Derives an independent stream seed from a root seed and a stream name.
// FNV-1a over the name, mixed with the root via splitmix64 finalization.
uint64_t seed_stream(uint64_t root, std::string_view name);

// Shortest exact decimal text for a double (round-trips via strtod).
std::string format_double(double v);

}  // namespace ldlgen

#endif  // LDLGEN_COMMON_HPP_
