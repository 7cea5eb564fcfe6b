// Copyright 2026 The ilmefuse Authors
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

#ifndef ILMEFUSE_RNG_H_
#define ILMEFUSE_RNG_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "ilmefuse/common.h"

namespace ilmefuse {

// SplitMix64 generator. Standard-library distributions are
// implementation-defined, so everything that must reproduce across builds
// (corpus generation, model init, shuffles, dropout masks) goes through
// this class instead.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t NextU64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double Uniform() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  int UniformInt(int n) {
    Check(n > 0, "UniformInt: n must be positive, got ", n);
    return static_cast<int>(Uniform() * n);
  }

  // Approximately standard normal via the sum of 12 uniforms. Uses no libm
  // calls, so corpus synthesis stays bit-stable across platforms.
  double Gaussian() {
    double s = 0.0;
    for (int i = 0; i < 12; ++i) s += Uniform();
    return s - 6.0;
  }

  // In-place Fisher-Yates.
  template <typename T>
  void Shuffle(std::vector<T>* v) {
    for (int i = static_cast<int>(v->size()) - 1; i > 0; --i) {
      std::swap((*v)[i], (*v)[UniformInt(i + 1)]);
    }
  }

  // Independent stream for a named purpose under one root seed.
  static uint64_t DeriveSeed(uint64_t root, std::string_view tag) {
    uint64_t h = Fnv1a(tag);
    return root ^ (h + 0x9e3779b97f4a7c15ull + (root << 6) + (root >> 2));
  }

 private:
  uint64_t state_;
};

}  // namespace ilmefuse

#endif  // ILMEFUSE_RNG_H_
