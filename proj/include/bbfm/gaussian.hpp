// Copyright 2026 The bbfm Authors. All rights reserved.
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

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace bbfm {

/**
 * Seedable N(0,1) source with a pinned algorithm so golden vectors stay
 * stable across releases and toolchains:
 *
 *   - engine: std::mt19937_64 seeded with the 64-bit seed (the engine's
 *     output sequence is fixed by the C++ standard);
 *   - uniforms: u = ((x >> 11) + 0.5) * 2^-53, strictly inside (0, 1);
 *   - normals: Box-Muller pairs, r = sqrt(-2 ln u1),
 *     g0 = r cos(2 pi u2), g1 = r sin(2 pi u2), emitted g0 then g1.
 *
 * std::normal_distribution is deliberately not used; its algorithm is
 * implementation-defined.
 */
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double next();
  void fill(std::span<double> out);
  std::vector<double> draw(std::size_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bbfm
