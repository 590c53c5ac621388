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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bbfm {

/// Power spectral density estimate. Frequencies ascend; for complex input
/// they span [-fs/2, fs/2), for real input [0, fs/2] (one-sided).
struct Psd {
  std::vector<double> freq_hz;
  std::vector<double> power;
  bool two_sided = false;

  double total() const;
  /// Power in [low_hz, high_hz] (inclusive bins).
  double band_power(double low_hz, double high_hz) const;
  /// Smallest B with power in |f| <= B at least `fraction` of the total.
  double occupied_bandwidth(double fraction) const;
};

/// Welch estimate, Hann window, 50% overlap. `segment` must be a power of two
/// no longer than the input.
Psd welch_psd(std::span<const std::complex<double>> x, double sample_rate_hz, std::size_t segment);
Psd welch_psd(std::span<const double> x, double sample_rate_hz, std::size_t segment);

}  // namespace bbfm
