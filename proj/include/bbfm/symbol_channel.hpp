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
#include <optional>
#include <vector>

#include "bbfm/fading.hpp"
#include "bbfm/fm_link.hpp"

/**
 * Linearized BBFM channel at the symbol rate:
 *
 *     zhat_i = z_i + sigma_i g_i,   g_i ~ N(0,1)
 *
 * sigma_i follows from the set point and the i-th fading sample through the
 * piecewise demodulator model. Symbol amplitudes are never scaled by |H|;
 * fading only modulates the noise.
 */
namespace bbfm {

struct SymbolStream {
  std::vector<double> symbols;
  double symbol_rate_hz = 2000.0;
};

struct ChannelRun {
  FmLinkParams link;
  ReceivedPowerDbm set_point;
  /// Empty means AWGN (|H| = 1 for every symbol).
  std::optional<FadingEnvelope> fading;
  std::uint64_t noise_seed = 1;
};

/// Received stream plus the per-symbol intermediates.
struct ChannelResult {
  SymbolStream rx;
  std::vector<double> sigma;
  std::vector<double> noise;
};

ChannelResult apply_channel_traced(const SymbolStream& stream, const ChannelRun& run);

SymbolStream apply_channel(const SymbolStream& stream, const ChannelRun& run);

/// Largest value measure_snr reports (rx == tx).
inline constexpr double kSnrCapDb = 200.0;

/// Minimum stream length accepted by measure_snr.
inline constexpr std::size_t kMinSnrSymbols = 1000;

/// SNR of rx against tx with A^2 as the signal reference.
SnrDb measure_snr(const SymbolStream& tx, const SymbolStream& rx, double peak_amplitude = 1.0);

}  // namespace bbfm
