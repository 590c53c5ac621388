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
#include <cstdint>
#include <vector>

/**
 * Two-path Rayleigh fading magnitude generator.
 *
 *     y(t) = x(t) G1(t) + x(t - d) G2(t),   |H| = |G1 + e^{-j 2 pi d F} G2|
 *
 * G1 and G2 are independent complex Gaussian processes band limited to the
 * Doppler spread B = 2 f_c v / c, each with mean power 1/2 so E|H|^2 = 1.
 * Construction: white complex Gaussian at an internal rate of 32 B (capped at
 * the output rate), a Kaiser low-pass whose stopband starts at B, then linear
 * interpolation to the output rate. F is the output rate.
 */
namespace bbfm {

inline constexpr double kSpeedOfLight = 3e8;

/// Internal tap rate as a multiple of the Doppler spread.
inline constexpr double kFadingOversample = 32.0;

struct FadingConfig {
  double carrier_freq_hz = 450e6;
  double velocity_mps = 0.0;
  double delay_spread_s = 0.0;
  double output_rate_hz = 2000.0;
  std::uint64_t seed = 1;

  double doppler_spread_hz() const { return 2.0 * carrier_freq_hz * velocity_mps / kSpeedOfLight; }

  /// Throws std::invalid_argument on a bad config (including Doppler >= rate/2).
  void validate() const;
};

struct FadingEnvelope {
  std::vector<double> magnitudes;
  double rate_hz = 0.0;
};

/// Both complex tap processes at the output rate.
struct FadingTaps {
  std::vector<std::complex<double>> g1;
  std::vector<std::complex<double>> g2;
  double rate_hz = 0.0;
};

FadingTaps generate_taps(const FadingConfig& config, std::size_t num_samples);

/// Combines taps into |H| with the configured delay-spread rotation.
FadingEnvelope combine_taps(const FadingTaps& taps, const FadingConfig& config);

FadingEnvelope generate_envelope(const FadingConfig& config, std::size_t num_samples);

/// |H| below this is clamped when converting to dB.
inline constexpr double kEnvelopeFloor = 1e-10;
inline constexpr double kEnvelopeFloorDb = -200.0;

std::vector<double> envelope_to_db(const FadingEnvelope& env);

/// Vehicle speed conversion used by the CLI and profiles.
constexpr double kmh_to_mps(double kmh) { return kmh / 3.6; }

}  // namespace bbfm
