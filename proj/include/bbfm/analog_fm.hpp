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
 * Analog FM comparison chain, all at 8 kHz:
 *
 *   BPF 300-3000 -> pre-emphasis -> Hilbert envelope limiter -> BPF 300-3000
 *   -> de-emphasis -> gain control (peak = A) -> + N(0, sigma^2) -> BPF 300-3000
 *
 * sigma comes from the same piecewise demodulator model as the symbol
 * channel. That SNR is referenced to a noise bandwidth of f_m, so the white
 * noise generated at F_s has variance sigma_s^2 (F_s / 2) / f_m.
 *
 * Pre-emphasis is a first-order shelf with its zero at 300 Hz (531 us) and
 * its pole at 3 kHz, normalized to unity gain at 1 kHz; de-emphasis is its
 * exact inverse. Noise is added after de-emphasis.
 */
namespace bbfm {

inline constexpr double kSpeechRateHz = 8000.0;

struct SpeechBuffer {
  std::vector<double> samples;
  double sample_rate_hz = kSpeechRateHz;
};

struct FmBaselineConfig {
  explicit FmBaselineConfig(const FmLinkParams& link_params) : link(link_params) {}

  FmLinkParams link;
  ReceivedPowerDbm set_point{-40.0};
  /// Per-sample fading at the speech rate; empty means AWGN.
  std::optional<FadingEnvelope> fading;
  double band_low_hz = 300.0;
  double band_high_hz = 3000.0;
  bool bandpass_enabled = true;
  bool preemph_enabled = true;
  bool limiter_enabled = true;
  bool gain_control_enabled = true;
  bool noise_enabled = true;
  /// Envelope clip level relative to the RMS of the limiter input [dB].
  double limiter_clip_db = 1.5;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument for inconsistent settings at `sample_rate_hz`.
  void validate(double sample_rate_hz) const;
};

struct FmBaselineResult {
  SpeechBuffer output;
  /// Noise-free signal as it leaves the final band-pass.
  SpeechBuffer clean_output;
  double papr_input_db = 0.0;
  double papr_limiter_in_db = 0.0;
  double papr_limiter_out_db = 0.0;
  /// x-bar^2 of the signal after gain control.
  double mean_power = 0.0;
  double gain = 1.0;
  /// sigma_s from the link model at the set point with |H| = 1.
  double sigma_s = 0.0;
  /// Per-sample variance of the injected white noise at the set point.
  double noise_variance = 0.0;
  /// Noise power expected after the final band-pass.
  double predicted_output_noise_power = 0.0;
};

FmBaselineResult run_fm_baseline_report(const SpeechBuffer& speech, const FmBaselineConfig& config);

SpeechBuffer run_fm_baseline(const SpeechBuffer& speech, const FmBaselineConfig& config);

/// 10 log10(max s^2 / mean s^2). Throws on empty or all-zero input.
double measure_papr_db(const SpeechBuffer& speech);

double measure_mean_power(const SpeechBuffer& speech);

// Individual stages, exposed for tests and tooling.
namespace fm_stages {

std::vector<double> bandpass_taps(double low_hz, double high_hz, double sample_rate_hz);
std::vector<double> preemphasis(const std::vector<double>& x, double sample_rate_hz);
std::vector<double> deemphasis(const std::vector<double>& x, double sample_rate_hz);
std::vector<double> envelope_limiter(const std::vector<double>& x, double clip_db);

}  // namespace fm_stages

}  // namespace bbfm
