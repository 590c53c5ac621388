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

/**
 * Closed-form FM demodulator link budget.
 *
 * Above threshold the demodulator output SNR (noise measured in the
 * modulating bandwidth f_m) is linear in the received power:
 *
 *     SNR_dB = R_dBm + G_FM
 *     G_FM   = 10 log10(3 beta^2 xbar2 / (1e3 k T f_m)) - NF_dB
 *
 * Below the threshold T_dBm = 12 - G_FM the output SNR falls with a slope of
 * 3 dB per dB of received power. Noise is then scaled so that a symbol of
 * peak amplitude A sees that SNR: sigma_s = A / sqrt(SNR).
 */

namespace bbfm {

/// Boltzmann constant, exact SI 2019 value [J/K].
inline constexpr double kBoltzmann = 1.380649e-23;

/// Output SNR at which the FM demodulator is taken to enter threshold [dB].
inline constexpr double kThresholdSnrDb = 12.0;

/// Slope of output SNR versus received power below threshold [dB/dB].
inline constexpr double kSubThresholdSlope = 3.0;

struct ReceivedPowerDbm {
  double value = 0.0;
};

struct SnrDb {
  double value = 0.0;
};

/// FM link constants. Validated on construction; beta is always derived.
class FmLinkParams {
 public:
  struct Fields {
    double deviation_hz = 2500.0;
    double max_mod_freq_hz = 3000.0;
    double noise_figure_db = 5.0;
    double temperature_k = 274.0;
    double peak_amplitude = 1.0;
    double mean_mod_power = 0.5;
  };

  /// Throws std::invalid_argument if any invariant is violated.
  explicit FmLinkParams(const Fields& f);

  double deviation_hz() const { return f_.deviation_hz; }
  double max_mod_freq_hz() const { return f_.max_mod_freq_hz; }
  double noise_figure_db() const { return f_.noise_figure_db; }
  double temperature_k() const { return f_.temperature_k; }
  double peak_amplitude() const { return f_.peak_amplitude; }
  double mean_mod_power() const { return f_.mean_mod_power; }
  double modulation_index() const { return f_.deviation_hz / f_.max_mod_freq_hz; }

  const Fields& fields() const { return f_; }

 private:
  Fields f_;
};

double fm_gain_db(const FmLinkParams& params);

ReceivedPowerDbm threshold_dbm(const FmLinkParams& params);

/// Piecewise demodulator output SNR for set point R and fade H_dB.
SnrDb snr_db(const FmLinkParams& params, ReceivedPowerDbm set_point, double fading_db);

/// Per-symbol noise standard deviation giving `snr` against peak amplitude A.
double noise_sigma(const FmLinkParams& params, SnrDb snr);

}  // namespace bbfm
