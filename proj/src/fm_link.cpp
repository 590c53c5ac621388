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

#include "bbfm/fm_link.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bbfm {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("FmLinkParams: ") + what);
}

}  // namespace

FmLinkParams::FmLinkParams(const Fields& f) : f_(f) {
  require(std::isfinite(f.deviation_hz) && f.deviation_hz > 0.0, "deviation must be > 0");
  require(std::isfinite(f.max_mod_freq_hz) && f.max_mod_freq_hz > 0.0,
          "max modulating frequency must be > 0");
  require(std::isfinite(f.noise_figure_db), "noise figure must be finite");
  require(std::isfinite(f.temperature_k) && f.temperature_k > 0.0, "temperature must be > 0");
  require(f.peak_amplitude > 0.0 && f.peak_amplitude <= 1.0, "peak amplitude must be in (0, 1]");
  require(f.mean_mod_power > 0.0 &&
              f.mean_mod_power <= f.peak_amplitude * f.peak_amplitude,
          "mean modulation power must be in (0, A^2]");
}

double fm_gain_db(const FmLinkParams& p) {
  const double beta = p.modulation_index();
  // 1e3 converts kT [W/Hz] to mW/Hz so R can be given in dBm.
  const double noise_mw = 1e3 * kBoltzmann * p.temperature_k() * p.max_mod_freq_hz();
  return 10.0 * std::log10(3.0 * beta * beta * p.mean_mod_power() / noise_mw) -
         p.noise_figure_db();
}

ReceivedPowerDbm threshold_dbm(const FmLinkParams& p) {
  return {kThresholdSnrDb - fm_gain_db(p)};
}

SnrDb snr_db(const FmLinkParams& p, ReceivedPowerDbm set_point, double fading_db) {
  const double gain = fm_gain_db(p);
  const double threshold = kThresholdSnrDb - gain;
  const double r = set_point.value + fading_db;
  if (r >= threshold) return {r + gain};
  return {kSubThresholdSlope * r + gain - (kSubThresholdSlope - 1.0) * threshold};
}

double noise_sigma(const FmLinkParams& p, SnrDb snr) {
  // A / sqrt(10^(snr/10)), written to stay finite for very large SNR.
  return p.peak_amplitude() * std::pow(10.0, -snr.value / 20.0);
}

}  // namespace bbfm
