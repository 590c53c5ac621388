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

#include <optional>
#include <string>
#include <string_view>

#include "bbfm/fading.hpp"
#include "bbfm/fm_link.hpp"

/// Named parameter sets for the simulator ("Channel Model parameters").
namespace bbfm {

struct LinkProfile {
  std::string name;
  double carrier_freq_hz = 450e6;
  /// Symbol rate of the payload; 0 for the analog profile.
  double symbol_rate_hz = 0.0;
  FmLinkParams link;
};

/// Analog FM: f_c 450 MHz, f_d 2500 Hz, f_m 3000 Hz, NF 5 dB; sinusoidal
/// x-bar^2 = 0.5 at A = 1.
LinkProfile analog_fm_profile();

/// RADE: f_c 450 MHz, R_s 2000 sym/s, f_d 1800 Hz, f_m 2880 Hz, NF 5 dB;
/// A = 1 and x-bar^2 = 0.5 unless overridden.
LinkProfile rade_profile();

/// "analog-fm" or "rade"; throws std::invalid_argument otherwise.
LinkProfile profile_by_name(std::string_view name);

/// Two-path fading channel named lmr<km/h>, e.g. lmr60.
struct LmrChannel {
  double velocity_kmh = 60.0;
  double delay_us = 200.0;

  FadingConfig fading_config(double carrier_freq_hz, double output_rate_hz, std::uint64_t seed) const;
};

/// The training channel: 60 km/h, 200 us path delay.
inline constexpr LmrChannel kLmr60{60.0, 200.0};

}  // namespace bbfm
