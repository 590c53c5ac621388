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

#include "bbfm/profiles.hpp"

#include <stdexcept>

namespace bbfm {

LinkProfile analog_fm_profile() {
  FmLinkParams::Fields f;
  f.deviation_hz = 2500.0;
  f.max_mod_freq_hz = 3000.0;
  f.noise_figure_db = 5.0;
  return {"analog-fm", 450e6, 0.0, FmLinkParams(f)};
}

LinkProfile rade_profile() {
  FmLinkParams::Fields f;
  f.deviation_hz = 1800.0;
  f.max_mod_freq_hz = 2880.0;
  f.noise_figure_db = 5.0;
  return {"rade", 450e6, 2000.0, FmLinkParams(f)};
}

LinkProfile profile_by_name(std::string_view name) {
  if (name == "analog-fm") return analog_fm_profile();
  if (name == "rade") return rade_profile();
  throw std::invalid_argument("unknown profile '" + std::string(name) + "' (expected analog-fm or rade)");
}

FadingConfig LmrChannel::fading_config(double carrier_freq_hz, double output_rate_hz,
                                       std::uint64_t seed) const {
  FadingConfig c;
  c.carrier_freq_hz = carrier_freq_hz;
  c.velocity_mps = kmh_to_mps(velocity_kmh);
  c.delay_spread_s = delay_us * 1e-6;
  c.output_rate_hz = output_rate_hz;
  c.seed = seed;
  return c;
}

}  // namespace bbfm
