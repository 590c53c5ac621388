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

#include "bbfm/fading.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "bbfm/profiles.hpp"
#include "bbfm/spectrum.hpp"
#include "doctest.h"

using namespace bbfm;

namespace {

FadingConfig lmr60(std::uint64_t seed = 7) {
  return kLmr60.fading_config(450e6, 2000.0, seed);
}

// Kolmogorov-Smirnov distance to Rayleigh with E|H|^2 = 1: F(x) = 1 - exp(-x^2).
double rayleigh_ks(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = 1.0 - std::exp(-x[i] * x[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

double mean_square(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s / static_cast<double>(x.size());
}

}  // namespace

TEST_CASE("doppler spread at 450 MHz and 60 km/h is 50 Hz") {
  CHECK(lmr60().doppler_spread_hz() == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(lmr60().delay_spread_s == doctest::Approx(200e-6));
}

TEST_CASE("lmr60 envelope is calibrated and Rayleigh") {
  const auto env = generate_envelope(lmr60(), 1'000'000);
  REQUIRE(env.magnitudes.size() == 1'000'000);
  CHECK(env.rate_hz == 2000.0);
  CHECK(std::all_of(env.magnitudes.begin(), env.magnitudes.end(), [](double v) { return v >= 0.0; }));
  const double p = mean_square(env.magnitudes);
  CHECK(p >= 0.98);
  CHECK(p <= 1.02);
  CHECK(rayleigh_ks(env.magnitudes) < 0.01);
}

TEST_CASE("tap process stays inside the Doppler bandwidth") {
  const auto cfg = lmr60(11);
  const auto taps = generate_taps(cfg, 1 << 19);
  const Psd psd = welch_psd(std::span<const std::complex<double>>(taps.g1), cfg.output_rate_hz, 1 << 14);
  const double in_band = psd.band_power(-cfg.doppler_spread_hz(), cfg.doppler_spread_hz());
  CHECK(in_band / psd.total() >= 0.99);
  const double bw = psd.occupied_bandwidth(0.99);
  CHECK(bw >= 45.0);
  CHECK(bw <= 55.0);
  // Each tap carries half the power.
  double p1 = 0.0;
  for (auto g : taps.g1) p1 += std::norm(g);
  CHECK(p1 / static_cast<double>(taps.g1.size()) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("zero delay spread is still Rayleigh with unit power") {
  auto cfg = lmr60(3);
  cfg.delay_spread_s = 0.0;
  const auto taps = generate_taps(cfg, 400'000);
  const auto env = combine_taps(taps, cfg);
  for (std::size_t i = 0; i < 1000; ++i)
    CHECK(env.magnitudes[i] == doctest::Approx(std::abs(taps.g1[i] + taps.g2[i])).epsilon(1e-14));
  CHECK(mean_square(env.magnitudes) == doctest::Approx(1.0).epsilon(0.04));
  CHECK(rayleigh_ks(env.magnitudes) < 0.02);
}

TEST_CASE("zero velocity holds a single draw") {
  auto cfg = lmr60(5);
  cfg.velocity_mps = 0.0;
  CHECK(cfg.doppler_spread_hz() == 0.0);
  const auto env = generate_envelope(cfg, 5000);
  CHECK(std::all_of(env.magnitudes.begin(), env.magnitudes.end(),
                    [&](double v) { return v == env.magnitudes.front(); }));
  CHECK(env.magnitudes.front() > 0.0);
}

TEST_CASE("generation is deterministic per seed") {
  const auto a = generate_envelope(lmr60(99), 20'000);
  const auto b = generate_envelope(lmr60(99), 20'000);
  const auto c = generate_envelope(lmr60(100), 20'000);
  CHECK(a.magnitudes == b.magnitudes);
  CHECK(a.magnitudes != c.magnitudes);
}

TEST_CASE("invalid configurations are rejected") {
  auto cfg = lmr60();
  CHECK_THROWS_AS(generate_envelope(cfg, 0), std::invalid_argument);
  cfg.velocity_mps = 400.0;  // 1200 Hz Doppler at a 2000 Hz output rate
  CHECK_THROWS_AS(generate_envelope(cfg, 100), std::invalid_argument);
  cfg = lmr60();
  cfg.output_rate_hz = 100.0;  // exactly twice the Doppler spread
  CHECK_THROWS_AS(generate_envelope(cfg, 100), std::invalid_argument);
  cfg = lmr60();
  cfg.carrier_freq_hz = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = lmr60();
  cfg.velocity_mps = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("high Doppler falls back to the output rate internally") {
  auto cfg = lmr60(4);
  cfg.velocity_mps = kmh_to_mps(600.0);  // 500 Hz Doppler, 32x would exceed 2000 Hz
  const auto env = generate_envelope(cfg, 200'000);
  CHECK(mean_square(env.magnitudes) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("envelope to dB") {
  FadingEnvelope env{{1.0, 0.1, std::sqrt(2.0), 0.0, 1e-12}, 2000.0};
  const auto db = envelope_to_db(env);
  CHECK(db[0] == doctest::Approx(0.0));
  CHECK(db[1] == doctest::Approx(-20.0));
  CHECK(db[2] == doctest::Approx(3.0103).epsilon(1e-5));
  CHECK(db[3] == kEnvelopeFloorDb);
  CHECK(db[4] == kEnvelopeFloorDb);
}
