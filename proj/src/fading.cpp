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

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bbfm/fir.hpp"
#include "bbfm/gaussian.hpp"

namespace bbfm {

namespace {

constexpr double kStopbandDb = 60.0;
// Transition band as a fraction of the Doppler spread; the stopband edge
// sits at the Doppler spread itself.
constexpr double kTransitionFraction = 0.08;

struct TapFilter {
  std::vector<double> taps;
  double internal_rate_hz = 0.0;
};

TapFilter design_tap_filter(const FadingConfig& c) {
  const double b = c.doppler_spread_hz();
  TapFilter f;
  f.internal_rate_hz = std::min(kFadingOversample * b, c.output_rate_hz);
  const double transition = kTransitionFraction * b / f.internal_rate_hz;
  const double cutoff = (1.0 - kTransitionFraction / 2.0) * b / f.internal_rate_hz;
  const auto n = fir::kaiser_length(kStopbandDb, transition);
  f.taps = fir::lowpass(cutoff, n, fir::kaiser_beta(kStopbandDb));
  return f;
}

// Filters white complex noise (E|w|^2 = 1) and returns `count` steady-state
// outputs; the first taps.size() - 1 inputs only prime the filter.
std::vector<std::complex<double>> filtered_noise(GaussianSource& rng,
                                                 const std::vector<double>& h,
                                                 std::size_t count) {
  const std::size_t n = count + h.size() - 1;
  std::vector<double> re(n), im(n);
  constexpr double kHalf = std::numbers::sqrt2 / 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = kHalf * rng.next();
    im[i] = kHalf * rng.next();
  }
  std::vector<std::complex<double>> out(count);
  const std::size_t taps = h.size();
  for (std::size_t i = 0; i < count; ++i) {
    double acc_re = 0.0, acc_im = 0.0;
    const double* xr = re.data() + i;
    const double* xi = im.data() + i;
    for (std::size_t k = 0; k < taps; ++k) {
      acc_re += h[k] * xr[k];
      acc_im += h[k] * xi[k];
    }
    out[i] = {acc_re, acc_im};
  }
  return out;
}

double lag_one_correlation(const std::vector<double>& h) {
  double r0 = 0.0, r1 = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    r0 += h[i] * h[i];
    if (i + 1 < h.size()) r1 += h[i] * h[i + 1];
  }
  return r1 / r0;
}

}  // namespace

void FadingConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("FadingConfig: " + what); };
  if (!(carrier_freq_hz > 0.0)) fail("carrier frequency must be > 0");
  if (!(velocity_mps >= 0.0)) fail("velocity must be >= 0");
  if (!(delay_spread_s >= 0.0)) fail("delay spread must be >= 0");
  if (!(output_rate_hz > 0.0)) fail("output rate must be > 0");
  if (!(doppler_spread_hz() < output_rate_hz / 2.0))
    fail("Doppler spread " + std::to_string(doppler_spread_hz()) +
         " Hz must be below half the output rate");
}

FadingTaps generate_taps(const FadingConfig& c, std::size_t num_samples) {
  c.validate();
  if (num_samples == 0) throw std::invalid_argument("generate_taps: num_samples must be > 0");

  FadingTaps out;
  out.rate_hz = c.output_rate_hz;
  GaussianSource rng(c.seed);
  constexpr double kHalf = std::numbers::sqrt2 / 2.0;

  if (c.doppler_spread_hz() == 0.0) {
    // No motion: a single draw per tap, held.
    const double g1_re = kHalf * rng.next();
    const double g1_im = kHalf * rng.next();
    const double g2_re = kHalf * rng.next();
    const double g2_im = kHalf * rng.next();
    const std::complex<double> g1(g1_re, g1_im);
    const std::complex<double> g2(g2_re, g2_im);
    out.g1.assign(num_samples, g1);
    out.g2.assign(num_samples, g2);
    return out;
  }

  const TapFilter filt = design_tap_filter(c);
  const double step = filt.internal_rate_hz / c.output_rate_hz;
  const double last_pos = step * static_cast<double>(num_samples - 1);
  const auto internal_count = static_cast<std::size_t>(std::floor(last_pos)) + 2;

  // Linear interpolation between samples with lag-one correlation rho loses
  // power by (1-t)^2 + t^2 + 2 t (1-t) rho at fraction t; undo it on average.
  const double rho = lag_one_correlation(filt.taps);
  double interp_gain = 0.0;
  for (std::size_t n = 0; n < num_samples; ++n) {
    const double pos = step * static_cast<double>(n);
    const double t = pos - std::floor(pos);
    interp_gain += (1.0 - t) * (1.0 - t) + t * t + 2.0 * t * (1.0 - t) * rho;
  }
  interp_gain /= static_cast<double>(num_samples);

  double filter_gain = 0.0;
  for (double v : filt.taps) filter_gain += v * v;
  const double scale = std::sqrt(0.5 / (filter_gain * interp_gain));

  const auto w1 = filtered_noise(rng, filt.taps, internal_count);
  const auto w2 = filtered_noise(rng, filt.taps, internal_count);

  out.g1.resize(num_samples);
  out.g2.resize(num_samples);
  for (std::size_t n = 0; n < num_samples; ++n) {
    const double pos = step * static_cast<double>(n);
    const auto i0 = static_cast<std::size_t>(std::floor(pos));
    const double t = pos - static_cast<double>(i0);
    out.g1[n] = scale * ((1.0 - t) * w1[i0] + t * w1[i0 + 1]);
    out.g2[n] = scale * ((1.0 - t) * w2[i0] + t * w2[i0 + 1]);
  }
  return out;
}

FadingEnvelope combine_taps(const FadingTaps& taps, const FadingConfig& c) {
  const std::complex<double> rot =
      std::polar(1.0, -2.0 * std::numbers::pi * c.delay_spread_s * c.output_rate_hz);
  FadingEnvelope env;
  env.rate_hz = taps.rate_hz;
  env.magnitudes.resize(taps.g1.size());
  for (std::size_t i = 0; i < taps.g1.size(); ++i)
    env.magnitudes[i] = std::abs(taps.g1[i] + rot * taps.g2[i]);
  return env;
}

FadingEnvelope generate_envelope(const FadingConfig& config, std::size_t num_samples) {
  return combine_taps(generate_taps(config, num_samples), config);
}

std::vector<double> envelope_to_db(const FadingEnvelope& env) {
  std::vector<double> out(env.magnitudes.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double h = env.magnitudes[i];
    out[i] = h < kEnvelopeFloor ? kEnvelopeFloorDb : 20.0 * std::log10(h);
  }
  return out;
}

}  // namespace bbfm
