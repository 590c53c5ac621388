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

#include "bbfm/analog_fm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "bbfm/fir.hpp"
#include "bbfm/gaussian.hpp"

namespace bbfm {

namespace {

constexpr double kBandStopbandDb = 60.0;
constexpr double kBandTransitionHz = 50.0;
constexpr double kEmphasisZeroHz = 300.0;
constexpr double kEmphasisPoleHz = 3000.0;
constexpr double kEmphasisRefHz = 1000.0;
constexpr double kHilbertTransitionHz = 250.0;

struct Shelf {
  double zero = 0.0;  // z-plane zero of the pre-emphasis network
  double pole = 0.0;
  double gain = 1.0;
};

Shelf emphasis_shelf(double fs) {
  Shelf s;
  s.zero = std::exp(-2.0 * std::numbers::pi * kEmphasisZeroHz / fs);
  s.pole = std::exp(-2.0 * std::numbers::pi * kEmphasisPoleHz / fs);
  const auto z1 = std::polar(1.0, -2.0 * std::numbers::pi * kEmphasisRefHz / fs);
  s.gain = std::abs((1.0 - s.pole * z1) / (1.0 - s.zero * z1));
  return s;
}

// y[n] = g (x[n] - b x[n-1]) + a y[n-1]
std::vector<double> first_order(const std::vector<double>& x, double g, double b, double a) {
  std::vector<double> y(x.size());
  double x1 = 0.0, y1 = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    y1 = g * (x[n] - b * x1) + a * y1;
    x1 = x[n];
    y[n] = y1;
  }
  return y;
}

double peak_abs(const std::vector<double>& x) {
  double p = 0.0;
  for (double v : x) p = std::max(p, std::abs(v));
  return p;
}

double papr_of(const std::vector<double>& x) { return measure_papr_db({x, kSpeechRateHz}); }

}  // namespace

namespace fm_stages {

std::vector<double> bandpass_taps(double low_hz, double high_hz, double fs) {
  const double half = kBandTransitionHz / 2.0;
  const auto n = fir::kaiser_length(kBandStopbandDb, kBandTransitionHz / fs);
  return fir::bandpass((low_hz - half) / fs, (high_hz + half) / fs, n,
                       fir::kaiser_beta(kBandStopbandDb));
}

std::vector<double> preemphasis(const std::vector<double>& x, double fs) {
  const Shelf s = emphasis_shelf(fs);
  return first_order(x, s.gain, s.zero, s.pole);
}

std::vector<double> deemphasis(const std::vector<double>& x, double fs) {
  const Shelf s = emphasis_shelf(fs);
  return first_order(x, 1.0 / s.gain, s.pole, s.zero);
}

std::vector<double> envelope_limiter(const std::vector<double>& x, double clip_db) {
  if (x.empty()) return {};
  const auto h = fir::hilbert(fir::kaiser_length(kBandStopbandDb, kHilbertTransitionHz / kSpeechRateHz),
                              fir::kaiser_beta(kBandStopbandDb));
  const auto quad = fir::filter_same(h, x);
  double power = 0.0;
  for (double v : x) power += v * v;
  const double rms = std::sqrt(power / static_cast<double>(x.size()));
  const double clip = rms * std::pow(10.0, clip_db / 20.0);
  // Re{a * min(1, c/|a|)} with a = x + j H{x}.
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double env = std::hypot(x[i], quad[i]);
    y[i] = env > clip ? x[i] * (clip / env) : x[i];
  }
  return y;
}

}  // namespace fm_stages

void FmBaselineConfig::validate(double fs) const {
  if (!(band_low_hz > 0.0 && band_low_hz < band_high_hz && band_high_hz < fs / 2.0))
    throw std::invalid_argument("FmBaselineConfig: need 0 < band_low < band_high < fs/2");
  if (fading && fading->rate_hz != fs)
    throw std::invalid_argument("FmBaselineConfig: fading rate must equal the speech rate");
}

FmBaselineResult run_fm_baseline_report(const SpeechBuffer& speech, const FmBaselineConfig& cfg) {
  if (speech.samples.empty()) throw std::invalid_argument("run_fm_baseline: empty input");
  if (speech.sample_rate_hz != kSpeechRateHz)
    throw std::invalid_argument("run_fm_baseline: input must be sampled at 8000 Hz");
  cfg.validate(speech.sample_rate_hz);
  for (double v : speech.samples)
    if (!std::isfinite(v)) throw std::invalid_argument("run_fm_baseline: non-finite sample");
  if (peak_abs(speech.samples) == 0.0) throw std::invalid_argument("run_fm_baseline: silent input");

  const double fs = speech.sample_rate_hz;
  const std::size_t n = speech.samples.size();
  FmBaselineResult r;
  r.papr_input_db = papr_of(speech.samples);

  std::vector<double> bpf;
  if (cfg.bandpass_enabled) bpf = fm_stages::bandpass_taps(cfg.band_low_hz, cfg.band_high_hz, fs);

  std::vector<double> x = speech.samples;
  if (cfg.bandpass_enabled) x = fir::filter_same(bpf, x);
  if (cfg.preemph_enabled) x = fm_stages::preemphasis(x, fs);
  r.papr_limiter_in_db = peak_abs(x) > 0.0 ? papr_of(x) : 0.0;
  if (cfg.limiter_enabled) x = fm_stages::envelope_limiter(x, cfg.limiter_clip_db);
  r.papr_limiter_out_db = peak_abs(x) > 0.0 ? papr_of(x) : 0.0;
  if (cfg.bandpass_enabled) x = fir::filter_same(bpf, x);
  if (cfg.preemph_enabled) x = fm_stages::deemphasis(x, fs);

  if (cfg.gain_control_enabled) {
    const double peak = peak_abs(x);
    if (peak == 0.0) throw std::invalid_argument("run_fm_baseline: chain output is silent");
    r.gain = cfg.link.peak_amplitude() / peak;
    for (double& v : x) v *= r.gain;
  }
  r.mean_power = measure_mean_power({x, fs});

  // SNR is quoted in a bandwidth of f_m; white noise at fs spreads the same
  // density over fs/2.
  const double density_scale = (fs / 2.0) / cfg.link.max_mod_freq_hz();
  r.sigma_s = noise_sigma(cfg.link, snr_db(cfg.link, cfg.set_point, 0.0));
  r.noise_variance = r.sigma_s * r.sigma_s * density_scale;
  const double out_band = cfg.bandpass_enabled ? (cfg.band_high_hz - cfg.band_low_hz) : fs / 2.0;
  r.predicted_output_noise_power = r.sigma_s * r.sigma_s * out_band / cfg.link.max_mod_freq_hz();

  std::vector<double> clean = x;
  if (cfg.noise_enabled) {
    if (cfg.fading && cfg.fading->magnitudes.size() < n)
      throw std::invalid_argument("run_fm_baseline: fading envelope shorter than speech");
    const std::vector<double> fade_db = cfg.fading ? envelope_to_db(*cfg.fading) : std::vector<double>{};
    GaussianSource rng(cfg.seed);
    const double awgn_scale = std::sqrt(r.noise_variance);
    for (std::size_t i = 0; i < n; ++i) {
      const double scale =
          cfg.fading ? noise_sigma(cfg.link, snr_db(cfg.link, cfg.set_point, fade_db[i])) *
                           std::sqrt(density_scale)
                     : awgn_scale;
      x[i] += scale * rng.next();
    }
  }
  if (cfg.bandpass_enabled) {
    x = fir::filter_same(bpf, x);
    clean = fir::filter_same(bpf, clean);
  }
  r.output = {std::move(x), fs};
  r.clean_output = {std::move(clean), fs};
  return r;
}

SpeechBuffer run_fm_baseline(const SpeechBuffer& speech, const FmBaselineConfig& cfg) {
  return run_fm_baseline_report(speech, cfg).output;
}

double measure_papr_db(const SpeechBuffer& speech) {
  if (speech.samples.empty()) throw std::invalid_argument("measure_papr_db: empty input");
  double peak = 0.0, sum = 0.0;
  for (double v : speech.samples) {
    peak = std::max(peak, v * v);
    sum += v * v;
  }
  if (peak == 0.0) throw std::invalid_argument("measure_papr_db: all-zero input");
  return 10.0 * std::log10(peak / (sum / static_cast<double>(speech.samples.size())));
}

double measure_mean_power(const SpeechBuffer& speech) {
  if (speech.samples.empty()) throw std::invalid_argument("measure_mean_power: empty input");
  double sum = 0.0;
  for (double v : speech.samples) sum += v * v;
  return sum / static_cast<double>(speech.samples.size());
}

}  // namespace bbfm
