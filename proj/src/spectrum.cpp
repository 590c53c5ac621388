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

#include "bbfm/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace bbfm {

namespace {

struct FftwDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};

using FftwBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;
using FftwPlan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// Accumulates |FFT|^2 of Hann-windowed, 50%-overlapped segments in natural
// FFT bin order.
template <typename Sample>
std::vector<double> welch_accumulate(std::span<const Sample> x, std::size_t segment) {
  if (segment < 2 || (segment & (segment - 1)) != 0)
    throw std::invalid_argument("welch_psd: segment must be a power of two");
  if (x.size() < segment) throw std::invalid_argument("welch_psd: input shorter than segment");

  FftwBuffer buf(fftw_alloc_complex(segment));
  FftwPlan plan(fftw_plan_dft_1d(static_cast<int>(segment), buf.get(), buf.get(), FFTW_FORWARD,
                                 FFTW_ESTIMATE));
  std::vector<double> window(segment);
  double wpow = 0.0;
  for (std::size_t i = 0; i < segment; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                      static_cast<double>(segment));
    wpow += window[i] * window[i];
  }

  std::vector<double> acc(segment, 0.0);
  std::size_t count = 0;
  for (std::size_t start = 0; start + segment <= x.size(); start += segment / 2) {
    for (std::size_t i = 0; i < segment; ++i) {
      const std::complex<double> v(x[start + i]);
      buf[i][0] = v.real() * window[i];
      buf[i][1] = v.imag() * window[i];
    }
    fftw_execute(plan.get());
    for (std::size_t i = 0; i < segment; ++i) acc[i] += buf[i][0] * buf[i][0] + buf[i][1] * buf[i][1];
    ++count;
  }
  for (double& v : acc) v /= static_cast<double>(count) * wpow;
  return acc;
}

}  // namespace

double Psd::total() const {
  double s = 0.0;
  for (double p : power) s += p;
  return s;
}

double Psd::band_power(double low_hz, double high_hz) const {
  double s = 0.0;
  for (std::size_t i = 0; i < freq_hz.size(); ++i)
    if (freq_hz[i] >= low_hz && freq_hz[i] <= high_hz) s += power[i];
  return s;
}

double Psd::occupied_bandwidth(double fraction) const {
  // Sort bins by |f| and accumulate until the target fraction is reached.
  std::vector<std::size_t> order(freq_hz.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(freq_hz[a]) < std::abs(freq_hz[b]);
  });
  const double target = fraction * total();
  double acc = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    acc += power[order[k]];
    if (acc >= target) return std::abs(freq_hz[order[k]]);
  }
  return std::abs(freq_hz[order.back()]);
}

Psd welch_psd(std::span<const std::complex<double>> x, double fs, std::size_t segment) {
  const auto acc = welch_accumulate(x, segment);
  Psd psd;
  psd.two_sided = true;
  psd.freq_hz.resize(segment);
  psd.power.resize(segment);
  const std::size_t half = segment / 2;
  for (std::size_t k = 0; k < segment; ++k) {
    const std::size_t bin = (k + half) % segment;  // fftshift
    const auto signed_bin = static_cast<double>(k) - static_cast<double>(half);
    psd.freq_hz[k] = signed_bin * fs / static_cast<double>(segment);
    psd.power[k] = acc[bin] / fs;
  }
  return psd;
}

Psd welch_psd(std::span<const double> x, double fs, std::size_t segment) {
  const auto acc = welch_accumulate(x, segment);
  Psd psd;
  const std::size_t half = segment / 2;
  psd.freq_hz.resize(half + 1);
  psd.power.resize(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    psd.freq_hz[k] = static_cast<double>(k) * fs / static_cast<double>(segment);
    const bool edge = (k == 0 || k == half);
    psd.power[k] = (edge ? acc[k] : 2.0 * acc[k]) / fs;
  }
  return psd;
}

}  // namespace bbfm
