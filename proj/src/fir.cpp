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

#include "bbfm/fir.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace bbfm::fir {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

void require_odd(std::size_t n) {
  if (n == 0 || n % 2 == 0) throw std::invalid_argument("fir: tap count must be odd");
}

}  // namespace

double kaiser_beta(double atten_db) {
  if (atten_db > 50.0) return 0.1102 * (atten_db - 8.7);
  if (atten_db >= 21.0)
    return 0.5842 * std::pow(atten_db - 21.0, 0.4) + 0.07886 * (atten_db - 21.0);
  return 0.0;
}

std::size_t kaiser_length(double atten_db, double transition) {
  if (transition <= 0.0) throw std::invalid_argument("fir: transition width must be > 0");
  const double n = (atten_db - 7.95) / (2.285 * 2.0 * kPi * transition) + 1.0;
  auto taps = static_cast<std::size_t>(std::ceil(n));
  return taps | 1u;
}

std::vector<double> kaiser_window(std::size_t n, double beta) {
  std::vector<double> w(n, 1.0);
  if (n == 1) return w;
  const double denom = std::cyl_bessel_i(0.0, beta);
  const double half = static_cast<double>(n - 1) / 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (static_cast<double>(i) - half) / half;
    w[i] = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
  }
  return w;
}

std::vector<double> lowpass(double cutoff, std::size_t num_taps, double beta) {
  require_odd(num_taps);
  if (cutoff <= 0.0 || cutoff >= 0.5) throw std::invalid_argument("fir: cutoff out of range");
  const auto w = kaiser_window(num_taps, beta);
  const double mid = static_cast<double>(num_taps - 1) / 2.0;
  std::vector<double> h(num_taps);
  double sum = 0.0;
  for (std::size_t i = 0; i < num_taps; ++i) {
    const double t = static_cast<double>(i) - mid;
    h[i] = 2.0 * cutoff * sinc(2.0 * cutoff * t) * w[i];
    sum += h[i];
  }
  for (double& v : h) v /= sum;
  return h;
}

std::vector<double> bandpass(double low, double high, std::size_t num_taps, double beta) {
  require_odd(num_taps);
  if (!(low > 0.0 && low < high && high < 0.5))
    throw std::invalid_argument("fir: band edges out of range");
  const auto w = kaiser_window(num_taps, beta);
  const double mid = static_cast<double>(num_taps - 1) / 2.0;
  std::vector<double> h(num_taps);
  for (std::size_t i = 0; i < num_taps; ++i) {
    const double t = static_cast<double>(i) - mid;
    h[i] = (2.0 * high * sinc(2.0 * high * t) - 2.0 * low * sinc(2.0 * low * t)) * w[i];
  }
  const double g = magnitude_at(h, 0.5 * (low + high));
  for (double& v : h) v /= g;
  return h;
}

std::vector<double> hilbert(std::size_t num_taps, double beta) {
  require_odd(num_taps);
  const auto w = kaiser_window(num_taps, beta);
  const auto mid = static_cast<std::ptrdiff_t>(num_taps / 2);
  std::vector<double> h(num_taps, 0.0);
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(num_taps); ++i) {
    const std::ptrdiff_t k = i - mid;
    if (k % 2 != 0) h[static_cast<std::size_t>(i)] = 2.0 / (kPi * static_cast<double>(k)) * w[static_cast<std::size_t>(i)];
  }
  return h;
}

std::vector<double> convolve(std::span<const double> x, std::span<const double> h) {
  if (x.empty() || h.empty()) return {};
  std::vector<double> y(x.size() + h.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    double* out = y.data() + i;
    for (std::size_t k = 0; k < h.size(); ++k) out[k] += xi * h[k];
  }
  return y;
}

std::vector<double> filter_same(std::span<const double> h, std::span<const double> x) {
  require_odd(h.size());
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto taps = static_cast<std::ptrdiff_t>(h.size());
  const std::ptrdiff_t half = taps / 2;
  std::vector<double> y(x.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    // y[i] = sum_k h[k] x[i + half - k]
    const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, i + half - (n - 1));
    const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(taps - 1, i + half);
    double acc = 0.0;
    for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k)
      acc += h[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(i + half - k)];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

double magnitude_at(std::span<const double> h, double freq) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < h.size(); ++i)
    acc += h[i] * std::polar(1.0, -2.0 * kPi * freq * static_cast<double>(i));
  return std::abs(acc);
}

}  // namespace bbfm::fir
