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

#include <cstddef>
#include <span>
#include <vector>

/// Windowed-sinc FIR design and linear-phase filtering helpers.
namespace bbfm::fir {

/// Kaiser window shape parameter for a given stopband attenuation [dB].
double kaiser_beta(double atten_db);

/// Odd tap count meeting `atten_db` with transition width `transition` in
/// cycles/sample (Kaiser's estimate, rounded up to odd).
std::size_t kaiser_length(double atten_db, double transition);

std::vector<double> kaiser_window(std::size_t n, double beta);

/// Low-pass with -6 dB point at `cutoff` cycles/sample, unity DC gain.
std::vector<double> lowpass(double cutoff, std::size_t num_taps, double beta);

/// Band-pass between `low` and `high` cycles/sample (-6 dB points), unity
/// gain at the band centre.
std::vector<double> bandpass(double low, double high, std::size_t num_taps, double beta);

/// Type III Hilbert transformer (odd length, antisymmetric).
std::vector<double> hilbert(std::size_t num_taps, double beta);

/// Full linear convolution, length x.size() + h.size() - 1.
std::vector<double> convolve(std::span<const double> x, std::span<const double> h);

/// Zero-phase filtering of an odd-length linear-phase FIR: the output is
/// aligned with the input and has the same length (edges see zero padding).
std::vector<double> filter_same(std::span<const double> h, std::span<const double> x);

/// Magnitude response |H(f)| at `freq` cycles/sample.
double magnitude_at(std::span<const double> h, double freq);

}  // namespace bbfm::fir
