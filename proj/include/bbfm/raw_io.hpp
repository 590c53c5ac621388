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

#include <filesystem>
#include <span>
#include <vector>

/// Raw little-endian sample files: float32 symbol/baseband/fading streams and
/// signed 16-bit PCM speech (full-scale integer <-> peak amplitude A).
namespace bbfm::raw_io {

inline constexpr double kPcmFullScale = 32767.0;

std::vector<double> read_f32le(const std::filesystem::path& path);
void write_f32le(const std::filesystem::path& path, std::span<const double> values);
void write_f32le(const std::filesystem::path& path, std::span<const float> values);

std::vector<double> read_s16le(const std::filesystem::path& path, double peak_amplitude = 1.0);
/// Values are scaled by full_scale / A, rounded and clamped.
void write_s16le(const std::filesystem::path& path, std::span<const double> values,
                 double peak_amplitude = 1.0);

/// Round-trips through float32 (the on-disk precision).
std::vector<double> quantize_f32(std::span<const double> values);

}  // namespace bbfm::raw_io
