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

#include "bbfm/raw_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace bbfm::raw_io {

namespace {

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void check_peak(double peak_amplitude) {
  if (!(peak_amplitude > 0.0) || !std::isfinite(peak_amplitude))
    throw std::invalid_argument("peak amplitude must be positive and finite");
}

template <typename U>
U load_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

template <typename U>
void store_le(U v, unsigned char* p) {
  for (std::size_t i = 0; i < sizeof(U); ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

}  // namespace

std::vector<double> read_f32le(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  if (bytes.size() % 4 != 0)
    throw std::runtime_error(path.string() + ": size is not a multiple of 4 bytes");
  std::vector<double> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::bit_cast<float>(load_le<std::uint32_t>(bytes.data() + 4 * i));
  return out;
}

void write_f32le(const std::filesystem::path& path, std::span<const float> values) {
  std::vector<unsigned char> bytes(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i)
    store_le(std::bit_cast<std::uint32_t>(values[i]), bytes.data() + 4 * i);
  dump(path, bytes);
}

void write_f32le(const std::filesystem::path& path, std::span<const double> values) {
  std::vector<float> f(values.begin(), values.end());
  write_f32le(path, std::span<const float>(f));
}

std::vector<double> read_s16le(const std::filesystem::path& path, double peak_amplitude) {
  check_peak(peak_amplitude);
  const auto bytes = slurp(path);
  if (bytes.size() % 2 != 0) throw std::runtime_error(path.string() + ": odd byte count for s16 PCM");
  std::vector<double> out(bytes.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto v = static_cast<std::int16_t>(load_le<std::uint16_t>(bytes.data() + 2 * i));
    out[i] = static_cast<double>(v) / kPcmFullScale * peak_amplitude;
  }
  return out;
}

void write_s16le(const std::filesystem::path& path, std::span<const double> values,
                 double peak_amplitude) {
  check_peak(peak_amplitude);
  std::vector<unsigned char> bytes(values.size() * 2);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw std::invalid_argument("write_s16le: non-finite sample");
    const double scaled = std::round(values[i] / peak_amplitude * kPcmFullScale);
    const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    store_le(static_cast<std::uint16_t>(v), bytes.data() + 2 * i);
  }
  dump(path, bytes);
}

std::vector<double> quantize_f32(std::span<const double> values) {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [](double v) { return static_cast<double>(static_cast<float>(v)); });
  return out;
}

}  // namespace bbfm::raw_io
