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

#include "bbfm/symbol_channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bbfm/gaussian.hpp"

namespace bbfm {

ChannelResult apply_channel_traced(const SymbolStream& stream, const ChannelRun& run) {
  const std::size_t n = stream.symbols.size();
  const double peak = run.link.peak_amplitude();

  for (std::size_t i = 0; i < n; ++i) {
    const double z = stream.symbols[i];
    if (!std::isfinite(z)) throw std::invalid_argument("apply_channel: non-finite symbol");
    if (std::abs(z) > peak)
      throw std::invalid_argument("apply_channel: symbol " + std::to_string(i) +
                                  " exceeds peak amplitude");
  }

  std::vector<double> fade_db;
  if (run.fading) {
    if (run.fading->rate_hz != stream.symbol_rate_hz)
      throw std::invalid_argument("apply_channel: fading rate does not match symbol rate");
    if (run.fading->magnitudes.size() < n)
      throw std::invalid_argument("apply_channel: fading envelope shorter than stream");
    fade_db = envelope_to_db(*run.fading);
  }

  ChannelResult out;
  out.rx.symbol_rate_hz = stream.symbol_rate_hz;
  out.rx.symbols.resize(n);
  out.sigma.resize(n);
  out.noise.resize(n);

  GaussianSource rng(run.noise_seed);
  const double awgn_sigma = noise_sigma(run.link, snr_db(run.link, run.set_point, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double sigma =
        run.fading ? noise_sigma(run.link, snr_db(run.link, run.set_point, fade_db[i])) : awgn_sigma;
    const double g = rng.next();
    out.sigma[i] = sigma;
    out.noise[i] = g;
    out.rx.symbols[i] = stream.symbols[i] + sigma * g;
  }
  return out;
}

SymbolStream apply_channel(const SymbolStream& stream, const ChannelRun& run) {
  return apply_channel_traced(stream, run).rx;
}

SnrDb measure_snr(const SymbolStream& tx, const SymbolStream& rx, double peak_amplitude) {
  if (tx.symbols.size() != rx.symbols.size())
    throw std::invalid_argument("measure_snr: length mismatch");
  if (tx.symbols.size() < kMinSnrSymbols)
    throw std::invalid_argument("measure_snr: need at least 1000 symbols");
  double err = 0.0;
  for (std::size_t i = 0; i < tx.symbols.size(); ++i) {
    const double d = rx.symbols[i] - tx.symbols[i];
    err += d * d;
  }
  err /= static_cast<double>(tx.symbols.size());
  if (err == 0.0) return {kSnrCapDb};
  return {std::min(kSnrCapDb, 10.0 * std::log10(peak_amplitude * peak_amplitude / err))};
}

}  // namespace bbfm
