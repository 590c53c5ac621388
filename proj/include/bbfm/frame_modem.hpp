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

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

/**
 * Demonstration waveform: 4800 symbols/s, 40 ms frames of 192 symbols.
 *
 *   [ unique word (24) | payload (80) | filler (88) ]
 *
 * Root-raised-cosine pulses; the receiver runs a bank of 16 fractionally
 * shifted matched filters, correlates against the unique word at every
 * symbol offset, and locks once the word reappears one frame later.
 */
namespace bbfm {

/// Unique word, peak aperiodic autocorrelation sidelobe 3:
/// ----++----+-+-++-++--+--
inline constexpr std::array<signed char, 24> kUniqueWord = {
    -1, -1, -1, -1, +1, +1, -1, -1, -1, -1, +1, -1,
    +1, -1, +1, +1, -1, +1, +1, -1, -1, +1, -1, -1};

/// Filler is PN9 (x^9 + x^5 + 1, register seeded with all ones), bit 1 -> -A.
inline constexpr unsigned kFillerLfsrSeed = 0x1FF;

class FrameLayout {
 public:
  explicit FrameLayout(double peak_amplitude = 1.0);

  static constexpr double kSymbolRateHz = 4800.0;
  static constexpr std::size_t kFrameSymbols = 192;
  static constexpr std::size_t kUwSymbols = 24;
  static constexpr std::size_t kPayloadSymbols = 80;
  static constexpr std::size_t kFillerSymbols = 88;
  static constexpr std::size_t kUwStart = 0;
  static constexpr std::size_t kPayloadStart = kUwStart + kUwSymbols;
  static constexpr std::size_t kFillerStart = kPayloadStart + kPayloadSymbols;
  static_assert(kUwSymbols + kPayloadSymbols + kFillerSymbols == kFrameSymbols);

  static constexpr double frame_duration_s() { return kFrameSymbols / kSymbolRateHz; }

  double peak_amplitude() const { return peak_; }
  std::span<const double> uw() const { return uw_; }
  std::span<const double> filler() const { return filler_; }

 private:
  double peak_;
  std::vector<double> uw_;
  std::vector<double> filler_;
};

std::vector<double> assemble_frame(std::span<const double> payload, const FrameLayout& layout);
std::vector<double> disassemble_frame(std::span<const double> frame, const FrameLayout& layout);

/// Concatenated frames for a payload stream whose length is a multiple of 80.
std::vector<double> assemble_frames(std::span<const double> payload, const FrameLayout& layout);

struct BasebandSignal {
  std::vector<double> samples;
  double sample_rate_hz = 48000.0;
  std::size_t samples_per_symbol = 10;
};

/// Root-raised-cosine impulse response at time t (in symbols), unnormalized.
double rrc_impulse(double t, double rolloff);

/**
 * Truncated, sampled RRC pulse. The transmit taps have unit energy, so a
 * matched filter at the right instant returns the symbol value.
 */
class PulseShape {
 public:
  static constexpr double kDefaultRolloff = 0.2;
  static constexpr std::size_t kDefaultSpan = 12;
  static constexpr std::size_t kDefaultSps = 10;

  explicit PulseShape(std::size_t sps = kDefaultSps, double rolloff = kDefaultRolloff,
                      std::size_t span = kDefaultSpan);

  std::size_t sps() const { return sps_; }
  double rolloff() const { return rolloff_; }
  std::size_t span() const { return span_; }
  /// Half length of the transmit filter in samples (its group delay).
  std::size_t delay() const { return span_ * sps_ / 2; }
  const std::vector<double>& taps() const { return taps_; }

  /// Matched filter shifted late by `tau` symbols (0 <= tau <= 1), length
  /// 2 delay + sps + 1. Symbol m is read from samples [m sps, m sps + len).
  std::vector<double> matched_taps(double tau) const;

 private:
  std::size_t sps_;
  double rolloff_;
  std::size_t span_;
  double scale_ = 1.0;
  std::vector<double> taps_;
};

/// Pulse-shapes `symbols`; symbol k peaks at sample k sps + delay.
BasebandSignal modulate(std::span<const double> symbols, const PulseShape& pulse);
BasebandSignal modulate(std::span<const double> symbols, std::size_t sps);

/// As modulate, but every pulse is evaluated from the analytic RRC and
/// arrives `delay` symbols late (delay >= 0, may be fractional).
BasebandSignal modulate_delayed(std::span<const double> symbols, const PulseShape& pulse, double delay);

/// Matched-filter outputs for symbols first..first+count-1 with timing tau.
/// Samples beyond the signal read as zero.
std::vector<double> sample_symbols(std::span<const double> signal, const PulseShape& pulse,
                                   double tau, std::size_t first, std::size_t count);

/// Number of symbol instants whose matched-filter window starts in the signal.
std::size_t symbol_count(std::size_t num_samples, const PulseShape& pulse);

enum class SyncMode { searching, synced };

struct SyncState {
  SyncMode state = SyncMode::searching;
  /// Position of the unique word modulo the frame length.
  std::size_t frame_offset = 0;
  /// Fractional symbol timing in [0, 1).
  double timing_frac = 0.0;
  double confidence = 0.0;
  /// Symbol index of the unique word that started the lock.
  std::size_t uw_symbol = 0;
  /// Frames of signal consumed up to and including the confirming word.
  std::size_t frames_to_lock = 0;
};

struct SyncEvent {
  enum class Kind { lock, frame, miss, unlock };
  Kind kind = Kind::lock;
  std::size_t symbol = 0;
  double timing_frac = 0.0;
  double confidence = 0.0;
};

std::string format_sync_event(const SyncEvent& ev);

struct SyncOptions {
  /// Normalized unique-word correlation needed for detection and confirmation.
  double threshold = 0.8;
  std::size_t timing_hypotheses = 16;
  /// Consecutive missed words tolerated while locked.
  std::size_t max_missed = 1;
};

struct SyncReport {
  std::vector<SyncEvent> events;
  /// Unique-word symbol positions of every frame treated as in sync.
  std::vector<std::size_t> frame_starts;
  std::vector<double> frame_timing;
  std::size_t locks = 0;
};

/**
 * Runs the searching/synced state machine over a whole buffer. While
 * searching, a candidate needs correlation >= threshold at some offset and
 * again one frame later within one timing hypothesis. While synced, each
 * expected word is checked and timing re-estimated; more than `max_missed`
 * consecutive misses drop back to searching.
 */
SyncReport run_sync(const BasebandSignal& signal, const FrameLayout& layout,
                    const PulseShape& pulse, const SyncOptions& options = {});

/// First lock of run_sync, or a searching state when none occurs.
SyncState acquire_sync(const BasebandSignal& signal, const FrameLayout& layout,
                       const PulseShape& pulse = PulseShape{}, const SyncOptions& options = {});

/// Payloads of every in-sync frame whose symbols lie inside the signal.
std::vector<double> demodulate_payload(const BasebandSignal& signal, const FrameLayout& layout,
                                       const PulseShape& pulse, const SyncReport& sync);

}  // namespace bbfm
