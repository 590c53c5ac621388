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


#include "bbfm/frame_modem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bbfm/gaussian.hpp"
#include "bbfm/spectrum.hpp"
#include "doctest.h"
#include "modem_fixtures.hpp"

using namespace bbfm;
using bbfm::testing::synth;

namespace {

std::vector<double> pm1(GaussianSource& g, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = g.uniform() < 0.5 ? -1.0 : 1.0;
  return v;
}

}  // namespace

TEST_CASE("frame layout") {
  CHECK(FrameLayout::kUwSymbols + FrameLayout::kPayloadSymbols + FrameLayout::kFillerSymbols ==
        FrameLayout::kFrameSymbols);
  CHECK(FrameLayout::frame_duration_s() == doctest::Approx(0.040).epsilon(1e-15));
  CHECK(FrameLayout::kFrameSymbols / FrameLayout::kSymbolRateHz == 0.04);

  const FrameLayout layout;
  const std::vector<double> zeros(80, 0.0);
  const auto f = assemble_frame(zeros, layout);
  REQUIRE(f.size() == 192);
  for (std::size_t i = 0; i < 24; ++i) CHECK(f[i] == kUniqueWord[i]);
  for (std::size_t i = 24; i < 104; ++i) CHECK(f[i] == 0.0);
  for (std::size_t i = 104; i < 192; ++i) CHECK(std::abs(f[i]) == 1.0);
}

TEST_CASE("unique word has low aperiodic sidelobes") {
  int worst = 0;
  for (std::size_t lag = 1; lag < kUniqueWord.size(); ++lag) {
    int c = 0;
    for (std::size_t i = 0; i + lag < kUniqueWord.size(); ++i) c += kUniqueWord[i] * kUniqueWord[i + lag];
    worst = std::max(worst, std::abs(c));
  }
  CHECK(worst <= 3);
}

TEST_CASE("filler is PN9 from the all-ones state") {
  // Independent Fibonacci LFSR, x^9 + x^5 + 1, output bit 1 -> -1.
  unsigned reg = kFillerLfsrSeed;
  const FrameLayout layout(0.5);
  const auto filler = layout.filler();
  REQUIRE(filler.size() == 88);
  for (double v : filler) {
    const unsigned out = reg & 1u;
    const unsigned fb = (reg ^ (reg >> 4)) & 1u;
    reg = (reg >> 1) | (fb << 8);
    CHECK(v == (out ? -0.5 : 0.5));
  }
}

TEST_CASE("assemble and disassemble round trip") {
  for (double peak : {1.0, 0.25, 0.6}) {
    const FrameLayout layout(peak);
    GaussianSource g(11);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> p(80);
      for (double& v : p) v = peak * (2.0 * g.uniform() - 1.0);
      if (t == 0) std::fill(p.begin(), p.end(), peak);
      const auto f = assemble_frame(p, layout);
      CHECK(disassemble_frame(f, layout) == p);
      for (std::size_t i = 0; i < 24; ++i) CHECK(f[i] == peak * kUniqueWord[i]);
    }
  }
}

TEST_CASE("frame errors") {
  const FrameLayout layout;
  CHECK_THROWS_AS(assemble_frame(std::vector<double>(79, 0.0), layout), std::invalid_argument);
  CHECK_THROWS_AS(assemble_frame(std::vector<double>(81, 0.0), layout), std::invalid_argument);
  std::vector<double> p(80, 0.0);
  p[5] = 1.0001;
  CHECK_THROWS_AS(assemble_frame(p, layout), std::invalid_argument);
  p[5] = std::nan("");
  CHECK_THROWS_AS(assemble_frame(p, layout), std::invalid_argument);
  CHECK_THROWS_AS(disassemble_frame(std::vector<double>(191, 0.0), layout), std::invalid_argument);
  CHECK_THROWS_AS(assemble_frames(std::vector<double>(100, 0.0), layout), std::invalid_argument);
  CHECK_THROWS_AS(FrameLayout(0.0), std::invalid_argument);
  CHECK_THROWS_AS(FrameLayout(1.5), std::invalid_argument);
  CHECK_THROWS_AS(PulseShape(3), std::invalid_argument);
  CHECK_THROWS_AS(PulseShape(10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(PulseShape(10, 0.2, 7), std::invalid_argument);
}

TEST_CASE("single pulse through the matched filter peaks at one") {
  const PulseShape pulse;
  std::vector<double> a(41, 0.0);
  a[20] = 1.0;
  const auto s = modulate(a, pulse);
  CHECK(s.sample_rate_hz == 48000.0);
  const auto y = sample_symbols(s.samples, pulse, 0.0, 0, symbol_count(s.samples.size(), pulse));
  REQUIRE(y.size() == 41);
  CHECK(y[20] == doctest::Approx(1.0).epsilon(0.01));
  CHECK(*std::max_element(y.begin(), y.end()) == y[20]);
}

TEST_CASE("occupied bandwidth is within the rolloff") {
  const PulseShape pulse;
  const double limit = (1.0 + pulse.rolloff()) * 2400.0;
  std::vector<double> alt(4000);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? -1.0 : 1.0;
  GaussianSource g(3);
  for (const auto& sym : {alt, pm1(g, 40000)}) {
    const auto s = modulate(sym, pulse);
    const auto psd = welch_psd(s.samples, s.sample_rate_hz, 4096);
    CHECK(psd.occupied_bandwidth(0.99) <= limit);
  }
}

TEST_CASE("matched filter ISI on a random stream") {
  const PulseShape pulse;
  GaussianSource g(5);
  std::vector<double> a(1000);
  for (double& v : a) v = 2.0 * g.uniform() - 1.0;
  const auto s = modulate(a, pulse);
  const auto y = sample_symbols(s.samples, pulse, 0.0, 0, a.size());
  double e = 0.0, p = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    e += (y[i] - a[i]) * (y[i] - a[i]);
    p += a[i] * a[i];
  }
  CHECK(10.0 * std::log10(e / p) <= -40.0);
}

TEST_CASE("clean acquisition finds offset and timing") {
  const FrameLayout layout;
  const PulseShape pulse;
  GaussianSource g(21);
  for (std::size_t k : {0u, 1u, 37u, 100u, 191u}) {
    for (double frac : {0.0, 0.3, 0.5, 0.93}) {
      auto sym = pm1(g, k);
      const auto fr = assemble_frames(testing::random_payload(g, 3), layout);
      sym.insert(sym.end(), fr.begin(), fr.end());
      const auto st = acquire_sync(synth(sym, pulse, frac), layout, pulse);
      REQUIRE(st.state == SyncMode::synced);
      CHECK(st.frame_offset == k);
      CHECK(st.uw_symbol == k);
      CHECK(st.timing_frac >= 0.0);
      CHECK(st.timing_frac < 1.0);
      double d = std::abs(st.timing_frac - frac);
      d = std::min(d, 1.0 - d);
      CHECK(d <= 0.05);
      CHECK(st.confidence > 0.95);
      CHECK(st.confidence <= 1.0);
    }
  }
}

TEST_CASE("sync is shift equivariant") {
  const FrameLayout layout;
  const PulseShape pulse;
  GaussianSource g(22);
  const auto fr = assemble_frames(testing::random_payload(g, 3), layout);
  const auto base = acquire_sync(synth(fr, pulse, 0.0), layout, pulse);
  REQUIRE(base.state == SyncMode::synced);
  for (std::size_t n : {1u, 5u, 96u, 191u, 192u, 250u}) {
    auto sym = pm1(g, n);
    sym.insert(sym.end(), fr.begin(), fr.end());
    const auto st = acquire_sync(synth(sym, pulse, 0.0), layout, pulse);
    REQUIRE(st.state == SyncMode::synced);
    CHECK(st.frame_offset == (base.frame_offset + n) % 192);
  }
}

TEST_CASE("state machine tolerates one missed word") {
  const FrameLayout layout;
  const PulseShape pulse;
  GaussianSource g(23);
  auto sym = assemble_frames(testing::random_payload(g, 8), layout);
  // Wipe the unique word of frame 3, then of frames 5 and 6.
  for (std::size_t f : {3u, 5u, 6u})
    for (std::size_t i = 0; i < 24; ++i) sym[f * 192 + i] = 0.0;
  const auto rep = run_sync(modulate(sym, pulse), layout, pulse);
  std::vector<SyncEvent::Kind> kinds;
  for (const auto& ev : rep.events) kinds.push_back(ev.kind);
  using K = SyncEvent::Kind;
  const std::vector<K> expect = {K::lock, K::frame, K::miss, K::frame, K::miss, K::unlock};
  REQUIRE(kinds.size() >= expect.size());
  CHECK(std::equal(expect.begin(), expect.end(), kinds.begin()));
  CHECK(rep.events[2].symbol == 3 * 192);
  CHECK(rep.events[5].symbol == 6 * 192);
  // Frames 0..5 are reported; the miss at 3 keeps its slot.
  REQUIRE(rep.frame_starts.size() >= 6);
  for (std::size_t f = 0; f < 6; ++f) CHECK(rep.frame_starts[f] == f * 192);
}

TEST_CASE("sync returns searching on no signal and rejects short input") {
  const FrameLayout layout;
  const PulseShape pulse;
  BasebandSignal quiet;
  quiet.samples.assign(192 * 10 * 4, 0.0);
  CHECK(acquire_sync(quiet, layout, pulse).state == SyncMode::searching);
  BasebandSignal short_sig;
  short_sig.samples.assign(192 * 10, 0.0);
  CHECK_THROWS_AS(acquire_sync(short_sig, layout, pulse), std::invalid_argument);
  BasebandSignal wrong = quiet;
  wrong.samples_per_symbol = 8;
  CHECK_THROWS_AS(run_sync(wrong, layout, pulse), std::invalid_argument);
}

TEST_CASE("sync event log line") {
  const SyncEvent ev{SyncEvent::Kind::frame, 413, 0.25, 0.9};
  CHECK(format_sync_event(ev) ==
        "sync event=frame symbol=413 offset=29 timing=0.2500 confidence=0.9000");
}

TEST_CASE("false sync on noise") {
  // 1e4 frames of noise: fewer than one lock expected at 1e-4 per frame.
  CHECK(testing::false_locks(1, 10000) == 0);
}

TEST_CASE("acquisition at threshold SNR") {
  const auto st = testing::acquisition_trials(12.0, 100, 1000);
  CHECK(st.acquired >= 99);
  CHECK(st.rms_timing <= 0.1);
}

TEST_CASE("timing accuracy at 20 dB") {
  const auto st = testing::acquisition_trials(20.0, 100, 2000);
  CHECK(st.acquired == 100);
  CHECK(st.rms_timing <= 0.02);
}

TEST_CASE("noiseless end to end") {
  for (double delay : {0.0, 0.3, 0.77}) {
    const auto r = testing::end_to_end(20, delay, 5);
    CHECK(r.recovered == 20 * 80);
    CHECK(r.error_db <= -40.0);
  }
}

TEST_CASE("delayed modulation") {
  const PulseShape pulse;
  GaussianSource g(31);
  const auto a = pm1(g, 300);
  // Whole-symbol delay reproduces modulate shifted by that many symbols.
  const auto s0 = modulate(a, pulse);
  const auto s2 = modulate_delayed(a, pulse, 2.0);
  REQUIRE(s2.samples.size() == s0.samples.size() + 2 * pulse.sps());
  for (std::size_t i = 0; i < s0.samples.size(); ++i)
    CHECK(s2.samples[i + 2 * pulse.sps()] == doctest::Approx(s0.samples[i]).epsilon(1e-12).scale(1.0));
  // Fractional delay matches the reference synthesizer and is recovered by sync.
  const auto s = modulate_delayed(a, pulse, 0.4);
  const auto r = synth(a, pulse, 0.4);
  for (std::size_t i = 0; i < s.samples.size(); ++i)
    CHECK(s.samples[i] == doctest::Approx(r.samples[i]).scale(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(modulate_delayed(a, pulse, -0.1), std::invalid_argument);
}
