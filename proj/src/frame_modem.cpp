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
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace bbfm {

namespace {

constexpr double kPi = std::numbers::pi;

// Half width, in timing hypotheses, of the parabolic peak fit.
constexpr std::ptrdiff_t kFitHalfWidth = 2;

void check_payload(std::span<const double> payload, double peak) {
  for (double v : payload) {
    if (!std::isfinite(v)) throw std::invalid_argument("frame: non-finite payload symbol");
    if (std::abs(v) > peak) throw std::invalid_argument("frame: payload symbol exceeds peak amplitude");
  }
}

// Normalized unique-word correlation over one timing hypothesis' symbols.
std::vector<double> uw_correlation(const std::vector<double>& y, std::span<const double> uw) {
  const std::size_t w = uw.size();
  if (y.size() < w) return {};
  double uw_norm = 0.0;
  for (double u : uw) uw_norm += u * u;
  uw_norm = std::sqrt(uw_norm);

  std::vector<double> c(y.size() - w + 1);
  double energy = 0.0;
  for (std::size_t i = 0; i < w; ++i) energy += y[i] * y[i];
  for (std::size_t m = 0; m < c.size(); ++m) {
    if (m > 0) {
      energy += y[m + w - 1] * y[m + w - 1] - y[m - 1] * y[m - 1];
      energy = std::max(energy, 0.0);
    }
    double num = 0.0;
    for (std::size_t i = 0; i < w; ++i) num += uw[i] * y[m + i];
    const double den = uw_norm * std::sqrt(energy);
    c[m] = den > 0.0 ? num / den : 0.0;
  }
  return c;
}

// Correlation surface indexed by k = m * H + p (symbol m, hypothesis p).
class CorrelationSurface {
 public:
  CorrelationSurface(std::vector<std::vector<double>> per_hypothesis)
      : c_(std::move(per_hypothesis)), h_(c_.size()), m_(c_.empty() ? 0 : c_[0].size()) {}

  std::size_t size() const { return h_ * m_; }
  std::size_t hypotheses() const { return h_; }
  double at(std::size_t k) const { return c_[k % h_][k / h_]; }

  /// Index of the local maximum reached by climbing from k within +-reach.
  std::size_t climb(std::size_t k, std::size_t reach) const {
    const std::size_t lo = k >= reach ? k - reach : 0;
    const std::size_t hi = std::min(size() - 1, k + reach);
    std::size_t best = k;
    while (true) {
      std::size_t next = best;
      if (best > lo && at(best - 1) > at(next)) next = best - 1;
      if (best < hi && at(best + 1) > at(next)) next = best + 1;
      if (next == best) return best;
      best = next;
    }
  }

  /// Sub-hypothesis peak position from a least-squares parabola through
  /// k-w..k+w. The optional second index adds another word's correlation to
  /// the fit; indices whose window leaves the surface are skipped.
  double refine(std::size_t k, const std::size_t* other = nullptr, std::ptrdiff_t w = kFitHalfWidth) const {
    std::vector<std::size_t> centers;
    for (std::size_t c : {k, other ? *other : k}) {
      if (other == nullptr && !centers.empty()) break;
      if (c >= static_cast<std::size_t>(w) && c + static_cast<std::size_t>(w) < size()) centers.push_back(c);
    }
    if (centers.empty()) return static_cast<double>(k);
    // Fit a + b d + c d^2 over d in [-w, w]; the abscissae are symmetric so
    // b = sum(d y) / sum(d^2) and c follows from the even moments.
    double s0 = 0.0, s2 = 0.0, s4 = 0.0, y0 = 0.0, y1 = 0.0, y2 = 0.0;
    for (std::ptrdiff_t d = -w; d <= w; ++d) {
      double y = 0.0;
      for (std::size_t c : centers) y += at(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(c) + d));
      const auto dd = static_cast<double>(d);
      s0 += 1.0;
      s2 += dd * dd;
      s4 += dd * dd * dd * dd;
      y0 += y;
      y1 += dd * y;
      y2 += dd * dd * y;
    }
    const double b = y1 / s2;
    const double c = (s0 * y2 - s2 * y0) / (s0 * s4 - s2 * s2);
    double delta = c < 0.0 ? -b / (2.0 * c) : 0.0;
    delta = std::clamp(delta, -0.5, 0.5);
    return static_cast<double>(k) + delta;
  }

 private:
  std::vector<std::vector<double>> c_;
  std::size_t h_;
  std::size_t m_;
};

struct Timing {
  std::size_t symbol;
  double frac;
};

Timing split_index(double k, std::size_t hypotheses) {
  const double pos = k / static_cast<double>(hypotheses);
  double sym = std::floor(pos);
  double frac = pos - sym;
  if (frac >= 1.0) {
    frac -= 1.0;
    sym += 1.0;
  }
  return {static_cast<std::size_t>(std::max(0.0, sym)), frac};
}

}  // namespace

FrameLayout::FrameLayout(double peak_amplitude) : peak_(peak_amplitude) {
  if (!(peak_amplitude > 0.0 && peak_amplitude <= 1.0))
    throw std::invalid_argument("FrameLayout: peak amplitude must be in (0, 1]");
  uw_.reserve(kUwSymbols);
  for (signed char v : kUniqueWord) uw_.push_back(peak_ * v);
  unsigned reg = kFillerLfsrSeed;
  filler_.reserve(kFillerSymbols);
  for (std::size_t i = 0; i < kFillerSymbols; ++i) {
    const unsigned bit = reg & 1u;
    const unsigned fb = (reg ^ (reg >> 4)) & 1u;
    reg = (reg >> 1) | (fb << 8);
    filler_.push_back(bit ? -peak_ : peak_);
  }
}

std::vector<double> assemble_frame(std::span<const double> payload, const FrameLayout& layout) {
  if (payload.size() != FrameLayout::kPayloadSymbols)
    throw std::invalid_argument("assemble_frame: payload must be 80 symbols");
  check_payload(payload, layout.peak_amplitude());
  std::vector<double> frame;
  frame.reserve(FrameLayout::kFrameSymbols);
  frame.insert(frame.end(), layout.uw().begin(), layout.uw().end());
  frame.insert(frame.end(), payload.begin(), payload.end());
  frame.insert(frame.end(), layout.filler().begin(), layout.filler().end());
  return frame;
}

std::vector<double> disassemble_frame(std::span<const double> frame, const FrameLayout&) {
  if (frame.size() != FrameLayout::kFrameSymbols)
    throw std::invalid_argument("disassemble_frame: frame must be 192 symbols");
  const auto first = frame.begin() + FrameLayout::kPayloadStart;
  return {first, first + FrameLayout::kPayloadSymbols};
}

std::vector<double> assemble_frames(std::span<const double> payload, const FrameLayout& layout) {
  if (payload.size() % FrameLayout::kPayloadSymbols != 0)
    throw std::invalid_argument("assemble_frames: payload length must be a multiple of 80");
  std::vector<double> out;
  out.reserve(payload.size() / FrameLayout::kPayloadSymbols * FrameLayout::kFrameSymbols);
  for (std::size_t i = 0; i < payload.size(); i += FrameLayout::kPayloadSymbols) {
    const auto f = assemble_frame(payload.subspan(i, FrameLayout::kPayloadSymbols), layout);
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

double rrc_impulse(double t, double beta) {
  if (std::abs(t) < 1e-12) return 1.0 - beta + 4.0 * beta / kPi;
  if (beta > 0.0 && std::abs(std::abs(4.0 * beta * t) - 1.0) < 1e-9) {
    return beta / std::numbers::sqrt2 *
           ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * beta)) +
            (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * beta)));
  }
  const double x = 4.0 * beta * t;
  return (std::sin(kPi * t * (1.0 - beta)) + x * std::cos(kPi * t * (1.0 + beta))) /
         (kPi * t * (1.0 - x * x));
}

PulseShape::PulseShape(std::size_t sps, double rolloff, std::size_t span)
    : sps_(sps), rolloff_(rolloff), span_(span) {
  if (sps < 4) throw std::invalid_argument("PulseShape: need at least 4 samples per symbol");
  if (!(rolloff > 0.0 && rolloff <= 1.0)) throw std::invalid_argument("PulseShape: rolloff must be in (0, 1]");
  if (span == 0 || span % 2 != 0) throw std::invalid_argument("PulseShape: span must be even and > 0");
  const std::size_t n = 2 * delay() + 1;
  taps_.resize(n);
  double energy = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = (static_cast<double>(j) - static_cast<double>(delay())) / static_cast<double>(sps_);
    taps_[j] = rrc_impulse(t, rolloff_);
    energy += taps_[j] * taps_[j];
  }
  scale_ = 1.0 / std::sqrt(energy);
  for (double& v : taps_) v *= scale_;
}

std::vector<double> PulseShape::matched_taps(double tau) const {
  const std::size_t n = 2 * delay() + sps_ + 1;
  const double half_span = static_cast<double>(span_) / 2.0;
  std::vector<double> q(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double t =
        (static_cast<double>(j) - static_cast<double>(delay())) / static_cast<double>(sps_) - tau;
    if (std::abs(t) <= half_span + 1e-12) q[j] = scale_ * rrc_impulse(t, rolloff_);
  }
  return q;
}

BasebandSignal modulate(std::span<const double> symbols, const PulseShape& pulse) {
  BasebandSignal out;
  out.samples_per_symbol = pulse.sps();
  out.sample_rate_hz = FrameLayout::kSymbolRateHz * static_cast<double>(pulse.sps());
  if (symbols.empty()) return out;
  const auto& h = pulse.taps();
  out.samples.assign((symbols.size() - 1) * pulse.sps() + h.size(), 0.0);
  for (std::size_t k = 0; k < symbols.size(); ++k) {
    double* dst = out.samples.data() + k * pulse.sps();
    for (std::size_t j = 0; j < h.size(); ++j) dst[j] += symbols[k] * h[j];
  }
  return out;
}

BasebandSignal modulate(std::span<const double> symbols, std::size_t sps) {
  return modulate(symbols, PulseShape(sps));
}

BasebandSignal modulate_delayed(std::span<const double> symbols, const PulseShape& pulse,
                                double delay) {
  if (!(delay >= 0.0) || !std::isfinite(delay))
    throw std::invalid_argument("modulate_delayed: delay must be finite and >= 0");
  BasebandSignal out;
  out.samples_per_symbol = pulse.sps();
  out.sample_rate_hz = FrameLayout::kSymbolRateHz * static_cast<double>(pulse.sps());
  if (symbols.empty()) return out;
  const double sps = static_cast<double>(pulse.sps());
  const double reach = static_cast<double>(pulse.delay());
  const double scale = pulse.taps()[pulse.delay()] / rrc_impulse(0.0, pulse.rolloff());
  const auto whole = static_cast<std::size_t>(std::ceil(delay));
  const auto n = static_cast<std::ptrdiff_t>((symbols.size() - 1 + whole) * pulse.sps() + pulse.taps().size());
  out.samples.assign(static_cast<std::size_t>(n), 0.0);
  for (std::size_t k = 0; k < symbols.size(); ++k) {
    const double c = reach + (static_cast<double>(k) + delay) * sps;
    const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::ceil(c - reach - 1e-9)));
    const auto hi = std::min<std::ptrdiff_t>(n - 1, static_cast<std::ptrdiff_t>(std::floor(c + reach + 1e-9)));
    for (std::ptrdiff_t i = lo; i <= hi; ++i)
      out.samples[static_cast<std::size_t>(i)] +=
          symbols[k] * scale * rrc_impulse((static_cast<double>(i) - c) / sps, pulse.rolloff());
  }
  return out;
}

std::size_t symbol_count(std::size_t num_samples, const PulseShape& pulse) {
  const std::size_t body = 2 * pulse.delay();
  if (num_samples <= body) return 0;
  return (num_samples - body - 1) / pulse.sps() + 1;
}

std::vector<double> sample_symbols(std::span<const double> signal, const PulseShape& pulse,
                                   double tau, std::size_t first, std::size_t count) {
  const auto q = pulse.matched_taps(tau);
  std::vector<double> out(count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n0 = (first + i) * pulse.sps();
    if (n0 >= signal.size()) break;
    const std::size_t len = std::min(q.size(), signal.size() - n0);
    double acc = 0.0;
    for (std::size_t j = 0; j < len; ++j) acc += q[j] * signal[n0 + j];
    out[i] = acc;
  }
  return out;
}

std::string format_sync_event(const SyncEvent& ev) {
  const char* kind = "lock";
  switch (ev.kind) {
    case SyncEvent::Kind::lock: kind = "lock"; break;
    case SyncEvent::Kind::frame: kind = "frame"; break;
    case SyncEvent::Kind::miss: kind = "miss"; break;
    case SyncEvent::Kind::unlock: kind = "unlock"; break;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "sync event=%s symbol=%zu offset=%zu timing=%.4f confidence=%.4f",
                kind, ev.symbol, ev.symbol % FrameLayout::kFrameSymbols, ev.timing_frac,
                ev.confidence);
  return buf;
}

SyncReport run_sync(const BasebandSignal& signal, const FrameLayout& layout,
                    const PulseShape& pulse, const SyncOptions& opt) {
  if (signal.samples_per_symbol != pulse.sps())
    throw std::invalid_argument("run_sync: samples per symbol mismatch");
  if (opt.timing_hypotheses < 2) throw std::invalid_argument("run_sync: need >= 2 timing hypotheses");

  SyncReport report;
  const std::size_t hyps = opt.timing_hypotheses;
  const std::size_t nsym = symbol_count(signal.samples.size(), pulse);
  if (nsym < FrameLayout::kFrameSymbols + FrameLayout::kUwSymbols) return report;

  std::vector<std::vector<double>> per_hyp(hyps);
  for (std::size_t p = 0; p < hyps; ++p) {
    const double tau = static_cast<double>(p) / static_cast<double>(hyps);
    per_hyp[p] = uw_correlation(sample_symbols(signal.samples, pulse, tau, 0, nsym), layout.uw());
  }
  const CorrelationSurface surf(std::move(per_hyp));
  const std::size_t frame_k = FrameLayout::kFrameSymbols * hyps;

  auto event = [&](SyncEvent::Kind kind, double k, double conf) {
    const Timing t = split_index(k, hyps);
    report.events.push_back({kind, t.symbol, t.frac, conf});
    return t;
  };

  std::size_t k = 0;
  while (k < surf.size()) {
    // Searching: best hypothesis at this symbol, then climb to the peak.
    const std::size_t m = k / hyps;
    std::size_t best = m * hyps;
    for (std::size_t p = 1; p < hyps; ++p)
      if (surf.at(m * hyps + p) > surf.at(best)) best = m * hyps + p;
    if (surf.at(best) < opt.threshold) {
      k = (m + 1) * hyps;
      continue;
    }
    best = surf.climb(best, hyps);
    const std::size_t expect = best + frame_k;
    if (expect >= surf.size()) break;
    const std::size_t confirm = surf.climb(expect, 1);
    if (surf.at(confirm) < opt.threshold ||
        (confirm > expect ? confirm - expect : expect - confirm) > 1) {
      k = (m + 1) * hyps;
      continue;
    }

    // Locked on the pair; timing from both words.
    const double refined = surf.refine(best, &confirm);
    const Timing first = split_index(refined, hyps);
    ++report.locks;
    event(SyncEvent::Kind::lock, refined + static_cast<double>(frame_k), surf.at(confirm));
    report.frame_starts.push_back(first.symbol);
    report.frame_timing.push_back(first.frac);
    report.frame_starts.push_back(first.symbol + FrameLayout::kFrameSymbols);
    report.frame_timing.push_back(first.frac);

    // Synced: track each expected word with a flywheel.
    std::size_t anchor = confirm;
    std::size_t missed = 0;
    while (true) {
      const std::size_t next = anchor + frame_k;
      if (next >= surf.size()) {
        k = surf.size();
        break;
      }
      const std::size_t peak = surf.climb(next, 2);
      const double conf = surf.at(peak);
      if (conf >= opt.threshold) {
        missed = 0;
        anchor = peak;
        const double r = surf.refine(peak);
        const Timing t = event(SyncEvent::Kind::frame, r, conf);
        report.frame_starts.push_back(t.symbol);
        report.frame_timing.push_back(t.frac);
        continue;
      }
      ++missed;
      anchor = next;
      if (missed > opt.max_missed) {
        event(SyncEvent::Kind::unlock, static_cast<double>(next), conf);
        k = next + 1;
        break;
      }
      const Timing t = event(SyncEvent::Kind::miss, static_cast<double>(next), conf);
      report.frame_starts.push_back(t.symbol);
      report.frame_timing.push_back(report.frame_timing.back());
    }
  }
  return report;
}

SyncState acquire_sync(const BasebandSignal& signal, const FrameLayout& layout,
                       const PulseShape& pulse, const SyncOptions& options) {
  const std::size_t frame_len = FrameLayout::kFrameSymbols;
  if (symbol_count(signal.samples.size(), pulse) < 2 * frame_len)
    throw std::invalid_argument("acquire_sync: signal shorter than two frames");
  const SyncReport rep = run_sync(signal, layout, pulse, options);
  SyncState st;
  if (rep.locks == 0) return st;
  const SyncEvent& lock = rep.events.front();
  st.state = SyncMode::synced;
  st.uw_symbol = rep.frame_starts.front();
  st.frame_offset = st.uw_symbol % frame_len;
  st.timing_frac = rep.frame_timing.front();
  st.confidence = std::clamp(lock.confidence, 0.0, 1.0);
  st.frames_to_lock = (st.uw_symbol - st.frame_offset) / frame_len + 2;
  return st;
}

std::vector<double> demodulate_payload(const BasebandSignal& signal, const FrameLayout&,
                                       const PulseShape& pulse, const SyncReport& sync) {
  const std::size_t nsym = symbol_count(signal.samples.size(), pulse);
  std::vector<double> out;
  for (std::size_t i = 0; i < sync.frame_starts.size(); ++i) {
    const std::size_t start = sync.frame_starts[i] + FrameLayout::kPayloadStart;
    if (start + FrameLayout::kPayloadSymbols > nsym) break;
    const auto p = sample_symbols(signal.samples, pulse, sync.frame_timing[i], start,
                                  FrameLayout::kPayloadSymbols);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

}  // namespace bbfm
