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


// bbfm-sim: command-line front end for the BBFM channel simulator.
//
// Every command that produces data also writes a JSON manifest (by default
// next to its output, "<out>.json") holding the parameters, seeds and link
// overrides needed to regenerate that output byte for byte. Errors exit
// nonzero with a one-line JSON object on stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbfm/analog_fm.hpp"
#include "bbfm/fading.hpp"
#include "bbfm/fm_link.hpp"
#include "bbfm/frame_modem.hpp"
#include "bbfm/gaussian.hpp"
#include "bbfm/profiles.hpp"
#include "bbfm/raw_io.hpp"
#include "bbfm/symbol_channel.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace bbfm;

namespace {

constexpr int kSchemaVersion = 1;

// Thrown for bad command-line values that CLI11 cannot check on its own.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------- link

struct LinkOptions {
  std::string profile;
  std::optional<double> deviation_hz, max_mod_freq_hz, noise_figure_db, temperature_k,
      peak_amplitude, mean_mod_power;
};

void add_link_options(CLI::App* cmd, LinkOptions& o, const std::string& default_profile) {
  o.profile = default_profile;
  cmd->add_option("--profile", o.profile, "Link profile")
      ->check(CLI::IsMember({"analog-fm", "rade"}))
      ->capture_default_str();
  cmd->add_option("--deviation", o.deviation_hz, "Override peak deviation f_d [Hz]");
  cmd->add_option("--fm", o.max_mod_freq_hz, "Override max modulating frequency f_m [Hz]");
  cmd->add_option("--nf", o.noise_figure_db, "Override receiver noise figure [dB]");
  cmd->add_option("--temperature", o.temperature_k, "Override noise temperature [K]");
  cmd->add_option("--peak", o.peak_amplitude, "Override peak symbol amplitude A");
  cmd->add_option("--xbar2", o.mean_mod_power, "Override mean modulating power");
}

// Profile with user overrides applied; `overrides` records each one.
LinkProfile resolve_link(const LinkOptions& o, json& overrides) {
  LinkProfile p = profile_by_name(o.profile);
  FmLinkParams::Fields f = p.link.fields();
  overrides = json::object();
  auto apply = [&](const std::optional<double>& v, double& field, const char* key) {
    if (!v) return;
    overrides[key] = {{"default", field}, {"value", *v}};
    field = *v;
  };
  apply(o.deviation_hz, f.deviation_hz, "deviation_hz");
  apply(o.max_mod_freq_hz, f.max_mod_freq_hz, "max_mod_freq_hz");
  apply(o.noise_figure_db, f.noise_figure_db, "noise_figure_db");
  apply(o.temperature_k, f.temperature_k, "temperature_k");
  apply(o.peak_amplitude, f.peak_amplitude, "peak_amplitude");
  apply(o.mean_mod_power, f.mean_mod_power, "mean_mod_power");
  p.link = FmLinkParams(f);
  return p;
}

json link_json(const LinkProfile& p) {
  const auto& l = p.link;
  return {{"profile", p.name},
          {"carrier_freq_hz", p.carrier_freq_hz},
          {"deviation_hz", l.deviation_hz()},
          {"max_mod_freq_hz", l.max_mod_freq_hz()},
          {"noise_figure_db", l.noise_figure_db()},
          {"temperature_k", l.temperature_k()},
          {"peak_amplitude", l.peak_amplitude()},
          {"mean_mod_power", l.mean_mod_power()},
          {"modulation_index", l.modulation_index()},
          {"fm_gain_db", fm_gain_db(l)},
          {"threshold_dbm", threshold_dbm(l).value}};
}

// ------------------------------------------------------------- channel

struct ChannelOptions {
  std::string kind = "awgn";
  double velocity_kmh = kLmr60.velocity_kmh;
  double delay_us = kLmr60.delay_us;
  std::optional<std::uint64_t> fading_seed;
};

void add_channel_options(CLI::App* cmd, ChannelOptions& o) {
  cmd->add_option("--channel", o.kind, "awgn or lmr (two-path Rayleigh)")
      ->check(CLI::IsMember({"awgn", "lmr"}))
      ->capture_default_str();
  cmd->add_option("--velocity", o.velocity_kmh, "Vehicle speed for lmr [km/h]")->capture_default_str();
  cmd->add_option("--delay", o.delay_us, "Second-path delay for lmr [us]")->capture_default_str();
  cmd->add_option("--fading-seed", o.fading_seed, "Fading seed (default: seed + 1)");
}

FadingConfig lmr_config(const ChannelOptions& o, double carrier_hz, double rate_hz, std::uint64_t seed) {
  const LmrChannel ch{o.velocity_kmh, o.delay_us};
  return ch.fading_config(carrier_hz, rate_hz, o.fading_seed.value_or(seed + 1));
}

json fading_json(const FadingConfig& c) {
  return {{"velocity_kmh", c.velocity_mps * 3.6},
          {"velocity_mps", c.velocity_mps},
          {"delay_spread_us", c.delay_spread_s * 1e6},
          {"carrier_freq_hz", c.carrier_freq_hz},
          {"rate_hz", c.output_rate_hz},
          {"doppler_spread_hz", c.doppler_spread_hz()}};
}

// ------------------------------------------------------------ manifest

json manifest(const std::string& command) {
  return {{"schema_version", kSchemaVersion},
          {"tool", "bbfm-sim"},
          {"command", command},
          {"parameters", json::object()},
          {"overrides", json::object()},
          {"seeds", json::object()},
          {"inputs", json::object()},
          {"outputs", json::object()},
          {"results", json::object()}};
}

json file_entry(const fs::path& path, const char* format, std::size_t count) {
  return {{"path", path.string()}, {"format", format}, {"count", count}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (f == nullptr) throw std::runtime_error("cannot write " + path.string());
  const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
  if (std::fclose(f) != 0 || !ok) throw std::runtime_error("write failed for " + path.string());
}

void write_manifest(const std::string& explicit_path, const fs::path& out, const json& m) {
  const fs::path p = explicit_path.empty() ? fs::path(out.string() + ".json") : fs::path(explicit_path);
  write_text(p, m.dump(2) + "\n");
}

double mean_square(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::string format_num(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// ---------------------------------------------------------- snr-curve

struct SnrCurveArgs {
  LinkOptions link;
  double from = -135.0, to = -100.0, step = 0.5, fading_db = 0.0;
  std::string out, manifest;
};

void run_snr_curve(const SnrCurveArgs& a) {
  if (!std::isfinite(a.from) || !std::isfinite(a.to) || a.to < a.from)
    throw UsageError("snr-curve: need finite --from <= --to");
  if (!(a.step > 0.0) || !std::isfinite(a.step)) throw UsageError("snr-curve: --step must be > 0");
  const double span = (a.to - a.from) / a.step;
  if (span > 1e6) throw UsageError("snr-curve: more than 1e6 points requested");
  const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;

  json m = manifest("snr-curve");
  const LinkProfile p = resolve_link(a.link, m["overrides"]);
  std::string csv = "r_dbm,snr_db,sigma_s\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double r = a.from + static_cast<double>(i) * a.step;
    const SnrDb s = snr_db(p.link, ReceivedPowerDbm{r}, a.fading_db);
    csv += format_num("%.6f", r) + "," + format_num("%.6f", s.value) + "," +
           format_num("%.9g", noise_sigma(p.link, s)) + "\n";
  }
  write_text(a.out, csv);
  m["parameters"] = {{"link", link_json(p)},
                     {"from_dbm", a.from},
                     {"to_dbm", a.to},
                     {"step_db", a.step},
                     {"fading_db", a.fading_db}};
  m["outputs"]["curve"] = file_entry(a.out, "csv:r_dbm,snr_db,sigma_s", n);
  write_manifest(a.manifest, a.out, m);
}

// ---------------------------------------------------------- fading-gen

struct FadingGenArgs {
  LinkOptions link;
  ChannelOptions channel;
  std::optional<double> carrier_hz;
  double rate_hz = 2000.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool db = false;
  std::string out, manifest;
};

void run_fading_gen(FadingGenArgs a) {
  json m = manifest("fading-gen");
  const LinkProfile p = resolve_link(a.link, m["overrides"]);
  if (a.samples == 0) throw UsageError("fading-gen: --samples must be > 0");
  a.channel.fading_seed = a.seed;
  const FadingConfig cfg = lmr_config(a.channel, a.carrier_hz.value_or(p.carrier_freq_hz), a.rate_hz, a.seed);
  const FadingEnvelope env = generate_envelope(cfg, a.samples);
  if (a.db) {
    raw_io::write_f32le(a.out, envelope_to_db(env));
  } else {
    raw_io::write_f32le(a.out, env.magnitudes);
  }
  m["parameters"] = {{"fading", fading_json(cfg)}, {"samples", a.samples}};
  m["seeds"]["fading"] = cfg.seed;
  m["outputs"]["envelope"] = file_entry(a.out, a.db ? "f32le:|H|_dB" : "f32le:|H|", a.samples);
  m["results"] = {{"mean_power", mean_square(env.magnitudes)}};
  write_manifest(a.manifest, a.out, m);
}

// --------------------------------------------------------------- chsim

struct ChsimArgs {
  LinkOptions link;
  ChannelOptions channel;
  double set_point_dbm = 0.0;
  std::optional<double> symbol_rate_hz;
  std::string fading_file;
  std::optional<double> fading_rate_hz;
  std::uint64_t seed = 0;
  std::string in, out, manifest;
};

void run_chsim(const ChsimArgs& a) {
  json m = manifest("chsim");
  const LinkProfile p = resolve_link(a.link, m["overrides"]);
  const double rate = a.symbol_rate_hz.value_or(p.symbol_rate_hz);
  if (!(rate > 0.0)) throw UsageError("chsim: --symbol-rate is required for this profile");

  SymbolStream tx{raw_io::read_f32le(a.in), rate};
  ChannelRun run{p.link, ReceivedPowerDbm{a.set_point_dbm}, std::nullopt, a.seed};
  json channel = {{"kind", a.channel.kind}};
  if (!a.fading_file.empty()) {
    if (a.channel.kind == "lmr") throw UsageError("chsim: --fading conflicts with --channel lmr");
    run.fading = FadingEnvelope{raw_io::read_f32le(a.fading_file), a.fading_rate_hz.value_or(rate)};
    channel = {{"kind", "file"}, {"rate_hz", run.fading->rate_hz}};
    m["inputs"]["fading"] = file_entry(a.fading_file, "f32le:|H|", run.fading->magnitudes.size());
  } else if (a.channel.kind == "lmr") {
    const FadingConfig cfg = lmr_config(a.channel, p.carrier_freq_hz, rate, a.seed);
    run.fading = generate_envelope(cfg, tx.symbols.size());
    channel = {{"kind", "lmr"}, {"fading", fading_json(cfg)}};
    channel["doppler_spread_hz"] = cfg.doppler_spread_hz();
    m["seeds"]["fading"] = cfg.seed;
  }
  m["seeds"]["noise"] = a.seed;

  const ChannelResult r = apply_channel_traced(tx, run);
  raw_io::write_f32le(a.out, r.rx.symbols);

  m["parameters"] = {{"link", link_json(p)},
                     {"set_point_dbm", a.set_point_dbm},
                     {"symbol_rate_hz", rate},
                     {"channel", channel}};
  m["inputs"]["tx"] = file_entry(a.in, "f32le", tx.symbols.size());
  m["outputs"]["rx"] = file_entry(a.out, "f32le", r.rx.symbols.size());
  double max_dev = 0.0;
  for (std::size_t i = 0; i < tx.symbols.size(); ++i)
    max_dev = std::max(max_dev, std::abs(r.rx.symbols[i] - tx.symbols[i]));
  json res = {{"mean_sigma_s", std::sqrt(mean_square(r.sigma))}, {"max_abs_deviation", max_dev}};
  if (tx.symbols.size() >= kMinSnrSymbols)
    res["measured_snr_db"] = measure_snr(tx, r.rx, p.link.peak_amplitude()).value;
  else
    res["measured_snr_db"] = nullptr;
  res["requested_snr_db"] = snr_db(p.link, run.set_point, 0.0).value;
  m["results"] = res;
  write_manifest(a.manifest, a.out, m);
}

// -------------------------------------------------- fm-baseline / papr

struct FmArgs {
  LinkOptions link;
  ChannelOptions channel;
  double set_point_dbm = -40.0;
  double clip_db = 1.5;
  bool no_bandpass = false, no_preemph = false, no_limiter = false, no_gain_control = false,
       no_noise = false;
  std::uint64_t seed = 0;
  std::string in, out, manifest;
};

void add_stage_flags(CLI::App* cmd, FmArgs& a) {
  cmd->add_option("--clip-db", a.clip_db, "Limiter clip level above input RMS [dB]")->capture_default_str();
  cmd->add_flag("--no-bandpass", a.no_bandpass, "Bypass the 300-3000 Hz band-pass filters");
  cmd->add_flag("--no-preemph", a.no_preemph, "Bypass pre/de-emphasis");
  cmd->add_flag("--no-limiter", a.no_limiter, "Bypass the envelope limiter");
  cmd->add_flag("--no-gain-control", a.no_gain_control, "Bypass peak normalization");
}

FmBaselineConfig fm_config(const FmArgs& a, const LinkProfile& p) {
  FmBaselineConfig c(p.link);
  c.set_point = ReceivedPowerDbm{a.set_point_dbm};
  c.limiter_clip_db = a.clip_db;
  c.bandpass_enabled = !a.no_bandpass;
  c.preemph_enabled = !a.no_preemph;
  c.limiter_enabled = !a.no_limiter;
  c.gain_control_enabled = !a.no_gain_control;
  c.noise_enabled = !a.no_noise;
  c.seed = a.seed;
  return c;
}

json stages_json(const FmBaselineConfig& c) {
  return {{"bandpass", c.bandpass_enabled},   {"band_low_hz", c.band_low_hz},
          {"band_high_hz", c.band_high_hz},   {"preemphasis", c.preemph_enabled},
          {"limiter", c.limiter_enabled},     {"limiter_clip_db", c.limiter_clip_db},
          {"gain_control", c.gain_control_enabled}, {"noise", c.noise_enabled}};
}

json report_json(const FmBaselineResult& r) {
  return {{"papr_input_db", r.papr_input_db},
          {"papr_limiter_in_db", r.papr_limiter_in_db},
          {"papr_limiter_out_db", r.papr_limiter_out_db},
          {"mean_power_after_gain_control", r.mean_power},
          {"gain", r.gain},
          {"sigma_s", r.sigma_s},
          {"noise_variance", r.noise_variance},
          {"predicted_output_noise_power", r.predicted_output_noise_power}};
}

void run_fm_baseline_cmd(const FmArgs& a) {
  json m = manifest("fm-baseline");
  const LinkProfile p = resolve_link(a.link, m["overrides"]);
  const double peak = p.link.peak_amplitude();
  const SpeechBuffer speech{raw_io::read_s16le(a.in, peak), kSpeechRateHz};
  FmBaselineConfig cfg = fm_config(a, p);
  json channel = {{"kind", a.channel.kind}};
  if (a.channel.kind == "lmr") {
    const FadingConfig fc = lmr_config(a.channel, p.carrier_freq_hz, kSpeechRateHz, a.seed);
    cfg.fading = generate_envelope(fc, speech.samples.size());
    channel["fading"] = fading_json(fc);
    m["seeds"]["fading"] = fc.seed;
  }
  m["seeds"]["noise"] = a.seed;
  const FmBaselineResult r = run_fm_baseline_report(speech, cfg);
  raw_io::write_s16le(a.out, r.output.samples, peak);

  json rep = report_json(r);
  double clean_noise = 0.0;
  std::size_t clipped = 0;
  for (std::size_t i = 0; i < r.output.samples.size(); ++i) {
    const double d = r.output.samples[i] - r.clean_output.samples[i];
    clean_noise += d * d;
    if (std::abs(r.output.samples[i]) > peak) ++clipped;
  }
  clean_noise /= static_cast<double>(r.output.samples.size());
  rep["measured_output_noise_power"] = clean_noise;
  rep["pcm_clipped_samples"] = clipped;
  m["parameters"] = {{"link", link_json(p)},
                     {"set_point_dbm", a.set_point_dbm},
                     {"sample_rate_hz", kSpeechRateHz},
                     {"stages", stages_json(cfg)},
                     {"channel", channel}};
  m["inputs"]["speech"] = file_entry(a.in, "s16le", speech.samples.size());
  m["outputs"]["speech"] = file_entry(a.out, "s16le", r.output.samples.size());
  m["results"] = rep;
  write_manifest(a.manifest, a.out, m);
}

void run_papr_cmd(FmArgs a) {
  json m = manifest("papr");
  const LinkProfile p = resolve_link(a.link, m["overrides"]);
  const SpeechBuffer speech{raw_io::read_s16le(a.in, p.link.peak_amplitude()), kSpeechRateHz};
  a.no_noise = true;
  const FmBaselineConfig cfg = fm_config(a, p);
  const FmBaselineResult r = run_fm_baseline_report(speech, cfg);
  m["parameters"] = {{"link", link_json(p)}, {"stages", stages_json(cfg)}};
  m["inputs"]["speech"] = file_entry(a.in, "s16le", speech.samples.size());
  m["results"] = {{"papr_input_db", r.papr_input_db},
                  {"papr_limiter_in_db", r.papr_limiter_in_db},
                  {"papr_limiter_out_db", r.papr_limiter_out_db},
                  {"mean_power_after_gain_control", r.mean_power},
                  {"gain", r.gain}};
  std::cout << m.dump(2) << "\n";
  if (!a.manifest.empty()) write_manifest(a.manifest, {}, m);
}

// --------------------------------------------------------- frame modem

struct ModemArgs {
  double peak = 1.0;
  std::size_t sps = PulseShape::kDefaultSps;
  double rolloff = PulseShape::kDefaultRolloff;
  std::size_t span = PulseShape::kDefaultSpan;
  double threshold = SyncOptions{}.threshold;
  bool baseband = false;
  std::size_t frames = 10;
  std::size_t lead = 0;
  double delay = 0.0;
  std::optional<double> snr_db;
  std::uint64_t seed = 0;
  std::string in, out, manifest;
};

void add_pulse_options(CLI::App* cmd, ModemArgs& a) {
  cmd->add_option("--sps", a.sps, "Samples per symbol")->capture_default_str();
  cmd->add_option("--rolloff", a.rolloff, "RRC rolloff")->capture_default_str();
  cmd->add_option("--span", a.span, "RRC span [symbols]")->capture_default_str();
}

json pulse_json(const PulseShape& p) {
  return {{"symbol_rate_hz", FrameLayout::kSymbolRateHz},
          {"samples_per_symbol", p.sps()},
          {"sample_rate_hz", FrameLayout::kSymbolRateHz * static_cast<double>(p.sps())},
          {"rolloff", p.rolloff()},
          {"span_symbols", p.span()}};
}

json events_json(const SyncReport& rep) {
  json ev = json::array();
  for (const auto& e : rep.events) ev.push_back(format_sync_event(e));
  return ev;
}

void run_frame(const ModemArgs& a) {
  json m = manifest("frame");
  const FrameLayout layout(a.peak);
  const auto payload = raw_io::read_f32le(a.in);
  const auto symbols = assemble_frames(payload, layout);
  m["parameters"] = {{"peak_amplitude", a.peak}, {"frames", symbols.size() / FrameLayout::kFrameSymbols}};
  m["inputs"]["payload"] = file_entry(a.in, "f32le", payload.size());
  if (a.baseband) {
    const PulseShape pulse(a.sps, a.rolloff, a.span);
    const auto s = modulate(symbols, pulse);
    raw_io::write_f32le(a.out, s.samples);
    m["parameters"]["pulse"] = pulse_json(pulse);
    m["outputs"]["baseband"] = file_entry(a.out, "f32le", s.samples.size());
  } else {
    raw_io::write_f32le(a.out, symbols);
    m["outputs"]["symbols"] = file_entry(a.out, "f32le", symbols.size());
  }
  write_manifest(a.manifest, a.out, m);
}

void run_deframe(const ModemArgs& a) {
  json m = manifest("deframe");
  const FrameLayout layout(a.peak);
  const PulseShape pulse(a.sps, a.rolloff, a.span);
  BasebandSignal s;
  s.samples = raw_io::read_f32le(a.in);
  s.samples_per_symbol = pulse.sps();
  s.sample_rate_hz = FrameLayout::kSymbolRateHz * static_cast<double>(pulse.sps());
  SyncOptions opt;
  opt.threshold = a.threshold;
  const SyncReport rep = run_sync(s, layout, pulse, opt);
  const auto payload = demodulate_payload(s, layout, pulse, rep);
  for (const auto& e : rep.events) std::cout << format_sync_event(e) << "\n";
  raw_io::write_f32le(a.out, payload);
  m["parameters"] = {{"peak_amplitude", a.peak}, {"pulse", pulse_json(pulse)}, {"threshold", a.threshold}};
  m["inputs"]["baseband"] = file_entry(a.in, "f32le", s.samples.size());
  m["outputs"]["payload"] = file_entry(a.out, "f32le", payload.size());
  m["results"] = {{"locks", rep.locks}, {"frames", rep.frame_starts.size()}, {"events", events_json(rep)}};
  write_manifest(a.manifest, a.out, m);
}

void run_modem_loop(const ModemArgs& a) {
  if (a.frames < 2) throw UsageError("modem-loop: need at least 2 frames");
  json m = manifest("modem-loop");
  const FrameLayout layout(a.peak);
  const PulseShape pulse(a.sps, a.rolloff, a.span);
  GaussianSource g(a.seed);
  std::vector<double> symbols;
  for (std::size_t i = 0; i < a.lead; ++i) symbols.push_back(g.uniform() < 0.5 ? -a.peak : a.peak);
  std::vector<double> payload(a.frames * FrameLayout::kPayloadSymbols);
  for (double& v : payload) v = a.peak * (2.0 * g.uniform() - 1.0);
  const auto frames = assemble_frames(payload, layout);
  symbols.insert(symbols.end(), frames.begin(), frames.end());
  BasebandSignal s = modulate_delayed(symbols, pulse, a.delay);
  if (a.snr_db) {
    // Matched-filter output SNR relative to a symbol of amplitude A.
    const double sigma = a.peak * std::pow(10.0, -*a.snr_db / 20.0);
    for (double& v : s.samples) v += sigma * g.next();
  }
  SyncOptions opt;
  opt.threshold = a.threshold;
  const SyncReport rep = run_sync(s, layout, pulse, opt);
  const auto est = demodulate_payload(s, layout, pulse, rep);
  for (const auto& e : rep.events) std::cout << format_sync_event(e) << "\n";

  json res = {{"locks", rep.locks}, {"recovered_symbols", est.size()}};
  if (rep.locks > 0) {
    const double truth = static_cast<double>(a.lead) + a.delay;
    const double got = static_cast<double>(rep.frame_starts.front()) + rep.frame_timing.front();
    res["first_lock_symbol"] = rep.frame_starts.front();
    res["timing_error_symbols"] = got - truth;
  }
  // Payload error only when the recovered frames line up with the sent ones.
  if (est.size() == payload.size() && rep.locks > 0 && rep.frame_starts.front() == a.lead) {
    double e = 0.0, p = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
      e += (est[i] - payload[i]) * (est[i] - payload[i]);
      p += payload[i] * payload[i];
    }
    res["payload_error_db"] = 10.0 * std::log10(std::max(e, 1e-300) / p);
  } else {
    res["payload_error_db"] = nullptr;
  }
  res["events"] = events_json(rep);
  m["parameters"] = {{"peak_amplitude", a.peak},
                     {"pulse", pulse_json(pulse)},
                     {"threshold", a.threshold},
                     {"frames", a.frames},
                     {"lead_symbols", a.lead},
                     {"delay_symbols", a.delay}};
  m["parameters"]["snr_db"] = a.snr_db ? json(*a.snr_db) : json(nullptr);
  m["seeds"]["payload_and_noise"] = a.seed;
  m["results"] = res;
  write_text(a.out, m.dump(2) + "\n");
}

// -------------------------------------------------------------- golden

struct GoldenArgs {
  LinkOptions link;
  ChannelOptions channel;
  double set_point_dbm = -118.0;
  std::size_t symbols = 4000;
  std::optional<double> symbol_rate_hz;
  std::uint64_t seed = 0;
  std::string out_dir;
};

void run_golden(GoldenArgs a) {
  json m = manifest("golden");
  const LinkProfile p = resolve_link(a.link, m["overrides"]);
  const double rate = a.symbol_rate_hz.value_or(p.symbol_rate_hz);
  if (!(rate > 0.0)) throw UsageError("golden: --symbol-rate is required for this profile");
  if (a.symbols == 0) throw UsageError("golden: --symbols must be > 0");
  const double peak = p.link.peak_amplitude();

  // Everything is quantized to float32 before use so the stored arrays are
  // self-consistent: rx == f32(tx + sigma * noise) evaluated in double.
  GaussianSource g(a.seed);
  std::vector<double> tx(a.symbols);
  for (double& v : tx) v = peak * (2.0 * g.uniform() - 1.0);
  tx = raw_io::quantize_f32(tx);

  ChannelRun run{p.link, ReceivedPowerDbm{a.set_point_dbm}, std::nullopt, a.seed + 2};
  json channel = {{"kind", a.channel.kind}};
  std::vector<double> fading(a.symbols, 1.0);
  if (a.channel.kind == "lmr") {
    const FadingConfig fc = lmr_config(a.channel, p.carrier_freq_hz, rate, a.seed);
    FadingEnvelope env = generate_envelope(fc, a.symbols);
    env.magnitudes = raw_io::quantize_f32(env.magnitudes);
    fading = env.magnitudes;
    run.fading = std::move(env);
    channel["fading"] = fading_json(fc);
    m["seeds"]["fading"] = fc.seed;
  }
  const ChannelResult r = apply_channel_traced(SymbolStream{tx, rate}, run);
  const auto sigma = raw_io::quantize_f32(r.sigma);
  const auto noise = raw_io::quantize_f32(r.noise);
  std::vector<double> rx(a.symbols);
  for (std::size_t i = 0; i < rx.size(); ++i) rx[i] = tx[i] + sigma[i] * noise[i];

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  raw_io::write_f32le(dir / "tx.f32", tx);
  raw_io::write_f32le(dir / "fading.f32", fading);
  raw_io::write_f32le(dir / "sigma.f32", sigma);
  raw_io::write_f32le(dir / "noise.f32", noise);
  raw_io::write_f32le(dir / "rx.f32", rx);

  m["parameters"] = {{"link", link_json(p)},
                     {"set_point_dbm", a.set_point_dbm},
                     {"symbol_rate_hz", rate},
                     {"symbols", a.symbols},
                     {"channel", channel},
                     {"sigma_model",
                      "snr = snr_db(link, set_point, 20 log10 |H|) with |H| < 1e-10 -> -200 dB; "
                      "sigma = peak_amplitude * 10^(-snr/20)"},
                     {"rx_model", "rx = f32(double(tx) + double(sigma) * double(noise))"}};
  m["seeds"]["tx"] = a.seed;
  m["seeds"]["noise"] = run.noise_seed;
  for (const char* name : {"tx", "fading", "sigma", "noise", "rx"})
    m["outputs"][name] = file_entry(std::string(name) + ".f32", "f32le", a.symbols);
  m["results"] = {{"mean_sigma_s", std::sqrt(mean_square(sigma))},
                  {"mean_fading_power", mean_square(fading)}};
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

// ---------------------------------------------------------------- main

void error_line(const std::string& command, const std::string& kind, const std::string& message) {
  const json e = {{"error", {{"command", command}, {"kind", kind}, {"message", message}}}};
  std::cerr << e.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BBFM channel simulator"};
  app.require_subcommand(1);

  SnrCurveArgs snr;
  auto* c_snr = app.add_subcommand("snr-curve", "Tabulate output SNR against received power");
  add_link_options(c_snr, snr.link, "analog-fm");
  c_snr->add_option("--from", snr.from, "First received power [dBm]")->capture_default_str();
  c_snr->add_option("--to", snr.to, "Last received power [dBm]")->capture_default_str();
  c_snr->add_option("--step", snr.step, "Step [dB]")->capture_default_str();
  c_snr->add_option("--fading-db", snr.fading_db, "Constant |H| [dB]")->capture_default_str();
  c_snr->add_option("--out", snr.out, "CSV output")->required();
  c_snr->add_option("--manifest", snr.manifest, "Manifest path (default <out>.json)");

  FadingGenArgs fad;
  auto* c_fad = app.add_subcommand("fading-gen", "Generate a two-path Rayleigh |H| sequence");
  add_link_options(c_fad, fad.link, "rade");
  c_fad->add_option("--velocity", fad.channel.velocity_kmh, "Vehicle speed [km/h]")->capture_default_str();
  c_fad->add_option("--delay", fad.channel.delay_us, "Second-path delay [us]")->capture_default_str();
  c_fad->add_option("--carrier", fad.carrier_hz, "Carrier frequency [Hz] (default from profile)");
  c_fad->add_option("--rate", fad.rate_hz, "Output rate [Hz]")->capture_default_str();
  c_fad->add_option("--samples", fad.samples, "Number of samples")->required();
  c_fad->add_option("--seed", fad.seed, "Fading seed")->required();
  c_fad->add_flag("--db", fad.db, "Write 20 log10 |H| instead of |H|");
  c_fad->add_option("--out", fad.out, "f32le output")->required();
  c_fad->add_option("--manifest", fad.manifest, "Manifest path (default <out>.json)");

  ChsimArgs ch;
  auto* c_ch = app.add_subcommand("chsim", "Run a symbol stream through the BBFM channel");
  add_link_options(c_ch, ch.link, "rade");
  add_channel_options(c_ch, ch.channel);
  c_ch->add_option("--set-point", ch.set_point_dbm, "Mean received power [dBm]")->required();
  c_ch->add_option("--symbol-rate", ch.symbol_rate_hz, "Symbol rate [Hz] (default from profile)");
  c_ch->add_option("--fading", ch.fading_file, "|H| file (f32le) instead of a generated channel");
  c_ch->add_option("--fading-rate", ch.fading_rate_hz, "Rate of --fading [Hz] (default symbol rate)");
  c_ch->add_option("--seed", ch.seed, "Noise seed")->required();
  c_ch->add_option("--in", ch.in, "tx symbols (f32le)")->required();
  c_ch->add_option("--out", ch.out, "rx symbols (f32le)")->required();
  c_ch->add_option("--manifest", ch.manifest, "Manifest path (default <out>.json)");

  FmArgs fm;
  auto* c_fm = app.add_subcommand("fm-baseline", "Analog FM speech chain over the channel");
  add_link_options(c_fm, fm.link, "analog-fm");
  add_channel_options(c_fm, fm.channel);
  add_stage_flags(c_fm, fm);
  c_fm->add_flag("--no-noise", fm.no_noise, "Do not inject channel noise");
  c_fm->add_option("--set-point", fm.set_point_dbm, "Mean received power [dBm]")->required();
  c_fm->add_option("--seed", fm.seed, "Noise seed")->required();
  c_fm->add_option("--in", fm.in, "8 kHz s16le speech")->required();
  c_fm->add_option("--out", fm.out, "8 kHz s16le output")->required();
  c_fm->add_option("--manifest", fm.manifest, "Manifest path (default <out>.json)");

  FmArgs pa;
  auto* c_pa = app.add_subcommand("papr", "Report PAPR and mean power through the transmit chain");
  add_link_options(c_pa, pa.link, "analog-fm");
  add_stage_flags(c_pa, pa);
  c_pa->add_option("--in", pa.in, "8 kHz s16le speech")->required();
  c_pa->add_option("--manifest", pa.manifest, "Also write the report here");

  ModemArgs fr;
  auto* c_fr = app.add_subcommand("frame", "Build 192-symbol frames from an 80-symbol payload stream");
  c_fr->add_option("--peak", fr.peak, "Peak amplitude A")->capture_default_str();
  c_fr->add_flag("--baseband", fr.baseband, "Write RRC pulse-shaped samples instead of symbols");
  add_pulse_options(c_fr, fr);
  c_fr->add_option("--in", fr.in, "payload (f32le)")->required();
  c_fr->add_option("--out", fr.out, "frames or baseband (f32le)")->required();
  c_fr->add_option("--manifest", fr.manifest, "Manifest path (default <out>.json)");

  ModemArgs df;
  auto* c_df = app.add_subcommand("deframe", "Synchronize to baseband frames and extract payloads");
  c_df->add_option("--peak", df.peak, "Peak amplitude A")->capture_default_str();
  c_df->add_option("--threshold", df.threshold, "Sync correlation threshold")->capture_default_str();
  add_pulse_options(c_df, df);
  c_df->add_option("--in", df.in, "baseband (f32le)")->required();
  c_df->add_option("--out", df.out, "payload (f32le)")->required();
  c_df->add_option("--manifest", df.manifest, "Manifest path (default <out>.json)");

  ModemArgs ml;
  auto* c_ml = app.add_subcommand("modem-loop", "Frame, modulate, add noise, sync and demodulate");
  c_ml->add_option("--peak", ml.peak, "Peak amplitude A")->capture_default_str();
  c_ml->add_option("--threshold", ml.threshold, "Sync correlation threshold")->capture_default_str();
  add_pulse_options(c_ml, ml);
  c_ml->add_option("--frames", ml.frames, "Frames to send")->capture_default_str();
  c_ml->add_option("--lead", ml.lead, "Random symbols before the first frame")->capture_default_str();
  c_ml->add_option("--timing", ml.delay, "Extra delay [symbols, may be fractional]")->capture_default_str();
  c_ml->add_option("--snr", ml.snr_db, "AWGN symbol SNR [dB] (default noiseless)");
  c_ml->add_option("--seed", ml.seed, "Payload and noise seed")->required();
  c_ml->add_option("--out", ml.out, "JSON report (also the manifest)")->required();

  GoldenArgs go;
  auto* c_go = app.add_subcommand("golden", "Write a golden-vector bundle");
  add_link_options(c_go, go.link, "rade");
  add_channel_options(c_go, go.channel);
  go.channel.kind = "lmr";
  c_go->get_option("--channel")->default_str("lmr");
  c_go->add_option("--set-point", go.set_point_dbm, "Mean received power [dBm]")->capture_default_str();
  c_go->add_option("--symbols", go.symbols, "Bundle length")->capture_default_str();
  c_go->add_option("--symbol-rate", go.symbol_rate_hz, "Symbol rate [Hz] (default from profile)");
  c_go->add_option("--seed", go.seed, "Base seed (tx; fading seed + 1; noise seed + 2)")->required();
  c_go->add_option("--out-dir", go.out_dir, "Output directory")->required();

  std::string command = "bbfm-sim";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    for (const auto* sub : app.get_subcommands()) command = sub->get_name();
    error_line(command, "usage", e.what());
    return 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  command = sub->get_name();
  try {
    if (sub == c_snr) run_snr_curve(snr);
    else if (sub == c_fad) run_fading_gen(fad);
    else if (sub == c_ch) run_chsim(ch);
    else if (sub == c_fm) run_fm_baseline_cmd(fm);
    else if (sub == c_pa) run_papr_cmd(pa);
    else if (sub == c_fr) run_frame(fr);
    else if (sub == c_df) run_deframe(df);
    else if (sub == c_ml) run_modem_loop(ml);
    else if (sub == c_go) run_golden(go);
  } catch (const UsageError& e) {
    error_line(command, "usage", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    error_line(command, "invalid_argument", e.what());
    return 1;
  } catch (const std::exception& e) {
    error_line(command, "runtime", e.what());
    return 1;
  }
  return 0;
}
