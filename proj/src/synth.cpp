#include "pvff/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "pvff/rng.hpp"

namespace pvff::synth {

namespace {

// Gaussian draws are truncated at this many sigmas so the amplitude bounds
// hold for every sample, not just with high probability.
constexpr double kNoiseClip = 5.0;

constexpr double kDipMinDepth = 0.10;
constexpr double kDipMaxDepth = 0.30;
constexpr std::size_t kDipMinMinutes = 3;
constexpr std::size_t kDipMaxMinutes = 10;

double clipped_normal(Rng& rng, double sigma) {
  if (sigma == 0.0) {
    rng.normal();
    return 0.0;
  }
  return sigma * std::clamp(rng.normal(), -kNoiseClip, kNoiseClip);
}

std::string panel_name(const char* prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%02zu", prefix, index + 1);
  return buf;
}

std::vector<double> cloud_noise(const SynthConfig& cfg, Rng& rng) {
  const std::size_t half = kCloudSmoothingMinutes / 2;
  std::vector<double> white(cfg.day_len + 2 * half);
  for (auto& w : white) w = clipped_normal(rng, cfg.cloud_noise_sigma);

  std::vector<double> smooth(cfg.day_len);
  double window = 0.0;
  for (std::size_t i = 0; i < kCloudSmoothingMinutes; ++i) window += white[i];
  for (std::size_t t = 0; t < cfg.day_len; ++t) {
    smooth[t] = window / static_cast<double>(kCloudSmoothingMinutes);
    if (t + kCloudSmoothingMinutes < white.size())
      window += white[t + kCloudSmoothingMinutes] - white[t];
  }
  return smooth;
}

}  // namespace

void SynthConfig::validate() const {
  if (day_len < 2 || day_len > ingest::kMinutesPerDay)
    throw std::invalid_argument("day_len must be in [2, 1440]");
  if (!(sunrise > 0.0 && sunrise < sunset && sunset < static_cast<double>(day_len)))
    throw std::invalid_argument("need 0 < sunrise < sunset < day_len");
  if (!(i_max > 0.0)) throw std::invalid_argument("i_max must be positive");
  if (!(bell_exponent > 0.0)) throw std::invalid_argument("bell_exponent must be positive");
  if (!(cloud_noise_sigma >= 0.0) || !(snail_extra_noise_sigma >= 0.0))
    throw std::invalid_argument("noise sigmas must be >= 0");
  if (!(snail_attenuation > 0.0 && snail_attenuation <= 1.0))
    throw std::invalid_argument("snail_attenuation must be in (0, 1]");
  if (!(snail_dropout_rate >= 0.0)) throw std::invalid_argument("snail_dropout_rate must be >= 0");
  if (panels_per_class < 1) throw std::invalid_argument("panels_per_class must be >= 1");
  if (!start_date.ok()) throw std::invalid_argument("invalid start date");
}

double SynthConfig::noise_floor() const noexcept {
  return kNoiseClip * (cloud_noise_sigma + snail_extra_noise_sigma);
}

Overlap parse_overlap(std::string_view text) {
  if (text == "easy") return Overlap::easy;
  if (text == "paper") return Overlap::paper;
  if (text == "hard") return Overlap::hard;
  throw std::invalid_argument("unknown overlap preset '" + std::string(text) +
                              "' (expected easy, paper or hard)");
}

SynthConfig preset(Overlap overlap, SynthConfig base) {
  switch (overlap) {
    case Overlap::easy: base.snail_attenuation = 0.80; break;
    case Overlap::paper: base.snail_attenuation = SynthConfig{}.snail_attenuation; break;
    case Overlap::hard: base.snail_attenuation = 0.98; break;
  }
  return base;
}

double clear_sky_current(const SynthConfig& cfg, double t) {
  const double phase = std::numbers::pi * (t - cfg.sunrise) / (cfg.sunset - cfg.sunrise);
  const double s = std::sin(phase);
  if (t <= cfg.sunrise || t >= cfg.sunset || s <= 0.0) return 0.0;
  return cfg.i_max * std::pow(s, cfg.bell_exponent);
}

std::vector<ingest::DayWindow> generate(const SynthConfig& cfg) {
  cfg.validate();
  using namespace std::chrono;

  std::vector<double> clear(cfg.day_len);
  for (std::size_t t = 0; t < cfg.day_len; ++t)
    clear[t] = clear_sky_current(cfg, static_cast<double>(t));

  const double upper = cfg.i_max + cfg.noise_floor();
  const auto first = static_cast<std::size_t>(std::ceil(cfg.sunrise));
  const auto daylight = static_cast<std::size_t>(std::floor(cfg.sunset)) - first;

  std::vector<ingest::DayWindow> out;
  out.reserve(2 * cfg.days_per_class);
  for (Label cls : {kHealthy, kSnailTrail}) {
    for (std::size_t d = 0; d < cfg.days_per_class; ++d) {
      Rng rng(cfg.seed, {static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(cls)});

      ingest::DayWindow w;
      w.panel_id = panel_name(cls == kHealthy ? "healthy" : "snail", d % cfg.panels_per_class);
      w.date = year_month_day{sys_days{cfg.start_date} +
                              days{static_cast<int>(d / cfg.panels_per_class)}};
      w.label = cls;

      const auto clouds = cloud_noise(cfg, rng);
      w.values.resize(cfg.day_len);
      if (cls == kHealthy) {
        for (std::size_t t = 0; t < cfg.day_len; ++t)
          w.values[t] = std::clamp(clear[t] + clouds[t], 0.0, upper);
      } else {
        for (std::size_t t = 0; t < cfg.day_len; ++t) {
          const double v = (clear[t] + clouds[t]) * cfg.snail_attenuation +
                           clipped_normal(rng, cfg.snail_extra_noise_sigma);
          w.values[t] = std::clamp(v, 0.0, upper);
        }
        const auto dips = rng.poisson(cfg.snail_dropout_rate);
        for (std::uint64_t k = 0; k < dips && daylight > 0; ++k) {
          const auto start = first + static_cast<std::size_t>(rng.uniform_index(daylight));
          const auto len = kDipMinMinutes + static_cast<std::size_t>(rng.uniform_index(
                                                kDipMaxMinutes - kDipMinMinutes + 1));
          const double depth = kDipMinDepth + (kDipMaxDepth - kDipMinDepth) * rng.uniform();
          for (std::size_t t = start; t < std::min(start + len, cfg.day_len); ++t)
            w.values[t] *= 1.0 - depth;
        }
      }
      out.push_back(std::move(w));
    }
  }
  return out;
}

void emit_csv(std::span<const ingest::DayWindow> windows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  ingest::write_windows_csv(out, windows);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace pvff::synth
