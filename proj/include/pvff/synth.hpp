#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pvff/ingest.hpp"

namespace pvff::synth {

/// Parameters of the synthetic healthy / snail-trail day generator.
///
/// Healthy day, minute t:
///   i_max * max(0, sin(pi (t - sunrise) / (sunset - sunrise)))^bell_exponent
///   + cloud noise (white N(0, cloud_noise_sigma) smoothed by a 15-minute
///     centred moving average), clamped at 0.
/// Snail-trail day: the healthy curve scaled by snail_attenuation, plus white
/// N(0, snail_extra_noise_sigma), plus Poisson(snail_dropout_rate) dips each
/// lasting 3-10 minutes at 10-30 % depth, clamped at 0.
struct SynthConfig {
  std::size_t days_per_class = 200;
  std::size_t panels_per_class = 4;
  double i_max = 8.0;
  std::size_t day_len = ingest::kMinutesPerDay;
  double sunrise = 360.0;
  double sunset = 1200.0;
  double bell_exponent = 1.2;
  double cloud_noise_sigma = 0.15;
  double snail_attenuation = 0.94;
  double snail_extra_noise_sigma = 0.08;
  double snail_dropout_rate = 2.0;
  std::uint64_t seed = 42;
  std::chrono::year_month_day start_date{std::chrono::year{2023}, std::chrono::June,
                                         std::chrono::day{1}};

  void validate() const;
  /// Upper bound of a night-time sample: 5 combined noise sigmas.
  double noise_floor() const noexcept;
};

enum class Overlap { easy, paper, hard };

Overlap parse_overlap(std::string_view text);
/// Preset parameter sets: easy = attenuation 0.80, paper = defaults,
/// hard = attenuation 0.98. Other fields come from `base`.
SynthConfig preset(Overlap overlap, SynthConfig base = {});

inline constexpr std::size_t kCloudSmoothingMinutes = 15;

/// Noise-free healthy current at minute t.
double clear_sky_current(const SynthConfig& config, double t);

/// days_per_class healthy windows followed by days_per_class snail-trail
/// windows. Day d of a class belongs to panel d % panels_per_class on
/// start_date + d / panels_per_class. Each (day, class) has its own RNG
/// substream, so the output is a pure function of the config.
std::vector<ingest::DayWindow> generate(const SynthConfig& config);

/// Writes windows in the ingest CSV schema.
void emit_csv(std::span<const ingest::DayWindow> windows, const std::string& path);

}  // namespace pvff::synth
