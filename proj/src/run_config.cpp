#include "pvff/run_config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

namespace pvff {

using nlohmann::json;

void RunConfig::sync_seed() {
  synth.seed = seed;
  forest.seed = seed;
}

void apply_config_json(RunConfig& c, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");

  auto opt_count = [](const json& v) -> std::optional<std::size_t> {
    if (v.is_null()) return std::nullopt;
    return v.get<std::size_t>();
  };

  auto& o = c.pipeline_overrides;
  const std::map<std::string, std::function<void(const json&)>> setters = {
      {"seed", [&](const json& v) { v.get_to(c.seed); }},
      {"threads", [&](const json& v) { v.get_to(c.threads); }},
      // synth
      {"days_per_class", [&](const json& v) { v.get_to(c.synth.days_per_class); }},
      {"panels_per_class", [&](const json& v) { v.get_to(c.synth.panels_per_class); }},
      {"i_max", [&](const json& v) { v.get_to(c.synth.i_max); }},
      {"day_len", [&](const json& v) { v.get_to(c.synth.day_len); }},
      {"sunrise", [&](const json& v) { v.get_to(c.synth.sunrise); }},
      {"sunset", [&](const json& v) { v.get_to(c.synth.sunset); }},
      {"bell_exponent", [&](const json& v) { v.get_to(c.synth.bell_exponent); }},
      {"cloud_noise_sigma", [&](const json& v) { v.get_to(c.synth.cloud_noise_sigma); }},
      {"snail_attenuation", [&](const json& v) { v.get_to(c.synth.snail_attenuation); }},
      {"snail_extra_noise_sigma",
       [&](const json& v) { v.get_to(c.synth.snail_extra_noise_sigma); }},
      {"snail_dropout_rate", [&](const json& v) { v.get_to(c.synth.snail_dropout_rate); }},
      // signal pipeline
      {"wavelet",
       [&](const json& v) { o.wavelet = dwt::parse_wavelet_name(v.get<std::string>()); }},
      {"levels", [&](const json& v) { o.levels = v.get<std::size_t>(); }},
      {"mode", [&](const json& v) { o.mode = dwt::parse_boundary_mode(v.get<std::string>()); }},
      {"window_len", [&](const json& v) { o.window_len = v.get<std::size_t>(); }},
      {"max_gap", [&](const json& v) { o.max_gap = v.get<std::size_t>(); }},
      {"daylight_threshold", [&](const json& v) { o.daylight_threshold = v.get<double>(); }},
      // pca
      {"variance_target", [&](const json& v) { v.get_to(c.variance_target); }},
      // forest
      {"n_trees", [&](const json& v) { v.get_to(c.forest.n_trees); }},
      {"max_depth", [&](const json& v) { c.forest.max_depth = opt_count(v); }},
      {"min_samples_leaf", [&](const json& v) { v.get_to(c.forest.min_samples_leaf); }},
      {"mtry", [&](const json& v) { c.forest.mtry = opt_count(v); }},
      {"bootstrap_size", [&](const json& v) { c.forest.bootstrap_size = opt_count(v); }},
      {"sample_without_replacement",
       [&](const json& v) { v.get_to(c.forest.sample_without_replacement); }},
  };

  for (const auto& [key, value] : j.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw std::invalid_argument("unknown config key '" + key + "'");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    }
  }
  o.apply(c.pipeline);
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("config file '" + path + "' is not valid JSON: " + e.what());
  }
  apply_config_json(config, j);
}

}  // namespace pvff
