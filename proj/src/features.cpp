#include "pvff/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "parallel.hpp"

namespace pvff::features {

namespace {

// A band whose variance is below this fraction of its mean square is treated
// as constant. Scale-free, so the degenerate branch is stable under scaling.
constexpr double kRelativeVarianceFloor = 1e-20;

double median_of(std::span<const double> values) {
  std::vector<double> tmp(values.begin(), values.end());
  const std::size_t mid = tmp.size() / 2;
  std::nth_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(mid), tmp.end());
  const double upper = tmp[mid];
  if (tmp.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

std::array<double, kStatCount> BandStats::as_array() const {
  return {mean, std, rms, skewness, kurtosis, min, max, median, energy, entropy, zero_crossings};
}

BandStats band_stats(std::span<const double> c) {
  if (c.empty()) throw std::invalid_argument("band_stats: empty coefficient band");

  const auto n = static_cast<double>(c.size());
  BandStats s;

  double sum = 0.0;
  double energy = 0.0;
  s.min = c[0];
  s.max = c[0];
  for (double v : c) {
    sum += v;
    energy += v * v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / n;
  s.energy = energy;
  s.rms = std::sqrt(energy / n);

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : c) {
    const double d = v - s.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.std = std::sqrt(m2);
  if (m2 > kRelativeVarianceFloor * (energy / n)) {
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2) - 3.0;
  } else {
    s.std = 0.0;
  }

  s.median = median_of(c);

  if (energy > 0.0) {
    double h = 0.0;
    for (double v : c) {
      const double p = v * v / energy;
      if (p > 0.0) h -= p * std::log(p);
    }
    s.entropy = h;
  }

  int prev_sign = 0;
  std::size_t crossings = 0;
  for (double v : c) {
    const int sign = (v > 0.0) - (v < 0.0);
    if (sign == 0) continue;
    if (prev_sign != 0 && sign != prev_sign) ++crossings;
    prev_sign = sign;
  }
  s.zero_crossings = static_cast<double>(crossings);
  return s;
}

bool FeatureMatrix::fully_labeled() const {
  return std::all_of(labels.begin(), labels.end(), [](const auto& l) { return l.has_value(); });
}

std::vector<Label> FeatureMatrix::label_vector() const {
  std::vector<Label> out;
  out.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) throw std::runtime_error("sample " + sample_ids[i] + " has no label");
    out.push_back(*labels[i]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> indices) const {
  FeatureMatrix out;
  out.feature_names = feature_names;
  for (std::size_t i : indices) {
    out.rows.push_back(rows.at(i));
    out.labels.push_back(labels.at(i));
    out.sample_ids.push_back(sample_ids.at(i));
  }
  return out;
}

std::vector<std::string> feature_names(std::size_t levels) {
  std::vector<std::string> names;
  names.reserve(kStatCount * (levels + 1));
  for (const auto& band : dwt::band_names(levels))
    for (auto stat : kStatNames) names.push_back(band + "_" + std::string(stat));
  return names;
}

FeatureVector extract_features(const dwt::WaveletDecomposition& decomp) {
  if (decomp.details.size() != decomp.levels)
    throw std::invalid_argument("decomposition has " + std::to_string(decomp.details.size()) +
                                " detail bands for " + std::to_string(decomp.levels) + " levels");

  FeatureVector fv;
  fv.names = feature_names(decomp.levels);
  fv.values.reserve(fv.names.size());

  auto append = [&](const std::vector<double>& band, const std::string& name) {
    if (band.empty()) throw std::invalid_argument("band " + name + " is empty");
    const auto stats = band_stats(band).as_array();
    fv.values.insert(fv.values.end(), stats.begin(), stats.end());
  };
  append(decomp.approx, "a" + std::to_string(decomp.levels));
  for (std::size_t j = decomp.levels; j >= 1; --j)
    append(decomp.details[j - 1], "d" + std::to_string(j));
  return fv;
}

FeatureMatrix build_matrix(std::span<const ingest::DayWindow> samples,
                           const ExtractionConfig& config) {
  if (samples.empty()) throw std::invalid_argument("build_matrix: no samples");
  const auto& w = dwt::wavelet(config.wavelet);

  FeatureMatrix m;
  m.feature_names = feature_names(config.levels);
  m.rows.resize(samples.size());
  m.labels.resize(samples.size());
  m.sample_ids.resize(samples.size());

  detail::parallel_for(samples.size(), config.threads, [&](std::size_t i) {
    const auto& s = samples[i];
    m.sample_ids[i] = s.sample_id();
    m.labels[i] = s.label;
    try {
      m.rows[i] = extract_features(dwt::dwt_forward(s.values, w, config.levels, config.mode)).values;
    } catch (const std::exception& e) {
      throw std::runtime_error("sample " + m.sample_ids[i] + ": " + e.what());
    }
  });
  return m;
}

void write_matrix_csv(std::ostream& out, const FeatureMatrix& matrix) {
  out << "sample_id,label";
  for (const auto& name : matrix.feature_names) out << ',' << name;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out << matrix.sample_ids[i] << ',';
    if (matrix.labels[i]) out << *matrix.labels[i];
    for (double v : matrix.rows[i]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace pvff::features
