#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pvff/dwt.hpp"
#include "pvff/ingest.hpp"

namespace pvff::features {

inline constexpr std::size_t kStatCount = 11;

/// Statistic names in emission order; feature names are `<band>_<stat>`.
inline constexpr std::array<std::string_view, kStatCount> kStatNames = {
    "mean", "std",    "rms",     "skewness", "kurtosis",      "min",
    "max",  "median", "energy",  "entropy",  "zero_crossings"};

/// Per-band statistics. Moments are population (1/n) moments. Skewness and
/// excess kurtosis are 0 for a (numerically) constant band; entropy is the
/// Shannon entropy (nats) of the normalised energy distribution c_i^2 / sum c^2,
/// 0 for a zero-energy band. Zero crossings count sign changes, skipping
/// exact zeros.
struct BandStats {
  double mean = 0.0;
  double std = 0.0;
  double rms = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
  double energy = 0.0;
  double entropy = 0.0;
  double zero_crossings = 0.0;

  std::array<double, kStatCount> as_array() const;
};

BandStats band_stats(std::span<const double> coeffs);

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;
};

struct FeatureMatrix {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> rows;
  std::vector<std::optional<Label>> labels;  // one per row
  std::vector<std::string> sample_ids;       // `panel_id@date`

  std::size_t size() const noexcept { return rows.size(); }
  std::size_t cols() const noexcept { return feature_names.size(); }
  bool fully_labeled() const;
  /// Labels as plain integers; throws if any row is unlabeled.
  std::vector<Label> label_vector() const;
  /// Rows at the given indices, in the given order.
  FeatureMatrix subset(std::span<const std::size_t> indices) const;
};

/// Feature names for a decomposition depth: bands a<J>, d<J>..d1, each with
/// the 11 statistics.
std::vector<std::string> feature_names(std::size_t levels);

/// Concatenated band_stats over [approx, detail_J, ..., detail_1].
FeatureVector extract_features(const dwt::WaveletDecomposition& decomp);

struct ExtractionConfig {
  dwt::WaveletName wavelet = dwt::kDefaultWavelet;
  std::size_t levels = dwt::kDefaultLevels;
  dwt::BoundaryMode mode = dwt::BoundaryMode::symmetric;
  /// 0 = use hardware concurrency.
  unsigned threads = 1;
};

/// Row i = extract_features(dwt_forward(samples[i])). Row order matches the
/// input regardless of thread count.
FeatureMatrix build_matrix(std::span<const ingest::DayWindow> samples,
                           const ExtractionConfig& config);

void write_matrix_csv(std::ostream& out, const FeatureMatrix& matrix);

}  // namespace pvff::features
