#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pvff/features.hpp"

namespace pvff::pca {

using Rows = std::vector<std::vector<double>>;

inline constexpr double kDefaultVarianceTarget = 0.95;

/// Standardise-then-project model.
///
/// Columns are z-scored with population statistics (constant columns keep a
/// scale of 1), then projected on the leading eigenvectors of the
/// standardised covariance. Each axis is signed so that its entry of largest
/// magnitude is positive.
struct PcaModel {
  std::vector<std::string> feature_names;
  std::vector<double> means;
  std::vector<double> scales;
  Rows components;                               // k x d, orthonormal rows
  std::vector<double> explained_variance;        // k retained eigenvalues
  std::vector<double> explained_variance_ratio;  // all d ratios, nonincreasing

  std::size_t k() const noexcept { return components.size(); }
  std::size_t d() const noexcept { return means.size(); }
};

/// Fits on the rows of `matrix`. k is the smallest count whose cumulative
/// explained-variance ratio reaches `variance_target`.
PcaModel fit(const features::FeatureMatrix& matrix, double variance_target = kDefaultVarianceTarget);

/// Same as fit() but keeps exactly `k` components (1 <= k <= d).
PcaModel fit_components(const features::FeatureMatrix& matrix, std::size_t k);

/// Throws if the matrix's column names differ from those seen at fit.
Rows transform(const PcaModel& model, const features::FeatureMatrix& matrix);
Rows transform(const PcaModel& model, const Rows& rows);

Rows inverse_transform(const PcaModel& model, const Rows& reduced);

}  // namespace pvff::pca
