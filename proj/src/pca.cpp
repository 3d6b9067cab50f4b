#include "pvff/pca.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pvff::pca {

namespace {

// Columns whose std falls below this (relative to their magnitude) are
// treated as constant.
constexpr double kConstantColumnTolerance = 1e-12;

// Slack on the cumulative-ratio comparison so that a ratio sum of
// 1 - 1e-16 still satisfies a target of 1.0.
constexpr double kCumulativeSlack = 1e-12;

struct Eigensystem {
  std::vector<double> means;
  std::vector<double> scales;
  Eigen::MatrixXd vectors;      // columns sorted by eigenvalue, descending
  std::vector<double> values;   // clamped at 0
};

Eigensystem decompose(const features::FeatureMatrix& matrix) {
  const std::size_t n = matrix.size();
  const std::size_t d = matrix.cols();
  if (n < 2) throw std::invalid_argument("PCA needs at least 2 rows, got " + std::to_string(n));
  if (d < 1) throw std::invalid_argument("PCA needs at least 1 column");

  Eigen::MatrixXd z(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix.rows[i].size() != d)
      throw std::invalid_argument("row " + std::to_string(i) + " has " +
                                  std::to_string(matrix.rows[i].size()) + " values, expected " +
                                  std::to_string(d));
    for (std::size_t j = 0; j < d; ++j) z(i, j) = matrix.rows[i][j];
  }

  Eigensystem es;
  es.means.resize(d);
  es.scales.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double mean = z.col(j).mean();
    z.col(j).array() -= mean;
    const double sd = std::sqrt(z.col(j).squaredNorm() / static_cast<double>(n));
    const double scale = sd > kConstantColumnTolerance * std::max(1.0, std::abs(mean)) ? sd : 1.0;
    z.col(j) /= scale;
    es.means[j] = mean;
    es.scales[j] = scale;
  }

  const Eigen::MatrixXd cov = (z.transpose() * z) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw std::runtime_error("PCA eigensolver failed");

  // Eigen returns ascending order; flip to descending.
  es.vectors = solver.eigenvectors().rowwise().reverse();
  const Eigen::VectorXd vals = solver.eigenvalues().reverse();
  es.values.resize(d);
  for (std::size_t j = 0; j < d; ++j) es.values[j] = std::max(0.0, vals(static_cast<Eigen::Index>(j)));
  return es;
}

PcaModel assemble(const features::FeatureMatrix& matrix, Eigensystem es, std::size_t k) {
  const std::size_t d = es.means.size();
  PcaModel model;
  model.feature_names = matrix.feature_names;
  model.means = std::move(es.means);
  model.scales = std::move(es.scales);

  const double total = std::accumulate(es.values.begin(), es.values.end(), 0.0);
  model.explained_variance_ratio.assign(d, 0.0);
  if (total > 0.0) {
    for (std::size_t j = 0; j < d; ++j) model.explained_variance_ratio[j] = es.values[j] / total;
  } else {
    // No variance at all: put the whole (empty) budget on the first axis.
    model.explained_variance_ratio[0] = 1.0;
  }

  model.components.assign(k, std::vector<double>(d));
  model.explained_variance.assign(es.values.begin(), es.values.begin() + static_cast<std::ptrdiff_t>(k));
  for (std::size_t c = 0; c < k; ++c) {
    const auto col = es.vectors.col(static_cast<Eigen::Index>(c));
    std::size_t pivot = 0;
    for (std::size_t j = 1; j < d; ++j)
      if (std::abs(col(static_cast<Eigen::Index>(j))) > std::abs(col(static_cast<Eigen::Index>(pivot)))) pivot = j;
    const double sign = col(static_cast<Eigen::Index>(pivot)) < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < d; ++j)
      model.components[c][j] = sign * col(static_cast<Eigen::Index>(j));
  }
  return model;
}

void check_names(const PcaModel& model, const std::vector<std::string>& names) {
  if (names == model.feature_names) return;
  std::string diff;
  const std::size_t common = std::min(names.size(), model.feature_names.size());
  std::size_t shown = 0;
  for (std::size_t j = 0; j < common && shown < 8; ++j) {
    if (names[j] != model.feature_names[j]) {
      diff += " [" + std::to_string(j) + "] '" + names[j] + "' vs model '" +
              model.feature_names[j] + "';";
      ++shown;
    }
  }
  if (names.size() != model.feature_names.size())
    diff += " data has " + std::to_string(names.size()) + " features, model expects " +
            std::to_string(model.feature_names.size()) + ";";
  throw std::invalid_argument("feature-name mismatch:" + diff);
}

}  // namespace

PcaModel fit(const features::FeatureMatrix& matrix, double variance_target) {
  if (!(variance_target > 0.0 && variance_target <= 1.0))
    throw std::invalid_argument("variance_target must be in (0, 1]");
  Eigensystem es = decompose(matrix);

  const double total = std::accumulate(es.values.begin(), es.values.end(), 0.0);
  const std::size_t d = es.values.size();
  std::size_t k = 1;
  if (total > 0.0) {
    double cumulative = 0.0;
    k = d;
    for (std::size_t j = 0; j < d; ++j) {
      cumulative += es.values[j] / total;
      if (cumulative >= variance_target - kCumulativeSlack) {
        k = j + 1;
        break;
      }
    }
  }
  return assemble(matrix, std::move(es), k);
}

PcaModel fit_components(const features::FeatureMatrix& matrix, std::size_t k) {
  Eigensystem es = decompose(matrix);
  if (k < 1 || k > es.values.size())
    throw std::invalid_argument("component count must be in [1, " +
                                std::to_string(es.values.size()) + "]");
  return assemble(matrix, std::move(es), k);
}

Rows transform(const PcaModel& model, const features::FeatureMatrix& matrix) {
  check_names(model, matrix.feature_names);
  return transform(model, matrix.rows);
}

Rows transform(const PcaModel& model, const Rows& rows) {
  const std::size_t d = model.d();
  Rows out;
  out.reserve(rows.size());
  std::vector<double> z(d);
  for (const auto& row : rows) {
    if (row.size() != d)
      throw std::invalid_argument("row has " + std::to_string(row.size()) +
                                  " features, model expects " + std::to_string(d));
    for (std::size_t j = 0; j < d; ++j) z[j] = (row[j] - model.means[j]) / model.scales[j];
    std::vector<double> y(model.k(), 0.0);
    for (std::size_t c = 0; c < model.k(); ++c) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += z[j] * model.components[c][j];
      y[c] = acc;
    }
    out.push_back(std::move(y));
  }
  return out;
}

Rows inverse_transform(const PcaModel& model, const Rows& reduced) {
  const std::size_t d = model.d();
  Rows out;
  out.reserve(reduced.size());
  for (const auto& y : reduced) {
    if (y.size() != model.k())
      throw std::invalid_argument("reduced row has " + std::to_string(y.size()) +
                                  " columns, model has " + std::to_string(model.k()) +
                                  " components");
    std::vector<double> x(d, 0.0);
    for (std::size_t c = 0; c < model.k(); ++c)
      for (std::size_t j = 0; j < d; ++j) x[j] += y[c] * model.components[c][j];
    for (std::size_t j = 0; j < d; ++j) x[j] = x[j] * model.scales[j] + model.means[j];
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace pvff::pca
