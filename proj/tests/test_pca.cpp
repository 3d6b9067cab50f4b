#include <gtest/gtest.h>

#include <cmath>

#include "pvff/pca.hpp"
#include "test_helpers.hpp"

using namespace pvff;
using namespace pvff::pca;

namespace {

features::FeatureMatrix make_matrix(Rows rows) {
  features::FeatureMatrix m;
  const std::size_t d = rows.empty() ? 0 : rows[0].size();
  for (std::size_t j = 0; j < d; ++j) m.feature_names.push_back("f" + std::to_string(j));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.sample_ids.push_back("s" + std::to_string(i));
    m.labels.push_back(std::nullopt);
  }
  m.rows = std::move(rows);
  return m;
}

// Random rows with a decaying spectrum and some cross-column correlation.
Rows correlated_rows(Rng& rng, std::size_t n, std::size_t d) {
  Rows rows = testutil::random_rows(rng, n, d);
  for (auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) r[j] *= 1.0 / (1.0 + static_cast<double>(j));
    for (std::size_t j = 1; j < d; ++j) r[j] += 0.5 * r[j - 1];
  }
  return rows;
}

double column_variance(const Rows& rows, std::size_t j) {
  double mean = 0.0;
  for (const auto& r : rows) mean += r[j];
  mean /= static_cast<double>(rows.size());
  double var = 0.0;
  for (const auto& r : rows) var += (r[j] - mean) * (r[j] - mean);
  return var / static_cast<double>(rows.size());
}

double squared_error(const Rows& a, const Rows& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) e += (a[i][j] - b[i][j]) * (a[i][j] - b[i][j]);
  return e;
}

}  // namespace

TEST(Pca, PerfectlyCorrelatedPair) {
  const auto m = make_matrix({{1, 1}, {2, 2}, {3, 3}});
  const auto model = fit(m);
  ASSERT_EQ(model.k(), 1u);
  EXPECT_NEAR(model.explained_variance_ratio[0], 1.0, 1e-12);
  EXPECT_NEAR(model.explained_variance_ratio[1], 0.0, 1e-12);
  EXPECT_NEAR(model.explained_variance[0], 2.0, 1e-12);
  EXPECT_NEAR(model.components[0][0], 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(model.components[0][1], 1 / std::sqrt(2.0), 1e-12);
  const auto z = transform(model, m);
  EXPECT_NEAR(z[0][0], -std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(z[1][0], 0.0, 1e-12);
  EXPECT_NEAR(z[2][0], std::sqrt(3.0), 1e-12);
}

TEST(Pca, UncorrelatedEqualVarianceKeepsEverything) {
  const std::size_t d = 4;
  Rows rows;
  for (std::size_t i = 0; i < d; ++i) {
    for (double s : {1.0, -1.0}) {
      std::vector<double> r(d, 0.0);
      r[i] = s;
      rows.push_back(r);
    }
  }
  const auto model = fit(make_matrix(rows));
  EXPECT_EQ(model.k(), d);
  for (double r : model.explained_variance_ratio) EXPECT_NEAR(r, 1.0 / d, 1e-12);
}

TEST(Pca, FullRankRoundTrip) {
  Rng rng(31);
  const auto rows = correlated_rows(rng, 40, 6);
  const auto m = make_matrix(rows);
  const auto model = fit_components(m, 6);
  const auto back = inverse_transform(model, transform(model, m));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(back[i][j], rows[i][j], 1e-9);
}

TEST(Pca, MeanRowMapsToOrigin) {
  Rng rng(32);
  const auto rows = correlated_rows(rng, 30, 5);
  const auto model = fit(make_matrix(rows));
  const auto z = transform(model, Rows{model.means});
  ASSERT_EQ(z.size(), 1u);
  for (double v : z[0]) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Pca, ProjectedVariancesAreEigenvalues) {
  Rng rng(33);
  const auto rows = correlated_rows(rng, 60, 8);
  const auto m = make_matrix(rows);
  const auto model = fit_components(m, 8);
  const auto z = transform(model, m);
  for (std::size_t j = 0; j < 8; ++j)
    EXPECT_NEAR(column_variance(z, j), model.explained_variance[j], 1e-9);
  for (std::size_t j = 1; j < 8; ++j)
    EXPECT_GE(model.explained_variance[j - 1], model.explained_variance[j]);
}

TEST(Pca, ComponentsAreOrthonormalAndSigned) {
  Rng rng(34);
  const auto model = fit_components(make_matrix(correlated_rows(rng, 50, 7)), 7);
  for (std::size_t a = 0; a < 7; ++a) {
    for (std::size_t b = 0; b < 7; ++b) {
      double dot = 0.0;
      for (std::size_t j = 0; j < 7; ++j) dot += model.components[a][j] * model.components[b][j];
      EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-10);
    }
    const auto& c = model.components[a];
    const auto it = std::max_element(c.begin(), c.end(),
                                     [](double x, double y) { return std::abs(x) < std::abs(y); });
    EXPECT_GT(*it, 0.0);
  }
}

TEST(Pca, ReconstructionErrorShrinksWithK) {
  Rng rng(35);
  const auto rows = correlated_rows(rng, 20, 10);
  const auto m = make_matrix(rows);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= 10; ++k) {
    const auto model = fit_components(m, k);
    const double err = squared_error(inverse_transform(model, transform(model, m)), rows);
    EXPECT_LE(err, previous + 1e-9) << "k=" << k;
    previous = err;
  }
  EXPECT_NEAR(previous, 0.0, 1e-12);
}

TEST(Pca, RatioSumsToOneAndTargetIsReached) {
  Rng rng(36);
  const auto model = fit(make_matrix(correlated_rows(rng, 80, 12)), 0.9);
  double sum = 0.0, kept = 0.0;
  for (std::size_t j = 0; j < model.explained_variance_ratio.size(); ++j) {
    sum += model.explained_variance_ratio[j];
    if (j < model.k()) kept += model.explained_variance_ratio[j];
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_GE(kept, 0.9 - 1e-12);
  EXPECT_LT(kept - model.explained_variance_ratio[model.k() - 1], 0.9);
}

TEST(Pca, ConstantColumnsAreHarmless) {
  Rng rng(37);
  auto rows = correlated_rows(rng, 25, 4);
  for (auto& r : rows) r.push_back(7.0);
  const auto model = fit(make_matrix(rows));
  EXPECT_EQ(model.scales.back(), 1.0);
  for (const auto& z : transform(model, rows))
    for (double v : z) EXPECT_TRUE(std::isfinite(v));
}

TEST(Pca, IsDeterministic) {
  Rng rng(38);
  const auto m = make_matrix(correlated_rows(rng, 30, 9));
  const auto a = fit(m);
  const auto b = fit(m);
  EXPECT_EQ(a.components, b.components);
  EXPECT_EQ(a.explained_variance_ratio, b.explained_variance_ratio);
}

TEST(Pca, RejectsMismatchedColumns) {
  Rng rng(39);
  const auto m = make_matrix(correlated_rows(rng, 10, 3));
  const auto model = fit(m);
  auto renamed = m;
  renamed.feature_names[1] = "other";
  try {
    transform(model, renamed);
    FAIL() << "expected a column mismatch";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("other"), std::string::npos) << e.what();
  }
  EXPECT_THROW(transform(model, Rows{{1.0, 2.0}}), std::invalid_argument);
}

TEST(Pca, Preconditions) {
  EXPECT_THROW(fit(make_matrix({{1, 2}})), std::invalid_argument);
  EXPECT_THROW(fit_components(make_matrix({{1, 2}, {3, 4}}), 3), std::invalid_argument);
  EXPECT_THROW(fit_components(make_matrix({{1, 2}, {3, 4}}), 0), std::invalid_argument);
}
