#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pvff/ingest.hpp"
#include "pvff/rng.hpp"

namespace pvff::forest {

using Rows = std::vector<std::vector<double>>;
using ClassCounts = std::array<std::uint32_t, 2>;

struct ForestParams {
  std::size_t n_trees = 100;
  std::optional<std::size_t> max_depth;   // unset = unlimited
  std::size_t min_samples_leaf = 1;
  std::optional<std::size_t> mtry;        // unset = ceil(sqrt(d))
  std::optional<std::size_t> bootstrap_size;  // unset = n
  /// Draw the bootstrap without replacement (a plain subsample). Off by
  /// default; with bootstrap_size = n this trains every tree on all rows.
  bool sample_without_replacement = false;
  std::uint64_t seed = 42;

  std::size_t resolved_mtry(std::size_t d) const;
  std::size_t resolved_bootstrap_size(std::size_t n) const;
};

/// Flat tree node. Internal nodes route `x[feature] <= threshold` to `left`.
struct Node {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  ClassCounts counts{};  // in-bag class counts reaching this node

  bool is_leaf() const noexcept { return feature == kLeaf; }
};

/// Nodes are stored in depth-first preorder with the root at index 0.
struct DecisionTree {
  std::vector<Node> nodes;

  const Node& leaf_for(std::span<const double> x) const;
  /// Leaf majority; ties go to class 0.
  Label predict(std::span<const double> x) const;
  std::size_t depth() const;
};

struct ForestModel {
  ForestParams params;
  std::size_t n_features = 0;
  std::vector<DecisionTree> trees;
  std::array<Label, 2> classes{kHealthy, kSnailTrail};
};

struct Prediction {
  Label label = kHealthy;
  ClassCounts votes{};
};

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

/// 1 - sum (c_i / total)^2. Throws when total == 0.
double gini(const ClassCounts& counts);

/// Best Gini split over `feature_subset` using the rows in `sample`
/// (indices into X, duplicates allowed). Thresholds are midpoints between
/// consecutive distinct values; both children must hold at least
/// `min_samples_leaf` samples. Ties resolve to the lower feature index, then
/// the lower threshold. Returns nullopt when no split has positive gain.
std::optional<Split> best_split(const Rows& X, std::span<const Label> y,
                                std::span<const std::size_t> sample,
                                std::span<const std::size_t> feature_subset,
                                std::size_t min_samples_leaf = 1);

/// Convenience overload over every row of X.
std::optional<Split> best_split(const Rows& X, std::span<const Label> y,
                                std::span<const std::size_t> feature_subset);

/// Grows one CART tree on the rows listed in `sample`.
DecisionTree train_tree(const Rows& X, std::span<const Label> y,
                        std::span<const std::size_t> sample, const ForestParams& params,
                        Rng& tree_rng);

/// Grows one CART tree on every row of X.
DecisionTree train_tree(const Rows& X, std::span<const Label> y, const ForestParams& params,
                        Rng& tree_rng);

/// Stream used to grow tree `t` (feature draws).
Rng tree_stream(std::uint64_t seed, std::size_t t);
/// Stream used to draw tree `t`'s bootstrap sample.
Rng bootstrap_stream(std::uint64_t seed, std::size_t t);

struct TrainOptions {
  /// Worker threads for tree training; 0 = hardware concurrency. Does not
  /// affect the resulting model.
  unsigned threads = 1;
};

/// Bagged forest. When `sample_ids` is given, rows are first put in a
/// canonical order (by id, then by values and label) so the model does not
/// depend on input row order. Throws if only one class is present.
ForestModel train_forest(const Rows& X, std::span<const Label> y, const ForestParams& params,
                         std::span<const std::string> sample_ids = {},
                         const TrainOptions& options = {});

/// Majority vote across trees; vote ties go to class 0.
Prediction predict(const ForestModel& model, std::span<const double> x);

}  // namespace pvff::forest
