#include "pvff/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "parallel.hpp"

namespace pvff::forest {

namespace {

// Gains at or below this are treated as zero, and a later candidate must beat
// the incumbent by more than this to replace it. Keeps the tie-break rule
// (lower feature, then lower threshold) immune to rounding noise.
constexpr double kGainEpsilon = 1e-12;

// Stream purposes for per-tree substreams.
constexpr std::uint64_t kBootstrapPurpose = 0;
constexpr std::uint64_t kGrowPurpose = 1;

ClassCounts count_classes(std::span<const Label> y, std::span<const std::size_t> sample) {
  ClassCounts c{};
  for (std::size_t i : sample) ++c[static_cast<std::size_t>(y[i])];
  return c;
}

struct TreeBuilder {
  const Rows& X;
  std::span<const Label> y;
  const ForestParams& params;
  Rng& rng;
  std::size_t d;
  std::size_t mtry;
  DecisionTree tree;
  std::vector<std::size_t> feature_pool;

  std::uint32_t build(std::vector<std::size_t> sample, std::size_t depth) {
    const auto index = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[index].counts = count_classes(y, sample);
    const ClassCounts counts = tree.nodes[index].counts;

    const bool pure = counts[0] == 0 || counts[1] == 0;
    const bool depth_reached = params.max_depth && depth >= *params.max_depth;
    if (pure || depth_reached || sample.size() < 2 ||
        sample.size() < 2 * params.min_samples_leaf) {
      return index;
    }

    const auto subset = draw_features();
    const auto split = best_split(X, y, sample, subset, params.min_samples_leaf);
    if (!split) return index;

    std::vector<std::size_t> left, right;
    for (std::size_t i : sample) {
      (X[i][split->feature] <= split->threshold ? left : right).push_back(i);
    }
    sample.clear();
    sample.shrink_to_fit();

    tree.nodes[index].feature = static_cast<std::int32_t>(split->feature);
    tree.nodes[index].threshold = split->threshold;
    const auto l = build(std::move(left), depth + 1);
    const auto r = build(std::move(right), depth + 1);
    tree.nodes[index].left = l;
    tree.nodes[index].right = r;
    return index;
  }

  // mtry distinct features by partial Fisher-Yates, returned in ascending
  // order so tie-breaking by feature index is meaningful.
  std::vector<std::size_t> draw_features() {
    std::iota(feature_pool.begin(), feature_pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < mtry; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.uniform_index(d - i));
      std::swap(feature_pool[i], feature_pool[j]);
    }
    std::vector<std::size_t> subset(feature_pool.begin(),
                                    feature_pool.begin() + static_cast<std::ptrdiff_t>(mtry));
    std::sort(subset.begin(), subset.end());
    return subset;
  }
};

void validate_training_data(const Rows& X, std::span<const Label> y) {
  if (X.empty()) throw std::invalid_argument("training set is empty");
  if (X.size() != y.size())
    throw std::invalid_argument("training set has " + std::to_string(X.size()) + " rows but " +
                                std::to_string(y.size()) + " labels");
  const std::size_t d = X.front().size();
  if (d == 0) throw std::invalid_argument("training rows have no features");
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i].size() != d)
      throw std::invalid_argument("row " + std::to_string(i) + " has " +
                                  std::to_string(X[i].size()) + " features, expected " +
                                  std::to_string(d));
    for (double v : X[i])
      if (!std::isfinite(v))
        throw std::invalid_argument("row " + std::to_string(i) + " has a non-finite feature");
    if (y[i] != kHealthy && y[i] != kSnailTrail)
      throw std::invalid_argument("label " + std::to_string(y[i]) + " is not 0 or 1");
  }
}

}  // namespace

std::size_t ForestParams::resolved_mtry(std::size_t d) const {
  std::size_t m = 0;
  if (mtry) {
    m = *mtry;
  } else {
    while (m * m < d) ++m;
  }
  if (m < 1 || m > d)
    throw std::invalid_argument("mtry " + std::to_string(m) + " outside [1, " +
                                std::to_string(d) + "]");
  return m;
}

std::size_t ForestParams::resolved_bootstrap_size(std::size_t n) const {
  const std::size_t b = bootstrap_size.value_or(n);
  if (b < 1) throw std::invalid_argument("bootstrap_size must be >= 1");
  if (sample_without_replacement && b > n)
    throw std::invalid_argument("bootstrap_size " + std::to_string(b) +
                                " exceeds the " + std::to_string(n) +
                                " rows available without replacement");
  return b;
}

double gini(const ClassCounts& counts) {
  const double total = static_cast<double>(counts[0]) + static_cast<double>(counts[1]);
  if (total == 0.0) throw std::invalid_argument("gini: empty node");
  const double p0 = counts[0] / total;
  const double p1 = counts[1] / total;
  return 1.0 - (p0 * p0 + p1 * p1);
}

std::optional<Split> best_split(const Rows& X, std::span<const Label> y,
                                std::span<const std::size_t> sample,
                                std::span<const std::size_t> feature_subset,
                                std::size_t min_samples_leaf) {
  if (sample.size() < 2) return std::nullopt;
  const ClassCounts parent = count_classes(y, sample);
  const double parent_gini = gini(parent);
  if (parent_gini == 0.0) return std::nullopt;

  const auto n = static_cast<double>(sample.size());
  const std::size_t leaf_min = std::max<std::size_t>(min_samples_leaf, 1);
  std::optional<Split> best;
  double best_gain = kGainEpsilon;

  std::vector<std::pair<double, Label>> column(sample.size());
  for (std::size_t f : feature_subset) {
    for (std::size_t i = 0; i < sample.size(); ++i)
      column[i] = {X[sample[i]][f], y[sample[i]]};
    std::sort(column.begin(), column.end());

    ClassCounts left{};
    for (std::size_t i = 0; i + 1 < column.size(); ++i) {
      ++left[static_cast<std::size_t>(column[i].second)];
      const double lo = column[i].first;
      const double hi = column[i + 1].first;
      if (!(lo < hi)) continue;

      const std::size_t n_left = i + 1;
      const std::size_t n_right = column.size() - n_left;
      if (n_left < leaf_min || n_right < leaf_min) continue;

      const ClassCounts right{parent[0] - left[0], parent[1] - left[1]};
      const double weighted = (static_cast<double>(n_left) / n) * gini(left) +
                              (static_cast<double>(n_right) / n) * gini(right);
      const double gain = parent_gini - weighted;
      if (gain > best_gain + (best ? kGainEpsilon : 0.0)) {
        double threshold = lo + (hi - lo) / 2.0;
        // Adjacent doubles can round the midpoint up onto `hi`.
        if (!(threshold < hi)) threshold = lo;
        best = Split{f, threshold, gain};
        best_gain = gain;
      }
    }
  }
  return best;
}

std::optional<Split> best_split(const Rows& X, std::span<const Label> y,
                                std::span<const std::size_t> feature_subset) {
  std::vector<std::size_t> all(X.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return best_split(X, y, all, feature_subset, 1);
}

DecisionTree train_tree(const Rows& X, std::span<const Label> y,
                        std::span<const std::size_t> sample, const ForestParams& params,
                        Rng& tree_rng) {
  if (sample.empty()) throw std::invalid_argument("train_tree: no rows");
  const std::size_t d = X.at(sample.front()).size();
  TreeBuilder builder{X, y, params, tree_rng, d, params.resolved_mtry(d), {},
                      std::vector<std::size_t>(d)};
  builder.build(std::vector<std::size_t>(sample.begin(), sample.end()), 0);
  return std::move(builder.tree);
}

DecisionTree train_tree(const Rows& X, std::span<const Label> y, const ForestParams& params,
                        Rng& tree_rng) {
  validate_training_data(X, y);
  std::vector<std::size_t> all(X.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return train_tree(X, y, all, params, tree_rng);
}

Rng tree_stream(std::uint64_t seed, std::size_t t) {
  return Rng(seed, {static_cast<std::uint64_t>(t), kGrowPurpose});
}

Rng bootstrap_stream(std::uint64_t seed, std::size_t t) {
  return Rng(seed, {static_cast<std::uint64_t>(t), kBootstrapPurpose});
}

ForestModel train_forest(const Rows& X, std::span<const Label> y, const ForestParams& params,
                         std::span<const std::string> sample_ids, const TrainOptions& options) {
  validate_training_data(X, y);
  if (params.n_trees < 1) throw std::invalid_argument("n_trees must be >= 1");
  if (!sample_ids.empty() && sample_ids.size() != X.size())
    throw std::invalid_argument("sample_ids must align with rows");

  const ClassCounts totals = [&] {
    ClassCounts c{};
    for (Label l : y) ++c[static_cast<std::size_t>(l)];
    return c;
  }();
  if (totals[0] == 0 || totals[1] == 0)
    throw std::invalid_argument(
        "training data contains a single class; refusing to train a degenerate classifier");

  const std::size_t n = X.size();
  const std::size_t d = X.front().size();
  params.resolved_mtry(d);
  const std::size_t draws = params.resolved_bootstrap_size(n);

  std::vector<std::size_t> canonical(n);
  std::iota(canonical.begin(), canonical.end(), std::size_t{0});
  if (!sample_ids.empty()) {
    std::sort(canonical.begin(), canonical.end(), [&](std::size_t a, std::size_t b) {
      if (sample_ids[a] != sample_ids[b]) return sample_ids[a] < sample_ids[b];
      if (X[a] != X[b]) return X[a] < X[b];
      return y[a] < y[b];
    });
  }

  ForestModel model;
  model.params = params;
  model.n_features = d;
  model.trees.resize(params.n_trees);

  detail::parallel_for(params.n_trees, options.threads, [&](std::size_t t) {
    Rng boot = bootstrap_stream(params.seed, t);
    std::vector<std::size_t> sample(draws);
    if (params.sample_without_replacement) {
      std::vector<std::size_t> pool = canonical;
      for (std::size_t i = 0; i < draws; ++i) {
        const auto j = i + static_cast<std::size_t>(boot.uniform_index(n - i));
        std::swap(pool[i], pool[j]);
        sample[i] = pool[i];
      }
    } else {
      for (auto& s : sample) s = canonical[boot.uniform_index(n)];
    }
    Rng grow = tree_stream(params.seed, t);
    model.trees[t] = train_tree(X, y, sample, params, grow);
  });
  return model;
}

const Node& DecisionTree::leaf_for(std::span<const double> x) const {
  if (nodes.empty()) throw std::logic_error("decision tree has no nodes");
  const Node* node = &nodes[0];
  while (!node->is_leaf()) {
    node = &nodes[x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                               : node->right];
  }
  return *node;
}

Label DecisionTree::predict(std::span<const double> x) const {
  const auto& c = leaf_for(x).counts;
  return c[1] > c[0] ? kSnailTrail : kHealthy;
}

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::size_t deepest = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, depth] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, depth);
    if (!nodes[i].is_leaf()) {
      stack.emplace_back(nodes[i].left, depth + 1);
      stack.emplace_back(nodes[i].right, depth + 1);
    }
  }
  return deepest;
}

Prediction predict(const ForestModel& model, std::span<const double> x) {
  if (x.size() != model.n_features)
    throw std::invalid_argument("input has " + std::to_string(x.size()) +
                                " features, model expects " + std::to_string(model.n_features));
  Prediction p;
  for (const auto& tree : model.trees) ++p.votes[static_cast<std::size_t>(tree.predict(x))];
  p.label = p.votes[1] > p.votes[0] ? kSnailTrail : kHealthy;
  return p;
}

}  // namespace pvff::forest
