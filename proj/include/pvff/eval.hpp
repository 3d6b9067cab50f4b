#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <utility>

#include "pvff/features.hpp"

namespace pvff::eval {

/// counts[true][predicted]
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, 2>, 2> counts{};

  std::uint64_t total() const noexcept;
  std::uint64_t true_positives(Label c) const noexcept { return counts[c][c]; }
  std::uint64_t false_positives(Label c) const noexcept { return counts[1 - c][c]; }
  std::uint64_t false_negatives(Label c) const noexcept { return counts[c][1 - c]; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Non-negative fraction kept exact until the final division, so metrics
/// that are ratios of counts come out as the correctly rounded double.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 0;  // 0 encodes an undefined (0/0) rate

  bool defined() const noexcept { return den != 0; }
  double value() const noexcept;  // undefined -> 0
};

Ratio precision(const ConfusionMatrix& cm, Label c);
Ratio recall(const ConfusionMatrix& cm, Label c);
/// F1 = 2PR/(P+R) = 2TP/(2TP+FP+FN); 0 when P or R is undefined or both are 0.
Ratio f1(const ConfusionMatrix& cm, Label c);
/// Unweighted mean of the two per-class F1 scores.
Ratio macro_f1(const ConfusionMatrix& cm);

enum class FScoreMode { class0, class1, macro };
double f_score(const ConfusionMatrix& cm, FScoreMode mode);

ConfusionMatrix confusion(std::span<const Label> y_true, std::span<const Label> y_pred);

/// Row-normalised confusion (per-class recall layout). Rows with no samples
/// are all zero.
std::array<std::array<double, 2>, 2> row_normalized(const ConfusionMatrix& cm);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct EvalReport {
  ConfusionMatrix confusion;
  std::array<ClassMetrics, 2> per_class{};
  double macro_f1 = 0.0;
  double f_score = 0.0;  // headline = macro-F1
  double accuracy = 0.0;
  std::array<std::array<double, 2>, 2> normalized{};
};

EvalReport make_report(const ConfusionMatrix& cm);

void write_report_text(std::ostream& out, const EvalReport& report);
/// Rows `metric,class,value`.
void write_report_csv(std::ostream& out, const EvalReport& report);

struct Split {
  features::FeatureMatrix train;
  features::FeatureMatrix test;
};

/// Per-class seeded shuffle; ceil(count * test_fraction) of each class goes
/// to test, capped so every class keeps one training row. Both halves keep
/// the input's row order.
Split split_stratified(const features::FeatureMatrix& matrix, double test_fraction,
                       std::uint64_t seed);

}  // namespace pvff::eval
