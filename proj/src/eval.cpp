#include "pvff/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "pvff/rng.hpp"

namespace pvff::eval {

std::uint64_t ConfusionMatrix::total() const noexcept {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

double Ratio::value() const noexcept {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

Ratio precision(const ConfusionMatrix& cm, Label c) {
  return {cm.true_positives(c), cm.true_positives(c) + cm.false_positives(c)};
}

Ratio recall(const ConfusionMatrix& cm, Label c) {
  return {cm.true_positives(c), cm.true_positives(c) + cm.false_negatives(c)};
}

Ratio f1(const ConfusionMatrix& cm, Label c) {
  const auto tp = cm.true_positives(c);
  if (tp == 0) return {0, 1};
  return {2 * tp, 2 * tp + cm.false_positives(c) + cm.false_negatives(c)};
}

Ratio macro_f1(const ConfusionMatrix& cm) {
  const Ratio a = f1(cm, kHealthy);
  const Ratio b = f1(cm, kSnailTrail);
  Ratio r{a.num * b.den + b.num * a.den, 2 * a.den * b.den};
  const auto g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

double f_score(const ConfusionMatrix& cm, FScoreMode mode) {
  switch (mode) {
    case FScoreMode::class0: return f1(cm, kHealthy).value();
    case FScoreMode::class1: return f1(cm, kSnailTrail).value();
    case FScoreMode::macro: return macro_f1(cm).value();
  }
  return 0.0;
}

ConfusionMatrix confusion(std::span<const Label> y_true, std::span<const Label> y_pred) {
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("confusion: " + std::to_string(y_true.size()) +
                                " true labels vs " + std::to_string(y_pred.size()) +
                                " predictions");
  if (y_true.empty()) throw std::invalid_argument("confusion: no samples");
  ConfusionMatrix cm;
  for (std::size_t k = 0; k < y_true.size(); ++k) {
    const Label t = y_true[k];
    const Label p = y_pred[k];
    if ((t != 0 && t != 1) || (p != 0 && p != 1))
      throw std::invalid_argument("confusion: labels must be 0 or 1");
    ++cm.counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
  }
  return cm;
}

std::array<std::array<double, 2>, 2> row_normalized(const ConfusionMatrix& cm) {
  std::array<std::array<double, 2>, 2> out{};
  for (std::size_t i = 0; i < 2; ++i) {
    const auto row = cm.counts[i][0] + cm.counts[i][1];
    if (row == 0) continue;
    for (std::size_t j = 0; j < 2; ++j)
      out[i][j] = static_cast<double>(cm.counts[i][j]) / static_cast<double>(row);
  }
  return out;
}

EvalReport make_report(const ConfusionMatrix& cm) {
  EvalReport r;
  r.confusion = cm;
  for (Label c : {kHealthy, kSnailTrail}) {
    auto& m = r.per_class[static_cast<std::size_t>(c)];
    m.precision = precision(cm, c).value();
    m.recall = recall(cm, c).value();
    m.f1 = f1(cm, c).value();
    m.support = cm.counts[c][0] + cm.counts[c][1];
  }
  r.macro_f1 = macro_f1(cm).value();
  r.f_score = r.macro_f1;
  r.accuracy = cm.total() == 0 ? 0.0
                               : static_cast<double>(cm.counts[0][0] + cm.counts[1][1]) /
                                     static_cast<double>(cm.total());
  r.normalized = row_normalized(cm);
  return r;
}

void write_report_text(std::ostream& out, const EvalReport& r) {
  const auto& c = r.confusion.counts;
  char buf[160];
  out << "Confusion matrix (rows = true class, columns = predicted)\n";
  out << "            pred 0   pred 1\n";
  for (std::size_t i = 0; i < 2; ++i) {
    std::snprintf(buf, sizeof buf, "  true %zu  %8llu %8llu    (%.2f  %.2f)\n", i,
                  static_cast<unsigned long long>(c[i][0]),
                  static_cast<unsigned long long>(c[i][1]), r.normalized[i][0],
                  r.normalized[i][1]);
    out << buf;
  }
  out << "\nclass  precision  recall   f1       support\n";
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& m = r.per_class[i];
    std::snprintf(buf, sizeof buf, "  %zu    %.4f     %.4f   %.4f   %llu\n", i, m.precision,
                  m.recall, m.f1, static_cast<unsigned long long>(m.support));
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "\naccuracy  %.4f\nmacro F1  %.4f\nF-score   %.4f (macro)\n",
                r.accuracy, r.macro_f1, r.f_score);
  out << buf;
}

void write_report_csv(std::ostream& out, const EvalReport& r) {
  out << "metric,class,value\n";
  char buf[64];
  auto row = [&](const char* metric, const std::string& cls, double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << metric << ',' << cls << ',' << buf << '\n';
  };
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string cls = std::to_string(i);
    row("confusion_pred0", cls, static_cast<double>(r.confusion.counts[i][0]));
    row("confusion_pred1", cls, static_cast<double>(r.confusion.counts[i][1]));
    row("recall_pct_pred0", cls, std::round(r.normalized[i][0] * 10000.0) / 100.0);
    row("recall_pct_pred1", cls, std::round(r.normalized[i][1] * 10000.0) / 100.0);
    row("precision", cls, r.per_class[i].precision);
    row("recall", cls, r.per_class[i].recall);
    row("f1", cls, r.per_class[i].f1);
    row("support", cls, static_cast<double>(r.per_class[i].support));
  }
  row("accuracy", "all", r.accuracy);
  row("f1", "macro", r.macro_f1);
  row("f_score", "macro", r.f_score);
}

Split split_stratified(const features::FeatureMatrix& matrix, double test_fraction,
                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test fraction must be in (0, 1)");
  const auto labels = matrix.label_vector();

  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);

  std::vector<std::size_t> test_idx;
  for (std::size_t c = 0; c < 2; ++c) {
    auto& idx = by_class[c];
    if (idx.size() < 2)
      throw std::invalid_argument("class " + std::to_string(c) + " has " +
                                  std::to_string(idx.size()) +
                                  " samples; stratified split needs at least 2");
    Rng rng(seed, {0x5EED5B17ULL, c});
    for (std::size_t i = idx.size() - 1; i > 0; --i)
      std::swap(idx[i], idx[static_cast<std::size_t>(rng.uniform_index(i + 1))]);
    auto n_test = static_cast<std::size_t>(
        std::ceil(static_cast<double>(idx.size()) * test_fraction - 1e-9));
    n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
    test_idx.insert(test_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
  }
  std::sort(test_idx.begin(), test_idx.end());

  std::vector<std::size_t> train_idx;
  std::size_t t = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (t < test_idx.size() && test_idx[t] == i) {
      ++t;
      continue;
    }
    train_idx.push_back(i);
  }
  return Split{matrix.subset(train_idx), matrix.subset(test_idx)};
}

}  // namespace pvff::eval
