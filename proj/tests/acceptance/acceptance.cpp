// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "dwt_fixture.hpp"
#include "pvff/cli.hpp"
#include "pvff/dwt.hpp"
#include "pvff/eval.hpp"
#include "pvff/forest.hpp"
#include "pvff/model_io.hpp"
#include "pvff/pca.hpp"
#include "pvff/pipeline.hpp"
#include "pvff/synth.hpp"
#include "test_helpers.hpp"

using namespace pvff;
using Clock = std::chrono::steady_clock;

namespace {

/// Outcome of one criterion. `detail` is printed after the verdict.
struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail.clear();
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double energy(const std::vector<double>& x) {
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

// 1. Reconstruction and Parseval over 1000 random signals.
Outcome dwt_correctness() {
  Outcome o;
  const auto t0 = Clock::now();
  Rng rng(20230601);
  const dwt::WaveletName names[] = {dwt::WaveletName::haar, dwt::WaveletName::db2,
                                    dwt::WaveletName::db4};
  double worst_rec = 0.0, worst_parseval = 0.0;
  std::size_t transforms = 0;
  for (int s = 0; s < 1000; ++s) {
    const auto n = 8 + static_cast<std::size_t>(rng.uniform_index(1440 - 8 + 1));
    const auto x = testutil::random_signal(rng, n, 0.5 + 10.0 * rng.uniform());
    for (auto name : names) {
      const auto& w = dwt::wavelet(name);
      if (n < w.filter_len()) continue;
      const auto top = dwt::max_levels(n, w.filter_len());
      for (std::size_t J = 1; J <= top; ++J) {
        const auto y = dwt::dwt_inverse(dwt::dwt_forward(x, w, J));
        for (std::size_t i = 0; i < n; ++i) worst_rec = std::max(worst_rec, std::abs(x[i] - y[i]));
        ++transforms;
      }
      // Periodic mode needs length divisible by 2^J: use the longest such prefix.
      for (std::size_t J = 1; J <= top; ++J) {
        const std::size_t m = (n >> J) << J;
        if (dwt::max_levels(m, w.filter_len(), dwt::BoundaryMode::periodic) < J) continue;
        const std::vector<double> prefix(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(m));
        const auto d = dwt::dwt_forward(prefix, w, J, dwt::BoundaryMode::periodic);
        double e = energy(d.approx);
        for (const auto& band : d.details) e += energy(band);
        const double ex = energy(prefix);
        if (ex > 0) worst_parseval = std::max(worst_parseval, std::abs(e - ex) / ex);
        const auto y = dwt::dwt_inverse(d);
        for (std::size_t i = 0; i < m; ++i)
          worst_rec = std::max(worst_rec, std::abs(prefix[i] - y[i]));
        ++transforms;
      }
    }
  }
  const double secs = seconds_since(t0);
  o.detail = std::to_string(transforms) + " transforms, max |x - x'| " +
             fmt("%.3g", worst_rec) + ", max Parseval rel " + fmt("%.3g", worst_parseval) +
             ", " + fmt("%.2f", secs) + " s";
  o.require(worst_rec <= 1e-9, "reconstruction error " + fmt("%.3g", worst_rec) + " > 1e-9");
  o.require(worst_parseval <= 1e-8, "Parseval error " + fmt("%.3g", worst_parseval) + " > 1e-8");
  o.require(secs < 30.0, "runtime " + fmt("%.1f", secs) + " s >= 30 s");
  return o;
}

// 2. Reference coefficients within 1e-8 on the 10 fixture signals.
Outcome oracle_equivalence() {
  Outcome o;
  const auto ref = testutil::load_dwt_reference(PVFF_FIXTURE_DIR);
  double worst = 0.0;
  bool has_haar = false, has_db4 = false;
  for (const auto& rc : ref.cases) {
    has_haar |= rc.wavelet == dwt::WaveletName::haar;
    has_db4 |= rc.wavelet == dwt::WaveletName::db4;
    const auto d = dwt::dwt_forward(ref.signals.at(rc.signal_id), dwt::wavelet(rc.wavelet),
                                    rc.levels);
    worst = std::max(worst, testutil::max_reference_error(d, rc));
  }
  o.detail = std::to_string(ref.signals.size()) + " signals, " +
             std::to_string(ref.cases.size()) + " cases, max abs error " + fmt("%.3g", worst);
  o.require(ref.signals.size() == 10, "expected 10 fixture signals");
  o.require(has_haar && has_db4, "fixture lacks haar or db4 cases");
  o.require(worst <= 1e-8, "max abs error " + fmt("%.3g", worst) + " > 1e-8");
  return o;
}

features::FeatureMatrix as_matrix(const pca::Rows& rows) {
  features::FeatureMatrix m;
  for (std::size_t j = 0; j < rows[0].size(); ++j) m.feature_names.push_back("f" + std::to_string(j));
  m.rows = rows;
  m.labels.assign(rows.size(), std::nullopt);
  for (std::size_t i = 0; i < rows.size(); ++i) m.sample_ids.push_back(std::to_string(i));
  return m;
}

// 3. PCA properties on 50 random matrices.
Outcome pca_properties() {
  Outcome o;
  Rng rng(3);
  double worst_orth = 0.0, worst_inv = 0.0;
  bool ratios_ok = true, recon_ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = 5 + static_cast<std::size_t>(rng.uniform_index(56));
    const auto d = 2 + static_cast<std::size_t>(rng.uniform_index(14));
    auto rows = testutil::random_rows(rng, n, d);
    for (auto& r : rows)
      for (std::size_t j = 1; j < d; ++j) r[j] = r[j] / static_cast<double>(j) + 0.6 * r[j - 1];
    const auto m = as_matrix(rows);

    const auto full = pca::fit_components(m, d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) {
        double dot = 0.0;
        for (std::size_t j = 0; j < d; ++j) dot += full.components[a][j] * full.components[b][j];
        worst_orth = std::max(worst_orth, std::abs(dot - (a == b ? 1.0 : 0.0)));
      }
    for (std::size_t j = 1; j < d; ++j)
      ratios_ok &= full.explained_variance_ratio[j] <= full.explained_variance_ratio[j - 1];

    const auto back = pca::inverse_transform(full, pca::transform(full, m));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j)
        worst_inv = std::max(worst_inv, std::abs(back[i][j] - rows[i][j]));

    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= d; ++k) {
      const auto model = pca::fit_components(m, k);
      const auto rec = pca::inverse_transform(model, pca::transform(model, m));
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) err += (rec[i][j] - rows[i][j]) * (rec[i][j] - rows[i][j]);
      recon_ok &= err <= previous * (1.0 + 1e-9) + 1e-12;
      previous = err;
    }
  }
  o.detail = "50 matrices, orthonormality " + fmt("%.3g", worst_orth) + ", full-rank inversion " +
             fmt("%.3g", worst_inv);
  o.require(worst_orth <= 1e-8, "orthonormality error " + fmt("%.3g", worst_orth));
  o.require(ratios_ok, "explained-variance ratios increase somewhere");
  o.require(worst_inv <= 1e-8, "inversion error " + fmt("%.3g", worst_inv));
  o.require(recon_ok, "reconstruction error increased with k");
  return o;
}

// 4. Forest properties (a)-(d).
Outcome forest_properties() {
  Outcome o;
  synth::SynthConfig sc;
  sc.days_per_class = 60;
  sc.seed = 4;
  const auto matrix = features::build_matrix(synth::generate(sc), PipelineConfig{}.extraction());
  const auto model_pca = pca::fit(matrix);
  const auto X = pca::transform(model_pca, matrix);
  const auto y = matrix.label_vector();

  forest::ForestParams params;
  params.n_trees = 25;
  const auto one = forest::train_forest(X, y, params, matrix.sample_ids, {1});
  const auto eight = forest::train_forest(X, y, params, matrix.sample_ids, {8});
  const bool same_bytes = forest_to_json(one).dump() == forest_to_json(eight).dump();
  o.require(same_bytes, "(a) 1- and 8-thread models differ");

  std::size_t correct = 0;
  for (std::size_t i = 0; i < X.size(); ++i) correct += forest::predict(one, X[i]).label == y[i];
  o.require(correct == X.size(), "(b) training accuracy " + std::to_string(correct) + "/" +
                                     std::to_string(X.size()));

  Rng rng(44);
  std::size_t tally_ok = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(X[0].size());
    const auto& base = X[rng.uniform_index(X.size())];
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = base[j] + rng.normal();
    forest::ClassCounts votes{};
    for (const auto& t : one.trees) {
      const auto& c = t.leaf_for(x).counts;
      ++votes[c[1] > c[0] ? 1 : 0];
    }
    const auto p = forest::predict(one, x);
    tally_ok += p.votes == votes && p.label == (votes[1] > votes[0] ? kSnailTrail : kHealthy);
  }
  o.require(tally_ok == 100, "(c) " + std::to_string(100 - tally_ok) + " tally mismatches");

  bool fixtures = forest::gini({5, 0}) == 0.0 && forest::gini({3, 3}) == 0.5 &&
                  forest::gini({3, 1}) == 0.375;
  const forest::Rows line{{1}, {2}, {3}, {4}};
  const std::vector<std::size_t> f0{0};
  const auto s = forest::best_split(line, std::vector<Label>{0, 0, 1, 1}, f0);
  fixtures &= s && s->threshold == 2.5 && s->gain == 0.5;
  fixtures &= !forest::best_split(line, std::vector<Label>{1, 1, 1, 1}, f0);
  fixtures &= !forest::best_split(forest::Rows{{7}, {7}}, std::vector<Label>{0, 1}, f0);
  o.require(fixtures, "(d) gini/best_split fixtures");

  if (o.pass)
    o.detail = "(a) identical bytes, (b) " + std::to_string(correct) + "/" +
               std::to_string(X.size()) + " train, (c) 100/100 tallies, (d) fixtures exact";
  return o;
}

// 5. Metric fixtures, exact.
Outcome metric_fixtures() {
  Outcome o;
  auto cm = [](std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    eval::ConfusionMatrix m;
    m.counts = {{{a, b}, {c, d}}};
    return m;
  };
  const std::vector<Label> yt{0, 1, 1, 1}, yp{0, 1, 1, 0};
  o.require(eval::confusion(yt, yp) == cm(1, 0, 1, 2), "hand-counted confusion");
  o.require(eval::confusion(yt, yt) == cm(1, 0, 0, 3), "perfect confusion not diagonal");
  o.require(eval::f_score(cm(1, 0, 0, 3), eval::FScoreMode::macro) == 1.0 &&
                eval::f_score(cm(1, 0, 0, 3), eval::FScoreMode::class1) == 1.0,
            "perfect F != 1");
  o.require(eval::f1(cm(9, 1, 1, 3), 1).value() == 0.75, "TP3 FP1 FN1 F1 != 0.75");
  const auto pattern = cm(4, 0, 1, 3);
  o.require(eval::f1(pattern, 1).num * 7 == eval::f1(pattern, 1).den * 6, "class-1 F1 != 6/7");
  o.require(eval::macro_f1(pattern).num * 63 == eval::macro_f1(pattern).den * 55, "macro != 55/63");
  o.require(eval::macro_f1(pattern).value() == 55.0 / 63.0, "macro value not 55/63 as double");
  const auto n = eval::row_normalized(pattern);
  o.require(n[0][0] == 1.0 && n[0][1] == 0.0 && n[1][0] == 0.25 && n[1][1] == 0.75,
            "row-normalised pattern != [[1,0],[0.25,0.75]]");
  if (o.pass) o.detail = "confusion, F1 = 3/4, class-1 F1 = 6/7, macro = 55/63, [[1,0],[.25,.75]]";
  return o;
}

struct EndToEnd {
  eval::EvalReport report;
  std::size_t test_size = 0;
  double seconds = 0.0;
  std::string error;
};

// CLI synth + train, then score the saved model on the same stratified holdout.
EndToEnd run_end_to_end(const std::string& overlap, std::size_t days) {
  EndToEnd r;
  const auto t0 = Clock::now();
  testutil::TempDir dir;
  const auto data = dir.file("data.csv");
  const auto model = dir.file("model.json");
  std::ostringstream out, err;
  auto call = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "pvff");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  };
  if (call({"synth", "--overlap", overlap, "--days", std::to_string(days), "--seed", "42",
            "--out", data}) != 0 ||
      call({"train", "--data", data, "--model", model, "--holdout", "0.3", "--seed", "42"}) != 0) {
    r.error = err.str();
    return r;
  }
  const auto doc = load_model(model);
  const auto windows = load_windows(data, doc.pipeline, nullptr);
  const auto matrix = features::build_matrix(windows, doc.pipeline.extraction());
  const auto split = eval::split_stratified(matrix, 0.3, 42);
  std::vector<Label> predicted;
  for (const auto& p : predict_matrix(doc, split.test)) predicted.push_back(p.prediction.label);
  r.report = eval::make_report(eval::confusion(split.test.label_vector(), predicted));
  r.test_size = split.test.size();
  r.seconds = seconds_since(t0);
  return r;
}

// 6. End-to-end discrimination on synthetic presets.
Outcome end_to_end() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto easy = run_end_to_end("easy", 400);
  const auto paper = run_end_to_end("paper", synth::SynthConfig{}.days_per_class);
  const double secs = seconds_since(t0);
  if (!easy.error.empty() || !paper.error.empty()) {
    o.require(false, "pipeline failed: " + easy.error + paper.error);
    return o;
  }
  const auto& pe = paper.report.per_class;
  o.detail = "easy macro-F1 " + fmt("%.4f", easy.report.macro_f1) + " (n=" +
             std::to_string(easy.test_size) + "); paper macro-F1 " +
             fmt("%.4f", paper.report.macro_f1) + ", recall healthy " + fmt("%.4f", pe[0].recall) +
             " / snail " + fmt("%.4f", pe[1].recall) + " (n=" + std::to_string(paper.test_size) +
             "); " + fmt("%.1f", secs) + " s";
  o.require(easy.report.macro_f1 >= 0.95, "easy macro-F1 " + fmt("%.4f", easy.report.macro_f1));
  o.require(paper.report.macro_f1 >= 0.70,
            "paper macro-F1 " + fmt("%.4f", paper.report.macro_f1));
  o.require(pe[0].recall >= pe[1].recall, "paper healthy recall below snail recall");
  o.require(secs < 120.0, "runtime " + fmt("%.1f", secs) + " s >= 120 s");
  return o;
}

// 7. Persistence and synth golden file.
Outcome persistence() {
  Outcome o;
  const auto f = testutil::train_small_model(40, 7, 50);
  testutil::TempDir dir;
  const auto path = dir.file("model.json");
  save_model(f.model, path);
  const auto loaded = load_model(path);
  const auto probes = testutil::perturbed_inputs(f.matrix, 100, 70);
  const auto a = predict_matrix(f.model, probes);
  const auto b = predict_matrix(loaded, probes);
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    same += a[i].prediction.label == b[i].prediction.label &&
            a[i].prediction.votes == b[i].prediction.votes;
  o.require(a.size() == 100 && same == 100,
            std::to_string(100 - same) + " of 100 predictions changed after reload");
  o.require(model_to_json(loaded).dump() == model_to_json(f.model).dump(),
            "reloaded model serialises differently");

  synth::emit_csv(synth::generate(testutil::golden_synth_config()), dir.file("golden.csv"));
  const auto golden = testutil::read_file(testutil::fixture("synth_golden.csv"));
  o.require(!golden.empty() && testutil::read_file(dir.file("golden.csv")) == golden,
            "synth output differs from golden file");
  if (o.pass) o.detail = "100/100 predictions identical, model JSON identical, golden synth CSV matches";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {"1 DWT reconstruction and Parseval", dwt_correctness},
      {"2 DWT reference fixture equivalence", oracle_equivalence},
      {"3 PCA properties", pca_properties},
      {"4 Random forest properties", forest_properties},
      {"5 Metric fixtures", metric_fixtures},
      {"6 End-to-end discrimination", end_to_end},
      {"7 Persistence and synth golden file", persistence},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s  [%s] %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
