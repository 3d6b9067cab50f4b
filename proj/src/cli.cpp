#include "pvff/cli.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "pvff/eval.hpp"
#include "pvff/features.hpp"
#include "pvff/model_io.hpp"
#include "pvff/pipeline.hpp"

namespace pvff::cli {

namespace {

/// Output sink that is either stdout or a file.
class Sink {
public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw std::runtime_error("cannot open output file '" + path + "'");
    stream_ = file_.get();
  }
  std::ostream& get() { return *stream_; }
  void finish(const std::string& path) {
    stream_->flush();
    if (!*stream_) throw std::runtime_error("failed writing '" + path + "'");
  }

private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

void require_file(const std::string& path) {
  std::ifstream probe(path);
  if (!probe) throw std::runtime_error("cannot open input file '" + path + "'");
}

template <typename Fn>
int guarded(Streams io, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

std::array<std::size_t, 2> class_counts(const features::FeatureMatrix& m) {
  std::array<std::size_t, 2> c{};
  for (Label l : m.label_vector()) ++c[static_cast<std::size_t>(l)];
  return c;
}

std::vector<Label> predicted_labels(const std::vector<ModelPrediction>& preds) {
  std::vector<Label> out;
  out.reserve(preds.size());
  for (const auto& p : preds) out.push_back(p.prediction.label);
  return out;
}

}  // namespace

int cmd_synth(const RunConfig& config, std::optional<synth::Overlap> overlap,
              const std::string& out_path, Streams io) {
  return guarded(io, [&] {
    auto cfg = config.synth;
    cfg.seed = config.seed;
    if (overlap) cfg = synth::preset(*overlap, cfg);
    const auto windows = synth::generate(cfg);
    Sink sink(out_path, io.out);
    ingest::write_windows_csv(sink.get(), windows);
    sink.finish(out_path);
    if (!out_path.empty() && out_path != "-")
      io.err << "wrote " << windows.size() << " day windows to " << out_path << '\n';
    return kExitOk;
  });
}

int cmd_decompose(const RunConfig& config, const std::string& data_csv,
                  const std::optional<std::string>& sample_id, const std::string& out_path,
                  Streams io) {
  return guarded(io, [&] {
    const auto windows = load_windows(data_csv, config.pipeline, &io.err);
    if (windows.empty()) throw std::runtime_error("no usable day windows in '" + data_csv + "'");
    const ingest::DayWindow* chosen = &windows.front();
    if (sample_id) {
      chosen = nullptr;
      for (const auto& w : windows)
        if (w.sample_id() == *sample_id) chosen = &w;
      if (!chosen) throw std::runtime_error("sample '" + *sample_id + "' not found");
    }
    const auto& p = config.pipeline;
    const auto decomp =
        dwt::dwt_forward(chosen->values, dwt::wavelet(p.wavelet), p.levels, p.mode);

    Sink sink(out_path, io.out);
    auto& out = sink.get();
    out << "band,index,value\n";
    char buf[32];
    auto emit = [&](const std::string& band, const std::vector<double>& values) {
      for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", values[i]);
        out << band << ',' << i << ',' << buf << '\n';
      }
    };
    emit("a" + std::to_string(decomp.levels), decomp.approx);
    for (std::size_t j = decomp.levels; j >= 1; --j)
      emit("d" + std::to_string(j), decomp.details[j - 1]);
    sink.finish(out_path);
    return kExitOk;
  });
}

int cmd_features(const RunConfig& config, const std::string& data_csv,
                 const std::string& out_path, Streams io) {
  return guarded(io, [&] {
    const auto windows = load_windows(data_csv, config.pipeline, &io.err);
    Sink sink(out_path, io.out);
    if (windows.empty()) {
      features::FeatureMatrix empty;
      empty.feature_names = features::feature_names(config.pipeline.levels);
      features::write_matrix_csv(sink.get(), empty);
    } else {
      features::write_matrix_csv(
          sink.get(), features::build_matrix(windows, config.pipeline.extraction(config.threads)));
    }
    sink.finish(out_path);
    return kExitOk;
  });
}

int cmd_train(const RunConfig& config, const std::string& data_csv, const std::string& model_out,
              std::optional<double> holdout, Streams io) {
  return guarded(io, [&] {
    require_file(data_csv);
    const auto windows = load_windows(data_csv, config.pipeline, &io.err);
    if (windows.empty()) throw std::runtime_error("no usable day windows in '" + data_csv + "'");

    const auto matrix = features::build_matrix(windows, config.pipeline.extraction(config.threads));
    if (!matrix.fully_labeled())
      throw std::runtime_error("training data must be labeled (label column 0/1)");
    const auto counts = class_counts(matrix);
    if (counts[0] == 0 || counts[1] == 0)
      throw std::runtime_error("training data contains a single class (" +
                               std::to_string(counts[0] ? 0 : 1) +
                               "); refusing to train a degenerate classifier");

    features::FeatureMatrix train = matrix;
    std::optional<features::FeatureMatrix> test;
    if (holdout) {
      auto split = eval::split_stratified(matrix, *holdout, config.seed);
      train = std::move(split.train);
      test = std::move(split.test);
    }

    ModelDocument doc;
    doc.created_at = current_timestamp();
    doc.pipeline = config.pipeline;
    doc.pca = pca::fit(train, config.variance_target);
    const auto reduced = pca::transform(doc.pca, train);
    auto params = config.forest;
    params.seed = config.seed;
    const auto labels = train.label_vector();
    doc.forest = forest::train_forest(reduced, labels, params, train.sample_ids,
                                      forest::TrainOptions{config.threads});
    doc.training.sample_count = train.size();
    doc.training.seed = config.seed;
    doc.training.class_counts = class_counts(train);
    save_model(doc, model_out);

    io.out << "trained " << doc.forest.trees.size() << " trees on " << train.size()
           << " samples (" << matrix.cols() << " features -> " << doc.pca.k()
           << " principal components)\n";
    io.out << "model written to " << model_out << '\n';

    if (test) {
      const auto preds = predict_matrix(doc, *test);
      const auto report =
          eval::make_report(eval::confusion(test->label_vector(), predicted_labels(preds)));
      io.out << "\nHoldout evaluation (" << test->size() << " samples)\n";
      eval::write_report_text(io.out, report);
    }
    return kExitOk;
  });
}

int cmd_predict(const std::string& model_file, const std::string& data_csv,
                const std::string& out_path, const PipelineOverrides& overrides,
                unsigned threads, Streams io) {
  return guarded(io, [&] {
    const auto model = load_model(model_file);
    auto pipeline = model.pipeline;
    overrides.apply(pipeline);
    require_file(data_csv);
    const auto windows = load_windows(data_csv, pipeline, &io.err);

    std::vector<ModelPrediction> preds;
    if (!windows.empty()) {
      const auto matrix = features::build_matrix(windows, pipeline.extraction(threads));
      preds = predict_matrix(model, matrix);
    }

    Sink sink(out_path, io.out);
    auto& out = sink.get();
    out << "sample_id,predicted_class,votes_0,votes_1\n";
    for (const auto& p : preds)
      out << p.sample_id << ',' << p.prediction.label << ',' << p.prediction.votes[0] << ','
          << p.prediction.votes[1] << '\n';
    sink.finish(out_path);
    return kExitOk;
  });
}

int cmd_evaluate(const std::string& model_file, const std::string& labeled_csv,
                 ReportFormat format, unsigned threads, Streams io) {
  return guarded(io, [&] {
    const auto model = load_model(model_file);
    require_file(labeled_csv);
    const auto windows = load_windows(labeled_csv, model.pipeline, &io.err);
    if (windows.empty()) throw std::runtime_error("no usable day windows in '" + labeled_csv + "'");
    const auto matrix = features::build_matrix(windows, model.pipeline.extraction(threads));
    if (!matrix.fully_labeled())
      throw std::runtime_error("evaluation data must be labeled (label column 0/1)");

    const auto preds = predict_matrix(model, matrix);
    const auto report =
        eval::make_report(eval::confusion(matrix.label_vector(), predicted_labels(preds)));
    if (format == ReportFormat::csv) {
      eval::write_report_csv(io.out, report);
    } else {
      eval::write_report_text(io.out, report);
    }
    return kExitOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Streams io{out, err};
  CLI::App app{"pvff: photovoltaic panel fault classification"};
  app.require_subcommand(1);

  // Shared options. Flags override values from --config.
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Master random seed");
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
  };

  std::optional<std::string> wavelet, mode;
  std::optional<std::size_t> levels, window_len, max_gap;
  std::optional<double> daylight;
  auto add_pipeline = [&](CLI::App* sub) {
    sub->add_option("--wavelet", wavelet, "haar | db2 | db4");
    sub->add_option("--levels", levels, "Decomposition depth");
    sub->add_option("--mode", mode, "symmetric | periodic");
    sub->add_option("--window-len", window_len, "Minutes per day window");
    sub->add_option("--max-gap", max_gap, "Longest repairable gap in minutes");
    sub->add_option("--daylight-threshold", daylight, "Trim edges below this current (0 = off)");
  };

  std::string data, out_path = "-", model_path;
  std::optional<std::string> sample_id;
  std::optional<double> holdout, variance_target;
  std::optional<std::size_t> days, panels, n_trees, max_depth, min_leaf, mtry, bootstrap;
  std::string overlap_text, format_text = "text";

  auto* synth_cmd = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
  add_common(synth_cmd);
  synth_cmd->add_option("--days", days, "Days per class");
  synth_cmd->add_option("--panels", panels, "Panels per class");
  synth_cmd->add_option("--out", out_path, "Output CSV ('-' = stdout)");
  synth_cmd->add_option("--overlap", overlap_text, "easy | paper | hard");

  auto* decompose_cmd = app.add_subcommand("decompose", "Wavelet bands of one day window");
  add_common(decompose_cmd);
  add_pipeline(decompose_cmd);
  decompose_cmd->add_option("--data", data, "Trace CSV")->required();
  decompose_cmd->add_option("--sample", sample_id, "Sample id panel@YYYY-MM-DD");
  decompose_cmd->add_option("--out", out_path, "Output CSV ('-' = stdout)");

  auto* features_cmd = app.add_subcommand("features", "Feature matrix of every day window");
  add_common(features_cmd);
  add_pipeline(features_cmd);
  features_cmd->add_option("--data", data, "Trace CSV")->required();
  features_cmd->add_option("--out", out_path, "Output CSV ('-' = stdout)");

  auto* train_cmd = app.add_subcommand("train", "Train a model");
  add_common(train_cmd);
  add_pipeline(train_cmd);
  train_cmd->add_option("--data", data, "Labeled trace CSV")->required();
  train_cmd->add_option("--model", model_path, "Model output path")->required();
  train_cmd->add_option("--holdout", holdout, "Held-out fraction for evaluation")
      ->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--variance-target", variance_target, "PCA retained variance");
  train_cmd->add_option("--trees", n_trees, "Number of trees");
  train_cmd->add_option("--max-depth", max_depth, "Maximum tree depth");
  train_cmd->add_option("--min-samples-leaf", min_leaf, "Minimum samples per leaf");
  train_cmd->add_option("--mtry", mtry, "Features tried per split");
  train_cmd->add_option("--bootstrap-size", bootstrap, "Rows drawn per tree");

  auto* predict_cmd = app.add_subcommand("predict", "Classify day windows");
  add_common(predict_cmd);
  add_pipeline(predict_cmd);
  predict_cmd->add_option("--model", model_path, "Model file")->required();
  predict_cmd->add_option("--data", data, "Trace CSV")->required();
  predict_cmd->add_option("--out", out_path, "Output CSV ('-' = stdout)");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate a model on labeled data");
  add_common(evaluate_cmd);
  evaluate_cmd->add_option("--model", model_path, "Model file")->required();
  evaluate_cmd->add_option("--data", data, "Labeled trace CSV")->required();
  evaluate_cmd->add_option("--format", format_text, "text | csv")
      ->check(CLI::IsMember({"text", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    if (!app.get_subcommands().empty())
      err << app.get_subcommands().front()->help();
    return kExitUsageError;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) apply_config_file(config, config_path);
    if (seed) config.seed = *seed;
    if (threads) config.threads = *threads;
    auto& o = config.pipeline_overrides;
    if (wavelet) o.wavelet = dwt::parse_wavelet_name(*wavelet);
    if (mode) o.mode = dwt::parse_boundary_mode(*mode);
    if (levels) o.levels = *levels;
    if (window_len) o.window_len = *window_len;
    if (max_gap) o.max_gap = *max_gap;
    if (daylight) o.daylight_threshold = *daylight;
    o.apply(config.pipeline);
    if (days) config.synth.days_per_class = *days;
    if (panels) config.synth.panels_per_class = *panels;
    if (variance_target) config.variance_target = *variance_target;
    if (n_trees) config.forest.n_trees = *n_trees;
    if (max_depth) config.forest.max_depth = *max_depth;
    if (min_leaf) config.forest.min_samples_leaf = *min_leaf;
    if (mtry) config.forest.mtry = *mtry;
    if (bootstrap) config.forest.bootstrap_size = *bootstrap;
    config.sync_seed();
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }

  if (synth_cmd->parsed()) {
    std::optional<synth::Overlap> overlap;
    if (!overlap_text.empty()) {
      try {
        overlap = synth::parse_overlap(overlap_text);
      } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsageError;
      }
    }
    return cmd_synth(config, overlap, out_path, io);
  }
  if (decompose_cmd->parsed()) return cmd_decompose(config, data, sample_id, out_path, io);
  if (features_cmd->parsed()) return cmd_features(config, data, out_path, io);
  if (train_cmd->parsed()) return cmd_train(config, data, model_path, holdout, io);
  if (predict_cmd->parsed())
    return cmd_predict(model_path, data, out_path, config.pipeline_overrides, config.threads, io);
  if (evaluate_cmd->parsed())
    return cmd_evaluate(model_path, data,
                        format_text == "csv" ? ReportFormat::csv : ReportFormat::text,
                        config.threads, io);
  return kExitUsageError;
}

}  // namespace pvff::cli
