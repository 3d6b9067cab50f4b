#include "pvff/model_io.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace pvff {

using nlohmann::json;

namespace {

json optional_to_json(const std::optional<std::size_t>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<std::size_t> optional_from_json(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::size_t>();
}

json node_to_json(const forest::DecisionTree& tree, std::uint32_t index) {
  const auto& node = tree.nodes.at(index);
  json j;
  j["counts"] = {node.counts[0], node.counts[1]};
  if (!node.is_leaf()) {
    j["feature"] = node.feature;
    j["threshold"] = node.threshold;
    j["left"] = node_to_json(tree, node.left);
    j["right"] = node_to_json(tree, node.right);
  }
  return j;
}

// Rebuilds nodes in preorder, matching the layout produced by training.
std::uint32_t node_from_json(const json& j, forest::DecisionTree& tree, std::size_t n_features) {
  const auto index = static_cast<std::uint32_t>(tree.nodes.size());
  tree.nodes.emplace_back();
  const auto counts = j.at("counts").get<std::array<std::uint32_t, 2>>();
  tree.nodes[index].counts = counts;
  if (j.contains("feature")) {
    const auto feature = j.at("feature").get<std::int32_t>();
    if (feature < 0 || static_cast<std::size_t>(feature) >= n_features)
      throw std::invalid_argument("tree node feature index " + std::to_string(feature) +
                                  " out of range");
    tree.nodes[index].feature = feature;
    tree.nodes[index].threshold = j.at("threshold").get<double>();
    const auto l = node_from_json(j.at("left"), tree, n_features);
    const auto r = node_from_json(j.at("right"), tree, n_features);
    tree.nodes[index].left = l;
    tree.nodes[index].right = r;
  }
  return index;
}

json pca_to_json(const pca::PcaModel& m) {
  return json{{"feature_names", m.feature_names},
              {"means", m.means},
              {"scales", m.scales},
              {"components", m.components},
              {"explained_variance", m.explained_variance},
              {"explained_variance_ratio", m.explained_variance_ratio},
              {"k", m.k()}};
}

pca::PcaModel pca_from_json(const json& j) {
  pca::PcaModel m;
  j.at("feature_names").get_to(m.feature_names);
  j.at("means").get_to(m.means);
  j.at("scales").get_to(m.scales);
  j.at("components").get_to(m.components);
  j.at("explained_variance").get_to(m.explained_variance);
  j.at("explained_variance_ratio").get_to(m.explained_variance_ratio);
  const std::size_t d = m.means.size();
  if (m.feature_names.size() != d || m.scales.size() != d ||
      m.explained_variance_ratio.size() != d)
    throw std::invalid_argument("pca block has inconsistent dimensions");
  if (j.at("k").get<std::size_t>() != m.components.size() ||
      m.explained_variance.size() != m.components.size())
    throw std::invalid_argument("pca block: k does not match the component count");
  for (const auto& c : m.components)
    if (c.size() != d) throw std::invalid_argument("pca component has wrong length");
  return m;
}

json pipeline_to_json(const PipelineConfig& p) {
  return json{{"wavelet", std::string(dwt::to_string(p.wavelet))},
              {"levels", p.levels},
              {"mode", std::string(dwt::to_string(p.mode))},
              {"window_len", p.window_len},
              {"max_gap", p.max_gap},
              {"daylight_threshold", p.daylight_threshold}};
}

PipelineConfig pipeline_from_json(const json& j) {
  PipelineConfig p;
  p.wavelet = dwt::parse_wavelet_name(j.at("wavelet").get<std::string>());
  p.levels = j.at("levels").get<std::size_t>();
  p.mode = dwt::parse_boundary_mode(j.at("mode").get<std::string>());
  p.window_len = j.at("window_len").get<std::size_t>();
  p.max_gap = j.at("max_gap").get<std::size_t>();
  p.daylight_threshold = j.at("daylight_threshold").get<double>();
  return p;
}

}  // namespace

std::vector<ModelPrediction> predict_matrix(const ModelDocument& model,
                                            const features::FeatureMatrix& matrix) {
  const auto reduced = pca::transform(model.pca, matrix);
  std::vector<ModelPrediction> out;
  out.reserve(reduced.size());
  for (std::size_t i = 0; i < reduced.size(); ++i)
    out.push_back({matrix.sample_ids[i], forest::predict(model.forest, reduced[i])});
  return out;
}

json forest_to_json(const forest::ForestModel& model) {
  const auto& p = model.params;
  json trees = json::array();
  for (const auto& t : model.trees) trees.push_back(node_to_json(t, 0));
  return json{{"params",
               {{"n_trees", p.n_trees},
                {"max_depth", optional_to_json(p.max_depth)},
                {"min_samples_leaf", p.min_samples_leaf},
                {"mtry", optional_to_json(p.mtry)},
                {"bootstrap_size", optional_to_json(p.bootstrap_size)},
                {"sample_without_replacement", p.sample_without_replacement},
                {"seed", p.seed}}},
              {"n_features", model.n_features},
              {"classes", model.classes},
              {"trees", std::move(trees)}};
}

forest::ForestModel forest_from_json(const json& j) {
  forest::ForestModel m;
  const auto& p = j.at("params");
  m.params.n_trees = p.at("n_trees").get<std::size_t>();
  m.params.max_depth = optional_from_json(p, "max_depth");
  m.params.min_samples_leaf = p.at("min_samples_leaf").get<std::size_t>();
  m.params.mtry = optional_from_json(p, "mtry");
  m.params.bootstrap_size = optional_from_json(p, "bootstrap_size");
  m.params.sample_without_replacement = p.at("sample_without_replacement").get<bool>();
  m.params.seed = p.at("seed").get<std::uint64_t>();
  m.n_features = j.at("n_features").get<std::size_t>();
  j.at("classes").get_to(m.classes);

  const auto& trees = j.at("trees");
  if (trees.size() != m.params.n_trees)
    throw std::invalid_argument("model declares " + std::to_string(m.params.n_trees) +
                                " trees but stores " + std::to_string(trees.size()));
  for (const auto& t : trees) {
    forest::DecisionTree tree;
    node_from_json(t, tree, m.n_features);
    m.trees.push_back(std::move(tree));
  }
  return m;
}

json model_to_json(const ModelDocument& doc) {
  return json{{"format_version", doc.format_version},
              {"created_at", doc.created_at},
              {"pipeline", pipeline_to_json(doc.pipeline)},
              {"feature_names", doc.pca.feature_names},
              {"pca", pca_to_json(doc.pca)},
              {"forest", forest_to_json(doc.forest)},
              {"training",
               {{"sample_count", doc.training.sample_count},
                {"seed", doc.training.seed},
                {"class_counts", doc.training.class_counts}}}};
}

ModelDocument model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("format_version"))
    throw std::invalid_argument("not a model document (missing format_version)");
  const auto& version = j.at("format_version");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion)
    throw std::invalid_argument("unsupported model format_version " + version.dump() +
                                " (expected " + std::to_string(kModelFormatVersion) + ")");
  ModelDocument doc;
  doc.created_at = j.at("created_at").get<std::string>();
  doc.pipeline = pipeline_from_json(j.at("pipeline"));
  doc.pca = pca_from_json(j.at("pca"));
  if (j.at("feature_names").get<std::vector<std::string>>() != doc.pca.feature_names)
    throw std::invalid_argument("model feature_names disagree with the pca block");
  doc.forest = forest_from_json(j.at("forest"));
  if (doc.forest.n_features != doc.pca.k())
    throw std::invalid_argument("forest expects " + std::to_string(doc.forest.n_features) +
                                " inputs but pca yields " + std::to_string(doc.pca.k()));
  const auto& t = j.at("training");
  doc.training.sample_count = t.at("sample_count").get<std::size_t>();
  doc.training.seed = t.at("seed").get<std::uint64_t>();
  t.at("class_counts").get_to(doc.training.class_counts);
  return doc;
}

void save_model(const ModelDocument& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open model file '" + path + "' for writing");
  out << model_to_json(doc).dump(1) << '\n';
  if (!out) throw std::runtime_error("failed writing model file '" + path + "'");
}

ModelDocument load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("model file '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const json::exception& e) {
    throw std::runtime_error("model file '" + path + "' is malformed: " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error("model file '" + path + "': " + e.what());
  }
}

std::string current_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) now = std::strtoll(epoch, nullptr, 10);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace pvff
