#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "json.hpp"
#include "pvff/forest.hpp"
#include "pvff/pca.hpp"
#include "pvff/pipeline.hpp"

namespace pvff {

inline constexpr int kModelFormatVersion = 1;

struct TrainingMetadata {
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  std::array<std::size_t, 2> class_counts{};
};

/// Everything needed to classify a raw trace: the signal pipeline, the
/// fitted PCA and the forest. Persisted as one self-describing JSON file.
struct ModelDocument {
  int format_version = kModelFormatVersion;
  std::string created_at;
  PipelineConfig pipeline;
  pca::PcaModel pca;
  forest::ForestModel forest;
  TrainingMetadata training;
};

struct ModelPrediction {
  std::string sample_id;
  forest::Prediction prediction;
};

/// Features -> PCA -> forest for every row; never refits anything.
std::vector<ModelPrediction> predict_matrix(const ModelDocument& model,
                                            const features::FeatureMatrix& matrix);

nlohmann::json forest_to_json(const forest::ForestModel& model);
forest::ForestModel forest_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const ModelDocument& doc);
/// Rejects documents whose format_version is not kModelFormatVersion.
ModelDocument model_from_json(const nlohmann::json& j);

void save_model(const ModelDocument& doc, const std::string& path);
ModelDocument load_model(const std::string& path);

/// UTC ISO-8601 timestamp for `created_at`; honours SOURCE_DATE_EPOCH.
std::string current_timestamp();

}  // namespace pvff
