#pragma once

// Flat (single eight-way model) and hierarchical (indoor/outdoor router in
// front of two eight-way models) training and prediction.
//
// The hierarchical land-use training set is partitioned by the router's
// PREDICTED indoor/outdoor label, not by ground truth, so each branch model
// sees exactly the images it will be handed at test time.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "landuse/corpus.hpp"
#include "landuse/features.hpp"
#include "landuse/learn.hpp"

namespace landuse::pipeline {

struct TrainConfig {
  std::vector<double> C_grid = learn::default_C_grid();
  double tol = 0.1;
  std::uint32_t max_iter = 1000;
  std::uint32_t folds = 5;
  std::uint64_t seed = 42;
  unsigned threads = 1;
};

struct FlatModel {
  learn::LinearModel landuse;

  friend bool operator==(const FlatModel&, const FlatModel&) = default;
};

struct HierModel {
  learn::LinearModel router;  // classes {indoor, outdoor}
  learn::LinearModel indoor;
  learn::LinearModel outdoor;

  friend bool operator==(const HierModel&, const HierModel&) = default;
};

using AnyModel = std::variant<FlatModel, HierModel>;

/// Diagnostics gathered while training; none of it is needed to predict.
struct TrainReport {
  struct Stage {
    std::string name;
    std::size_t samples = 0;
    double chosen_C = 0.0;
    std::vector<double> cv_mean_accuracy;
    std::vector<std::string> classes;
  };
  std::vector<Stage> stages;
  std::vector<std::string> warnings;
  std::size_t indoor_partition = 0;
  std::size_t outdoor_partition = 0;
};

/// Throws MissingFeatures listing every train id absent from the store.
FlatModel train_flat(std::span<const corpus::PhotoRecord> train, const features::FeatureStore& store,
                     const TrainConfig& cfg, TrainReport* report = nullptr);

/// `in_out` supplies indoor/outdoor ground truth for the router. Throws
/// EmptyPartition when the router sends no training image to a branch.
HierModel train_hier(std::span<const corpus::PhotoRecord> train, std::span<const corpus::PhotoRecord> in_out,
                     const features::FeatureStore& store, const TrainConfig& cfg, TrainReport* report = nullptr);

enum class Branch : std::uint8_t { flat, indoor, outdoor };
std::string_view to_string(Branch b);

struct ImagePrediction {
  std::string photo_id;
  Branch branch = Branch::flat;
  std::string predicted_class;
  /// Winning decision value.
  double score = 0.0;
};

/// Output order follows `ids`. Throws MissingFeatures.
std::vector<ImagePrediction> predict_flat(const FlatModel& m, const features::FeatureStore& store,
                                          std::span<const std::string> ids, unsigned threads = 1);
std::vector<ImagePrediction> predict_hier(const HierModel& m, const features::FeatureStore& store,
                                          std::span<const std::string> ids, unsigned threads = 1);
std::vector<ImagePrediction> predict(const AnyModel& m, const features::FeatureStore& store,
                                     std::span<const std::string> ids, unsigned threads = 1);

/// `photo_id,branch,predicted_class,score`, score with 6 significant digits.
std::string format_predictions_csv(std::span<const ImagePrediction> preds);
std::vector<ImagePrediction> parse_predictions_csv(std::string_view csv);

// ---------------------------------------------------------------------------
// Model files: "LUP1" | u8 kind (0 flat, 1 hierarchical) | LUM1 records
// (one for flat; router, indoor, outdoor for hierarchical).

std::vector<std::uint8_t> encode_model(const AnyModel& m);
AnyModel decode_model(std::span<const std::uint8_t> bytes);

void save_model(const AnyModel& m, const std::string& path);
AnyModel load_model(const std::string& path);
/// Throw WrongModelKind when the file holds the other kind.
FlatModel load_flat_model(const std::string& path);
HierModel load_hier_model(const std::string& path);

}  // namespace landuse::pipeline
