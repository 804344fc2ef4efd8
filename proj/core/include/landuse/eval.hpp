#pragma once

// Image-level metrics (precision / recall / F1 per class, macro averages,
// accuracy) and region-level majority-vote labeling.

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "landuse/common.hpp"

namespace landuse::eval {

/// counts[i][j] = images of true class i predicted as class j, indexed by
/// LandUseClass.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kNumLandUseClasses>, kNumLandUseClasses> counts{};

  void add(LandUseClass truth, LandUseClass predicted) {
    ++counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
  }
  std::size_t total() const;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct Metrics {
  std::array<ClassMetrics, kNumLandUseClasses> per_class{};
  ClassMetrics macro;
  double accuracy = 0.0;
};

/// Harmonic mean; 0 when both inputs are 0.
double f1_score(double precision, double recall);

/// Zero-denominator precision or recall is reported as 0. Macro averages are
/// unweighted means over all eight classes.
Metrics prf1(const ConfusionMatrix& cm);

/// Fraction of ids whose prediction equals the truth. Throws IdMismatch
/// when the two maps do not cover the same ids.
double image_accuracy(const std::map<std::string, LandUseClass>& truth,
                      const std::map<std::string, LandUseClass>& predicted);

struct Vote {
  std::string region_id;
  LandUseClass predicted = LandUseClass::study;
  double score = 0.0;
};

struct RegionPrediction {
  std::string region_id;
  std::array<std::size_t, kNumLandUseClasses> votes{};
  std::array<double, kNumLandUseClasses> score_sums{};
  std::optional<LandUseClass> label;  // nullopt = unlabeled
  std::size_t n_images = 0;
};

/// One entry per id in `region_ids`, in that order. A vote whose region id
/// is not listed is re-grouped to its parent ("a#2" -> "a") before matching.
/// Ties: most votes, then larger summed score, then class name. Throws
/// UnknownRegion for a vote matching no region.
std::vector<RegionPrediction> region_vote(std::span<const Vote> votes, std::span<const std::string> region_ids);

struct RegionAccuracy {
  std::size_t correct = 0;
  std::size_t evaluated = 0;
  /// NaN when nothing was evaluated.
  double accuracy = 0.0;
};

/// Unlabeled regions are excluded from the denominator. Throws UnknownRegion
/// when a labeled prediction has no ground truth.
RegionAccuracy region_accuracy(std::span<const RegionPrediction> preds,
                               const std::map<std::string, LandUseClass>& truth);

/// "class,precision,recall,f1" rows in class order, an `average` row and an
/// `accuracy` footer.
std::string format_metrics_csv(const Metrics& m);

/// "region_id,true_class,predicted_class,n_images,correct"; unlabeled regions
/// print `unlabeled` and correct `n/a`.
std::string format_region_report(std::span<const RegionPrediction> preds,
                                 const std::map<std::string, LandUseClass>& truth);

struct RegionReportRow {
  std::string region_id;
  std::optional<LandUseClass> predicted;
};
std::vector<RegionReportRow> parse_region_report(std::string_view csv);

/// Formats an accuracy as a percentage with two decimals, or "n/a".
std::string format_percent(double accuracy);

}  // namespace landuse::eval
