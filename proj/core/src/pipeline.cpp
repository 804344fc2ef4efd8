#include "landuse/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "landuse/parallel.hpp"

namespace landuse::pipeline {

using corpus::PhotoRecord;
using features::FeatureStore;
using learn::LinearModel;

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::flat: return "flat";
    case Branch::indoor: return "indoor";
    case Branch::outdoor: return "outdoor";
  }
  return "?";
}

namespace {

void require_features(const FeatureStore& store, std::span<const std::string> ids) {
  std::vector<std::string> missing;
  for (const auto& id : ids) {
    if (!store.contains(id)) missing.push_back(id);
  }
  if (!missing.empty()) {
    constexpr std::size_t kShown = 20;
    std::string list;
    for (std::size_t i = 0; i < std::min(kShown, missing.size()); ++i) {
      list += fmt::format("{}\"{}\"", i ? ", " : "", missing[i]);
    }
    if (missing.size() > kShown) list += fmt::format(", ... ({} total)", missing.size());
    throw Error(ErrorCode::MissingFeatures, fmt::format("no feature vector for [{}]", list));
  }
}

std::string grid_fallback_note(const TrainConfig& cfg, double& C) {
  // Closest grid value to 1 in log space.
  C = cfg.C_grid.front();
  for (double c : cfg.C_grid) {
    if (std::fabs(std::log(c)) < std::fabs(std::log(C))) C = c;
  }
  return fmt::format("too few samples for {}-fold cross-validation; using C = {}", cfg.folds, C);
}

/// Fits a scaler on `ids`, selects C by cross-validation and trains the
/// final one-vs-rest model on all of `ids`. A single distinct label yields a
/// constant model.
LinearModel fit_linear(std::string_view stage, std::span<const std::string> ids, std::span<const std::string> labels,
                       const FeatureStore& store, const TrainConfig& cfg, TrainReport* report) {
  require_features(store, ids);
  auto scaler = features::fit_scaler(store, ids);
  learn::SparseMatrix x(store.dim());
  std::vector<float> buf(store.dim());
  for (const auto& id : ids) {
    scaler.transform(store.at(id), buf);
    x.add_row(buf);
  }

  TrainReport::Stage info{std::string(stage), ids.size(), 0.0, {}, {}};
  std::vector<std::string> distinct(labels.begin(), labels.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  LinearModel model;
  if (distinct.size() < 2) {
    model = learn::constant_model(distinct.front(), store.dim(), std::move(scaler));
    if (report) report->warnings.push_back(fmt::format("{}: single class '{}', constant model", stage, distinct.front()));
  } else {
    learn::SolverOptions solver{cfg.tol, cfg.max_iter, cfg.seed, true};
    double C = 0.0;
    if (ids.size() >= cfg.folds) {
      const auto cv = learn::cross_validate(x, labels, cfg.C_grid, {cfg.folds, cfg.seed, solver, cfg.threads});
      C = cv.chosen_C;
      info.cv_mean_accuracy = cv.mean_accuracy;
      if (report) {
        for (const auto& w : cv.warnings) report->warnings.push_back(fmt::format("{}: {}", stage, w));
      }
    } else {
      auto note = grid_fallback_note(cfg, C);
      if (report) report->warnings.push_back(fmt::format("{}: {}", stage, note));
    }
    learn::OvrReport ovr;
    model = learn::train_ovr(x, labels, scaler, {C, solver, cfg.threads}, &ovr);
    if (report) {
      for (const auto& c : ovr.unconverged)
        report->warnings.push_back(fmt::format("{}: solver for class '{}' hit max_iter", stage, c));
    }
  }
  info.chosen_C = model.C;
  info.classes = model.classes;
  if (report) report->stages.push_back(std::move(info));
  return model;
}

void collect_landuse(std::span<const PhotoRecord> train, std::vector<std::string>& ids,
                     std::vector<std::string>& labels) {
  for (const auto& r : train) {
    if (!r.true_class)
      throw Error(ErrorCode::InvalidArgument, fmt::format("training photo '{}' has no true_class", r.photo_id));
    ids.push_back(r.photo_id);
    labels.emplace_back(to_string(*r.true_class));
  }
}

}  // namespace

FlatModel train_flat(std::span<const PhotoRecord> train, const FeatureStore& store, const TrainConfig& cfg,
                     TrainReport* report) {
  if (train.empty()) throw Error(ErrorCode::EmptyInput, "training manifest is empty");
  std::vector<std::string> ids, labels;
  collect_landuse(train, ids, labels);
  require_features(store, ids);
  return FlatModel{fit_linear("flat", ids, labels, store, cfg, report)};
}

HierModel train_hier(std::span<const PhotoRecord> train, std::span<const PhotoRecord> in_out,
                     const FeatureStore& store, const TrainConfig& cfg, TrainReport* report) {
  if (train.empty()) throw Error(ErrorCode::EmptyInput, "training manifest is empty");
  std::vector<std::string> ids, labels;
  collect_landuse(train, ids, labels);
  require_features(store, ids);

  std::vector<std::string> router_ids, router_labels;
  for (const auto& r : in_out) {
    if (!r.in_out)
      throw Error(ErrorCode::InvalidArgument, fmt::format("indoor/outdoor photo '{}' has no in_out label", r.photo_id));
    router_ids.push_back(r.photo_id);
    router_labels.emplace_back(to_string(*r.in_out));
  }
  if (router_ids.empty()) throw Error(ErrorCode::EmptyInput, "indoor/outdoor manifest is empty");

  HierModel h;
  h.router = fit_linear("router", router_ids, router_labels, store, cfg, report);

  std::vector<char> indoor(ids.size());
  parallel_for(ids.size(), cfg.threads, [&](std::size_t i) {
    const auto p = learn::predict(h.router, store.at(ids[i]));
    indoor[i] = h.router.classes[p.class_index] == "indoor";
  });

  std::vector<std::string> in_ids, in_labels, out_ids, out_labels;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    (indoor[i] ? in_ids : out_ids).push_back(ids[i]);
    (indoor[i] ? in_labels : out_labels).push_back(labels[i]);
  }
  if (report) {
    report->indoor_partition = in_ids.size();
    report->outdoor_partition = out_ids.size();
  }
  if (in_ids.empty()) throw Error(ErrorCode::EmptyPartition, "router assigned no training image to indoor");
  if (out_ids.empty()) throw Error(ErrorCode::EmptyPartition, "router assigned no training image to outdoor");

  h.indoor = fit_linear("indoor", in_ids, in_labels, store, cfg, report);
  h.outdoor = fit_linear("outdoor", out_ids, out_labels, store, cfg, report);
  if (report) {
    for (const auto* branch : {&h.indoor, &h.outdoor}) {
      if (branch->classes.size() < kNumLandUseClasses) {
        report->warnings.push_back(fmt::format("{} branch trained on {} of {} classes",
                                               branch == &h.indoor ? "indoor" : "outdoor", branch->classes.size(),
                                               kNumLandUseClasses));
      }
    }
  }
  return h;
}

// ---------------------------------------------------------------------------

std::vector<ImagePrediction> predict_flat(const FlatModel& m, const FeatureStore& store,
                                          std::span<const std::string> ids, unsigned threads) {
  require_features(store, ids);
  std::vector<ImagePrediction> out(ids.size());
  parallel_for(ids.size(), threads, [&](std::size_t i) {
    const auto p = learn::predict(m.landuse, store.at(ids[i]));
    out[i] = {ids[i], Branch::flat, m.landuse.classes[p.class_index], p.decision[p.class_index]};
  });
  return out;
}

std::vector<ImagePrediction> predict_hier(const HierModel& m, const FeatureStore& store,
                                          std::span<const std::string> ids, unsigned threads) {
  require_features(store, ids);
  std::vector<ImagePrediction> out(ids.size());
  parallel_for(ids.size(), threads, [&](std::size_t i) {
    const auto v = store.at(ids[i]);
    const auto route = learn::predict(m.router, v);
    const bool is_indoor = m.router.classes[route.class_index] == "indoor";
    const auto& branch = is_indoor ? m.indoor : m.outdoor;
    const auto p = learn::predict(branch, v);
    out[i] = {ids[i], is_indoor ? Branch::indoor : Branch::outdoor, branch.classes[p.class_index],
              p.decision[p.class_index]};
  });
  return out;
}

std::vector<ImagePrediction> predict(const AnyModel& m, const FeatureStore& store, std::span<const std::string> ids,
                                     unsigned threads) {
  if (const auto* flat = std::get_if<FlatModel>(&m)) return predict_flat(*flat, store, ids, threads);
  return predict_hier(std::get<HierModel>(m), store, ids, threads);
}

std::string format_predictions_csv(std::span<const ImagePrediction> preds) {
  std::string out = "photo_id,branch,predicted_class,score\n";
  for (const auto& p : preds) {
    out += fmt::format("{},{},{},{:.6g}\n", p.photo_id, to_string(p.branch), p.predicted_class, p.score);
  }
  return out;
}

std::vector<ImagePrediction> parse_predictions_csv(std::string_view csv) {
  std::vector<ImagePrediction> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < csv.size()) {
    auto end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    auto line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "photo_id,branch,predicted_class,score")
        throw Error(ErrorCode::Malformed, "predictions CSV header must be photo_id,branch,predicted_class,score");
      continue;
    }
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 4) throw Error(ErrorCode::Malformed, fmt::format("predictions line {}: expected 4 columns", line_no));
    ImagePrediction p;
    p.photo_id = std::string(cells[0]);
    if (cells[1] == "flat") {
      p.branch = Branch::flat;
    } else if (cells[1] == "indoor") {
      p.branch = Branch::indoor;
    } else if (cells[1] == "outdoor") {
      p.branch = Branch::outdoor;
    } else {
      throw Error(ErrorCode::Malformed, fmt::format("predictions line {}: unknown branch '{}'", line_no, cells[1]));
    }
    p.predicted_class = std::string(cells[2]);
    auto [ptr, ec] = std::from_chars(cells[3].data(), cells[3].data() + cells[3].size(), p.score);
    if (ec != std::errc() || ptr != cells[3].data() + cells[3].size())
      throw Error(ErrorCode::Malformed, fmt::format("predictions line {}: bad score '{}'", line_no, cells[3]));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace landuse::pipeline
