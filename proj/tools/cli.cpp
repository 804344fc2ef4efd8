#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "landuse/corpus.hpp"
#include "landuse/eval.hpp"
#include "landuse/features.hpp"
#include "landuse/geo.hpp"
#include "landuse/io.hpp"

namespace landuse::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Config

namespace {

std::string resolve(const std::string& base_dir, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute() || base_dir.empty()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj[key].get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Malformed, fmt::format("config field '{}': {}", key, e.what()));
  }
}

void read_style(const json& s, const std::string& base_dir, mapgen::MapStyle& style) {
  if (!s.is_object()) throw Error(ErrorCode::Malformed, "config 'style' must be an object");
  read_field(s, "title", style.title);
  read_field(s, "background", style.background);
  read_field(s, "stroke", style.stroke);
  read_field(s, "stroke_width", style.stroke_width);
  read_field(s, "unlabeled_fill", style.unlabeled_fill);
  read_field(s, "unlabeled_stroke", style.unlabeled_stroke);
  read_field(s, "map_width", style.map_width);
  if (s.contains("legend")) {
    std::string where;
    read_field(s, "legend", where);
    if (where == "right") {
      style.legend = mapgen::LegendPlacement::right;
    } else if (where == "bottom") {
      style.legend = mapgen::LegendPlacement::bottom;
    } else {
      throw Error(ErrorCode::Malformed, fmt::format("legend placement '{}' is not right or bottom", where));
    }
  }
  if (s.contains("fill")) {
    if (!s["fill"].is_object()) throw Error(ErrorCode::Malformed, "config 'style.fill' must be an object");
    for (const auto& [name, color] : s["fill"].items()) {
      if (!color.is_string()) throw Error(ErrorCode::Malformed, fmt::format("fill for '{}' must be a string", name));
      style.fill[static_cast<std::size_t>(parse_land_use(name))] = color.get<std::string>();
    }
  }
  if (s.contains("overlay_svg")) {
    std::string path;
    read_field(s, "overlay_svg", path);
    style.overlay_svg = read_text_file(resolve(base_dir, path));
  }
}

}  // namespace

Config parse_config(const std::string& json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Malformed, fmt::format("config: {}", e.what()));
  }
  if (!doc.is_object()) throw Error(ErrorCode::Malformed, "config must be a JSON object");
  Config c;
  read_field(doc, "seed", c.seed);
  read_field(doc, "fraction", c.fraction);
  read_field(doc, "target", c.target);
  read_field(doc, "C_grid", c.C_grid);
  read_field(doc, "tol", c.tol);
  read_field(doc, "folds", c.folds);
  read_field(doc, "max_iter", c.max_iter);
  read_field(doc, "threads", c.threads);
  if (doc.contains("paths")) {
    const auto& p = doc["paths"];
    if (!p.is_object()) throw Error(ErrorCode::Malformed, "config 'paths' must be an object");
    read_field(p, "regions", c.regions);
    read_field(p, "photos", c.photos);
    read_field(p, "inout", c.inout);
    read_field(p, "keywords", c.keywords);
    read_field(p, "features", c.features);
    read_field(p, "output_dir", c.output_dir);
    for (auto* s : {&c.regions, &c.photos, &c.inout, &c.keywords, &c.features, &c.output_dir}) *s = resolve(base_dir, *s);
  }
  if (doc.contains("style")) read_style(doc["style"], base_dir, c.style);
  return c;
}

Config load_config(const std::string& path) {
  const auto base = fs::path(path).parent_path().string();
  return parse_config(read_text_file(path), base);
}

// ---------------------------------------------------------------------------
// Stage helpers shared by the single-stage subcommands and `pipeline`.

namespace {

std::shared_ptr<spdlog::logger> logger() {
  static auto log = [] {
    auto l = std::make_shared<spdlog::logger>("landuse", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    l->set_pattern("[%l] %v");
    return l;
  }();
  const char* env = std::getenv("LANDUSE_LOG");
  const std::string level = env ? env : "info";
  log->set_level(level == "error"  ? spdlog::level::err
                 : level == "warn" ? spdlog::level::warn
                 : level == "debug" ? spdlog::level::debug
                                    : spdlog::level::info);
  return log;
}

void require_input(const std::string& path, std::string_view what) {
  if (path.empty()) throw Error(ErrorCode::InvalidArgument, fmt::format("no {} path given", what));
  if (!fs::is_regular_file(path))
    throw Error(ErrorCode::InvalidArgument, fmt::format("{} file '{}' does not exist", what, path));
}

void require_output(const std::string& path, std::string_view what) {
  if (path.empty()) throw Error(ErrorCode::InvalidArgument, fmt::format("no {} output path given", what));
}

void prepare_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

struct Evaluation {
  eval::Metrics metrics;
  std::vector<eval::RegionPrediction> regions;
  eval::RegionAccuracy region_accuracy;
  std::map<std::string, LandUseClass> region_truth;
  std::size_t indoor = 0;
  std::size_t outdoor = 0;
};

Evaluation evaluate(std::span<const pipeline::ImagePrediction> preds, std::span<const corpus::PhotoRecord> test,
                    const geo::RegionSet& rs) {
  std::map<std::string, const corpus::PhotoRecord*> by_id;
  for (const auto& r : test) {
    if (!r.true_class || !r.region_id)
      throw Error(ErrorCode::Malformed, fmt::format("test photo '{}' needs true_class and region_id", r.photo_id));
    by_id.emplace(r.photo_id, &r);
  }
  Evaluation ev;
  eval::ConfusionMatrix cm;
  std::map<std::string, LandUseClass> truth, predicted;
  std::vector<eval::Vote> votes;
  for (const auto& p : preds) {
    auto it = by_id.find(p.photo_id);
    if (it == by_id.end())
      throw Error(ErrorCode::IdMismatch, fmt::format("prediction for '{}' has no test record", p.photo_id));
    const auto cls = parse_land_use(p.predicted_class);
    cm.add(*it->second->true_class, cls);
    truth[p.photo_id] = *it->second->true_class;
    predicted[p.photo_id] = cls;
    votes.push_back({*it->second->region_id, cls, p.score});
    if (p.branch == pipeline::Branch::indoor) ++ev.indoor;
    if (p.branch == pipeline::Branch::outdoor) ++ev.outdoor;
  }
  if (truth.size() != by_id.size())
    throw Error(ErrorCode::IdMismatch,
                fmt::format("{} predictions for {} test photos", truth.size(), by_id.size()));
  ev.metrics = eval::prf1(cm);
  ev.metrics.accuracy = eval::image_accuracy(truth, predicted);
  ev.regions = eval::region_vote(votes, rs.parent_ids());
  for (const auto& id : rs.parent_ids()) ev.region_truth[id] = *rs.parent_land_use(id);
  ev.region_accuracy = eval::region_accuracy(ev.regions, ev.region_truth);
  return ev;
}

mapgen::RegionLabels labels_from(const std::vector<eval::RegionPrediction>& regions) {
  mapgen::RegionLabels labels;
  for (const auto& r : regions) labels[r.region_id] = r.label;
  return labels;
}

ordered_json evaluation_json(const Evaluation& ev) {
  ordered_json j;
  j["image_accuracy"] = ev.metrics.accuracy;
  j["macro_precision"] = ev.metrics.macro.precision;
  j["macro_recall"] = ev.metrics.macro.recall;
  j["macro_f1"] = ev.metrics.macro.f1;
  j["regions_evaluated"] = ev.region_accuracy.evaluated;
  j["regions_correct"] = ev.region_accuracy.correct;
  j["region_accuracy"] = ev.region_accuracy.evaluated ? ordered_json(ev.region_accuracy.accuracy) : ordered_json("n/a");
  if (ev.indoor + ev.outdoor > 0) {
    j["indoor_images"] = ev.indoor;
    j["outdoor_images"] = ev.outdoor;
  }
  return j;
}

void log_report(const pipeline::TrainReport& report) {
  for (const auto& s : report.stages) {
    logger()->info("{}: {} samples, {} classes, C = {}", s.name, s.samples, s.classes.size(), s.chosen_C);
  }
  for (const auto& w : report.warnings) logger()->warn("{}", w);
}

void log_evaluation(std::string_view name, const Evaluation& ev) {
  logger()->info("{}: image accuracy {}, region accuracy {} ({}/{} regions)", name,
                 eval::format_percent(ev.metrics.accuracy), eval::format_percent(ev.region_accuracy.accuracy),
                 ev.region_accuracy.correct, ev.region_accuracy.evaluated);
}

ordered_json augment_summary_json(const corpus::AugmentResult& aug) {
  ordered_json j;
  for (std::size_t c = 0; c < kNumLandUseClasses; ++c) {
    const auto& s = aug.summary[c];
    j[std::string(to_string(kAllLandUseClasses[c]))] = {{"base", s.base},   {"candidates", s.candidates},
                                                        {"added", s.added}, {"final", s.final_count},
                                                        {"shortfall", s.shortfall}};
  }
  return j;
}

void log_augment(const corpus::AugmentResult& aug) {
  for (std::size_t c = 0; c < kNumLandUseClasses; ++c) {
    const auto& s = aug.summary[c];
    if (s.shortfall > 0)
      logger()->warn("augment: class '{}' ends at {} images, {} short of target", to_string(kAllLandUseClasses[c]),
                     s.final_count, s.shortfall);
  }
}

// ---------------------------------------------------------------------------

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool dry_run = false;

  // stage inputs / outputs
  std::string regions, photos, labeled, aux_out, train, test, aux, keywords, features, inout, model, manifest,
      predictions, out, train_out, test_out, summary_out, metrics_out, regions_out, region_report, title;
  std::optional<double> fraction;
  std::optional<std::size_t> target;
  std::optional<double> tol;
  std::optional<std::uint32_t> folds;
  std::vector<double> c_grid;
  bool truth = false;
};

Config effective_config(const Flags& f) {
  Config c = f.config_path.empty() ? Config{} : load_config(f.config_path);
  if (f.seed) c.seed = *f.seed;
  if (f.threads) c.threads = std::max(1u, *f.threads);
  if (f.fraction) c.fraction = *f.fraction;
  if (f.target) c.target = *f.target;
  if (f.tol) c.tol = *f.tol;
  if (f.folds) c.folds = *f.folds;
  if (!f.c_grid.empty()) c.C_grid = f.c_grid;
  if (!f.title.empty()) c.style.title = f.title;
  if (!f.regions.empty()) c.regions = f.regions;
  if (!f.photos.empty()) c.photos = f.photos;
  if (!f.inout.empty()) c.inout = f.inout;
  if (!f.keywords.empty()) c.keywords = f.keywords;
  if (!f.features.empty()) c.features = f.features;
  return c;
}

int cmd_filter(const Flags& f, const Config& c) {
  require_input(c.regions, "regions");
  require_input(c.photos, "photos");
  require_output(f.out, "--out");
  const auto rs = geo::load_regions(c.regions);
  const auto photos = corpus::load_manifest(c.photos);
  const auto res = corpus::label_by_location(photos, rs, c.threads);
  logger()->info("filter: {} photos, {} labeled, {} outside all regions, {} auxiliary", photos.size(),
                 res.labeled.size(), res.dropped, res.auxiliary.size());
  if (f.dry_run) return kExitOk;
  prepare_parent(f.out);
  corpus::write_manifest(f.out, res.labeled);
  if (!f.aux_out.empty()) {
    prepare_parent(f.aux_out);
    corpus::write_manifest(f.aux_out, res.auxiliary);
  }
  return kExitOk;
}

int cmd_split(const Flags& f, const Config& c) {
  require_input(f.labeled, "labeled manifest");
  require_output(f.train_out, "--train-out");
  require_output(f.test_out, "--test-out");
  const auto labeled = corpus::load_manifest(f.labeled);
  const auto s = corpus::split(labeled, c.fraction, c.seed);
  logger()->info("split: {} train, {} test", s.train_ids.size(), s.test_ids.size());
  if (f.dry_run) return kExitOk;
  prepare_parent(f.train_out);
  prepare_parent(f.test_out);
  corpus::write_manifest(f.train_out, corpus::select(labeled, s.train_ids));
  corpus::write_manifest(f.test_out, corpus::select(labeled, s.test_ids));
  return kExitOk;
}

int cmd_augment(const Flags& f, const Config& c) {
  require_input(f.train, "base train manifest");
  require_input(f.aux, "auxiliary pool");
  require_output(f.out, "--out");
  if (!f.test.empty()) require_input(f.test, "test manifest");
  const auto base = corpus::load_manifest(f.train);
  const auto aux = corpus::load_manifest(f.aux);
  std::vector<std::string> test_ids;
  if (!f.test.empty()) {
    for (const auto& r : corpus::load_manifest(f.test)) test_ids.push_back(r.photo_id);
    std::sort(test_ids.begin(), test_ids.end());
  }
  corpus::KeywordMap kmap;
  if (!c.keywords.empty()) {
    require_input(c.keywords, "keyword map");
    kmap = corpus::load_keyword_map(c.keywords);
  }
  const auto aug = corpus::augment(base, test_ids, aux, kmap, c.target, c.seed);
  log_augment(aug);
  logger()->info("augment: {} training images", aug.train.size());
  if (f.dry_run) return kExitOk;
  prepare_parent(f.out);
  corpus::write_manifest(f.out, aug.train);
  if (!f.summary_out.empty()) {
    prepare_parent(f.summary_out);
    write_text_file(f.summary_out, augment_summary_json(aug).dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_train(const Flags& f, const Config& c, bool hierarchical) {
  require_input(f.train, "train manifest");
  require_input(c.features, "feature store");
  if (hierarchical) require_input(c.inout, "indoor/outdoor manifest");
  require_output(f.out, "--out");
  const auto train = corpus::load_manifest(f.train);
  const auto store = features::read_store(c.features);
  if (f.dry_run) {
    for (const auto& r : train) store.at(r.photo_id);
    if (hierarchical) {
      for (const auto& r : corpus::load_manifest(c.inout)) store.at(r.photo_id);
    }
    return kExitOk;
  }
  pipeline::TrainReport report;
  pipeline::AnyModel model;
  if (hierarchical) {
    const auto inout = corpus::load_manifest(c.inout);
    model = pipeline::train_hier(train, inout, store, c.train_config(), &report);
  } else {
    model = pipeline::train_flat(train, store, c.train_config(), &report);
  }
  log_report(report);
  prepare_parent(f.out);
  pipeline::save_model(model, f.out);
  return kExitOk;
}

int cmd_predict(const Flags& f, const Config& c) {
  require_input(f.model, "model");
  require_input(c.features, "feature store");
  require_input(f.manifest, "manifest");
  require_output(f.out, "--out");
  const auto model = pipeline::load_model(f.model);
  const auto store = features::read_store(c.features);
  std::vector<std::string> ids;
  for (const auto& r : corpus::load_manifest(f.manifest)) ids.push_back(r.photo_id);
  if (f.dry_run) {
    for (const auto& id : ids) store.at(id);
    return kExitOk;
  }
  const auto preds = pipeline::predict(model, store, ids, c.threads);
  prepare_parent(f.out);
  write_text_file(f.out, pipeline::format_predictions_csv(preds));
  return kExitOk;
}

int cmd_evaluate(const Flags& f, const Config& c) {
  require_input(f.predictions, "predictions");
  require_input(f.test, "test manifest");
  require_input(c.regions, "regions");
  const auto preds = pipeline::parse_predictions_csv(read_text_file(f.predictions));
  const auto test = corpus::load_manifest(f.test);
  const auto rs = geo::load_regions(c.regions);
  const auto ev = evaluate(preds, test, rs);
  log_evaluation("evaluate", ev);
  if (f.dry_run) return kExitOk;
  if (!f.metrics_out.empty()) {
    prepare_parent(f.metrics_out);
    write_text_file(f.metrics_out, eval::format_metrics_csv(ev.metrics));
  }
  if (!f.regions_out.empty()) {
    prepare_parent(f.regions_out);
    write_text_file(f.regions_out, eval::format_region_report(ev.regions, ev.region_truth));
  }
  return kExitOk;
}

int cmd_map(const Flags& f, const Config& c) {
  require_input(c.regions, "regions");
  require_output(f.out, "--out");
  const auto rs = geo::load_regions(c.regions);
  mapgen::RegionLabels labels;
  if (f.truth) {
    labels = mapgen::ground_truth_labels(rs);
  } else {
    require_input(f.region_report, "region report");
    for (const auto& row : eval::parse_region_report(read_text_file(f.region_report))) labels[row.region_id] = row.predicted;
  }
  const auto svg = mapgen::render_map(rs, labels, c.style);
  if (f.dry_run) return kExitOk;
  prepare_parent(f.out);
  write_text_file(f.out, svg);
  return kExitOk;
}

int cmd_pipeline(const Flags& f, const Config& c) {
  if (f.config_path.empty()) throw Error(ErrorCode::InvalidArgument, "pipeline needs --config");
  require_input(c.regions, "regions");
  require_input(c.photos, "photos");
  require_input(c.inout, "indoor/outdoor manifest");
  require_input(c.features, "feature store");
  if (!c.keywords.empty()) require_input(c.keywords, "keyword map");
  require_output(c.output_dir, "paths.output_dir");

  const auto rs = geo::load_regions(c.regions);
  const auto photos = corpus::load_manifest(c.photos);
  const auto inout = corpus::load_manifest(c.inout);
  const auto store = features::read_store(c.features);
  const auto kmap = c.keywords.empty() ? corpus::KeywordMap{} : corpus::load_keyword_map(c.keywords);

  const auto labeled = corpus::label_by_location(photos, rs, c.threads);
  logger()->info("filter: {} photos, {} labeled, {} outside all regions, {} auxiliary", photos.size(),
                 labeled.labeled.size(), labeled.dropped, labeled.auxiliary.size());
  const auto s = corpus::split(labeled.labeled, c.fraction, c.seed);
  const auto base = corpus::select(labeled.labeled, s.train_ids);
  const auto test = corpus::select(labeled.labeled, s.test_ids);
  logger()->info("split: {} base train, {} test", base.size(), test.size());
  const auto aug = corpus::augment(base, s.test_ids, labeled.auxiliary, kmap, c.target, c.seed);
  log_augment(aug);
  logger()->info("augment: {} training images", aug.train.size());

  if (f.dry_run) {
    for (const auto& r : aug.train) store.at(r.photo_id);
    for (const auto& r : test) store.at(r.photo_id);
    for (const auto& r : inout) store.at(r.photo_id);
    return kExitOk;
  }

  const fs::path out(c.output_dir);
  fs::create_directories(out);
  auto path = [&](const char* name) { return (out / name).string(); };
  corpus::write_manifest(path("labeled.jsonl"), labeled.labeled);
  corpus::write_manifest(path("aux_pool.jsonl"), labeled.auxiliary);
  corpus::write_manifest(path("train_base.jsonl"), base);
  corpus::write_manifest(path("test.jsonl"), test);
  corpus::write_manifest(path("train.jsonl"), aug.train);
  write_text_file(path("augment_summary.json"), augment_summary_json(aug).dump(2) + "\n");

  const auto cfg = c.train_config();
  pipeline::TrainReport flat_report, hier_report;
  const auto flat = pipeline::train_flat(aug.train, store, cfg, &flat_report);
  log_report(flat_report);
  const auto hier = pipeline::train_hier(aug.train, inout, store, cfg, &hier_report);
  log_report(hier_report);
  pipeline::save_model(flat, path("flat.model"));
  pipeline::save_model(hier, path("hier.model"));

  std::vector<std::string> test_ids;
  for (const auto& r : test) test_ids.push_back(r.photo_id);
  const auto flat_preds = pipeline::predict_flat(flat, store, test_ids, c.threads);
  const auto hier_preds = pipeline::predict_hier(hier, store, test_ids, c.threads);
  write_text_file(path("predictions_flat.csv"), pipeline::format_predictions_csv(flat_preds));
  write_text_file(path("predictions_hier.csv"), pipeline::format_predictions_csv(hier_preds));

  const auto flat_ev = evaluate(flat_preds, test, rs);
  const auto hier_ev = evaluate(hier_preds, test, rs);
  log_evaluation("flat", flat_ev);
  log_evaluation("hierarchical", hier_ev);
  write_text_file(path("metrics_flat.csv"), eval::format_metrics_csv(flat_ev.metrics));
  write_text_file(path("metrics_hier.csv"), eval::format_metrics_csv(hier_ev.metrics));
  write_text_file(path("regions_flat.csv"), eval::format_region_report(flat_ev.regions, flat_ev.region_truth));
  write_text_file(path("regions_hier.csv"), eval::format_region_report(hier_ev.regions, hier_ev.region_truth));

  ordered_json summary;
  summary["train_images"] = aug.train.size();
  summary["test_images"] = test.size();
  summary["flat"] = evaluation_json(flat_ev);
  summary["hierarchical"] = evaluation_json(hier_ev);
  write_text_file(path("summary.json"), summary.dump(2) + "\n");

  auto style = c.style;
  const auto base_title = style.title;
  style.title = base_title + " (ground truth)";
  mapgen::write_map(rs, mapgen::ground_truth_labels(rs), style, path("map_truth.svg"));
  style.title = base_title + " (flat)";
  mapgen::write_map(rs, labels_from(flat_ev.regions), style, path("map_flat.svg"));
  style.title = base_title + " (indoor/outdoor)";
  mapgen::write_map(rs, labels_from(hier_ev.regions), style, path("map_hier.svg"));
  return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv) {
  CLI::App app{"Land-use classification and mapping from geotagged photos", "landuse"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config_path, "JSON config file; flags override its values");
  app.add_option("--seed", f.seed, "Seed for every randomized step (default 42)");
  app.add_option("--threads", f.threads, "Cap on worker threads");
  app.add_flag("--dry-run", f.dry_run, "Validate inputs without writing outputs");

  auto* filter = app.add_subcommand("filter", "Label geolocated photos by the region containing them");
  filter->add_option("--regions", f.regions, "Region GeoJSON");
  filter->add_option("--photos", f.photos, "Photo manifest (JSONL)");
  filter->add_option("--out", f.out, "Labeled manifest to write");
  filter->add_option("--aux-out", f.aux_out, "Where to write the auxiliary pool");

  auto* split = app.add_subcommand("split", "Per-class base train / test split");
  split->add_option("--labeled", f.labeled, "Labeled manifest")->required();
  split->add_option("--fraction", f.fraction, "Train share per class (default 0.2)");
  split->add_option("--train-out", f.train_out)->required();
  split->add_option("--test-out", f.test_out)->required();

  auto* augment = app.add_subcommand("augment", "Top up the base training set from an auxiliary pool");
  augment->add_option("--train", f.train, "Base train manifest")->required();
  augment->add_option("--test", f.test, "Test manifest (its ids are never drawn)");
  augment->add_option("--aux", f.aux, "Auxiliary pool manifest")->required();
  augment->add_option("--keywords", f.keywords, "Keyword map JSON");
  augment->add_option("--target", f.target, "Images per class (default 3000)");
  augment->add_option("--out", f.out)->required();
  augment->add_option("--summary-out", f.summary_out, "Per-class augmentation summary (JSON)");

  auto* train_flat = app.add_subcommand("train-flat", "Train the flat eight-way classifier");
  auto* train_hier = app.add_subcommand("train-hier", "Train the indoor/outdoor-routed classifier");
  for (auto* sub : {train_flat, train_hier}) {
    sub->add_option("--train", f.train, "Training manifest")->required();
    sub->add_option("--features", f.features, "Feature store (FVEC)");
    sub->add_option("--c-grid", f.c_grid, "Candidate C values");
    sub->add_option("--tol", f.tol, "Solver tolerance");
    sub->add_option("--folds", f.folds, "Cross-validation folds");
    sub->add_option("--out", f.out, "Model file to write")->required();
  }
  train_hier->add_option("--inout", f.inout, "Indoor/outdoor manifest for the router");

  auto* predict = app.add_subcommand("predict", "Classify the photos of a manifest");
  predict->add_option("--model", f.model)->required();
  predict->add_option("--features", f.features);
  predict->add_option("--manifest", f.manifest, "Photos to classify")->required();
  predict->add_option("--out", f.out, "predictions.csv to write")->required();

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Image- and region-level metrics");
  evaluate_cmd->add_option("--predictions", f.predictions)->required();
  evaluate_cmd->add_option("--test", f.test, "Test manifest with true_class and region_id")->required();
  evaluate_cmd->add_option("--regions", f.regions);
  evaluate_cmd->add_option("--metrics-out", f.metrics_out);
  evaluate_cmd->add_option("--regions-out", f.regions_out);

  auto* map = app.add_subcommand("map", "Render a land-use map as SVG");
  map->add_option("--regions", f.regions);
  map->add_option("--region-report", f.region_report, "Region report CSV from evaluate");
  map->add_flag("--truth", f.truth, "Color regions by their ground-truth class");
  map->add_option("--title", f.title);
  map->add_option("--out", f.out)->required();

  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run the full chain from a config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    const Config c = effective_config(f);
    if (filter->parsed()) return cmd_filter(f, c);
    if (split->parsed()) return cmd_split(f, c);
    if (augment->parsed()) return cmd_augment(f, c);
    if (train_flat->parsed()) return cmd_train(f, c, false);
    if (train_hier->parsed()) return cmd_train(f, c, true);
    if (predict->parsed()) return cmd_predict(f, c);
    if (evaluate_cmd->parsed()) return cmd_evaluate(f, c);
    if (map->parsed()) return cmd_map(f, c);
    if (pipeline_cmd->parsed()) return cmd_pipeline(f, c);
  } catch (const Error& e) {
    logger()->error("{}", e.what());
    return is_input_error(e.code()) ? kExitInvalidInput : kExitRuntime;
  } catch (const std::exception& e) {
    logger()->error("{}", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("landuse");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace landuse::cli
