// Acceptance runner: one PASS/FAIL line per criterion.
//
//   landuse_acceptance            run every criterion
//   landuse_acceptance NAME...    run the named criteria
//
// Exit status is 0 only when every selected criterion passes.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "cli.hpp"
#include "landuse/eval.hpp"
#include "landuse/features.hpp"
#include "landuse/learn.hpp"
#include "landuse/pipeline.hpp"
#include "support.hpp"
#include "synth.hpp"

using namespace landuse;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  const char* name;
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

// ---------------------------------------------------------------------------

Outcome published_f1_arithmetic() {
  struct Block {
    const char* name;
    std::array<double, 8> p, r, f1;
  };
  const std::array<Block, 2> blocks{{
      {"without indoor/outdoor",
       {0.5289, 0.6282, 0.3145, 0.8168, 0.9676, 0.9653, 0.6638, 0.7823},
       {0.7952, 0.3596, 0.4762, 0.7165, 0.8627, 0.9772, 0.6814, 0.8128},
       {0.6352, 0.4574, 0.3788, 0.7633, 0.9121, 0.9712, 0.6725, 0.7973}},
      {"with indoor/outdoor",
       {0.5581, 0.6315, 0.4465, 0.8352, 0.9726, 0.9666, 0.7155, 0.7972},
       {0.8092, 0.3771, 0.5868, 0.7342, 0.8767, 0.9810, 0.7155, 0.8277},
       {0.6606, 0.4721, 0.5071, 0.7815, 0.9222, 0.9737, 0.7155, 0.8121}},
  }};
  Outcome o{true, {}};
  std::size_t off = 0;
  for (const auto& b : blocks) {
    for (std::size_t c = 0; c < 8; ++c) {
      const double f = eval::f1_score(b.p[c], b.r[c]);
      if (std::abs(f - b.f1[c]) > 5e-5) {
        o.pass = false;
        ++off;
        o.detail += fmt::format("{} {}: F1({}, {}) = {:.6f} vs {:.4f}; ", b.name, to_string(kAllLandUseClasses[c]),
                                b.p[c], b.r[c], f, b.f1[c]);
      }
    }
  }
  double sum = 0.0;
  for (double p : blocks[0].p) sum += p;
  const double macro = sum / 8.0;
  const bool macro_ok = std::abs(macro - 0.7084) <= 5e-5;
  o.pass = o.pass && macro_ok;
  o.detail = fmt::format("{}/16 F1 values off by more than 5e-5; precision macro-average {:.6f} ({}). {}", off, macro,
                         macro_ok ? "ok" : "off", o.detail);
  return o;
}

Outcome region_arithmetic() {
  auto run = [](std::size_t evaluated, std::size_t correct) {
    std::vector<eval::RegionPrediction> preds;
    std::map<std::string, LandUseClass> truth;
    for (std::size_t i = 0; i < evaluated; ++i) {
      eval::RegionPrediction p;
      p.region_id = fmt::format("r{:03}", i);
      p.label = LandUseClass::park;
      p.n_images = 1;
      preds.push_back(p);
      truth[p.region_id] = i < correct ? LandUseClass::park : LandUseClass::water;
    }
    // 28 empty regions stay out of the denominator.
    for (std::size_t i = 0; i < 28; ++i) {
      eval::RegionPrediction p;
      p.region_id = fmt::format("e{:03}", i);
      preds.push_back(p);
      truth[p.region_id] = LandUseClass::gym;
    }
    return eval::region_accuracy(preds, truth);
  };
  const auto a = run(150, 98);
  const auto b = run(150, 114);
  const auto sa = eval::format_percent(a.accuracy);
  const auto sb = eval::format_percent(b.accuracy);
  const bool ok = a.evaluated == 150 && b.evaluated == 150 && sa == "65.33%" && sb == "76.00%" &&
                  std::abs(a.accuracy * 100 - 65.33) <= 0.01 && b.accuracy == 0.76;
  return {ok, fmt::format("98/150 -> {}, 114/150 -> {}", sa, sb)};
}

Outcome geometry_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.3, 1.3);
  std::size_t disagreements = 0, inside = 0;
  for (int k = 0; k < 20; ++k) {
    const auto region = geo::make_region("p", LandUseClass::park, {testing::random_star_polygon(rng, 50, 0, 0, 0.2, 1.2)});
    for (int i = 0; i < 10000; ++i) {
      const double x = u(rng), y = u(rng);
      const bool got = geo::point_in_polygon(region, x, y);
      disagreements += got != testing::brute_point_in_polygon(region, x, y);
      inside += got;
    }
  }
  return {disagreements == 0,
          fmt::format("{} disagreements over 200000 point tests ({} inside)", disagreements, inside)};
}

Outcome solver_oracle() {
  std::mt19937_64 rng(77);
  double worst = 0.0, worst_default = 0.0;
  bool feasible = true;
  for (int k = 0; k < 25; ++k) {
    const auto p = testing::random_2d_problem(rng, 4 + static_cast<std::size_t>(k % 17), k % 3 != 0);
    const auto x = testing::to_sparse(p.x);
    std::vector<std::int8_t> y(p.y.begin(), p.y.end());
    const learn::BinaryProblem bp{&x, y, p.C};
    learn::SolverOptions opt;
    opt.tol = 1e-8;
    opt.max_iter = 100000;
    opt.seed = static_cast<std::uint64_t>(k);
    const auto r = learn::train_binary(bp, opt, [&](const learn::EpochState& s) {
      for (double a : s.alpha) feasible = feasible && a >= 0.0;
    });
    const double want = testing::oracle_primal(p, testing::oracle_weights(p, testing::oracle_dual_solve(p)));
    const double got = learn::primal_objective(bp, r.w);
    worst = std::max(worst, std::abs(got - want) / std::abs(want));
    const auto loose = learn::train_binary(bp, {});
    worst_default = std::max(worst_default, std::abs(learn::primal_objective(bp, loose.w) - want) / std::abs(want));
  }
  return {worst <= 1e-4 && feasible,
          fmt::format("worst relative primal gap {:.2e} at tol 1e-8 (at the default tol 0.1: {:.2e}); alpha >= 0 at "
                      "every epoch: {}",
                      worst, worst_default, feasible ? "yes" : "no")};
}

Outcome cv_contract() {
  std::mt19937_64 rng(5);
  std::size_t datasets = 0;
  for (int t = 0; t < 4; ++t) {
    std::vector<std::string> names{"gym", "park", "study", "water"};
    testing::Blobs b;
    std::normal_distribution<double> nd(0.0, 1.0);
    const std::array<std::size_t, 4> sizes{static_cast<std::size_t>(12 + 7 * t), 9, static_cast<std::size_t>(5 + t), 17};
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t i = 0; i < sizes[c]; ++i) {
        b.x.push_back({static_cast<float>(nd(rng) + 1.2 * static_cast<double>(c)),
                       static_cast<float>(nd(rng) - 0.8 * static_cast<double>(c % 2)), static_cast<float>(nd(rng))});
        b.labels.push_back(names[c]);
      }
    }
    const auto x = testing::to_sparse(b.x);
    const std::vector<double> grid{0.01, 0.1, 1.0, 10.0, 100.0};
    learn::CvOptions opt;
    opt.seed = static_cast<std::uint64_t>(t);
    opt.threads = 2;
    const auto r = learn::cross_validate(x, b.labels, grid, opt);

    // Partition and balance.
    std::map<std::string, std::vector<std::size_t>> per_class;
    for (std::size_t i = 0; i < r.fold_of.size(); ++i) {
      if (r.fold_of[i] >= opt.folds) return {false, "fold index out of range"};
      auto& v = per_class[b.labels[i]];
      v.resize(opt.folds);
      ++v[r.fold_of[i]];
    }
    if (r.fold_of.size() != b.labels.size()) return {false, "fold_of does not cover every sample"};
    for (const auto& [cls, counts] : per_class) {
      if (*std::max_element(counts.begin(), counts.end()) - *std::min_element(counts.begin(), counts.end()) > 1)
        return {false, fmt::format("class {} fold sizes differ by more than one", cls)};
    }

    // Exhaustive recomputation.
    std::vector<double> means;
    for (double C : grid) {
      double sum = 0.0;
      for (std::uint32_t f = 0; f < opt.folds; ++f) {
        std::vector<std::size_t> tr, te;
        for (std::size_t i = 0; i < b.labels.size(); ++i) (r.fold_of[i] == f ? te : tr).push_back(i);
        std::vector<std::string> tl;
        for (auto i : tr) tl.push_back(b.labels[i]);
        const auto m = learn::train_ovr(x.select_rows(tr), tl, features::Scaler::identity(3), {C, opt.solver, 1});
        const auto held = x.select_rows(te);
        std::size_t ok = 0;
        for (std::size_t k = 0; k < te.size(); ++k)
          ok += m.classes[learn::predict_scaled(m, held, k).class_index] == b.labels[te[k]];
        sum += static_cast<double>(ok) / static_cast<double>(te.size());
      }
      means.push_back(sum / static_cast<double>(opt.folds));
    }
    const double best = *std::max_element(means.begin(), means.end());
    double want = INFINITY;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (std::abs(means[g] - r.mean_accuracy[g]) > 1e-12)
        return {false, fmt::format("mean accuracy for C={} is {} but recomputes to {}", grid[g], r.mean_accuracy[g], means[g])};
      if (means[g] == best) want = std::min(want, grid[g]);
    }
    if (r.chosen_C != want) return {false, fmt::format("chose C={} but the best smallest C is {}", r.chosen_C, want)};
    ++datasets;
  }
  return {true, fmt::format("{} datasets: folds partition and balance, chosen C verified", datasets)};
}

nlohmann::json run_campus(const testing::TempDir& dir, bool branch_dependent) {
  synth::CampusSpec spec;
  spec.branch_dependent = branch_dependent;
  synth::write_campus(synth::make_campus(spec), dir.path().string());
  const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (cli::run({"--config", dir.file("config.json"), "--threads", std::to_string(threads), "pipeline"}) != 0)
    throw std::runtime_error("pipeline failed");
  return nlohmann::json::parse(testing::slurp(dir.file("out/summary.json")));
}

Outcome end_to_end() {
  testing::TempDir plain("e2e"), branch("e2e_branch");
  const auto a = run_campus(plain, false);
  const auto b = run_campus(branch, true);
  const double flat_img = a["flat"]["image_accuracy"];
  const double flat_reg = a["flat"]["region_accuracy"];
  const double bf = b["flat"]["image_accuracy"];
  const double bh = b["hierarchical"]["image_accuracy"];
  const bool ok = flat_img >= 0.95 && flat_reg >= 0.90 && bh - bf >= 0.05;
  return {ok, fmt::format("flat image {:.2f}%, flat region {:.2f}%; branch-dependent: flat {:.2f}% vs hierarchical "
                          "{:.2f}% (+{:.2f} pp)",
                          100 * flat_img, 100 * flat_reg, 100 * bf, 100 * bh, 100 * (bh - bf))};
}

Outcome performance() {
  constexpr std::size_t n = 20000, dim = 4096, classes = 8;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<std::string> names;
  for (auto c : kAllLandUseClasses) names.emplace_back(to_string(c));
  // Sparse non-negative activations: ~25% non-zero, plus a class-specific block.
  learn::SparseMatrix x(dim);
  std::vector<std::string> labels;
  std::vector<float> row(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % classes;
    for (std::size_t d = 0; d < dim; ++d) row[d] = u(rng) < 0.25f ? u(rng) : 0.0f;
    for (std::size_t d = c * 64; d < c * 64 + 64; ++d) row[d] = std::min(1.0f, row[d] + 0.5f * u(rng));
    x.add_row(row);
    labels.push_back(names[c]);
  }
  learn::OvrOptions opt;
  opt.C = 1.0;
  opt.solver.tol = 0.1;
  opt.threads = std::max(1u, std::thread::hardware_concurrency());
  const auto t0 = std::chrono::steady_clock::now();
  learn::OvrReport report;
  const auto m = learn::train_ovr(x, labels, features::Scaler::identity(dim), opt, &report);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; i += 10) correct += m.classes[learn::predict_scaled(m, x, i).class_index] == labels[i];
  return {secs <= 10.0 && report.unconverged.empty(),
          fmt::format("train_ovr {}x{} ({} non-zeros), {} threads: {:.2f} s; training accuracy on a 10% sample {:.1f}%; "
                      "{} unconverged",
                      n, dim, x.nnz(), opt.threads, secs, 100.0 * static_cast<double>(correct) / (n / 10.0),
                      report.unconverged.size())};
}

Outcome determinism() {
  testing::TempDir dir("determinism");
  synth::CampusSpec spec;
  spec.branch_dependent = true;
  synth::write_campus(synth::make_campus(spec), dir.path().string());
  const auto cfg = dir.file("config.json");
  const auto out = dir.path() / "out";
  std::vector<fs::path> runs;
  for (const auto& [tag, threads] : std::vector<std::pair<std::string, std::string>>{{"a", "1"}, {"b", "1"}, {"c", "8"}}) {
    if (cli::run({"--config", cfg, "--threads", threads, "pipeline"}) != 0) return {false, "pipeline failed"};
    runs.push_back(dir.path() / ("run_" + tag));
    fs::rename(out, runs.back());
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(runs[0])) {
    const auto name = e.path().filename();
    const auto ref = testing::slurp(e.path().string());
    for (std::size_t k = 1; k < runs.size(); ++k) {
      if (!fs::exists(runs[k] / name) || testing::slurp((runs[k] / name).string()) != ref)
        return {false, fmt::format("{} differs in run {}", name.string(), k + 1)};
    }
    ++files;
  }
  return {files == 18, fmt::format("{} output files byte-identical over two --threads 1 runs and one --threads 8 run", files)};
}

learn::LinearModel random_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> dim_d(1, 80);
  std::uniform_int_distribution<std::size_t> k_d(1, 8);
  std::normal_distribution<double> nd(0.0, 10.0);
  learn::LinearModel m;
  m.dim = dim_d(rng);
  std::vector<std::string> names;
  for (auto c : kAllLandUseClasses) names.emplace_back(to_string(c));
  std::shuffle(names.begin(), names.end(), rng);
  names.resize(k_d(rng));
  std::sort(names.begin(), names.end());
  m.classes = names;
  m.weights.resize(m.n_weight_vectors() * (m.dim + 1));
  for (auto& w : m.weights) w = nd(rng);
  m.scaler.offset.resize(m.dim);
  m.scaler.factor.resize(m.dim);
  for (auto& v : m.scaler.offset) v = nd(rng);
  for (auto& v : m.scaler.factor) v = std::abs(nd(rng));
  m.C = std::exp(nd(rng) / 5);
  m.seed = rng();
  m.tol = std::abs(nd(rng)) / 100;
  m.iterations.resize(m.n_weight_vectors());
  for (auto& it : m.iterations) it = static_cast<std::uint32_t>(rng() % 1000);
  return m;
}

Outcome format_round_trips() {
  testing::TempDir dir("formats");
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<std::uint32_t> dim_d(1, 300);
  std::uniform_int_distribution<std::size_t> count_d(0, 60), idlen(1, 40);
  std::normal_distribution<float> nd(0.0f, 100.0f);
  for (int i = 0; i < 100; ++i) {
    features::FeatureStore s(dim_d(rng));
    const std::size_t n = count_d(rng);
    std::set<std::string> used;
    std::vector<float> v(s.dim());
    while (s.size() < n) {
      std::string id;
      const auto len = idlen(rng);
      for (std::size_t c = 0; c < len; ++c) id += static_cast<char>('!' + rng() % 94);
      if (!used.insert(id).second) continue;
      for (auto& x : v) x = rng() % 5 == 0 ? 0.0f : nd(rng);
      s.add(id, v);
    }
    const auto p1 = dir.file("a.fvec"), p2 = dir.file("b.fvec");
    features::write_store(s, p1);
    features::write_store(features::read_store(p1), p2);
    if (testing::slurp(p1) != testing::slurp(p2) || !(features::read_store(p2) == s))
      return {false, fmt::format("FVEC instance {} did not round-trip", i)};
  }
  for (int i = 0; i < 100; ++i) {
    pipeline::AnyModel m;
    if (i % 2 == 0) {
      m = pipeline::FlatModel{random_model(rng)};
    } else {
      auto r = random_model(rng);
      r.classes = {"indoor", "outdoor"};
      r.weights.resize(r.dim + 1);
      r.iterations.resize(1);
      m = pipeline::HierModel{r, random_model(rng), random_model(rng)};
    }
    const auto p1 = dir.file("a.model"), p2 = dir.file("b.model");
    pipeline::save_model(m, p1);
    const auto back = pipeline::load_model(p1);
    pipeline::save_model(back, p2);
    if (testing::slurp(p1) != testing::slurp(p2) || !(back == m))
      return {false, fmt::format("model instance {} did not round-trip", i)};
  }
  return {true, "100 FVEC stores and 100 model files (flat and hierarchical) byte-identical after write-read-write"};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"published_f1", "Published F1 arithmetic", 1.0, published_f1_arithmetic},
      {"regions", "Region accuracy arithmetic", 1.0, region_arithmetic},
      {"geometry", "Geometry oracle", 5.0, geometry_oracle},
      {"solver", "Solver oracle", 30.0, solver_oracle},
      {"cv", "Cross-validation contract", 10.0, cv_contract},
      {"e2e", "End-to-end synthetic campus", 60.0, end_to_end},
      {"performance", "Performance", 10.0, performance},
      {"determinism", "Determinism", 0.0, determinism},
      {"formats", "Format round-trips", 0.0, format_round_trips},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> wanted(argv + 1, argv + argc);
  for (const auto& w : wanted) {
    if (std::none_of(criteria().begin(), criteria().end(), [&](const Criterion& c) { return w == c.name; })) {
      std::cerr << "unknown criterion '" << w << "'; known:";
      for (const auto& c : criteria()) std::cerr << ' ' << c.name;
      std::cerr << '\n';
      return 2;
    }
  }
  bool all_pass = true;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && !wanted.contains(c.name)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt::format(" [over the {:.0f} s budget]", c.budget_s);
    }
    all_pass = all_pass && o.pass;
    std::cout << fmt::format("{} {:<30} ({:.2f} s) {}\n", o.pass ? "PASS" : "FAIL", c.title, secs, o.detail)
              << std::flush;
  }
  return all_pass ? 0 : 1;
}
