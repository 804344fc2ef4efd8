#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "landuse/common.hpp"
#include "landuse/learn.hpp"
#include "landuse/parallel.hpp"
#include "landuse/random.hpp"

namespace landuse::learn {

LinearModel train_ovr(const SparseMatrix& x, std::span<const std::string> labels, const features::Scaler& scaler,
                      const OvrOptions& opt, OvrReport* report) {
  if (labels.size() != x.rows())
    throw Error(ErrorCode::InvalidArgument, fmt::format("{} labels for {} rows", labels.size(), x.rows()));
  if (scaler.dim() != x.dim())
    throw Error(ErrorCode::DimensionMismatch, fmt::format("scaler dim {} for matrix dim {}", scaler.dim(), x.dim()));

  LinearModel m;
  m.classes.assign(labels.begin(), labels.end());
  std::sort(m.classes.begin(), m.classes.end());
  m.classes.erase(std::unique(m.classes.begin(), m.classes.end()), m.classes.end());
  if (m.classes.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "one-vs-rest training needs at least two distinct classes");
  m.dim = x.dim();
  m.scaler = scaler;
  m.C = opt.C;
  m.seed = opt.solver.seed;
  m.tol = opt.solver.tol;

  std::vector<std::size_t> label_index(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    label_index[i] = static_cast<std::size_t>(
        std::lower_bound(m.classes.begin(), m.classes.end(), labels[i]) - m.classes.begin());
  }

  const std::size_t k = m.n_weight_vectors();
  m.weights.assign(k * (m.dim + 1), 0.0);
  m.iterations.assign(k, 0);
  std::vector<char> converged(k, 1);

  parallel_for(k, opt.threads, [&](std::size_t c) {
    std::vector<std::int8_t> y(labels.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = label_index[i] == c ? 1 : -1;
    SolverOptions so = opt.solver;
    so.seed = derive_seed(opt.solver.seed, c);
    auto res = train_binary(BinaryProblem{&x, y, opt.C, 1.0}, so);
    std::copy(res.w.begin(), res.w.end(), m.weights.begin() + static_cast<std::ptrdiff_t>(c * (m.dim + 1)));
    m.iterations[c] = res.iterations;
    converged[c] = res.converged ? 1 : 0;
  });

  if (report) {
    for (std::size_t c = 0; c < k; ++c) {
      if (!converged[c]) report->unconverged.push_back(m.classes[c]);
    }
  }
  return m;
}

LinearModel constant_model(std::string cls, std::uint32_t dim, features::Scaler scaler) {
  LinearModel m;
  m.classes = {std::move(cls)};
  m.dim = dim;
  m.weights.assign(dim + 1, 0.0);
  m.scaler = std::move(scaler);
  m.iterations = {0};
  return m;
}

namespace {

Prediction finish(const LinearModel& m, std::vector<double> raw_scores) {
  Prediction p;
  if (m.classes.size() == 2) {
    p.decision = {raw_scores[0], -raw_scores[0]};
  } else {
    p.decision = std::move(raw_scores);
  }
  for (std::size_t c = 1; c < p.decision.size(); ++c) {
    if (p.decision[c] > p.decision[p.class_index]) p.class_index = c;
  }
  return p;
}

}  // namespace

Prediction predict(const LinearModel& m, std::span<const float> raw) {
  if (raw.size() != m.dim)
    throw Error(ErrorCode::DimensionMismatch, fmt::format("vector of length {} for model dim {}", raw.size(), m.dim));
  const auto scaled = m.scaler.transform(raw);
  std::vector<double> scores(m.n_weight_vectors());
  for (std::size_t c = 0; c < scores.size(); ++c) {
    const auto w = m.weight_vector(c);
    double s = w[m.dim];
    for (std::size_t j = 0; j < m.dim; ++j) {
      if (scaled[j] != 0.0f) s += w[j] * static_cast<double>(scaled[j]);
    }
    scores[c] = s;
  }
  return finish(m, std::move(scores));
}

Prediction predict_scaled(const LinearModel& m, const SparseMatrix& x, std::size_t r) {
  if (x.dim() != m.dim)
    throw Error(ErrorCode::DimensionMismatch, fmt::format("matrix dim {} for model dim {}", x.dim(), m.dim));
  std::vector<double> scores(m.n_weight_vectors());
  for (std::size_t c = 0; c < scores.size(); ++c) scores[c] = decision_value(x, r, m.weight_vector(c));
  return finish(m, std::move(scores));
}

// ---------------------------------------------------------------------------

std::vector<std::uint32_t> stratified_folds(std::span<const std::string> labels, std::uint32_t folds,
                                            std::uint64_t seed) {
  if (folds == 0) throw Error(ErrorCode::InvalidArgument, "fold count must be positive");
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = members.try_emplace(labels[i]);
    if (inserted) order.push_back(labels[i]);
    it->second.push_back(i);
  }
  std::sort(order.begin(), order.end());

  std::vector<std::uint32_t> fold_of(labels.size(), 0);
  std::uint32_t next = 0;
  for (std::size_t c = 0; c < order.size(); ++c) {
    auto& idx = members[order[c]];
    Rng rng(derive_seed(seed, c));
    shuffle(std::span(idx), rng);
    for (auto i : idx) {
      fold_of[i] = next;
      next = (next + 1) % folds;
    }
  }
  return fold_of;
}

std::vector<double> default_C_grid() {
  std::vector<double> grid;
  for (int e = -6; e <= 6; e += 2) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

CvResult cross_validate(const SparseMatrix& x, std::span<const std::string> labels, std::span<const double> C_grid,
                        const CvOptions& opt) {
  if (C_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty C grid");
  for (double c : C_grid) {
    if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, fmt::format("grid value {} is not a positive C", c));
  }
  if (opt.folds < 2) throw Error(ErrorCode::InvalidArgument, "cross-validation needs at least two folds");
  if (labels.size() != x.rows())
    throw Error(ErrorCode::InvalidArgument, fmt::format("{} labels for {} rows", labels.size(), x.rows()));
  if (labels.size() < opt.folds)
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("{} samples cannot fill {} folds", labels.size(), opt.folds));

  CvResult res;
  res.grid.assign(C_grid.begin(), C_grid.end());
  res.fold_of = stratified_folds(labels, opt.folds, opt.seed);

  std::map<std::string, std::size_t> class_sizes;
  for (const auto& l : labels) ++class_sizes[l];
  for (const auto& [cls, n] : class_sizes) {
    if (n < opt.folds)
      res.warnings.push_back(fmt::format("class '{}' has {} members for {} folds", cls, n, opt.folds));
  }

  struct FoldData {
    SparseMatrix train;
    SparseMatrix held;
    std::vector<std::string> train_labels;
    std::vector<std::string> held_labels;
  };
  std::vector<FoldData> fold_data(opt.folds);
  for (std::uint32_t f = 0; f < opt.folds; ++f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < labels.size(); ++i) (res.fold_of[i] == f ? te : tr).push_back(i);
    auto& fd = fold_data[f];
    fd.train = x.select_rows(tr);
    fd.held = x.select_rows(te);
    for (auto i : tr) fd.train_labels.push_back(labels[i]);
    for (auto i : te) fd.held_labels.push_back(labels[i]);
  }

  const std::size_t g_count = res.grid.size();
  res.fold_accuracy.assign(g_count, std::vector<double>(opt.folds, 0.0));
  const auto identity = features::Scaler::identity(x.dim());
  parallel_for(g_count * opt.folds, opt.threads, [&](std::size_t job) {
    const std::size_t g = job / opt.folds;
    const std::size_t f = job % opt.folds;
    const auto& fd = fold_data[f];
    double acc = 0.0;
    if (!fd.held_labels.empty()) {
      std::size_t correct = 0;
      auto distinct = fd.train_labels;
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      if (distinct.size() < 2) {
        for (const auto& l : fd.held_labels) correct += (!distinct.empty() && l == distinct[0]);
      } else {
        OvrOptions oo{res.grid[g], opt.solver, 1};
        const auto model = train_ovr(fd.train, fd.train_labels, identity, oo);
        for (std::size_t r = 0; r < fd.held_labels.size(); ++r) {
          const auto p = predict_scaled(model, fd.held, r);
          correct += model.classes[p.class_index] == fd.held_labels[r];
        }
      }
      acc = static_cast<double>(correct) / static_cast<double>(fd.held_labels.size());
    }
    res.fold_accuracy[g][f] = acc;
  });

  res.mean_accuracy.resize(g_count);
  for (std::size_t g = 0; g < g_count; ++g) {
    double sum = 0.0;
    for (double a : res.fold_accuracy[g]) sum += a;
    res.mean_accuracy[g] = sum / static_cast<double>(opt.folds);
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < g_count; ++g) {
    const double a = res.mean_accuracy[g];
    const double b = res.mean_accuracy[best];
    if (a > b || (a == b && res.grid[g] < res.grid[best])) best = g;
  }
  res.chosen_C = res.grid[best];
  return res;
}

}  // namespace landuse::learn
