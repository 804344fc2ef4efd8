#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "landuse/common.hpp"
#include "landuse/learn.hpp"
#include "landuse/random.hpp"

namespace landuse::learn {

void SparseMatrix::add_row(std::span<const float> dense) {
  if (dense.size() != dim_)
    throw Error(ErrorCode::DimensionMismatch, fmt::format("row of length {} for matrix dim {}", dense.size(), dim_));
  for (std::uint32_t j = 0; j < dim_; ++j) {
    const float v = dense[j];
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite feature value");
    if (v != 0.0f) {
      cols_.push_back(j);
      values_.push_back(v);
    }
  }
  row_ptr_.push_back(values_.size());
}

SparseMatrix SparseMatrix::select_rows(std::span<const std::size_t> rows) const {
  SparseMatrix out(dim_);
  std::size_t total = 0;
  for (auto r : rows) total += row_ptr_[r + 1] - row_ptr_[r];
  out.cols_.reserve(total);
  out.values_.reserve(total);
  out.row_ptr_.reserve(rows.size() + 1);
  for (auto r : rows) {
    const auto idx = indices(r);
    const auto val = values(r);
    out.cols_.insert(out.cols_.end(), idx.begin(), idx.end());
    out.values_.insert(out.values_.end(), val.begin(), val.end());
    out.row_ptr_.push_back(out.values_.size());
  }
  return out;
}

namespace {

inline double sparse_dot(std::span<const std::uint32_t> idx, std::span<const float> val, const double* w) {
  double s = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) s += w[idx[k]] * static_cast<double>(val[k]);
  return s;
}

inline void sparse_axpy(double a, std::span<const std::uint32_t> idx, std::span<const float> val, double* w) {
  for (std::size_t k = 0; k < idx.size(); ++k) w[idx[k]] += a * static_cast<double>(val[k]);
}

void validate(const BinaryProblem& p) {
  if (p.x == nullptr) throw Error(ErrorCode::InvalidArgument, "binary problem has no data");
  if (!(p.C > 0.0) || !std::isfinite(p.C))
    throw Error(ErrorCode::InvalidArgument, fmt::format("C must be positive and finite, got {}", p.C));
  if (!std::isfinite(p.bias)) throw Error(ErrorCode::NonFinite, "bias is not finite");
  if (p.y.size() != p.x->rows())
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("{} labels for {} rows", p.y.size(), p.x->rows()));
  if (p.y.empty()) throw Error(ErrorCode::EmptyInput, "binary problem has no rows");
  for (auto yi : p.y) {
    if (yi != 1 && yi != -1) throw Error(ErrorCode::InvalidArgument, "labels must be +1 or -1");
  }
}

}  // namespace

double decision_value(const SparseMatrix& x, std::size_t row, std::span<const double> w, double bias) {
  return sparse_dot(x.indices(row), x.values(row), w.data()) + w[x.dim()] * bias;
}

double primal_objective(const BinaryProblem& p, std::span<const double> w) {
  double reg = 0.0;
  for (double v : w) reg += v * v;
  double loss = 0.0;
  for (std::size_t i = 0; i < p.x->rows(); ++i) {
    const double margin = 1.0 - p.y[i] * decision_value(*p.x, i, w, p.bias);
    if (margin > 0.0) loss += margin * margin;
  }
  return 0.5 * reg + p.C * loss;
}

double dual_objective(const BinaryProblem& p, std::span<const double> alpha) {
  const std::size_t dim = p.x->dim();
  std::vector<double> w(dim + 1, 0.0);
  double quad = 0.0;
  double lin = 0.0;
  for (std::size_t i = 0; i < p.x->rows(); ++i) {
    sparse_axpy(alpha[i] * p.y[i], p.x->indices(i), p.x->values(i), w.data());
    w[dim] += alpha[i] * p.y[i] * p.bias;
    quad += alpha[i] * alpha[i];
    lin += alpha[i];
  }
  double wn = 0.0;
  for (double v : w) wn += v * v;
  return 0.5 * wn + quad / (4.0 * p.C) - lin;
}

// Coordinate descent on the dual with liblinear-style shrinking: a
// coordinate at its bound whose gradient points outward past the previous
// epoch's extreme is removed from the active set until the shrunken problem
// converges, after which a full pass re-checks every coordinate.
BinaryResult train_binary(const BinaryProblem& p, const SolverOptions& opt, const EpochObserver& observer) {
  validate(p);
  if (!(opt.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");

  const SparseMatrix& x = *p.x;
  const std::size_t n = x.rows();
  const std::size_t dim = x.dim();
  const double diag = 0.5 / p.C;
  const double bias = p.bias;
  constexpr double inf = std::numeric_limits<double>::infinity();

  BinaryResult res;
  res.w.assign(dim + 1, 0.0);
  res.alpha.assign(n, 0.0);
  double* w = res.w.data();
  double* alpha = res.alpha.data();

  std::vector<double> qd(n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = bias * bias;
    for (float v : x.values(i)) sq += static_cast<double>(v) * v;
    qd[i] = sq + diag;
    order[i] = i;
  }

  Rng rng(opt.seed);
  std::size_t active = n;
  double pg_max_old = inf;

  while (res.iterations < opt.max_iter) {
    double pg_max = -inf;
    double pg_min = inf;

    for (std::size_t i = 0; i < active; ++i) {
      const auto j = i + static_cast<std::size_t>(uniform_index(rng, active - i));
      std::swap(order[i], order[j]);
    }

    for (std::size_t s = 0; s < active; ++s) {
      const std::size_t i = order[s];
      const double yi = p.y[i];
      const auto idx = x.indices(i);
      const auto val = x.values(i);

      const double g = yi * (sparse_dot(idx, val, w) + w[dim] * bias) - 1.0 + alpha[i] * diag;

      double pg = 0.0;
      if (alpha[i] == 0.0) {
        if (opt.shrinking && g > pg_max_old) {
          --active;
          std::swap(order[s], order[active]);
          --s;
          continue;
        }
        if (g < 0.0) pg = g;
      } else {
        pg = g;
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);

      if (std::fabs(pg) > 1.0e-12) {
        const double old = alpha[i];
        alpha[i] = std::max(old - g / qd[i], 0.0);
        const double d = (alpha[i] - old) * yi;
        sparse_axpy(d, idx, val, w);
        w[dim] += d * bias;
      }
    }

    ++res.iterations;
    const double violation = std::max(std::fabs(pg_max), std::fabs(pg_min));
    if (observer) observer(EpochState{res.iterations, res.alpha, res.w, active == 0 ? 0.0 : violation});

    if (active == 0 || violation < opt.tol) {
      if (active == n) {
        res.converged = true;
        break;
      }
      active = n;
      pg_max_old = inf;
      continue;
    }
    pg_max_old = pg_max <= 0.0 ? inf : pg_max;
  }
  return res;
}

}  // namespace landuse::learn
