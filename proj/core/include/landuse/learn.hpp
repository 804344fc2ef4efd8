#pragma once

// L2-regularized, squared-hinge linear SVMs trained by dual coordinate
// descent, one-vs-rest multiclass composition and stratified k-fold
// selection of C.
//
// Binary problem (x̂_i = [x_i; bias]):
//   primal  min_w  1/2 |w|^2 + C * sum_i max(0, 1 - y_i w.x̂_i)^2
//   dual    min_a  1/2 a'(Q + D)a - e'a,  a >= 0,
//           Q_ij = y_i y_j x̂_i.x̂_j,  D_ii = 1/(2C),  w = sum_i a_i y_i x̂_i

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "landuse/features.hpp"

namespace landuse::learn {

/// Row-compressed matrix of (already scaled) feature vectors. Zero entries
/// are dropped so inner products only touch non-zeros.
class SparseMatrix {
 public:
  explicit SparseMatrix(std::uint32_t dim = 0) : dim_(dim), row_ptr_{0} {}

  std::uint32_t dim() const { return dim_; }
  std::size_t rows() const { return row_ptr_.size() - 1; }
  std::size_t nnz() const { return values_.size(); }

  /// Throws DimensionMismatch / NonFinite.
  void add_row(std::span<const float> dense);

  std::span<const std::uint32_t> indices(std::size_t r) const {
    return {cols_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const float> values(std::size_t r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }

  SparseMatrix select_rows(std::span<const std::size_t> rows) const;

 private:
  std::uint32_t dim_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> cols_;
  std::vector<float> values_;
};

struct BinaryProblem {
  const SparseMatrix* x = nullptr;
  std::span<const std::int8_t> y;  // +1 / -1
  double C = 1.0;
  /// Value of the constant feature appended to every row.
  double bias = 1.0;
};

struct SolverOptions {
  double tol = 0.1;
  std::uint32_t max_iter = 1000;
  std::uint64_t seed = 42;
  bool shrinking = true;
};

struct EpochState {
  std::uint32_t epoch = 0;
  std::span<const double> alpha;
  std::span<const double> w;
  /// Largest |projected gradient| seen among the coordinates visited.
  double max_violation = 0.0;
};

using EpochObserver = std::function<void(const EpochState&)>;

struct BinaryResult {
  /// Length dim + 1; the last component multiplies the bias feature.
  std::vector<double> w;
  std::vector<double> alpha;
  std::uint32_t iterations = 0;
  bool converged = false;
};

/// Throws InvalidArgument for C <= 0 or mismatched sizes, NonFinite for a
/// non-finite bias. Deterministic for a given seed.
BinaryResult train_binary(const BinaryProblem& p, const SolverOptions& opt = {},
                          const EpochObserver& observer = {});

double primal_objective(const BinaryProblem& p, std::span<const double> w);
double dual_objective(const BinaryProblem& p, std::span<const double> alpha);
double decision_value(const SparseMatrix& x, std::size_t row, std::span<const double> w, double bias = 1.0);

// ---------------------------------------------------------------------------

struct LinearModel {
  /// Sorted lexicographically.
  std::vector<std::string> classes;
  std::uint32_t dim = 0;
  /// Row-major, one row of dim + 1 per weight vector. Two-class models keep
  /// a single row scoring classes[0] positive; one-class models keep a
  /// single zero row.
  std::vector<double> weights;
  features::Scaler scaler;
  double C = 1.0;
  std::uint64_t seed = 42;
  double tol = 0.1;
  /// Solver epochs per weight vector.
  std::vector<std::uint32_t> iterations;

  std::size_t n_weight_vectors() const { return classes.size() == 2 ? 1 : classes.size(); }
  std::span<const double> weight_vector(std::size_t k) const {
    return {weights.data() + k * (dim + 1), dim + 1};
  }

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

struct Prediction {
  std::size_t class_index = 0;
  /// One score per entry in LinearModel::classes.
  std::vector<double> decision;
};

struct OvrOptions {
  double C = 1.0;
  SolverOptions solver;
  unsigned threads = 1;
};

struct OvrReport {
  /// Classes whose solver hit max_iter.
  std::vector<std::string> unconverged;
};

/// `x` holds scaled rows; `scaler` is embedded so predict() accepts raw
/// vectors. Requires at least two distinct labels.
LinearModel train_ovr(const SparseMatrix& x, std::span<const std::string> labels, const features::Scaler& scaler,
                      const OvrOptions& opt, OvrReport* report = nullptr);

/// Model that always predicts its single class.
LinearModel constant_model(std::string cls, std::uint32_t dim, features::Scaler scaler);

/// Scores a raw (unscaled) vector. Throws DimensionMismatch.
Prediction predict(const LinearModel& m, std::span<const float> raw);
/// Scores row r of an already-scaled matrix.
Prediction predict_scaled(const LinearModel& m, const SparseMatrix& x, std::size_t r);

// ---------------------------------------------------------------------------

/// Stratified fold index per sample. Classes are visited in sorted order;
/// each class's members are shuffled with a seeded stream and dealt
/// round-robin, continuing from the fold where the previous class stopped,
/// so per-class fold sizes differ by at most one.
std::vector<std::uint32_t> stratified_folds(std::span<const std::string> labels, std::uint32_t folds,
                                            std::uint64_t seed);

struct CvOptions {
  std::uint32_t folds = 5;
  std::uint64_t seed = 42;
  SolverOptions solver;
  unsigned threads = 1;
};

struct CvResult {
  double chosen_C = 0.0;
  std::vector<double> grid;
  std::vector<double> mean_accuracy;
  /// fold_accuracy[g][f]
  std::vector<std::vector<double>> fold_accuracy;
  std::vector<std::uint32_t> fold_of;
  std::vector<std::string> warnings;
};

/// Mean held-out accuracy per grid value; the best mean wins, ties going to
/// the smallest C. Throws InvalidArgument for an empty grid, a non-positive
/// grid value or fewer samples than folds.
CvResult cross_validate(const SparseMatrix& x, std::span<const std::string> labels, std::span<const double> C_grid,
                        const CvOptions& opt);

/// {2^-6, 2^-4, ..., 2^6}
std::vector<double> default_C_grid();

// ---------------------------------------------------------------------------
// "LUM1" binary model record.

void encode_linear_model(const LinearModel& m, std::vector<std::uint8_t>& out);
std::vector<std::uint8_t> encode_linear_model(const LinearModel& m);
LinearModel decode_linear_model(std::span<const std::uint8_t> bytes);

}  // namespace landuse::learn
