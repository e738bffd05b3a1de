#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "drpr/error.hpp"
#include "drpr/graph.hpp"

namespace drpr {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Dense verification routines refuse matrices larger than this by default.
inline constexpr PageIndex kDefaultDenseLimit = 512;

inline constexpr double kColumnSumTolerance = 1e-12;
inline constexpr double kSimplexNegativeSlack = 1e-12;
inline constexpr double kSimplexSumTolerance = 1e-9;

/// Residuals of a matrix against the column-stochastic invariants.
template <typename Scalar>
struct StochasticityReport {
  Scalar max_column_deviation = 0;  // max_j |sum_i m_ij - 1|
  Scalar min_entry = 0;
  Scalar max_entry = 0;
  PageIndex worst_column = 0;

  bool passes(Scalar tol) const {
    return max_column_deviation <= tol && min_entry >= 0 && max_entry <= 1;
  }
};

template <typename Derived>
auto column_stochasticity(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  StochasticityReport<Scalar> report;
  if (m.size() == 0) return report;
  report.min_entry = m.minCoeff();
  report.max_entry = m.maxCoeff();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const Scalar deviation = std::abs(m.col(j).sum() - Scalar(1));
    if (deviation > report.max_column_deviation) {
      report.max_column_deviation = deviation;
      report.worst_column = j;
    }
  }
  return report;
}

/// Sparse column-stochastic matrix stored by column (CSC) with a row-major
/// mirror for row access. Row indices within a column are strictly
/// increasing and no stored value is an explicit zero.
template <typename Scalar>
class ColumnStochasticMatrix {
 public:
  using ColumnMajor = Eigen::SparseMatrix<Scalar, Eigen::ColMajor>;
  using RowMajor = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

  /// Validates entries in [0, 1] and column sums within `tol` of 1.
  explicit ColumnStochasticMatrix(ColumnMajor columns, Scalar tol = Scalar(kColumnSumTolerance))
      : ColumnStochasticMatrix(std::move(columns), Unchecked{}) {
    const auto report = check();
    detail::require(report.passes(tol), ErrorCode::NotStochastic,
                    "column " + std::to_string(report.worst_column) + " deviates from 1 by " +
                        std::to_string(static_cast<double>(report.max_column_deviation)));
  }

  /// Skips validation; used to build deliberately corrupted fixtures.
  static ColumnStochasticMatrix unchecked(ColumnMajor columns) {
    return ColumnStochasticMatrix(std::move(columns), Unchecked{});
  }

  static ColumnStochasticMatrix from_triplets(PageIndex n,
                                              const std::vector<Eigen::Triplet<Scalar>>& entries) {
    ColumnMajor m(n, n);
    m.setFromTriplets(entries.begin(), entries.end());
    return ColumnStochasticMatrix(std::move(m));
  }

  PageIndex size() const { return columns_.rows(); }
  Eigen::Index nonZeros() const { return columns_.nonZeros(); }
  const ColumnMajor& columns() const { return columns_; }
  const RowMajor& rows() const { return rows_; }

  Scalar coeff(PageIndex row, PageIndex col) const { return columns_.coeff(row, col); }

  StochasticityReport<Scalar> check() const {
    StochasticityReport<Scalar> report;
    report.min_entry = Scalar(1);
    report.max_entry = Scalar(0);
    for (Eigen::Index j = 0; j < columns_.outerSize(); ++j) {
      Scalar sum = 0;
      for (typename ColumnMajor::InnerIterator it(columns_, j); it; ++it) {
        sum += it.value();
        report.min_entry = std::min(report.min_entry, it.value());
        report.max_entry = std::max(report.max_entry, it.value());
      }
      const Scalar deviation = std::abs(sum - Scalar(1));
      if (deviation > report.max_column_deviation) {
        report.max_column_deviation = deviation;
        report.worst_column = j;
      }
    }
    // Implicit zeros count toward the minimum unless every column is full.
    if (columns_.nonZeros() < columns_.rows() * columns_.cols()) {
      report.min_entry = std::min(report.min_entry, Scalar(0));
    }
    return report;
  }

  DenseMatrix<Scalar> to_dense() const { return DenseMatrix<Scalar>(columns_); }

  /// Bit-level equality of the sparse structure and stored values.
  friend bool operator==(const ColumnStochasticMatrix& a, const ColumnStochasticMatrix& b) {
    if (a.size() != b.size() || a.nonZeros() != b.nonZeros()) return false;
    for (Eigen::Index j = 0; j < a.columns_.outerSize(); ++j) {
      typename ColumnMajor::InnerIterator ia(a.columns_, j);
      typename ColumnMajor::InnerIterator ib(b.columns_, j);
      for (; ia && ib; ++ia, ++ib) {
        if (ia.index() != ib.index() || ia.value() != ib.value()) return false;
      }
      if (ia || ib) return false;
    }
    return true;
  }

 private:
  struct Unchecked {};

  ColumnStochasticMatrix(ColumnMajor columns, Unchecked) : columns_(std::move(columns)) {
    detail::require(columns_.rows() == columns_.cols(), ErrorCode::DimensionMismatch,
                    "link matrix must be square");
    columns_.prune([](Eigen::Index, Eigen::Index, const Scalar& v) { return v != Scalar(0); });
    columns_.makeCompressed();
    rows_ = columns_;
    rows_.makeCompressed();
  }

  ColumnMajor columns_;
  RowMajor rows_;
};

/// A rank estimate on the probability simplex: entries >= -1e-12, sum 1
/// within 1e-9. Never renormalized.
template <typename Scalar>
class ProbabilityVector {
 public:
  explicit ProbabilityVector(Vector<Scalar> values) : values_(std::move(values)) {
    detail::require(values_.size() > 0, ErrorCode::NotProbabilityVector, "empty vector");
    const Scalar minimum = values_.minCoeff();
    const Scalar sum = values_.sum();
    detail::require(minimum >= -Scalar(kSimplexNegativeSlack), ErrorCode::NotProbabilityVector,
                    "negative entry " + std::to_string(static_cast<double>(minimum)));
    detail::require(std::abs(sum - Scalar(1)) <= Scalar(kSimplexSumTolerance),
                    ErrorCode::NotProbabilityVector,
                    "entries sum to " + std::to_string(static_cast<double>(sum)));
  }

  static ProbabilityVector uniform(PageIndex n) {
    return ProbabilityVector(Vector<Scalar>::Constant(n, Scalar(1) / Scalar(n)));
  }

  static ProbabilityVector basis(PageIndex n, PageIndex i) {
    detail::require(i >= 0 && i < n, ErrorCode::IndexOutOfRange, "basis index out of range");
    return ProbabilityVector(Vector<Scalar>::Unit(n, i));
  }

  PageIndex size() const { return values_.size(); }
  const Vector<Scalar>& values() const { return values_; }
  Scalar operator[](PageIndex i) const { return values_[i]; }

 private:
  Vector<Scalar> values_;
};

/// Column j holds 1/n_j at every page j links to; zero columns are repaired
/// according to `policy`.
template <typename Scalar = double>
ColumnStochasticMatrix<Scalar> build_link_matrix(const WebGraph& graph,
                                                 DanglingPolicy policy = DanglingPolicy::Uniform) {
  const PageIndex n = graph.size();
  std::vector<Eigen::Triplet<Scalar>> entries;
  entries.reserve(graph.edge_count() + static_cast<std::size_t>(n));
  for (PageIndex j = 0; j < n; ++j) {
    const auto& targets = graph.out_links(j);
    if (!targets.empty()) {
      const Scalar weight = Scalar(1) / Scalar(targets.size());
      for (const PageIndex i : targets) entries.emplace_back(i, j, weight);
      continue;
    }
    switch (policy) {
      case DanglingPolicy::Uniform:
        for (PageIndex i = 0; i < n; ++i) entries.emplace_back(i, j, Scalar(1) / Scalar(n));
        break;
      case DanglingPolicy::SelfLoop:
        entries.emplace_back(j, j, Scalar(1));
        break;
      case DanglingPolicy::Reject:
        throw Error(ErrorCode::DanglingNode, "page " + std::to_string(j) + " has no out-links");
    }
  }
  return ColumnStochasticMatrix<Scalar>::from_triplets(n, entries);
}

namespace detail {

inline void require_alpha(double alpha) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidAlpha,
          "alpha must lie strictly inside (0, 1), got " + std::to_string(alpha));
}

inline void require_beta(double beta) {
  require(beta > 0.0 && beta <= 1.0, ErrorCode::InvalidBeta,
          "beta must lie in (0, 1], got " + std::to_string(beta));
}

inline void require_dense(PageIndex n, PageIndex limit) {
  require(n <= limit, ErrorCode::DenseLimitExceeded,
          "n=" + std::to_string(n) + " exceeds dense limit " + std::to_string(limit));
}

template <typename Scalar, typename Derived>
void require_dimension(const ColumnStochasticMatrix<Scalar>& a,
                       const Eigen::MatrixBase<Derived>& x) {
  require(x.size() == a.size(), ErrorCode::DimensionMismatch,
          "vector of length " + std::to_string(x.size()) + " against n=" +
              std::to_string(a.size()));
}

}  // namespace detail

}  // namespace drpr
