#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "drpr/centralized.hpp"
#include "drpr/random.hpp"
#include "drpr/stochastic.hpp"

namespace drpr {

/// Teleport weight of the single-page protocol, 2a / (n - a (n - 2)). It
/// makes the expected update matrix an affine image of M, so both share
/// their top eigenvector.
template <typename Scalar = double>
Scalar alpha1(Scalar alpha, PageIndex n) {
  detail::require_alpha(static_cast<double>(alpha));
  detail::require(n > 2, ErrorCode::TooFewPages, "alpha1 needs n > 2");
  return Scalar(2) * alpha / (Scalar(n) - alpha * Scalar(n - 2));
}

namespace detail {

inline void require_page(PageIndex i, PageIndex n) {
  require(i >= 0 && i < n, ErrorCode::IndexOutOfRange,
          "page " + std::to_string(i) + " outside [0, " + std::to_string(n) + ")");
}

}  // namespace detail

/// Local link matrix of page i: row i and column i copy A, every other
/// diagonal entry (l, l) is 1 - a_il, everything else is zero.
template <typename Scalar>
ColumnStochasticMatrix<Scalar> build_distributed_link_matrix(const ColumnStochasticMatrix<Scalar>& a,
                                                             PageIndex i) {
  const PageIndex n = a.size();
  detail::require_page(i, n);
  using RowIt = typename ColumnStochasticMatrix<Scalar>::RowMajor::InnerIterator;
  using ColIt = typename ColumnStochasticMatrix<Scalar>::ColumnMajor::InnerIterator;

  Vector<Scalar> row_i = Vector<Scalar>::Zero(n);
  for (RowIt it(a.rows(), i); it; ++it) row_i[it.col()] = it.value();

  std::vector<Eigen::Triplet<Scalar>> entries;
  for (RowIt it(a.rows(), i); it; ++it) entries.emplace_back(i, it.col(), it.value());
  for (ColIt it(a.columns(), i); it; ++it) {
    if (it.row() != i) entries.emplace_back(it.row(), i, it.value());
  }
  for (PageIndex l = 0; l < n; ++l) {
    if (l != i) entries.emplace_back(l, l, Scalar(1) - row_i[l]);
  }
  // Built unchecked; the result is stochastic whenever A is.
  typename ColumnStochasticMatrix<Scalar>::ColumnMajor m(n, n);
  m.setFromTriplets(entries.begin(), entries.end());
  return ColumnStochasticMatrix<Scalar>::unchecked(std::move(m));
}

/// y = A_i x without materializing A_i. Touches row i, column i and the
/// diagonal only. `y` must not alias `x`.
template <typename Scalar>
void apply_distributed_link_into(const ColumnStochasticMatrix<Scalar>& a, PageIndex i,
                                 const Vector<Scalar>& x, Vector<Scalar>& y) {
  using RowIt = typename ColumnStochasticMatrix<Scalar>::RowMajor::InnerIterator;
  using ColIt = typename ColumnStochasticMatrix<Scalar>::ColumnMajor::InnerIterator;
  y = x;
  Scalar own = 0;
  for (RowIt it(a.rows(), i); it; ++it) {
    const PageIndex l = it.col();
    own += it.value() * x[l];
    if (l != i) y[l] = (Scalar(1) - it.value()) * x[l];
  }
  for (ColIt it(a.columns(), i); it; ++it) {
    if (it.row() != i) y[it.row()] += it.value() * x[i];
  }
  y[i] = own;
}

template <typename Scalar, typename Derived>
Vector<Scalar> apply_distributed_link(const ColumnStochasticMatrix<Scalar>& a, PageIndex i,
                                      const Eigen::MatrixBase<Derived>& x) {
  detail::require_dimension(a, x);
  detail::require_page(i, a.size());
  Vector<Scalar> y(a.size());
  apply_distributed_link_into(a, i, Vector<Scalar>(x), y);
  return y;
}

template <typename Scalar>
ProbabilityVector<Scalar> apply_distributed_link(const ColumnStochasticMatrix<Scalar>& a,
                                                 PageIndex i, const ProbabilityVector<Scalar>& x) {
  return ProbabilityVector<Scalar>(apply_distributed_link(a, i, x.values()));
}

/// State of one single-page protocol run: x is the current estimate, x_bar
/// the mean of the k estimates produced before it.
template <typename Scalar>
struct DrpaSingleState {
  std::int64_t k = 0;
  Vector<Scalar> x;
  Vector<Scalar> x_bar;
  Philox rng;
  Vector<Scalar> scratch;

  DrpaSingleState(const ProbabilityVector<Scalar>& x0, Philox generator)
      : x(x0.values()), x_bar(x0.values()), rng(generator), scratch(x0.size()) {}
};

/// One protocol step with the page fixed to `theta`.
template <typename Scalar>
void drpa_single_step_at(DrpaSingleState<Scalar>& state, const ColumnStochasticMatrix<Scalar>& a,
                         Scalar alpha1, PageIndex theta) {
  const Scalar gain = Scalar(1) / Scalar(state.k + 1);
  state.x_bar -= gain * (state.x_bar - state.x);

  apply_distributed_link_into(a, theta, state.x, state.scratch);
  const Scalar teleport = alpha1 / Scalar(a.size());
  state.x = (Scalar(1) - alpha1) * state.scratch;
  state.x.array() += teleport;
  ++state.k;
}

/// One protocol step with the page drawn uniformly from the state's stream.
/// Returns the page that updated.
template <typename Scalar>
PageIndex drpa_single_step(DrpaSingleState<Scalar>& state, const ColumnStochasticMatrix<Scalar>& a,
                           Scalar alpha1) {
  detail::require_dimension(a, state.x);
  const auto theta =
      static_cast<PageIndex>(uniform_index(state.rng, static_cast<std::uint64_t>(a.size())));
  drpa_single_step_at(state, a, alpha1, theta);
  return theta;
}

template <typename Scalar>
struct ExpectedMatrix {
  DenseMatrix<Scalar> matrix;
  Scalar residual;  // max-entry deviation from the affine closed form
};

/// Residual of `expected` against (w / alpha) M + (1 - w / alpha) I.
template <typename Scalar>
Scalar affine_identity_residual(const DenseMatrix<Scalar>& expected, const DenseMatrix<Scalar>& m,
                                Scalar alpha, Scalar weight) {
  const Scalar ratio = weight / alpha;
  const DenseMatrix<Scalar> closed =
      ratio * m + (Scalar(1) - ratio) * DenseMatrix<Scalar>::Identity(m.rows(), m.cols());
  return (expected - closed).cwiseAbs().maxCoeff();
}

/// M1 = (1 - a1) (1/n) sum_i A_i + (a1 / n) S, built by averaging all n
/// local link matrices.
template <typename Scalar>
ExpectedMatrix<Scalar> expected_single_matrix(const ColumnStochasticMatrix<Scalar>& a, Scalar alpha,
                                              PageIndex dense_limit = kDefaultDenseLimit) {
  detail::require_dense(a.size(), dense_limit);
  const PageIndex n = a.size();
  const Scalar a1 = alpha1(alpha, n);

  DenseMatrix<Scalar> mean = DenseMatrix<Scalar>::Zero(n, n);
  for (PageIndex i = 0; i < n; ++i) {
    const auto local = build_distributed_link_matrix(a, i);
    using ColIt = typename ColumnStochasticMatrix<Scalar>::ColumnMajor::InnerIterator;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (ColIt it(local.columns(), j); it; ++it) mean(it.row(), j) += it.value();
    }
  }
  mean /= Scalar(n);

  DenseMatrix<Scalar> m1 = (Scalar(1) - a1) * mean;
  m1.array() += a1 / Scalar(n);
  const Scalar residual = affine_identity_residual(m1, google_matrix_dense(a, alpha, dense_limit),
                                                   alpha, a1);
  return {std::move(m1), residual};
}

}  // namespace drpr
