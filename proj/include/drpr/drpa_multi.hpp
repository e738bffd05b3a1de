#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "drpr/centralized.hpp"
#include "drpr/drpa_single.hpp"
#include "drpr/random.hpp"
#include "drpr/stochastic.hpp"

namespace drpr {

/// Largest n for which the 2^n-pattern expectation is enumerated.
inline constexpr PageIndex kEnumerationLimit = 12;

/// Teleport weight of the multi-page protocol,
/// a (1 - (1 - b)^2) / (1 - a (1 - b)^2). Equals a when b = 1.
template <typename Scalar = double>
Scalar alpha2(Scalar alpha, Scalar beta) {
  detail::require_alpha(static_cast<double>(alpha));
  detail::require_beta(static_cast<double>(beta));
  const Scalar idle = (Scalar(1) - beta) * (Scalar(1) - beta);
  return alpha * (Scalar(1) - idle) / (Scalar(1) - alpha * idle);
}

/// Which pages update at one step (a realization of the Bernoulli vector).
class UpdatePattern {
 public:
  explicit UpdatePattern(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (const auto bit : bits_) {
      detail::require(bit <= 1, ErrorCode::InvalidArgument, "pattern bits must be 0 or 1");
    }
  }

  static UpdatePattern all(PageIndex n, bool value) {
    return UpdatePattern(std::vector<std::uint8_t>(static_cast<std::size_t>(n), value ? 1 : 0));
  }

  static UpdatePattern single(PageIndex n, PageIndex i) {
    auto pattern = all(n, false);
    pattern.bits_.at(static_cast<std::size_t>(i)) = 1;
    return pattern;
  }

  /// Bit i of `mask` gives page i; requires n < 64.
  static UpdatePattern from_mask(PageIndex n, std::uint64_t mask) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for (PageIndex i = 0; i < n; ++i) bits[i] = static_cast<std::uint8_t>((mask >> i) & 1u);
    return UpdatePattern(std::move(bits));
  }

  PageIndex size() const { return static_cast<PageIndex>(bits_.size()); }
  bool operator[](PageIndex i) const { return bits_[static_cast<std::size_t>(i)] != 0; }
  PageIndex count() const {
    PageIndex total = 0;
    for (const auto bit : bits_) total += bit;
    return total;
  }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const UpdatePattern&, const UpdatePattern&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Draws n independent Bernoulli(beta) bits; always n draws, even for small beta.
template <typename Engine>
UpdatePattern sample_update_pattern(double beta, PageIndex n, Engine& rng) {
  detail::require_beta(beta);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
  for (auto& bit : bits) bit = bernoulli(rng, beta) ? 1 : 0;
  return UpdatePattern(std::move(bits));
}

namespace detail {

template <typename Scalar>
void require_pattern(const ColumnStochasticMatrix<Scalar>& a, const UpdatePattern& p) {
  require(p.size() == a.size(), ErrorCode::DimensionMismatch,
          "pattern of length " + std::to_string(p.size()) + " against n=" +
              std::to_string(a.size()));
}

/// Diagonal weight 1 - outflow of an idle page. A rounded column sum can
/// push the outflow a few ulps past 1; the weight is floored at zero.
template <typename Scalar>
Scalar idle_weight(Scalar outflow) {
  return std::max(Scalar(0), Scalar(1) - outflow);
}

}  // namespace detail

/// Link matrix for a set of simultaneously updating pages: a_ij is kept when
/// page i or page j updates, an idle page j keeps 1 - sum_{h updating} a_hj
/// on its diagonal, all other entries vanish.
template <typename Scalar>
ColumnStochasticMatrix<Scalar> build_multi_link_matrix(const ColumnStochasticMatrix<Scalar>& a,
                                                       const UpdatePattern& p) {
  detail::require_pattern(a, p);
  using ColIt = typename ColumnStochasticMatrix<Scalar>::ColumnMajor::InnerIterator;
  const PageIndex n = a.size();
  std::vector<Eigen::Triplet<Scalar>> entries;
  for (PageIndex j = 0; j < n; ++j) {
    Scalar outflow = 0;
    for (ColIt it(a.columns(), j); it; ++it) {
      const PageIndex i = it.row();
      if (p[i]) outflow += it.value();
      if (p[i] || p[j]) entries.emplace_back(i, j, it.value());
    }
    if (!p[j]) entries.emplace_back(j, j, detail::idle_weight(outflow));
  }
  typename ColumnStochasticMatrix<Scalar>::ColumnMajor m(n, n);
  m.setFromTriplets(entries.begin(), entries.end());
  return ColumnStochasticMatrix<Scalar>::unchecked(std::move(m));
}

/// y = A_p x in one pass over the stored entries of A. `y` and `outflow`
/// are scratch buffers resized as needed; `y` must not alias `x`.
template <typename Scalar>
void apply_multi_link_into(const ColumnStochasticMatrix<Scalar>& a, const UpdatePattern& p,
                           const Vector<Scalar>& x, Vector<Scalar>& y, Vector<Scalar>& outflow) {
  using ColIt = typename ColumnStochasticMatrix<Scalar>::ColumnMajor::InnerIterator;
  const PageIndex n = a.size();
  y.setZero(n);
  outflow.setZero(n);
  for (PageIndex j = 0; j < n; ++j) {
    const bool updates = p[j];
    for (ColIt it(a.columns(), j); it; ++it) {
      const PageIndex i = it.row();
      if (p[i]) outflow[j] += it.value();
      if (p[i] || updates) y[i] += it.value() * x[j];
    }
  }
  for (PageIndex j = 0; j < n; ++j) {
    if (!p[j]) y[j] += detail::idle_weight(outflow[j]) * x[j];
  }
}

template <typename Scalar, typename Derived>
Vector<Scalar> apply_multi_link(const ColumnStochasticMatrix<Scalar>& a, const UpdatePattern& p,
                                const Eigen::MatrixBase<Derived>& x) {
  detail::require_dimension(a, x);
  detail::require_pattern(a, p);
  Vector<Scalar> y;
  Vector<Scalar> outflow;
  apply_multi_link_into(a, p, Vector<Scalar>(x), y, outflow);
  return y;
}

template <typename Scalar>
ProbabilityVector<Scalar> apply_multi_link(const ColumnStochasticMatrix<Scalar>& a,
                                           const UpdatePattern& p,
                                           const ProbabilityVector<Scalar>& x) {
  return ProbabilityVector<Scalar>(apply_multi_link(a, p, x.values()));
}

template <typename Scalar>
struct DrpaMultiState {
  std::int64_t k = 0;
  Vector<Scalar> x;
  Vector<Scalar> x_bar;
  Philox rng;
  Vector<Scalar> scratch;
  Vector<Scalar> outflow;

  DrpaMultiState(const ProbabilityVector<Scalar>& x0, Philox generator)
      : x(x0.values()), x_bar(x0.values()), rng(generator) {}
};

/// One multi-page step with a given update pattern.
template <typename Scalar>
void drpa_multi_step_with(DrpaMultiState<Scalar>& state, const ColumnStochasticMatrix<Scalar>& a,
                          Scalar alpha2, const UpdatePattern& p) {
  const Scalar gain = Scalar(1) / Scalar(state.k + 1);
  state.x_bar -= gain * (state.x_bar - state.x);

  apply_multi_link_into(a, p, state.x, state.scratch, state.outflow);
  const Scalar teleport = alpha2 / Scalar(a.size());
  state.x = (Scalar(1) - alpha2) * state.scratch;
  state.x.array() += teleport;
  ++state.k;
}

template <typename Scalar>
UpdatePattern drpa_multi_step(DrpaMultiState<Scalar>& state,
                              const ColumnStochasticMatrix<Scalar>& a, Scalar alpha2,
                              double beta) {
  detail::require_dimension(a, state.x);
  auto pattern = sample_update_pattern(beta, a.size(), state.rng);
  drpa_multi_step_with(state, a, alpha2, pattern);
  return pattern;
}

/// M2 = (1 - a2) E[A_p] + (a2 / n) S with the expectation taken by
/// enumerating all 2^n patterns, weight b^|p| (1 - b)^(n - |p|).
template <typename Scalar>
ExpectedMatrix<Scalar> expected_multi_matrix(const ColumnStochasticMatrix<Scalar>& a, Scalar alpha,
                                             Scalar beta,
                                             PageIndex enumeration_limit = kEnumerationLimit) {
  const PageIndex n = a.size();
  detail::require(n <= enumeration_limit && n < 63, ErrorCode::EnumerationLimitExceeded,
                  "2^n enumeration refused for n=" + std::to_string(n));
  const Scalar a2 = alpha2(alpha, beta);
  using ColIt = typename ColumnStochasticMatrix<Scalar>::ColumnMajor::InnerIterator;

  DenseMatrix<Scalar> mean = DenseMatrix<Scalar>::Zero(n, n);
  const std::uint64_t patterns = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    const int active = std::popcount(mask);
    const Scalar weight = std::pow(beta, Scalar(active)) * std::pow(Scalar(1) - beta, Scalar(n - active));
    if (weight == Scalar(0)) continue;
    const auto local = build_multi_link_matrix(a, UpdatePattern::from_mask(n, mask));
    for (Eigen::Index j = 0; j < n; ++j) {
      for (ColIt it(local.columns(), j); it; ++it) mean(it.row(), j) += weight * it.value();
    }
  }

  DenseMatrix<Scalar> m2 = (Scalar(1) - a2) * mean;
  m2.array() += a2 / Scalar(n);
  const Scalar residual =
      affine_identity_residual(m2, google_matrix_dense(a, alpha, n), alpha, a2);
  return {std::move(m2), residual};
}

}  // namespace drpr
