#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "drpr/stochastic.hpp"

namespace drpr {

/// Tolerance (L1 step difference) at which the power method serves as the
/// reference PageRank for every other component.
inline constexpr double kOracleTolerance = 1e-13;

/// Raised when the power method exhausts its iteration budget.
class NotConverged : public Error {
 public:
  NotConverged(Eigen::VectorXd best, std::int64_t iterations, double last_step)
      : Error(ErrorCode::NotConverged,
              "no convergence after " + std::to_string(iterations) + " iterations (last step " +
                  std::to_string(last_step) + ")"),
        best_(std::move(best)),
        iterations_(iterations),
        last_step_(last_step) {}

  const Eigen::VectorXd& best() const { return best_; }
  std::int64_t iterations() const { return iterations_; }
  double last_step() const { return last_step_; }

 private:
  Eigen::VectorXd best_;
  std::int64_t iterations_;
  double last_step_;
};

/// (1 - alpha) A x + (alpha / n) 1, i.e. M x for x on the simplex.
template <typename Scalar, typename Derived>
Vector<Scalar> apply_google(const ColumnStochasticMatrix<Scalar>& a, Scalar alpha,
                            const Eigen::MatrixBase<Derived>& x) {
  detail::require_alpha(static_cast<double>(alpha));
  detail::require_dimension(a, x);
  const Scalar teleport = alpha / Scalar(a.size());
  Vector<Scalar> y = a.columns() * x;
  y = (Scalar(1) - alpha) * y;
  y.array() += teleport;
  return y;
}

template <typename Scalar>
ProbabilityVector<Scalar> apply_google(const ColumnStochasticMatrix<Scalar>& a, Scalar alpha,
                                       const ProbabilityVector<Scalar>& x) {
  return ProbabilityVector<Scalar>(apply_google(a, alpha, x.values()));
}

template <typename Scalar>
struct PowerMethodResult {
  ProbabilityVector<Scalar> x;
  std::int64_t iterations;
  Scalar last_step;  // L1 norm of the final update
};

/// Iterates x <- M x until the L1 step difference is at most `tol`. The
/// returned iterate satisfies ||M x - x||_1 <= (1 - alpha) tol.
template <typename Scalar>
PowerMethodResult<Scalar> power_method(const ColumnStochasticMatrix<Scalar>& a, Scalar alpha,
                                       const ProbabilityVector<Scalar>& x0,
                                       Scalar tol = Scalar(kOracleTolerance),
                                       std::int64_t max_iter = 100000) {
  detail::require(tol > 0, ErrorCode::InvalidArgument, "tol must be positive");
  detail::require(max_iter >= 1, ErrorCode::InvalidArgument, "max_iter must be at least 1");
  detail::require_dimension(a, x0.values());

  Vector<Scalar> x = x0.values();
  Scalar step = 0;
  for (std::int64_t iteration = 1; iteration <= max_iter; ++iteration) {
    Vector<Scalar> next = apply_google(a, alpha, x);
    step = (next - x).template lpNorm<1>();
    x.swap(next);
    if (step <= tol) {
      return {ProbabilityVector<Scalar>(std::move(x)), iteration, step};
    }
  }
  throw NotConverged(x.template cast<double>(), max_iter, static_cast<double>(step));
}

template <typename Scalar>
ProbabilityVector<Scalar> pagerank_oracle(const ColumnStochasticMatrix<Scalar>& a, Scalar alpha) {
  return power_method(a, alpha, ProbabilityVector<Scalar>::uniform(a.size()),
                      Scalar(kOracleTolerance))
      .x;
}

/// Dense M = (1 - alpha) A + (alpha / n) S, S the all-ones matrix.
template <typename Scalar>
DenseMatrix<Scalar> google_matrix_dense(const ColumnStochasticMatrix<Scalar>& a, Scalar alpha,
                                        PageIndex dense_limit = kDefaultDenseLimit) {
  detail::require_alpha(static_cast<double>(alpha));
  detail::require_dense(a.size(), dense_limit);
  const PageIndex n = a.size();
  DenseMatrix<Scalar> m = (Scalar(1) - alpha) * a.to_dense();
  m.array() += alpha / Scalar(n);
  return m;
}

}  // namespace drpr
