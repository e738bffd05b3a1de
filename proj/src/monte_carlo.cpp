#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "drpr/drpa_multi.hpp"
#include "drpr/drpa_single.hpp"
#include "drpr/experiments.hpp"

namespace drpr {

namespace {

Eigen::VectorXd run_to_step(const LinkMatrix& a, const RankVector& x0, std::int64_t k,
                            Philox rng, const Protocol& protocol, double weight) {
  if (protocol.kind == Protocol::Kind::Single) {
    DrpaSingleState<double> state(x0, rng);
    while (state.k < k) drpa_single_step(state, a, weight);
    return state.x;
  }
  DrpaMultiState<double> state(x0, rng);
  while (state.k < k) drpa_multi_step(state, a, weight, protocol.beta);
  return state.x;
}

}  // namespace

MonteCarloResult monte_carlo_mean(const WebGraph& graph, double alpha, std::int64_t k,
                                  std::int64_t runs, std::uint64_t base_seed, Protocol protocol,
                                  const MonteCarloOptions& options) {
  detail::require(k >= 0 && k <= kMonteCarloMaxK, ErrorCode::InvalidArgument,
                  "k must lie in [0, 20]");
  detail::require(runs >= kMonteCarloMinRuns, ErrorCode::InvalidArgument,
                  "at least 100 runs are required");
  const PageIndex n = graph.size();
  detail::require_dense(n, options.dense_limit);

  const LinkMatrix a = build_link_matrix<double>(graph, options.policy);
  const RankVector x0 = options.x0.value_or(RankVector::uniform(n));
  detail::require(x0.size() == n, ErrorCode::DimensionMismatch,
                  "initial vector length differs from page count");

  const bool single = protocol.kind == Protocol::Kind::Single;
  const double weight = single ? alpha1(alpha, n) : alpha2(alpha, protocol.beta);
  const Eigen::MatrixXd expected = single ? expected_single_matrix(a, alpha, options.dense_limit).matrix
                                          : expected_multi_matrix(a, alpha, protocol.beta).matrix;

  MonteCarloResult result;
  result.predicted = x0.values();
  for (std::int64_t step = 0; step < k; ++step) result.predicted = expected * result.predicted;

  // One column per run; workers stride over run indices and the reduction
  // below runs in index order.
  Eigen::MatrixXd finals(n, runs);
  unsigned workers = options.workers != 0 ? options.workers : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(std::min<std::int64_t>(runs, 64)));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::int64_t r = w; r < runs; r += workers) {
          finals.col(r) = run_to_step(a, x0, k, Philox(base_seed, static_cast<std::uint64_t>(r)),
                                      protocol, weight);
        }
      });
    }
  }

  result.mean = finals.rowwise().mean();
  const Eigen::VectorXd variance =
      (finals.colwise() - result.mean).array().square().rowwise().sum() /
      static_cast<double>(runs - 1);
  result.std_error = (variance / static_cast<double>(runs)).array().sqrt();

  for (Eigen::Index i = 0; i < n; ++i) {
    const double gap = std::abs(result.mean[i] - result.predicted[i]);
    // A standard error at rounding level means the coordinate is deterministic.
    double z = 0;
    if (result.std_error[i] > kIdentityTolerance) {
      z = gap / result.std_error[i];
    } else if (gap > kIdentityTolerance) {
      z = std::numeric_limits<double>::infinity();
    }
    result.max_z_score = std::max(result.max_z_score, z);
  }
  return result;
}

}  // namespace drpr
