#pragma once

// Shared graphs and test-only dense oracles. The oracles evaluate the local
// link matrices entry by entry from a dense A, independently of the sparse
// builders under test.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "drpr/graph.hpp"
#include "drpr/random.hpp"
#include "drpr/stochastic.hpp"

namespace drpr::testing {

inline WebGraph three_cycle() { return parse_edge_list("0 1\n1 2\n2 0\n"); }

/// 0 -> 1 -> 2 with page 2 dangling.
inline WebGraph short_path() { return parse_edge_list("# n=3\n0 1\n1 2\n"); }

/// Dense (A_i)_{jl}: a_jl if j == i or l == i; 1 - a_il if j == l != i; else 0.
inline Eigen::MatrixXd dense_single_link(const Eigen::MatrixXd& a, Eigen::Index i) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = 0; l < n; ++l) {
      if (j == i || l == i) {
        out(j, l) = a(j, l);
      } else if (j == l) {
        out(j, l) = 1.0 - a(i, l);
      }
    }
  }
  return out;
}

/// Dense (A_p)_{ij}: a_ij if p_i or p_j; 1 - sum_{h: p_h} a_hj if !p_i and
/// i == j; else 0.
inline Eigen::MatrixXd dense_multi_link(const Eigen::MatrixXd& a, const std::vector<int>& p) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (p[i] == 1 || p[j] == 1) {
        out(i, j) = a(i, j);
      } else if (i == j) {
        double s = 0;
        for (Eigen::Index h = 0; h < n; ++h) {
          if (p[h] == 1) s += a(h, j);
        }
        out(i, j) = 1.0 - s;
      }
    }
  }
  return out;
}

/// Random point on the simplex (normalized uniforms).
inline Eigen::VectorXd random_simplex(Eigen::Index n, Philox& rng) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = uniform01(rng) + 1e-3;
  return x / x.sum();
}

/// Graph with n in [lo, hi] and the given edge probability, all from `seed`.
inline WebGraph random_graph(std::uint64_t seed, PageIndex lo, PageIndex hi, double edge_prob) {
  Philox rng(seed, 99);
  const auto n = lo + static_cast<PageIndex>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
  return generate_random_graph(n, edge_prob, seed);
}

}  // namespace drpr::testing
