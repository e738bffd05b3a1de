#include <doctest.h>

#include "drpr/drpa_multi.hpp"
#include "drpr/drpa_single.hpp"
#include "drpr/experiments.hpp"
#include "fixtures.hpp"

using namespace drpr;

namespace {

using Pv = ProbabilityVector<double>;

}  // namespace

TEST_CASE("alpha1 closed form") {
  CHECK(std::abs(alpha1(0.15, 3) - 0.3 / 2.85) < 1e-16);
  CHECK(std::abs(alpha1(0.15, 3) - 0.10526315789473684) < 1e-16);
  CHECK(std::abs(alpha1(0.15, 4) - 0.08108108108108109) < 1e-16);
  CHECK(alpha1(0.15, 1000000) < 1e-5);
  for (const PageIndex n : {3, 10, 100, 100000}) {
    for (const double alpha : {0.01, 0.15, 0.5, 0.99}) {
      const double w = alpha1(alpha, n);
      CHECK(w > 0.0);
      CHECK(w < 1.0);
    }
  }
  CHECK_THROWS_AS(alpha1(0.0, 5), Error);
  CHECK_THROWS_AS(alpha1(0.15, 2), Error);
}

TEST_CASE("local link matrix of page 0 on the 3-cycle") {
  const auto a = build_link_matrix(testing::three_cycle());
  const auto a0 = build_distributed_link_matrix(a, 0);
  Eigen::Matrix3d expected;
  expected << 0, 0, 1,
              1, 1, 0,
              0, 0, 0;
  CHECK(a0.to_dense() == expected);
  for (Eigen::Index j = 0; j < 3; ++j) CHECK(a0.to_dense().col(j).sum() == 1.0);

  const auto y = apply_distributed_link(a, 0, Pv::uniform(3));
  CHECK(std::abs(y[0] - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(y[1] - 2.0 / 3.0) < 1e-15);
  CHECK(y[2] == 0.0);
}

TEST_CASE("index and dimension errors") {
  const auto a = build_link_matrix(testing::three_cycle());
  CHECK_THROWS_AS(build_distributed_link_matrix(a, 3), Error);
  CHECK_THROWS_AS(build_distributed_link_matrix(a, -1), Error);
  CHECK_THROWS_AS(apply_distributed_link(a, 0, Eigen::VectorXd::Ones(4).eval()), Error);
}

TEST_CASE("all-dangling graph: every local matrix stays stochastic") {
  const auto a = build_link_matrix(parse_edge_list("# n=6\n"));
  for (PageIndex i = 0; i < 6; ++i) {
    CHECK(build_distributed_link_matrix(a, i).check().passes(1e-12));
  }
}

TEST_CASE("sparse builder and matrix-free apply agree with the dense entrywise oracle") {
  Philox rng(123, 0);
  int triples = 0;
  for (std::uint64_t seed = 0; triples < 50; ++seed) {
    const auto g = testing::random_graph(seed, 3, 25, 0.2);
    const auto a = build_link_matrix(g);
    const Eigen::MatrixXd dense_a = a.to_dense();
    const auto i = static_cast<PageIndex>(uniform_index(rng, static_cast<std::uint64_t>(g.size())));
    const Eigen::VectorXd x = testing::random_simplex(g.size(), rng);
    const Eigen::MatrixXd oracle = testing::dense_single_link(dense_a, i);

    const auto a_i = build_distributed_link_matrix(a, i);
    CHECK((a_i.to_dense() - oracle).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::VectorXd y = apply_distributed_link(a, i, x);
    CHECK((y - oracle * x).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(y.sum() - 1.0) <= 1e-12);
    ++triples;
  }
}

TEST_CASE("local matrices are sparse and stochastic") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto a = build_link_matrix(testing::random_graph(seed, 3, 40, 0.15));
    const Eigen::MatrixXd dense_a = a.to_dense();
    for (PageIndex i = 0; i < a.size(); ++i) {
      const auto a_i = build_distributed_link_matrix(a, i);
      const auto report = a_i.check();
      CHECK(report.max_column_deviation <= 1e-12);
      CHECK(report.min_entry >= 0.0);
      CHECK(report.max_entry <= 1.0);
      const auto row_nnz = (dense_a.row(i).array() != 0).count();
      const auto col_nnz = (dense_a.col(i).array() != 0).count();
      CHECK(a_i.nonZeros() <= row_nnz + col_nnz + (a.size() - 1));
      // Only row i, column i and the diagonal are touched.
      const Eigen::MatrixXd d = a_i.to_dense();
      for (Eigen::Index r = 0; r < d.rows(); ++r) {
        for (Eigen::Index c = 0; c < d.cols(); ++c) {
          if (r != i && c != i && r != c) CHECK(d(r, c) == 0.0);
        }
      }
    }
  }
}

TEST_CASE("one step with the page forced to 0 on the 3-cycle") {
  const auto a = build_link_matrix(testing::three_cycle());
  const double w = alpha1(0.15, 3);
  DrpaSingleState<double> state(Pv::uniform(3), Philox(1, 0));
  drpa_single_step_at(state, a, w, 0);
  CHECK(state.k == 1);
  // 0.894737 (1/3, 2/3, 0) + 0.035088
  CHECK(std::abs(state.x[0] - ((1 - w) / 3 + w / 3)) < 1e-15);
  CHECK(std::abs(state.x[1] - ((1 - w) * 2 / 3 + w / 3)) < 1e-15);
  CHECK(std::abs(state.x[2] - w / 3) < 1e-15);
  CHECK(std::abs(state.x[1] - 0.631579) < 5e-7);
  CHECK(std::abs(state.x[2] - 0.035088) < 5e-7);
  // The first average is x_0 itself.
  CHECK((state.x_bar - Pv::uniform(3).values()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("x_bar is the exact mean of the iterates and both stay on the simplex") {
  const auto a = build_link_matrix(generate_random_graph(12, 0.3, 8));
  const double w = alpha1(0.15, a.size());
  DrpaSingleState<double> state(Pv::basis(a.size(), 3), Philox(2024, 0));
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(a.size());
  for (int step = 0; step < 100000; ++step) {
    sum += state.x;
    drpa_single_step(state, a, w);
    if (step % 997 == 0 || step == 99999) {
      CHECK(std::abs(state.x.sum() - 1.0) <= 1e-9);
      CHECK(std::abs(state.x_bar.sum() - 1.0) <= 1e-9);
      CHECK(state.x.minCoeff() >= -1e-12);
      CHECK((sum / static_cast<double>(state.k) - state.x_bar).lpNorm<1>() <= 1e-9);
    }
  }
}

TEST_CASE("page selection is uniform over the pages") {
  const auto a = build_link_matrix(generate_random_graph(5, 0.5, 2));
  DrpaSingleState<double> state(Pv::uniform(5), Philox(77, 0));
  std::array<int, 5> counts{};
  constexpr int kSteps = 50000;
  for (int s = 0; s < kSteps; ++s) ++counts[drpa_single_step(state, a, alpha1(0.15, 5))];
  double chi2 = 0;
  for (const int c : counts) chi2 += (c - kSteps / 5.0) * (c - kSteps / 5.0) / (kSteps / 5.0);
  CHECK(chi2 < 18.47);  // 0.999 quantile, 4 dof
}

TEST_CASE("expected single-page matrix matches the affine identity") {
  SUBCASE("3-cycle") {
    const auto a = build_link_matrix(testing::three_cycle());
    const auto m1 = expected_single_matrix(a, 0.15);
    CHECK(m1.residual <= 1e-12);
    for (Eigen::Index j = 0; j < 3; ++j) CHECK(std::abs(m1.matrix.col(j).sum() - 1.0) <= 1e-12);
    CHECK(m1.matrix.minCoeff() > 0.0);
  }
  SUBCASE("random graphs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto a = build_link_matrix(testing::random_graph(seed, 3, 50, 0.2));
      const auto m1 = expected_single_matrix(a, 0.15);
      CHECK(m1.residual <= 1e-12);
      CHECK(m1.matrix.minCoeff() > 0.0);
    }
  }
  SUBCASE("shares the top eigenvector with M") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto a = build_link_matrix(testing::random_graph(seed, 3, 40, 0.2));
      const auto x_star = pagerank_oracle(a, 0.15);
      const auto m1 = expected_single_matrix(a, 0.15);
      CHECK((m1.matrix * x_star.values() - x_star.values()).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
  SUBCASE("dense guard") {
    const auto a = build_link_matrix(generate_random_graph(20, 0.2, 1));
    CHECK_THROWS_AS(expected_single_matrix(a, 0.15, 10), Error);
  }
}

TEST_CASE("local matrix coincides bitwise with the multi-page matrix at a unit pattern") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = build_link_matrix(testing::random_graph(seed, 3, 30, 0.2));
    for (PageIndex i = 0; i < a.size(); ++i) {
      CHECK(build_distributed_link_matrix(a, i) ==
            build_multi_link_matrix(a, UpdatePattern::single(a.size(), i)));
    }
  }
}

TEST_CASE("single-page runs") {
  SUBCASE("deterministic per seed") {
    const auto g = generate_random_graph(10, 0.3, 1);
    const auto first = run_drpa_single(g, 0.15, 5000, 9);
    const auto second = run_drpa_single(g, 0.15, 5000, 9);
    CHECK(to_csv(first) == to_csv(second));
    CHECK(to_json(first) == to_json(second));
    CHECK(to_csv(first) != to_csv(run_drpa_single(g, 0.15, 5000, 10)));
  }
  SUBCASE("3-cycle average converges to the uniform vector") {
    const auto traj = run_drpa_single(testing::three_cycle(), 0.15, 100000, 5);
    CHECK(traj.samples.back().k == 100000);
    CHECK(traj.samples.back().err_l1 <= 0.05);
  }
  SUBCASE("geometric schedule and audit") {
    RunOptions options;
    options.audit = true;
    const auto traj = run_drpa_single(generate_random_graph(8, 0.4, 2), 0.15, 100, 3, options);
    std::vector<std::int64_t> ks;
    for (const auto& s : traj.samples) ks.push_back(s.k);
    CHECK(ks == std::vector<std::int64_t>{1, 2, 4, 8, 16, 32, 64, 100});
    CHECK_NOTHROW(traj.validate());
  }
}
