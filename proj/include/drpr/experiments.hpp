#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "drpr/centralized.hpp"
#include "drpr/drpa_multi.hpp"
#include "drpr/graph.hpp"
#include "drpr/saawet.hpp"
#include "drpr/schedule.hpp"
#include "drpr/stochastic.hpp"
#include "drpr/trajectory.hpp"

namespace drpr {

using LinkMatrix = ColumnStochasticMatrix<double>;
using RankVector = ProbabilityVector<double>;

#ifdef NDEBUG
inline constexpr bool kAuditDefault = false;
#else
inline constexpr bool kAuditDefault = true;
#endif

/// Link matrix plus reference PageRank for one (graph, alpha, policy).
struct RankProblem {
  LinkMatrix link;
  double alpha;
  RankVector oracle;
};

/// Memoizes reference PageRank vectors; safe for concurrent use.
class OracleCache {
 public:
  std::shared_ptr<const RankProblem> get(const WebGraph& graph, double alpha,
                                         DanglingPolicy policy = DanglingPolicy::Uniform);
  std::size_t size() const;

 private:
  using Key = std::tuple<std::string, double, DanglingPolicy>;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const RankProblem>> entries_;
};

OracleCache& default_oracle_cache();

/// Called after every protocol step with (k, x_k, x_bar_k).
using StepObserver =
    std::function<void(std::int64_t k, const Eigen::VectorXd& x, const Eigen::VectorXd& x_bar)>;

struct RunOptions {
  SampleSchedule schedule = SampleSchedule::geometric();
  DanglingPolicy policy = DanglingPolicy::Uniform;
  std::optional<RankVector> x0;  // uniform when unset
  std::string graph_source;
  /// Track the running mean with compensated summation and compare it to
  /// the recursive average at every sample.
  bool audit = kAuditDefault;
  StepObserver observer;
};

/// Single-page protocol: one uniformly chosen page updates per step.
Trajectory run_drpa_single(const WebGraph& graph, double alpha, std::int64_t steps,
                           std::uint64_t seed, const RunOptions& options = {});

/// Multi-page protocol: each page updates with probability beta per step.
Trajectory run_drpa_multi(const WebGraph& graph, double alpha, double beta, std::int64_t steps,
                          std::uint64_t seed, const RunOptions& options = {});

/// The single-page averaging recursion driven through the generic
/// truncation engine with g(x_bar) = -(x_bar - x*), observation x - x_bar
/// and gain 1/(k+1). The observer receives the engine iterate as x_bar.
Trajectory drpa_as_saawet(const WebGraph& graph, double alpha, std::int64_t steps,
                          std::uint64_t seed, double m0 = 2.0, const RunOptions& options = {});

/// Toy root finding: g(z) = -(z - root) observed with iid noise uniform on
/// [-noise, noise].
struct ToySaawetOptions {
  double root = 3.0;
  double initial = 0.0;
  double noise = 1.0;
  double m0 = 10.0;
  std::int64_t first_index = 1;
  SampleSchedule schedule = SampleSchedule::geometric();
};

struct ToySaawetResult {
  SaawetRun<double> run;
  Trajectory trajectory;  // err = |z - root|
};

ToySaawetResult run_toy_saawet(std::int64_t steps, std::uint64_t seed,
                               const ToySaawetOptions& options = {});

struct Protocol {
  enum class Kind { Single, Multi };
  Kind kind = Kind::Single;
  double beta = 0.5;

  static Protocol single() { return {}; }
  static Protocol multi(double beta) { return {Kind::Multi, beta}; }
};

struct MonteCarloOptions {
  std::optional<RankVector> x0;
  PageIndex dense_limit = kDefaultDenseLimit;
  DanglingPolicy policy = DanglingPolicy::Uniform;
  unsigned workers = 0;  // 0 picks hardware concurrency
};

struct MonteCarloResult {
  Eigen::VectorXd mean;
  Eigen::VectorXd predicted;  // M1^k x0 or M2^k x0
  Eigen::VectorXd std_error;
  double max_z_score = 0;
};

inline constexpr std::int64_t kMonteCarloMaxK = 20;
inline constexpr std::int64_t kMonteCarloMinRuns = 100;

/// Averages x_k over `runs` independent streams (stream r of base_seed for
/// run r) and compares with the expected-matrix prediction.
MonteCarloResult monte_carlo_mean(const WebGraph& graph, double alpha, std::int64_t k,
                                  std::int64_t runs, std::uint64_t base_seed, Protocol protocol,
                                  const MonteCarloOptions& options = {});

struct CheckResult {
  std::string name;
  double residual = 0;
  double tolerance = 0;
  bool passed = false;
  bool skipped = false;
  std::string note;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::vector<std::string> notices;

  bool passed() const;
  std::string to_text() const;
};

inline constexpr double kIdentityTolerance = 1e-12;
inline constexpr double kEigenvectorTolerance = 1e-10;
inline constexpr PageIndex kPatternSweepLimit = 8;

struct VerifyOptions {
  PageIndex dense_limit = kDefaultDenseLimit;
  PageIndex enumeration_limit = kEnumerationLimit;
};

/// Runs every exact matrix identity on A; failures become report entries.
VerifyReport verify_suite(const LinkMatrix& link, double alpha, double beta,
                          const VerifyOptions& options = {});
VerifyReport verify_suite(const WebGraph& graph, double alpha, double beta,
                          DanglingPolicy policy = DanglingPolicy::Uniform,
                          const VerifyOptions& options = {});

}  // namespace drpr
