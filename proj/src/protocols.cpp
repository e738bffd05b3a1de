#include <cmath>

#include "drpr/drpa_multi.hpp"
#include "drpr/drpa_single.hpp"
#include "drpr/experiments.hpp"
#include "drpr/random.hpp"

namespace drpr {

std::shared_ptr<const RankProblem> OracleCache::get(const WebGraph& graph, double alpha,
                                                    DanglingPolicy policy) {
  Key key{to_edge_list(graph), alpha, policy};
  {
    std::lock_guard lock(mutex_);
    if (const auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  auto link = build_link_matrix<double>(graph, policy);
  auto oracle = pagerank_oracle(link, alpha);
  auto problem = std::make_shared<const RankProblem>(
      RankProblem{std::move(link), alpha, std::move(oracle)});
  std::lock_guard lock(mutex_);
  return entries_.emplace(std::move(key), std::move(problem)).first->second;
}

std::size_t OracleCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

OracleCache& default_oracle_cache() {
  static OracleCache cache;
  return cache;
}

namespace {

constexpr double kAuditTolerance = 1e-9;

// Records errors of the running average on the sample schedule and asserts
// (never enforces) simplex membership of both iterates.
class SampleRecorder {
 public:
  SampleRecorder(const RunOptions& options, std::int64_t steps, const Eigen::VectorXd& oracle,
                 bool check_simplex)
      : points_(options.schedule.points(steps)),
        oracle_(oracle),
        audit_(options.audit),
        check_simplex_(check_simplex),
        sum_(Eigen::VectorXd::Zero(oracle.size())),
        compensation_(Eigen::VectorXd::Zero(oracle.size())) {
    next_ = points_.begin();
  }

  /// Feeds the iterate that enters the running mean at this step.
  void accumulate(const Eigen::VectorXd& x_old) {
    if (!audit_) return;
    for (Eigen::Index i = 0; i < x_old.size(); ++i) {
      const double t = sum_[i] + x_old[i];
      if (std::abs(sum_[i]) >= std::abs(x_old[i])) {
        compensation_[i] += (sum_[i] - t) + x_old[i];
      } else {
        compensation_[i] += (x_old[i] - t) + sum_[i];
      }
      sum_[i] = t;
    }
  }

  void after_step(std::int64_t k, const Eigen::VectorXd& x, const Eigen::VectorXd& x_bar,
                  std::int64_t sigma, std::vector<TrajectorySample>& out) {
    if (next_ == points_.end() || *next_ != k) return;
    ++next_;
    if (check_simplex_) {
      require_simplex(x, "x", k);
      require_simplex(x_bar, "x_bar", k);
    }
    if (audit_) {
      const Eigen::VectorXd exact = (sum_ + compensation_) / static_cast<double>(k);
      const double drift = (exact - x_bar).lpNorm<1>();
      detail::require(drift <= kAuditTolerance, ErrorCode::AuditFailure,
                      "running average drifted " + format_double(drift) + " from the exact mean at k=" +
                          std::to_string(k));
    }
    const Eigen::VectorXd diff = x_bar - oracle_;
    out.push_back({k, diff.lpNorm<1>(), diff.norm(), sigma});
  }

 private:
  static void require_simplex(const Eigen::VectorXd& v, const char* name, std::int64_t k) {
    const double drift = std::abs(v.sum() - 1.0);
    detail::require(drift <= kSimplexSumTolerance && v.minCoeff() >= -kSimplexNegativeSlack,
                    ErrorCode::NotProbabilityVector,
                    std::string(name) + " left the simplex at k=" + std::to_string(k) +
                        " (sum drift " + format_double(drift) + ")");
  }

  std::vector<std::int64_t> points_;
  std::vector<std::int64_t>::const_iterator next_;
  const Eigen::VectorXd& oracle_;
  bool audit_;
  bool check_simplex_;
  Eigen::VectorXd sum_;
  Eigen::VectorXd compensation_;
};

TrajectoryMeta make_meta(const RunOptions& options, std::string protocol, double alpha,
                         std::optional<double> beta, std::uint64_t seed, std::int64_t steps) {
  TrajectoryMeta meta;
  meta.graph_source = options.graph_source;
  meta.protocol = std::move(protocol);
  meta.alpha = alpha;
  meta.beta = beta;
  meta.seed = seed;
  meta.steps = steps;
  meta.schedule = options.schedule.to_string();
  return meta;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

RankVector initial_vector(const RunOptions& options, PageIndex n) {
  if (!options.x0) return RankVector::uniform(n);
  detail::require(options.x0->size() == n, ErrorCode::DimensionMismatch,
                  "initial vector length differs from page count");
  return *options.x0;
}

}  // namespace

Trajectory run_drpa_single(const WebGraph& graph, double alpha, std::int64_t steps,
                           std::uint64_t seed, const RunOptions& options) {
  detail::require(steps >= 1, ErrorCode::InvalidArgument, "steps must be at least 1");
  const auto problem = default_oracle_cache().get(graph, alpha, options.policy);
  const LinkMatrix& a = problem->link;
  const double weight = alpha1(alpha, a.size());

  Trajectory traj;
  traj.meta = make_meta(options, "single", alpha, std::nullopt, seed, steps);
  SampleRecorder recorder(options, steps, problem->oracle.values(), true);
  DrpaSingleState<double> state(initial_vector(options, a.size()), Philox(seed, 0));
  while (state.k < steps) {
    recorder.accumulate(state.x);
    drpa_single_step(state, a, weight);
    if (options.observer) options.observer(state.k, state.x, state.x_bar);
    recorder.after_step(state.k, state.x, state.x_bar, 0, traj.samples);
  }
  traj.final_x_bar = to_std(state.x_bar);
  return traj;
}

Trajectory run_drpa_multi(const WebGraph& graph, double alpha, double beta, std::int64_t steps,
                          std::uint64_t seed, const RunOptions& options) {
  detail::require(steps >= 1, ErrorCode::InvalidArgument, "steps must be at least 1");
  detail::require_beta(beta);
  const auto problem = default_oracle_cache().get(graph, alpha, options.policy);
  const LinkMatrix& a = problem->link;
  const double weight = alpha2(alpha, beta);

  Trajectory traj;
  traj.meta = make_meta(options, "multi", alpha, beta, seed, steps);
  SampleRecorder recorder(options, steps, problem->oracle.values(), true);
  DrpaMultiState<double> state(initial_vector(options, a.size()), Philox(seed, 0));
  while (state.k < steps) {
    recorder.accumulate(state.x);
    drpa_multi_step(state, a, weight, beta);
    if (options.observer) options.observer(state.k, state.x, state.x_bar);
    recorder.after_step(state.k, state.x, state.x_bar, 0, traj.samples);
  }
  traj.final_x_bar = to_std(state.x_bar);
  return traj;
}

Trajectory drpa_as_saawet(const WebGraph& graph, double alpha, std::int64_t steps,
                          std::uint64_t seed, double m0, const RunOptions& options) {
  detail::require(steps >= 1, ErrorCode::InvalidArgument, "steps must be at least 1");
  const auto problem = default_oracle_cache().get(graph, alpha, options.policy);
  const LinkMatrix& a = problem->link;
  const double weight = alpha1(alpha, a.size());
  const RankVector x0 = initial_vector(options, a.size());

  SaawetConfig<double> config;
  config.gains = harmonic_gain<double>();
  config.bounds = geometric_bounds<double>(m0);
  config.initial = x0.values();
  config.first_index = 0;

  Trajectory traj;
  traj.meta = make_meta(options, "single-saawet", alpha, std::nullopt, seed, steps);
  // Simplex checks and the audit apply only for M0 >= 2, where no reset occurs.
  RunOptions recorder_options = options;
  recorder_options.audit = options.audit && m0 >= 2.0;
  SampleRecorder recorder(recorder_options, steps, problem->oracle.values(), m0 >= 2.0);

  // The protocol state generates x_{1,k}; its own average is ignored.
  DrpaSingleState<double> protocol(x0, Philox(seed, 0));
  SaawetState<double> engine = saawet_initial_state(config);
  while (engine.steps < steps) {
    recorder.accumulate(protocol.x);
    const Eigen::VectorXd observation = protocol.x - engine.z;
    saawet_step(engine, observation, config.gains(engine.k), config);
    drpa_single_step(protocol, a, weight);
    if (options.observer) options.observer(engine.steps, protocol.x, engine.z);
    recorder.after_step(engine.steps, protocol.x, engine.z, engine.sigma, traj.samples);
  }
  traj.final_x_bar = to_std(engine.z);
  return traj;
}

ToySaawetResult run_toy_saawet(std::int64_t steps, std::uint64_t seed,
                               const ToySaawetOptions& options) {
  SaawetConfig<double> config;
  config.gains = harmonic_gain<double>();
  config.bounds = geometric_bounds<double>(options.m0);
  config.initial = Eigen::VectorXd::Constant(1, options.initial);
  config.first_index = options.first_index;

  Philox rng(seed, 0);
  const double root = options.root;
  const double noise = options.noise;
  ObservationSource<double> observe = [&](const Eigen::VectorXd& z, std::int64_t) {
    const double eps = noise * (2.0 * uniform01(rng) - 1.0);
    return Eigen::VectorXd::Constant(1, -(z[0] - root) + eps);
  };

  const auto points = options.schedule.points(steps);
  ToySaawetResult result{run_saawet(observe, config, steps, points), {}};

  auto& traj = result.trajectory;
  traj.meta.graph_source = "toy-linear";
  traj.meta.protocol = "saawet-toy";
  traj.meta.alpha = 0;
  traj.meta.seed = seed;
  traj.meta.steps = steps;
  traj.meta.schedule = options.schedule.to_string();
  for (const auto& sample : result.run.samples) {
    const double err = std::abs(sample.z[0] - root);
    traj.samples.push_back({sample.step, err, err, sample.sigma});
  }
  traj.final_x_bar = to_std(result.run.final_state.z);
  return result;
}

}  // namespace drpr
