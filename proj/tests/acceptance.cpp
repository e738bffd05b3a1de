// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.
//
//   drpr_acceptance --cli <path to drpr> --workdir <scratch dir>

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "drpr/centralized.hpp"
#include "drpr/drpa_multi.hpp"
#include "drpr/drpa_single.hpp"
#include "drpr/experiments.hpp"

using namespace drpr;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string num(double v) { return format_double(v); }

/// Graph with n drawn from [lo, hi] by a side stream of `seed`.
WebGraph sized_graph(std::uint64_t seed, PageIndex lo, PageIndex hi, double edge_prob) {
  Philox rng(seed, 99);
  const auto n = lo + static_cast<PageIndex>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
  return generate_random_graph(n, edge_prob, seed);
}

Outcome single_identity() {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = build_link_matrix(sized_graph(seed, 3, 50, 0.2));
    for (const double alpha : {0.1, 0.15, 0.5}) {
      worst = std::max(worst, expected_single_matrix(a, alpha).residual);
    }
  }
  return {worst <= 1e-12, "20 graphs x 3 alphas, max residual=" + num(worst)};
}

Outcome multi_identity() {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = build_link_matrix(sized_graph(seed, 3, 8, 0.3));
    for (const double beta : {0.1, 0.5, 1.0}) {
      worst = std::max(worst, expected_multi_matrix(a, 0.15, beta).residual);
    }
  }
  return {worst <= 1e-12, "10 graphs x 3 betas, max residual=" + num(worst)};
}

bool stochastic_ok(const StochasticityReport<double>& r, double& worst) {
  worst = std::max(worst, r.max_column_deviation);
  return r.passes(1e-12) && r.min_entry >= 0.0 && r.max_entry <= 1.0;
}

Outcome stochasticity() {
  bool ok = true;
  double worst = 0;
  std::int64_t local = 0;
  std::int64_t patterns = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto a = build_link_matrix(sized_graph(seed, 3, 50, 0.2));
    for (PageIndex i = 0; i < a.size(); ++i, ++local) {
      ok = stochastic_ok(build_distributed_link_matrix(a, i).check(), worst) && ok;
    }
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = build_link_matrix(sized_graph(seed, 3, 8, 0.3));
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << a.size()); ++mask, ++patterns) {
      ok = stochastic_ok(build_multi_link_matrix(a, UpdatePattern::from_mask(a.size(), mask)).check(),
                         worst) && ok;
    }
  }
  return {ok, std::to_string(local) + " A_i and " + std::to_string(patterns) +
                  " A_p, max column deviation=" + num(worst)};
}

Outcome single_multi_consistency() {
  std::int64_t mismatches = 0;
  std::int64_t compared = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = build_link_matrix(sized_graph(seed, 3, 30, 0.2));
    for (PageIndex i = 0; i < a.size(); ++i, ++compared) {
      if (!(build_distributed_link_matrix(a, i) ==
            build_multi_link_matrix(a, UpdatePattern::single(a.size(), i)))) {
        ++mismatches;
      }
    }
  }
  return {mismatches == 0, std::to_string(compared) + " pages compared bitwise, " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome power_contraction() {
  double worst_excess = -1;
  double worst_residual = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = build_link_matrix(sized_graph(seed, 3, 50, 0.2));
    const double alpha = 0.15;
    const auto x_star = pagerank_oracle(a, alpha).values();
    worst_residual = std::max(worst_residual, (apply_google(a, alpha, x_star) - x_star).lpNorm<1>());
    Eigen::VectorXd x = RankVector::basis(a.size(), 0).values();
    double error = (x - x_star).lpNorm<1>();
    while (error > 1e-10) {
      x = apply_google(a, alpha, x);
      const double next = (x - x_star).lpNorm<1>();
      worst_excess = std::max(worst_excess, next / error - (1 - alpha));
      error = next;
    }
  }
  return {worst_excess <= 1e-9 && worst_residual <= 1e-12,
          "max ratio - (1-alpha)=" + num(worst_excess) + ", max |Mx*-x*|_1=" + num(worst_residual)};
}

Outcome degenerate_multi() {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = sized_graph(seed, 3, 40, 0.2);
    const auto a = build_link_matrix(g);
    Eigen::VectorXd power = RankVector::uniform(a.size()).values();
    RunOptions options;
    options.observer = [&](std::int64_t, const Eigen::VectorXd& x, const Eigen::VectorXd&) {
      power = apply_google(a, 0.15, power);
      worst = std::max(worst, (x - power).cwiseAbs().maxCoeff());
    };
    run_drpa_multi(g, 0.15, 1.0, 1000, seed, options);
  }
  return {worst <= 1e-12, "beta=1, 5 graphs x 1000 steps, max entry gap=" + num(worst)};
}

Outcome mean_dynamics() {
  double worst = 0;
  const WebGraph graphs[] = {parse_edge_list("0 1\n1 2\n2 0\n"), generate_random_graph(10, 0.3, 7)};
  std::uint64_t seed = 100;
  for (const auto& g : graphs) {
    for (const std::int64_t k : {1, 5, 10}) {
      worst = std::max(worst, monte_carlo_mean(g, 0.15, k, 10000, seed++, Protocol::single()).max_z_score);
    }
  }
  return {worst <= 5.0, "3-cycle and n=10, k in {1,5,10}, 1e4 runs, max z=" + num(worst)};
}

constexpr std::int64_t kLongRun = 1000000;
constexpr std::int64_t kEarly = 10000;
constexpr std::uint64_t kRateGraphSeed = 2024;

WebGraph rate_graph() { return generate_random_graph(20, 0.2, kRateGraphSeed); }

RunOptions rate_options() {
  RunOptions options;
  options.schedule = SampleSchedule::log_spaced(20);
  options.audit = false;
  return options;
}

double error_at(const Trajectory& traj, std::int64_t k) {
  for (const auto& s : traj.samples) {
    if (s.k == k) return s.err_l1;
  }
  throw Error(ErrorCode::InvalidArgument, "no sample at k=" + std::to_string(k));
}

struct LongRuns {
  std::vector<Trajectory> single;
  std::vector<Trajectory> multi;
};

const LongRuns& long_runs() {
  static const LongRuns runs = [] {
    LongRuns out;
    const auto g = rate_graph();
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      out.single.push_back(run_drpa_single(g, 0.15, kLongRun, seed, rate_options()));
      out.multi.push_back(run_drpa_multi(g, 0.15, 0.5, kLongRun, seed, rate_options()));
    }
    return out;
  }();
  return runs;
}

Outcome almost_sure_proxy() {
  int good = 0;
  std::ostringstream detail;
  detail << "errors at 1e4 -> 1e6:";
  for (const auto& traj : long_runs().single) {
    const double early = error_at(traj, kEarly);
    const double late = error_at(traj, kLongRun);
    if (late <= 0.05 && late < early / 3.0) ++good;
    detail << ' ' << num(early) << "->" << num(late);
  }
  return {good >= 9, std::to_string(good) + "/10 seeds pass; " + detail.str()};
}

Outcome rate_band() {
  auto count = [](const std::vector<Trajectory>& runs, std::ostringstream& detail) {
    int inside = 0;
    for (const auto& traj : runs) {
      const double slope = estimate_rate(traj, kEarly, kLongRun).slope;
      if (slope >= -0.65 && slope <= -0.35) ++inside;
      detail << ' ' << num(std::round(slope * 1000) / 1000);
    }
    return inside;
  };
  std::ostringstream single_detail;
  std::ostringstream multi_detail;
  const int single_inside = count(long_runs().single, single_detail);
  const int multi_inside = count(long_runs().multi, multi_detail);
  return {single_inside >= 7 && multi_inside >= 7,
          "single " + std::to_string(single_inside) + "/10 in band (slopes" + single_detail.str() +
              "); multi beta=0.5 " + std::to_string(multi_inside) + "/10 (slopes" +
              multi_detail.str() + ")"};
}

Outcome saawet_engine() {
  const auto toy = run_toy_saawet(kLongRun, 1);
  const double toy_err = std::abs(toy.run.final_state.z[0] - 3.0);

  ToySaawetOptions far;
  far.initial = 100.0;
  const auto far_run = run_toy_saawet(kLongRun, 2, far);
  const auto& samples = far_run.trajectory.samples;
  const bool settled = far_run.run.final_state.sigma >= 1 &&
                       far_run.run.final_state.last_truncation <= kLongRun / 100 &&
                       samples[samples.size() / 2].sigma == samples.back().sigma;

  const auto g = generate_random_graph(20, 0.2, 5);
  std::vector<Eigen::VectorXd> direct;
  std::vector<Eigen::VectorXd> engine;
  RunOptions direct_options;
  direct_options.observer = [&](std::int64_t, const Eigen::VectorXd&, const Eigen::VectorXd& x_bar) {
    direct.push_back(x_bar);
  };
  RunOptions engine_options;
  engine_options.observer = [&](std::int64_t, const Eigen::VectorXd&, const Eigen::VectorXd& z) {
    engine.push_back(z);
  };
  constexpr std::int64_t kSteps = 100000;
  run_drpa_single(g, 0.15, kSteps, 3, direct_options);
  const auto wrapped = drpa_as_saawet(g, 0.15, kSteps, 3, 2.0, engine_options);
  double gap = direct.size() == engine.size() ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < std::min(direct.size(), engine.size()); ++i) {
    gap = std::max(gap, (direct[i] - engine[i]).cwiseAbs().maxCoeff());
  }
  const auto truncations = wrapped.samples.back().sigma;

  return {toy_err <= 0.01 && settled && truncations == 0 && gap <= 1e-12,
          "toy |z-3|=" + num(toy_err) + "; z0=100 truncations=" +
              std::to_string(far_run.run.final_state.sigma) + " last at step " +
              std::to_string(far_run.run.final_state.last_truncation) +
              "; M0=2 truncations=" + std::to_string(truncations) + ", max gap=" + num(gap)};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Outcome cli_reproducible(const std::string& cli, const fs::path& workdir) {
  if (cli.empty()) return {false, "no --cli given"};
  fs::create_directories(workdir);
  const std::string graph = (workdir / "graph.txt").string();
  const std::string q = "'";

  struct Command {
    std::string name;
    std::string args;  // "{out}" is replaced by the per-invocation output path
    bool stdout_is_output;
  };
  const std::vector<Command> commands = {
      {"gen", "gen --n 20 --edge-prob 0.2 --seed 7 --out {out}", false},
      {"rank", "rank --graph " + q + graph + q + " --out {out}", false},
      {"single", "single --graph " + q + graph + q + " --steps 20000 --seed 3 --out {out}", false},
      {"single-json",
       "single --graph " + q + graph + q + " --steps 20000 --seed 3 --format json --out {out}", false},
      {"multi", "multi --graph " + q + graph + q + " --beta 0.5 --steps 20000 --seed 3 --out {out}", false},
      {"verify", "verify --graph " + q + graph + q + " --out {out}", true},
      {"mc-mean", "mc-mean --graph " + q + graph + q + " --k 5 --runs 500 --seed 9 --out {out}", true},
      {"rate", "rate --traj " + q + (workdir / "rate_input.csv").string() + q +
                   " --kmin 100 --kmax 20000 --out {out}", true},
      {"saawet-demo", "saawet-demo --steps 20000 --seed 4 --z0 100 --out {out}", true},
  };

  // Shared inputs.
  if (std::system((q + cli + q + " gen --n 20 --edge-prob 0.2 --seed 7 --out " + q + graph + q).c_str()) != 0 ||
      std::system((q + cli + q + " single --graph " + q + graph + q +
                   " --steps 20000 --seed 3 --schedule log:10 --out " + q +
                   (workdir / "rate_input.csv").string() + q + " > /dev/null").c_str()) != 0) {
    return {false, "could not prepare inputs"};
  }

  std::vector<std::string> failures;
  for (const auto& cmd : commands) {
    std::string files[2];
    std::string outputs[2];
    bool ran = true;
    for (int run = 0; run < 2; ++run) {
      const auto out = workdir / (cmd.name + "." + std::to_string(run) + ".out");
      const auto console = workdir / (cmd.name + "." + std::to_string(run) + ".stdout");
      std::string args = cmd.args;
      args.replace(args.find("{out}"), 5, q + out.string() + q);
      const int status = std::system((q + cli + q + " " + args + " > " + q + console.string() + q).c_str());
      ran = ran && status == 0;
      files[run] = slurp(out);
      outputs[run] = slurp(console);
    }
    if (!ran || files[0].empty() || files[0] != files[1] ||
        (cmd.stdout_is_output && outputs[0] != outputs[1])) {
      failures.push_back(cmd.name);
    }
  }
  std::string detail = std::to_string(commands.size() - failures.size()) + "/" +
                       std::to_string(commands.size()) + " invocations byte-identical";
  for (const auto& f : failures) detail += "; differs or failed: " + f;
  return {failures.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drpr acceptance suite"};
  std::string cli;
  std::string workdir = (fs::temp_directory_path() / "drpr_acceptance").string();
  app.add_option("--cli", cli, "path to the drpr executable");
  app.add_option("--workdir", workdir, "scratch directory for CLI outputs");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"expected single-page matrix identity", single_identity},
      {"expected multi-page matrix identity", multi_identity},
      {"local link matrices are stochastic", stochasticity},
      {"unit-pattern multi-page matrix equals single-page matrix", single_multi_consistency},
      {"power method contraction and oracle residual", power_contraction},
      {"beta=1 multi-page run equals power iteration", degenerate_multi},
      {"Monte Carlo mean follows the expected dynamics", mean_dynamics},
      {"running average converges on 10 seeds", almost_sure_proxy},
      {"error decay slope in [-0.65, -0.35]", rate_band},
      {"truncated stochastic approximation engine", saawet_engine},
      {"CLI outputs are reproducible", [&] { return cli_reproducible(cli, workdir); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += outcome.passed ? 0 : 1;
    std::cout << (outcome.passed ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first
              << "  (" << outcome.detail << "; " << num(std::round(seconds * 10) / 10) << "s)"
              << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria FAILED")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
