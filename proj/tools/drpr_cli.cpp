// drpr: command-line harness for the distributed randomized PageRank lab.
//
// Exit codes: 0 success, 1 check failure, 2 usage error, 3 I/O error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "drpr/centralized.hpp"
#include "drpr/experiments.hpp"
#include "drpr/graph.hpp"
#include "drpr/trajectory.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

constexpr double kMonteCarloZBand = 5.0;
constexpr double kRateBandLow = -0.65;
constexpr double kRateBandHigh = -0.35;

int exit_code_for(drpr::ErrorCode code) {
  using drpr::ErrorCode;
  switch (code) {
    case ErrorCode::IoError:
      return kExitIo;
    case ErrorCode::InvalidAlpha:
    case ErrorCode::InvalidBeta:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidProbability:
    case ErrorCode::MalformedLine:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::TooFewPages:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::DenseLimitExceeded:
    case ErrorCode::EnumerationLimitExceeded:
      return kExitUsage;
    default:
      return kExitCheckFailed;
  }
}

// Writes `text` to `path` when given, and always echoes it to stdout.
void emit(const std::string& text, const std::string& path) {
  std::cout << text;
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    throw drpr::Error(drpr::ErrorCode::IoError, "cannot write '" + path + "'");
  }
}

std::string vector_json(const Eigen::VectorXd& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size())).dump() + "\n";
}

struct Common {
  std::string graph;
  double alpha = 0.15;
  std::string dangling = "uniform";
  std::string out;
};

void add_graph_options(CLI::App* cmd, Common& common) {
  cmd->add_option("--graph", common.graph, "edge-list file")->required();
  cmd->add_option("--alpha", common.alpha, "teleport weight in (0, 1)")->capture_default_str();
  cmd->add_option("--dangling", common.dangling, "uniform|selfloop|reject")
      ->check(CLI::IsMember({"uniform", "selfloop", "reject"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed randomized PageRank laboratory"};
  app.require_subcommand(1);

  // gen
  std::int64_t gen_n = 0;
  double gen_prob = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "write a seeded random graph as an edge list");
  gen->add_option("--n", gen_n, "page count (> 2)")->required();
  gen->add_option("--edge-prob", gen_prob, "edge probability in (0, 1]")->required();
  gen->add_option("--seed", gen_seed, "generator seed")->required();
  gen->add_option("--out", gen_out, "output path")->required();

  // rank
  Common rank_opts;
  double rank_tol = drpr::kOracleTolerance;
  auto* rank = app.add_subcommand("rank", "reference PageRank by power iteration, JSON vector");
  add_graph_options(rank, rank_opts);
  rank->add_option("--tol", rank_tol, "L1 step tolerance")->capture_default_str();
  rank->add_option("--out", rank_opts.out, "output path")->required();

  // single / multi
  Common run_opts;
  std::int64_t run_steps = 0;
  std::uint64_t run_seed = 0;
  std::string run_schedule = "geometric";
  std::string run_format = "csv";
  double run_beta = 0.5;
  auto add_run_options = [&](CLI::App* cmd) {
    add_graph_options(cmd, run_opts);
    cmd->add_option("--steps", run_steps, "protocol steps")->required();
    cmd->add_option("--seed", run_seed, "generator seed")->required();
    cmd->add_option("--schedule", run_schedule, "geometric | log:<per-decade> | every:<stride>")
        ->capture_default_str();
    cmd->add_option("--format", run_format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", run_opts.out, "output path")->required();
  };
  auto* single = app.add_subcommand("single", "single-page randomized protocol run");
  add_run_options(single);
  auto* multi = app.add_subcommand("multi", "multi-page randomized protocol run");
  add_run_options(multi);
  multi->add_option("--beta", run_beta, "update probability in (0, 1]")->required();

  // verify
  Common verify_opts;
  double verify_beta = 0.5;
  auto* verify = app.add_subcommand("verify", "exact matrix identity suite");
  add_graph_options(verify, verify_opts);
  verify->add_option("--beta", verify_beta, "update probability")->capture_default_str();
  verify->add_option("--out", verify_opts.out, "also write the report here");

  // mc-mean
  Common mc_opts;
  std::int64_t mc_k = 0;
  std::int64_t mc_runs = 0;
  std::uint64_t mc_seed = 0;
  std::string mc_protocol = "single";
  double mc_beta = 0.5;
  auto* mc = app.add_subcommand("mc-mean", "Monte Carlo mean of x_k against the expected dynamics");
  add_graph_options(mc, mc_opts);
  mc->add_option("--k", mc_k, "step index (<= 20)")->required();
  mc->add_option("--runs", mc_runs, "independent runs (>= 100)")->required();
  mc->add_option("--seed", mc_seed, "base seed")->required();
  mc->add_option("--protocol", mc_protocol, "single|multi")
      ->check(CLI::IsMember({"single", "multi"}))
      ->capture_default_str();
  mc->add_option("--beta", mc_beta, "update probability for multi")->capture_default_str();
  mc->add_option("--out", mc_opts.out, "also write the report here");

  // rate
  std::string rate_traj;
  std::int64_t rate_kmin = 10000;
  std::int64_t rate_kmax = 1000000;
  std::string rate_out;
  auto* rate = app.add_subcommand("rate", "log-log slope of the L1 error in a trajectory");
  rate->add_option("--traj", rate_traj, "trajectory file (csv or json)")->required();
  rate->add_option("--kmin", rate_kmin)->capture_default_str();
  rate->add_option("--kmax", rate_kmax)->capture_default_str();
  rate->add_option("--out", rate_out, "also write the report here");

  // saawet-demo
  std::int64_t demo_steps = 0;
  std::uint64_t demo_seed = 0;
  double demo_z0 = 100.0;
  std::string demo_out;
  std::string demo_format = "csv";
  auto* demo = app.add_subcommand("saawet-demo", "toy linear root finding with expanding truncations");
  demo->add_option("--steps", demo_steps, "updates")->required();
  demo->add_option("--seed", demo_seed, "noise seed")->required();
  demo->add_option("--z0", demo_z0, "initial iterate")->capture_default_str();
  demo->add_option("--format", demo_format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  demo->add_option("--out", demo_out, "trajectory output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      drpr::write_edge_list(drpr::generate_random_graph(gen_n, gen_prob, gen_seed), gen_out);
      return kExitOk;
    }

    if (rank->parsed()) {
      const auto graph = drpr::read_edge_list(rank_opts.graph);
      const auto link =
          drpr::build_link_matrix<double>(graph, drpr::parse_dangling_policy(rank_opts.dangling));
      const auto result = drpr::power_method(link, rank_opts.alpha,
                                             drpr::RankVector::uniform(link.size()), rank_tol);
      std::ofstream out(rank_opts.out, std::ios::binary);
      if (!out || !(out << vector_json(result.x.values()))) {
        throw drpr::Error(drpr::ErrorCode::IoError, "cannot write '" + rank_opts.out + "'");
      }
      return kExitOk;
    }

    if (single->parsed() || multi->parsed()) {
      const auto graph = drpr::read_edge_list(run_opts.graph);
      drpr::RunOptions options;
      options.schedule = drpr::SampleSchedule::parse(run_schedule);
      options.policy = drpr::parse_dangling_policy(run_opts.dangling);
      options.graph_source = run_opts.graph;
      const auto traj =
          single->parsed()
              ? drpr::run_drpa_single(graph, run_opts.alpha, run_steps, run_seed, options)
              : drpr::run_drpa_multi(graph, run_opts.alpha, run_beta, run_steps, run_seed,
                                     options);
      drpr::write_trajectory(traj, drpr::parse_trajectory_format(run_format), run_opts.out);
      return kExitOk;
    }

    if (verify->parsed()) {
      const auto graph = drpr::read_edge_list(verify_opts.graph);
      const auto report = drpr::verify_suite(graph, verify_opts.alpha, verify_beta,
                                             drpr::parse_dangling_policy(verify_opts.dangling));
      emit(report.to_text(), verify_opts.out);
      return report.passed() ? kExitOk : kExitCheckFailed;
    }

    if (mc->parsed()) {
      const auto graph = drpr::read_edge_list(mc_opts.graph);
      drpr::MonteCarloOptions options;
      options.policy = drpr::parse_dangling_policy(mc_opts.dangling);
      const auto protocol =
          mc_protocol == "single" ? drpr::Protocol::single() : drpr::Protocol::multi(mc_beta);
      const auto result =
          drpr::monte_carlo_mean(graph, mc_opts.alpha, mc_k, mc_runs, mc_seed, protocol, options);
      std::ostringstream text;
      text << "protocol=" << mc_protocol;
      if (protocol.kind == drpr::Protocol::Kind::Multi) text << " beta=" << drpr::format_double(mc_beta);
      text << " alpha=" << drpr::format_double(mc_opts.alpha) << " k=" << mc_k
           << " runs=" << mc_runs << " seed=" << mc_seed << '\n';
      text << "page,mean,predicted,std_error\n";
      for (Eigen::Index i = 0; i < result.mean.size(); ++i) {
        text << i << ',' << drpr::format_double(result.mean[i]) << ','
             << drpr::format_double(result.predicted[i]) << ','
             << drpr::format_double(result.std_error[i]) << '\n';
      }
      const bool ok = result.max_z_score <= kMonteCarloZBand;
      text << "max_z_score=" << drpr::format_double(result.max_z_score) << " band<="
           << drpr::format_double(kMonteCarloZBand) << ' ' << (ok ? "PASS" : "FAIL") << '\n';
      text << "note: the z-score band is an engineering calibration, not a published value\n";
      emit(text.str(), mc_opts.out);
      return ok ? kExitOk : kExitCheckFailed;
    }

    if (rate->parsed()) {
      const auto traj = drpr::read_trajectory(rate_traj);
      const auto fit = drpr::estimate_rate(traj, rate_kmin, rate_kmax);
      const bool in_band = fit.slope >= kRateBandLow && fit.slope <= kRateBandHigh;
      std::ostringstream text;
      text << "slope=" << drpr::format_double(fit.slope) << '\n'
           << "intercept=" << drpr::format_double(fit.intercept) << '\n'
           << "r_squared=" << drpr::format_double(fit.r_squared) << '\n'
           << "k_range=" << fit.k_min << ',' << fit.k_max << '\n'
           << "points=" << fit.points << '\n'
           << "excluded_zero=" << fit.excluded_zero << '\n'
           << "band=[" << drpr::format_double(kRateBandLow) << ','
           << drpr::format_double(kRateBandHigh) << "] " << (in_band ? "inside" : "outside")
           << " (engineering calibration)\n";
      if (fit.excluded_zero > 0) {
        std::cerr << "warning: " << fit.excluded_zero << " zero-error samples excluded\n";
      }
      emit(text.str(), rate_out);
      return kExitOk;
    }

    if (demo->parsed()) {
      drpr::ToySaawetOptions options;
      options.initial = demo_z0;
      const auto result = drpr::run_toy_saawet(demo_steps, demo_seed, options);
      const auto& state = result.run.final_state;
      std::cout << "z=" << drpr::format_double(state.z[0]) << " root="
                << drpr::format_double(options.root) << " truncations=" << state.sigma
                << " last_truncation_step=" << state.last_truncation << '\n';
      if (!demo_out.empty()) {
        drpr::write_trajectory(result.trajectory, drpr::parse_trajectory_format(demo_format),
                               demo_out);
      }
      return kExitOk;
    }
  } catch (const drpr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitUsage;
}
