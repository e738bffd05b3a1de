#include <cmath>
#include <sstream>

#include "drpr/drpa_multi.hpp"
#include "drpr/drpa_single.hpp"
#include "drpr/experiments.hpp"

namespace drpr {

namespace {

CheckResult make_check(std::string name, double residual, double tolerance, bool extra = true) {
  CheckResult check;
  check.name = std::move(name);
  check.residual = residual;
  check.tolerance = tolerance;
  check.passed = extra && residual <= tolerance;
  return check;
}

CheckResult skipped_check(std::string name, std::string note) {
  CheckResult check;
  check.name = std::move(name);
  check.skipped = true;
  check.passed = true;
  check.note = std::move(note);
  return check;
}

CheckResult stochastic_check(std::string name, const StochasticityReport<double>& report,
                             bool require_positive = false) {
  const bool entries_ok = require_positive ? report.min_entry > 0 && report.max_entry <= 1
                                           : report.min_entry >= 0 && report.max_entry <= 1;
  auto check = make_check(std::move(name), report.max_column_deviation, kIdentityTolerance,
                          entries_ok);
  if (!entries_ok) {
    check.note = "entries span [" + format_double(report.min_entry) + ", " +
                 format_double(report.max_entry) + "]";
  }
  return check;
}

StochasticityReport<double> worse(StochasticityReport<double> a,
                                  const StochasticityReport<double>& b) {
  if (b.max_column_deviation > a.max_column_deviation) {
    a.max_column_deviation = b.max_column_deviation;
    a.worst_column = b.worst_column;
  }
  a.min_entry = std::min(a.min_entry, b.min_entry);
  a.max_entry = std::max(a.max_entry, b.max_entry);
  return a;
}

}  // namespace

bool VerifyReport::passed() const {
  for (const auto& check : checks) {
    if (!check.passed) return false;
  }
  return true;
}

std::string VerifyReport::to_text() const {
  std::ostringstream out;
  for (const auto& check : checks) {
    if (check.skipped) {
      out << "SKIP  " << check.name << "  (" << check.note << ")\n";
      continue;
    }
    out << (check.passed ? "PASS  " : "FAIL  ") << check.name
        << "  residual=" << format_double(check.residual)
        << "  tol=" << format_double(check.tolerance);
    if (!check.note.empty()) out << "  (" << check.note << ")";
    out << '\n';
  }
  for (const auto& notice : notices) out << "note: " << notice << '\n';
  out << (passed() ? "all checks passed" : "some checks FAILED") << '\n';
  return out.str();
}

VerifyReport verify_suite(const LinkMatrix& link, double alpha, double beta,
                          const VerifyOptions& options) {
  VerifyReport report;
  const PageIndex n = link.size();
  if (n > options.dense_limit) {
    report.checks.push_back(make_check("dense limit", static_cast<double>(n),
                                       static_cast<double>(options.dense_limit)));
    report.notices.push_back("n exceeds the dense limit; no identity can be checked");
    return report;
  }

  report.checks.push_back(stochastic_check("A column-stochastic", link.check()));

  const Eigen::MatrixXd m = google_matrix_dense(link, alpha, options.dense_limit);
  report.checks.push_back(stochastic_check("M positive column-stochastic",
                                           column_stochasticity(m), true));

  StochasticityReport<double> local{};
  local.min_entry = 1;
  double single_multi_gap = 0;
  for (PageIndex i = 0; i < n; ++i) {
    const auto a_i = build_distributed_link_matrix(link, i);
    local = worse(local, a_i.check());
    const auto a_p = build_multi_link_matrix(link, UpdatePattern::single(n, i));
    if (!(a_i == a_p)) {
      single_multi_gap =
          std::max(single_multi_gap, (a_i.to_dense() - a_p.to_dense()).cwiseAbs().maxCoeff());
      if (single_multi_gap == 0) single_multi_gap = std::numeric_limits<double>::min();
    }
  }
  report.checks.push_back(stochastic_check("A_i column-stochastic (all i)", local));
  report.checks.push_back(make_check("A_p at p=e_i equals A_i (bitwise)", single_multi_gap, 0.0));

  const auto m1 = expected_single_matrix(link, alpha, options.dense_limit);
  report.checks.push_back(make_check("M1 = (a1/a) M + (1 - a1/a) I", m1.residual, kIdentityTolerance));
  report.checks.push_back(stochastic_check("M1 positive column-stochastic",
                                           column_stochasticity(m1.matrix), true));

  std::optional<Eigen::VectorXd> oracle;
  try {
    oracle = pagerank_oracle(link, alpha).values();
  } catch (const Error& e) {
    auto check = make_check("PageRank oracle", std::numeric_limits<double>::infinity(), 0.0);
    check.note = e.what();
    report.checks.push_back(std::move(check));
  }
  if (oracle) {
    report.checks.push_back(make_check("M x* = x* (L1)", (m * *oracle - *oracle).lpNorm<1>(),
                                       kEigenvectorTolerance));
    report.checks.push_back(make_check("x* positive", oracle->minCoeff() > 0 ? 0.0 : 1.0, 0.0));
    report.checks.push_back(make_check("M1 x* = x* (max entry)",
                                       (m1.matrix * *oracle - *oracle).cwiseAbs().maxCoeff(),
                                       kEigenvectorTolerance));
  }

  if (n <= options.enumeration_limit) {
    const auto m2 = expected_multi_matrix(link, alpha, beta, options.enumeration_limit);
    report.checks.push_back(
        make_check("M2 = (a2/a) M + (1 - a2/a) I", m2.residual, kIdentityTolerance));
    report.checks.push_back(stochastic_check("M2 positive column-stochastic",
                                             column_stochasticity(m2.matrix), true));
    if (oracle) {
      report.checks.push_back(make_check("M2 x* = x* (max entry)",
                                         (m2.matrix * *oracle - *oracle).cwiseAbs().maxCoeff(),
                                         kEigenvectorTolerance));
    }
  } else {
    report.checks.push_back(skipped_check("M2 identity (2^n enumeration)",
                                          "n=" + std::to_string(n) + " > " +
                                              std::to_string(options.enumeration_limit)));
    report.notices.push_back("multi-page enumeration skipped: n=" + std::to_string(n) +
                             " exceeds the 2^n limit of " +
                             std::to_string(options.enumeration_limit) + " pages");
  }

  if (n <= kPatternSweepLimit) {
    StochasticityReport<double> patterns{};
    patterns.min_entry = 1;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      patterns = worse(patterns,
                       build_multi_link_matrix(link, UpdatePattern::from_mask(n, mask)).check());
    }
    report.checks.push_back(stochastic_check("A_p column-stochastic (all 2^n p)", patterns));
  } else {
    report.checks.push_back(skipped_check("A_p column-stochastic (all 2^n p)",
                                          "n=" + std::to_string(n) + " > " +
                                              std::to_string(kPatternSweepLimit)));
  }
  return report;
}

VerifyReport verify_suite(const WebGraph& graph, double alpha, double beta,
                          DanglingPolicy policy, const VerifyOptions& options) {
  return verify_suite(build_link_matrix<double>(graph, policy), alpha, beta, options);
}

}  // namespace drpr
