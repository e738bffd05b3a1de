#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace drpr {

inline constexpr std::string_view kArtifactVersion = "drpr 0.1.0";

struct TrajectoryMeta {
  std::string graph_source;
  std::string protocol;  // "single", "multi", "saawet", "saawet-toy", ...
  double alpha = 0.15;
  std::optional<double> beta;
  std::uint64_t seed = 0;
  std::int64_t steps = 0;
  std::string schedule = "geometric";
  std::string version{kArtifactVersion};

  friend bool operator==(const TrajectoryMeta&, const TrajectoryMeta&) = default;
};

struct TrajectorySample {
  std::int64_t k = 0;
  double err_l1 = 0;
  double err_l2 = 0;
  std::int64_t sigma = 0;

  friend bool operator==(const TrajectorySample&, const TrajectorySample&) = default;
};

/// Error samples of one run. Samples are strictly increasing in k, errors
/// are non-negative and sigma never decreases.
struct Trajectory {
  TrajectoryMeta meta;
  std::vector<TrajectorySample> samples;
  std::vector<double> final_x_bar;

  /// Throws InvalidArgument when an invariant above is violated.
  void validate() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

enum class TrajectoryFormat { Csv, Json };

TrajectoryFormat parse_trajectory_format(std::string_view name);

/// Header "k,err_l1,err_l2,sigma", shortest round-trip decimals, '\n' endings.
void write_csv(const Trajectory& traj, std::ostream& out);
/// One object with "meta", "samples" and "final_x_bar".
void write_json(const Trajectory& traj, std::ostream& out);

std::string to_csv(const Trajectory& traj);
std::string to_json(const Trajectory& traj);
Trajectory trajectory_from_json(std::string_view text);
Trajectory trajectory_from_csv(std::string_view text);

void write_trajectory(const Trajectory& traj, TrajectoryFormat format, const std::string& path);
/// Reads either format; JSON is detected by a leading '{'.
Trajectory read_trajectory(const std::string& path);

/// Shortest decimal that round-trips the double (at most 17 significant digits).
std::string format_double(double value);

/// Least-squares fit of log(err_l1) against log(k).
struct RateFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  std::int64_t k_min = 0;  // smallest k used
  std::int64_t k_max = 0;  // largest k used
  std::size_t points = 0;
  std::size_t excluded_zero = 0;  // samples with err exactly 0, left out of the fit
};

inline constexpr std::size_t kMinRatePoints = 5;

/// Fits over the samples with k in [k_min, k_max]. Throws InsufficientSamples
/// when fewer than five positive-error samples remain.
RateFit estimate_rate(const Trajectory& traj, std::int64_t k_min, std::int64_t k_max);

RateFit fit_power_law(const std::vector<std::int64_t>& k, const std::vector<double>& err);

}  // namespace drpr
