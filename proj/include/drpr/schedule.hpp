#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace drpr {

/// Which step counts a run records.
///   geometric   k = 1, 2, 4, 8, ... plus the final step (default)
///   log:<m>     m points per decade, rounded and deduplicated, plus the final step
///   every:<s>   k = s, 2s, 3s, ... plus the final step
struct SampleSchedule {
  enum class Kind { Geometric, LogSpaced, Every };

  Kind kind = Kind::Geometric;
  std::int64_t parameter = 0;

  static SampleSchedule geometric() { return {}; }
  static SampleSchedule log_spaced(std::int64_t per_decade) {
    return {Kind::LogSpaced, per_decade};
  }
  static SampleSchedule every(std::int64_t stride) { return {Kind::Every, stride}; }

  /// Strictly increasing step counts in [1, steps], always ending at `steps`.
  std::vector<std::int64_t> points(std::int64_t steps) const;

  std::string to_string() const;
  static SampleSchedule parse(std::string_view text);
};

}  // namespace drpr
