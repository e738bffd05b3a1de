#include "drpr/schedule.hpp"

#include <charconv>
#include <cmath>

#include "drpr/error.hpp"

namespace drpr {

std::vector<std::int64_t> SampleSchedule::points(std::int64_t steps) const {
  detail::require(steps >= 1, ErrorCode::InvalidArgument, "steps must be at least 1");
  std::vector<std::int64_t> out;
  auto push = [&](std::int64_t k) {
    if (k >= 1 && k < steps && (out.empty() || k > out.back())) out.push_back(k);
  };
  switch (kind) {
    case Kind::Geometric:
      for (std::int64_t k = 1; k < steps; k *= 2) push(k);
      break;
    case Kind::LogSpaced: {
      const double per_decade = static_cast<double>(parameter);
      const double top = std::log10(static_cast<double>(steps)) * per_decade;
      for (std::int64_t i = 0; static_cast<double>(i) <= top; ++i) {
        push(std::llround(std::pow(10.0, static_cast<double>(i) / per_decade)));
      }
      break;
    }
    case Kind::Every:
      for (std::int64_t k = parameter; k < steps; k += parameter) push(k);
      break;
  }
  out.push_back(steps);
  return out;
}

std::string SampleSchedule::to_string() const {
  switch (kind) {
    case Kind::Geometric: return "geometric";
    case Kind::LogSpaced: return "log:" + std::to_string(parameter);
    case Kind::Every: return "every:" + std::to_string(parameter);
  }
  return "geometric";
}

SampleSchedule SampleSchedule::parse(std::string_view text) {
  if (text == "geometric") return geometric();
  const auto colon = text.find(':');
  const auto name = text.substr(0, colon);
  std::int64_t value = 0;
  if (colon != std::string_view::npos) {
    const auto digits = text.substr(colon + 1);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    detail::require(ec == std::errc() && ptr == digits.data() + digits.size() && value >= 1,
                    ErrorCode::InvalidArgument, "bad schedule parameter in '" +
                                                    std::string(text) + "'");
    if (name == "log") return log_spaced(value);
    if (name == "every") return every(value);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown schedule '" + std::string(text) + "'");
}

}  // namespace drpr
