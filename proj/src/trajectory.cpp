#include "drpr/trajectory.hpp"

#include <Eigen/Dense>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "drpr/error.hpp"

namespace drpr {

using nlohmann::json;

void Trajectory::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    detail::require(s.err_l1 >= 0 && s.err_l2 >= 0, ErrorCode::InvalidArgument,
                    "negative error at k=" + std::to_string(s.k));
    if (i == 0) continue;
    detail::require(s.k > samples[i - 1].k, ErrorCode::InvalidArgument,
                    "samples not strictly increasing in k");
    detail::require(s.sigma >= samples[i - 1].sigma, ErrorCode::InvalidArgument,
                    "sigma decreased at k=" + std::to_string(s.k));
  }
}

TrajectoryFormat parse_trajectory_format(std::string_view name) {
  if (name == "csv") return TrajectoryFormat::Csv;
  if (name == "json") return TrajectoryFormat::Json;
  throw Error(ErrorCode::InvalidArgument, "unknown format '" + std::string(name) + "'");
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  detail::require(ec == std::errc(), ErrorCode::InvalidArgument, "cannot format number");
  return std::string(buffer, ptr);
}

void write_csv(const Trajectory& traj, std::ostream& out) {
  out << "k,err_l1,err_l2,sigma\n";
  for (const auto& s : traj.samples) {
    out << s.k << ',' << format_double(s.err_l1) << ',' << format_double(s.err_l2) << ','
        << s.sigma << '\n';
  }
}

namespace {

json meta_to_json(const TrajectoryMeta& meta) {
  json j = {{"graph_source", meta.graph_source}, {"protocol", meta.protocol},
            {"alpha", meta.alpha},               {"seed", meta.seed},
            {"steps", meta.steps},               {"schedule", meta.schedule},
            {"version", meta.version}};
  j["beta"] = meta.beta ? json(*meta.beta) : json(nullptr);
  return j;
}

TrajectoryMeta meta_from_json(const json& j) {
  TrajectoryMeta meta;
  meta.graph_source = j.at("graph_source").get<std::string>();
  meta.protocol = j.at("protocol").get<std::string>();
  meta.alpha = j.at("alpha").get<double>();
  if (!j.at("beta").is_null()) meta.beta = j.at("beta").get<double>();
  meta.seed = j.at("seed").get<std::uint64_t>();
  meta.steps = j.at("steps").get<std::int64_t>();
  meta.schedule = j.at("schedule").get<std::string>();
  meta.version = j.at("version").get<std::string>();
  return meta;
}

}  // namespace

void write_json(const Trajectory& traj, std::ostream& out) {
  json samples = json::array();
  for (const auto& s : traj.samples) {
    samples.push_back({{"k", s.k}, {"err_l1", s.err_l1}, {"err_l2", s.err_l2}, {"sigma", s.sigma}});
  }
  const json doc = {
      {"meta", meta_to_json(traj.meta)}, {"samples", samples}, {"final_x_bar", traj.final_x_bar}};
  out << doc.dump(2) << '\n';
}

std::string to_csv(const Trajectory& traj) {
  std::ostringstream out;
  write_csv(traj, out);
  return out.str();
}

std::string to_json(const Trajectory& traj) {
  std::ostringstream out;
  write_json(traj, out);
  return out.str();
}

Trajectory trajectory_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    Trajectory traj;
    traj.meta = meta_from_json(doc.at("meta"));
    for (const auto& s : doc.at("samples")) {
      traj.samples.push_back({s.at("k").get<std::int64_t>(), s.at("err_l1").get<double>(),
                              s.at("err_l2").get<double>(), s.at("sigma").get<std::int64_t>()});
    }
    traj.final_x_bar = doc.at("final_x_bar").get<std::vector<double>>();
    return traj;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedLine, std::string("trajectory JSON: ") + e.what());
  }
}

namespace {

template <typename T>
bool parse_field(const std::string& text, T& value) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

Trajectory trajectory_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  detail::require(static_cast<bool>(std::getline(in, line)) && line == "k,err_l1,err_l2,sigma",
                  ErrorCode::MalformedLine, "trajectory CSV header missing");
  Trajectory traj;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    TrajectorySample s;
    std::istringstream fields(line);
    std::string k, l1, l2, sigma;
    const bool ok = std::getline(fields, k, ',') && std::getline(fields, l1, ',') &&
                    std::getline(fields, l2, ',') && std::getline(fields, sigma) &&
                    parse_field(k, s.k) && parse_field(l1, s.err_l1) &&
                    parse_field(l2, s.err_l2) && parse_field(sigma, s.sigma);
    detail::require(ok, ErrorCode::MalformedLine, "CSV line " + std::to_string(line_no));
    traj.samples.push_back(s);
  }
  return traj;
}

void write_trajectory(const Trajectory& traj, TrajectoryFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  detail::require(static_cast<bool>(out), ErrorCode::IoError, "cannot write '" + path + "'");
  if (format == TrajectoryFormat::Csv) {
    write_csv(traj, out);
  } else {
    write_json(traj, out);
  }
  detail::require(static_cast<bool>(out), ErrorCode::IoError, "write failed for '" + path + "'");
}

Trajectory read_trajectory(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  detail::require(static_cast<bool>(in), ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return trajectory_from_json(text);
  return trajectory_from_csv(text);
}

RateFit fit_power_law(const std::vector<std::int64_t>& k, const std::vector<double>& err) {
  detail::require(k.size() == err.size(), ErrorCode::DimensionMismatch,
                  "k and err differ in length");
  RateFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < k.size(); ++i) {
    detail::require(k[i] >= 1, ErrorCode::InvalidArgument, "k must be at least 1");
    if (err[i] == 0.0) {
      ++fit.excluded_zero;
      continue;
    }
    xs.push_back(std::log(static_cast<double>(k[i])));
    ys.push_back(std::log(err[i]));
    fit.k_min = xs.size() == 1 ? k[i] : std::min(fit.k_min, k[i]);
    fit.k_max = std::max(fit.k_max, k[i]);
  }
  detail::require(xs.size() >= kMinRatePoints, ErrorCode::InsufficientSamples,
                  "rate fit needs at least 5 positive samples, have " + std::to_string(xs.size()));

  const auto count = static_cast<Eigen::Index>(xs.size());
  Eigen::VectorXd log_k = Eigen::Map<const Eigen::VectorXd>(xs.data(), count);
  Eigen::VectorXd log_err = Eigen::Map<const Eigen::VectorXd>(ys.data(), count);
  const double mean_k = log_k.mean();
  const double mean_err = log_err.mean();
  log_k.array() -= mean_k;
  log_err.array() -= mean_err;

  const double sxx = log_k.squaredNorm();
  detail::require(sxx > 0, ErrorCode::InsufficientSamples, "all samples share one k");
  fit.slope = log_k.dot(log_err) / sxx;
  fit.intercept = mean_err - fit.slope * mean_k;
  const double syy = log_err.squaredNorm();
  const double residual = (log_err - fit.slope * log_k).squaredNorm();
  fit.r_squared = syy > 0 ? std::clamp(1.0 - residual / syy, 0.0, 1.0) : 1.0;
  fit.points = xs.size();
  return fit;
}

RateFit estimate_rate(const Trajectory& traj, std::int64_t k_min, std::int64_t k_max) {
  detail::require(k_min >= 1 && k_min <= k_max, ErrorCode::InvalidArgument,
                  "rate window needs 1 <= k_min <= k_max");
  std::vector<std::int64_t> ks;
  std::vector<double> errs;
  for (const auto& s : traj.samples) {
    if (s.k < k_min || s.k > k_max) continue;
    ks.push_back(s.k);
    errs.push_back(s.err_l1);
  }
  return fit_power_law(ks, errs);
}

}  // namespace drpr
