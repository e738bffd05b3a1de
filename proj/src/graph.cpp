#include "drpr/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "drpr/error.hpp"
#include "drpr/random.hpp"

namespace drpr {

namespace {

// Distinct from Philox stream ids used by protocol runs.
constexpr std::uint64_t kGraphStream = 0x6772617068ull;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<PageIndex> parse_index(std::string_view token) {
  PageIndex value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || value < 0) return std::nullopt;
  return value;
}

// Matches "# n=<N>" with optional blanks around '=' and after '#'.
std::optional<std::string_view> directive_value(std::string_view line) {
  std::string_view rest = trim(line.substr(1));
  if (rest.empty() || rest.front() != 'n') return std::nullopt;
  rest = trim(rest.substr(1));
  if (rest.empty() || rest.front() != '=') return std::nullopt;
  return trim(rest.substr(1));
}

}  // namespace

WebGraph::WebGraph(PageIndex n, std::vector<std::vector<PageIndex>> out_links)
    : n_(n), out_links_(std::move(out_links)) {
  detail::require(n > 2, ErrorCode::TooFewPages,
                  "graph needs more than 2 pages, got " + std::to_string(n));
  detail::require(static_cast<PageIndex>(out_links_.size()) == n, ErrorCode::DimensionMismatch,
                  "out_links has " + std::to_string(out_links_.size()) + " lists for n=" +
                      std::to_string(n));
  for (auto& targets : out_links_) {
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    if (!targets.empty()) {
      detail::require(targets.front() >= 0 && targets.back() < n, ErrorCode::IndexOutOfRange,
                      "edge target outside [0, " + std::to_string(n) + ")");
    }
  }
}

std::size_t WebGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& targets : out_links_) total += targets.size();
  return total;
}

DanglingPolicy parse_dangling_policy(std::string_view name) {
  if (name == "uniform") return DanglingPolicy::Uniform;
  if (name == "selfloop") return DanglingPolicy::SelfLoop;
  if (name == "reject") return DanglingPolicy::Reject;
  throw Error(ErrorCode::InvalidArgument, "unknown dangling policy '" + std::string(name) + "'");
}

std::string_view to_string(DanglingPolicy policy) {
  switch (policy) {
    case DanglingPolicy::Uniform: return "uniform";
    case DanglingPolicy::SelfLoop: return "selfloop";
    case DanglingPolicy::Reject: return "reject";
  }
  return "uniform";
}

WebGraph parse_edge_list(std::istream& in) {
  std::optional<PageIndex> declared;
  std::vector<std::pair<PageIndex, PageIndex>> edges;
  PageIndex max_index = -1;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    const auto where = "line " + std::to_string(line_no);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (const auto value = directive_value(line)) {
        const auto n = parse_index(*value);
        detail::require(n.has_value(), ErrorCode::MalformedLine, where + ": bad n directive");
        detail::require(!declared || *declared == *n, ErrorCode::MalformedLine,
                        where + ": conflicting n directive");
        declared = n;
      }
      continue;
    }

    std::istringstream tokens{std::string(line)};
    std::vector<std::string> parts;
    for (std::string token; tokens >> token;) parts.push_back(token);
    detail::require(parts.size() == 2, ErrorCode::MalformedLine,
                    where + ": expected 2 tokens, got " + std::to_string(parts.size()));
    const auto src = parse_index(parts[0]);
    const auto dst = parse_index(parts[1]);
    detail::require(src && dst, ErrorCode::MalformedLine, where + ": non-integer index");
    edges.emplace_back(*src, *dst);
    max_index = std::max({max_index, *src, *dst});
  }

  const PageIndex n = declared.value_or(max_index + 1);
  detail::require(max_index < n, ErrorCode::IndexOutOfRange,
                  "index " + std::to_string(max_index) + " not below declared n=" +
                      std::to_string(n));
  detail::require(n > 2, ErrorCode::TooFewPages,
                  "graph needs more than 2 pages, got " + std::to_string(n));

  std::vector<std::vector<PageIndex>> out_links(static_cast<std::size_t>(n));
  for (const auto& [src, dst] : edges) out_links[src].push_back(dst);
  return WebGraph(n, std::move(out_links));
}

WebGraph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_edge_list(in);
}

WebGraph read_edge_list(const std::string& path) {
  std::ifstream in(path);
  detail::require(static_cast<bool>(in), ErrorCode::IoError, "cannot open '" + path + "'");
  return parse_edge_list(in);
}

void write_edge_list(const WebGraph& graph, std::ostream& out) {
  out << "# n=" << graph.size() << '\n';
  for (PageIndex j = 0; j < graph.size(); ++j) {
    for (const PageIndex i : graph.out_links(j)) out << j << ' ' << i << '\n';
  }
}

std::string to_edge_list(const WebGraph& graph) {
  std::ostringstream out;
  write_edge_list(graph, out);
  return out.str();
}

void write_edge_list(const WebGraph& graph, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  detail::require(static_cast<bool>(out), ErrorCode::IoError, "cannot write '" + path + "'");
  write_edge_list(graph, out);
  detail::require(static_cast<bool>(out), ErrorCode::IoError, "write failed for '" + path + "'");
}

WebGraph generate_random_graph(PageIndex n, double edge_prob, std::uint64_t seed) {
  detail::require(n > 2, ErrorCode::TooFewPages,
                  "graph needs more than 2 pages, got " + std::to_string(n));
  detail::require(edge_prob > 0.0 && edge_prob <= 1.0, ErrorCode::InvalidProbability,
                  "edge_prob must lie in (0, 1]");
  Philox rng(seed, kGraphStream);
  std::vector<std::vector<PageIndex>> out_links(static_cast<std::size_t>(n));
  for (PageIndex j = 0; j < n; ++j) {
    for (PageIndex i = 0; i < n; ++i) {
      if (i == j) continue;
      if (bernoulli(rng, edge_prob)) out_links[j].push_back(i);
    }
  }
  return WebGraph(n, std::move(out_links));
}

}  // namespace drpr
