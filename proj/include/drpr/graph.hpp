#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace drpr {

using PageIndex = std::int64_t;

/// Directed web graph. `out_links(j)` lists the pages j links to, sorted
/// ascending without duplicates. Self-loops are allowed and count toward the
/// out-degree.
class WebGraph {
 public:
  /// Sorts and deduplicates each list; throws TooFewPages for n <= 2 and
  /// IndexOutOfRange for targets outside [0, n).
  WebGraph(PageIndex n, std::vector<std::vector<PageIndex>> out_links);

  PageIndex size() const { return n_; }
  const std::vector<PageIndex>& out_links(PageIndex j) const { return out_links_[j]; }
  PageIndex out_degree(PageIndex j) const {
    return static_cast<PageIndex>(out_links_[j].size());
  }
  std::size_t edge_count() const;

  friend bool operator==(const WebGraph&, const WebGraph&) = default;

 private:
  PageIndex n_;
  std::vector<std::vector<PageIndex>> out_links_;
};

enum class DanglingPolicy { Uniform, SelfLoop, Reject };

DanglingPolicy parse_dangling_policy(std::string_view name);
std::string_view to_string(DanglingPolicy policy);

/// Edge-list text: "src dst" per line, '#' comments, optional "# n=<N>".
WebGraph parse_edge_list(std::istream& in);
WebGraph parse_edge_list(std::string_view text);
WebGraph read_edge_list(const std::string& path);

/// Writes "# n=<N>" then one "src dst" line per edge in lexicographic order.
void write_edge_list(const WebGraph& graph, std::ostream& out);
std::string to_edge_list(const WebGraph& graph);
void write_edge_list(const WebGraph& graph, const std::string& path);

/// Each ordered pair (j, i), j != i, is an edge with probability edge_prob.
WebGraph generate_random_graph(PageIndex n, double edge_prob, std::uint64_t seed);

}  // namespace drpr
