#include "ffgraph/graph.hpp"

#include <algorithm>
#include <charconv>
#include <string>

#include "ffgraph/error.hpp"

namespace ffg {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::backward_edge: return "BackwardEdge";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::parse_error: return "ParseError";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::invalid_degree: return "InvalidDegree";
    case Errc::zero_out_degree: return "ZeroOutDegree";
    case Errc::zero_in_degree: return "ZeroInDegree";
    case Errc::size_limit: return "SizeLimit";
    case Errc::count_overflow: return "CountOverflow";
    case Errc::precondition_failed: return "PreconditionFailed";
    case Errc::insufficient_data: return "InsufficientData";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

FeedforwardGraph FeedforwardGraph::build(std::size_t n, std::span<const Edge> edges) {
  if (n == 0) {
    throw Error(Errc::out_of_range, "graph must have at least one node");
  }
  if (n > std::size_t{UINT32_MAX}) {
    throw Error(Errc::size_limit, "node count exceeds 32-bit node ids");
  }
  for (const Edge& e : edges) {
    if (e.src >= n || e.dst >= n) {
      throw Error(Errc::out_of_range, "edge (" + std::to_string(e.src) + "," +
                                          std::to_string(e.dst) + ") out of range for n=" +
                                          std::to_string(n));
    }
    if (e.src > e.dst) {
      throw Error(Errc::backward_edge, "edge (" + std::to_string(e.src) + "," +
                                           std::to_string(e.dst) + ") points backwards");
    }
  }

  std::vector<Edge> sorted(edges.begin(), edges.end());
  if (!std::is_sorted(sorted.begin(), sorted.end())) {
    std::sort(sorted.begin(), sorted.end());
  }
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  FeedforwardGraph g;
  g.n_ = n;
  const std::size_t m = sorted.size();

  g.out_off_.assign(n + 1, 0);
  g.in_off_.assign(n + 1, 0);
  for (const Edge& e : sorted) {
    ++g.out_off_[e.src + 1];
    ++g.in_off_[e.dst + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    g.out_off_[i + 1] += g.out_off_[i];
    g.in_off_[i + 1] += g.in_off_[i];
  }

  g.out_nbrs_.resize(m);
  g.in_nbrs_.resize(m);
  std::vector<std::size_t> in_cursor(g.in_off_.begin(), g.in_off_.end() - 1);
  // Sorted by (src, dst): out lists come out sorted directly, and filling the
  // in buckets in the same pass keeps each in list sorted by src.
  for (std::size_t k = 0; k < m; ++k) {
    const Edge& e = sorted[k];
    g.out_nbrs_[k] = e.dst;
    g.in_nbrs_[in_cursor[e.dst]++] = e.src;
  }
  return g;
}

std::size_t FeedforwardGraph::in_degree(NodeId i) const {
  if (i >= n_) {
    throw Error(Errc::out_of_range, "node " + std::to_string(i) + " out of range");
  }
  return in_off_[i + 1] - in_off_[i];
}

std::size_t FeedforwardGraph::out_degree(NodeId i) const {
  if (i >= n_) {
    throw Error(Errc::out_of_range, "node " + std::to_string(i) + " out of range");
  }
  return out_off_[i + 1] - out_off_[i];
}

bool FeedforwardGraph::has_edge(NodeId src, NodeId dst) const noexcept {
  if (src >= n_ || dst >= n_) return false;
  auto out = out_neighbors(src);
  return std::binary_search(out.begin(), out.end(), dst);
}

std::vector<Edge> FeedforwardGraph::edges() const {
  std::vector<Edge> result;
  result.reserve(edge_count());
  for (NodeId i = 0; i < n_; ++i) {
    for (NodeId j : out_neighbors(i)) result.push_back({i, j});
  }
  return result;
}

ValidationReport validate(const FeedforwardGraph& g) {
  ValidationReport report;
  const auto n = static_cast<NodeId>(g.size());
  for (NodeId i = 0; i < n; ++i) {
    auto out = g.out_neighbors(i);
    if (!out.empty() && out.front() < i) report.is_feedforward = false;
    if (!g.has_self_edge(i)) report.has_all_self_edges = false;
    const bool only_self = std::all_of(out.begin(), out.end(), [i](NodeId j) { return j == i; });
    if (only_self) report.sinks.push_back(i);
    if (g.in_neighbors(i).empty()) report.zero_indegree_nodes.push_back(i);
  }
  report.unique_sink = report.sinks.size() == 1 && report.sinks.front() == n - 1;
  return report;
}

std::string serialize(const FeedforwardGraph& g) {
  std::string out;
  out.reserve(16 + g.edge_count() * 12);
  out += std::to_string(g.size());
  out += ' ';
  out += std::to_string(g.edge_count());
  out += '\n';
  const auto n = static_cast<NodeId>(g.size());
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j : g.out_neighbors(i)) {
      out += std::to_string(i);
      out += ' ';
      out += std::to_string(j);
      out += '\n';
    }
  }
  return out;
}

namespace {

// Parses exactly two unsigned integers separated by a single space.
bool parse_pair(std::string_view line, std::uint64_t& a, std::uint64_t& b) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const char* first = line.data();
  const char* last = line.data() + line.size();
  auto r1 = std::from_chars(first, last, a);
  if (r1.ec != std::errc{} || r1.ptr == last || *r1.ptr != ' ') return false;
  auto r2 = std::from_chars(r1.ptr + 1, last, b);
  return r2.ec == std::errc{} && r2.ptr == last;
}

}  // namespace

FeedforwardGraph deserialize(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    const std::size_t end = text.find('\n', pos);
    line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw ParseError("missing header line", 1);
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  if (!parse_pair(line, n, m)) throw ParseError("header must be \"n m\"", line_no);
  if (n == 0) throw ParseError("node count must be >= 1", line_no, Errc::out_of_range);
  if (n > UINT32_MAX) throw ParseError("node count too large", line_no, Errc::size_limit);

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(m, 1u << 24)));
  for (std::uint64_t k = 0; k < m; ++k) {
    if (!next_line(line)) {
      throw ParseError("expected " + std::to_string(m) + " edges, found " + std::to_string(k),
                       line_no + 1);
    }
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    if (!parse_pair(line, a, b)) throw ParseError("edge line must be \"src dst\"", line_no);
    if (a >= n || b >= n) {
      throw ParseError("edge endpoint out of range", line_no, Errc::out_of_range);
    }
    if (a > b) throw ParseError("edge points backwards", line_no, Errc::backward_edge);
    edges.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b)});
  }
  while (next_line(line)) {
    if (!line.empty() && line != "\r") throw ParseError("trailing content after edges", line_no);
  }
  return FeedforwardGraph::build(static_cast<std::size_t>(n), edges);
}

std::string export_pgm(const FeedforwardGraph& g) {
  const std::size_t n = g.size();
  std::string header = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
  std::string image = header;
  image.append(n * n, static_cast<char>(255));
  char* pixels = image.data() + header.size();
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j : g.in_neighbors(i)) pixels[std::size_t{i} * n + j] = 0;
  }
  return image;
}

}  // namespace ffg
