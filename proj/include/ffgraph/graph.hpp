#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ffg {

using NodeId = std::uint32_t;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Directed graph on the ordered node set 0..n-1 in which every edge points
/// forwards (src <= dst). Node n-1 is the designated sink.
///
/// Storage is a pair of CSR adjacency structures (in and out), each list
/// sorted ascending and free of duplicates. Instances are immutable once
/// built and may be shared freely between readers.
class FeedforwardGraph {
 public:
  /// Builds a graph from an arbitrary edge list. Duplicates are dropped.
  /// Throws Error(backward_edge) for any src > dst and Error(out_of_range)
  /// for any endpoint >= n or when n == 0.
  static FeedforwardGraph build(std::size_t n, std::span<const Edge> edges);

  std::size_t size() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return in_nbrs_.size(); }
  NodeId sink() const noexcept { return static_cast<NodeId>(n_ - 1); }

  // Unchecked accessors for hot loops; i must be < size().
  std::span<const NodeId> in_neighbors(NodeId i) const noexcept {
    return {in_nbrs_.data() + in_off_[i], in_nbrs_.data() + in_off_[i + 1]};
  }
  std::span<const NodeId> out_neighbors(NodeId i) const noexcept {
    return {out_nbrs_.data() + out_off_[i], out_nbrs_.data() + out_off_[i + 1]};
  }

  // Degrees count the self-edge when present. Throw Error(out_of_range).
  std::size_t in_degree(NodeId i) const;
  std::size_t out_degree(NodeId i) const;

  bool has_edge(NodeId src, NodeId dst) const noexcept;
  bool has_self_edge(NodeId i) const noexcept { return has_edge(i, i); }

  /// Edges in canonical (src, dst) lexicographic order.
  std::vector<Edge> edges() const;

  friend bool operator==(const FeedforwardGraph&, const FeedforwardGraph&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> in_off_;
  std::vector<NodeId> in_nbrs_;
  std::vector<std::size_t> out_off_;
  std::vector<NodeId> out_nbrs_;
};

struct ValidationReport {
  bool is_feedforward = true;
  bool has_all_self_edges = true;
  std::vector<NodeId> sinks;  // nodes whose outgoing edges are a subset of {self}
  bool unique_sink = false;   // sinks == {n-1}
  std::vector<NodeId> zero_indegree_nodes;
};

ValidationReport validate(const FeedforwardGraph& g);

/// Text form: "n m\n" followed by m lines "src dst\n" in canonical order.
std::string serialize(const FeedforwardGraph& g);

/// Inverse of serialize. Edge order in the input is not required to be
/// canonical. Throws ParseError carrying the 1-based line number; structural
/// violations are reported with ParseError::cause() set accordingly.
FeedforwardGraph deserialize(std::string_view text);

/// Binary PGM (P5, maxval 255) of the adjacency matrix: pixel (row i, col j)
/// is 0 when (j, i) is an edge and 255 otherwise.
std::string export_pgm(const FeedforwardGraph& g);

}  // namespace ffg
