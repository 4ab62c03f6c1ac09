#pragma once

#include <boost/rational.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ffgraph/graph.hpp"

namespace ffg {

/// Lazy random-walk transition matrix W, w_ij = 1/outdeg(j) on edges (j, i).
/// Lower triangular; column-stochastic because construction rejects any node
/// with zero out-degree (Error(zero_out_degree)).
class WalkOperator {
 public:
  explicit WalkOperator(const FeedforwardGraph& g);

  const FeedforwardGraph& graph() const noexcept { return *g_; }
  double entry(NodeId i, NodeId j) const noexcept;

  /// y = W x. Moves a distribution one step forward.
  void apply(std::span<const double> x, std::span<double> y) const;
  /// y = r W. Advances a row of W^t to the same row of W^(t+1).
  void apply_left(std::span<const double> r, std::span<double> y) const;

 private:
  const FeedforwardGraph* g_;
  std::vector<double> inv_out_;
};

/// Diffusion matrix, entry (i, j) = 1/indeg(i) on edges (j, i). Lower
/// triangular and row-stochastic; construction rejects any node with zero
/// in-degree (Error(zero_in_degree)).
class DiffusionOperator {
 public:
  explicit DiffusionOperator(const FeedforwardGraph& g);

  const FeedforwardGraph& graph() const noexcept { return *g_; }
  double entry(NodeId i, NodeId j) const noexcept;

  void apply(std::span<const double> x, std::span<double> y) const;
  void apply_left(std::span<const double> r, std::span<double> y) const;

 private:
  const FeedforwardGraph* g_;
  std::vector<double> inv_in_;
};

/// Rows tau of W^0 .. W^t_max: result[t][i] = (W^t)_{tau,i}, the probability
/// that a walk started at i sits at the sink after t steps.
std::vector<std::vector<double>> tau_row_walk(const FeedforwardGraph& g, std::size_t t_max);

/// Rows tau of Delta^0 .. Delta^t_max: result[t][i] is the fidelity of node i
/// at step t.
std::vector<std::vector<double>> tau_row_diffusion(const FeedforwardGraph& g, std::size_t t_max);

enum class DistanceConvention { l1, missmass };

std::string_view to_string(DistanceConvention c) noexcept;
std::optional<DistanceConvention> parse_convention(std::string_view name) noexcept;

struct MixingOptions {
  double epsilon = 0.25;
  DistanceConvention convention = DistanceConvention::missmass;
  std::optional<std::size_t> horizon;  // default 8n
};

struct MixingReport {
  std::optional<std::size_t> mixing_time;  // nullopt: not mixed within horizon
  std::size_t horizon = 0;
  DistanceConvention convention = DistanceConvention::missmass;
  double epsilon = 0.25;
  std::vector<double> trace;  // averaged distance at t = 0 .. mixing_time (or horizon)

  bool mixed() const noexcept { return mixing_time.has_value(); }
};

/// Smallest t whose start-averaged distance to the sink distribution is below
/// epsilon. missmass averages 1 - (W^t)_{tau,i}; l1 averages
/// ||W^t e_i - 1_tau||_1, which for column-stochastic W is exactly twice the
/// miss mass, so both come from the same tau-row iteration.
MixingReport averaged_mixing_time(const FeedforwardGraph& g, const MixingOptions& options = {});

enum class FidelityStop {
  none,
  // Stops once the minimax value, its argmin node and that node's argmax step
  // can no longer change: for s > t, (Delta^s)_{tau,i} is bounded by the
  // suffix mass sum_{j >= i} (Delta^t)_{tau,j}. Other phi entries may then be
  // lower than their full-horizon values.
  certified_minimax,
  // Heuristic: max_i d_t[i] / phi_i < 1e-3 for 16 consecutive steps.
  heuristic,
};

struct FidelityOptions {
  std::optional<std::size_t> horizon;  // default 4n
  FidelityStop stop = FidelityStop::none;
};

struct FidelityReport {
  std::vector<double> phi;             // max over t of (Delta^t)_{tau,i}
  std::vector<std::size_t> argmax_t;   // first step attaining phi_i
  double minimax = 0.0;
  NodeId argmin_node = 0;              // smallest index attaining minimax
  double normalized_minimax = 0.0;     // n * minimax
  std::size_t horizon = 0;
  std::size_t steps_run = 0;           // < horizon only when a stop rule fired
};

FidelityReport fidelity_report(const FeedforwardGraph& g, const FidelityOptions& options = {});

using Rational = boost::rational<std::int64_t>;

/// Eigenvalues of W with multiplicity: its diagonal {1/outdeg(j)}, sorted
/// ascending. Throws Error(zero_out_degree).
std::vector<Rational> walk_spectrum(const FeedforwardGraph& g);

/// Dense matrix of exact path counts, row = receiver, column = sender.
class CountMatrix {
 public:
  explicit CountMatrix(std::size_t n) : n_(n), data_(n * n, 0) {}

  std::size_t size() const noexcept { return n_; }
  std::uint64_t& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  std::uint64_t operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  friend bool operator==(const CountMatrix&, const CountMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<std::uint64_t> data_;
};

inline constexpr std::size_t kPathCountMaxNodes = 2048;

/// A^t for the adjacency matrix a_ij = 1 iff (j, i) is an edge. Entries count
/// oriented length-t walks j -> i. Throws Error(size_limit) above
/// kPathCountMaxNodes and Error(count_overflow) if a count exceeds 64 bits.
CountMatrix path_count(const FeedforwardGraph& g, std::size_t t);

}  // namespace ffg
