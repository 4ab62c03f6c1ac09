#pragma once

// Brute-force references used to cross-check the metric engines. Everything
// here is built from the edge list by its own route (dense matrices, explicit
// walks, exhaustive DFS, big-integer closed forms) and shares no numerical
// code with metrics.cpp.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ffgraph/graph.hpp"
#include "ffgraph/rng.hpp"

namespace ffg {

/// Row-major n x n matrix of doubles; row = receiver, column = sender.
class DenseMatrix {
 public:
  explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

  bool is_lower_triangular() const;

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

 private:
  std::size_t n_;
  std::vector<double> data_;
};

enum class MatrixKind { adjacency, walk, diffusion };

inline constexpr std::size_t kDenseMaxNodes = 512;

/// A, W or Delta assembled entry by entry from the edge list.
DenseMatrix dense_operator(const FeedforwardGraph& g, MatrixKind kind);

/// M^t by repeated multiplication. Throws Error(size_limit) above
/// kDenseMaxNodes.
DenseMatrix dense_power(const FeedforwardGraph& g, MatrixKind kind, std::size_t t);

/// Successive powers M^0, M^1, ... for sweeping over t without recomputing.
class DensePowers {
 public:
  DensePowers(const FeedforwardGraph& g, MatrixKind kind);

  const DenseMatrix& current() const noexcept { return power_; }
  std::size_t exponent() const noexcept { return exponent_; }
  void advance();

 private:
  DenseMatrix base_;
  DenseMatrix power_;
  std::size_t exponent_ = 0;
};

struct WalkSample {
  NodeId start = 0;
  std::optional<std::size_t> steps_to_sink;  // nullopt: censored at horizon
};

/// One explicit random walk choosing uniformly among out-edges.
WalkSample sample_walk(const FeedforwardGraph& g, NodeId start, std::size_t horizon,
                       RngStream& rng);

struct MonteCarloMixing {
  std::size_t trials_per_start = 0;
  std::vector<double> miss_mass;  // t = 0 .. horizon, averaged over starts
  std::vector<double> std_error;

  /// First t with miss_mass[t] < epsilon.
  std::optional<std::size_t> mixing_time(double epsilon = 0.25) const;
};

/// Simulated walks from every start; each (start, trial) pair draws from its
/// own sub-stream of the monte_carlo family, so results do not depend on
/// evaluation order.
MonteCarloMixing monte_carlo_mixing(const FeedforwardGraph& g, std::size_t trials_per_start,
                                    std::size_t horizon, std::uint64_t seed);

inline constexpr std::size_t kEnumerateMaxNodes = 14;
inline constexpr std::size_t kEnumerateMaxLength = 14;

/// Number of oriented length-t walks from i to the sink, by exhaustive DFS.
std::uint64_t enumerate_paths(const FeedforwardGraph& g, NodeId i, std::size_t t);

struct PathBoundCheck {
  std::size_t mixing_time = 0;       // missmass, epsilon = 1/4
  std::size_t s = 0;                 // witnessing length (first found)
  double average_path_count = 0.0;   // (1/n) sum_i p(i, s)
  double bound = 0.0;                // (3 / 4t) 2^s
  bool holds = false;
};

/// Searches s <= t (t = averaged mixing time) for an average path count of at
/// least (3/4t) 2^s. Requires every non-sink out-degree >= 2
/// (Error(precondition_failed)) and n <= kEnumerateMaxNodes.
PathBoundCheck check_path_count_bound(const FeedforwardGraph& g);

/// C(2k, k) / 4^k from exact big-integer arithmetic.
double central_binomial_ratio(std::size_t k);

struct LineFidelityClosedForm {
  double shifted_value = 0.0;         // C(2(n-1), n-1) / 4^(n-1), the ratio one index later
  std::optional<double> exact_value;  // C(2(n-2), n-2) / 4^(n-2), n >= 3
};

LineFidelityClosedForm closed_form_line_fidelity(std::size_t n);

struct SinkNeighbourDecay {
  bool decays = false;        // d_horizon[n-2] < 1e-6
  double final_value = 0.0;
  std::vector<double> trace;  // d_t[n-2], t = 0 .. horizon
};

/// Tracks the fidelity of node n-2. Requires a unique sink, all self-edges,
/// indeg(n-2) > 1 and horizon >= 64 (Error(precondition_failed)).
SinkNeighbourDecay check_sink_neighbour_decay(const FeedforwardGraph& g, std::size_t horizon);

}  // namespace ffg
