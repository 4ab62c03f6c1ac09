#include "ffgraph/oracles.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "ffgraph/error.hpp"

namespace ffg {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool DenseMatrix::is_lower_triangular() const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      if ((*this)(i, j) != 0.0) return false;
    }
  }
  return true;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t n = a.size();
  // Last non-zero column per row of b, so triangular inputs skip their zeros.
  std::vector<std::size_t> row_end(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = n; j-- > 0;) {
      if (b(k, j) != 0.0) {
        row_end[k] = j + 1;
        break;
      }
    }
  }
  DenseMatrix c(n);
  for (std::size_t i = 0; i < n; ++i) {
    double* out = &c(i, 0);
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* in = b.row(k).data();
      for (std::size_t j = 0; j < row_end[k]; ++j) out[j] += aik * in[j];
    }
  }
  return c;
}

DenseMatrix dense_operator(const FeedforwardGraph& g, MatrixKind kind) {
  const std::size_t n = g.size();
  if (n > kDenseMaxNodes) {
    throw Error(Errc::size_limit,
                "dense oracle supports at most " + std::to_string(kDenseMaxNodes) + " nodes");
  }
  DenseMatrix a(n);
  for (const Edge& e : g.edges()) a(e.dst, e.src) = 1.0;
  if (kind == MatrixKind::adjacency) return a;

  if (kind == MatrixKind::walk) {
    for (std::size_t j = 0; j < n; ++j) {
      double column = 0.0;
      for (std::size_t i = 0; i < n; ++i) column += a(i, j);
      if (column == 0.0) throw Error(Errc::zero_out_degree, "zero out-degree");
      for (std::size_t i = 0; i < n; ++i) a(i, j) /= column;
    }
    return a;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += a(i, j);
    if (row == 0.0) throw Error(Errc::zero_in_degree, "zero in-degree");
    for (std::size_t j = 0; j < n; ++j) a(i, j) /= row;
  }
  return a;
}

DensePowers::DensePowers(const FeedforwardGraph& g, MatrixKind kind)
    : base_(dense_operator(g, kind)), power_(DenseMatrix::identity(g.size())) {}

void DensePowers::advance() {
  power_ = base_ * power_;
  ++exponent_;
}

DenseMatrix dense_power(const FeedforwardGraph& g, MatrixKind kind, std::size_t t) {
  DensePowers powers(g, kind);
  while (powers.exponent() < t) powers.advance();
  return powers.current();
}

WalkSample sample_walk(const FeedforwardGraph& g, NodeId start, std::size_t horizon,
                       RngStream& rng) {
  WalkSample sample{start, std::nullopt};
  const NodeId sink = g.sink();
  NodeId at = start;
  for (std::size_t step = 0;; ++step) {
    if (at == sink) {
      sample.steps_to_sink = step;
      return sample;
    }
    if (step == horizon) return sample;
    const auto out = g.out_neighbors(at);
    if (out.empty()) return sample;
    at = out[static_cast<std::size_t>(rng.below(out.size()))];
  }
}

std::optional<std::size_t> MonteCarloMixing::mixing_time(double epsilon) const {
  for (std::size_t t = 0; t < miss_mass.size(); ++t) {
    if (miss_mass[t] < epsilon) return t;
  }
  return std::nullopt;
}

MonteCarloMixing monte_carlo_mixing(const FeedforwardGraph& g, std::size_t trials_per_start,
                                    std::size_t horizon, std::uint64_t seed) {
  if (trials_per_start == 0) {
    throw Error(Errc::invalid_argument, "trials_per_start must be >= 1");
  }
  const std::size_t n = g.size();
  const RngStream root = RngStream(seed).substream(StreamFamily::monte_carlo);

  MonteCarloMixing result;
  result.trials_per_start = trials_per_start;
  result.miss_mass.assign(horizon + 1, 0.0);
  result.std_error.assign(horizon + 1, 0.0);

  // absorbed[t]: trials from the current start that reached the sink at step t.
  std::vector<std::size_t> absorbed(horizon + 1);
  std::vector<double> variance(horizon + 1, 0.0);
  const double trials = static_cast<double>(trials_per_start);
  for (NodeId start = 0; start < n; ++start) {
    std::fill(absorbed.begin(), absorbed.end(), 0);
    for (std::size_t trial = 0; trial < trials_per_start; ++trial) {
      RngStream rng = root.substream({start, trial});
      const WalkSample s = sample_walk(g, start, horizon, rng);
      if (s.steps_to_sink) ++absorbed[*s.steps_to_sink];
    }
    std::size_t reached = 0;
    for (std::size_t t = 0; t <= horizon; ++t) {
      reached += absorbed[t];
      const double miss = 1.0 - static_cast<double>(reached) / trials;
      result.miss_mass[t] += miss;
      variance[t] += miss * (1.0 - miss) / trials;
    }
  }
  const double starts = static_cast<double>(n);
  for (std::size_t t = 0; t <= horizon; ++t) {
    result.miss_mass[t] /= starts;
    result.std_error[t] = std::sqrt(variance[t]) / starts;
  }
  return result;
}

namespace {

std::uint64_t count_walks(const FeedforwardGraph& g, NodeId at, std::size_t remaining) {
  if (remaining == 0) return at == g.sink() ? 1 : 0;
  std::uint64_t total = 0;
  for (NodeId next : g.out_neighbors(at)) total += count_walks(g, next, remaining - 1);
  return total;
}

}  // namespace

std::uint64_t enumerate_paths(const FeedforwardGraph& g, NodeId i, std::size_t t) {
  if (g.size() > kEnumerateMaxNodes || t > kEnumerateMaxLength) {
    throw Error(Errc::size_limit, "enumerate_paths supports n <= " +
                                      std::to_string(kEnumerateMaxNodes) + " and t <= " +
                                      std::to_string(kEnumerateMaxLength));
  }
  if (i >= g.size()) throw Error(Errc::out_of_range, "start node out of range");
  return count_walks(g, i, t);
}

PathBoundCheck check_path_count_bound(const FeedforwardGraph& g) {
  const std::size_t n = g.size();
  if (n < 2) throw Error(Errc::precondition_failed, "needs at least two nodes");
  if (n > kEnumerateMaxNodes) {
    throw Error(Errc::size_limit, "path bound check supports n <= " +
                                      std::to_string(kEnumerateMaxNodes));
  }
  for (NodeId i = 0; i + 1 < n; ++i) {
    if (g.out_neighbors(i).size() < 2) {
      throw Error(Errc::precondition_failed,
                  "node " + std::to_string(i) + " has out-degree below 2");
    }
  }

  // Mixing time from dense powers of W: first t with mean (W^t)_{tau,i} > 3/4.
  PathBoundCheck result;
  DensePowers walk(g, MatrixKind::walk);
  const std::size_t horizon = 8 * n;
  for (;;) {
    double reached = 0.0;
    for (double v : walk.current().row(n - 1)) reached += v;
    if (1.0 - reached / static_cast<double>(n) < 0.25) break;
    if (walk.exponent() == horizon) {
      throw Error(Errc::precondition_failed, "walk does not mix within 8n steps");
    }
    walk.advance();
  }
  result.mixing_time = walk.exponent();

  const double t = static_cast<double>(result.mixing_time);
  for (std::size_t s = 0; s <= result.mixing_time && s <= kEnumerateMaxLength; ++s) {
    double total = 0.0;
    for (NodeId i = 0; i < n; ++i) total += static_cast<double>(enumerate_paths(g, i, s));
    const double average = total / static_cast<double>(n);
    const double bound = 3.0 / (4.0 * t) * std::ldexp(1.0, static_cast<int>(s));
    if (average >= bound) {
      result.s = s;
      result.average_path_count = average;
      result.bound = bound;
      result.holds = true;
      return result;
    }
  }
  return result;
}

double central_binomial_ratio(std::size_t k) {
  using boost::multiprecision::cpp_int;
  cpp_int c = 1;
  for (std::size_t j = 1; j <= k; ++j) {
    c *= k + j;
    c /= j;
  }
  // c / 2^(2k): keep the top 64 bits of c, convert, then rescale exactly.
  const auto top_bit = static_cast<long>(boost::multiprecision::msb(c));
  const long shift = std::max(0L, top_bit - 63);
  const auto mantissa = static_cast<std::uint64_t>(c >> shift);
  return std::ldexp(static_cast<double>(mantissa), static_cast<int>(shift - 2 * static_cast<long>(k)));
}

LineFidelityClosedForm closed_form_line_fidelity(std::size_t n) {
  if (n < 2) throw Error(Errc::invalid_argument, "closed form needs n >= 2");
  LineFidelityClosedForm result;
  result.shifted_value = central_binomial_ratio(n - 1);
  if (n >= 3) result.exact_value = central_binomial_ratio(n - 2);
  return result;
}

SinkNeighbourDecay check_sink_neighbour_decay(const FeedforwardGraph& g, std::size_t horizon) {
  const std::size_t n = g.size();
  if (n < 2) throw Error(Errc::precondition_failed, "needs at least two nodes");
  if (horizon < 64) throw Error(Errc::precondition_failed, "horizon must be >= 64");
  const ValidationReport v = validate(g);
  if (!v.unique_sink) throw Error(Errc::precondition_failed, "graph has extra sinks");
  if (!v.has_all_self_edges) throw Error(Errc::precondition_failed, "missing self-edges");
  const auto watched = static_cast<NodeId>(n - 2);
  if (g.in_neighbors(watched).size() <= 1) {
    throw Error(Errc::precondition_failed, "node n-2 has in-degree 1");
  }

  // Dense row iteration straight from the edge list: row <- row * Delta.
  std::vector<double> inv_in(n);
  for (NodeId i = 0; i < n; ++i) inv_in[i] = 1.0 / static_cast<double>(g.in_neighbors(i).size());
  const auto edges = g.edges();
  std::vector<double> row(n, 0.0);
  std::vector<double> next(n);
  row[n - 1] = 1.0;

  SinkNeighbourDecay result;
  result.trace.reserve(horizon + 1);
  result.trace.push_back(row[watched]);
  for (std::size_t t = 0; t < horizon; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (const Edge& e : edges) next[e.src] += row[e.dst] * inv_in[e.dst];
    row.swap(next);
    result.trace.push_back(row[watched]);
  }
  result.final_value = row[watched];
  result.decays = result.final_value < 1e-6;
  return result;
}

}  // namespace ffg
