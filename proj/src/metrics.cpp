#include "ffgraph/metrics.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "ffgraph/error.hpp"

namespace ffg {

namespace {

// Values this small cannot affect any reported quantity; zeroing them keeps
// long iterations out of subnormal arithmetic.
constexpr double kFlushBelow = 1e-300;

void flush_tiny(std::span<double> v) {
  for (double& x : v) {
    if (x < kFlushBelow) x = 0.0;
  }
}

}  // namespace

WalkOperator::WalkOperator(const FeedforwardGraph& g) : g_(&g), inv_out_(g.size()) {
  for (NodeId j = 0; j < g.size(); ++j) {
    const std::size_t d = g.out_neighbors(j).size();
    if (d == 0) {
      throw Error(Errc::zero_out_degree, "node " + std::to_string(j) + " has out-degree 0");
    }
    inv_out_[j] = 1.0 / static_cast<double>(d);
  }
}

double WalkOperator::entry(NodeId i, NodeId j) const noexcept {
  return g_->has_edge(j, i) ? inv_out_[j] : 0.0;
}

void WalkOperator::apply(std::span<const double> x, std::span<double> y) const {
  for (NodeId i = 0; i < g_->size(); ++i) {
    double acc = 0.0;
    for (NodeId j : g_->in_neighbors(i)) acc += x[j] * inv_out_[j];
    y[i] = acc;
  }
}

void WalkOperator::apply_left(std::span<const double> r, std::span<double> y) const {
  for (NodeId j = 0; j < g_->size(); ++j) {
    double acc = 0.0;
    for (NodeId k : g_->out_neighbors(j)) acc += r[k];
    y[j] = acc * inv_out_[j];
  }
}

DiffusionOperator::DiffusionOperator(const FeedforwardGraph& g) : g_(&g), inv_in_(g.size()) {
  for (NodeId i = 0; i < g.size(); ++i) {
    const std::size_t d = g.in_neighbors(i).size();
    if (d == 0) {
      throw Error(Errc::zero_in_degree, "node " + std::to_string(i) + " has in-degree 0");
    }
    inv_in_[i] = 1.0 / static_cast<double>(d);
  }
}

double DiffusionOperator::entry(NodeId i, NodeId j) const noexcept {
  return g_->has_edge(j, i) ? inv_in_[i] : 0.0;
}

void DiffusionOperator::apply(std::span<const double> x, std::span<double> y) const {
  for (NodeId i = 0; i < g_->size(); ++i) {
    double acc = 0.0;
    for (NodeId j : g_->in_neighbors(i)) acc += x[j];
    y[i] = acc * inv_in_[i];
  }
}

void DiffusionOperator::apply_left(std::span<const double> r, std::span<double> y) const {
  for (NodeId i = 0; i < g_->size(); ++i) {
    double acc = 0.0;
    for (NodeId j : g_->out_neighbors(i)) acc += r[j] * inv_in_[j];
    y[i] = acc;
  }
}

namespace {

std::vector<double> indicator(std::size_t n, std::size_t at) {
  std::vector<double> v(n, 0.0);
  v[at] = 1.0;
  return v;
}

template <typename Op>
std::vector<std::vector<double>> tau_rows(const Op& op, std::size_t t_max) {
  const std::size_t n = op.graph().size();
  std::vector<std::vector<double>> rows;
  rows.reserve(t_max + 1);
  rows.push_back(indicator(n, n - 1));
  for (std::size_t t = 0; t < t_max; ++t) {
    std::vector<double> next(n);
    op.apply_left(rows.back(), next);
    flush_tiny(next);
    rows.push_back(std::move(next));
  }
  return rows;
}

}  // namespace

std::vector<std::vector<double>> tau_row_walk(const FeedforwardGraph& g, std::size_t t_max) {
  return tau_rows(WalkOperator(g), t_max);
}

std::vector<std::vector<double>> tau_row_diffusion(const FeedforwardGraph& g, std::size_t t_max) {
  return tau_rows(DiffusionOperator(g), t_max);
}

std::string_view to_string(DistanceConvention c) noexcept {
  return c == DistanceConvention::l1 ? "l1" : "missmass";
}

std::optional<DistanceConvention> parse_convention(std::string_view name) noexcept {
  if (name == "l1") return DistanceConvention::l1;
  if (name == "missmass") return DistanceConvention::missmass;
  return std::nullopt;
}

MixingReport averaged_mixing_time(const FeedforwardGraph& g, const MixingOptions& options) {
  const WalkOperator walk(g);
  const std::size_t n = g.size();

  MixingReport report;
  report.horizon = options.horizon.value_or(8 * n);
  report.convention = options.convention;
  report.epsilon = options.epsilon;
  const double scale = options.convention == DistanceConvention::l1 ? 2.0 : 1.0;

  std::vector<double> row = indicator(n, n - 1);
  std::vector<double> next(n);
  for (std::size_t t = 0;; ++t) {
    double reached = 0.0;
    for (double v : row) reached += v;
    const double distance = scale * (1.0 - reached / static_cast<double>(n));
    report.trace.push_back(distance);
    if (distance < options.epsilon) {
      report.mixing_time = t;
      break;
    }
    if (t == report.horizon) break;
    walk.apply_left(row, next);
    flush_tiny(next);
    row.swap(next);
  }
  return report;
}

FidelityReport fidelity_report(const FeedforwardGraph& g, const FidelityOptions& options) {
  const DiffusionOperator diffusion(g);
  const std::size_t n = g.size();

  FidelityReport report;
  report.horizon = options.horizon.value_or(4 * n);
  report.phi.assign(n, 0.0);
  report.argmax_t.assign(n, 0);

  std::vector<double> row = indicator(n, n - 1);
  std::vector<double> next(n);
  std::vector<double> suffix(n);
  std::size_t quiet_steps = 0;

  for (std::size_t t = 0;; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (row[i] > report.phi[i]) {
        report.phi[i] = row[i];
        report.argmax_t[i] = t;
      }
    }
    report.steps_run = t;
    if (t == report.horizon) break;

    if (options.stop == FidelityStop::certified_minimax) {
      const double minimax = *std::min_element(report.phi.begin(), report.phi.end());
      double tail = 0.0;
      for (std::size_t i = n; i-- > 0;) {
        tail += row[i];
        suffix[i] = tail;
      }
      bool frozen = true;
      for (std::size_t i = 0; i < n && frozen; ++i) {
        if (report.phi[i] == minimax && suffix[i] > minimax) frozen = false;
      }
      if (frozen) break;
    } else if (options.stop == FidelityStop::heuristic) {
      double ratio = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (report.phi[i] > 0.0) ratio = std::max(ratio, row[i] / report.phi[i]);
      }
      quiet_steps = ratio < 1e-3 ? quiet_steps + 1 : 0;
      if (quiet_steps >= 16) break;
    }

    diffusion.apply_left(row, next);
    flush_tiny(next);
    row.swap(next);
  }

  const auto it = std::min_element(report.phi.begin(), report.phi.end());
  report.minimax = *it;
  report.argmin_node = static_cast<NodeId>(it - report.phi.begin());
  report.normalized_minimax = static_cast<double>(n) * report.minimax;
  return report;
}

std::vector<Rational> walk_spectrum(const FeedforwardGraph& g) {
  std::vector<Rational> spectrum;
  spectrum.reserve(g.size());
  for (NodeId j = 0; j < g.size(); ++j) {
    const std::size_t d = g.out_neighbors(j).size();
    if (d == 0) {
      throw Error(Errc::zero_out_degree, "node " + std::to_string(j) + " has out-degree 0");
    }
    spectrum.emplace_back(1, static_cast<std::int64_t>(d));
  }
  std::sort(spectrum.begin(), spectrum.end());
  return spectrum;
}

CountMatrix path_count(const FeedforwardGraph& g, std::size_t t) {
  const std::size_t n = g.size();
  if (n > kPathCountMaxNodes) {
    throw Error(Errc::size_limit, "path_count supports at most " +
                                      std::to_string(kPathCountMaxNodes) + " nodes");
  }
  CountMatrix power(n);
  for (std::size_t i = 0; i < n; ++i) power(i, i) = 1;

  for (std::size_t step = 0; step < t; ++step) {
    CountMatrix next(n);
    // Row i of A^(s+1) is the sum of rows k of A^s over in-neighbours k of i;
    // feedforward structure keeps column j zero above row j.
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId k : g.in_neighbors(i)) {
        for (std::size_t j = 0; j <= k; ++j) {
          const std::uint64_t add = power(k, j);
          if (add == 0) continue;
          if (__builtin_add_overflow(next(i, j), add, &next(i, j))) {
            throw Error(Errc::count_overflow, "path count exceeds 64 bits");
          }
        }
      }
    }
    power = std::move(next);
  }
  return power;
}

}  // namespace ffg
