#include "ffgraph/generators.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>

#include "ffgraph/error.hpp"
#include "ffgraph/rng.hpp"

namespace ffg {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 8> kFamilyNames{{
    {Family::fully_connected, "fully_connected"},
    {Family::locally_connected, "locally_connected"},
    {Family::line, "line"},
    {Family::star, "star"},
    {Family::erdos_renyi, "erdos_renyi"},
    {Family::oriented_expander, "oriented_expander"},
    {Family::poisson, "poisson"},
    {Family::fs, "fs"},
}};

std::size_t isqrt_ceil(std::size_t n) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r * r == n ? r : r + 1;
}

void require(bool ok, Errc code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

void add_self_edges(std::size_t n, std::vector<Edge>& edges) {
  for (std::size_t i = 0; i < n; ++i) {
    edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i)});
  }
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  for (const auto& [f, name] : kFamilyNames) {
    if (f == family) return name;
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) noexcept {
  for (const auto& [f, n] : kFamilyNames) {
    if (n == name) return f;
  }
  return std::nullopt;
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> families = [] {
    std::vector<Family> v;
    for (const auto& entry : kFamilyNames) v.push_back(entry.first);
    return v;
  }();
  return families;
}

std::size_t ceil_log2(std::size_t n) noexcept {
  return n <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(n - 1));
}

std::size_t default_indegree(std::size_t n, const IndegreeSchedule& schedule) {
  require(n >= 1, Errc::invalid_argument, "default_indegree: n must be >= 1");
  switch (schedule.kind) {
    case IndegreeSchedule::Kind::constant:
      require(schedule.value >= 0, Errc::invalid_argument, "constant schedule must be >= 0");
      return static_cast<std::size_t>(std::llround(schedule.value));
    case IndegreeSchedule::Kind::k_logn: {
      require(schedule.value >= 0, Errc::invalid_argument, "k_logn schedule needs k >= 0");
      // Powers of two get an exact logarithm so k*log2(n) lands on integers.
      const double lg = std::has_single_bit(n) ? static_cast<double>(std::bit_width(n) - 1)
                                               : std::log2(static_cast<double>(n));
      const double x = schedule.value * lg;
      const double nearest = std::round(x);
      if (std::abs(x - nearest) < 1e-9) return static_cast<std::size_t>(nearest);
      return static_cast<std::size_t>(std::ceil(x));
    }
    case IndegreeSchedule::Kind::sqrt_n:
      return isqrt_ceil(n);
  }
  return 0;
}

namespace {

std::size_t resolve_positive(const std::optional<IndegreeSchedule>& s, std::size_t n,
                             const IndegreeSchedule& fallback, std::string_view what) {
  const IndegreeSchedule& schedule = s ? *s : fallback;
  if (schedule.kind == IndegreeSchedule::Kind::constant) {
    const std::size_t v = default_indegree(n, schedule);
    require(v >= 1, Errc::invalid_argument, std::string(what) + " must be >= 1");
    return v;
  }
  return std::max<std::size_t>(1, default_indegree(n, schedule));
}

}  // namespace

std::size_t resolved_kappa(const GeneratorConfig& cfg) {
  return cfg.kappa ? default_indegree(cfg.n, *cfg.kappa) : 1;
}

std::size_t resolved_budget(const GeneratorConfig& cfg) {
  return resolve_positive(cfg.budget, cfg.n, IndegreeSchedule::k_logn(1), "budget");
}

std::size_t resolved_expander_degree(const GeneratorConfig& cfg) {
  if (cfg.expander_degree && cfg.expander_degree->kind == IndegreeSchedule::Kind::constant &&
      default_indegree(cfg.n, *cfg.expander_degree) == 0) {
    throw Error(Errc::invalid_degree, "expander_degree must be >= 1");
  }
  const auto fallback = cfg.family == Family::fs ? IndegreeSchedule::k_logn(4)
                                                 : IndegreeSchedule::k_logn(1);
  return resolve_positive(cfg.expander_degree, cfg.n, fallback, "expander_degree");
}

std::size_t indegree_budget(const GeneratorConfig& cfg) {
  switch (cfg.family) {
    case Family::fully_connected: return cfg.n;
    case Family::locally_connected: return resolved_kappa(cfg) + 1;
    case Family::line: return 2;
    case Family::star: return 2;
    case Family::erdos_renyi:
    case Family::poisson: return resolved_budget(cfg);
    case Family::oriented_expander:
    case Family::fs: return resolved_expander_degree(cfg);
  }
  return 0;
}

FeedforwardGraph gen_fully_connected(std::size_t n) {
  require(n >= 1, Errc::invalid_argument, "n must be >= 1");
  std::vector<Edge> edges;
  edges.reserve(n * (n + 1) / 2);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      edges.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b)});
    }
  }
  return FeedforwardGraph::build(n, edges);
}

FeedforwardGraph gen_locally_connected(std::size_t n, std::size_t kappa) {
  require(n >= 1, Errc::invalid_argument, "n must be >= 1");
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t last = std::min(n - 1, a + kappa);
    for (std::size_t b = a; b <= last; ++b) {
      edges.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b)});
    }
  }
  return FeedforwardGraph::build(n, edges);
}

FeedforwardGraph gen_line(std::size_t n) { return gen_locally_connected(n, 1); }

FeedforwardGraph gen_star(std::size_t n) {
  require(n >= 1, Errc::invalid_argument, "n must be >= 1");
  std::vector<Edge> edges;
  const auto tau = static_cast<NodeId>(n - 1);
  for (NodeId i = 0; i < n; ++i) {
    edges.push_back({i, i});
    if (i != tau) edges.push_back({i, tau});
  }
  return FeedforwardGraph::build(n, edges);
}

FeedforwardGraph gen_erdos_renyi(std::size_t n, std::size_t budget, std::uint64_t seed) {
  require(n >= 1, Errc::invalid_argument, "n must be >= 1");
  require(budget >= 1, Errc::invalid_argument, "budget must be >= 1");
  const RngStream root = RngStream(seed).substream(StreamFamily::erdos_renyi);
  std::vector<Edge> edges;
  std::vector<char> chosen(n, 0);
  std::vector<NodeId> picked;
  for (std::size_t i = 0; i < n; ++i) {
    const auto dst = static_cast<NodeId>(i);
    edges.push_back({dst, dst});
    const std::size_t k = std::min(budget - 1, i);
    if (k == 0) continue;
    RngStream rng = root.substream(i);
    // Floyd's sampling: k distinct values from [0, i), each subset equally likely.
    picked.clear();
    for (std::size_t j = i - k; j < i; ++j) {
      const auto t = static_cast<std::size_t>(rng.below(j + 1));
      const std::size_t v = chosen[t] ? j : t;
      chosen[v] = 1;
      picked.push_back(static_cast<NodeId>(v));
    }
    for (NodeId v : picked) {
      chosen[v] = 0;
      edges.push_back({v, dst});
    }
  }
  return FeedforwardGraph::build(n, edges);
}

FeedforwardGraph gen_oriented_expander(std::size_t n, std::size_t degree, std::uint64_t seed) {
  require(degree >= 1, Errc::invalid_degree, "expander degree must be >= 1");
  require(n >= 2, Errc::invalid_argument, "oriented expander needs n >= 2");
  const RngStream root = RngStream(seed).substream(StreamFamily::oriented_expander);

  std::vector<NodeId> label(n);
  std::iota(label.begin(), label.end(), NodeId{0});
  RngStream relabel = root.substream({1});
  relabel.shuffle(std::span<NodeId>(label));

  std::vector<Edge> edges;
  edges.reserve(n + degree * (n / 2));
  std::vector<NodeId> perm(n);
  for (std::size_t m = 0; m < degree; ++m) {
    std::iota(perm.begin(), perm.end(), NodeId{0});
    RngStream rng = root.substream({0, m});
    rng.shuffle(std::span<NodeId>(perm));
    // Odd n leaves perm.back() unmatched in this round.
    for (std::size_t k = 0; k + 1 < n; k += 2) {
      const NodeId a = label[perm[k]];
      const NodeId b = label[perm[k + 1]];
      edges.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  add_self_edges(n, edges);
  return FeedforwardGraph::build(n, edges);
}

FeedforwardGraph gen_poisson(std::size_t n, double p, std::size_t budget, std::uint64_t seed) {
  require(n >= 1, Errc::invalid_argument, "n must be >= 1");
  require(p >= 0.0 && p <= 1.0, Errc::invalid_argument, "p must lie in [0, 1]");
  require(budget >= 1, Errc::invalid_argument, "budget must be >= 1");
  const RngStream root = RngStream(seed).substream(StreamFamily::poisson);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    const auto dst = static_cast<NodeId>(i);
    edges.push_back({dst, dst});
    std::size_t count = 1;
    RngStream rng = root.substream(i);
    for (std::size_t j = i; j-- > 0 && count < budget;) {
      if (rng.uniform01() > p) {
        edges.push_back({static_cast<NodeId>(j), dst});
        ++count;
      }
    }
  }
  return FeedforwardGraph::build(n, edges);
}

std::vector<Block> partition_blocks(std::size_t begin, std::size_t size, std::size_t count) {
  require(count >= 1 && count <= std::max<std::size_t>(size, 1), Errc::invalid_argument,
          "partition_blocks: need 1 <= count <= size");
  std::vector<Block> blocks;
  blocks.reserve(count);
  const std::size_t base = size / count;
  const std::size_t extra = size % count;
  std::size_t cursor = begin;
  for (std::size_t b = 0; b < count; ++b) {
    const std::size_t len = base + (b < extra ? 1 : 0);
    blocks.push_back({cursor, cursor + len});
    cursor += len;
  }
  return blocks;
}

std::size_t fs_block_count(std::size_t size) noexcept {
  return std::min(size, std::max<std::size_t>(2, ceil_log2(size)));
}

namespace {

class FsBuilder {
 public:
  FsBuilder(const FsParams& params, std::vector<Edge>& edges)
      : params_(params), edges_(edges),
        root_(RngStream(params.seed).substream(StreamFamily::fs)) {}

  void fill(Block range, std::size_t degree, std::size_t level) {
    if (range.size() <= params_.base_threshold || range.size() < 2) {
      for (std::size_t a = range.begin; a < range.end; ++a) {
        for (std::size_t b = a; b < range.end; ++b) {
          edges_.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b)});
        }
      }
      return;
    }
    const auto blocks = partition_blocks(range.begin, range.size(), fs_block_count(range.size()));
    for (std::size_t b = 0; b + 1 < blocks.size(); ++b) {
      const std::size_t k = std::min(degree, blocks[b + 1].size());
      connect(blocks[b], blocks[b + 1], k, level);
    }
    const std::size_t level_k = std::min(degree, blocks.front().size());
    const auto child = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(static_cast<double>(level_k) * params_.decay_ratio)));
    for (const Block& block : blocks) fill(block, child, level + 1);
  }

 private:
  // Union of k random matchings from `from` into `to`. When the sides differ
  // in size, the larger side is permuted in full and the smaller side is
  // reused cyclically, so every node on both sides gets at least one edge.
  void connect(Block from, Block to, std::size_t k, std::size_t level) {
    const bool from_larger = from.size() >= to.size();
    const Block large = from_larger ? from : to;
    const Block small = from_larger ? to : from;
    std::vector<NodeId> large_perm(large.size());
    std::vector<NodeId> small_perm(small.size());
    for (std::size_t m = 0; m < k; ++m) {
      RngStream rng = root_.substream({level, from.begin, m});
      std::iota(large_perm.begin(), large_perm.end(), static_cast<NodeId>(large.begin));
      std::iota(small_perm.begin(), small_perm.end(), static_cast<NodeId>(small.begin));
      rng.shuffle(std::span<NodeId>(large_perm));
      rng.shuffle(std::span<NodeId>(small_perm));
      for (std::size_t idx = 0; idx < large_perm.size(); ++idx) {
        const NodeId a = large_perm[idx];
        const NodeId b = small_perm[idx % small_perm.size()];
        edges_.push_back(from_larger ? Edge{a, b} : Edge{b, a});
      }
    }
  }

  const FsParams& params_;
  std::vector<Edge>& edges_;
  RngStream root_;
};

}  // namespace

FeedforwardGraph gen_fs(std::size_t n, const FsParams& params) {
  require(n >= 1, Errc::invalid_argument, "n must be >= 1");
  require(params.decay_ratio > 0.0 && params.decay_ratio < 1.0, Errc::invalid_argument,
          "fs_decay_ratio must lie in (0, 1)");
  require(params.expander_degree >= 1, Errc::invalid_degree, "expander degree must be >= 1");
  require(params.base_threshold >= 1, Errc::invalid_argument, "fs_base_threshold must be >= 1");

  std::vector<Edge> edges;
  FsBuilder(params, edges).fill({0, n}, params.expander_degree, 0);
  add_self_edges(n, edges);

  auto g = FeedforwardGraph::build(n, edges);
  const auto report = validate(g);
  if (report.unique_sink) return g;
  for (NodeId s : report.sinks) {
    if (s + 1 < n) edges.push_back({s, s + 1});
  }
  return FeedforwardGraph::build(n, edges);
}

namespace {

FeedforwardGraph strip_self_edges(const FeedforwardGraph& g) {
  auto edges = g.edges();
  std::erase_if(edges, [](const Edge& e) { return e.src == e.dst; });
  return FeedforwardGraph::build(g.size(), edges);
}

}  // namespace

FeedforwardGraph generate(const GeneratorConfig& cfg) {
  require(cfg.n >= 1, Errc::invalid_argument, "n must be >= 1");
  FeedforwardGraph g = [&] {
    switch (cfg.family) {
      case Family::fully_connected: return gen_fully_connected(cfg.n);
      case Family::locally_connected: return gen_locally_connected(cfg.n, resolved_kappa(cfg));
      case Family::line: return gen_line(cfg.n);
      case Family::star: return gen_star(cfg.n);
      case Family::erdos_renyi: return gen_erdos_renyi(cfg.n, resolved_budget(cfg), cfg.seed);
      case Family::oriented_expander:
        return gen_oriented_expander(cfg.n, resolved_expander_degree(cfg), cfg.seed);
      case Family::poisson: return gen_poisson(cfg.n, cfg.p, resolved_budget(cfg), cfg.seed);
      case Family::fs:
        return gen_fs(cfg.n, FsParams{resolved_expander_degree(cfg), cfg.fs_decay_ratio,
                                      cfg.fs_base_threshold, cfg.seed});
    }
    throw Error(Errc::invalid_argument, "unknown family");
  }();
  return cfg.self_edges ? g : strip_self_edges(g);
}

}  // namespace ffg
