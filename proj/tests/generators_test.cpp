#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ffgraph/error.hpp"
#include "ffgraph/generators.hpp"

using namespace ffg;

namespace {

std::vector<Edge> E(std::initializer_list<Edge> edges) { return edges; }

std::vector<NodeId> in_of(const FeedforwardGraph& g, NodeId i) {
  const auto s = g.in_neighbors(i);
  return {s.begin(), s.end()};
}

}  // namespace

TEST(Schedule, DefaultIndegree) {
  EXPECT_EQ(default_indegree(256, IndegreeSchedule::k_logn(4)), 32u);
  EXPECT_EQ(default_indegree(1024, IndegreeSchedule::sqrt_n()), 32u);
  EXPECT_EQ(default_indegree(1000, IndegreeSchedule::sqrt_n()), 32u);
  EXPECT_EQ(default_indegree(17, IndegreeSchedule::constant(3)), 3u);
  EXPECT_EQ(default_indegree(100, IndegreeSchedule::k_logn(1)), 7u);
  EXPECT_EQ(default_indegree(1024, IndegreeSchedule::k_logn(4)), 40u);
  EXPECT_EQ(ceil_log2(1), 0u);
  EXPECT_EQ(ceil_log2(2), 1u);
  EXPECT_EQ(ceil_log2(1025), 11u);
}

TEST(FullyConnected, SmallCases) {
  EXPECT_EQ(gen_fully_connected(1).edges(), E({{0, 0}}));
  EXPECT_EQ(gen_fully_connected(3).edges(), E({{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}));
  const auto g = gen_fully_connected(5);
  for (NodeId i = 0; i < 5; ++i) EXPECT_EQ(g.in_degree(i), i + 1);
}

TEST(LocallyConnected, Cases) {
  EXPECT_EQ(gen_locally_connected(3, 1), gen_line(3));
  EXPECT_EQ(gen_locally_connected(4, 0).edges(), E({{0, 0}, {1, 1}, {2, 2}, {3, 3}}));
  EXPECT_EQ(in_of(gen_locally_connected(10, 2), 5), (std::vector<NodeId>{3, 4, 5}));
  for (std::size_t n : {1, 2}) EXPECT_EQ(gen_locally_connected(n, 1), gen_fully_connected(n));
  EXPECT_EQ(gen_locally_connected(6, 9), gen_fully_connected(6));
}

TEST(Star, Cases) {
  EXPECT_EQ(gen_star(1).edges(), E({{0, 0}}));
  EXPECT_EQ(gen_star(4).edges(), E({{0, 0}, {0, 3}, {1, 1}, {1, 3}, {2, 2}, {2, 3}, {3, 3}}));
  const auto v = validate(gen_star(4));
  EXPECT_TRUE(v.unique_sink);
}

TEST(ErdosRenyi, DegenerateBudgets) {
  EXPECT_EQ(gen_erdos_renyi(12, 12, 5), gen_fully_connected(12));
  EXPECT_EQ(gen_erdos_renyi(12, 40, 5), gen_fully_connected(12));
  const auto g = gen_erdos_renyi(8, 1, 5);
  EXPECT_EQ(g.edge_count(), 8u);
  EXPECT_EQ(validate(g).sinks.size(), 8u);
}

TEST(ErdosRenyi, RespectsBudgetExactly) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = gen_erdos_renyi(300, 6, seed);
    for (NodeId i = 0; i < g.size(); ++i) EXPECT_EQ(g.in_degree(i), std::min<std::size_t>(6, i + 1));
  }
}

TEST(ErdosRenyi, ExtraSinksAtScale) {
  int multi = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GeneratorConfig cfg;
    cfg.family = Family::erdos_renyi;
    cfg.n = 1024;
    cfg.seed = seed;
    if (!validate(generate(cfg)).unique_sink) ++multi;
  }
  EXPECT_EQ(multi, 20);
}

// Early predecessors should be picked as often as late ones.
TEST(ErdosRenyi, UnbiasedPredecessors) {
  std::vector<int> hits(10, 0);
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    const auto g = gen_erdos_renyi(11, 4, seed);
    for (NodeId j : g.in_neighbors(10)) {
      if (j != 10) ++hits[j];
    }
  }
  for (int h : hits) EXPECT_NEAR(h, 4000 * 3 / 10, 90);
}

TEST(OrientedExpander, Cases) {
  EXPECT_THROW(gen_oriented_expander(8, 0, 1), Error);
  try {
    GeneratorConfig cfg;
    cfg.family = Family::oriented_expander;
    cfg.expander_degree = IndegreeSchedule::constant(0);
    generate(cfg);
    FAIL() << "expected invalid_degree";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_degree);
  }
  EXPECT_EQ(gen_oriented_expander(2, 1, 3).edges(), E({{0, 0}, {0, 1}, {1, 1}}));
}

TEST(OrientedExpander, MeanNonSelfIndegree) {
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = gen_oriented_expander(512, 8, seed);
    total += static_cast<double>(g.edge_count() - g.size()) / static_cast<double>(g.size());
  }
  EXPECT_NEAR(total / 20.0, 4.0, 0.1);
}

TEST(Poisson, LocalWhenPZero) {
  const auto g = gen_poisson(4, 0.0, 2, 9);
  EXPECT_EQ(in_of(g, 0), (std::vector<NodeId>{0}));
  for (NodeId i = 1; i < 4; ++i) EXPECT_EQ(in_of(g, i), (std::vector<NodeId>{i - 1, i}));
}

TEST(Poisson, SelfEdgesOnlyWhenPOne) {
  const auto g = gen_poisson(30, 1.0, 5, 9);
  EXPECT_EQ(g.edge_count(), 30u);
}

TEST(Poisson, GapMatchesGeometricMean) {
  double gaps = 0.0;
  std::size_t count = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = gen_poisson(1024, 0.2, ceil_log2(1024), seed);
    for (NodeId i = 64; i < g.size(); ++i) {
      const auto in = in_of(g, i);
      for (std::size_t k = 0; k + 1 < in.size(); ++k) {
        gaps += static_cast<double>(in[k + 1] - in[k]);
        ++count;
      }
    }
  }
  EXPECT_NEAR(gaps / static_cast<double>(count), 1.25, 0.02);
}

TEST(Poisson, RespectsBudget) {
  const auto g = gen_poisson(500, 0.3, 7, 2);
  for (NodeId i = 0; i < g.size(); ++i) EXPECT_LE(g.in_degree(i), 7u);
}

TEST(Fs, SmallIsFullyConnected) {
  for (std::size_t n : {1, 2, 3, 4}) EXPECT_EQ(gen_fs(n, FsParams{}), gen_fully_connected(n));
}

TEST(Fs, SixteenNodesStructure) {
  const auto g = gen_fs(16, FsParams{16, 0.5, 4, 0});
  const auto blocks = partition_blocks(0, 16, fs_block_count(16));
  ASSERT_EQ(blocks.size(), 4u);
  for (const Block& b : blocks) EXPECT_EQ(b.size(), 4u);
  for (const Edge& e : g.edges()) {
    const std::size_t from = e.src / 4;
    const std::size_t to = e.dst / 4;
    EXPECT_TRUE(to == from || to == from + 1) << e.src << "->" << e.dst;
  }
  for (const Block& b : blocks) {
    for (std::size_t a = b.begin; a < b.end; ++a) {
      for (std::size_t c = a; c < b.end; ++c) {
        EXPECT_TRUE(g.has_edge(static_cast<NodeId>(a), static_cast<NodeId>(c)));
      }
    }
  }
  EXPECT_TRUE(validate(g).unique_sink);
}

TEST(Fs, BlockPartition) {
  EXPECT_EQ(fs_block_count(1024), 10u);
  const auto blocks = partition_blocks(0, 1024, 10);
  std::size_t cursor = 0;
  for (const Block& b : blocks) {
    EXPECT_EQ(b.begin, cursor);
    EXPECT_TRUE(b.size() == 102 || b.size() == 103);
    cursor = b.end;
  }
  EXPECT_EQ(cursor, 1024u);
  EXPECT_EQ(partition_blocks(0, 1024, 10), blocks);
}

TEST(Fs, IndegreeStaysLogarithmic) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GeneratorConfig cfg;
    cfg.family = Family::fs;
    cfg.n = 1024;
    cfg.seed = seed;
    const std::size_t degree = resolved_expander_degree(cfg);
    ASSERT_EQ(degree, 40u);
    const auto g = generate(cfg);
    std::size_t max_in = 0;
    for (NodeId i = 0; i < g.size(); ++i) max_in = std::max(max_in, g.in_degree(i));
    EXPECT_LE(max_in, 2 * degree);
  }
}

TEST(Fs, InvalidParameters) {
  EXPECT_THROW(gen_fs(32, FsParams{4, 1.0, 4, 0}), Error);
  EXPECT_THROW(gen_fs(32, FsParams{4, 0.0, 4, 0}), Error);
  EXPECT_THROW(gen_fs(32, FsParams{0, 0.5, 4, 0}), Error);
}

TEST(Config, ResolvedDefaults) {
  GeneratorConfig cfg;
  cfg.n = 1024;
  cfg.family = Family::poisson;
  EXPECT_EQ(resolved_budget(cfg), 10u);
  EXPECT_EQ(indegree_budget(cfg), 10u);
  cfg.family = Family::oriented_expander;
  EXPECT_EQ(resolved_expander_degree(cfg), 10u);
  cfg.family = Family::locally_connected;
  EXPECT_EQ(resolved_kappa(cfg), 1u);
  EXPECT_EQ(indegree_budget(cfg), 2u);
  cfg.family = Family::fully_connected;
  EXPECT_EQ(indegree_budget(cfg), 1024u);
}

TEST(Config, NoSelfEdges) {
  GeneratorConfig cfg;
  cfg.family = Family::line;
  cfg.n = 4;
  cfg.self_edges = false;
  EXPECT_EQ(generate(cfg).edges(), E({{0, 1}, {1, 2}, {2, 3}}));
}

TEST(Properties, DeterministicAcrossRuns) {
  for (Family f : all_families()) {
    GeneratorConfig cfg;
    cfg.family = f;
    cfg.n = 300;
    cfg.seed = 17;
    EXPECT_EQ(serialize(generate(cfg)), serialize(generate(cfg))) << to_string(f);
    cfg.seed = 18;
    const auto other = generate(cfg);
    cfg.seed = 17;
    if (f == Family::erdos_renyi || f == Family::oriented_expander || f == Family::poisson ||
        f == Family::fs) {
      EXPECT_NE(other, generate(cfg)) << to_string(f);
    }
  }
}

TEST(Properties, UniqueSinkFamilies) {
  for (Family f : {Family::fully_connected, Family::locally_connected, Family::line, Family::star,
                   Family::fs}) {
    for (std::size_t n : {2, 5, 16, 100, 513}) {
      GeneratorConfig cfg;
      cfg.family = f;
      cfg.n = n;
      cfg.seed = n;
      const auto v = validate(generate(cfg));
      EXPECT_TRUE(v.unique_sink) << to_string(f) << " n=" << n;
      EXPECT_TRUE(v.has_all_self_edges);
    }
  }
}

TEST(Properties, FamilyNamesRoundTrip) {
  for (Family f : all_families()) EXPECT_EQ(parse_family(to_string(f)), f);
  EXPECT_FALSE(parse_family("warp").has_value());
}
