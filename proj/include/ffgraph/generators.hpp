#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ffgraph/graph.hpp"

namespace ffg {

enum class Family {
  fully_connected,
  locally_connected,
  line,
  star,
  erdos_renyi,
  oriented_expander,
  poisson,
  fs,
};

std::string_view to_string(Family family) noexcept;
std::optional<Family> parse_family(std::string_view name) noexcept;
const std::vector<Family>& all_families();

/// Size-dependent degree rule: a constant, ceil(k * log2 n), or ceil(sqrt n).
struct IndegreeSchedule {
  enum class Kind { constant, k_logn, sqrt_n };
  Kind kind = Kind::constant;
  double value = 1.0;  // c for constant, k for k_logn; unused for sqrt_n

  static IndegreeSchedule constant(std::size_t c) { return {Kind::constant, double(c)}; }
  static IndegreeSchedule k_logn(double k) { return {Kind::k_logn, k}; }
  static IndegreeSchedule sqrt_n() { return {Kind::sqrt_n, 0.0}; }

  friend bool operator==(const IndegreeSchedule&, const IndegreeSchedule&) = default;
};

std::size_t default_indegree(std::size_t n, const IndegreeSchedule& schedule);

/// ceil(log2 n) for n >= 1 (0 for n == 1).
std::size_t ceil_log2(std::size_t n) noexcept;

/// Family tag plus every knob any family understands. Knobs a family does not
/// use are ignored. The degree-like knobs are schedules so one template can
/// describe a whole size sweep; an unset knob takes the family default.
struct GeneratorConfig {
  Family family = Family::fully_connected;
  std::size_t n = 16;
  std::optional<IndegreeSchedule> kappa;            // locally_connected; default 1
  double p = 0.2;                                   // poisson
  std::optional<IndegreeSchedule> budget;           // erdos_renyi, poisson; default ceil(log2 n)
  std::optional<IndegreeSchedule> expander_degree;  // oriented_expander: ceil(log2 n); fs: 4 log2 n
  double fs_decay_ratio = 0.5;
  std::size_t fs_base_threshold = 4;
  std::uint64_t seed = 0;
  bool self_edges = true;

  friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

// Resolved knob values for cfg.n.
std::size_t resolved_kappa(const GeneratorConfig& cfg);
std::size_t resolved_budget(const GeneratorConfig& cfg);
std::size_t resolved_expander_degree(const GeneratorConfig& cfg);

/// The family's own in-degree knob, resolved (n for fully_connected, 2 for
/// line and star, kappa + 1 for locally_connected).
std::size_t indegree_budget(const GeneratorConfig& cfg);

/// Dispatches on cfg.family. When cfg.self_edges is false the self-edges are
/// stripped after construction.
FeedforwardGraph generate(const GeneratorConfig& cfg);

FeedforwardGraph gen_fully_connected(std::size_t n);
FeedforwardGraph gen_locally_connected(std::size_t n, std::size_t kappa);
FeedforwardGraph gen_line(std::size_t n);
FeedforwardGraph gen_star(std::size_t n);
FeedforwardGraph gen_erdos_renyi(std::size_t n, std::size_t budget, std::uint64_t seed);
FeedforwardGraph gen_oriented_expander(std::size_t n, std::size_t degree, std::uint64_t seed);
FeedforwardGraph gen_poisson(std::size_t n, double p, std::size_t budget, std::uint64_t seed);

struct FsParams {
  std::size_t expander_degree = 4;
  double decay_ratio = 0.5;
  std::size_t base_threshold = 4;
  std::uint64_t seed = 0;
};

FeedforwardGraph gen_fs(std::size_t n, const FsParams& params);

/// Half-open node range [begin, end).
struct Block {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const Block&, const Block&) = default;
};

/// Contiguous partition of [begin, begin + size) into `count` blocks whose
/// sizes differ by at most one; larger blocks come first.
std::vector<Block> partition_blocks(std::size_t begin, std::size_t size, std::size_t count);

/// Number of blocks the FS construction uses for a range of `size` nodes:
/// max(2, ceil(log2 size)), capped at size.
std::size_t fs_block_count(std::size_t size) noexcept;

}  // namespace ffg
