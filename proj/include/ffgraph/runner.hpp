#pragma once

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ffgraph/config.hpp"
#include "ffgraph/generators.hpp"
#include "ffgraph/graph.hpp"
#include "ffgraph/metrics.hpp"

namespace ffg {

nlohmann::json to_json(const ValidationReport& v);
nlohmann::json to_json(const MixingReport& r);
nlohmann::json to_json(const FidelityReport& r);
nlohmann::json spectrum_json(std::span<const Rational> spectrum);

/// "step,value" CSV of a metric trace.
std::string trace_csv(std::span<const double> trace);

/// Builds the graph, validates it, runs both metrics and the spectrum, and
/// returns one JSON document. A walk that does not mix is reported as
/// mixing_time -1 together with an entry in "warnings".
nlohmann::json report(const GeneratorConfig& cfg, const MetricOptions& options = {});

struct SweepRecord {
  std::string family;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t indegree_budget = 0;
  long long mixing_time = -1;  // -1: not mixed within the horizon
  DistanceConvention mixing_convention = DistanceConvention::missmass;
  double minimax_fidelity = 0.0;
  double normalized_minimax = 0.0;
  NodeId argmin_node = 0;
  std::size_t argmax_t = 0;
  std::size_t edge_count = 0;
  double wall_time_ms = 0.0;
};

/// Seed of the k-th repetition at every sweep point.
std::uint64_t sweep_seed(std::uint64_t root_seed, std::size_t k);

/// Runs every (family, n, seed) point on a bounded worker pool. Output is
/// sorted by (family, n, seed) and does not depend on scheduling. Failing
/// points are logged to stderr and skipped.
std::vector<SweepRecord> sweep(const SweepSpec& spec);

std::string records_csv(std::span<const SweepRecord> records);

struct SummaryRow {
  std::string family;
  std::size_t n = 0;
  std::size_t seeds = 0;
  double median_mixing_time = -1;  // -1 when the median run did not mix
  double median_minimax_fidelity = 0.0;
  double median_normalized_minimax = 0.0;
  double median_edge_count = 0.0;
};

/// Per-(family, n) medians over seeds. Unmixed runs rank above every mixed one.
std::vector<SummaryRow> summarize(std::span<const SweepRecord> records);
std::string summary_csv(std::span<const SummaryRow> rows);

double median(std::vector<double> values);

struct ScalingFit {
  std::string family;
  double budget_schedule = 0.0;  // k of a k*log2(n) degree schedule, 0 if none
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares line through (log n, log median minimax fidelity) for each
/// template that has records. Throws Error(insufficient_data) when a template
/// covers fewer than three sizes or has a non-positive median.
std::vector<ScalingFit> fit_scaling(std::span<const SweepRecord> records,
                                    std::span<const FamilyTemplate> templates);
std::string fits_csv(std::span<const ScalingFit> fits);

/// Templates for the fidelity scaling study: fully connected, line, and FS
/// with expander degree k*log2(n) for each k.
std::vector<FamilyTemplate> scaling_templates(std::span<const double> ks);

std::string gallery_filename(const GeneratorConfig& cfg);

/// Writes one PGM per config into out_dir (created if needed). Throws
/// Error(io_error).
std::vector<std::filesystem::path> gallery(std::span<const GeneratorConfig> configs,
                                           const std::filesystem::path& out_dir);

/// Runs the oracle cross-checks at desk scale. The result has a boolean
/// "passed" plus one verdict object per check under "checks".
nlohmann::json run_checks();

}  // namespace ffg
