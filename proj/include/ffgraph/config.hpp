#pragma once

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ffgraph/generators.hpp"
#include "ffgraph/metrics.hpp"

namespace ffg {

/// Metric settings shared by report and sweep. horizon_mult, when set,
/// replaces both default horizons with ceil(horizon_mult * n).
struct MetricOptions {
  MixingOptions mixing;
  FidelityOptions fidelity;
  std::optional<double> horizon_mult;

  MixingOptions mixing_for(std::size_t n) const;
  FidelityOptions fidelity_for(std::size_t n) const;
};

struct FamilyTemplate {
  std::string label;
  GeneratorConfig config;  // n and seed are overwritten per sweep point
};

struct SweepSpec {
  std::vector<std::size_t> sizes;
  std::vector<FamilyTemplate> families;
  std::size_t seeds_per_point = 5;
  std::uint64_t seed = 0;
  bool compute_mixing = true;
  bool compute_fidelity = true;
  MetricOptions metrics;
  std::size_t workers = 0;        // 0: hardware concurrency
  bool record_wall_time = false;  // off keeps CSV output byte-reproducible
};

/// 16, 32, ..., 1024.
std::vector<std::size_t> default_sweep_sizes();

/// The family set compared across sizes: fully connected, line, locally
/// connected (kappa = ceil(log2 n)), Erdos-Renyi, oriented expander,
/// Poisson(0.2), Poisson(0.8), star and FS.
std::vector<FamilyTemplate> default_sweep_families();

SweepSpec default_sweep_spec();

/// Label used when a template has none: family name, plus p for poisson.
std::string default_label(const GeneratorConfig& cfg);

/// k when the family's degree knob is a k*log2(n) schedule, else 0.
double schedule_k(const GeneratorConfig& cfg);

// JSON forms. Parsers reject unknown keys and ill-typed values with a
// ParseError naming the key path (e.g. "families[2].p").
GeneratorConfig parse_generator_config(const nlohmann::json& j, const std::string& path = "");
nlohmann::json to_json(const GeneratorConfig& cfg);

IndegreeSchedule parse_schedule(const nlohmann::json& j, const std::string& path);
nlohmann::json to_json(const IndegreeSchedule& schedule);

SweepSpec parse_sweep_spec(const nlohmann::json& j);
nlohmann::json to_json(const SweepSpec& spec);

/// Reads a JSON document. Throws Error(io_error) or ParseError.
nlohmann::json load_json_file(const std::filesystem::path& path);

}  // namespace ffg
