#include "ffgraph/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ffgraph/error.hpp"

namespace ffg {

using nlohmann::json;

MixingOptions MetricOptions::mixing_for(std::size_t n) const {
  MixingOptions out = mixing;
  if (horizon_mult) {
    out.horizon = static_cast<std::size_t>(std::ceil(*horizon_mult * static_cast<double>(n)));
  }
  return out;
}

FidelityOptions MetricOptions::fidelity_for(std::size_t n) const {
  FidelityOptions out = fidelity;
  if (horizon_mult) {
    out.horizon = static_cast<std::size_t>(std::ceil(*horizon_mult * static_cast<double>(n)));
  }
  return out;
}

std::vector<std::size_t> default_sweep_sizes() {
  std::vector<std::size_t> sizes;
  for (std::size_t n = 16; n <= 1024; n *= 2) sizes.push_back(n);
  return sizes;
}

std::string default_label(const GeneratorConfig& cfg) {
  std::string label(to_string(cfg.family));
  if (cfg.family == Family::poisson) {
    std::ostringstream os;
    os << "_" << cfg.p;
    label += os.str();
  }
  return label;
}

std::vector<FamilyTemplate> default_sweep_families() {
  auto make = [](Family f) {
    GeneratorConfig c;
    c.family = f;
    return c;
  };
  std::vector<FamilyTemplate> out;
  out.push_back({"fully_connected", make(Family::fully_connected)});
  out.push_back({"line", make(Family::line)});
  {
    auto c = make(Family::locally_connected);
    c.kappa = IndegreeSchedule::k_logn(1);
    out.push_back({"locally_connected", c});
  }
  {
    auto c = make(Family::erdos_renyi);
    c.budget = IndegreeSchedule::k_logn(1);
    out.push_back({"erdos_renyi", c});
  }
  {
    auto c = make(Family::oriented_expander);
    c.expander_degree = IndegreeSchedule::k_logn(1);
    out.push_back({"oriented_expander", c});
  }
  for (double p : {0.2, 0.8}) {
    auto c = make(Family::poisson);
    c.p = p;
    c.budget = IndegreeSchedule::k_logn(1);
    out.push_back({default_label(c), c});
  }
  out.push_back({"star", make(Family::star)});
  {
    auto c = make(Family::fs);
    c.expander_degree = IndegreeSchedule::k_logn(4);
    c.fs_decay_ratio = 0.5;
    c.fs_base_threshold = 4;
    out.push_back({"fs", c});
  }
  return out;
}

SweepSpec default_sweep_spec() {
  SweepSpec spec;
  spec.sizes = default_sweep_sizes();
  spec.families = default_sweep_families();
  spec.metrics.fidelity.stop = FidelityStop::certified_minimax;
  return spec;
}

double schedule_k(const GeneratorConfig& cfg) {
  const std::optional<IndegreeSchedule>* knob = nullptr;
  switch (cfg.family) {
    case Family::locally_connected: knob = &cfg.kappa; break;
    case Family::erdos_renyi:
    case Family::poisson: knob = &cfg.budget; break;
    case Family::oriented_expander:
    case Family::fs: knob = &cfg.expander_degree; break;
    default: return 0.0;
  }
  if (knob->has_value()) {
    return (*knob)->kind == IndegreeSchedule::Kind::k_logn ? (*knob)->value : 0.0;
  }
  // Unset knobs fall back to k_logn defaults.
  if (cfg.family == Family::fs) return 4.0;
  if (cfg.family == Family::locally_connected) return 0.0;
  return 1.0;
}

namespace {

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what, 0, Errc::parse_error, path);
}

std::uint64_t as_uint(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) {
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
    fail(path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

}  // namespace

IndegreeSchedule parse_schedule(const json& j, const std::string& path) {
  if (j.is_number()) {
    return IndegreeSchedule::constant(static_cast<std::size_t>(as_uint(j, path)));
  }
  if (!j.is_object()) fail(path, "expected an integer or a schedule object");
  if (!j.contains("schedule")) fail(join(path, "schedule"), "missing key");
  const std::string kind = as_string(j.at("schedule"), join(path, "schedule"));
  IndegreeSchedule out;
  std::string param;
  if (kind == "constant") {
    out.kind = IndegreeSchedule::Kind::constant;
    param = "c";
  } else if (kind == "k_logn") {
    out.kind = IndegreeSchedule::Kind::k_logn;
    param = "k";
  } else if (kind == "sqrt_n") {
    out.kind = IndegreeSchedule::Kind::sqrt_n;
  } else {
    fail(join(path, "schedule"), "unknown schedule \"" + kind + "\"");
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "schedule") continue;
    if (key != param || param.empty()) fail(join(path, key), "unknown key");
    out.value = as_double(value, join(path, key));
    if (out.value < 0) fail(join(path, key), "must be >= 0");
  }
  if (!param.empty() && !j.contains(param)) fail(join(path, param), "missing key");
  return out;
}

json to_json(const IndegreeSchedule& s) {
  switch (s.kind) {
    case IndegreeSchedule::Kind::constant:
      return json::object({{"schedule", "constant"}, {"c", s.value}});
    case IndegreeSchedule::Kind::k_logn:
      return json::object({{"schedule", "k_logn"}, {"k", s.value}});
    case IndegreeSchedule::Kind::sqrt_n:
      return json::object({{"schedule", "sqrt_n"}});
  }
  return {};
}

GeneratorConfig parse_generator_config(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  GeneratorConfig cfg;
  for (const auto& [key, value] : j.items()) {
    const std::string at = join(path, key);
    if (key == "family") {
      const std::string name = as_string(value, at);
      const auto family = parse_family(name);
      if (!family) fail(at, "unknown family \"" + name + "\"");
      cfg.family = *family;
    } else if (key == "n") {
      cfg.n = static_cast<std::size_t>(as_uint(value, at));
      if (cfg.n == 0) fail(at, "must be >= 1");
    } else if (key == "kappa") {
      cfg.kappa = parse_schedule(value, at);
    } else if (key == "p") {
      cfg.p = as_double(value, at);
      if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) fail(at, "must lie in [0, 1]");
    } else if (key == "budget") {
      cfg.budget = parse_schedule(value, at);
    } else if (key == "expander_degree") {
      cfg.expander_degree = parse_schedule(value, at);
    } else if (key == "fs_decay_ratio") {
      cfg.fs_decay_ratio = as_double(value, at);
      if (!(cfg.fs_decay_ratio > 0.0 && cfg.fs_decay_ratio < 1.0)) fail(at, "must lie in (0, 1)");
    } else if (key == "fs_base_threshold") {
      cfg.fs_base_threshold = static_cast<std::size_t>(as_uint(value, at));
      if (cfg.fs_base_threshold == 0) fail(at, "must be >= 1");
    } else if (key == "seed") {
      cfg.seed = as_uint(value, at);
    } else if (key == "self_edges") {
      cfg.self_edges = as_bool(value, at);
    } else {
      fail(at, "unknown key");
    }
  }
  return cfg;
}

json to_json(const GeneratorConfig& cfg) {
  json j = {
      {"family", std::string(to_string(cfg.family))},
      {"n", cfg.n},
      {"p", cfg.p},
      {"fs_decay_ratio", cfg.fs_decay_ratio},
      {"fs_base_threshold", cfg.fs_base_threshold},
      {"seed", cfg.seed},
      {"self_edges", cfg.self_edges},
  };
  if (cfg.kappa) j["kappa"] = to_json(*cfg.kappa);
  if (cfg.budget) j["budget"] = to_json(*cfg.budget);
  if (cfg.expander_degree) j["expander_degree"] = to_json(*cfg.expander_degree);
  return j;
}

namespace {

std::string_view to_string(FidelityStop stop) {
  switch (stop) {
    case FidelityStop::none: return "none";
    case FidelityStop::certified_minimax: return "certified_minimax";
    case FidelityStop::heuristic: return "heuristic";
  }
  return "none";
}

}  // namespace

SweepSpec parse_sweep_spec(const json& j) {
  if (!j.is_object()) fail("<root>", "expected an object");
  SweepSpec spec = default_sweep_spec();
  for (const auto& [key, value] : j.items()) {
    const std::string& at = key;
    if (key == "sizes") {
      if (!value.is_array()) fail(at, "expected an array");
      spec.sizes.clear();
      for (std::size_t k = 0; k < value.size(); ++k) {
        spec.sizes.push_back(
            static_cast<std::size_t>(as_uint(value[k], at + "[" + std::to_string(k) + "]")));
      }
    } else if (key == "families") {
      if (!value.is_array()) fail(at, "expected an array");
      spec.families.clear();
      for (std::size_t k = 0; k < value.size(); ++k) {
        const std::string item = at + "[" + std::to_string(k) + "]";
        json body = value[k];
        if (!body.is_object()) fail(item, "expected an object");
        std::string label;
        if (body.contains("label")) {
          label = as_string(body["label"], item + ".label");
          body.erase("label");
        }
        FamilyTemplate t{label, parse_generator_config(body, item)};
        if (t.label.empty()) t.label = default_label(t.config);
        spec.families.push_back(std::move(t));
      }
    } else if (key == "seeds_per_point") {
      spec.seeds_per_point = static_cast<std::size_t>(as_uint(value, at));
    } else if (key == "seed") {
      spec.seed = as_uint(value, at);
    } else if (key == "metrics") {
      if (!value.is_array()) fail(at, "expected an array");
      spec.compute_mixing = false;
      spec.compute_fidelity = false;
      for (const auto& m : value) {
        const std::string name = as_string(m, at);
        if (name == "mixing") {
          spec.compute_mixing = true;
        } else if (name == "fidelity") {
          spec.compute_fidelity = true;
        } else {
          fail(at, "unknown metric \"" + name + "\"");
        }
      }
    } else if (key == "convention") {
      const auto c = parse_convention(as_string(value, at));
      if (!c) fail(at, "expected \"l1\" or \"missmass\"");
      spec.metrics.mixing.convention = *c;
    } else if (key == "epsilon") {
      spec.metrics.mixing.epsilon = as_double(value, at);
      if (!(spec.metrics.mixing.epsilon > 0.0)) fail(at, "must be > 0");
    } else if (key == "horizon_mult") {
      spec.metrics.horizon_mult = as_double(value, at);
      if (!(*spec.metrics.horizon_mult > 0.0)) fail(at, "must be > 0");
    } else if (key == "fidelity_stop") {
      const std::string s = as_string(value, at);
      if (s == "none") {
        spec.metrics.fidelity.stop = FidelityStop::none;
      } else if (s == "certified_minimax") {
        spec.metrics.fidelity.stop = FidelityStop::certified_minimax;
      } else if (s == "heuristic") {
        spec.metrics.fidelity.stop = FidelityStop::heuristic;
      } else {
        fail(at, "unknown stop rule \"" + s + "\"");
      }
    } else if (key == "workers") {
      spec.workers = static_cast<std::size_t>(as_uint(value, at));
    } else if (key == "record_wall_time") {
      spec.record_wall_time = as_bool(value, at);
    } else {
      fail(at, "unknown key");
    }
  }
  if (spec.sizes.empty()) fail("sizes", "must not be empty");
  for (std::size_t k = 0; k < spec.sizes.size(); ++k) {
    if (spec.sizes[k] == 0) fail("sizes", "sizes must be >= 1");
    if (k > 0 && spec.sizes[k] <= spec.sizes[k - 1]) fail("sizes", "must be strictly increasing");
  }
  if (spec.seeds_per_point == 0) fail("seeds_per_point", "must be >= 1");
  return spec;
}

json to_json(const SweepSpec& spec) {
  json families = json::array();
  for (const auto& t : spec.families) {
    json f = to_json(t.config);
    f.erase("n");
    f.erase("seed");
    f["label"] = t.label;
    families.push_back(std::move(f));
  }
  json metrics = json::array();
  if (spec.compute_mixing) metrics.push_back("mixing");
  if (spec.compute_fidelity) metrics.push_back("fidelity");
  json j = {
      {"sizes", spec.sizes},
      {"families", families},
      {"seeds_per_point", spec.seeds_per_point},
      {"seed", spec.seed},
      {"metrics", metrics},
      {"convention", std::string(to_string(spec.metrics.mixing.convention))},
      {"epsilon", spec.metrics.mixing.epsilon},
      {"fidelity_stop", std::string(to_string(spec.metrics.fidelity.stop))},
      {"workers", spec.workers},
      {"record_wall_time", spec.record_wall_time},
  };
  if (spec.metrics.horizon_mult) j["horizon_mult"] = *spec.metrics.horizon_mult;
  return j;
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

}  // namespace ffg
