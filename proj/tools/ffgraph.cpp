#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ffgraph/config.hpp"
#include "ffgraph/error.hpp"
#include "ffgraph/generators.hpp"
#include "ffgraph/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitParse = 3;

struct SharedFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::string> convention;
  std::optional<double> epsilon;
  std::optional<double> horizon_mult;
  std::optional<std::string> fidelity_stop;
};

struct GeneratorFlags {
  std::optional<std::string> family;
  std::optional<std::size_t> n;
  std::optional<double> kappa;
  std::optional<double> p;
  std::optional<double> budget;
  std::optional<double> expander_degree;
  std::optional<double> fs_decay_ratio;
  std::optional<std::size_t> fs_base_threshold;
  bool no_self_edges = false;
};

void add_shared(CLI::App* cmd, SharedFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file; flags override its keys");
  cmd->add_option("--seed", f.seed, "root seed");
  cmd->add_option("--out", f.out, "output directory (stdout when omitted, where applicable)");
  cmd->add_option("--convention", f.convention, "mixing distance convention")
      ->check(CLI::IsMember({"l1", "missmass"}));
  cmd->add_option("--epsilon", f.epsilon, "mixing threshold");
  cmd->add_option("--horizon-mult,--horizon_mult", f.horizon_mult,
                  "metric horizons become ceil(mult * n)");
  cmd->add_option("--fidelity-stop,--fidelity_stop", f.fidelity_stop, "fidelity early stop rule")
      ->check(CLI::IsMember({"none", "certified_minimax", "heuristic"}));
}

void add_generator(CLI::App* cmd, GeneratorFlags& f) {
  cmd->add_option("--family", f.family, "graph family");
  cmd->add_option("--n", f.n, "number of nodes");
  cmd->add_option("--kappa", f.kappa, "locally connected window (constant)");
  cmd->add_option("--p", f.p, "poisson skip probability / erdos_renyi edge probability");
  cmd->add_option("--budget", f.budget, "in-degree budget (constant)");
  cmd->add_option("--expander-degree,--expander_degree", f.expander_degree,
                  "expander degree (constant)");
  cmd->add_option("--fs-decay-ratio,--fs_decay_ratio", f.fs_decay_ratio, "FS degree decay ratio");
  cmd->add_option("--fs-base-threshold,--fs_base_threshold", f.fs_base_threshold,
                  "FS block size filled fully connected");
  cmd->add_flag("--no-self-edges,--no_self_edges", f.no_self_edges, "drop self-edges");
}

json number(double v) {
  if (v >= 0.0 && v == std::floor(v) && v < 9.0e15) return json(static_cast<std::uint64_t>(v));
  return json(v);
}

void overlay_generator(json& j, const GeneratorFlags& f, std::optional<std::uint64_t> seed) {
  if (f.family) j["family"] = *f.family;
  if (f.n) j["n"] = *f.n;
  if (f.kappa) j["kappa"] = number(*f.kappa);
  if (f.p) j["p"] = *f.p;
  if (f.budget) j["budget"] = number(*f.budget);
  if (f.expander_degree) j["expander_degree"] = number(*f.expander_degree);
  if (f.fs_decay_ratio) j["fs_decay_ratio"] = *f.fs_decay_ratio;
  if (f.fs_base_threshold) j["fs_base_threshold"] = *f.fs_base_threshold;
  if (f.no_self_edges) j["self_edges"] = false;
  if (seed) j["seed"] = *seed;
}

void overlay_metrics(json& j, const SharedFlags& f) {
  if (f.convention) j["convention"] = *f.convention;
  if (f.epsilon) j["epsilon"] = *f.epsilon;
  if (f.horizon_mult) j["horizon_mult"] = *f.horizon_mult;
  if (f.fidelity_stop) j["fidelity_stop"] = *f.fidelity_stop;
}

json load_or_empty(const std::string& path) {
  if (path.empty()) return json::object();
  json j = ffg::load_json_file(path);
  if (!j.is_object()) throw ffg::ParseError("config root must be an object", 0);
  return j;
}

ffg::MetricOptions metric_options(const SharedFlags& f) {
  ffg::MetricOptions m;
  if (f.convention) m.mixing.convention = *ffg::parse_convention(*f.convention);
  if (f.epsilon) {
    if (!(*f.epsilon > 0.0 && *f.epsilon < 1.0)) {
      throw ffg::Error(ffg::Errc::invalid_argument, "epsilon must be in (0, 1)");
    }
    m.mixing.epsilon = *f.epsilon;
  }
  if (f.horizon_mult) {
    if (!(*f.horizon_mult > 0.0)) {
      throw ffg::Error(ffg::Errc::invalid_argument, "horizon-mult must be > 0");
    }
    m.horizon_mult = *f.horizon_mult;
  }
  if (f.fidelity_stop) {
    if (*f.fidelity_stop == "certified_minimax") {
      m.fidelity.stop = ffg::FidelityStop::certified_minimax;
    } else if (*f.fidelity_stop == "heuristic") {
      m.fidelity.stop = ffg::FidelityStop::heuristic;
    }
  }
  return m;
}

void write_file(const fs::path& path, const std::string& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << body;
  if (!out) throw ffg::Error(ffg::Errc::io_error, "cannot write " + path.string());
}

void emit(const SharedFlags& f, const std::string& name, const std::string& body) {
  if (f.out.empty()) {
    std::cout << body;
  } else {
    write_file(fs::path(f.out) / name, body);
    std::cerr << "wrote " << (fs::path(f.out) / name).string() << "\n";
  }
}

int run_report(const SharedFlags& shared, const GeneratorFlags& gen) {
  json j = load_or_empty(shared.config);
  overlay_generator(j, gen, shared.seed);
  const ffg::GeneratorConfig cfg = ffg::parse_generator_config(j);
  const json doc = ffg::report(cfg, metric_options(shared));
  emit(shared, "report.json", doc.dump(2) + "\n");
  return kExitOk;
}

struct SweepFlags {
  std::vector<std::size_t> sizes;
  std::optional<std::size_t> seeds_per_point;
  std::optional<std::size_t> workers;
  std::vector<std::string> labels;
  bool wall_time = false;
};

int run_sweep(const SharedFlags& shared, const SweepFlags& sf) {
  json j = shared.config.empty() ? ffg::to_json(ffg::default_sweep_spec())
                                 : load_or_empty(shared.config);
  overlay_metrics(j, shared);
  if (shared.seed) j["seed"] = *shared.seed;
  if (!sf.sizes.empty()) j["sizes"] = sf.sizes;
  if (sf.seeds_per_point) j["seeds_per_point"] = *sf.seeds_per_point;
  if (sf.workers) j["workers"] = *sf.workers;
  if (sf.wall_time) j["record_wall_time"] = true;
  ffg::SweepSpec spec = ffg::parse_sweep_spec(j);
  if (!sf.labels.empty()) {
    std::vector<ffg::FamilyTemplate> kept;
    for (const auto& label : sf.labels) {
      bool found = false;
      for (const auto& t : spec.families) {
        if (t.label == label) {
          kept.push_back(t);
          found = true;
        }
      }
      if (!found) throw ffg::ParseError("no family labelled \"" + label + "\"", 0, ffg::Errc::parse_error, "families");
    }
    spec.families = std::move(kept);
  }

  const auto records = ffg::sweep(spec);
  const auto summary = ffg::summarize(records);
  if (shared.out.empty()) {
    std::cout << ffg::records_csv(records);
  } else {
    emit(shared, "records.csv", ffg::records_csv(records));
    emit(shared, "summary.csv", ffg::summary_csv(summary));
  }
  const std::size_t expected = spec.families.size() * spec.sizes.size() * spec.seeds_per_point;
  return records.size() == expected ? kExitOk : kExitValidation;
}

int run_fit(const SharedFlags& shared, const SweepFlags& sf, const std::vector<double>& ks) {
  ffg::SweepSpec spec;
  spec.sizes = sf.sizes.empty() ? std::vector<std::size_t>{64, 128, 256, 512, 1024} : sf.sizes;
  spec.families = ffg::scaling_templates(ks);
  spec.compute_mixing = false;
  spec.metrics = metric_options(shared);
  if (!shared.fidelity_stop) spec.metrics.fidelity.stop = ffg::FidelityStop::certified_minimax;
  if (shared.seed) spec.seed = *shared.seed;
  if (sf.seeds_per_point) spec.seeds_per_point = *sf.seeds_per_point;
  if (sf.workers) spec.workers = *sf.workers;
  if (!shared.config.empty()) {
    json j = load_or_empty(shared.config);
    overlay_metrics(j, shared);
    if (shared.seed) j["seed"] = *shared.seed;
    if (!sf.sizes.empty()) j["sizes"] = sf.sizes;
    spec = ffg::parse_sweep_spec(j);
  }

  const auto records = ffg::sweep(spec);
  const auto fits = ffg::fit_scaling(records, spec.families);
  if (shared.out.empty()) {
    std::cout << ffg::fits_csv(fits);
  } else {
    emit(shared, "records.csv", ffg::records_csv(records));
    emit(shared, "fits.csv", ffg::fits_csv(fits));
  }
  return kExitOk;
}

int run_gallery(const SharedFlags& shared, const GeneratorFlags& gen,
                const std::vector<std::string>& families) {
  std::vector<ffg::GeneratorConfig> configs;
  if (!shared.config.empty()) {
    json doc = ffg::load_json_file(shared.config);
    if (doc.is_object() && doc.contains("configs")) doc = doc["configs"];
    if (!doc.is_array()) throw ffg::ParseError("expected an array of configs", 0, ffg::Errc::parse_error, "configs");
    for (std::size_t k = 0; k < doc.size(); ++k) {
      json j = doc[k];
      overlay_generator(j, gen, shared.seed);
      configs.push_back(ffg::parse_generator_config(j, "configs[" + std::to_string(k) + "]"));
    }
  } else {
    std::vector<std::string> names = families;
    if (gen.family) names.push_back(*gen.family);
    if (names.empty()) {
      for (ffg::Family f : ffg::all_families()) names.emplace_back(ffg::to_string(f));
    }
    for (const auto& name : names) {
      json j = json::object({{"n", 128}});
      GeneratorFlags g = gen;
      g.family = name;
      overlay_generator(j, g, shared.seed);
      configs.push_back(ffg::parse_generator_config(j));
    }
  }
  const fs::path dir = shared.out.empty() ? fs::path("gallery") : fs::path(shared.out);
  for (const auto& path : ffg::gallery(configs, dir)) std::cout << path.string() << "\n";
  return kExitOk;
}

int run_check(const SharedFlags& shared) {
  const json result = ffg::run_checks();
  emit(shared, "checks.json", result.dump(2) + "\n");
  return result["passed"].get<bool>() ? kExitOk : kExitValidation;
}

int exit_code_for(ffg::Errc code) {
  switch (code) {
    case ffg::Errc::parse_error:
      return kExitParse;
    case ffg::Errc::io_error:
      return kExitOther;
    default:
      return kExitValidation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feedforward graph generators, mixing time and minimax fidelity"};
  app.require_subcommand(1);

  SharedFlags shared;
  GeneratorFlags gen;
  SweepFlags sweep_flags;
  std::vector<double> ks{1, 2, 3, 4};
  std::vector<std::string> gallery_families;

  auto* report = app.add_subcommand("report", "metrics report for one graph (JSON)");
  add_shared(report, shared);
  add_generator(report, gen);

  auto* sweep = app.add_subcommand("sweep", "metrics over families, doubling sizes and seeds (CSV)");
  add_shared(sweep, shared);
  sweep->add_option("--sizes", sweep_flags.sizes, "graph sizes")->delimiter(',');
  sweep->add_option("--seeds-per-point,--seeds_per_point", sweep_flags.seeds_per_point);
  sweep->add_option("--workers", sweep_flags.workers, "worker threads (0: all cores)");
  sweep->add_option("--label", sweep_flags.labels, "restrict to these family labels");
  sweep->add_flag("--wall-time,--wall_time", sweep_flags.wall_time, "fill wall_time_ms");

  auto* fit = app.add_subcommand("fit", "log-log fidelity scaling fits (CSV)");
  add_shared(fit, shared);
  fit->add_option("--sizes", sweep_flags.sizes, "graph sizes")->delimiter(',');
  fit->add_option("--k", ks, "FS degree schedules k*log2(n)")->delimiter(',');
  fit->add_option("--seeds-per-point,--seeds_per_point", sweep_flags.seeds_per_point);
  fit->add_option("--workers", sweep_flags.workers, "worker threads (0: all cores)");

  auto* gallery = app.add_subcommand("gallery", "adjacency matrix images (PGM)");
  add_shared(gallery, shared);
  add_generator(gallery, gen);
  gallery->add_option("--families", gallery_families, "families to render")->delimiter(',');

  auto* check = app.add_subcommand("check", "run the oracle cross-checks");
  add_shared(check, shared);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*report) return run_report(shared, gen);
    if (*sweep) return run_sweep(shared, sweep_flags);
    if (*fit) return run_fit(shared, sweep_flags, ks);
    if (*gallery) return run_gallery(shared, gen, gallery_families);
    if (*check) return run_check(shared);
  } catch (const ffg::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ffg::Error& e) {
    std::cerr << "error (" << ffg::to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
