#include "ffgraph/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <tuple>

#include "ffgraph/error.hpp"
#include "ffgraph/oracles.hpp"
#include "ffgraph/rng.hpp"

namespace ffg {

using nlohmann::json;

json to_json(const ValidationReport& v) {
  return {
      {"is_feedforward", v.is_feedforward},
      {"has_all_self_edges", v.has_all_self_edges},
      {"sinks", v.sinks},
      {"unique_sink", v.unique_sink},
      {"zero_indegree_nodes", v.zero_indegree_nodes},
  };
}

json to_json(const MixingReport& r) {
  return {
      {"mixing_time", r.mixing_time ? json(*r.mixing_time) : json(-1)},
      {"mixed", r.mixed()},
      {"horizon", r.horizon},
      {"convention", std::string(to_string(r.convention))},
      {"epsilon", r.epsilon},
      {"trace", r.trace},
  };
}

json to_json(const FidelityReport& r) {
  return {
      {"phi", r.phi},
      {"argmax_t", r.argmax_t},
      {"minimax", r.minimax},
      {"argmin_node", r.argmin_node},
      {"normalized_minimax", r.normalized_minimax},
      {"horizon", r.horizon},
      {"steps_run", r.steps_run},
  };
}

json spectrum_json(std::span<const Rational> spectrum) {
  json out = json::array();
  std::size_t k = 0;
  while (k < spectrum.size()) {
    std::size_t run = k;
    while (run < spectrum.size() && spectrum[run] == spectrum[k]) ++run;
    const Rational& v = spectrum[k];
    out.push_back({{"value", std::to_string(v.numerator()) + "/" + std::to_string(v.denominator())},
                   {"multiplicity", run - k}});
    k = run;
  }
  return out;
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string trace_csv(std::span<const double> trace) {
  std::string out = "step,value\n";
  for (std::size_t t = 0; t < trace.size(); ++t) {
    out += std::to_string(t);
    out += ',';
    out += format_double(trace[t]);
    out += '\n';
  }
  return out;
}

json report(const GeneratorConfig& cfg, const MetricOptions& options) {
  const FeedforwardGraph g = generate(cfg);
  const ValidationReport validation = validate(g);
  json warnings = json::array();
  if (!validation.unique_sink) {
    warnings.push_back("graph has " + std::to_string(validation.sinks.size()) +
                       " sink(s); expected only node n-1");
  }
  const MixingReport mixing = averaged_mixing_time(g, options.mixing_for(g.size()));
  if (!mixing.mixed()) {
    warnings.push_back("walk did not mix within horizon " + std::to_string(mixing.horizon) +
                       "; mixing_time reported as -1");
  }
  const FidelityReport fidelity = fidelity_report(g, options.fidelity_for(g.size()));
  const auto spectrum = walk_spectrum(g);
  return {
      {"config", to_json(cfg)},
      {"graph", {{"n", g.size()}, {"edge_count", g.edge_count()}}},
      {"validation", to_json(validation)},
      {"mixing", to_json(mixing)},
      {"fidelity", to_json(fidelity)},
      {"spectrum", spectrum_json(spectrum)},
      {"warnings", warnings},
  };
}

std::uint64_t sweep_seed(std::uint64_t root_seed, std::size_t k) {
  return RngStream(root_seed).substream({static_cast<std::uint64_t>(StreamFamily::sweep_seeds), k}).seed();
}

namespace {

struct SweepJob {
  const FamilyTemplate* family;
  std::size_t n;
  std::uint64_t seed;
};

SweepRecord run_point(const SweepJob& job, const SweepSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  GeneratorConfig cfg = job.family->config;
  cfg.n = job.n;
  cfg.seed = job.seed;

  const FeedforwardGraph g = generate(cfg);
  SweepRecord rec;
  rec.family = job.family->label;
  rec.seed = job.seed;
  rec.n = job.n;
  rec.indegree_budget = indegree_budget(cfg);
  rec.mixing_convention = spec.metrics.mixing.convention;
  rec.edge_count = g.edge_count();
  if (spec.compute_mixing) {
    const auto mixing = averaged_mixing_time(g, spec.metrics.mixing_for(job.n));
    rec.mixing_time = mixing.mixing_time ? static_cast<long long>(*mixing.mixing_time) : -1;
  }
  if (spec.compute_fidelity) {
    const auto fidelity = fidelity_report(g, spec.metrics.fidelity_for(job.n));
    rec.minimax_fidelity = fidelity.minimax;
    rec.normalized_minimax = fidelity.normalized_minimax;
    rec.argmin_node = fidelity.argmin_node;
    rec.argmax_t = fidelity.argmax_t[fidelity.argmin_node];
  } else {
    rec.minimax_fidelity = std::numeric_limits<double>::quiet_NaN();
    rec.normalized_minimax = std::numeric_limits<double>::quiet_NaN();
  }
  if (spec.record_wall_time) {
    rec.wall_time_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  }
  return rec;
}

}  // namespace

std::vector<SweepRecord> sweep(const SweepSpec& spec) {
  std::vector<SweepJob> jobs;
  for (const auto& family : spec.families) {
    for (std::size_t n : spec.sizes) {
      for (std::size_t k = 0; k < spec.seeds_per_point; ++k) {
        jobs.push_back({&family, n, sweep_seed(spec.seed, k)});
      }
    }
  }

  std::vector<std::optional<SweepRecord>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        results[j] = run_point(jobs[j], spec);
      } catch (const std::exception& e) {
        std::lock_guard lock(log_mutex);
        std::cerr << "sweep: " << jobs[j].family->label << " n=" << jobs[j].n
                  << " seed=" << jobs[j].seed << " failed: " << e.what() << "\n";
      }
    }
  };
  std::size_t workers = spec.workers ? spec.workers : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(jobs.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  std::vector<SweepRecord> records;
  for (auto& r : results) {
    if (r) records.push_back(std::move(*r));
  }
  std::sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    return std::tie(a.family, a.n, a.seed) < std::tie(b.family, b.n, b.seed);
  });
  return records;
}

std::string records_csv(std::span<const SweepRecord> records) {
  std::string out =
      "family,seed,n,indegree_budget,mixing_time,mixing_convention,minimax_fidelity,"
      "normalized_minimax,argmin_node,argmax_t,edge_count,wall_time_ms\n";
  for (const auto& r : records) {
    out += r.family + ',' + std::to_string(r.seed) + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.indegree_budget) + ',' + std::to_string(r.mixing_time) + ',' +
           std::string(to_string(r.mixing_convention)) + ',' + format_double(r.minimax_fidelity) +
           ',' + format_double(r.normalized_minimax) + ',' + std::to_string(r.argmin_node) + ',' +
           std::to_string(r.argmax_t) + ',' + std::to_string(r.edge_count) + ',' +
           format_double(r.wall_time_ms) + '\n';
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(Errc::insufficient_data, "median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<SummaryRow> summarize(std::span<const SweepRecord> records) {
  std::map<std::pair<std::string, std::size_t>, std::vector<const SweepRecord*>> groups;
  for (const auto& r : records) groups[{r.family, r.n}].push_back(&r);

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<SummaryRow> rows;
  for (const auto& [key, members] : groups) {
    std::vector<double> mixing, minimax, normalized, edges;
    for (const SweepRecord* r : members) {
      mixing.push_back(r->mixing_time < 0 ? inf : static_cast<double>(r->mixing_time));
      minimax.push_back(r->minimax_fidelity);
      normalized.push_back(r->normalized_minimax);
      edges.push_back(static_cast<double>(r->edge_count));
    }
    SummaryRow row;
    row.family = key.first;
    row.n = key.second;
    row.seeds = members.size();
    const double m = median(mixing);
    row.median_mixing_time = std::isinf(m) ? -1.0 : m;
    row.median_minimax_fidelity = median(minimax);
    row.median_normalized_minimax = median(normalized);
    row.median_edge_count = median(edges);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string summary_csv(std::span<const SummaryRow> rows) {
  std::string out =
      "family,n,seeds,median_mixing_time,median_minimax_fidelity,median_normalized_minimax,"
      "median_edge_count\n";
  for (const auto& r : rows) {
    out += r.family + ',' + std::to_string(r.n) + ',' + std::to_string(r.seeds) + ',' +
           format_double(r.median_mixing_time) + ',' + format_double(r.median_minimax_fidelity) +
           ',' + format_double(r.median_normalized_minimax) + ',' +
           format_double(r.median_edge_count) + '\n';
  }
  return out;
}

std::vector<ScalingFit> fit_scaling(std::span<const SweepRecord> records,
                                    std::span<const FamilyTemplate> templates) {
  std::vector<ScalingFit> fits;
  for (const auto& tmpl : templates) {
    std::map<std::size_t, std::vector<double>> by_size;
    for (const auto& r : records) {
      if (r.family == tmpl.label) by_size[r.n].push_back(r.minimax_fidelity);
    }
    if (by_size.empty()) continue;
    if (by_size.size() < 3) {
      throw Error(Errc::insufficient_data,
                  tmpl.label + ": scaling fit needs at least 3 sizes, got " +
                      std::to_string(by_size.size()));
    }
    std::vector<double> xs, ys;
    for (auto& [n, values] : by_size) {
      const double m = median(values);
      if (!(m > 0.0)) {
        throw Error(Errc::insufficient_data,
                    tmpl.label + ": non-positive median fidelity at n=" + std::to_string(n));
      }
      xs.push_back(std::log(static_cast<double>(n)));
      ys.push_back(std::log(m));
    }
    const double count = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      mx += xs[k];
      my += ys[k];
    }
    mx /= count;
    my /= count;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      sxx += (xs[k] - mx) * (xs[k] - mx);
      sxy += (xs[k] - mx) * (ys[k] - my);
      syy += (ys[k] - my) * (ys[k] - my);
    }
    ScalingFit fit;
    fit.family = tmpl.label;
    fit.budget_schedule = schedule_k(tmpl.config);
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    fits.push_back(std::move(fit));
  }
  return fits;
}

std::string fits_csv(std::span<const ScalingFit> fits) {
  std::string out = "family,budget_schedule,slope,intercept,r_squared\n";
  for (const auto& f : fits) {
    out += f.family + ',' + format_double(f.budget_schedule) + ',' + format_double(f.slope) + ',' +
           format_double(f.intercept) + ',' + format_double(f.r_squared) + '\n';
  }
  return out;
}

std::vector<FamilyTemplate> scaling_templates(std::span<const double> ks) {
  std::vector<FamilyTemplate> out;
  GeneratorConfig fc;
  fc.family = Family::fully_connected;
  out.push_back({"fully_connected", fc});
  GeneratorConfig line;
  line.family = Family::line;
  out.push_back({"line", line});
  for (double k : ks) {
    GeneratorConfig fs;
    fs.family = Family::fs;
    fs.expander_degree = IndegreeSchedule::k_logn(k);
    out.push_back({"fs_k" + format_double(k), fs});
  }
  return out;
}

std::string gallery_filename(const GeneratorConfig& cfg) {
  return std::string(to_string(cfg.family)) + "_n" + std::to_string(cfg.n) + "_seed" +
         std::to_string(cfg.seed) + ".pgm";
}

std::vector<std::filesystem::path> gallery(std::span<const GeneratorConfig> configs,
                                           const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& cfg : configs) {
    const auto path = out_dir / gallery_filename(cfg);
    const std::string image = export_pgm(generate(cfg));
    std::ofstream out(path, std::ios::binary);
    out.write(image.data(), static_cast<std::streamsize>(image.size()));
    if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
    written.push_back(path);
  }
  return written;
}

namespace {

json verdict(std::string name, bool passed, json detail) {
  return {{"name", std::move(name)}, {"passed", passed}, {"detail", std::move(detail)}};
}

json check_line_closed_form() {
  double worst = 0.0;
  for (std::size_t n = 3; n <= 32; ++n) {
    const auto engine = fidelity_report(gen_line(n));
    const auto closed = closed_form_line_fidelity(n);
    worst = std::max(worst, std::abs(engine.minimax - *closed.exact_value));
  }
  return verdict("line_fidelity_closed_form", worst <= 1e-10, {{"max_abs_error", worst}});
}

json check_fully_connected_fidelity() {
  double worst = 0.0;
  for (std::size_t n : {4, 16, 64}) {
    const auto r = fidelity_report(gen_fully_connected(n));
    worst = std::max(worst, std::abs(r.minimax - 1.0 / static_cast<double>(n)));
  }
  return verdict("fully_connected_minimax_is_1_over_n", worst <= 1e-10,
                 {{"max_abs_error", worst}});
}

json check_path_bound() {
  bool ok = true;
  json cases = json::array();
  for (std::size_t n = 4; n <= 12; ++n) {
    for (const auto& [name, g] : {std::pair{"fully_connected", gen_fully_connected(n)},
                                  std::pair{"line", gen_line(n)}}) {
      const auto r = check_path_count_bound(g);
      ok = ok && r.holds;
      cases.push_back({{"family", name}, {"n", n}, {"t", r.mixing_time}, {"s", r.s},
                       {"average_path_count", r.average_path_count}, {"bound", r.bound},
                       {"holds", r.holds}});
    }
  }
  return verdict("path_count_bound", ok, cases);
}

json check_sink_decay() {
  const auto fc = check_sink_neighbour_decay(gen_fully_connected(16), 256);
  const auto line = check_sink_neighbour_decay(gen_line(3), 64);
  bool exact = true;
  for (std::size_t t = 0; t <= 20; ++t) {
    exact = exact && line.trace[t] == std::ldexp(static_cast<double>(t), -static_cast<int>(t));
  }
  return verdict("sink_neighbour_decay", fc.decays && line.decays && exact,
                 {{"fully_connected_16_final", fc.final_value},
                  {"line_3_trace_is_t_over_2_pow_t", exact}});
}

json check_dense_agreement() {
  double worst = 0.0;
  for (Family f : all_families()) {
    GeneratorConfig cfg;
    cfg.family = f;
    cfg.n = 12;
    cfg.seed = 7;
    const auto g = generate(cfg);
    const auto walk_rows = tau_row_walk(g, 4 * g.size());
    const auto diff_rows = tau_row_diffusion(g, 4 * g.size());
    DensePowers w(g, MatrixKind::walk);
    DensePowers d(g, MatrixKind::diffusion);
    for (std::size_t t = 0; t <= 4 * g.size(); ++t) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        worst = std::max(worst, std::abs(walk_rows[t][i] - w.current()(g.size() - 1, i)));
        worst = std::max(worst, std::abs(diff_rows[t][i] - d.current()(g.size() - 1, i)));
      }
      w.advance();
      d.advance();
    }
  }
  return verdict("row_engines_match_dense_powers", worst <= 1e-10, {{"max_abs_error", worst}});
}

json check_enumeration() {
  bool ok = true;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto g = gen_poisson(10, 0.3, 3, seed);
    for (std::size_t t = 0; t <= 8; ++t) {
      const auto counts = path_count(g, t);
      for (NodeId i = 0; i < g.size(); ++i) {
        ok = ok && enumerate_paths(g, i, t) == counts(g.size() - 1, i);
      }
    }
  }
  return verdict("enumeration_matches_adjacency_powers", ok, json::object());
}

json check_monte_carlo() {
  const auto g = gen_star(16);
  const auto exact = averaged_mixing_time(g);
  const auto mc = monte_carlo_mixing(g, 2000, 16, 11);
  const auto est = mc.mixing_time();
  const bool ok = est && exact.mixing_time &&
                  (*est > *exact.mixing_time ? *est - *exact.mixing_time
                                             : *exact.mixing_time - *est) <= 1;
  return verdict("monte_carlo_mixing_within_one_step", ok,
                 {{"exact", exact.mixing_time ? json(*exact.mixing_time) : json(-1)},
                  {"estimate", est ? json(*est) : json(-1)}});
}

}  // namespace

json run_checks() {
  json checks = json::array();
  bool passed = true;
  auto run = [&](const char* name, json (*fn)()) {
    try {
      json v = fn();
      passed = passed && v["passed"].get<bool>();
      checks.push_back(std::move(v));
    } catch (const std::exception& e) {
      passed = false;
      checks.push_back(verdict(name, false, {{"error", e.what()}}));
    }
  };
  run("line_fidelity_closed_form", check_line_closed_form);
  run("fully_connected_minimax_is_1_over_n", check_fully_connected_fidelity);
  run("path_count_bound", check_path_bound);
  run("sink_neighbour_decay", check_sink_decay);
  run("row_engines_match_dense_powers", check_dense_agreement);
  run("enumeration_matches_adjacency_powers", check_enumeration);
  run("monte_carlo_mixing_within_one_step", check_monte_carlo);
  return {{"passed", passed}, {"checks", checks}};
}

}  // namespace ffg
