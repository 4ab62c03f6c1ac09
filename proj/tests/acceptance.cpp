// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ffgraph/config.hpp"
#include "ffgraph/error.hpp"
#include "ffgraph/generators.hpp"
#include "ffgraph/metrics.hpp"
#include "ffgraph/oracles.hpp"
#include "ffgraph/runner.hpp"

using namespace ffg;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<std::size_t> doubling(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> out;
  for (std::size_t n = lo; n <= hi; n *= 2) out.push_back(n);
  return out;
}

FeedforwardGraph make(Family f, std::size_t n, std::uint64_t seed = 0, double p = 0.2) {
  GeneratorConfig cfg;
  cfg.family = f;
  cfg.n = n;
  cfg.seed = seed;
  cfg.p = p;
  return generate(cfg);
}

std::size_t mixing(const FeedforwardGraph& g) {
  const auto r = averaged_mixing_time(g);
  if (!r.mixed()) throw Error(Errc::precondition_failed, "did not mix within horizon");
  return *r.mixing_time;
}

double normalized(const FeedforwardGraph& g) {
  FidelityOptions o;
  o.stop = FidelityStop::certified_minimax;
  return fidelity_report(g, o).normalized_minimax;
}

double median_normalized(Family f, std::size_t n) {
  std::vector<double> v;
  for (std::uint64_t s = 0; s < 5; ++s) v.push_back(normalized(make(f, n, s)));
  return median(v);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome c1_fc_minimax() {
  double worst = 0.0;
  for (std::size_t n : {4, 16, 64, 256, 1024}) {
    const auto r = fidelity_report(gen_fully_connected(n));
    worst = std::max({worst, std::abs(r.minimax - 1.0 / static_cast<double>(n)),
                      std::abs(r.normalized_minimax - 1.0)});
  }
  return {worst <= 1e-10, fmt("max deviation %.3g", worst)};
}

Outcome c2_fc_mixing() {
  bool ok = true;
  std::string d;
  for (std::size_t n : doubling(16, 4096)) {
    const std::size_t t = mixing(gen_fully_connected(n));
    const double bound = 2.0 + 2.0 * std::log2(static_cast<double>(n));
    ok = ok && static_cast<double>(t) <= bound;
    d += fmt("n=%.0f t=%.0f<=%.0f ", static_cast<double>(n), static_cast<double>(t), bound);
  }
  return {ok, d};
}

Outcome c3_line_linear() {
  std::map<std::size_t, double> t;
  for (std::size_t n : doubling(64, 1024)) t[n] = static_cast<double>(mixing(gen_line(n)));
  bool ok = true;
  std::string d;
  for (std::size_t n : doubling(64, 512)) {
    const double ratio = t[2 * n] / (2.0 * t[n]);
    const double per_node = t[n] / static_cast<double>(n);
    ok = ok && ratio >= 0.9 && ratio <= 1.1 && per_node >= 1.2 && per_node <= 1.9;
    d += fmt("n=%.0f ratio=%.4f t/n=%.4f ", static_cast<double>(n), ratio, per_node);
  }
  return {ok, d};
}

Outcome c4_line_closed_form() {
  double worst = 0.0;
  for (std::size_t n = 3; n <= 64; ++n) {
    FidelityOptions o;
    o.horizon = 4 * n;
    const double engine = fidelity_report(gen_line(n), o).minimax;
    worst = std::max(worst, std::abs(engine - *closed_form_line_fidelity(n).exact_value));
  }
  const double n = 4096;
  const double growth = fidelity_report(gen_line(4096)).normalized_minimax / std::sqrt(n / std::numbers::pi);
  return {worst <= 1e-10 && growth >= 0.9 && growth <= 1.1,
          fmt("max deviation %.3g, n*minimax/sqrt(n/pi) at 4096 = %.5f", worst, growth)};
}

Outcome c5_star_vs_fc() {
  bool ok = true;
  std::string d;
  for (std::size_t n : doubling(16, 1024)) {
    const std::size_t s = mixing(gen_star(n));
    const std::size_t f = mixing(gen_fully_connected(n));
    ok = ok && s <= f;
    d += fmt("n=%.0f %.0f<=%.0f ", static_cast<double>(n), static_cast<double>(s), static_cast<double>(f));
  }
  return {ok, d};
}

Outcome c6_spectrum() {
  RngStream rng(2024);
  const auto families = all_families();
  int mismatches = 0;
  for (int k = 0; k < 100; ++k) {
    GeneratorConfig cfg;
    cfg.family = families[rng.below(families.size())];
    cfg.n = 1 + rng.below(64);
    cfg.seed = rng.next_u64();
    cfg.p = rng.uniform01();
    const auto g = generate(cfg);
    std::vector<std::size_t> out(g.size(), 0);
    for (const Edge& e : g.edges()) ++out[e.src];
    std::vector<Rational> expected;
    for (std::size_t d : out) expected.emplace_back(1, static_cast<std::int64_t>(d));
    auto got = walk_spectrum(g);
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    if (got != expected) ++mismatches;
  }
  return {mismatches == 0, fmt("%.0f of 100 graphs mismatched", mismatches)};
}

// Largest entrywise gap between the engine tau-rows and dense powers for one graph.
double engine_vs_dense(const FeedforwardGraph& g) {
  const std::size_t n = g.size();
  const std::size_t horizon = 4 * n;
  const auto walk = tau_row_walk(g, horizon);
  const auto diff = tau_row_diffusion(g, horizon);
  DensePowers w(g, MatrixKind::walk);
  DensePowers d(g, MatrixKind::diffusion);
  double worst = 0.0;
  for (std::size_t t = 0; t <= horizon; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(walk[t][i] - w.current()(n - 1, i)));
      worst = std::max(worst, std::abs(diff[t][i] - d.current()(n - 1, i)));
    }
    w.advance();
    d.advance();
  }
  return worst;
}

Outcome c7_oracle_equivalence() {
  std::vector<std::future<double>> jobs;
  for (Family f : all_families()) {
    for (std::size_t n : {8, 32, 128}) {
      jobs.push_back(std::async(std::launch::async, [f, n] { return engine_vs_dense(make(f, n, 7)); }));
    }
  }
  double worst = 0.0;
  for (auto& j : jobs) worst = std::max(worst, j.get());

  int path_mismatches = 0;
  for (Family f : all_families()) {
    for (std::size_t n : {4, 8, 12}) {
      const auto g = make(f, n, 3);
      DensePowers a(g, MatrixKind::adjacency);
      for (std::size_t t = 0; t <= 12; ++t) {
        for (NodeId i = 0; i < n; ++i) {
          if (static_cast<double>(enumerate_paths(g, i, t)) != a.current()(n - 1, i)) ++path_mismatches;
        }
        a.advance();
      }
    }
  }
  return {worst <= 1e-10 && path_mismatches == 0,
          fmt("max engine/dense gap %.3g, %.0f path count mismatches", worst, path_mismatches)};
}

Outcome c8_path_bound() {
  int failures = 0;
  for (std::size_t n = 4; n <= 12; ++n) {
    if (!check_path_count_bound(gen_fully_connected(n)).holds) ++failures;
    if (!check_path_count_bound(gen_line(n)).holds) ++failures;
  }
  return {failures == 0, fmt("%.0f of 18 graphs violated the bound", failures)};
}

Outcome c9_sink_decay() {
  bool ok = true;
  int poisson_checked = 0;
  std::string d;
  for (std::size_t n : {16, 64}) {
    const std::size_t horizon = 16 * n;
    ok = ok && check_sink_neighbour_decay(gen_fully_connected(n), horizon).decays;
    ok = ok && check_sink_neighbour_decay(make(Family::fs, n), horizon).decays;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto g = make(Family::poisson, n, s, 0.2);
      const auto v = validate(g);
      if (!v.unique_sink || g.in_degree(static_cast<NodeId>(n - 2)) < 2) continue;
      ++poisson_checked;
      ok = ok && check_sink_neighbour_decay(g, horizon).decays;
    }
  }
  ok = ok && poisson_checked > 0;
  const auto line = check_sink_neighbour_decay(gen_line(3), 64);
  for (std::size_t t = 0; t <= 20; ++t) {
    ok = ok && line.trace[t] == std::ldexp(static_cast<double>(t), -static_cast<int>(t));
  }
  d = fmt("%.0f qualifying poisson(0.2) graphs checked", poisson_checked);
  return {ok, d};
}

std::size_t fs_median_mixing(std::size_t n) {
  std::vector<std::future<std::size_t>> jobs;
  for (std::uint64_t s = 0; s < 5; ++s) {
    jobs.push_back(std::async(std::launch::async, [n, s] { return mixing(make(Family::fs, n, s)); }));
  }
  std::vector<double> v;
  for (auto& j : jobs) v.push_back(static_cast<double>(j.get()));
  return static_cast<std::size_t>(median(v));
}

Outcome c10_fs_polylog() {
  const double c = static_cast<double>(fs_median_mixing(64)) / 36.0;
  bool ok = true;
  std::string d = fmt("c=%.4f ", c);
  for (std::size_t n : doubling(128, 2048)) {
    const double l = std::log2(static_cast<double>(n));
    const double t = static_cast<double>(fs_median_mixing(n));
    ok = ok && t <= 1.5 * c * l * l;
    d += fmt("n=%.0f t=%.0f<=%.1f ", static_cast<double>(n), t, 1.5 * c * l * l);
  }
  return {ok, d};
}

Outcome c11_fs_dominance() {
  bool ok = true;
  std::string d;
  for (std::size_t n : doubling(16, 1024)) {
    const double m = median_normalized(Family::fs, n);
    ok = ok && m > 1.0;
    d += fmt("n=%.0f %.4g ", static_cast<double>(n), m);
  }
  return {ok, d};
}

Outcome c12_ordering() {
  const std::size_t n = 1024;
  const double line = median_normalized(Family::line, n);
  const double fs = median_normalized(Family::fs, n);
  const double fc = median_normalized(Family::fully_connected, n);
  const double er = median_normalized(Family::erdos_renyi, n);
  const double ex = median_normalized(Family::oriented_expander, n);
  const bool ok = line > fs && fs > fc && fc >= er && fc >= ex;
  return {ok, fmt("line=%.4g fs=%.4g fc=%.4g", line, fs, fc) + fmt(" er=%.4g expander=%.4g", er, ex)};
}

Outcome c13_fit() {
  SweepSpec spec;
  spec.sizes = doubling(64, 4096);
  spec.families = scaling_templates({});
  spec.seeds_per_point = 1;
  spec.compute_mixing = false;
  spec.metrics.fidelity.stop = FidelityStop::certified_minimax;
  const auto fits = fit_scaling(sweep(spec), spec.families);
  double fc = NAN, line = NAN;
  for (const auto& f : fits) {
    if (f.family == "fully_connected") fc = f.slope;
    if (f.family == "line") line = f.slope;
  }
  const bool ok = std::abs(fc + 1.0) <= 0.01 && std::abs(line + 0.5) <= 0.05;
  return {ok, fmt("fully_connected slope %.5f, line slope %.5f", fc, line)};
}

Outcome c14_determinism() {
  const SweepSpec spec = default_sweep_spec();
  const bool csv_same = records_csv(sweep(spec)) == records_csv(sweep(spec));

  const auto root = std::filesystem::temp_directory_path() / "ffgraph_acceptance_gallery";
  std::filesystem::remove_all(root);
  std::vector<GeneratorConfig> configs;
  for (Family f : all_families()) {
    GeneratorConfig cfg;
    cfg.family = f;
    cfg.n = 128;
    configs.push_back(cfg);
  }
  const auto a = gallery(configs, root / "a");
  const auto b = gallery(configs, root / "b");
  bool pgm_same = a.size() == b.size();
  for (std::size_t k = 0; pgm_same && k < a.size(); ++k) pgm_same = slurp(a[k]) == slurp(b[k]);
  std::filesystem::remove_all(root);
  return {csv_same && pgm_same, std::string("sweep csv ") + (csv_same ? "identical" : "differs") +
                                    ", gallery pgm " + (pgm_same ? "identical" : "differs")};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "fully connected minimax fidelity is 1/n", 5, c1_fc_minimax},
      {2, "fully connected mixing within 2 + 2 log2 n", 30, c2_fc_mixing},
      {3, "line mixing grows linearly", 30, c3_line_linear},
      {4, "line fidelity closed form and sqrt(n/pi) growth", 60, c4_line_closed_form},
      {5, "star mixes no slower than fully connected", 10, c5_star_vs_fc},
      {6, "walk spectrum is the reciprocal out-degrees", 0, c6_spectrum},
      {7, "engines match dense and enumeration oracles", 60, c7_oracle_equivalence},
      {8, "path count bound on fully connected and line", 0, c8_path_bound},
      {9, "sink neighbour fidelity decays", 0, c9_sink_decay},
      {10, "fs mixing is polylogarithmic", 300, c10_fs_polylog},
      {11, "fs normalized minimax above 1", 0, c11_fs_dominance},
      {12, "normalized minimax ordering at n = 1024", 0, c12_ordering},
      {13, "scaling fit slopes", 0, c13_fit},
      {14, "sweep and gallery are deterministic", 0, c14_determinism},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && secs >= c.budget_s) {
      o.passed = false;
      o.detail += fmt(" [over the %.0f s budget]", c.budget_s);
    }
    if (!o.passed) ++failed;
    std::printf("%s %d: %s (%.2f s) %s\n", o.passed ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
