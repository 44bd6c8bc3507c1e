// Copyright 2026 The BandSparse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bandsparse/attention.h"
#include "bandsparse/block_mask.h"
#include "bandsparse/cost.h"
#include "bandsparse/errors.h"
#include "bandsparse/estimator.h"
#include "bandsparse/rope.h"
#include "bandsparse/spectral.h"
#include "bandsparse/sweep.h"
#include "bandsparse/synth.h"
#include "bandsparse/tensor_io.h"

#ifndef BANDSPARSE_VERSION
#define BANDSPARSE_VERSION "0.0.0"
#endif

namespace bs = bandsparse;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kSchemaVersion = 1;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

const std::vector<std::string> kLayouts = {"interleaved", "half-split"};
const std::vector<std::string> kBandModes = {"dual", "high", "low", "full"};
const std::vector<std::string> kPatterns = {"slash", "vertical", "block", "mixed"};

struct GlobalOptions {
  std::string exec_name = "parallel";
  bs::Exec exec() const {
    return exec_name == "serial" ? bs::Exec::kSerial : bs::Exec::kParallel;
  }
};

struct RopeOptions {
  bs::RopeConfig cfg;
  std::string layout = "interleaved";
  bs::RopeConfig resolved() const {
    bs::RopeConfig out = cfg;
    out.layout = bs::parse_layout(layout);
    return out;
  }
  void add(CLI::App* app, bool with_head_dim) {
    app->add_option("--base", cfg.base, "RoPE base b")
        ->capture_default_str()
        ->check(CLI::Range(1.0 + 1e-12, 1e300));
    if (with_head_dim) {
      app->add_option("--head-dim,--dim", cfg.head_dim, "Head dimension d")
          ->capture_default_str()
          ->check(CLI::Range(2, 1 << 20));
    }
    app->add_option("--layout", layout, "Frequency pair layout")
        ->capture_default_str()
        ->check(CLI::IsMember(kLayouts));
  }
};

struct EstimatorOptions {
  bs::EstimatorConfig cfg;
  std::string band_mode = "dual";
  bs::EstimatorConfig resolved() const {
    bs::EstimatorConfig out = cfg;
    out.band_mode = bs::parse_band_mode(band_mode);
    return out;
  }
};

void add_estimator_options(CLI::App* app, EstimatorOptions& opts) {
  auto& cfg = opts.cfg;
  app->add_option("--block-size", cfg.block_size, "Block size B")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--d-high", cfg.d_high, "High-frequency band width")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--d-low", cfg.d_low, "Low-frequency band width")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--top-p", cfg.top_p, "Cumulative mass threshold p")
      ->capture_default_str()
      ->check(CLI::Range(1e-12, 1.0));
  app->add_option("--band-mode", opts.band_mode, "Scoring branches")
      ->capture_default_str()
      ->check(CLI::IsMember(kBandModes));
  app->add_flag("--calibration,!--no-calibration", cfg.calibration,
                "Energy-based temperature calibration (default on)");
  app->add_flag("--force-diagonal,!--no-force-diagonal", cfg.force_diagonal,
                "Always keep diagonal blocks (default on)");
}

// Writes to `path`, or stdout for "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  fn(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

bs::RopeConfig rope_for(const bs::RopeConfig& base, const bs::Matrix& q) {
  bs::RopeConfig cfg = base;
  cfg.head_dim = q.cols();
  return cfg;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

// spectrum ------------------------------------------------------------------

struct SpectrumOptions {
  RopeOptions rope;
  std::size_t block_size = 128;
  bs::ZoneThresholds thresholds;
  std::string out = "-";
};

void run_spectrum(const SpectrumOptions& o) {
  const auto profile = bs::build_profile(o.rope.resolved(), o.block_size, o.thresholds);
  with_output(o.out, [&](std::ostream& os) { bs::write_profile_csv(os, profile); });
  std::ostringstream msg;
  msg.precision(6);
  if (profile.cutoff_dim) {
    msg << "cutoff 2j = " << *profile.cutoff_dim;
  } else {
    msg << "cutoff: none (block size <= 2 pi, no dead zone)";
  }
  msg << "; dims dead " << profile.dims_in(bs::Zone::kDead).size()
      << ", transition " << profile.dims_in(bs::Zone::kTransition).size()
      << ", semantic " << profile.dims_in(bs::Zone::kSemantic).size();
  std::cerr << msg.str() << '\n';
}

// synth ---------------------------------------------------------------------

struct SynthOptions {
  bs::WorkloadSpec spec;
  std::string pattern = "mixed";
  RopeOptions rope;
  std::string dtype = "f64";
  std::string out_prefix;
};

void run_synth(SynthOptions o) {
  o.spec.rope = o.rope.resolved();
  o.spec.pattern = bs::parse_pattern(o.pattern);
  const auto in = bs::generate(o.spec);
  const auto dtype = o.dtype == "f32" ? bs::DType::kFloat32 : bs::DType::kFloat64;
  bs::save_matrix(o.out_prefix + ".q.prsm", in.q, dtype);
  bs::save_matrix(o.out_prefix + ".k.prsm", in.k, dtype);
  bs::save_matrix(o.out_prefix + ".v.prsm", in.v, dtype);
  nlohmann::json sidecar;
  sidecar["schema_version"] = kSchemaVersion;
  sidecar["workload"] = o.spec;
  sidecar["dtype"] = o.dtype;
  sidecar["files"] = {{"q", o.out_prefix + ".q.prsm"},
                      {"k", o.out_prefix + ".k.prsm"},
                      {"v", o.out_prefix + ".v.prsm"}};
  with_output(o.out_prefix + ".json",
              [&](std::ostream& os) { os << sidecar.dump(2) << '\n'; });
  std::cerr << "wrote " << o.out_prefix << ".{q,k,v}.prsm and "
            << o.out_prefix << ".json (L=" << o.spec.length
            << ", d=" << o.spec.rope.head_dim << ")\n";
}

// estimate ------------------------------------------------------------------

struct EstimateOptions {
  std::string q_path;
  std::string k_path;
  EstimatorOptions est;
  RopeOptions rope;
  std::string out;
  std::string csv;
};

void run_estimate(const EstimateOptions& o, const GlobalOptions& g) {
  const bs::Matrix q = bs::load_matrix(o.q_path);
  const bs::Matrix k = bs::load_matrix(o.k_path);
  const auto rope = rope_for(o.rope.resolved(), q);
  const auto start = Clock::now();
  const auto est = bs::estimate_detailed(q, k, o.est.resolved(), rope, g.exec());
  const double elapsed = seconds_since(start);
  bs::save_mask(o.out, est.mask);
  if (!o.csv.empty()) {
    with_output(o.csv, [&](std::ostream& os) { bs::write_mask_csv(os, est.mask); });
  }
  std::ostringstream msg;
  msg.precision(6);
  msg << "blocks " << est.mask.block_count() << ", selected "
      << est.mask.selected_count() << ", density " << std::fixed
      << est.mask.density() << std::defaultfloat;
  for (const auto& br : est.branches) {
    const char* name = br.band == bs::BandKind::kHigh  ? "high"
                       : br.band == bs::BandKind::kLow ? "low"
                                                       : "full";
    msg << "; " << name << "(" << br.width << ") tau " << br.tau
        << " density " << br.mask.density();
  }
  msg << "; " << elapsed << " s";
  std::cerr << msg.str() << '\n';
}

// eval ----------------------------------------------------------------------

struct EvalOptions {
  std::string q_path;
  std::string k_path;
  std::string v_path;
  std::string mask_path;
  EstimatorOptions est;
  RopeOptions rope;
  bool per_row = false;
};

void run_eval(const EvalOptions& o, const GlobalOptions& g) {
  bs::AttentionInputs in{bs::load_matrix(o.q_path), bs::load_matrix(o.k_path),
                         bs::load_matrix(o.v_path)};
  in.validate();
  const auto rope = rope_for(o.rope.resolved(), in.q);
  const auto cfg = o.est.resolved();
  nlohmann::json config = {{"q", o.q_path},
                           {"k", o.k_path},
                           {"v", o.v_path},
                           {"length", in.length()},
                           {"head_dim", in.q.cols()},
                           {"block_size", cfg.block_size}};
  nlohmann::json timing;
  bs::BlockMask mask;
  if (!o.mask_path.empty()) {
    mask = bs::load_mask(o.mask_path);
    config["mask"] = o.mask_path;
    timing["estimate_seconds"] = nullptr;
  } else {
    const auto start = Clock::now();
    mask = bs::dual_band_estimate(in.q, in.k, cfg, rope, g.exec());
    timing["estimate_seconds"] = seconds_since(start);
    config["estimator"] = {{"band_mode", bs::to_string(cfg.band_mode)},
                           {"d_high", cfg.d_high},
                           {"d_low", cfg.d_low},
                           {"top_p", cfg.top_p},
                           {"calibration", cfg.calibration},
                           {"force_diagonal", cfg.force_diagonal},
                           {"rope_base", rope.base},
                           {"layout", bs::to_string(rope.layout)}};
  }
  bs::EvalTimings t;
  const auto report = bs::evaluate(mask, in, cfg.block_size, g.exec(), &t);
  timing["dense_seconds"] = t.dense_seconds;
  timing["sparse_seconds"] = t.sparse_seconds;
  nlohmann::json eval = report;
  if (o.per_row) eval["per_row_recall"] = report.per_row_recall;
  const nlohmann::json out = {
      {"schema_version", kSchemaVersion},
      {"config", config},
      {"eval", eval},
      {"timing", timing},
      {"versions",
       {{"bandsparse", BANDSPARSE_VERSION},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
  std::cout << out.dump(2) << '\n';
}

// sweep ---------------------------------------------------------------------

struct SweepOptions {
  std::string q_path;
  std::string k_path;
  RopeOptions rope;
  std::vector<std::size_t> block_sizes = {128};
  std::vector<std::string> band_modes = kBandModes;
  std::vector<std::string> calibration = {"on", "off"};
  std::vector<double> top_p;
  std::size_t d_high = 64;
  std::size_t d_low = 96;
  std::string out = "-";
};

void run_sweep(const SweepOptions& o, const GlobalOptions& g) {
  const bs::Matrix q = bs::load_matrix(o.q_path);
  const bs::Matrix k = bs::load_matrix(o.k_path);
  const auto rope = rope_for(o.rope.resolved(), q);
  const auto grid = o.top_p.empty() ? bs::default_top_p_grid() : o.top_p;
  std::ostringstream csv;
  bs::write_frontier_header(csv);
  for (const std::size_t block : o.block_sizes) {
    const bs::Matrix importance =
        bs::ground_truth_block_importance(q, k, block, g.exec());
    const auto pooled = bs::pool_projections(q, k, block, g.exec());
    for (const auto& mode : o.band_modes) {
      for (const auto& cal : o.calibration) {
        bs::EstimatorConfig cfg;
        cfg.block_size = block;
        cfg.d_high = o.d_high;
        cfg.d_low = o.d_low;
        cfg.band_mode = bs::parse_band_mode(mode);
        cfg.calibration = cal == "on";
        const auto frontier =
            bs::sweep_top_p(pooled, importance, cfg, rope, grid, g.exec());
        bs::write_frontier_rows(csv, cfg, frontier);
      }
    }
    std::cerr << "block size " << block << " done\n";
  }
  with_output(o.out, [&](std::ostream& os) { os << csv.str(); });
}

// bench ---------------------------------------------------------------------

struct BenchOptions {
  std::vector<std::size_t> lengths = {1024, 2048, 4096, 8192};
  std::size_t repeats = 5;
  EstimatorOptions est;
  RopeOptions rope;
  std::uint64_t seed = 1;
};

void run_bench(const BenchOptions& o, const GlobalOptions& g) {
  const auto cfg = o.est.resolved();
  std::vector<double> xs;
  std::vector<double> total;
  std::vector<double> scoring;
  std::cout << "length,block_size,repeats,estimate_seconds,scoring_seconds,"
               "density,dense_flops,sparse_flops,flop_ratio,inverse_density\n";
  for (const std::size_t len : o.lengths) {
    bs::WorkloadSpec spec;
    spec.length = len;
    spec.rope = o.rope.resolved();
    spec.seed = o.seed;
    const auto in = bs::generate(spec);
    std::vector<double> t_total;
    std::vector<double> t_scoring;
    bs::BlockMask mask;
    for (std::size_t r = 0; r < o.repeats; ++r) {
      const auto t0 = Clock::now();
      const auto pooled = bs::pool_projections(in.q, in.k, cfg.block_size, g.exec());
      const auto t1 = Clock::now();
      mask = bs::estimate_from_pooled(pooled, cfg, spec.rope, g.exec()).mask;
      const auto t2 = Clock::now();
      t_total.push_back(std::chrono::duration<double>(t2 - t0).count());
      t_scoring.push_back(std::chrono::duration<double>(t2 - t1).count());
    }
    const auto flops =
        bs::tile_flops(mask, len, cfg.block_size, in.q.cols(), in.v.cols());
    xs.push_back(static_cast<double>(len));
    total.push_back(median(t_total));
    scoring.push_back(median(t_scoring));
    std::cout << len << ',' << cfg.block_size << ',' << o.repeats << ','
              << total.back() << ',' << scoring.back() << ',' << mask.density()
              << ',' << flops.dense << ',' << flops.sparse << ',' << flops.ratio()
              << ',' << 1.0 / mask.density() << '\n';
  }
  if (xs.size() >= 2) {
    std::cerr << "log-log slope vs length: estimate " << bs::loglog_slope(xs, total)
              << ", block-level scoring " << bs::loglog_slope(xs, scoring) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral dual-band block-sparse attention estimation"};
  app.set_version_flag("--version", BANDSPARSE_VERSION);
  app.require_subcommand(1);
  GlobalOptions global;
  app.add_option("--exec", global.exec_name, "Kernel execution")
      ->capture_default_str()
      ->check(CLI::IsMember({"serial", "parallel"}));

  SpectrumOptions spectrum;
  auto* sp = app.add_subcommand("spectrum", "Export the attenuation profile as CSV");
  spectrum.rope.add(sp, true);
  sp->add_option("--block-size", spectrum.block_size)
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sp->add_option("--dead-threshold", spectrum.thresholds.dead)->capture_default_str();
  sp->add_option("--semantic-threshold", spectrum.thresholds.semantic)
      ->capture_default_str();
  sp->add_option("-o,--out", spectrum.out, "Output CSV path ('-' for stdout)")
      ->capture_default_str();

  SynthOptions synth;
  auto* sy = app.add_subcommand("synth", "Generate a seeded synthetic workload");
  synth.rope.add(sy, true);
  sy->add_option("--pattern", synth.pattern)
      ->capture_default_str()
      ->check(CLI::IsMember(kPatterns));
  sy->add_option("--length", synth.spec.length)
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sy->add_option("--seed", synth.spec.seed)->capture_default_str();
  sy->add_option("--stationarity", synth.spec.stationarity)
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sy->add_option("--noise-std", synth.spec.scales.noise_std)
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sy->add_option("--dtype", synth.dtype)
      ->capture_default_str()
      ->check(CLI::IsMember({"f32", "f64"}));
  sy->add_option("-o,--out-prefix", synth.out_prefix, "Writes PREFIX.{q,k,v}.prsm and PREFIX.json")
      ->required();

  EstimateOptions estimate;
  auto* es = app.add_subcommand("estimate", "Estimate a block mask from q and k");
  es->add_option("--q", estimate.q_path)->required()->check(CLI::ExistingFile);
  es->add_option("--k", estimate.k_path)->required()->check(CLI::ExistingFile);
  add_estimator_options(es, estimate.est);
  estimate.rope.add(es, false);
  es->add_option("-o,--out", estimate.out, "Mask output (PRSM1, uint8)")->required();
  es->add_option("--csv", estimate.csv, "Also export selected (u,v) pairs as CSV");

  EvalOptions eval;
  auto* ev = app.add_subcommand("eval", "Evaluate a mask against dense attention");
  ev->add_option("--q", eval.q_path)->required()->check(CLI::ExistingFile);
  ev->add_option("--k", eval.k_path)->required()->check(CLI::ExistingFile);
  ev->add_option("--v", eval.v_path)->required()->check(CLI::ExistingFile);
  ev->add_option("--mask", eval.mask_path, "Mask to evaluate; estimated when omitted")
      ->check(CLI::ExistingFile);
  add_estimator_options(ev, eval.est);
  eval.rope.add(ev, false);
  ev->add_flag("--per-row", eval.per_row, "Include per-row recall");

  SweepOptions sweep;
  auto* sw = app.add_subcommand("sweep", "Ablation frontier CSV over modes, calibration, p and B");
  sw->add_option("--q", sweep.q_path)->required()->check(CLI::ExistingFile);
  sw->add_option("--k", sweep.k_path)->required()->check(CLI::ExistingFile);
  sweep.rope.add(sw, false);
  sw->add_option("--block-sizes", sweep.block_sizes)
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sw->add_option("--band-modes", sweep.band_modes)
      ->delimiter(',')
      ->check(CLI::IsMember(kBandModes));
  sw->add_option("--calibration", sweep.calibration)
      ->delimiter(',')
      ->check(CLI::IsMember({"on", "off"}));
  sw->add_option("--top-p", sweep.top_p, "p grid (default 0.05..1.0)")
      ->delimiter(',')
      ->check(CLI::Range(1e-12, 1.0));
  sw->add_option("--d-high", sweep.d_high)->capture_default_str();
  sw->add_option("--d-low", sweep.d_low)->capture_default_str();
  sw->add_option("-o,--out", sweep.out)->capture_default_str();

  BenchOptions bench;
  auto* be = app.add_subcommand("bench", "Estimation wall time versus length");
  be->add_option("--lengths", bench.lengths)
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  be->add_option("--repeats", bench.repeats)
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  be->add_option("--seed", bench.seed)->capture_default_str();
  add_estimator_options(be, bench.est);
  bench.rope.add(be, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sp) run_spectrum(spectrum);
    if (*sy) run_synth(synth);
    if (*es) run_estimate(estimate, global);
    if (*ev) run_eval(eval, global);
    if (*sw) run_sweep(sweep, global);
    if (*be) run_bench(bench, global);
  } catch (const bs::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
