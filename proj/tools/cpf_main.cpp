// cpf: controlled-particle-filter global optimization runner.
//
//   cpf run         --manifest m.json [--out-dir DIR] [--seed S] [--quiet]
//   cpf mc-variance --manifest m.json ...
//   cpf compare     --manifest m.json ...
//
// Exit codes: 0 ok, 2 config validation, 3 backend numerical failure,
// 4 oracle unavailable.

#include "cpf/errors.hpp"
#include "cpf/gain_galerkin.hpp"
#include "cpf/manifest.hpp"
#include "cpf/sim.hpp"
#include "cpf/simd.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace cpf;

namespace {

struct Options {
  std::string manifest_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool quiet = false;
};

std::string joined(const Options& opt, const std::string& name) {
  return (fs::path(opt.out_dir) / name).string();
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::config_invalid: return 2;
    case ErrorCode::oracle_unavailable: return 4;
    default: return 3;
  }
}

RunManifest load(const Options& opt) {
  RunManifest manifest = load_manifest(opt.manifest_path);
  if (opt.seed_set) manifest.config.seed = opt.seed;
  return manifest;
}

int cmd_run(const Options& opt) {
  RunManifest manifest = load(opt);
  if (!manifest.outputs.snapshots.empty() &&
      manifest.config.method_params.snapshot_stride == 0)
    manifest.config.method_params.snapshot_stride =
        std::max(1, manifest.config.n_steps() / 10);

  TrajectoryLog log = run(manifest.config, manifest.objective, manifest.init);

  fs::create_directories(opt.out_dir);
  write_trajectory_csv(joined(opt, manifest.outputs.trajectory), log);
  if (!manifest.outputs.snapshots.empty())
    write_snapshots_csv(joined(opt, manifest.outputs.snapshots), log);
  write_sidecar_json(joined(opt, manifest.outputs.sidecar), manifest, &log);

  if (!opt.quiet) {
    std::cout << "run: " << log.times.size() << " rows, final hhat = "
              << format_double(log.hhat.back()) << ", simd backend " << simd::backend_name()
              << "\n";
    if (!log.flagged_steps.empty())
      std::cout << "note: " << log.flagged_steps.size()
                << " steps exceeded the |dt u| threshold\n";
  }
  return 0;
}

int cmd_mc_variance(const Options& opt) {
  RunManifest manifest = load(opt);
  if (manifest.mc_grid.values.empty())
    throw Error(ErrorCode::config_invalid, "mc field 'grid' is missing or empty");
  if (manifest.replicates < 2)
    throw Error(ErrorCode::config_invalid, "mc field 'replicates' must be >= 2");

  McReport report = mc_variance_study(
      manifest.config, manifest.mc_grid, manifest.replicates,
      [&](int dim) { return manifest.objective_for(dim); },
      [&](int dim) { return manifest.init_for(dim); });

  fs::create_directories(opt.out_dir);
  write_mc_csv(joined(opt, manifest.outputs.report), report);
  write_sidecar_json(joined(opt, manifest.outputs.sidecar), manifest, nullptr);

  if (!opt.quiet)
    std::cout << "mc-variance: " << report.mc_var.size() << " grid points, J = "
              << report.replicates << "\n";
  return 0;
}

int cmd_compare(const Options& opt) {
  RunManifest manifest = load(opt);
  fs::create_directories(opt.out_dir);

  const bool qg = manifest.objective.quadratic.has_value() &&
                  std::holds_alternative<Initializer::Gaussian>(manifest.init.kind);
  const bool grid1d = manifest.init.dim() == 1;
  if (!qg && !grid1d)
    throw Error(ErrorCode::oracle_unavailable,
                "compare: no oracle applies (objective not quadratic-Gaussian, d > 1)");

  std::ofstream out(joined(opt, manifest.outputs.report));
  if (!out)
    throw Error(ErrorCode::config_invalid, "cannot write report CSV");

  nlohmann::json extras;
  if (qg) {
    // per-time errors against the closed-form moments
    TrajectoryLog log = run(manifest.config, manifest.objective, manifest.init);
    OracleReport rep = compare_to_oracle(log, manifest.config, manifest.objective, manifest.init);
    out << "t,mean_err,cov_err\n";
    for (std::size_t k = 0; k < rep.times.size(); ++k)
      out << format_double(rep.times[k]) << ',' << format_double(rep.mean_err[k]) << ','
          << format_double(rep.cov_err[k]) << '\n';
    extras["max_mean_err"] = *std::max_element(rep.mean_err.begin(), rep.mean_err.end());
    if (!rep.ks.empty()) extras["ks_final"] = rep.ks.back().second;
  } else {
    // all three gain backends on the same config
    std::vector<TrajectoryLog> logs;
    for (GainMethod m : {GainMethod::affine, GainMethod::galerkin, GainMethod::kernel}) {
      SimConfig cfg = manifest.config;
      cfg.gain_method = m;
      if (m == GainMethod::galerkin && cfg.method_params.basis == "poly2")
        cfg.method_params.basis = "fourier";
      logs.push_back(run(cfg, manifest.objective, manifest.init));
    }
    out << "t,hhat_affine,hhat_galerkin,hhat_kernel\n";
    for (std::size_t k = 0; k < logs[0].times.size(); ++k)
      out << format_double(logs[0].times[k]) << ',' << format_double(logs[0].hhat[k]) << ','
          << format_double(logs[1].hhat[k]) << ',' << format_double(logs[2].hhat[k]) << '\n';
    OracleReport rep =
        compare_to_oracle(logs[2], manifest.config, manifest.objective, manifest.init);
    if (!rep.ks.empty()) extras["ks_kernel_final"] = rep.ks.back().second;
  }

  RunManifest echoed = manifest;
  echoed.raw["compare_extras"] = extras;
  write_sidecar_json(joined(opt, manifest.outputs.sidecar), echoed, nullptr);
  if (!opt.quiet) std::cout << "compare: wrote " << manifest.outputs.report << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"controlled particle filter for global optimization"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--manifest", opt.manifest_path, "run manifest (JSON)")->required();
    sub->add_option("--out-dir", opt.out_dir, "output directory");
    sub->add_option("--seed", opt.seed, "override the manifest seed")
        ->each([&](const std::string&) { opt.seed_set = true; });
    sub->add_flag("--quiet", opt.quiet, "suppress progress output");
  };

  CLI::App* c_run = app.add_subcommand("run", "integrate one trajectory");
  CLI::App* c_mc = app.add_subcommand("mc-variance", "Monte-Carlo variance study");
  CLI::App* c_cmp = app.add_subcommand("compare", "compare against analytic oracles");
  add_common(c_run);
  add_common(c_mc);
  add_common(c_cmp);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_run->parsed()) return cmd_run(opt);
    if (c_mc->parsed()) return cmd_mc_variance(opt);
    if (c_cmp->parsed()) return cmd_compare(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
