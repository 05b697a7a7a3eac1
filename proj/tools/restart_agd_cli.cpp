#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "restart_agd/harness.hpp"
#include "restart_agd/trace_io.hpp"

namespace {

using restart_agd::ConfigError;
using restart_agd::ExperimentConfig;

std::vector<CLI::Option*> add_experiment_flags(CLI::App* cmd, ExperimentConfig& cfg,
                                               std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file (excludes other flags)");
  std::vector<CLI::Option*> opts;
  auto track = [&](CLI::Option* o) {
    opts.push_back(o);
    return o;
  };
  track(cmd->add_option("--problem", cfg.problem.type,
                        "quadratic | huber | hinder-lubin | modified-hinder-lubin | "
                        "scalar-quad | scalar-huber | asymmetric"));
  track(cmd->add_option("--n", cfg.problem.n, "dimension"));
  track(cmd->add_option("--m", cfg.problem.m, "sample count"));
  track(cmd->add_option("--seed", cfg.problem.seed, "problem seed"));
  track(cmd->add_option("--tau", cfg.problem.tau, "huber threshold"));
  track(cmd->add_option("--delta", cfg.problem.delta, "hinder-lubin delta"));
  track(cmd->add_option("--alpha", cfg.problem.alpha, "hinder-lubin alpha"));
  track(cmd->add_option("--gamma", cfg.problem.gamma, "hinder-lubin coupling weight"));
  track(cmd->add_option("--c", cfg.problem.c, "scalar-quad curvature"));
  track(cmd->add_option("--L", cfg.problem.L, "declared smoothness constant (scalars)"));
  track(cmd->add_option("--center", cfg.problem.center, "scalar-huber center"));
  track(cmd->add_option("--c-left", cfg.problem.c_left, "asymmetric left curvature"));
  track(cmd->add_option("--c-right", cfg.problem.c_right, "asymmetric right curvature"));
  track(cmd->add_option("--b", cfg.problem.b, "asymmetric breakpoint"));
  track(cmd->add_option("--policy", cfg.policy,
                        "none | fval | grad-prev | grad-next | gb | coord"));
  track(cmd->add_option("--schedule", cfg.schedule, "linear | recursive"));
  track(cmd->add_option("--iters", cfg.max_iters, "iteration budget"));
  track(cmd->add_option("--grad-tol", cfg.grad_tol, "gradient-norm stop (0 = off)"));
  track(cmd->add_option("--x0", cfg.x0, "zeros | ones | normal(<seed>) | number"));
  track(cmd->add_option("--out", cfg.out_dir, "output directory"));
  track(cmd->add_option("--csv", cfg.csv_path, "trace CSV path"));
  track(cmd->add_option("--json", cfg.json_path, "certificate JSON path"));
  track(cmd->add_option("--svg", cfg.svg_path, "convergence SVG path"));
  return opts;
}

ExperimentConfig resolve_config(ExperimentConfig cfg, const std::string& config_path,
                                const std::vector<CLI::Option*>& opts) {
  if (config_path.empty()) return cfg;
  for (const auto* o : opts)
    if (o->count() > 0)
      throw ConfigError("use either --config or individual experiment flags, not both");
  return restart_agd::load_config(config_path);
}

void print_trace_summary(const restart_agd::RunTrace& trace) {
  std::printf("policy=%s schedule=%s iterations=%d termination=%s restarts=%zu\n",
              restart_agd::policy_name(trace.policy).c_str(),
              restart_agd::schedule_name(trace.schedule).c_str(), trace.last_k(),
              restart_agd::termination_name(trace.termination).c_str(),
              trace.restart_iterations.size());
  const auto& last = trace.records.back();
  if (last.gap)
    std::printf("final f=%.17g gap=%.17g\n", last.f_value, *last.gap);
  else
    std::printf("final f=%.17g\n", last.f_value);
}

int do_experiment(const ExperimentConfig& cfg, bool certify_mode) {
  const auto result = restart_agd::run_experiment(cfg);
  print_trace_summary(result.trace);
  for (const auto& f : result.files_written) std::printf("wrote %s\n", f.c_str());
  if (!certify_mode) return 0;
  for (const auto& c : result.report.checks)
    std::printf("  %-32s %s  worst_margin=%.6g at k=%d\n", c.name.c_str(),
                c.pass ? "PASS" : "FAIL", c.worst_margin, c.worst_iteration);
  std::printf("certificate: %s\n", result.report.overall_pass ? "PASS" : "FAIL");
  return result.report.overall_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"accelerated gradient descent with adaptive restarts"};
  app.require_subcommand(1);

  ExperimentConfig run_cfg;
  std::string run_config_path;
  auto* run_cmd = app.add_subcommand("run", "run one experiment and write its trace");
  const auto run_opts = add_experiment_flags(run_cmd, run_cfg, run_config_path);

  ExperimentConfig cert_cfg;
  std::string cert_config_path;
  auto* cert_cmd =
      app.add_subcommand("certify", "run one experiment and check every certificate");
  const auto cert_opts = add_experiment_flags(cert_cmd, cert_cfg, cert_config_path);

  std::string suite;
  std::uint64_t bench_seed = 42;
  int bench_iters = 5000;
  std::string bench_out;
  std::string bench_x0;
  auto* bench_cmd = app.add_subcommand("bench", "reproduce the benchmark experiments");
  bench_cmd->add_option("--suite", suite, "appendix-d | appendix-e | appendix-f")
      ->required();
  bench_cmd->add_option("--seed", bench_seed, "problem seed");
  bench_cmd->add_option("--iters", bench_iters, "iteration budget per policy");
  bench_cmd->add_option("--out", bench_out, "output directory");
  bench_cmd->add_option("--x0", bench_x0, "override the suite's start point");

  auto* sweep_cmd =
      app.add_subcommand("sweep", "certification grid over the scalar problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed())
      return do_experiment(resolve_config(run_cfg, run_config_path, run_opts), false);
    if (cert_cmd->parsed())
      return do_experiment(resolve_config(cert_cfg, cert_config_path, cert_opts), true);
    if (bench_cmd->parsed()) {
      const auto br =
          restart_agd::run_bench(suite, bench_seed, bench_iters, bench_out, bench_x0);
      for (std::size_t i = 0; i < br.policies.size(); ++i) {
        const auto& last = br.traces[i].records.back();
        std::printf("%s gap_final=%.6e restarts=%zu\n", br.policies[i].c_str(),
                    last.gap.value_or(-1.0), br.traces[i].restart_iterations.size());
      }
      for (const auto& f : br.files_written) std::printf("wrote %s\n", f.c_str());
      return 0;
    }
    if (sweep_cmd->parsed()) {
      const auto sr = restart_agd::run_sweep();
      int failed = 0;
      for (const auto& e : sr.entries) {
        if (!e.report.overall_pass) ++failed;
        std::printf("%-13s seed=%llu x0=%-11s checks=%zu %s\n",
                    e.config.problem.type.c_str(),
                    static_cast<unsigned long long>(e.config.problem.seed),
                    e.config.x0.c_str(), e.report.checks.size(),
                    e.report.overall_pass ? "PASS" : "FAIL");
      }
      std::printf("sweep: %zu traces, %d failed\n", sr.entries.size(), failed);
      return sr.all_pass ? 0 : 3;
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
