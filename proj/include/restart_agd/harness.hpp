#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "restart_agd/certify.hpp"
#include "restart_agd/config.hpp"
#include "restart_agd/engine.hpp"

namespace restart_agd {

struct ExperimentResult {
  RunTrace trace;
  CertificateReport report;
  std::vector<std::string> files_written;
};

nlohmann::ordered_json certificate_to_json(const ExperimentConfig& cfg,
                                           const CertificateReport& report);

// Builds the problem, runs the solver, runs every applicable certificate
// check, and writes the configured outputs (trace CSV, certificate JSON,
// optional SVG).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// First recorded iteration with gap <= threshold.
std::optional<int> iterations_to_gap(const RunTrace& trace, double threshold);

struct BenchResult {
  std::string suite;
  std::vector<std::string> policies;
  std::vector<RunTrace> traces;  // parallel to policies
  std::vector<std::string> files_written;
};

// Benchmark suites:
//   appendix-d  quadratic n=500            policies none, grad-prev, grad-next
//   appendix-e  huber m=300 n=50 tau=0.5   policies none, grad-prev, grad-next
//   appendix-f  modified hinder-lubin      policies none, grad-next, coord
//               m=110 n=100 delta=alpha=gamma=1e-4
// Writes one CSV per policy plus one combined SVG into out_dir (out_dir may
// be empty to skip files). x0_override picks the start; empty selects the
// suite default (ones, except -2 for appendix-f so the run starts deep in
// the flat tangent region). Independent runs execute concurrently, capped by
// RESTART_AGD_THREADS.
BenchResult run_bench(const std::string& suite, std::uint64_t seed, int max_iters,
                      const std::string& out_dir, const std::string& x0_override = "");

struct SweepEntry {
  ExperimentConfig config;
  CertificateReport report;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  bool all_pass = true;
};

// One-dimensional certification grid: five scalar problems by ten
// (seed, x0) pairs, grad-next with the linear schedule, 2000 iterations,
// full certificate on every trace.
SweepResult run_sweep();

}  // namespace restart_agd
