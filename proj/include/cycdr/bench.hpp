#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cycdr/problem.hpp"
#include "cycdr/solver.hpp"

namespace cycdr {

struct SolverSpec {
  std::string id;
  SolverConfig<double> config;
};

struct SizeSpec {
  Index m = 0;
  Index n = 0;
};

// One benchmark sweep: for every (family, size, repetition) cell a fresh
// problem and starting point are generated from seeds derived from
// base_seed, and every solver runs on that same instance.
struct BenchPlan {
  std::vector<Family> families;
  std::vector<SizeSpec> sizes;
  std::vector<SolverSpec> solvers;
  int repetitions = 10;
  std::uint64_t base_seed = 0;

  void validate() const;
};

struct BenchRecord {
  Family family = Family::custom;
  Index m = 0;
  Index n = 0;
  std::string solver;
  int rep = 0;
  std::uint64_t seed = 0;  // problem seed; the x0 seed is x0_seed_for(seed)
  double wall_time_s = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t projections = 0;
  double final_error = 0.0;
  Termination termination = Termination::max_iterations;
};

// Seed derivation, pure in its inputs so any record can be replayed.
std::uint64_t problem_seed_for(std::uint64_t base_seed, Family family, Index m, int rep);
std::uint64_t x0_seed_for(std::uint64_t problem_seed);

// Runs the plan with `parallel` worker threads over cells. The sink receives
// records in the canonical order (families, then sizes, then repetitions,
// then solvers) regardless of thread count, as soon as every earlier record
// is complete; an interrupted run has therefore emitted a valid prefix.
using RecordSink = std::function<void(const BenchRecord&)>;
void run_bench_streaming(const BenchPlan& plan, int parallel, const RecordSink& sink,
                         std::ostream* progress = nullptr);

std::vector<BenchRecord> run_bench(const BenchPlan& plan, int parallel = 1);

struct ProblemKey {
  Family family = Family::custom;
  Index m = 0;
  Index n = 0;

  bool operator==(const ProblemKey&) const = default;
};

std::string to_string(const ProblemKey& key);

// Per-(problem, solver) aggregate over repetitions. Values average the
// converged repetitions only; `failures` counts the rest. A cell with no
// converged repetition holds NaN.
struct MetricTable {
  std::vector<ProblemKey> problems;
  std::vector<std::string> solvers;
  Eigen::MatrixXd values;
  Eigen::MatrixXi failures;
};

enum class BenchMetric { time, projections };

MetricTable averaged_times(const std::vector<BenchRecord>& records,
                           BenchMetric metric = BenchMetric::time);

// r_{p,s} = t_{p,s} / min_s t_{p,s}; every entry must be finite and > 0.
Eigen::MatrixXd performance_ratios(const Eigen::MatrixXd& times);

// 200 log-spaced points from 1 to the largest ratio (collapses to {1} when
// every ratio is 1).
std::vector<double> default_tau_grid(const Eigen::MatrixXd& ratios, int points = 200);

struct PerformanceProfile {
  std::vector<double> tau;
  std::vector<std::string> solvers;
  Eigen::MatrixXd pi;  // tau.size() rows, one column per solver
};

PerformanceProfile performance_profile(const Eigen::MatrixXd& ratios,
                                       const std::vector<std::string>& solvers,
                                       const std::vector<double>& tau_grid);

// CSV schemas (documented headers, full-precision numbers):
//   records.csv: family,m,n,solver,rep,seed,wall_time_s,iterations,projections,final_error,termination
//   profile.csv: tau,<one column per solver id>
//   trace.csv:   iteration,projections,error,elapsed_s
void export_records_csv(const std::vector<BenchRecord>& records, const std::string& path);
std::vector<BenchRecord> read_records_csv(const std::string& path);
void export_profile_csv(const PerformanceProfile& profile, const std::string& path);
void export_trace_csv(const std::vector<TraceRow<double>>& trace, const std::string& path);

// Bench plan file (JSON): {version, base_seed, repetitions, families, sizes,
// epsilon?, max_iterations?, solvers:[{id, method, r?, rng_seed?, coin_bias?,
// epsilon?, max_iterations?, stall_window?}]}.
BenchPlan plan_from_json(const nlohmann::json& j);
BenchPlan load_plan(const std::string& path);

}  // namespace cycdr
