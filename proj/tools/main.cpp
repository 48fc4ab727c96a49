#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "cycdr/bench.hpp"
#include "cycdr/csv.hpp"
#include "cycdr/errors.hpp"
#include "cycdr/problem_io.hpp"
#include "cycdr/schedule.hpp"
#include "cycdr/solver.hpp"

namespace {

// Exit codes: 0 success, 1 file/data error, 2 usage error, 3 solver hit the
// iteration cap, 4 solver met a non-finite iterate.
constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitMaxIterations = 3;
constexpr int kExitNumericalFailure = 4;

struct GenArgs {
  std::string family;
  cycdr::Index n = 1000;
  cycdr::Index m = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenArgs& args) {
  cycdr::GeneratorParams params;
  params.n = args.n;
  params.m = args.m;
  params.seed = args.seed;
  const cycdr::Family family = cycdr::family_from_string(args.family);
  cycdr::FeasibilityProblem<double> problem;
  if (family == cycdr::Family::linear) {
    problem = cycdr::generate_linear(params);
  } else if (family == cycdr::Family::quadratic) {
    problem = cycdr::generate_quadratic(params);
  } else {
    throw std::invalid_argument("gen: family must be linear or quadratic");
  }
  cycdr::save_problem(problem, args.out);
  std::cout << "family=" << cycdr::to_string(family) << " n=" << problem.n
            << " m=" << problem.m() << " seed=" << params.seed
            << " min-origin-slack=" << cycdr::format_double(cycdr::min_origin_slack(problem))
            << " out=" << args.out << "\n";
  return kExitOk;
}

struct SolveArgs {
  std::string problem_path;
  std::string method = "cyclic";
  cycdr::Index r = 2;
  double eps = 1e-12;
  std::uint64_t max_iters = 1000000;
  std::uint64_t x0_seed = 0;
  std::uint64_t rng_seed = 0;
  double coin_bias = 0.5;
  std::uint64_t trace_every = 1;
  std::optional<cycdr::Index> stall_window;
  std::string trace_path;
  std::string op_log_path;
};

// Reconstructs which operator iteration k applied; the schedule (and the
// random-product coin stream) is a pure function of the configuration, so
// the log can be emitted after the run.
void write_op_log(const std::string& path, const cycdr::SolveReport<double>& report,
                  cycdr::Index m) {
  std::ofstream out(path);
  if (!out) throw cycdr::IoError("cannot open '" + path + "' for writing");
  out << "iteration,operator\n";
  const auto& config = report.config;
  cycdr::Rng coin(config.rng_seed);
  for (std::uint64_t k = 1; k <= report.counters.iterations; ++k) {
    out << k << ',';
    switch (config.method) {
      case cycdr::Method::cyclic: {
        const auto indices = cycdr::block_indices(m, config.r, k);
        for (std::size_t i = 0; i < indices.size(); ++i)
          out << (i ? " " : "") << indices[i];
        break;
      }
      case cycdr::Method::full_cycle:
        out << "full-cycle";
        break;
      case cycdr::Method::short_cycle:
        out << "short-cycle";
        break;
      case cycdr::Method::product_space:
        out << "product-space";
        break;
      case cycdr::Method::random_product:
        out << (cycdr::uniform_unit(coin) < config.coin_bias ? "full-cycle" : "projections");
        break;
    }
    out << '\n';
  }
  if (!out) throw cycdr::IoError("failed writing '" + path + "'");
}

int cmd_solve(const SolveArgs& args) {
  const auto problem = cycdr::load_problem(args.problem_path);

  cycdr::SolverConfig<double> config;
  config.method = cycdr::method_from_string(args.method);
  config.r = args.r;
  config.epsilon = args.eps;
  config.max_iterations = args.max_iters;
  config.trace_every = args.trace_every;
  config.stall_window = args.stall_window;
  config.rng_seed = args.rng_seed;
  config.coin_bias = args.coin_bias;

  cycdr::GeneratorParams x0_params = problem.meta.params;
  x0_params.n = problem.n;
  x0_params.seed = args.x0_seed;
  const cycdr::Vec<double> x0 = cycdr::generate_x0(x0_params);

  const auto report = cycdr::solve(problem, config, x0);

  if (!args.trace_path.empty()) cycdr::export_trace_csv(report.error_trace, args.trace_path);
  if (!args.op_log_path.empty()) write_op_log(args.op_log_path, report, problem.m());

  std::cout << "problem=" << args.problem_path << " family=" << cycdr::to_string(problem.meta.family)
            << " n=" << problem.n << " m=" << problem.m() << " problem-seed=" << problem.meta.seed
            << "\n";
  std::cout << "method=" << cycdr::to_string(config.method);
  if (config.method != cycdr::Method::product_space) std::cout << " r=" << config.r;
  std::cout << " eps=" << cycdr::format_double(config.epsilon)
            << " stall-window=" << cycdr::resolved_stall_window(config, problem.m())
            << " x0-seed=" << args.x0_seed;
  if (config.method == cycdr::Method::random_product)
    std::cout << " rng-seed=" << config.rng_seed
              << " coin-bias=" << cycdr::format_double(config.coin_bias);
  std::cout << "\n";
  std::cout << "termination=" << cycdr::to_string(report.termination) << "\n";
  std::cout << "iterations=" << report.counters.iterations << "\n";
  std::cout << "projections=" << report.counters.projections << "\n";
  std::cout << "final-error=" << cycdr::format_double(report.error_trace.back().error) << "\n";
  std::cout << "wall-time-s=" << cycdr::format_double(report.wall_time_s) << "\n";

  switch (report.termination) {
    case cycdr::Termination::converged: return kExitOk;
    case cycdr::Termination::max_iterations: return kExitMaxIterations;
    case cycdr::Termination::numerical_failure: return kExitNumericalFailure;
  }
  return kExitOk;
}

struct BenchArgs {
  std::string plan_path;
  std::string out;
  int parallel = 1;
};

int cmd_bench(const BenchArgs& args) {
  const cycdr::BenchPlan plan = cycdr::load_plan(args.plan_path);
  std::ofstream out(args.out);
  if (!out) throw cycdr::IoError("cannot open '" + args.out + "' for writing");
  out << "family,m,n,solver,rep,seed,wall_time_s,iterations,projections,final_error,termination\n";
  out.flush();
  std::cout << "plan=" << args.plan_path << " base-seed=" << plan.base_seed
            << " parallel=" << args.parallel << "\n";
  std::uint64_t rows = 0;
  cycdr::run_bench_streaming(
      plan, args.parallel,
      [&out, &rows](const cycdr::BenchRecord& record) {
        out << cycdr::to_string(record.family) << ',' << record.m << ',' << record.n << ','
            << record.solver << ',' << record.rep << ',' << record.seed << ','
            << cycdr::format_double(record.wall_time_s) << ',' << record.iterations << ','
            << record.projections << ',' << cycdr::format_double(record.final_error) << ','
            << cycdr::to_string(record.termination) << '\n';
        out.flush();  // interrupted runs keep every completed row
        ++rows;
      },
      &std::cerr);
  if (!out) throw cycdr::IoError("failed writing '" + args.out + "'");
  std::cout << "records=" << rows << " out=" << args.out << "\n";
  return kExitOk;
}

struct ProfileArgs {
  std::string records_path;
  std::string metric = "time";
  std::string out;
};

int cmd_profile(const ProfileArgs& args) {
  cycdr::BenchMetric metric;
  if (args.metric == "time") {
    metric = cycdr::BenchMetric::time;
  } else if (args.metric == "projections") {
    metric = cycdr::BenchMetric::projections;
  } else {
    throw std::invalid_argument("profile: --metric must be time or projections");
  }
  const auto records = cycdr::read_records_csv(args.records_path);
  try {
    const auto table = cycdr::averaged_times(records, metric);
    const auto ratios = cycdr::performance_ratios(table.values);
    const auto profile =
        cycdr::performance_profile(ratios, table.solvers, cycdr::default_tau_grid(ratios));
    cycdr::export_profile_csv(profile, args.out);
    std::cout << "problems=" << table.problems.size() << " solvers=" << table.solvers.size()
              << " metric=" << args.metric << " out=" << args.out << "\n";
    for (std::size_t s = 0; s < profile.solvers.size(); ++s)
      std::cout << "pi(1) " << profile.solvers[s] << " = "
                << cycdr::format_double(profile.pi(0, static_cast<cycdr::Index>(s))) << "\n";
  } catch (const std::invalid_argument& e) {
    // Incomplete or inconsistent records are a data problem, not a flag
    // problem.
    throw cycdr::ParseError(e.what());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) try {
  CLI::App app{"Cyclic Douglas-Rachford feasibility solvers and benchmark harness"};
  app.require_subcommand(1);

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate a random feasibility problem file");
  gen->add_option("--family", gen_args.family, "Problem family: linear|quadratic")->required();
  gen->add_option("--n", gen_args.n, "Space dimension")->default_val(1000);
  gen->add_option("--m", gen_args.m, "Number of sets")->required();
  gen->add_option("--seed", gen_args.seed, "Generator seed")->default_val(0);
  gen->add_option("--out", gen_args.out, "Output problem file (JSON)")->required();

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve a problem file with one method");
  solve->add_option("--problem", solve_args.problem_path, "Problem file (JSON)")->required();
  solve->add_option("--method", solve_args.method,
                    "cyclic|full-cycle|short-cycle|product-space|random-product")
      ->default_val("cyclic");
  solve->add_option("--r", solve_args.r, "Block size (sets per DR operator)")->default_val(2);
  solve->add_option("--eps", solve_args.eps, "Relative-change tolerance")->default_val(1e-12);
  solve->add_option("--max-iters", solve_args.max_iters, "Iteration cap")->default_val(1000000);
  solve->add_option("--x0-seed", solve_args.x0_seed, "Starting-point seed")->default_val(0);
  solve->add_option("--rng-seed", solve_args.rng_seed, "Coin seed (random-product)")->default_val(0);
  solve->add_option("--coin-bias", solve_args.coin_bias,
                    "Probability of the full cycle per random-product step")
      ->default_val(0.5);
  solve->add_option("--trace-every", solve_args.trace_every,
                    "Record the error trace every k iterations (0: endpoints only)")
      ->default_val(1);
  cycdr::Index stall_window_flag = 0;
  auto* stall_opt = solve->add_option("--stall-window", stall_window_flag,
                                      "Consecutive small-change steps required (default ceil(m/r), "
                                      "1 for product-space)");
  solve->add_option("--trace", solve_args.trace_path, "Write the error trace CSV here");
  solve->add_option("--op-log", solve_args.op_log_path,
                    "Write the per-iteration operator log CSV here");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Run a benchmark plan and stream records to CSV");
  bench->add_option("--plan", bench_args.plan_path, "Plan file (JSON; repetitions default 10)")
      ->required();
  bench->add_option("--out", bench_args.out, "Output records CSV")->required();
  bench->add_option("--parallel", bench_args.parallel, "Worker threads over cells")
      ->default_val(1)
      ->check(CLI::PositiveNumber);

  ProfileArgs profile_args;
  auto* profile = app.add_subcommand("profile", "Compute performance profiles from records");
  profile->add_option("--records", profile_args.records_path, "Records CSV from bench")->required();
  profile->add_option("--metric", profile_args.metric, "time|projections")->default_val("time");
  profile->add_option("--out", profile_args.out, "Output profile CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (stall_opt->count() > 0) solve_args.stall_window = stall_window_flag;

  try {
    if (gen->parsed()) return cmd_gen(gen_args);
    if (solve->parsed()) return cmd_solve(solve_args);
    if (bench->parsed()) return cmd_bench(bench_args);
    if (profile->parsed()) return cmd_profile(profile_args);
  } catch (const cycdr::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const cycdr::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
} catch (const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  return kExitIo;
} catch (...) {
  std::cerr << "error: unknown failure\n";
  return kExitIo;
}
