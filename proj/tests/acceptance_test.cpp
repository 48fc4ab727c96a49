#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "cli_support.hpp"
#include "cycdr/bench.hpp"
#include "cycdr/csv.hpp"
#include "cycdr/schedule.hpp"
#include "cycdr/solver.hpp"
#include "test_support.hpp"

using namespace cycdr;

namespace {

void report_criterion(int index, const std::string& name, bool ok, const std::string& detail) {
  std::string line =
      "[acceptance] C" + std::to_string(index) + " " + name + ": " + (ok ? "PASS" : "FAIL");
  if (!detail.empty()) line += "  (" + detail + ")";
  std::printf("%s\n", line.c_str());
  std::fflush(stdout);
}

#define REPORT_AND_CHECK(idx, name, ok, detail)      \
  do {                                               \
    const bool ok_value = (ok);                      \
    const std::string detail_value = (detail);       \
    report_criterion(idx, name, ok_value, detail_value); \
    CHECK_MESSAGE(ok_value, name << " " << detail_value); \
  } while (0)

std::string fmt(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4g", value);
  return buffer;
}

GeneratorParams sized(Index n, Index m, std::uint64_t seed) {
  GeneratorParams params;
  params.n = n;
  params.m = m;
  params.seed = seed;
  return params;
}

Vec<double> start_point(const GeneratorParams& params) {
  GeneratorParams x0_params = params;
  x0_params.seed = x0_seed_for(params.seed);
  return generate_x0(x0_params);
}

}  // namespace

TEST_CASE("criterion 1: block schedule oracle") {
  bool ok = true;
  const std::vector<std::vector<Index>> expected = {
      {0, 1, 2}, {2, 3, 4}, {4, 0, 1}, {1, 2, 3}, {3, 4, 0}};
  for (std::uint64_t d = 1; d <= 5; ++d)
    ok = ok && block_indices(5, 3, d) == expected[static_cast<std::size_t>(d - 1)];

  // Pair cycling against a brute-force modular oracle.
  for (Index m = 2; m <= 10 && ok; ++m)
    for (std::uint64_t d = 1; d <= 4 * static_cast<std::uint64_t>(m) && ok; ++d) {
      const std::vector<Index> oracle = {
          static_cast<Index>((d - 1) % static_cast<std::uint64_t>(m)),
          static_cast<Index>(d % static_cast<std::uint64_t>(m))};
      ok = block_indices(m, 2, d) == oracle;
    }
  REPORT_AND_CHECK(1, "schedule-oracle", ok, "exact integer equality");
}

TEST_CASE("criterion 2: common points are fixed points") {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto problem = generate_quadratic(sized(20, 10, seed));
    const Vec<double> origin = Vec<double>::Zero(20);
    for (Index r : {2, 3, 5, 10}) {
      for (const auto& block : cyclic_block_operators(problem, r)) {
        ProjectionCounter counter;
        worst = std::max(worst, (apply_dr(block, origin, counter) - origin).norm());
      }
      ProjectionCounter counter;
      const auto sweep = build_full_cycle(problem, r);
      worst = std::max(worst, apply_sweep(sweep, origin, counter).norm());
    }
  }
  REPORT_AND_CHECK(2, "fixed-point-identity", worst <= 1e-12,
                   "max displacement of the origin " + fmt(worst));
}

TEST_CASE("criterion 3: dr operators are firmly nonexpansive") {
  Rng rng(303);
  double worst_slack = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 10000; ++trial) {
    const Index n = 2 + static_cast<Index>(rng() % 7);
    const Index r = 2 + static_cast<Index>(rng() % 4);
    std::vector<ConvexSet<double>> sets;
    for (Index i = 0; i < r; ++i) sets.push_back(test::random_set(rng, n));
    std::vector<const ConvexSet<double>*> pointers;
    for (const auto& set : sets) pointers.push_back(&set);
    const RSetsDROperator<double> op(std::move(pointers));
    const Vec<double> x = test::random_vec(rng, n);
    const Vec<double> y = test::random_vec(rng, n);
    ProjectionCounter counter;
    const Vec<double> tx = apply_dr(op, x, counter);
    const Vec<double> ty = apply_dr(op, y, counter);
    const double slack = (tx - ty).dot(x - y) - (tx - ty).squaredNorm();
    worst_slack = std::min(worst_slack, slack);
    ok = ok && slack >= -1e-10;
  }
  REPORT_AND_CHECK(3, "firm-nonexpansiveness", ok,
                   "worst slack " + fmt(worst_slack) + " over 10^4 draws");
}

TEST_CASE("criteria 4 and 5: convergence and Fejer monotonicity") {
  bool converged_ok = true;
  bool fejer_ok = true;
  double worst_error = 0.0;
  std::string first_failure;

  for (const Family family : {Family::linear, Family::quadratic}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto params = sized(50, 200, seed);
      const auto problem =
          family == Family::linear ? generate_linear(params) : generate_quadratic(params);
      const Vec<double> x0 = start_point(params);

      std::vector<SolverConfig<double>> configs;
      for (Index r : {2, 3, 5, 10, 20}) {
        SolverConfig<double> cyclic;
        cyclic.method = Method::cyclic;
        cyclic.r = r;
        configs.push_back(cyclic);
        SolverConfig<double> full;
        full.method = Method::full_cycle;
        full.r = r;
        configs.push_back(full);
      }
      SolverConfig<double> product;
      product.method = Method::product_space;
      configs.push_back(product);
      SolverConfig<double> random;
      random.method = Method::random_product;
      random.r = 3;
      random.rng_seed = 0;
      configs.push_back(random);

      for (auto& config : configs) {
        config.max_iterations = 100000;
        config.trace_every = 0;

        // Fejer monotonicity toward the origin, checked along the
        // full-cycle trajectories (the origin lies in every set).
        double previous_distance = x0.norm();
        bool monotone = true;
        IterateObserver<double> observer;
        if (config.method == Method::full_cycle)
          observer = [&previous_distance, &monotone](std::uint64_t, const Vec<double>& x) {
            const double distance = x.norm();
            if (distance > previous_distance + 1e-10) monotone = false;
            previous_distance = distance;
          };

        const auto report = solve(problem, config, x0, observer);
        const double scaled_error =
            error_metric(problem, report.final_point) / static_cast<double>(problem.m());
        worst_error = std::max(worst_error, scaled_error);
        const bool run_ok =
            report.termination == Termination::converged && scaled_error <= 1e-6;
        if (!run_ok && first_failure.empty())
          first_failure = to_string(family) + " seed " + std::to_string(seed) + " " +
                          to_string(config.method) + " r=" + std::to_string(config.r);
        converged_ok = converged_ok && run_ok;
        if (config.method == Method::full_cycle) fejer_ok = fejer_ok && monotone;
      }
    }
  }
  REPORT_AND_CHECK(4, "convergence", converged_ok,
                   converged_ok ? "all methods, 20 instances, worst Error/m " + fmt(worst_error)
                                : "first failure: " + first_failure);
  REPORT_AND_CHECK(5, "fejer-monotonicity", fejer_ok,
                   "full-cycle distances to the origin never grew by more than 1e-10");
}

TEST_CASE("criterion 6: larger blocks reach accuracy with fewer projections") {
  const auto params = sized(100, 1000, 0);
  const auto problem = generate_quadratic(params);
  const Vec<double> x0 = start_point(params);
  const double threshold = 1e-4 * static_cast<double>(problem.m());

  auto projections_to_accuracy = [&problem, &x0, threshold](Index r) -> std::uint64_t {
    const auto blocks = cyclic_block_operators(problem, r);
    Vec<double> x = x0;
    ProjectionCounter counter;
    for (std::uint64_t k = 0; k < 200000; ++k) {
      if (error_metric(problem, x) <= threshold) return counter.projections;
      x = apply_dr(blocks[static_cast<std::size_t>(k % blocks.size())], x, counter);
    }
    return 0;  // accuracy not reached
  };

  const std::uint64_t base = projections_to_accuracy(2);
  const std::uint64_t with_r10 = projections_to_accuracy(10);
  const std::uint64_t with_r20 = projections_to_accuracy(20);
  const bool reached = base > 0 && with_r10 > 0 && with_r20 > 0;
  const bool ok = reached &&
                  static_cast<double>(with_r10) <= 0.8 * static_cast<double>(base) &&
                  static_cast<double>(with_r20) <= 0.8 * static_cast<double>(base);
  REPORT_AND_CHECK(6, "projection-efficiency", ok,
                   "projections to Error<=" + fmt(threshold) + ": r=2 " + std::to_string(base) +
                       ", r=10 " + std::to_string(with_r10) + ", r=20 " +
                       std::to_string(with_r20));
}

TEST_CASE("criterion 7: product-space runs pay for the m*n state") {
  const auto params = sized(100, 1000, 0);
  const auto problem = generate_quadratic(params);
  const Vec<double> x0 = start_point(params);

  std::vector<const ConvexSet<double>*> sets;
  for (const auto& set : problem.sets) sets.push_back(&set);
  const ProductSpaceDROperator<double> op(std::move(sets));
  const bool state_ok =
      op.state_size() == static_cast<std::uint64_t>(problem.m()) *
                             static_cast<std::uint64_t>(problem.n) &&
      op.initial_state(x0).size() == static_cast<std::size_t>(problem.m()) && x0.size() == problem.n;

  SolverConfig<double> config;
  config.method = Method::product_space;
  config.max_iterations = 1000000;
  config.trace_every = 0;
  const auto product_report = solve(problem, config, x0);

  double slowest_cyclic = 0.0;
  double fastest_cyclic = std::numeric_limits<double>::infinity();
  for (Index r : {2, 3, 5, 10, 20}) {
    SolverConfig<double> cyclic;
    cyclic.method = Method::cyclic;
    cyclic.r = r;
    cyclic.max_iterations = 1000000;
    cyclic.trace_every = 0;
    const auto report = solve(problem, cyclic, x0);
    slowest_cyclic = std::max(slowest_cyclic, report.wall_time_s);
    fastest_cyclic = std::min(fastest_cyclic, report.wall_time_s);
  }
  const double factor_vs_slowest = product_report.wall_time_s / slowest_cyclic;
  const double factor_vs_fastest = product_report.wall_time_s / fastest_cyclic;
  const bool ok = state_ok && factor_vs_slowest >= 2.0;
  REPORT_AND_CHECK(7, "product-space-overhead", ok,
                   "state " + std::to_string(op.state_size()) + " vs " +
                       std::to_string(problem.n) + " scalars; wall-time factor " +
                       fmt(factor_vs_slowest) + "x over the slowest cyclic run, " +
                       fmt(factor_vs_fastest) + "x over the fastest (report-only beyond 2x)");
}

TEST_CASE("criterion 8: performance profile formulas and invariants") {
  Eigen::MatrixXd ratios(2, 2);
  ratios << 1, 2, 2, 1;
  const auto profile = performance_profile(ratios, {"a", "b"}, {1.0, 2.0});
  bool ok = profile.pi(0, 0) == 0.5 && profile.pi(0, 1) == 0.5 && profile.pi(1, 0) == 1.0 &&
            profile.pi(1, 1) == 1.0;

  // Invariants on an actual benchmark output.
  BenchPlan plan;
  plan.families = {Family::linear, Family::quadratic};
  plan.sizes = {SizeSpec{12, 6}, SizeSpec{20, 6}};
  plan.repetitions = 2;
  plan.base_seed = 8;
  for (Index r : {2, 3}) {
    SolverSpec spec;
    spec.id = "dr-r" + std::to_string(r);
    spec.config.method = Method::cyclic;
    spec.config.r = r;
    spec.config.max_iterations = 200000;
    plan.solvers.push_back(spec);
  }
  const auto records = run_bench(plan);
  for (const auto metric : {BenchMetric::projections, BenchMetric::time}) {
    const auto table = averaged_times(records, metric);
    const auto table_ratios = performance_ratios(table.values);
    for (Index p = 0; p < table_ratios.rows(); ++p)
      ok = ok && table_ratios.row(p).minCoeff() == 1.0;
    const auto grid = default_tau_grid(table_ratios);
    const auto bench_profile = performance_profile(table_ratios, table.solvers, grid);
    for (Index s = 0; s < bench_profile.pi.cols(); ++s) {
      for (Index t = 0; t + 1 < bench_profile.pi.rows(); ++t)
        ok = ok && bench_profile.pi(t, s) <= bench_profile.pi(t + 1, s);
      ok = ok && bench_profile.pi.col(s).minCoeff() >= 0.0 &&
           bench_profile.pi.col(s).maxCoeff() <= 1.0 &&
           bench_profile.pi(bench_profile.pi.rows() - 1, s) == 1.0;
    }
  }
  REPORT_AND_CHECK(8, "performance-profile", ok,
                   "pi(1)=0.5 and pi(2)=1.0 on the 2x2 table; monotone in [0,1] on bench output");
}

TEST_CASE("criterion 9: the shipped desk plan is deterministic, in parallel too") {
  test::Workdir wd("acceptance_bench");
  const std::string plan = std::string(CYCDR_PLANS_DIR) + "/desk.json";

  const auto serial = test::run_cli(wd, CYCDR_BIN,
                                    "bench --plan '" + plan + "' --out '" +
                                        (wd / "serial.csv").string() + "' --parallel 1");
  const auto parallel = test::run_cli(wd, CYCDR_BIN,
                                      "bench --plan '" + plan + "' --out '" +
                                          (wd / "parallel.csv").string() + "' --parallel 4");
  const std::string a = test::strip_column(test::slurp(wd / "serial.csv"), "wall_time_s");
  const std::string b = test::strip_column(test::slurp(wd / "parallel.csv"), "wall_time_s");
  const bool ok = serial.exit_code == 0 && parallel.exit_code == 0 && !a.empty() && a == b;
  REPORT_AND_CHECK(9, "bench-determinism", ok,
                   "two executions byte-identical after deleting wall_time_s (--parallel 1 vs 4)");
}

TEST_CASE("criterion 10: the stall window is honored exactly") {
  struct Case {
    Index m;
    Index r;
    Index window;
  };
  bool ok = true;
  std::string detail;
  for (const Case c : {Case{5, 3, 2}, Case{10, 2, 5}, Case{7, 7, 1}}) {
    ok = ok && default_stall_window(c.m, c.r, Method::cyclic) == c.window;

    FeasibilityProblem<double> problem;
    problem.n = 4;
    for (Index i = 0; i < c.m; ++i)
      problem.sets.emplace_back(Ball<double>(Vec<double>::Zero(4), 1.0 + static_cast<double>(i)));
    SolverConfig<double> config;
    config.method = Method::cyclic;
    config.r = c.r;
    const Vec<double> feasible = Vec<double>::Zero(4);
    const auto report = solve(problem, config, feasible);
    ok = ok && report.termination == Termination::converged &&
         report.counters.iterations == static_cast<std::uint64_t>(c.window);
    detail += (detail.empty() ? "" : ", ") + std::string("m=") + std::to_string(c.m) +
              " r=" + std::to_string(c.r) + " stops after " +
              std::to_string(report.counters.iterations);
  }
  REPORT_AND_CHECK(10, "stopping-criterion", ok, detail);
}
