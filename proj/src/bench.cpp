#include "cycdr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "cycdr/csv.hpp"
#include "cycdr/errors.hpp"
#include "cycdr/rng.hpp"

namespace cycdr {

namespace {

constexpr std::uint64_t kX0Label = 0x78305f7374726d00ull;  // "x0_strm"

std::uint64_t family_code(Family family) {
  return family == Family::linear ? 1 : family == Family::quadratic ? 2 : 3;
}

const char* kRecordsHeader =
    "family,m,n,solver,rep,seed,wall_time_s,iterations,projections,final_error,termination";

}  // namespace

std::uint64_t problem_seed_for(std::uint64_t base_seed, Family family, Index m, int rep) {
  std::uint64_t seed = derive_seed(base_seed, family_code(family));
  seed = derive_seed(seed, static_cast<std::uint64_t>(m));
  return derive_seed(seed, static_cast<std::uint64_t>(rep));
}

std::uint64_t x0_seed_for(std::uint64_t problem_seed) {
  return derive_seed(problem_seed, kX0Label);
}

void BenchPlan::validate() const {
  if (families.empty()) throw std::invalid_argument("plan: families must be nonempty");
  for (Family f : families)
    if (f == Family::custom)
      throw std::invalid_argument("plan: only the linear and quadratic families are generatable");
  if (sizes.empty()) throw std::invalid_argument("plan: sizes must be nonempty");
  for (const auto& size : sizes) {
    if (size.m < 1 || size.n < 1)
      throw std::invalid_argument("plan: every size needs m >= 1 and n >= 1");
  }
  if (solvers.empty()) throw std::invalid_argument("plan: solvers must be nonempty");
  if (repetitions < 1) throw std::invalid_argument("plan: repetitions must be >= 1");
  std::set<std::string> ids;
  for (const auto& spec : solvers) {
    if (spec.id.empty()) throw std::invalid_argument("plan: solver id must be nonempty");
    if (spec.id.find_first_of(",\n") != std::string::npos)
      throw std::invalid_argument("plan: solver id '" + spec.id + "' must not contain ',' or newline");
    if (!ids.insert(spec.id).second)
      throw std::invalid_argument("plan: duplicate solver id '" + spec.id + "'");
    for (const auto& size : sizes) {
      const auto& cfg = spec.config;
      if (cfg.method != Method::product_space) {
        if (cfg.r < 2 || cfg.r > size.m)
          throw std::invalid_argument("plan: solver '" + spec.id + "' needs 2 <= r <= m, got r = " +
                                      std::to_string(cfg.r) + " with m = " + std::to_string(size.m));
        if (cfg.method == Method::short_cycle && size.m % (cfg.r - 1) != 0)
          throw std::invalid_argument("plan: solver '" + spec.id + "': r - 1 = " +
                                      std::to_string(cfg.r - 1) + " must divide m = " +
                                      std::to_string(size.m));
      }
      if (!(cfg.epsilon > 0.0))
        throw std::invalid_argument("plan: solver '" + spec.id + "': epsilon must be > 0");
      if (cfg.max_iterations < 1)
        throw std::invalid_argument("plan: solver '" + spec.id + "': max_iterations must be >= 1");
    }
  }
}

namespace {

struct Cell {
  Family family;
  SizeSpec size;
  int rep;
};

std::vector<BenchRecord> run_cell(const BenchPlan& plan, const Cell& cell) {
  GeneratorParams params;
  params.n = cell.size.n;
  params.m = cell.size.m;
  params.seed = problem_seed_for(plan.base_seed, cell.family, cell.size.m, cell.rep);
  const FeasibilityProblem<double> problem =
      cell.family == Family::linear ? generate_linear(params) : generate_quadratic(params);

  GeneratorParams x0_params = params;
  x0_params.seed = x0_seed_for(params.seed);
  const Vec<double> x0 = generate_x0(x0_params);

  std::vector<BenchRecord> records;
  records.reserve(plan.solvers.size());
  for (const auto& spec : plan.solvers) {
    SolverConfig<double> config = spec.config;
    config.trace_every = 0;  // records keep endpoints only
    const SolveReport<double> report = solve(problem, config, x0);
    BenchRecord record;
    record.family = cell.family;
    record.m = cell.size.m;
    record.n = cell.size.n;
    record.solver = spec.id;
    record.rep = cell.rep;
    record.seed = params.seed;
    record.wall_time_s = report.wall_time_s;
    record.iterations = report.counters.iterations;
    record.projections = report.counters.projections;
    record.final_error = report.error_trace.back().error;
    record.termination = report.termination;
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace

void run_bench_streaming(const BenchPlan& plan, int parallel, const RecordSink& sink,
                         std::ostream* progress) {
  plan.validate();

  std::vector<Cell> cells;
  for (Family family : plan.families)
    for (const SizeSpec& size : plan.sizes)
      for (int rep = 0; rep < plan.repetitions; ++rep) cells.push_back(Cell{family, size, rep});

  const std::size_t total = cells.size();
  std::vector<std::vector<BenchRecord>> results(total);
  std::vector<char> done(total, 0);
  std::atomic<std::size_t> next_cell{0};
  std::size_t next_flush = 0;
  std::mutex flush_mutex;
  std::exception_ptr failure;

  auto worker = [&]() {
    while (true) {
      const std::size_t idx = next_cell.fetch_add(1);
      if (idx >= total) return;
      std::vector<BenchRecord> records;
      try {
        records = run_cell(plan, cells[idx]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(flush_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
      std::lock_guard<std::mutex> lock(flush_mutex);
      results[idx] = std::move(records);
      done[idx] = 1;
      if (progress) {
        const Cell& cell = cells[idx];
        *progress << "[bench] cell " << (idx + 1) << "/" << total << " "
                  << to_string(cell.family) << " m=" << cell.size.m << " n=" << cell.size.n
                  << " rep=" << cell.rep << " done\n";
        progress->flush();
      }
      // Emit the completed prefix so output order never depends on the
      // thread schedule.
      while (next_flush < total && done[next_flush]) {
        if (sink)
          for (const BenchRecord& record : results[next_flush]) sink(record);
        results[next_flush].clear();
        ++next_flush;
      }
    }
  };

  const int thread_count = std::max(1, parallel);
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(thread_count));
    for (int i = 0; i < thread_count; ++i) threads.emplace_back(worker);
    for (auto& thread : threads) thread.join();
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<BenchRecord> run_bench(const BenchPlan& plan, int parallel) {
  std::vector<BenchRecord> records;
  run_bench_streaming(
      plan, parallel, [&records](const BenchRecord& record) { records.push_back(record); });
  return records;
}

std::string to_string(const ProblemKey& key) {
  return to_string(key.family) + " m=" + std::to_string(key.m) + " n=" + std::to_string(key.n);
}

MetricTable averaged_times(const std::vector<BenchRecord>& records, BenchMetric metric) {
  if (records.empty()) throw std::invalid_argument("averaged_times: no records");

  MetricTable table;
  auto problem_index = [&table](const ProblemKey& key) {
    for (std::size_t i = 0; i < table.problems.size(); ++i)
      if (table.problems[i] == key) return i;
    table.problems.push_back(key);
    return table.problems.size() - 1;
  };
  auto solver_index = [&table](const std::string& id) {
    for (std::size_t i = 0; i < table.solvers.size(); ++i)
      if (table.solvers[i] == id) return i;
    table.solvers.push_back(id);
    return table.solvers.size() - 1;
  };
  for (const auto& record : records) {
    problem_index(ProblemKey{record.family, record.m, record.n});
    solver_index(record.solver);
  }

  const auto rows = static_cast<Index>(table.problems.size());
  const auto cols = static_cast<Index>(table.solvers.size());
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::MatrixXi successes = Eigen::MatrixXi::Zero(rows, cols);
  Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(rows, cols);
  table.failures = Eigen::MatrixXi::Zero(rows, cols);

  for (const auto& record : records) {
    const auto p = static_cast<Index>(problem_index(ProblemKey{record.family, record.m, record.n}));
    const auto s = static_cast<Index>(solver_index(record.solver));
    seen(p, s) += 1;
    if (record.termination == Termination::converged) {
      sums(p, s) += metric == BenchMetric::time ? record.wall_time_s
                                                : static_cast<double>(record.projections);
      successes(p, s) += 1;
    } else {
      table.failures(p, s) += 1;
    }
  }

  std::string gaps;
  for (Index p = 0; p < rows; ++p)
    for (Index s = 0; s < cols; ++s)
      if (seen(p, s) == 0)
        gaps += (gaps.empty() ? "" : "; ") + to_string(table.problems[static_cast<std::size_t>(p)]) +
                " x " + table.solvers[static_cast<std::size_t>(s)];
  if (!gaps.empty())
    throw std::invalid_argument("averaged_times: missing (problem, solver) cells: " + gaps);

  table.values.resize(rows, cols);
  for (Index p = 0; p < rows; ++p)
    for (Index s = 0; s < cols; ++s)
      table.values(p, s) = successes(p, s) > 0 ? sums(p, s) / successes(p, s)
                                               : std::numeric_limits<double>::quiet_NaN();
  return table;
}

Eigen::MatrixXd performance_ratios(const Eigen::MatrixXd& times) {
  if (times.rows() < 1 || times.cols() < 1)
    throw std::invalid_argument("performance_ratios: empty table");
  Eigen::MatrixXd ratios(times.rows(), times.cols());
  for (Index p = 0; p < times.rows(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (Index s = 0; s < times.cols(); ++s) {
      const double t = times(p, s);
      if (!std::isfinite(t) || t <= 0.0)
        throw std::invalid_argument("performance_ratios: entry (" + std::to_string(p) + ", " +
                                    std::to_string(s) + ") is not a finite positive time");
      best = std::min(best, t);
    }
    for (Index s = 0; s < times.cols(); ++s) ratios(p, s) = times(p, s) / best;
  }
  return ratios;
}

std::vector<double> default_tau_grid(const Eigen::MatrixXd& ratios, int points) {
  if (points < 1) throw std::invalid_argument("default_tau_grid: points must be >= 1");
  const double tau_max = ratios.maxCoeff();
  if (!(tau_max > 1.0) || points == 1) return {1.0};
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double log_max = std::log(tau_max);
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] = std::exp(log_max * static_cast<double>(i) / (points - 1));
  grid.front() = 1.0;
  grid.back() = tau_max;
  return grid;
}

PerformanceProfile performance_profile(const Eigen::MatrixXd& ratios,
                                       const std::vector<std::string>& solvers,
                                       const std::vector<double>& tau_grid) {
  if (ratios.rows() < 1) throw std::invalid_argument("performance_profile: empty problem set");
  if (static_cast<Index>(solvers.size()) != ratios.cols())
    throw std::invalid_argument("performance_profile: solver names do not match ratio columns");
  if (tau_grid.empty()) throw std::invalid_argument("performance_profile: empty tau grid");
  if (tau_grid.front() < 1.0)
    throw std::invalid_argument("performance_profile: tau grid must start at >= 1");
  for (std::size_t i = 1; i < tau_grid.size(); ++i)
    if (!(tau_grid[i] >= tau_grid[i - 1]))
      throw std::invalid_argument("performance_profile: tau grid must be ascending");

  PerformanceProfile profile;
  profile.tau = tau_grid;
  profile.solvers = solvers;
  profile.pi.resize(static_cast<Index>(tau_grid.size()), ratios.cols());
  const double problem_count = static_cast<double>(ratios.rows());
  for (std::size_t t = 0; t < tau_grid.size(); ++t)
    for (Index s = 0; s < ratios.cols(); ++s) {
      Index within = 0;
      for (Index p = 0; p < ratios.rows(); ++p)
        if (ratios(p, s) <= tau_grid[t]) ++within;
      profile.pi(static_cast<Index>(t), s) = static_cast<double>(within) / problem_count;
    }
  return profile;
}

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::string record_to_line(const BenchRecord& r) {
  return to_string(r.family) + "," + std::to_string(r.m) + "," + std::to_string(r.n) + "," +
         r.solver + "," + std::to_string(r.rep) + "," + std::to_string(r.seed) + "," +
         format_double(r.wall_time_s) + "," + std::to_string(r.iterations) + "," +
         std::to_string(r.projections) + "," + format_double(r.final_error) + "," +
         to_string(r.termination);
}

Termination termination_from_string(const std::string& name, const std::string& context) {
  if (name == "converged") return Termination::converged;
  if (name == "max-iterations") return Termination::max_iterations;
  if (name == "numerical-failure") return Termination::numerical_failure;
  throw ParseError(context + ": unknown termination '" + name + "'");
}

}  // namespace

void export_records_csv(const std::vector<BenchRecord>& records, const std::string& path) {
  auto out = open_for_write(path);
  out << kRecordsHeader << '\n';
  for (const auto& record : records) out << record_to_line(record) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<BenchRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("'" + path + "': empty file");
  if (line == std::string(kRecordsHeader) + "\r") line.pop_back();
  if (line != kRecordsHeader)
    throw ParseError("'" + path + "': unexpected header '" + line + "'");

  std::vector<BenchRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string context = "'" + path + "' line " + std::to_string(line_no);
    if (fields.size() != 11)
      throw ParseError(context + ": expected 11 fields, got " + std::to_string(fields.size()));
    BenchRecord record;
    try {
      record.family = family_from_string(fields[0]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(context + ": " + e.what());
    }
    record.m = static_cast<Index>(parse_int(fields[1], context + " field m"));
    record.n = static_cast<Index>(parse_int(fields[2], context + " field n"));
    record.solver = fields[3];
    record.rep = static_cast<int>(parse_int(fields[4], context + " field rep"));
    record.seed = parse_uint(fields[5], context + " field seed");
    record.wall_time_s = parse_double(fields[6], context + " field wall_time_s");
    record.iterations = parse_uint(fields[7], context + " field iterations");
    record.projections = parse_uint(fields[8], context + " field projections");
    record.final_error = parse_double(fields[9], context + " field final_error");
    record.termination = termination_from_string(fields[10], context + " field termination");
    records.push_back(std::move(record));
  }
  return records;
}

void export_profile_csv(const PerformanceProfile& profile, const std::string& path) {
  auto out = open_for_write(path);
  out << "tau";
  for (const auto& id : profile.solvers) out << ',' << id;
  out << '\n';
  for (std::size_t t = 0; t < profile.tau.size(); ++t) {
    out << format_double(profile.tau[t]);
    for (Index s = 0; s < profile.pi.cols(); ++s)
      out << ',' << format_double(profile.pi(static_cast<Index>(t), s));
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

void export_trace_csv(const std::vector<TraceRow<double>>& trace, const std::string& path) {
  auto out = open_for_write(path);
  out << "iteration,projections,error,elapsed_s\n";
  for (const auto& row : trace)
    out << row.iteration << ',' << row.projections << ',' << format_double(row.error) << ','
        << format_double(row.elapsed_s) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

namespace {

const nlohmann::json& plan_field(const nlohmann::json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

template <class T>
T plan_as(const nlohmann::json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
}

}  // namespace

BenchPlan plan_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("plan: top level must be an object");
  const int version = plan_as<int>(plan_field(j, "version", "plan"), "plan.version");
  if (version != 1) throw ParseError("plan.version: unsupported version " + std::to_string(version));

  BenchPlan plan;
  plan.base_seed = plan_as<std::uint64_t>(plan_field(j, "base_seed", "plan"), "plan.base_seed");
  if (const auto it = j.find("repetitions"); it != j.end())
    plan.repetitions = plan_as<int>(*it, "plan.repetitions");  // default stays 10

  const auto& families = plan_field(j, "families", "plan");
  if (!families.is_array()) throw ParseError("plan.families: expected an array");
  for (std::size_t i = 0; i < families.size(); ++i) {
    try {
      plan.families.push_back(
          family_from_string(plan_as<std::string>(families[i], "plan.families")));
    } catch (const std::invalid_argument& e) {
      throw ParseError("plan.families[" + std::to_string(i) + "]: " + e.what());
    }
  }

  const auto& sizes = plan_field(j, "sizes", "plan");
  if (!sizes.is_array()) throw ParseError("plan.sizes: expected an array");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::string where = "plan.sizes[" + std::to_string(i) + "]";
    SizeSpec size;
    size.m = plan_as<Index>(plan_field(sizes[i], "m", where), where + ".m");
    size.n = plan_as<Index>(plan_field(sizes[i], "n", where), where + ".n");
    plan.sizes.push_back(size);
  }

  SolverConfig<double> defaults;
  if (const auto it = j.find("epsilon"); it != j.end())
    defaults.epsilon = plan_as<double>(*it, "plan.epsilon");
  if (const auto it = j.find("max_iterations"); it != j.end())
    defaults.max_iterations = plan_as<std::uint64_t>(*it, "plan.max_iterations");

  const auto& solvers = plan_field(j, "solvers", "plan");
  if (!solvers.is_array()) throw ParseError("plan.solvers: expected an array");
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    const std::string where = "plan.solvers[" + std::to_string(i) + "]";
    SolverSpec spec;
    spec.id = plan_as<std::string>(plan_field(solvers[i], "id", where), where + ".id");
    spec.config = defaults;
    try {
      spec.config.method = method_from_string(
          plan_as<std::string>(plan_field(solvers[i], "method", where), where + ".method"));
    } catch (const std::invalid_argument& e) {
      throw ParseError(where + ".method: " + e.what());
    }
    if (const auto it = solvers[i].find("r"); it != solvers[i].end())
      spec.config.r = plan_as<Index>(*it, where + ".r");
    if (const auto it = solvers[i].find("epsilon"); it != solvers[i].end())
      spec.config.epsilon = plan_as<double>(*it, where + ".epsilon");
    if (const auto it = solvers[i].find("max_iterations"); it != solvers[i].end())
      spec.config.max_iterations = plan_as<std::uint64_t>(*it, where + ".max_iterations");
    if (const auto it = solvers[i].find("stall_window"); it != solvers[i].end())
      spec.config.stall_window = plan_as<Index>(*it, where + ".stall_window");
    if (const auto it = solvers[i].find("rng_seed"); it != solvers[i].end())
      spec.config.rng_seed = plan_as<std::uint64_t>(*it, where + ".rng_seed");
    if (const auto it = solvers[i].find("coin_bias"); it != solvers[i].end())
      spec.config.coin_bias = plan_as<double>(*it, where + ".coin_bias");
    plan.solvers.push_back(std::move(spec));
  }

  try {
    plan.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return plan;
}

BenchPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
  try {
    return plan_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

}  // namespace cycdr
