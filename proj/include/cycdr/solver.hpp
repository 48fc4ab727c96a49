#pragma once

#include <chrono>
#include <type_traits>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cycdr/operators.hpp"
#include "cycdr/problem.hpp"
#include "cycdr/schedule.hpp"

namespace cycdr {

enum class Method { cyclic, full_cycle, short_cycle, product_space, random_product };
enum class Termination { converged, max_iterations, numerical_failure };

std::string to_string(Method method);
Method method_from_string(const std::string& name);
std::string to_string(Termination termination);

template <class Scalar = double>
struct SolverConfig {
  Method method = Method::cyclic;
  // Block size for the cyclic, full-cycle, short-cycle and random-product
  // methods; ignored by product-space.
  Index r = 2;
  // Relative-change tolerance of the stopping criterion.
  Scalar epsilon = Scalar(1e-12);
  std::uint64_t max_iterations = 1000000;
  // Consecutive small-change steps required to stop; defaults to
  // ceil(m / r), and to 1 for product-space.
  std::optional<Index> stall_window;
  // Record an error-trace row every this many iterations; 0 records only the
  // initial and final rows.
  std::uint64_t trace_every = 1;
  // Coin stream for the random-product method.
  std::uint64_t rng_seed = 0;
  double coin_bias = 0.5;
};

inline Index default_stall_window(Index m, Index r, Method method) {
  if (method == Method::product_space) return 1;
  return (m + r - 1) / r;  // ceil(m / r)
}

template <class Scalar>
Index resolved_stall_window(const SolverConfig<Scalar>& config, Index m) {
  return config.stall_window ? *config.stall_window
                             : default_stall_window(m, config.r, config.method);
}

// Relative step length, guarded at the origin: the plain ratio
// ||next - prev|| / ||prev|| is undefined there, so the denominator is
// floored at 1.
template <class Scalar>
Scalar relative_change(const Vec<Scalar>& prev, const Vec<Scalar>& next) {
  return (next - prev).norm() / std::max(prev.norm(), Scalar(1));
}

// True iff every one of the last `window` steps recorded in `history`
// (oldest first) changed by at most epsilon in relative terms. Boundary
// changes count as satisfied.
template <class Scalar>
bool check_termination(const std::vector<Vec<Scalar>>& history, Scalar epsilon, Index window) {
  if (window < 1) throw std::invalid_argument("check_termination: window must be >= 1");
  if (static_cast<Index>(history.size()) < window + 1)
    throw std::invalid_argument("check_termination: history must hold at least window + 1 iterates");
  const std::size_t last = history.size() - 1;
  for (Index j = 1; j <= window; ++j) {
    const auto& prev = history[last - static_cast<std::size_t>(window - j) - 1];
    const auto& next = history[last - static_cast<std::size_t>(window - j)];
    if (!(relative_change(prev, next) <= epsilon)) return false;
  }
  return true;
}

// Aggregate infeasibility: the sum over all sets of the distance to the set.
// Diagnostic only; does not touch any projection counter.
template <class Scalar>
Scalar error_metric(const FeasibilityProblem<Scalar>& problem, const Vec<Scalar>& x) {
  detail::require_dim(problem.n, x, "error_metric");
  Scalar total = 0;
  for (const auto& set : problem.sets) total += membership_residual(set, x);
  return total;
}

template <class Scalar>
struct TraceRow {
  std::uint64_t iteration = 0;
  std::uint64_t projections = 0;
  Scalar error = 0;
  double elapsed_s = 0.0;
};

template <class Scalar>
struct SolveReport {
  Vec<Scalar> final_point;
  Termination termination = Termination::max_iterations;
  ProjectionCounter counters;
  std::vector<TraceRow<Scalar>> error_trace;
  // Time spent in the algorithmic loop only; trace error evaluations and
  // reporting are excluded.
  double wall_time_s = 0.0;
  SolverConfig<Scalar> config;
  std::uint64_t problem_seed = 0;
};

// Called after every accepted step with the iteration number and the current
// iterate (the diagonal average for product-space runs).
template <class Scalar>
using IterateObserver = std::function<void(std::uint64_t, const Vec<Scalar>&)>;

namespace detail {

template <class Scalar>
void validate_solve_inputs(const FeasibilityProblem<Scalar>& problem,
                           const SolverConfig<Scalar>& config, const Vec<Scalar>& x0) {
  problem.validate();
  require_dim(problem.n, x0, "solve");
  require_finite(x0, "solve: x0");
  if (!(config.epsilon > Scalar(0)))
    throw std::invalid_argument("solve: epsilon must be > 0");
  if (config.max_iterations < 1)
    throw std::invalid_argument("solve: max_iterations must be >= 1");
  if (config.stall_window && *config.stall_window < 1)
    throw std::invalid_argument("solve: stall_window must be >= 1");
  const Index m = problem.m();
  switch (config.method) {
    case Method::product_space:
      break;
    case Method::short_cycle:
      if (config.r < 2) throw std::invalid_argument("solve: method requires r >= 2");
      if (config.r > m)
        throw std::invalid_argument("solve: r = " + std::to_string(config.r) +
                                    " exceeds the set count m = " + std::to_string(m));
      if (m % (config.r - 1) != 0)
        throw std::invalid_argument("solve: short-cycle requires r - 1 = " +
                                    std::to_string(config.r - 1) + " to divide m = " +
                                    std::to_string(m));
      break;
    default:
      if (config.r < 2) throw std::invalid_argument("solve: method requires r >= 2");
      if (config.r > m)
        throw std::invalid_argument("solve: r = " + std::to_string(config.r) +
                                    " exceeds the set count m = " + std::to_string(m));
      break;
  }
  if (config.method == Method::random_product &&
      !(config.coin_bias >= 0.0 && config.coin_bias <= 1.0))
    throw std::invalid_argument("solve: coin_bias must lie in [0, 1]");
}

// Shared iteration driver. Steps until `window` consecutive relative changes
// fall at or below epsilon, the iteration cap is reached, or an iterate goes
// non-finite (in which case the last finite iterate is kept). Only the step
// and change evaluation are timed.
template <class Scalar, class State, class StepFn, class ChangeFn, class FiniteFn, class ErrorFn,
          class ObserveFn>
Termination run_iteration_loop(State& x, Index window, Scalar epsilon,
                               std::uint64_t max_iterations, std::uint64_t trace_every,
                               ProjectionCounter& counter, std::vector<TraceRow<Scalar>>& trace,
                               double& algo_seconds, StepFn&& step, ChangeFn&& change,
                               FiniteFn&& finite, ErrorFn&& error_at, ObserveFn&& observe) {
  using Clock = std::chrono::steady_clock;
  trace.push_back(TraceRow<Scalar>{0, counter.projections, error_at(x), 0.0});
  Index consecutive = 0;
  Termination term = Termination::max_iterations;
  bool failed = false;
  while (counter.iterations < max_iterations) {
    const auto start = Clock::now();
    State next = step(x, counter);
    const Scalar rel = change(x, next);
    algo_seconds += std::chrono::duration<double>(Clock::now() - start).count();
    ++counter.iterations;
    if (!finite(next)) {
      term = Termination::numerical_failure;
      failed = true;
      break;
    }
    x = std::move(next);
    observe(counter.iterations, x);
    if (trace_every != 0 && counter.iterations % trace_every == 0)
      trace.push_back(
          TraceRow<Scalar>{counter.iterations, counter.projections, error_at(x), algo_seconds});
    consecutive = (rel <= epsilon) ? consecutive + 1 : 0;
    if (consecutive >= window) {
      term = Termination::converged;
      break;
    }
  }
  if (failed || trace.back().iteration != counter.iterations)
    trace.push_back(
        TraceRow<Scalar>{counter.iterations, counter.projections, error_at(x), algo_seconds});
  return term;
}

}  // namespace detail

// Run the configured method from x0 until the stopping criterion holds for
// the stall window, the iteration cap is hit, or the iterate degenerates.
template <class Scalar>
SolveReport<Scalar> solve(const FeasibilityProblem<Scalar>& problem,
                          const SolverConfig<Scalar>& config, const Vec<Scalar>& x0,
                          const IterateObserver<std::type_identity_t<Scalar>>& observer = {}) {
  detail::validate_solve_inputs(problem, config, x0);
  const Index window = resolved_stall_window(config, problem.m());

  SolveReport<Scalar> report;
  report.config = config;
  report.problem_seed = problem.meta.seed;
  double algo_seconds = 0.0;

  if (config.method == Method::product_space) {
    std::vector<const ConvexSet<Scalar>*> sets;
    sets.reserve(problem.sets.size());
    for (const auto& set : problem.sets) sets.push_back(&set);
    const ProductSpaceDROperator<Scalar> op(std::move(sets));
    std::vector<Vec<Scalar>> state = op.initial_state(x0);

    auto step = [&op](const std::vector<Vec<Scalar>>& s, ProjectionCounter& c) {
      return apply_product_dr(op, s, c);
    };
    // Relative change in the product space: norms taken over the full tuple.
    auto change = [](const std::vector<Vec<Scalar>>& prev, const std::vector<Vec<Scalar>>& next) {
      Scalar diff2 = 0, prev2 = 0;
      for (std::size_t i = 0; i < prev.size(); ++i) {
        diff2 += (next[i] - prev[i]).squaredNorm();
        prev2 += prev[i].squaredNorm();
      }
      return std::sqrt(diff2) / std::max(std::sqrt(prev2), Scalar(1));
    };
    auto finite = [](const std::vector<Vec<Scalar>>& s) {
      for (const auto& comp : s)
        if (!comp.allFinite()) return false;
      return true;
    };
    auto error_at = [&problem](const std::vector<Vec<Scalar>>& s) {
      return error_metric(problem, extract_candidate(s));
    };
    auto observe = [&observer](std::uint64_t k, const std::vector<Vec<Scalar>>& s) {
      if (observer) observer(k, extract_candidate(s));
    };
    report.termination = detail::run_iteration_loop<Scalar>(
        state, window, config.epsilon, config.max_iterations, config.trace_every, report.counters,
        report.error_trace, algo_seconds, step, change, finite, error_at, observe);
    report.final_point = extract_candidate(state);
  } else {
    std::vector<RSetsDROperator<Scalar>> blocks;
    SweepOperator<Scalar> sweep;
    std::optional<RandomProduct<Scalar>> random;
    std::function<Vec<Scalar>(const Vec<Scalar>&, ProjectionCounter&)> step;
    switch (config.method) {
      case Method::cyclic:
        // Iteration k applies S_{k+1}; the m distinct blocks repeat with
        // period m.
        blocks = cyclic_block_operators(problem, config.r);
        step = [&blocks](const Vec<Scalar>& x, ProjectionCounter& c) {
          return apply_dr(blocks[static_cast<std::size_t>(c.iterations % blocks.size())], x, c);
        };
        break;
      case Method::full_cycle:
        sweep = build_full_cycle(problem, config.r);
        step = [&sweep](const Vec<Scalar>& x, ProjectionCounter& c) {
          return apply_sweep(sweep, x, c);
        };
        break;
      case Method::short_cycle:
        sweep = build_short_cycle(problem, config.r);
        step = [&sweep](const Vec<Scalar>& x, ProjectionCounter& c) {
          return apply_sweep(sweep, x, c);
        };
        break;
      case Method::random_product:
        random.emplace(build_full_cycle(problem, config.r),
                       composed_projections_over_all(problem), config.rng_seed, config.coin_bias);
        step = [&random](const Vec<Scalar>& x, ProjectionCounter& c) {
          return random->step(x, c);
        };
        break;
      case Method::product_space:
        break;  // handled above
    }

    Vec<Scalar> x = x0;
    auto change = [](const Vec<Scalar>& prev, const Vec<Scalar>& next) {
      return relative_change(prev, next);
    };
    auto finite = [](const Vec<Scalar>& v) { return v.allFinite(); };
    auto error_at = [&problem](const Vec<Scalar>& v) { return error_metric(problem, v); };
    auto observe = [&observer](std::uint64_t k, const Vec<Scalar>& v) {
      if (observer) observer(k, v);
    };
    report.termination = detail::run_iteration_loop<Scalar>(
        x, window, config.epsilon, config.max_iterations, config.trace_every, report.counters,
        report.error_trace, algo_seconds, step, change, finite, error_at, observe);
    report.final_point = std::move(x);
  }

  report.wall_time_s = algo_seconds;
  return report;
}

}  // namespace cycdr
