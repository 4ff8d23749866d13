#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "cpgc/decoder.hpp"
#include "cpgc/schedule.hpp"
#include "cpgc/straggler.hpp"

namespace cpgc {

struct SimConfig {
  Scheme scheme = Scheme::cpgc;
  int num_blocks = 20;
  int num_workers = 20;
  int load = 3;
  StragglerParams params;
  double tolerance_rate = 0.0;
  long long trials = 10000;
  std::uint64_t master_seed = 1;
  Delivery mode = Delivery::multi_message;
  MdsPoints points = MdsPoints::linear;
  int threads = 0;  // 0 = hardware concurrency

  static SimConfig for_scheme(Scheme s, const SimConfig& base) {
    SimConfig c = base;
    c.scheme = s;
    c.mode = default_delivery(s);
    return c;
  }

  // Required distinct recoverable blocks per iteration. MCC cannot use
  // partial recoveries, so it always waits for the full gradient.
  int required_blocks() const {
    if (scheme == Scheme::mcc) return num_blocks;
    if (tolerance_rate < 0.0 || tolerance_rate > 1.0)
      throw std::invalid_argument("tolerance rate outside [0, 1]");
    const int m = static_cast<int>(
        std::ceil((1.0 - tolerance_rate) * num_blocks - 1e-9));
    return std::clamp(m, 0, num_blocks);
  }

  ScheduleMatrix build() const { return build_schedule(scheme, num_blocks, num_workers, load, points); }
};

struct IterationOutcome {
  double completion_time = 0.0;
  long long messages = 0;      // communication load
  double volume = 0.0;         // normalized to one full W*theta
  int recovered = 0;           // distinct blocks decodable at termination
};

namespace detail {

struct Arrival {
  double time;
  int worker;
  int task;  // first task of the bundle under bundled delivery

  bool operator<(const Arrival& o) const {
    // Ties are measure-zero under the continuous model; break them by
    // worker then task index so processing order is well defined.
    if (time != o.time) return time < o.time;
    if (worker != o.worker) return worker < o.worker;
    return task < o.task;
  }
};

}  // namespace detail

// Plays out one iteration: samples worker speeds, replays result arrivals
// in time order through an incremental decoder, and stops at the first
// arrival meeting the recovery threshold. Messages in flight after that
// instant are not counted.
inline IterationOutcome simulate_iteration(const ScheduleMatrix& S, Delivery mode,
                                           int required_blocks, const StragglerParams& params,
                                           std::mt19937_64& rng) {
  const int K = S.cols();
  const int r = S.rows();
  const int M = S.num_blocks();
  if (required_blocks < 0 || required_blocks > M)
    throw std::invalid_argument("required block count outside [0, num_blocks]");

  // Worker speed draws happen unconditionally and in worker order, so a
  // fixed rng stream yields paired samples across schemes and thresholds.
  std::vector<std::vector<double>> times(K);
  for (int j = 0; j < K; ++j) times[j] = sample_completion_times(r, params, rng);

  if (required_blocks == 0) return {};

  std::vector<detail::Arrival> arrivals;
  if (mode == Delivery::multi_message) {
    arrivals.reserve(static_cast<std::size_t>(K) * r);
    for (int j = 0; j < K; ++j)
      for (int i = 0; i < r; ++i) arrivals.push_back({times[j][i], j, i});
  } else {
    arrivals.reserve(K);
    for (int j = 0; j < K; ++j) arrivals.push_back({times[j][r - 1], j, 0});
  }
  std::sort(arrivals.begin(), arrivals.end());

  IncrementalDecoder dec(M, S.num_virtual());
  const int tasks_per_message = mode == Delivery::multi_message ? 1 : r;
  long long messages = 0;
  for (const detail::Arrival& a : arrivals) {
    for (int i = 0; i < tasks_per_message; ++i)
      dec.add(S.cell(mode == Delivery::multi_message ? a.task : i, a.worker));
    ++messages;
    if (dec.recovered_count() >= required_blocks) {
      IterationOutcome out;
      out.completion_time = a.time;
      out.messages = messages;
      out.volume = static_cast<double>(messages * tasks_per_message) / M;
      out.recovered = dec.recovered_count();
      return out;
    }
  }
  throw std::runtime_error("recovery threshold unreachable even with every result");
}

struct Aggregate {
  double mean_time = 0.0, ci_time = 0.0;
  double mean_messages = 0.0, ci_messages = 0.0;
  double mean_volume = 0.0, ci_volume = 0.0;
  long long trials = 0;
};

namespace detail {

// Kahan-compensated sum; keeps million-trial reductions at O(1) ulp.
inline double compensated_sum(const std::vector<double>& xs, double (*f)(double, double),
                              double arg) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double y = f(x, arg) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

inline void mean_ci(const std::vector<double>& xs, double& mean, double& ci) {
  const std::size_t n = xs.size();
  mean = compensated_sum(xs, [](double x, double) { return x; }, 0.0) / static_cast<double>(n);
  if (n < 2) {
    ci = 0.0;
    return;
  }
  const double ss = compensated_sum(
      xs, [](double x, double m) { return (x - m) * (x - m); }, mean);
  const double var = ss / static_cast<double>(n - 1);
  ci = 1.96 * std::sqrt(var / static_cast<double>(n));
}

template <typename Fn>
void parallel_trials(long long trials, int threads, Fn&& body) {
  int nt = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (nt < 1) nt = 1;
  nt = static_cast<int>(std::min<long long>(nt, trials));
  if (nt <= 1) {
    for (long long t = 0; t < trials; ++t) body(t);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int w = 0; w < nt; ++w)
    pool.emplace_back([&, w] {
      for (long long t = w; t < trials; t += nt) body(t);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Runs config.trials independent iterations. Each trial owns the rng stream
// derived from (master_seed, trial), so aggregates are bit-identical for any
// thread count; the reduction always runs in trial order.
inline Aggregate run_experiment(const SimConfig& config,
                                std::vector<IterationOutcome>* trace = nullptr) {
  if (config.trials < 1) throw std::invalid_argument("need at least one trial");
  const ScheduleMatrix S = config.build();
  const int required = config.required_blocks();

  std::vector<IterationOutcome> outcomes(static_cast<std::size_t>(config.trials));
  detail::parallel_trials(config.trials, config.threads, [&](long long t) {
    auto rng = make_trial_rng(config.master_seed, static_cast<std::uint64_t>(t));
    outcomes[static_cast<std::size_t>(t)] =
        simulate_iteration(S, config.mode, required, config.params, rng);
  });

  std::vector<double> ts(outcomes.size()), ms(outcomes.size()), vs(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    ts[i] = outcomes[i].completion_time;
    ms[i] = static_cast<double>(outcomes[i].messages);
    vs[i] = outcomes[i].volume;
  }
  Aggregate agg;
  agg.trials = config.trials;
  detail::mean_ci(ts, agg.mean_time, agg.ci_time);
  detail::mean_ci(ms, agg.mean_messages, agg.ci_messages);
  detail::mean_ci(vs, agg.mean_volume, agg.ci_volume);
  if (trace) *trace = std::move(outcomes);
  return agg;
}

struct SweepRow {
  Scheme scheme;
  double tolerance;
  Aggregate aggregate;
};

// One experiment per (scheme, tolerance) grid point, all from the same
// master seed so comparisons are paired.
inline std::vector<SweepRow> sweep_tolerance(const SimConfig& base,
                                             const std::vector<Scheme>& schemes,
                                             const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("tolerance grid must be nonempty");
  std::vector<SweepRow> rows;
  for (Scheme s : schemes) {
    SimConfig c = SimConfig::for_scheme(s, base);
    for (double tol : grid) {
      c.tolerance_rate = tol;
      rows.push_back({s, tol, run_experiment(c)});
    }
  }
  return rows;
}

}  // namespace cpgc
