#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace cpgc {

// Shifted-exponential computation-speed statistics: alpha is the minimum
// time per task, mu the average number of tasks completed per unit time.
struct StragglerParams {
  double mu = 10.0;
  double alpha = 0.01;
};

inline void check_params(const StragglerParams& p) {
  if (!(p.mu > 0.0)) throw std::invalid_argument("mu must be positive");
  if (!(p.alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
}

// Probability that a worker with capacity r has completed exactly s tasks
// by time t:
//
//   P_s(t) = 0                                        t < s*alpha
//   P_s(t) = 1 - e^{-mu(t/s - alpha)}                 s*alpha <= t < (s+1)*alpha
//   P_s(t) = e^{-mu(t/(s+1) - alpha)} - e^{-mu(t/s - alpha)}   t >= (s+1)*alpha
//
// with t/s = +inf when s = 0, and the upper term dropped when s = r (there
// is no (r+1)-th task to still be running). The middle/bottom split at
// t = (s+1)*alpha is half-open; both expressions agree there, so the choice
// only fixes which branch evaluates.
inline double p_exact(int s, double t, int r, const StragglerParams& p) {
  check_params(p);
  if (r < 1) throw std::invalid_argument("computation load must be at least 1");
  if (s < 0 || s > r) throw std::invalid_argument("task count outside [0, r]");
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");

  auto decay = [&](double x) { return std::exp(-p.mu * x); };
  const double lower = s == 0 ? 0.0 : decay(t / s - p.alpha);

  if (s == r) {
    if (t < r * p.alpha) return 0.0;
    return 1.0 - lower;
  }
  if (t < s * p.alpha) return 0.0;
  if (t < (s + 1) * p.alpha) return 1.0 - lower;
  return decay(t / (s + 1) - p.alpha) - lower;
}

// Portable uniform in [0, 1): top 53 bits of the engine output.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double sample_exponential(double mu, std::mt19937_64& rng) {
  return -std::log1p(-uniform01(rng)) / mu;
}

// Task completion times for one worker and one iteration. A single speed
// draw X ~ Exp(mu) is shared by the worker's whole column, giving
// t_s = s(alpha + X); the exact-count marginals of this process are
// precisely P_s(t) above.
inline std::vector<double> sample_completion_times(int r, const StragglerParams& p,
                                                   std::mt19937_64& rng) {
  check_params(p);
  if (r < 1) throw std::invalid_argument("computation load must be at least 1");
  const double x = p.alpha + sample_exponential(p.mu, rng);
  std::vector<double> times(r);
  for (int s = 1; s <= r; ++s) times[s - 1] = s * x;
  return times;
}

// splitmix64 finalizer; used to spread seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Independent, reproducible stream per (master seed, trial index): results
// do not depend on how trials are spread over threads.
inline std::mt19937_64 make_trial_rng(std::uint64_t master_seed, std::uint64_t trial) {
  return std::mt19937_64(mix64(mix64(master_seed) ^ mix64(trial + 0x51AB61DULL)));
}

}  // namespace cpgc
