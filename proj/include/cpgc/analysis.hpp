#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpgc/decoder.hpp"
#include "cpgc/schedule.hpp"
#include "cpgc/straggler.hpp"

namespace cpgc {

// Histogram of a score vector: counts[s] workers completed exactly s tasks.
struct CumulativeType {
  std::vector<int> counts;

  int workers() const {
    int k = 0;
    for (int c : counts) k += c;
    return k;
  }
  friend bool operator==(const CumulativeType&, const CumulativeType&) = default;
};

inline CumulativeType type_of(const ScoreVector& C, int load) {
  CumulativeType N;
  N.counts.assign(load + 1, 0);
  for (int c : C.counts) {
    if (c < 0 || c > load) throw std::invalid_argument("score entry outside [0, load]");
    ++N.counts[c];
  }
  return N;
}

// Number of score vectors per cumulative type that meet a recovery
// threshold, for one schedule and delivery mode.
struct TypeCountTable {
  int workers = 0;
  int load = 0;
  int threshold = 0;  // required distinct recoverable blocks
  std::map<std::vector<int>, long long> counts;

  long long at(const CumulativeType& N) const {
    auto it = counts.find(N.counts);
    return it == counts.end() ? 0 : it->second;
  }
};

class enumeration_budget_error : public std::runtime_error {
 public:
  explicit enumeration_budget_error(const std::string& what) : std::runtime_error(what) {}
};

// Walks every score vector in {0..r}^K, decodes it, and tallies the ones
// recovering at least `threshold` distinct blocks by type. Exact but
// exponential; refuses beyond `budget` vectors (use the Monte Carlo engine
// for large K instead).
inline TypeCountTable count_recoverable_by_type(const ScheduleMatrix& S, Delivery mode,
                                                int threshold,
                                                long long budget = 100'000'000LL) {
  const int K = S.cols();
  const int r = S.rows();
  if (threshold < 0 || threshold > S.num_blocks())
    throw std::invalid_argument("threshold outside [0, num_blocks]");
  const double vectors = std::pow(static_cast<double>(r + 1), K);
  if (vectors > static_cast<double>(budget)) {
    char amount[32];
    std::snprintf(amount, sizeof(amount), "%.3g", vectors);
    throw enumeration_budget_error(
        "score-vector enumeration needs " + std::string(amount) +
        " decodes, over the budget of " + std::to_string(budget) +
        "; use the Monte Carlo simulator for this configuration");
  }

  TypeCountTable table;
  table.workers = K;
  table.load = r;
  table.threshold = threshold;

  ScoreVector C;
  C.counts.assign(K, 0);
  while (true) {
    const auto received = received_codewords(S, C, mode);
    const auto report = recoverable_blocks(received, S.num_blocks(), S.num_virtual());
    if (static_cast<int>(report.recoverable.size()) >= threshold)
      ++table.counts[type_of(C, r).counts];

    int pos = K - 1;
    while (pos >= 0 && C.counts[pos] == r) C.counts[pos--] = 0;
    if (pos < 0) break;
    ++C.counts[pos];
  }
  return table;
}

// Pr(N(t)) = prod_s P_s(t)^{N_s}: the probability of any one score vector
// of this type (the multiplicity lives in the count table).
inline double type_probability(const CumulativeType& N, double t, const StragglerParams& p,
                               int load) {
  if (static_cast<int>(N.counts.size()) != load + 1)
    throw std::invalid_argument("type histogram must have load+1 entries");
  double prob = 1.0;
  for (int s = 0; s <= load; ++s) {
    if (N.counts[s] < 0) throw std::invalid_argument("negative type count");
    if (N.counts[s] > 0) prob *= std::pow(p_exact(s, t, load, p), N.counts[s]);
  }
  return prob;
}

// Pr(T <= t): chance that the received results at time t meet the table's
// recovery threshold.
inline double completion_cdf(const TypeCountTable& table, double t, const StragglerParams& p) {
  double cdf = 0.0;
  for (const auto& [type, count] : table.counts)
    cdf += static_cast<double>(count) * type_probability({type}, t, p, table.load);
  return cdf;
}

inline double completion_cdf(const ScheduleMatrix& S, Delivery mode, int threshold, double t,
                             const StragglerParams& p) {
  return completion_cdf(count_recoverable_by_type(S, mode, threshold), t, p);
}

namespace detail {

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(F&& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace detail

// E[T] = integral of the survival function 1 - Pr(T <= t). Integrates up to
// the point where the survival mass drops below tail_eps, with adaptive
// Simpson quadrature at absolute tolerance abs_tol.
inline double expected_completion_time(const TypeCountTable& table, const StragglerParams& p,
                                       double abs_tol = 1e-6, double tail_eps = 1e-9) {
  auto survival = [&](double t) { return 1.0 - completion_cdf(table, t, p); };
  double hi = table.load * p.alpha + 1.0 / p.mu;
  int doublings = 0;
  while (survival(hi) >= tail_eps) {
    hi *= 2.0;
    if (++doublings > 120)
      throw std::runtime_error("survival function does not vanish; threshold unreachable?");
  }
  if (survival(0.0) <= 0.0) return 0.0;  // zero threshold: done at t = 0
  return detail::integrate(survival, 0.0, hi, abs_tol);
}

inline double expected_completion_time(const ScheduleMatrix& S, Delivery mode, int threshold,
                                       const StragglerParams& p, double abs_tol = 1e-6,
                                       double tail_eps = 1e-9) {
  return expected_completion_time(count_recoverable_by_type(S, mode, threshold), p, abs_tol,
                                  tail_eps);
}

// CSV export: one row per type, "type_N0,...,type_Nr,count".
inline std::string to_csv(const TypeCountTable& table) {
  std::ostringstream os;
  for (int s = 0; s <= table.load; ++s) os << "type_N" << s << ",";
  os << "count\n";
  for (const auto& [type, count] : table.counts) {
    for (int v : type) os << v << ",";
    os << count << "\n";
  }
  return os.str();
}

}  // namespace cpgc
