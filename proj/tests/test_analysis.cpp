#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "cpgc/analysis.hpp"
#include "cpgc/reference_tables.hpp"
#include "cpgc/schedule.hpp"

using namespace cpgc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<int> type_key(int n2, int n1, int n0) { return {n0, n1, n2}; }

struct FourWorkerSchedules {
  ScheduleMatrix mcc = build_mcc(4, 4, 2, MdsPoints::pow2);
  ScheduleMatrix uc = build_uc_mmc(4, 4, 2);
  ScheduleMatrix cp = build_cpgc(4, 4, 2);
};

long long factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

long long multinomial(const std::vector<int>& counts) {
  int total = 0;
  long long denom = 1;
  for (int c : counts) {
    total += c;
    denom *= factorial(c);
  }
  return factorial(total) / denom;
}

}  // namespace

TEST_CASE("count tables reproduce the reference four-worker tables") {
  const FourWorkerSchedules s;
  const auto check_table = [&](int threshold, const std::vector<ReferenceTypeRow>& expected) {
    const auto mcc = count_recoverable_by_type(s.mcc, Delivery::bundled, threshold);
    const auto uc = count_recoverable_by_type(s.uc, Delivery::multi_message, threshold);
    const auto cp = count_recoverable_by_type(s.cp, Delivery::multi_message, threshold);
    std::map<std::vector<int>, bool> covered;
    for (const auto& row : expected) {
      const auto key = type_key(row.n2, row.n1, row.n0);
      covered[key] = true;
      INFO("row " << row.label << " threshold " << threshold);
      CHECK(mcc.at({key}) == row.mcc);
      CHECK(uc.at({key}) == row.uc_mmc);
      CHECK(cp.at({key}) == row.cpgc);
    }
    // Types absent from the published tables admit no recovering vector.
    for (const auto* table : {&mcc, &uc, &cp})
      for (const auto& [key, count] : table->counts)
        if (!covered.count(key)) {
          INFO("unexpected type with nonzero count at threshold " << threshold);
          CHECK(count == 0);
        }
  };
  check_table(4, reference_table_full());
  check_table(3, reference_table_partial());
}

TEST_CASE("cpgc full-recovery cdf coefficients") {
  const auto S = build_cpgc(4, 4, 2);
  const auto table = count_recoverable_by_type(S, Delivery::multi_message, 4);
  std::vector<long long> coeffs;
  for (const auto& row : reference_table_full())
    coeffs.push_back(table.at({type_key(row.n2, row.n1, row.n0)}));
  const auto& expected = reference_cdf_coefficients();
  REQUIRE(coeffs.size() == expected.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) CHECK(coeffs[i] == expected[i]);
}

TEST_CASE("threshold monotonicity of count tables") {
  const FourWorkerSchedules s;
  for (const auto* S : {&s.mcc, &s.uc, &s.cp}) {
    const auto mode = default_delivery(S->scheme());
    const auto full = count_recoverable_by_type(*S, mode, 4);
    const auto partial = count_recoverable_by_type(*S, mode, 3);
    for (const auto& [key, count] : full.counts) CHECK(count <= partial.at({key}));
  }
}

TEST_CASE("type probability basics") {
  const StragglerParams p{10.0, 0.01};

  CumulativeType all_idle{{4, 0, 0}};
  CHECK(type_probability(all_idle, 0.0, p, 2) == 1.0);

  CumulativeType all_done{{0, 0, 4}};
  const double p2 = p_exact(2, 0.1, 2, p);
  CHECK_THAT(type_probability(all_done, 0.1, p, 2), WithinRel(std::pow(p2, 4), 1e-12));

  // Mixed type (N2=2, N1=1, N0=1): per-vector probability P2^2 * P1 * P0,
  // written out from the closed form as an independent oracle.
  CumulativeType mixed{{1, 1, 2}};
  const double expected = std::pow(1.0 - std::exp(-0.4), 2) *
                          (std::exp(-0.4) - std::exp(-0.9)) * std::exp(-0.9);
  CHECK_THAT(type_probability(mixed, 0.1, p, 2), WithinRel(expected, 1e-12));

  CHECK_THROWS_AS(type_probability(CumulativeType{{1, 1}}, 0.1, p, 2), std::invalid_argument);
}

TEST_CASE("all-types table gives the law of total probability") {
  const FourWorkerSchedules s;
  const StragglerParams p{10.0, 0.01};
  // At threshold 0 every score vector passes, so each type's count must be
  // its full multinomial multiplicity and the cdf must be identically 1.
  const auto table = count_recoverable_by_type(s.cp, Delivery::multi_message, 0);
  long long total = 0;
  for (const auto& [key, count] : table.counts) {
    CHECK(count == multinomial(key));
    total += count;
  }
  CHECK(total == 81);
  for (double t : {0.0, 0.005, 0.02, 0.11, 0.5, 2.0})
    CHECK_THAT(completion_cdf(table, t, p), WithinAbs(1.0, 1e-10));
}

TEST_CASE("completion cdf behaves like a cdf and is dominated by cpgc") {
  const FourWorkerSchedules s;
  const StragglerParams p{10.0, 0.01};
  const auto mcc = count_recoverable_by_type(s.mcc, Delivery::bundled, 4);
  const auto uc = count_recoverable_by_type(s.uc, Delivery::multi_message, 4);
  const auto cp = count_recoverable_by_type(s.cp, Delivery::multi_message, 4);

  double prev = -1.0;
  for (int i = 0; i < 50; ++i) {
    const double t = 0.6 * i / 49.0;
    const double fm = completion_cdf(mcc, t, p);
    const double fu = completion_cdf(uc, t, p);
    const double fc = completion_cdf(cp, t, p);
    for (double v : {fm, fu, fc}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(fc >= fm);
    CHECK(fc >= fu);
    CHECK(fc >= prev);  // nondecreasing in t
    prev = fc;
  }
  // Below the minimum task time nothing can be complete.
  CHECK(completion_cdf(cp, 0.0099, p) == 0.0);
  // Eventually certain.
  CHECK_THAT(completion_cdf(cp, 5.0, p), WithinAbs(1.0, 1e-12));

  // Smaller thresholds dominate pointwise.
  const auto cp3 = count_recoverable_by_type(s.cp, Delivery::multi_message, 3);
  for (int i = 0; i < 50; ++i) {
    const double t = 0.6 * i / 49.0;
    CHECK(completion_cdf(cp3, t, p) >= completion_cdf(cp, t, p));
  }
}

TEST_CASE("partial-gradient cdfs of uc-mmc and cpgc coincide") {
  const FourWorkerSchedules s;
  const StragglerParams p{10.0, 0.01};
  const auto uc = count_recoverable_by_type(s.uc, Delivery::multi_message, 3);
  const auto cp = count_recoverable_by_type(s.cp, Delivery::multi_message, 3);
  for (int i = 0; i < 50; ++i) {
    const double t = 0.6 * i / 49.0;
    CHECK_THAT(completion_cdf(cp, t, p), WithinAbs(completion_cdf(uc, t, p), 1e-12));
  }
}

TEST_CASE("expected completion time ordering and equality") {
  const FourWorkerSchedules s;
  const StragglerParams p{10.0, 0.01};
  const double e_mcc = expected_completion_time(s.mcc, Delivery::bundled, 4, p);
  const double e_uc = expected_completion_time(s.uc, Delivery::multi_message, 4, p);
  const double e_cp = expected_completion_time(s.cp, Delivery::multi_message, 4, p);
  CHECK(e_cp <= e_uc);
  CHECK(e_cp <= e_mcc);
  CHECK(e_cp > 0.0);

  const double e_cp3 = expected_completion_time(s.cp, Delivery::multi_message, 3, p);
  const double e_uc3 = expected_completion_time(s.uc, Delivery::multi_message, 3, p);
  CHECK_THAT(e_cp3, WithinAbs(e_uc3, 2e-6));
  CHECK(e_cp3 < e_cp);

  // Zero threshold completes instantly.
  CHECK(expected_completion_time(s.cp, Delivery::multi_message, 0, p) == 0.0);
}

TEST_CASE("quadrature agrees with a brute-force riemann sum") {
  const auto S = build_cpgc(4, 4, 2);
  const StragglerParams p{10.0, 0.01};
  const auto table = count_recoverable_by_type(S, Delivery::multi_message, 4);
  const double adaptive = expected_completion_time(table, p);
  // Midpoint rule oracle on a fine fixed grid.
  const double dt = 1e-4;
  double brute = 0.0;
  for (double t = 0.0; t < 3.0; t += dt)
    brute += (1.0 - completion_cdf(table, t + 0.5 * dt, p)) * dt;
  CHECK_THAT(adaptive, WithinAbs(brute, 1e-4));
}

TEST_CASE("enumeration refuses oversized configurations") {
  const auto big = build_cpgc(20, 20, 3);
  CHECK_THROWS_AS(count_recoverable_by_type(big, Delivery::multi_message, 20),
                  enumeration_budget_error);
  CHECK_THROWS_WITH(count_recoverable_by_type(big, Delivery::multi_message, 20),
                    Catch::Matchers::ContainsSubstring("Monte Carlo"));
  CHECK_THROWS_AS(count_recoverable_by_type(big, Delivery::multi_message, 25),
                  std::invalid_argument);
}

TEST_CASE("count table csv export") {
  const auto S = build_cpgc(4, 4, 2);
  const auto table = count_recoverable_by_type(S, Delivery::multi_message, 4);
  const std::string csv = to_csv(table);
  CHECK(csv.rfind("type_N0,type_N1,type_N2,count\n", 0) == 0);
  CHECK(csv.find("0,0,4,1\n") != std::string::npos);   // all four workers done
  CHECK(csv.find("1,2,1,8\n") != std::string::npos);   // the (N2=1,N1=2,N0=1) row
}
