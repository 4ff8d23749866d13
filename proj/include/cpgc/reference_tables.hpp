#pragma once

#include <array>
#include <string>
#include <vector>

namespace cpgc {

// Known recoverability counts for the 4-worker, 4-block, load-2 example:
// per cumulative type (N2, N1, N0), the number of score vectors that allow
// recovering at least `threshold` distinct blocks under each scheme.
struct ReferenceTypeRow {
  std::string label;
  int n2, n1, n0;
  long long mcc, uc_mmc, cpgc;
};

// Full-gradient table (threshold 4). The published label for row N9 reads
// (N2=0, N1=4, N0=1), which sums to five workers; the type that actually
// carries the count is (N2=0, N1=4, N0=0).
inline const std::vector<ReferenceTypeRow>& reference_table_full() {
  static const std::vector<ReferenceTypeRow> rows = {
      {"N1", 4, 0, 0, 1, 1, 1},
      {"N2", 3, 1, 0, 4, 4, 4},
      {"N3", 3, 0, 1, 4, 4, 4},
      {"N4", 2, 2, 0, 6, 6, 6},
      {"N5", 2, 1, 1, 12, 8, 12},
      {"N6", 2, 0, 2, 6, 2, 6},
      {"N7", 1, 3, 0, 0, 4, 4},
      {"N8", 1, 2, 1, 0, 4, 8},
      {"N9", 0, 4, 0, 0, 1, 1},
  };
  return rows;
}

// Partial-gradient table (threshold 3).
inline const std::vector<ReferenceTypeRow>& reference_table_partial() {
  static const std::vector<ReferenceTypeRow> rows = {
      {"N1", 4, 0, 0, 1, 1, 1},
      {"N2", 3, 1, 0, 4, 4, 4},
      {"N3", 3, 0, 1, 4, 4, 4},
      {"N4", 2, 2, 0, 6, 6, 6},
      {"N5", 2, 1, 1, 12, 12, 12},
      {"N6", 2, 0, 2, 6, 6, 6},
      {"N7", 1, 3, 0, 0, 4, 4},
      {"N8", 1, 2, 1, 0, 12, 12},
      {"N9", 1, 1, 2, 0, 8, 8},
      {"N10", 0, 4, 0, 0, 1, 1},
      {"N11", 0, 3, 1, 0, 4, 4},
  };
  return rows;
}

// Coefficients of the analytic Pr(T < t) sum for CPGC full recovery, in
// table row order N1..N9.
inline const std::array<long long, 9>& reference_cdf_coefficients() {
  static const std::array<long long, 9> coeffs = {1, 4, 4, 6, 12, 6, 4, 8, 1};
  return coeffs;
}

}  // namespace cpgc
