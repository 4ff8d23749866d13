#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpgc/codeword.hpp"

namespace cpgc {

enum class Scheme { mcc, uc_mmc, cpgc };

// How workers ship results to the master: one message per completed task,
// or a single message once the whole column is done.
enum class Delivery { multi_message, bundled };

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::mcc: return "mcc";
    case Scheme::uc_mmc: return "uc-mmc";
    case Scheme::cpgc: return "cpgc";
  }
  throw std::logic_error("bad scheme tag");
}

inline Scheme scheme_from_string(const std::string& name) {
  if (name == "mcc") return Scheme::mcc;
  if (name == "uc-mmc" || name == "ucmmc" || name == "uc_mmc") return Scheme::uc_mmc;
  if (name == "cpgc") return Scheme::cpgc;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected mcc, uc-mmc or cpgc)");
}

inline Delivery default_delivery(Scheme s) {
  return s == Scheme::mcc ? Delivery::bundled : Delivery::multi_message;
}

// Disjoint pairing of block indices; the unit of coded-data generation.
struct Partition {
  std::vector<std::pair<int, int>> pairs;

  friend bool operator==(const Partition&, const Partition&) = default;
};

// Provenance of one partition placed into a row: which columns hold its
// codewords. Lets the validator check pair disjointness per source partition.
struct PartitionSegment {
  int row = 0;
  std::vector<int> cols;
};

// r x K grid of computation tasks. cell(i, j) is the i-th task executed by
// worker j. padded_blocks >= num_blocks when virtual zero blocks were added
// for encoding; the virtual indices live in [num_blocks, padded_blocks).
class ScheduleMatrix {
 public:
  ScheduleMatrix(Scheme scheme, int rows, int cols, int num_blocks, int padded_blocks)
      : scheme_(scheme),
        rows_(rows),
        cols_(cols),
        num_blocks_(num_blocks),
        padded_blocks_(padded_blocks),
        cells_(static_cast<std::size_t>(rows) * cols) {
    if (rows < 1 || cols < 1 || num_blocks < 1 || padded_blocks < num_blocks)
      throw std::invalid_argument("invalid schedule dimensions");
  }

  Scheme scheme() const { return scheme_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int num_blocks() const { return num_blocks_; }
  int padded_blocks() const { return padded_blocks_; }
  int num_virtual() const { return padded_blocks_ - num_blocks_; }

  Codeword& cell(int row, int col) { return cells_[index(row, col)]; }
  const Codeword& cell(int row, int col) const { return cells_[index(row, col)]; }

  std::vector<PartitionSegment> segments;  // optional provenance, builder-filled

 private:
  std::size_t index(int row, int col) const {
    if (row < 0 || row >= rows_ || col < 0 || col >= cols_)
      throw std::out_of_range("schedule cell index out of range");
    return static_cast<std::size_t>(row) * cols_ + col;
  }

  Scheme scheme_;
  int rows_, cols_, num_blocks_, padded_blocks_;
  std::vector<Codeword> cells_;
};

// Right rotation by d positions (negative d rotates left); length preserved.
template <typename T>
std::vector<T> circshift(std::vector<T> v, long long d) {
  const long long n = static_cast<long long>(v.size());
  if (n == 0) return v;
  long long k = ((d % n) + n) % n;  // normalized right shift
  std::rotate(v.begin(), v.end() - k, v.end());
  return v;
}

// ---------------------------------------------------------------------------
// UC-MMC: uncoded blocks with a cyclically shifted schedule.

inline ScheduleMatrix build_uc_mmc(int num_blocks, int num_workers, int load) {
  if (num_blocks < 1 || num_workers < 1)
    throw std::invalid_argument("uc-mmc: block and worker counts must be positive");
  if (load < 1 || load > num_blocks)
    throw std::invalid_argument("uc-mmc: load must be in [1, num_blocks]");
  ScheduleMatrix S(Scheme::uc_mmc, load, num_workers, num_blocks, num_blocks);
  for (int i = 0; i < load; ++i)
    for (int j = 0; j < num_workers; ++j)
      S.cell(i, j) = single_block((j + i) % num_blocks);
  return S;
}

// ---------------------------------------------------------------------------
// MCC: MDS-coded tasks, bundled delivery. Blocks are zero-padded to
// r*ceil(M/r) and split into r groups of g = ceil(M/r); row i holds one
// Vandermonde-coded combination of group i per worker, so any g complete
// workers determine every block.

enum class MdsPoints { linear, pow2 };

inline ScheduleMatrix build_mcc(int num_blocks, int num_workers, int load,
                                MdsPoints points = MdsPoints::linear) {
  if (num_blocks < 1 || num_workers < 1 || load < 1)
    throw std::invalid_argument("mcc: dimensions must be positive");
  const int group = (num_blocks + load - 1) / load;  // g = ceil(M/r)
  if (num_workers < group)
    throw std::invalid_argument("mcc: infeasible, needs at least ceil(M/r) workers for full recovery");
  const int padded = load * group;
  ScheduleMatrix S(Scheme::mcc, load, num_workers, num_blocks, padded);
  if (points == MdsPoints::pow2 && num_workers > 62)
    throw std::invalid_argument("mcc: pow2 evaluation points overflow beyond 62 workers");
  for (int k = 0; k < num_workers; ++k) {
    const long long x = points == MdsPoints::linear ? k + 1 : (1LL << k);
    for (int i = 0; i < load; ++i) {
      std::vector<Term> terms;
      long long xj = 1;
      for (int j = 0; j < group; ++j) {
        terms.push_back({i + j * load, xj});
        if (j + 1 < group) {
          if (xj > (1LL << 62) / (x > 0 ? x : 1))
            throw std::invalid_argument("mcc: evaluation point powers overflow");
          xj *= x;
        }
      }
      S.cell(i, k) = make_codeword(std::move(terms));
    }
  }
  return S;
}

// ---------------------------------------------------------------------------
// CPGC partitions: the four pairing families used for rows 2 and 3, plus
// stride-s pairings for deeper rows. All require an even block count.

inline Partition partition_adjacent(int n) {
  Partition p;
  for (int m = 0; m + 1 < n; m += 2) p.pairs.push_back({m, m + 1});
  return p;
}

// Stride-2 pairs in blocks of four: (0,2),(1,3),(4,6),(5,7),...; a trailing
// pair of leftovers keeps it a partition when n % 4 == 2.
inline Partition partition_stride2(int n) {
  Partition p;
  int q = 0;
  for (; q + 3 < n; q += 4) {
    p.pairs.push_back({q, q + 2});
    p.pairs.push_back({q + 1, q + 3});
  }
  if (q + 1 < n) p.pairs.push_back({q, q + 1});
  return p;
}

inline Partition partition_mirror(int n) {
  Partition p;
  for (int m = 0; m < n / 2; ++m) p.pairs.push_back({m, n - 1 - m});
  return p;
}

inline Partition partition_offset(int n) {
  Partition p;
  for (int m = 0; m < n / 2; ++m) p.pairs.push_back({m, n / 2 + m});
  return p;
}

// Stride-s pairing within tiles of 2s elements, adjacent pairs on the tail.
inline Partition partition_stride(int n, int stride) {
  Partition p;
  int q = 0;
  for (; q + 2 * stride <= n; q += 2 * stride)
    for (int j = 0; j < stride; ++j) p.pairs.push_back({q + j, q + j + stride});
  for (; q + 1 < n; q += 2) p.pairs.push_back({q, q + 1});
  return p;
}

inline bool is_valid_partition(const Partition& p, int n) {
  if (n % 2 != 0 || static_cast<int>(p.pairs.size()) != n / 2) return false;
  std::vector<char> seen(n, 0);
  for (auto [a, b] : p.pairs) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) return false;
    if (seen[a] || seen[b]) return false;
    seen[a] = seen[b] = 1;
  }
  return true;
}

namespace detail {

inline Partition normalized(Partition p) {
  for (auto& pr : p.pairs)
    if (pr.first > pr.second) std::swap(pr.first, pr.second);
  std::sort(p.pairs.begin(), p.pairs.end());
  return p;
}

// Distinct pairings for CPGC rows >= 2, two per row, in the fixed family
// order adjacent, stride-2, mirror, offset, stride-3, stride-4, ...
inline std::vector<Partition> cpgc_partitions(int n, int count) {
  std::vector<Partition> out;
  std::set<std::vector<std::pair<int, int>>> seen;
  auto push = [&](Partition p) {
    if (!is_valid_partition(p, n)) return;
    auto key = normalized(p).pairs;
    if (seen.insert(key).second) out.push_back(std::move(p));
  };
  push(partition_adjacent(n));
  push(partition_stride2(n));
  push(partition_mirror(n));
  push(partition_offset(n));
  for (int s = 3; static_cast<int>(out.size()) < count && s < n; ++s)
    push(partition_stride(n, s));
  if (static_cast<int>(out.size()) < count)
    throw std::invalid_argument("cpgc: not enough distinct pair partitions for this load");
  out.resize(count);
  return out;
}

inline Codeword pair_codeword(std::pair<int, int> pr) {
  return block_pair(pr.first, pr.second);
}

// Number of (row, column) slots whose block sets would collide with an
// already-filled column if `pairs` were placed at columns [col0, col0+len).
inline int column_collisions(const ScheduleMatrix& S, int row,
                             const std::vector<std::pair<int, int>>& pairs, int col0) {
  int bad = 0;
  for (std::size_t m = 0; m < pairs.size(); ++m) {
    const int col = col0 + static_cast<int>(m);
    for (int i = 0; i < row; ++i) {
      const Codeword& other = S.cell(i, col);
      if (other.contains(pairs[m].first) || other.contains(pairs[m].second)) {
        ++bad;
        break;
      }
    }
  }
  return bad;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CPGC: row 1 is the identity (uncoded) assignment; each further row places
// two disjoint pair partitions on the half-columns, circularly shifted so
// that a block rarely repeats within a column. Rows 2-3 use the fixed shifts
// (-1, -1) and (+1, -2); deeper rows search for the least-colliding shift.

inline ScheduleMatrix build_cpgc(int num_blocks, int num_workers, int load) {
  const int n = num_blocks;
  if (n != num_workers)
    throw std::invalid_argument("cpgc: requires num_blocks == num_workers");
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("cpgc: requires an even block count >= 2");
  if (load < 2)
    throw std::invalid_argument("cpgc: load must be at least 2 (uncoded row plus coded rows)");

  ScheduleMatrix S(Scheme::cpgc, load, n, n, n);
  for (int j = 0; j < n; ++j) S.cell(0, j) = single_block(j);

  if (n == 2) {
    // Only one pair partition of two elements exists, so only the
    // two-row schedule is constructible (and it is redundant already).
    if (load != 2)
      throw std::invalid_argument("cpgc: two blocks admit a single pair partition (load 2 only)");
    S.cell(1, 0) = block_pair(0, 1);
    S.cell(1, 1) = block_pair(0, 1);
    S.segments.push_back({1, {0}});
    S.segments.push_back({1, {1}});
    return S;
  }

  if (n == 4 && load == 2) {
    // The reference 4-worker matrix interleaves its two partitions across
    // columns instead of splitting them by halves.
    S.cell(1, 0) = block_pair(2, 3);
    S.cell(1, 1) = block_pair(0, 2);
    S.cell(1, 2) = block_pair(1, 3);
    S.cell(1, 3) = block_pair(0, 1);
    S.segments.push_back({1, {0, 3}});
    S.segments.push_back({1, {1, 2}});
    return S;
  }

  const auto partitions = detail::cpgc_partitions(n, 2 * (load - 1));
  const int half = n / 2;
  constexpr int kFixedShifts[2][2] = {{-1, -1}, {1, -2}};

  for (int i = 1; i < load; ++i) {
    const Partition& left = partitions[2 * (i - 1)];
    const Partition& right = partitions[2 * (i - 1) + 1];
    for (int side = 0; side < 2; ++side) {
      const auto& pairs = side == 0 ? left.pairs : right.pairs;
      const int col0 = side == 0 ? 0 : half;
      long long shift;
      if (i <= 2) {
        shift = kFixedShifts[i - 1][side];
      } else {
        // No published rule beyond three rows: take the shift with the
        // fewest column collisions, preferring small magnitudes.
        shift = 0;
        int best = detail::column_collisions(S, i, circshift(pairs, 0), col0);
        for (int mag = 1; mag <= half && best > 0; ++mag) {
          for (long long d : {static_cast<long long>(-mag), static_cast<long long>(mag)}) {
            int bad = detail::column_collisions(S, i, circshift(pairs, d), col0);
            if (bad < best) {
              best = bad;
              shift = d;
            }
          }
        }
      }
      const auto shifted = circshift(pairs, shift);
      PartitionSegment seg{i, {}};
      for (int m = 0; m < half; ++m) {
        S.cell(i, col0 + m) = detail::pair_codeword(shifted[m]);
        seg.cols.push_back(col0 + m);
      }
      S.segments.push_back(std::move(seg));
    }
  }
  return S;
}

inline ScheduleMatrix build_schedule(Scheme scheme, int num_blocks, int num_workers,
                                     int load, MdsPoints points = MdsPoints::linear) {
  switch (scheme) {
    case Scheme::mcc: return build_mcc(num_blocks, num_workers, load, points);
    case Scheme::uc_mmc: return build_uc_mmc(num_blocks, num_workers, load);
    case Scheme::cpgc: return build_cpgc(num_blocks, num_workers, load);
  }
  throw std::logic_error("bad scheme tag");
}

// ---------------------------------------------------------------------------
// Validation. Violations are hard breaches of the construction rules;
// warnings flag the soft column-distinctness preference (degenerate but
// legal schedules, like the 2-block CPGC, trip it by necessity).

enum class Severity { violation, warning };

struct Finding {
  Severity severity;
  std::string code;
  int row = -1;  // -1 when not tied to a cell
  int col = -1;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool has_violations() const {
    for (const Finding& f : findings)
      if (f.severity == Severity::violation) return true;
    return false;
  }
  std::size_t violation_count() const {
    std::size_t c = 0;
    for (const Finding& f : findings) c += f.severity == Severity::violation;
    return c;
  }
  std::size_t warning_count() const { return findings.size() - violation_count(); }
};

inline ValidationReport validate_schedule(const ScheduleMatrix& S) {
  ValidationReport rep;
  auto add = [&](Severity sev, std::string code, int row, int col, std::string msg) {
    rep.findings.push_back({sev, std::move(code), row, col, std::move(msg)});
  };

  for (int i = 0; i < S.rows(); ++i) {
    for (int j = 0; j < S.cols(); ++j) {
      const Codeword& cw = S.cell(i, j);
      if (!is_canonical(cw)) {
        add(Severity::violation, "canonical-form", i, j,
            "codeword has duplicate/unsorted indices, a zero coefficient, or no terms");
        continue;
      }
      for (const Term& t : cw.terms)
        if (t.block < 0 || t.block >= S.padded_blocks())
          add(Severity::violation, "index-range", i, j,
              "block index " + std::to_string(t.block) + " outside [0, " +
                  std::to_string(S.padded_blocks()) + ")");
    }
  }

  if (S.scheme() == Scheme::cpgc) {
    for (int j = 0; j < S.cols(); ++j) {
      const Codeword& first = S.cell(0, j);
      if (first.degree() != 1 || first.terms[0].coeff != 1)
        add(Severity::violation, "row1-uncoded", 0, j,
            "first task must be a single uncoded block");
      else if (S.num_blocks() == S.cols() && first.terms[0].block != j)
        add(Severity::violation, "row1-identity", 0, j,
            "first task of worker " + std::to_string(j) + " is not block " + std::to_string(j));
    }
    for (int i = 0; i < S.rows(); ++i)
      for (int j = 0; j < S.cols(); ++j) {
        const Codeword& cw = S.cell(i, j);
        if (cw.degree() > 2)
          add(Severity::violation, "degree-bound", i, j, "codeword degree exceeds 2");
        for (const Term& t : cw.terms)
          if (t.coeff != 1)
            add(Severity::violation, "unit-coefficients", i, j,
                "cpgc coefficients must equal 1");
      }

    // Column-distinctness: a block should appear at most once per column.
    for (int j = 0; j < S.cols(); ++j) {
      std::map<int, int> count;
      for (int i = 0; i < S.rows(); ++i)
        for (const Term& t : S.cell(i, j).terms) ++count[t.block];
      for (auto [block, c] : count)
        if (c > 1)
          add(Severity::warning, "column-repeat", -1, j,
              "block " + std::to_string(block) + " appears " + std::to_string(c) +
                  " times in column " + std::to_string(j));
    }
  }

  // Partition provenance: pairs drawn from one partition must stay disjoint.
  for (const PartitionSegment& seg : S.segments) {
    std::set<int> used;
    bool overlap = false;
    for (int col : seg.cols)
      for (const Term& t : S.cell(seg.row, col).terms)
        overlap |= !used.insert(t.block).second;
    if (overlap)
      add(Severity::violation, "partition-overlap", seg.row, -1,
          "partition segment in row " + std::to_string(seg.row) + " has overlapping pairs");
  }

  return rep;
}

// ---------------------------------------------------------------------------
// Plain JSON dump: scheme tag, dimensions and row-major per-cell term lists.

inline std::string dump_schedule_json(const ScheduleMatrix& S) {
  std::ostringstream os;
  os << "{\n"
     << "  \"scheme\": \"" << to_string(S.scheme()) << "\",\n"
     << "  \"rows\": " << S.rows() << ",\n"
     << "  \"cols\": " << S.cols() << ",\n"
     << "  \"num_blocks\": " << S.num_blocks() << ",\n"
     << "  \"padded_blocks\": " << S.padded_blocks() << ",\n"
     << "  \"cells\": [\n";
  for (int i = 0; i < S.rows(); ++i) {
    os << "    [";
    for (int j = 0; j < S.cols(); ++j) {
      const Codeword& cw = S.cell(i, j);
      os << "[";
      for (std::size_t k = 0; k < cw.terms.size(); ++k) {
        os << "[" << cw.terms[k].block << "," << cw.terms[k].coeff << "]";
        if (k + 1 < cw.terms.size()) os << ",";
      }
      os << "]";
      if (j + 1 < S.cols()) os << ",";
    }
    os << "]";
    if (i + 1 < S.rows()) os << ",";
    os << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

}  // namespace cpgc
