#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <utility>
#include <vector>

#include "cpgc/codeword.hpp"
#include "cpgc/schedule.hpp"

namespace cpgc {

// All recoverability decisions are exact: no floating point in this module.
using Rational = boost::multiprecision::cpp_rational;

// Per-worker completed-task counts at some instant.
struct ScoreVector {
  std::vector<int> counts;
};

// Which task results the master holds for a given score vector. Under
// multi-message delivery a worker's first c_j results are in; under bundled
// delivery a column arrives only once fully complete.
inline std::vector<Codeword> received_codewords(const ScheduleMatrix& S,
                                                const ScoreVector& C, Delivery mode) {
  if (static_cast<int>(C.counts.size()) != S.cols())
    throw std::invalid_argument("score vector length does not match worker count");
  std::vector<Codeword> out;
  for (int j = 0; j < S.cols(); ++j) {
    const int c = C.counts[j];
    if (c < 0 || c > S.rows())
      throw std::invalid_argument("score vector entry outside [0, load]");
    if (mode == Delivery::multi_message) {
      for (int i = 0; i < c; ++i) out.push_back(S.cell(i, j));
    } else if (c == S.rows()) {
      for (int i = 0; i < S.rows(); ++i) out.push_back(S.cell(i, j));
    }
  }
  return out;
}

struct RecoveryReport {
  std::vector<int> recoverable;  // true-block indices, ascending
  int rank = 0;                  // independent received codewords
  bool full = false;
  int num_blocks = 0;
};

// Incremental exact Gaussian elimination over the rationals. Maintains a
// reduced row-echelon basis of the received codeword span; a block is
// decodable exactly when its unit vector appears as a basis row. Virtual
// zero-padded blocks are known a priori and seeded as free unit rows.
//
// Optionally tracks, per basis row, the rational combination of received
// inputs that produces it, so callers can apply the same combination to
// numeric task results.
//
// Not thread-safe; use one instance per simulation trial.
class IncrementalDecoder {
 public:
  IncrementalDecoder(int num_blocks, int num_virtual = 0, bool track_combinations = false)
      : nblocks_(num_blocks), ncols_(num_blocks + num_virtual), track_(track_combinations) {
    if (num_blocks < 1 || num_virtual < 0)
      throw std::invalid_argument("invalid decoder dimensions");
    pivot_row_.assign(ncols_, -1);
    for (int p = nblocks_; p < ncols_; ++p) {
      Row row;
      row.a.assign(ncols_, Rational(0));
      row.a[p] = 1;
      row.nnz = 1;
      row.pivot = p;
      pivot_row_[p] = static_cast<int>(rows_.size());
      rows_.push_back(std::move(row));
    }
  }

  // Feeds one received codeword; returns true when it was innovative
  // (increased the rank). Input indices count every call, dependent or not.
  bool add(const Codeword& cw) {
    const int input = ninputs_++;
    std::vector<Rational> a(ncols_, Rational(0));
    for (const Term& t : cw.terms) {
      if (t.block < 0 || t.block >= ncols_)
        throw std::invalid_argument("codeword block index out of decoder range");
      a[t.block] += t.coeff;
    }
    std::vector<Rational> combo;
    if (track_) {
      combo.assign(input + 1, Rational(0));
      combo[input] = 1;
    }

    // Reduce against current pivots.
    for (int c = 0; c < ncols_; ++c) {
      if (a[c] == 0 || pivot_row_[c] < 0) continue;
      const Rational f = a[c];
      const Row& pr = rows_[pivot_row_[c]];
      axpy(a, f, pr.a);
      if (track_) axpy_combo(combo, f, pr.combo);
    }
    int lead = -1;
    for (int c = 0; c < ncols_; ++c)
      if (a[c] != 0) {
        lead = c;
        break;
      }
    if (lead < 0) return false;  // dependent; carries no new information

    const Rational inv = a[lead];
    for (auto& v : a)
      if (v != 0) v /= inv;
    if (track_)
      for (auto& v : combo)
        if (v != 0) v /= inv;

    // Back-substitute into existing rows to keep the basis fully reduced.
    for (Row& row : rows_) {
      if (row.a[lead] == 0) continue;
      const bool was_unit = row.nnz == 1;
      const Rational f = row.a[lead];
      axpy(row.a, f, a);
      if (track_) axpy_combo(row.combo, f, combo);
      row.nnz = count_nnz(row.a);
      note_unit_change(row, was_unit);
    }

    Row nr;
    nr.a = std::move(a);
    nr.combo = std::move(combo);
    nr.pivot = lead;
    nr.nnz = count_nnz(nr.a);
    pivot_row_[lead] = static_cast<int>(rows_.size());
    rows_.push_back(std::move(nr));
    note_unit_change(rows_.back(), false);
    ++rank_;
    return true;
  }

  int rank() const { return rank_; }
  int inputs() const { return ninputs_; }
  int recovered_count() const { return recovered_; }

  bool recovered(int block) const {
    if (block < 0 || block >= nblocks_) throw std::out_of_range("block index");
    const int r = pivot_row_[block];
    return r >= 0 && rows_[r].nnz == 1;
  }

  std::vector<int> recovered_blocks() const {
    std::vector<int> out;
    for (int b = 0; b < nblocks_; ++b) {
      const int r = pivot_row_[b];
      if (r >= 0 && rows_[r].nnz == 1) out.push_back(b);
    }
    return out;
  }

  // Exact combination of input codewords equal to e_block. Seeded virtual
  // rows never appear: their numeric value is identically zero.
  std::vector<std::pair<int, Rational>> solution(int block) const {
    if (!track_) throw std::logic_error("decoder built without combination tracking");
    if (!recovered(block)) throw std::invalid_argument("block is not recoverable yet");
    const Row& row = rows_[pivot_row_[block]];
    std::vector<std::pair<int, Rational>> out;
    for (std::size_t i = 0; i < row.combo.size(); ++i)
      if (row.combo[i] != 0) out.push_back({static_cast<int>(i), row.combo[i]});
    return out;
  }

  RecoveryReport report() const {
    RecoveryReport rep;
    rep.recoverable = recovered_blocks();
    rep.rank = rank_;
    rep.num_blocks = nblocks_;
    rep.full = static_cast<int>(rep.recoverable.size()) == nblocks_;
    return rep;
  }

 private:
  struct Row {
    std::vector<Rational> a;
    std::vector<Rational> combo;  // over input indices; empty unless tracking
    int pivot = -1;
    int nnz = 0;
  };

  static int count_nnz(const std::vector<Rational>& v) {
    int n = 0;
    for (const auto& x : v) n += x != 0;
    return n;
  }

  // v -= f * w
  static void axpy(std::vector<Rational>& v, const Rational& f, const std::vector<Rational>& w) {
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] != 0) v[i] -= f * w[i];
  }

  static void axpy_combo(std::vector<Rational>& v, const Rational& f, const std::vector<Rational>& w) {
    if (v.size() < w.size()) v.resize(w.size(), Rational(0));
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] != 0) v[i] -= f * w[i];
  }

  void note_unit_change(const Row& row, bool was_unit) {
    if (row.pivot >= nblocks_) return;  // virtual block, never a target
    const bool is_unit = row.nnz == 1;
    if (is_unit && !was_unit) ++recovered_;
    if (!is_unit && was_unit) --recovered_;
  }

  int nblocks_, ncols_;
  bool track_;
  int ninputs_ = 0;
  int rank_ = 0;       // excludes seeded virtual rows
  int recovered_ = 0;  // true blocks currently decodable
  std::vector<Row> rows_;
  std::vector<int> pivot_row_;
};

// One-shot decoding of a codeword set. Blocks with indices in
// [num_blocks, num_blocks + num_virtual) are treated as known zeros.
inline RecoveryReport recoverable_blocks(const std::vector<Codeword>& codewords,
                                         int num_blocks, int num_virtual = 0) {
  IncrementalDecoder dec(num_blocks, num_virtual);
  for (const Codeword& cw : codewords) dec.add(cw);
  return dec.report();
}

inline bool meets_threshold(const RecoveryReport& report, int required_blocks) {
  if (required_blocks < 0 || required_blocks > report.num_blocks)
    throw std::invalid_argument("required block count outside [0, num_blocks]");
  return static_cast<int>(report.recoverable.size()) >= required_blocks;
}

}  // namespace cpgc
