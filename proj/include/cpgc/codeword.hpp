#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpgc {

// One term of a coded computation task: coeff * W_block.
struct Term {
  int block = 0;
  long long coeff = 0;

  friend bool operator==(const Term&, const Term&) = default;
};

// A coded submatrix: an integer linear combination of source blocks.
// Canonical form keeps terms sorted by strictly increasing block index
// with nonzero coefficients.
struct Codeword {
  std::vector<Term> terms;

  int degree() const { return static_cast<int>(terms.size()); }

  bool contains(int block) const {
    for (const Term& t : terms)
      if (t.block == block) return true;
    return false;
  }

  friend bool operator==(const Codeword&, const Codeword&) = default;
};

inline bool is_canonical(const Codeword& cw) {
  if (cw.terms.empty()) return false;
  int prev = -1;
  for (const Term& t : cw.terms) {
    if (t.block <= prev || t.coeff == 0) return false;
    prev = t.block;
  }
  return true;
}

// Checked factory: sorts terms and rejects duplicate indices, zero
// coefficients and empty combinations.
inline Codeword make_codeword(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.block < b.block; });
  Codeword cw{std::move(terms)};
  if (!is_canonical(cw))
    throw std::invalid_argument("codeword is not in canonical form");
  return cw;
}

inline Codeword make_codeword(std::initializer_list<Term> terms) {
  return make_codeword(std::vector<Term>(terms));
}

// Degree-1 codeword for a single uncoded block.
inline Codeword single_block(int block) { return Codeword{{{block, 1}}}; }

inline Codeword block_pair(int a, int b) {
  return make_codeword({{a, 1}, {b, 1}});
}

// Human-readable form, 1-based to match the usual W_i notation: "W1+2W3".
inline std::string to_string(const Codeword& cw) {
  std::string out;
  for (std::size_t i = 0; i < cw.terms.size(); ++i) {
    const Term& t = cw.terms[i];
    if (i > 0) out += t.coeff < 0 ? "-" : "+";
    long long c = i > 0 ? std::abs(t.coeff) : t.coeff;
    if (c != 1) out += std::to_string(c);
    out += "W" + std::to_string(t.block + 1);
  }
  return out;
}

}  // namespace cpgc
