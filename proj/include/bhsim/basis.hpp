// basis.hpp — occupation-number basis bookkeeping for a qubit chain.
//
// A basis pattern is an unsigned integer whose bit (j-1) is the occupation
// of site j, i.e. site 1 is the least significant bit.  Sector bases list
// all patterns of fixed popcount in ascending integer order; that ordering
// is part of the on-disk and cross-engine contract.

#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhsim {

using Pattern = std::uint32_t;

inline constexpr int max_sites = 30;

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - k + i) / i;
  return c;
}

// All n-site patterns with exactly k excitations, ascending.
inline std::vector<Pattern> sector_basis(int n, int k) {
  if (n < 1 || n > max_sites) throw std::invalid_argument("sector_basis: site count out of range");
  if (k < 0 || k > n) throw std::invalid_argument("sector_basis: excitation count out of range");
  std::vector<Pattern> basis;
  basis.reserve(binomial(n, k));
  if (k == 0) {
    basis.push_back(0);
    return basis;
  }
  // Gosper's hack enumerates fixed-popcount patterns in ascending order.
  Pattern v = (Pattern{1} << k) - 1;
  const Pattern limit = Pattern{1} << n;
  while (v < limit) {
    basis.push_back(v);
    Pattern c = v & (~v + 1);
    Pattern r = v + c;
    v = (((r ^ v) >> 2) / c) | r;
  }
  return basis;
}

// Index of `pattern` in sector_basis(n, popcount(pattern)) via binary search.
inline std::size_t sector_index(const std::vector<Pattern>& basis, Pattern pattern) {
  std::size_t lo = 0, hi = basis.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (basis[mid] < pattern)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo == basis.size() || basis[lo] != pattern)
    throw std::logic_error("sector_index: pattern not in basis");
  return lo;
}

// Parse "0110..." (character i is site i+1) into a pattern.
inline Pattern parse_bitstring(const std::string& s) {
  if (s.empty() || s.size() > max_sites)
    throw std::invalid_argument("parse_bitstring: length must be in [1, " + std::to_string(max_sites) + "]");
  Pattern p = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1')
      p |= Pattern{1} << i;
    else if (s[i] != '0')
      throw std::invalid_argument("parse_bitstring: invalid character '" + std::string(1, s[i]) + "'");
  }
  return p;
}

inline std::string format_bitstring(Pattern p, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i)
    if (p & (Pattern{1} << i)) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

// Gather the bits of `pattern` at the listed sites (1-based) into a compact
// integer whose bit i corresponds to sites[i].
inline Pattern gather_bits(Pattern pattern, const std::vector<int>& sites) {
  Pattern out = 0;
  for (std::size_t i = 0; i < sites.size(); ++i)
    if (pattern & (Pattern{1} << (sites[i] - 1))) out |= Pattern{1} << i;
  return out;
}

// Inverse of gather_bits: place bit i of `compact` at sites[i].
inline Pattern scatter_bits(Pattern compact, const std::vector<int>& sites) {
  Pattern out = 0;
  for (std::size_t i = 0; i < sites.size(); ++i)
    if (compact & (Pattern{1} << i)) out |= Pattern{1} << (sites[i] - 1);
  return out;
}

inline int popcount(Pattern p) { return std::popcount(p); }

}  // namespace bhsim
