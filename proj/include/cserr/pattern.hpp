#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cserr/common.hpp"

namespace cserr {

// A Z-error pattern alpha = (alpha_n ... alpha_1) is encoded as the integer
// sum_i alpha_i 2^(i-1), so bit (i-1) marks a Z error on photon i.
using Pattern = std::uint32_t;

inline bool pattern_bit(Pattern alpha, int photon) {
  return (alpha >> (photon - 1)) & 1u;
}

// Renders alpha_n ... alpha_1 left to right, matching the written order.
inline std::string pattern_to_string(Pattern alpha, int n) {
  std::string s(n, '0');
  for (int i = 1; i <= n; ++i)
    if (pattern_bit(alpha, i)) s[n - i] = '1';
  return s;
}

inline Pattern string_to_pattern(const std::string& s) {
  const int n = static_cast<int>(s.size());
  Pattern alpha = 0;
  for (int i = 1; i <= n; ++i) {
    const char c = s[n - i];
    if (c != '0' && c != '1')
      throw config_error("pattern string must contain only 0/1");
    if (c == '1') alpha |= (1u << (i - 1));
  }
  return alpha;
}

struct HCount {
  std::vector<int> f;  // f_i = sum_{j >= i} alpha_j, index 0 holds f_1
  int h = 0;           // number of odd f_i = number of M_- factors
};

// h(alpha) = (1/2)(n - sum_i (-1)^{f_i}); counts the adjacent error pairs
// (fundamental emitter errors) needed to realise the pattern.
inline HCount h_count(Pattern alpha, int n) {
  HCount out;
  out.f.assign(n, 0);
  int suffix = 0;
  for (int i = n; i >= 1; --i) {
    if (pattern_bit(alpha, i)) ++suffix;
    out.f[i - 1] = suffix;
    if (suffix & 1) ++out.h;
  }
  return out;
}

}  // namespace cserr
