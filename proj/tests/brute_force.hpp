#pragma once

// Unpruned reference enumeration of Gamma_c balls: every integer matrix of
// determinant 1 with ||g||_F < T is tested for membership by greedy descent
// on the Frobenius norm, stripping one generator letter at a time.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <vector>

namespace brute {

using M = std::array<long long, 4>;

inline M mul(const M& x, const M& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}

inline long long norm2(const M& m) { return m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3]; }

inline bool member(M g, long long c) {
  const std::array<M, 4> letters = {M{1, c, 0, 1}, M{1, -c, 0, 1}, M{1, 0, c, 1}, M{1, 0, -c, 1}};
  while (!(g == M{1, 0, 0, 1})) {
    bool reduced = false;
    for (const M& x : letters) {
      const M h = mul(x, g);
      if (norm2(h) < norm2(g)) {
        g = h;
        reduced = true;
        break;
      }
    }
    if (!reduced) return false;
  }
  return true;
}

// All members of Gamma_c with a^2+b^2+c^2+d^2 < T^2, sorted.
inline std::vector<M> ball(long long c, long long T) {
  std::vector<M> out;
  const long long T2 = T * T;
  for (long long a = -T; a <= T; ++a) {
    for (long long b = -T; b <= T; ++b) {
      if (a * a + b * b >= T2 || std::gcd(a, b) != 1) continue;
      // Bottom rows (cc, d) with a d - b cc = 1 form cc = cc0 + m a, d = d0 + m b.
      for (long long cc = -T; cc <= T; ++cc) {
        if (b == 0) {
          if (a * a != 1) continue;
          const M g{a, b, cc, a};
          if (norm2(g) < T2 && member(g, c)) out.push_back(g);
          continue;
        }
        if (a != 0 && (1 + b * cc) % a != 0) continue;
        long long d;
        if (a == 0) {
          if (b * cc != -1) continue;
          for (d = -T; d <= T; ++d) {
            const M g{a, b, cc, d};
            if (norm2(g) < T2 && member(g, c)) out.push_back(g);
          }
          continue;
        }
        d = (1 + b * cc) / a;
        const M g{a, b, cc, d};
        if (norm2(g) < T2 && member(g, c)) out.push_back(g);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace brute
