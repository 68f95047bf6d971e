#pragma once

// Scalar arithmetic over the small prime fields GF(2), GF(3), GF(5).
// Scalars are plain uint8_t values in [0, p); gf_make() validates once at
// the boundary, everything after assumes reduced inputs.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace semiforge {

inline constexpr int kMaxDim = 6;  // matrix/vector dimension cap

inline bool supported_prime(int p) { return p == 2 || p == 3 || p == 5; }

inline void require_prime(int p) {
  if (!supported_prime(p))
    throw std::invalid_argument("unsupported prime p=" + std::to_string(p) +
                                " (supported: 2, 3, 5)");
}

inline void require_dim(int n) {
  if (n < 2 || n > kMaxDim)
    throw std::invalid_argument("dimension n=" + std::to_string(n) +
                                " out of range [2," + std::to_string(kMaxDim) + "]");
}

inline uint8_t gf_make(int p, long long v) {
  require_prime(p);
  long long r = v % p;
  if (r < 0) r += p;
  return static_cast<uint8_t>(r);
}

inline uint8_t gf_add(int p, uint8_t a, uint8_t b) {
  int s = a + b;
  return static_cast<uint8_t>(s >= p ? s - p : s);
}

inline uint8_t gf_neg(int p, uint8_t a) { return a ? static_cast<uint8_t>(p - a) : 0; }

inline uint8_t gf_sub(int p, uint8_t a, uint8_t b) { return gf_add(p, a, gf_neg(p, b)); }

inline uint8_t gf_mul(int p, uint8_t a, uint8_t b) {
  return static_cast<uint8_t>((a * b) % p);
}

inline uint8_t gf_inv(int p, uint8_t a) {
  if (a == 0) throw std::domain_error("gf_inv: zero has no inverse");
  // p <= 5, a tiny scan beats a table
  for (int x = 1; x < p; ++x)
    if ((a * x) % p == 1) return static_cast<uint8_t>(x);
  throw std::domain_error("gf_inv: not a unit");  // unreachable for prime p
}

}  // namespace semiforge
