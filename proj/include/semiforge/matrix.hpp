#pragma once

// Dense n x n matrices (2 <= n <= 6) and length-n vectors over GF(p).
//
// Entries are bit-packed into three binary planes (bit r*6+c of plane k holds
// bit k of the entry), so a GF(2)/GF(3) matrix lives entirely in the low two
// machine words; the third plane is only populated for p = 5. Entrywise sums
// for p = 3 use branch-free plane arithmetic, which is what the bulk
// invertibility tests in the search lean on. Elimination-style operations
// (det/rank/inverse) unpack once into a small local array and work there.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "gf.hpp"

namespace semiforge {

struct SingularError : std::runtime_error {
  SingularError() : std::runtime_error("matrix is singular") {}
};

struct Vec {
  uint8_t n = 0;
  std::array<uint8_t, kMaxDim> c{};

  static Vec zero(int n) {
    Vec v;
    v.n = static_cast<uint8_t>(n);
    return v;
  }
  static Vec unit(int n, int i) {
    Vec v = zero(n);
    v.c[static_cast<size_t>(i)] = 1;
    return v;
  }
  bool is_zero() const {
    for (int i = 0; i < n; ++i)
      if (c[static_cast<size_t>(i)]) return false;
    return true;
  }
  bool operator==(const Vec&) const = default;
};

// Element index <-> coordinate vector, index = sum c_i * p^i.
inline int vec_to_index(int p, const Vec& v) {
  int idx = 0;
  for (int i = v.n - 1; i >= 0; --i) idx = idx * p + v.c[static_cast<size_t>(i)];
  return idx;
}

inline Vec index_to_vec(int p, int n, int idx) {
  Vec v = Vec::zero(n);
  for (int i = 0; i < n; ++i) {
    v.c[static_cast<size_t>(i)] = static_cast<uint8_t>(idx % p);
    idx /= p;
  }
  return v;
}

class Mat {
 public:
  Mat() = default;
  Mat(int p, int n) : p_(static_cast<uint8_t>(p)), n_(static_cast<uint8_t>(n)) {
    require_prime(p);
    require_dim(n);
  }

  static Mat identity(int p, int n) {
    Mat m(p, n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }

  int p() const { return p_; }
  int n() const { return n_; }

  uint8_t at(int r, int c) const {
    unsigned b = static_cast<unsigned>(r) * kMaxDim + static_cast<unsigned>(c);
    return static_cast<uint8_t>(((pl_[0] >> b) & 1u) | (((pl_[1] >> b) & 1u) << 1) |
                                (((pl_[2] >> b) & 1u) << 2));
  }

  void set(int r, int c, uint8_t v) {
    unsigned b = static_cast<unsigned>(r) * kMaxDim + static_cast<unsigned>(c);
    uint64_t m = ~(uint64_t{1} << b);
    pl_[0] = (pl_[0] & m) | (uint64_t{v & 1u} << b);
    pl_[1] = (pl_[1] & m) | (uint64_t{(v >> 1) & 1u} << b);
    pl_[2] = (pl_[2] & m) | (uint64_t{(v >> 2) & 1u} << b);
  }

  bool operator==(const Mat&) const = default;

  // this += lambda * m, entrywise mod p. The p=2/3 paths stay packed.
  Mat& add_scaled(const Mat& m, uint8_t lambda) {
    if (lambda == 0) return *this;
    if (p_ == 2) {
      pl_[0] ^= m.pl_[0];
      return *this;
    }
    if (p_ == 3) {
      // GF(3) value encoding is one-hot over the two planes (1 -> plane0,
      // 2 -> plane1); negation is a plane swap.
      uint64_t b0 = m.pl_[0], b1 = m.pl_[1];
      if (lambda == 2) std::swap(b0, b1);
      uint64_t a0 = pl_[0], a1 = pl_[1];
      pl_[0] = ((a0 ^ b0) & ~(a1 | b1)) | (a1 & b1);
      pl_[1] = ((a1 ^ b1) & ~(a0 | b0)) | (a0 & b0);
      return *this;
    }
    for (int r = 0; r < n_; ++r)
      for (int c = 0; c < n_; ++c)
        set(r, c, gf_add(p_, at(r, c), gf_mul(p_, lambda, m.at(r, c))));
    return *this;
  }

  Mat operator+(const Mat& m) const {
    Mat r = *this;
    r.add_scaled(m, 1);
    return r;
  }

  Mat operator-(const Mat& m) const {
    Mat r = *this;
    r.add_scaled(m, gf_neg(p_, 1));
    return r;
  }

  Mat scaled(uint8_t lambda) const {
    Mat r(p_, n_);
    r.add_scaled(*this, lambda);
    return r;
  }

  Mat operator*(const Mat& m) const {
    uint8_t a[kMaxDim][kMaxDim], b[kMaxDim][kMaxDim];
    unpack(a);
    m.unpack(b);
    Mat r(p_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        int acc = 0;
        for (int k = 0; k < n_; ++k) acc += a[i][k] * b[k][j];
        r.set(i, j, static_cast<uint8_t>(acc % p_));
      }
    return r;
  }

  Vec apply(const Vec& v) const {
    Vec w = Vec::zero(n_);
    for (int r = 0; r < n_; ++r) {
      int acc = 0;
      for (int c = 0; c < n_; ++c) acc += at(r, c) * v.c[static_cast<size_t>(c)];
      w.c[static_cast<size_t>(r)] = static_cast<uint8_t>(acc % p_);
    }
    return w;
  }

  Mat transposed() const {
    Mat r(p_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) r.set(j, i, at(i, j));
    return r;
  }

  Vec column(int c) const {
    Vec v = Vec::zero(n_);
    for (int r = 0; r < n_; ++r) v.c[static_cast<size_t>(r)] = at(r, c);
    return v;
  }

  uint8_t det() const {
    uint8_t a[kMaxDim][kMaxDim];
    unpack(a);
    int n = n_, p = p_;
    uint8_t d = 1;
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      for (int r = col; r < n; ++r)
        if (a[r][col]) {
          piv = r;
          break;
        }
      if (piv < 0) return 0;
      if (piv != col) {
        for (int c = col; c < n; ++c) std::swap(a[piv][c], a[col][c]);
        d = gf_neg(p, d);
      }
      d = gf_mul(p, d, a[col][col]);
      uint8_t inv = gf_inv(p, a[col][col]);
      for (int r = col + 1; r < n; ++r) {
        if (!a[r][col]) continue;
        uint8_t f = gf_mul(p, a[r][col], inv);
        for (int c = col; c < n; ++c)
          a[r][c] = gf_sub(p, a[r][c], gf_mul(p, f, a[col][c]));
      }
    }
    return d;
  }

  bool invertible() const { return det() != 0; }

  int rank() const {
    uint8_t a[kMaxDim][kMaxDim];
    unpack(a);
    int n = n_, p = p_, rk = 0;
    for (int col = 0; col < n && rk < n; ++col) {
      int piv = -1;
      for (int r = rk; r < n; ++r)
        if (a[r][col]) {
          piv = r;
          break;
        }
      if (piv < 0) continue;
      for (int c = col; c < n; ++c) std::swap(a[piv][c], a[rk][c]);
      uint8_t inv = gf_inv(p, a[rk][col]);
      for (int r = rk + 1; r < n; ++r) {
        if (!a[r][col]) continue;
        uint8_t f = gf_mul(p, a[r][col], inv);
        for (int c = col; c < n; ++c)
          a[r][c] = gf_sub(p, a[r][c], gf_mul(p, f, a[rk][c]));
      }
      ++rk;
    }
    return rk;
  }

  std::optional<Mat> try_inverse() const {
    uint8_t a[kMaxDim][2 * kMaxDim];
    int n = n_, p = p_;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        a[r][c] = at(r, c);
        a[r][n + c] = (r == c) ? 1 : 0;
      }
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      for (int r = col; r < n; ++r)
        if (a[r][col]) {
          piv = r;
          break;
        }
      if (piv < 0) return std::nullopt;
      if (piv != col)
        for (int c = 0; c < 2 * n; ++c) std::swap(a[piv][c], a[col][c]);
      uint8_t inv = gf_inv(p, a[col][col]);
      for (int c = 0; c < 2 * n; ++c) a[col][c] = gf_mul(p, a[col][c], inv);
      for (int r = 0; r < n; ++r) {
        if (r == col || !a[r][col]) continue;
        uint8_t f = a[r][col];
        for (int c = 0; c < 2 * n; ++c)
          a[r][c] = gf_sub(p, a[r][c], gf_mul(p, f, a[col][c]));
      }
    }
    Mat m(p, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m.set(r, c, a[r][n + c]);
    return m;
  }

  Mat inverse() const {
    auto m = try_inverse();
    if (!m) throw SingularError();
    return *m;
  }

  // Stable packed key for hashing and deterministic ordering.
  std::array<uint64_t, 3> packed() const { return {pl_[0], pl_[1], pl_[2]}; }

  std::string to_string() const {
    std::string s;
    for (int r = 0; r < n_; ++r) {
      for (int c = 0; c < n_; ++c) {
        if (c) s += ' ';
        s += static_cast<char>('0' + at(r, c));
      }
      s += '\n';
    }
    return s;
  }

 private:
  void unpack(uint8_t out[kMaxDim][kMaxDim]) const {
    for (int r = 0; r < n_; ++r)
      for (int c = 0; c < n_; ++c) out[r][c] = at(r, c);
  }

  uint8_t p_ = 3;
  uint8_t n_ = 0;
  uint64_t pl_[3] = {0, 0, 0};
};

inline bool mat_less(const Mat& a, const Mat& b) { return a.packed() < b.packed(); }

// Apply a linear map to an element index (coordinates base p).
inline int apply_to_index(const Mat& m, int idx) {
  return vec_to_index(m.p(), m.apply(index_to_vec(m.p(), m.n(), idx)));
}

}  // namespace semiforge
