#pragma once

// Test-only oracles, deliberately written along different routes than the
// library: naive integer matrices with Laplace determinants, irreducibility
// by exhaustive product enumeration, brute-force extension fields, and an
// independent multiplication-table classifier for the toy search orders.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "semiforge/cube.hpp"

namespace oracles {

// ---- Naive matrices ---------------------------------------------------------

struct NaiveMat {
  int p = 3, n = 0;
  int e[6][6] = {};

  static NaiveMat from(const semiforge::Mat& m) {
    NaiveMat o;
    o.p = m.p();
    o.n = m.n();
    for (int r = 0; r < o.n; ++r)
      for (int c = 0; c < o.n; ++c) o.e[r][c] = m.at(r, c);
    return o;
  }

  // Laplace expansion along the first row; no elimination involved.
  int det() const { return det_rec(*this); }

  NaiveMat mul(const NaiveMat& o) const {
    NaiveMat r;
    r.p = p;
    r.n = n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        int acc = 0;
        for (int k = 0; k < n; ++k) acc += e[i][k] * o.e[k][j];
        r.e[i][j] = acc % p;
      }
    return r;
  }

  // Row reduction written from scratch.
  int rank() const {
    int a[6][6];
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) a[r][c] = e[r][c];
    int rk = 0;
    for (int col = 0; col < n && rk < n; ++col) {
      int piv = -1;
      for (int r = rk; r < n; ++r)
        if (a[r][col] % p) {
          piv = r;
          break;
        }
      if (piv < 0) continue;
      for (int c = 0; c < n; ++c) std::swap(a[piv][c], a[rk][c]);
      int inv = 1;
      while ((a[rk][col] * inv) % p != 1) ++inv;
      for (int r = rk + 1; r < n; ++r) {
        int f = (a[r][col] * inv) % p;
        for (int c = 0; c < n; ++c) a[r][c] = ((a[r][c] - f * a[rk][c]) % p + p * p) % p;
      }
      ++rk;
    }
    return rk;
  }

 private:
  static int det_rec(const NaiveMat& m) {
    if (m.n == 1) return m.e[0][0] % m.p;
    int acc = 0, sign = 1;
    for (int c = 0; c < m.n; ++c) {
      if (m.e[0][c]) {
        NaiveMat sub;
        sub.p = m.p;
        sub.n = m.n - 1;
        for (int r = 1; r < m.n; ++r) {
          int cc2 = 0;
          for (int cc = 0; cc < m.n; ++cc) {
            if (cc == c) continue;
            sub.e[r - 1][cc2++] = m.e[r][cc];
          }
        }
        acc += sign * m.e[0][c] * det_rec(sub);
      }
      sign = -sign;
    }
    return ((acc % m.p) + m.p) % m.p;
  }
};

// ---- Polynomials by coefficient vectors --------------------------------------

using OPoly = std::vector<int>;  // little-endian, reduced mod p, trimmed

inline OPoly opoly_trim(OPoly f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
  return f;
}

inline OPoly opoly_mul(int p, const OPoly& f, const OPoly& g) {
  if (f.empty() || g.empty()) return {};
  OPoly r(f.size() + g.size() - 1, 0);
  for (size_t i = 0; i < f.size(); ++i)
    for (size_t j = 0; j < g.size(); ++j) r[i + j] = (r[i + j] + f[i] * g[j]) % p;
  return opoly_trim(r);
}

inline std::vector<OPoly> opoly_all_monic(int p, int deg) {
  std::vector<OPoly> out;
  int total = 1;
  for (int i = 0; i < deg; ++i) total *= p;
  for (int v = 0; v < total; ++v) {
    OPoly f(static_cast<size_t>(deg) + 1, 0);
    f[static_cast<size_t>(deg)] = 1;
    int x = v;
    for (int i = 0; i < deg; ++i) {
      f[static_cast<size_t>(i)] = x % p;
      x /= p;
    }
    out.push_back(f);
  }
  return out;
}

// Irreducible iff no product of two lower-degree monic polynomials equals f.
// Pure multiplication, no division anywhere.
inline bool opoly_irreducible(int p, const OPoly& f) {
  int deg = static_cast<int>(f.size()) - 1;
  if (deg <= 0) return false;
  if (deg == 1) return true;
  for (int d1 = 1; d1 <= deg / 2; ++d1)
    for (const OPoly& g : opoly_all_monic(p, d1))
      for (const OPoly& h : opoly_all_monic(p, deg - d1))
        if (opoly_mul(p, g, h) == f) return false;
  return true;
}

// ---- Brute-force extension fields ---------------------------------------------

// Multiplication table of F_p[t]/(modulus) on indices sum c_i p^i.
inline std::vector<int> field_table(int p, const OPoly& modulus) {
  int k = static_cast<int>(modulus.size()) - 1;
  int q = 1;
  for (int i = 0; i < k; ++i) q *= p;
  auto idx_of = [&](const OPoly& f) {
    int idx = 0;
    for (int i = k - 1; i >= 0; --i)
      idx = idx * p + (i < static_cast<int>(f.size()) ? f[static_cast<size_t>(i)] : 0);
    return idx;
  };
  auto poly_of = [&](int idx) {
    OPoly f(static_cast<size_t>(k), 0);
    for (int i = 0; i < k; ++i) {
      f[static_cast<size_t>(i)] = idx % p;
      idx /= p;
    }
    return f;
  };
  std::vector<int> table(static_cast<size_t>(q) * static_cast<size_t>(q));
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) {
      OPoly prod = opoly_mul(p, poly_of(a), poly_of(b));
      // reduce mod modulus by repeated subtraction of shifted multiples
      while (static_cast<int>(prod.size()) > k) {
        int top = static_cast<int>(prod.size()) - 1;
        int coeff = prod[static_cast<size_t>(top)];
        int shift = top - k;
        for (int i = 0; i <= k; ++i) {
          int& slot = prod[static_cast<size_t>(i + shift)];
          slot = ((slot - coeff * modulus[static_cast<size_t>(i)]) % p + p * p) % p;
        }
        prod = opoly_trim(prod);
        if (prod.empty()) break;
      }
      table[static_cast<size_t>(a) * static_cast<size_t>(q) + static_cast<size_t>(b)] =
          idx_of(prod);
    }
  return table;
}

// ---- Toy multiplication-table classifier --------------------------------------

// A unital algebra structure on F_p^n is a full multiplication table with
// identity e_1; validity = no zero divisors, tested via naive determinants
// of all left multiplications.

struct ToyAlgebra {
  int p, n, q;
  std::vector<int> table;  // q*q
  int mul(int a, int b) const {
    return table[static_cast<size_t>(a) * static_cast<size_t>(q) + static_cast<size_t>(b)];
  }
};

inline std::vector<int> toy_vec(int p, int n, int idx) {
  std::vector<int> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    v[static_cast<size_t>(i)] = idx % p;
    idx /= p;
  }
  return v;
}

inline int toy_idx(int p, const std::vector<int>& v) {
  int idx = 0;
  for (int i = static_cast<int>(v.size()) - 1; i >= 0; --i) idx = idx * p + v[static_cast<size_t>(i)];
  return idx;
}

// Build the table of the bilinear product defined by basis images
// e_i * e_j = rows[i][j] (an index), extended bilinearly.
inline ToyAlgebra toy_from_basis_products(int p, int n, const std::vector<std::vector<int>>& rows) {
  ToyAlgebra alg;
  alg.p = p;
  alg.n = n;
  alg.q = 1;
  for (int i = 0; i < n; ++i) alg.q *= p;
  alg.table.assign(static_cast<size_t>(alg.q) * static_cast<size_t>(alg.q), 0);
  for (int a = 0; a < alg.q; ++a) {
    auto va = toy_vec(p, n, a);
    for (int b = 0; b < alg.q; ++b) {
      auto vb = toy_vec(p, n, b);
      std::vector<int> acc(static_cast<size_t>(n), 0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          int f = (va[static_cast<size_t>(i)] * vb[static_cast<size_t>(j)]) % p;
          if (!f) continue;
          auto w = toy_vec(p, n, rows[static_cast<size_t>(i)][static_cast<size_t>(j)]);
          for (int k = 0; k < n; ++k)
            acc[static_cast<size_t>(k)] = (acc[static_cast<size_t>(k)] + f * w[static_cast<size_t>(k)]) % p;
        }
      alg.table[static_cast<size_t>(a) * static_cast<size_t>(alg.q) + static_cast<size_t>(b)] =
          toy_idx(p, acc);
    }
  }
  return alg;
}

inline bool toy_no_zero_divisors(const ToyAlgebra& alg) {
  for (int a = 1; a < alg.q; ++a) {
    NaiveMat la;
    la.p = alg.p;
    la.n = alg.n;
    int unit = 1;
    for (int j = 0; j < alg.n; ++j, unit *= alg.p) {
      auto col = toy_vec(alg.p, alg.n, alg.mul(a, unit));
      for (int k = 0; k < alg.n; ++k) la.e[k][j] = col[static_cast<size_t>(k)];
    }
    if (la.det() == 0) return false;
  }
  return true;
}

// All invertible n x n matrices over GF(p), as index permutations.
inline const std::vector<std::vector<int>>& toy_gl_perms(int p, int n) {
  static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
  auto key = std::make_pair(p, n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  int q = 1;
  for (int i = 0; i < n; ++i) q *= p;
  std::vector<std::vector<int>> perms;
  // enumerate matrices column by column as images of the unit vectors
  std::vector<int> cols(static_cast<size_t>(n));
  std::function<void(int)> rec = [&](int j) {
    if (j == n) {
      NaiveMat m{};
      m.p = p;
      m.n = n;
      for (int c = 0; c < n; ++c) {
        auto v = toy_vec(p, n, cols[static_cast<size_t>(c)]);
        for (int r = 0; r < n; ++r) m.e[r][c] = v[static_cast<size_t>(r)];
      }
      if (m.det() == 0) return;
      std::vector<int> perm(static_cast<size_t>(q));
      for (int a = 0; a < q; ++a) {
        auto va = toy_vec(p, n, a);
        std::vector<int> img(static_cast<size_t>(n), 0);
        for (int r = 0; r < n; ++r) {
          int acc = 0;
          for (int c = 0; c < n; ++c) acc += m.e[r][c] * va[static_cast<size_t>(c)];
          img[static_cast<size_t>(r)] = acc % p;
        }
        perm[static_cast<size_t>(a)] = toy_idx(p, img);
      }
      perms.push_back(std::move(perm));
      return;
    }
    for (int v = 0; v < q; ++v) {
      cols[static_cast<size_t>(j)] = v;
      rec(j + 1);
    }
  };
  rec(0);
  return cache.emplace(key, std::move(perms)).first->second;
}

// Canonical string of the table of psi-relabeled alg, min over all linear
// bijections psi with psi(identity) = e_1.
inline std::string toy_canonical_form(const ToyAlgebra& alg, int identity) {
  std::string best;
  for (const auto& perm : toy_gl_perms(alg.p, alg.n)) {
    if (perm[static_cast<size_t>(identity)] != 1) continue;
    // inverse permutation
    std::vector<int> inv(perm.size());
    for (size_t a = 0; a < perm.size(); ++a) inv[static_cast<size_t>(perm[a])] = static_cast<int>(a);
    std::string s;
    s.reserve(static_cast<size_t>(alg.q) * static_cast<size_t>(alg.q));
    for (int a = 0; a < alg.q; ++a)
      for (int b = 0; b < alg.q; ++b)
        s.push_back(static_cast<char>(perm[static_cast<size_t>(alg.mul(
            inv[static_cast<size_t>(a)], inv[static_cast<size_t>(b)]))]));
    if (best.empty() || s < best) best = s;
  }
  return best;
}

// Principal isotope table of a toy algebra: a o b = Ry^{-1}(a) * Lx^{-1}(b).
inline ToyAlgebra toy_isotope(const ToyAlgebra& alg, int x, int y, int* identity_out) {
  std::vector<int> lx(static_cast<size_t>(alg.q)), ry(static_cast<size_t>(alg.q));
  for (int a = 0; a < alg.q; ++a) {
    lx[static_cast<size_t>(alg.mul(x, a))] = a;  // Lx^{-1}
    ry[static_cast<size_t>(alg.mul(a, y))] = a;  // Ry^{-1}
  }
  ToyAlgebra out;
  out.p = alg.p;
  out.n = alg.n;
  out.q = alg.q;
  out.table.assign(alg.table.size(), 0);
  for (int a = 0; a < alg.q; ++a)
    for (int b = 0; b < alg.q; ++b)
      out.table[static_cast<size_t>(a) * static_cast<size_t>(alg.q) + static_cast<size_t>(b)] =
          alg.mul(ry[static_cast<size_t>(a)], lx[static_cast<size_t>(b)]);
  if (identity_out) *identity_out = alg.mul(x, y);
  return out;
}

// Complete isotopy invariant at order 8: the minimum over all principal
// isotopes of the isomorphism-canonical table form. Two semifields share a
// coordinatized plane iff some isotope of one is isomorphic to the other,
// and the minimal canonical form detects exactly that.
inline std::string toy_plane_key_order8(const ToyAlgebra& alg) {
  std::string best;
  for (int x = 1; x < alg.q; ++x)
    for (int y = 1; y < alg.q; ++y) {
      int id = 0;
      ToyAlgebra iso = toy_isotope(alg, x, y, &id);
      std::string s = toy_canonical_form(iso, id);
      if (best.empty() || s < best) best = s;
    }
  return best;
}

// Cheaper relabeling-invariant plane fingerprint for order 27: the multiset
// over principal isotopes of the multiset over elements of the cycle types
// of left and right multiplication permutations.
inline std::string toy_plane_key_cycletypes(const ToyAlgebra& alg) {
  std::set<std::string> iso_keys;
  for (int x = 1; x < alg.q; ++x)
    for (int y = 1; y < alg.q; ++y) {
      ToyAlgebra iso = toy_isotope(alg, x, y, nullptr);
      std::multiset<std::string> elems;
      for (int a = 1; a < alg.q; ++a) {
        auto cycle_type = [&](bool left) {
          std::vector<int> perm(static_cast<size_t>(alg.q));
          for (int b = 0; b < alg.q; ++b)
            perm[static_cast<size_t>(b)] = left ? iso.mul(a, b) : iso.mul(b, a);
          std::vector<char> seen(static_cast<size_t>(alg.q), 0);
          std::multiset<int> lens;
          for (int b = 0; b < alg.q; ++b) {
            if (seen[static_cast<size_t>(b)]) continue;
            int len = 0, cur = b;
            while (!seen[static_cast<size_t>(cur)]) {
              seen[static_cast<size_t>(cur)] = 1;
              cur = perm[static_cast<size_t>(cur)];
              ++len;
            }
            lens.insert(len);
          }
          std::string s;
          for (int l : lens) s += std::to_string(l) + ",";
          return s;
        };
        elems.insert(cycle_type(true) + "|" + cycle_type(false));
      }
      std::string key;
      for (const auto& e : elems) key += e + ";";
      iso_keys.insert(key);
    }
  std::string out;
  for (const auto& k : iso_keys) out += k + "\n";
  return out;
}

}  // namespace oracles
