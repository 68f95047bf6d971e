#pragma once

// Polynomials over GF(p) with small degree (products up to degree 15),
// companion matrices, division-free characteristic polynomials, and
// irreducibility by trial division against a precomputed table.

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "matrix.hpp"

namespace semiforge {

class Poly {
 public:
  static constexpr int kMaxCoeffs = 16;

  Poly() = default;
  explicit Poly(int p) : p_(static_cast<uint8_t>(p)) { require_prime(p); }

  // Little-endian coefficients: coeffs[i] multiplies x^i.
  static Poly from_coeffs(int p, const std::vector<int>& coeffs) {
    Poly f(p);
    if (coeffs.size() > kMaxCoeffs) throw std::invalid_argument("poly too large");
    for (size_t i = 0; i < coeffs.size(); ++i)
      f.c_[i] = gf_make(p, coeffs[i]);
    f.trim(static_cast<int>(coeffs.size()) - 1);
    return f;
  }

  static Poly zero(int p) { return Poly(p); }
  static Poly one(int p) { return from_coeffs(p, {1}); }
  static Poly x(int p) { return from_coeffs(p, {0, 1}); }

  int p() const { return p_; }
  int degree() const { return deg_; }  // -1 for the zero polynomial
  bool is_zero() const { return deg_ < 0; }
  bool is_monic() const { return deg_ >= 0 && c_[static_cast<size_t>(deg_)] == 1; }
  uint8_t coeff(int i) const {
    return (i >= 0 && i <= deg_) ? c_[static_cast<size_t>(i)] : 0;
  }
  uint8_t leading() const { return deg_ >= 0 ? c_[static_cast<size_t>(deg_)] : 0; }

  bool operator==(const Poly&) const = default;

  Poly operator+(const Poly& g) const {
    Poly r(p_);
    int d = deg_ > g.deg_ ? deg_ : g.deg_;
    for (int i = 0; i <= d; ++i) r.c_[static_cast<size_t>(i)] = gf_add(p_, coeff(i), g.coeff(i));
    r.trim(d);
    return r;
  }

  Poly operator-(const Poly& g) const {
    Poly r(p_);
    int d = deg_ > g.deg_ ? deg_ : g.deg_;
    for (int i = 0; i <= d; ++i) r.c_[static_cast<size_t>(i)] = gf_sub(p_, coeff(i), g.coeff(i));
    r.trim(d);
    return r;
  }

  Poly operator*(const Poly& g) const {
    Poly r(p_);
    if (is_zero() || g.is_zero()) return r;
    int d = deg_ + g.deg_;
    if (d >= kMaxCoeffs) throw std::invalid_argument("poly product degree overflow");
    std::array<int, kMaxCoeffs> acc{};
    for (int i = 0; i <= deg_; ++i) {
      if (!c_[static_cast<size_t>(i)]) continue;
      for (int j = 0; j <= g.deg_; ++j)
        acc[static_cast<size_t>(i + j)] += c_[static_cast<size_t>(i)] * g.c_[static_cast<size_t>(j)];
    }
    for (int i = 0; i <= d; ++i) r.c_[static_cast<size_t>(i)] = static_cast<uint8_t>(acc[static_cast<size_t>(i)] % p_);
    r.trim(d);
    return r;
  }

  Poly scaled(uint8_t s) const {
    Poly r(p_);
    for (int i = 0; i <= deg_; ++i) r.c_[static_cast<size_t>(i)] = gf_mul(p_, coeff(i), s);
    r.trim(deg_);
    return r;
  }

  // Multiply by x^k.
  Poly shifted(int k) const {
    Poly r(p_);
    if (is_zero()) return r;
    if (deg_ + k >= kMaxCoeffs) throw std::invalid_argument("poly shift overflow");
    for (int i = 0; i <= deg_; ++i) r.c_[static_cast<size_t>(i + k)] = c_[static_cast<size_t>(i)];
    r.trim(deg_ + k);
    return r;
  }

  std::pair<Poly, Poly> divmod(const Poly& g) const {
    if (g.is_zero()) throw std::domain_error("poly division by zero");
    Poly q(p_), r = *this;
    uint8_t linv = gf_inv(p_, g.leading());
    while (!r.is_zero() && r.deg_ >= g.deg_) {
      int k = r.deg_ - g.deg_;
      uint8_t f = gf_mul(p_, r.leading(), linv);
      q.c_[static_cast<size_t>(k)] = f;
      if (k > q.deg_) q.deg_ = k;
      r = r - g.scaled(f).shifted(k);
    }
    return {q, r};
  }

  bool divides(const Poly& f) const { return f.divmod(*this).second.is_zero(); }

  uint8_t eval(uint8_t x) const {
    uint8_t acc = 0;
    for (int i = deg_; i >= 0; --i) acc = gf_add(p_, gf_mul(p_, acc, x), c_[static_cast<size_t>(i)]);
    return acc;
  }

  bool has_root() const {
    for (int x = 0; x < p_; ++x)
      if (eval(static_cast<uint8_t>(x)) == 0) return true;
    return false;
  }

  // Dense integer code sum c_i p^i over i = 0..degree; distinct for monic
  // polynomials of equal degree, which is all the fingerprinting needs.
  uint64_t encode() const {
    uint64_t v = 0;
    for (int i = deg_; i >= 0; --i) v = v * p_ + c_[static_cast<size_t>(i)];
    return v;
  }

  std::string to_string() const {
    if (is_zero()) return "0";
    std::string s;
    for (int i = deg_; i >= 0; --i) {
      uint8_t a = c_[static_cast<size_t>(i)];
      if (!a) continue;
      if (!s.empty()) s += "+";
      if (i == 0 || a != 1) s += static_cast<char>('0' + a);
      if (i >= 1) s += "x";
      if (i >= 2) s += "^" + std::to_string(i);
    }
    return s;
  }

 private:
  void trim(int upper) {
    deg_ = upper;
    while (deg_ >= 0 && c_[static_cast<size_t>(deg_)] == 0) --deg_;
  }

  uint8_t p_ = 3;
  int deg_ = -1;
  std::array<uint8_t, kMaxCoeffs> c_{};
};

inline Poly poly_mul(const Poly& f, const Poly& g) { return f * g; }
inline uint8_t poly_eval(const Poly& f, uint8_t x) { return f.eval(x); }

// Companion matrix: ones on the subdiagonal, last column -f_{r-1}.
inline Mat companion(const Poly& f) {
  if (!f.is_monic()) throw std::invalid_argument("companion: polynomial must be monic");
  int n = f.degree();
  require_dim(n);
  Mat m(f.p(), n);
  for (int r = 0; r + 1 < n; ++r) m.set(r + 1, r, 1);
  for (int r = 0; r < n; ++r) m.set(r, n - 1, gf_neg(f.p(), f.coeff(r)));
  return m;
}

// det(xI - M) by cofactor expansion over the polynomial matrix; division-free,
// fine in characteristic p and cheap for n <= 6.
namespace detail {
inline Poly charpoly_minor(const Mat& m, int col, unsigned rowmask) {
  int n = m.n(), p = m.p();
  if (col == n) return Poly::one(p);
  Poly acc = Poly::zero(p);
  int pos = 0;
  for (int r = 0; r < n; ++r) {
    if (!(rowmask & (1u << r))) continue;
    uint8_t e0 = gf_neg(p, m.at(r, col));
    bool diag = (r == col);
    if (e0 || diag) {
      Poly sub = charpoly_minor(m, col + 1, rowmask & ~(1u << r));
      Poly term = sub.scaled(e0);
      if (diag) term = term + sub.shifted(1);
      if (pos & 1) term = term.scaled(gf_neg(p, 1));
      acc = acc + term;
    }
    ++pos;
  }
  return acc;
}
}  // namespace detail

inline Poly char_poly(const Mat& m) {
  return detail::charpoly_minor(m, 0, (1u << m.n()) - 1u);
}

// Monic irreducibles of the given degree, built once per (p, degree) by
// trial division against lower-degree tables. Supports degree <= 3, which
// covers trial divisors for degree-6 inputs.
inline const std::vector<Poly>& monic_irreducibles(int p, int deg) {
  require_prime(p);
  if (deg < 1 || deg > 3) throw std::invalid_argument("irreducible table: degree out of range");
  static std::map<std::pair<int, int>, std::vector<Poly>> cache = [] {
    std::map<std::pair<int, int>, std::vector<Poly>> t;
    for (int pp : {2, 3, 5}) {
      for (int d = 1; d <= 3; ++d) {
        std::vector<Poly> irr;
        std::vector<int> coeffs(static_cast<size_t>(d) + 1, 0);
        coeffs[static_cast<size_t>(d)] = 1;
        int total = 1;
        for (int i = 0; i < d; ++i) total *= pp;
        for (int v = 0; v < total; ++v) {
          int x = v;
          for (int i = 0; i < d; ++i) {
            coeffs[static_cast<size_t>(i)] = x % pp;
            x /= pp;
          }
          Poly f = Poly::from_coeffs(pp, coeffs);
          bool irreducible = true;
          for (int dd = 1; irreducible && dd <= d / 2; ++dd)
            for (const Poly& g : t[{pp, dd}])
              if (g.divides(f)) {
                irreducible = false;
                break;
              }
          if (irreducible) irr.push_back(f);
        }
        t[{pp, d}] = std::move(irr);
      }
    }
    return t;
  }();
  return cache.at({p, deg});
}

// Trial division; contract covers degree <= 5 (divisors of degree <= 2).
inline bool is_irreducible(const Poly& f) {
  int d = f.degree();
  if (d > 5) throw std::invalid_argument("is_irreducible: degree > 5 unsupported");
  if (d <= 0) return false;
  if (d == 1) return true;
  for (int dd = 1; dd <= d / 2; ++dd)
    for (const Poly& g : monic_irreducibles(f.p(), dd))
      if (g.divides(f)) return false;
  return true;
}

// Factor a monic polynomial of degree <= 6 into irreducible powers,
// factors sorted by (degree, coefficient code).
inline std::vector<std::pair<Poly, int>> factor_monic(const Poly& f) {
  if (!f.is_monic()) throw std::invalid_argument("factor_monic: polynomial must be monic");
  if (f.degree() > 6) throw std::invalid_argument("factor_monic: degree > 6 unsupported");
  std::vector<std::pair<Poly, int>> out;
  Poly rest = f;
  for (int d = 1; d <= 3 && rest.degree() > 0; ++d) {
    for (const Poly& g : monic_irreducibles(f.p(), d)) {
      int mult = 0;
      while (g.divides(rest)) {
        rest = rest.divmod(g).first;
        ++mult;
      }
      if (mult) out.emplace_back(g, mult);
    }
  }
  // No factor of degree <= 3 left: for degree <= 6 the remainder is irreducible.
  if (rest.degree() > 0) out.emplace_back(rest, 1);
  return out;
}

}  // namespace semiforge
