#pragma once

// The 3-cube representation of (pre)semifields, standard bases and their
// Prop.-1-style validation, the published integer codec for basis matrices,
// S3 axis transforms, isotopy application, and the Kaplansky construction
// turning a presemifield into a semifield standard basis.
//
// Conventions (0-based internally, 1-based in the maths):
//   cube[i][j][k] = coefficient of e_k in e_i * e_j,
//   basis matrix A_i = matrix of left multiplication by e_i,
//   so cube[i][j][k] = (A_i)_{k,j}.

#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "poly.hpp"

namespace semiforge {

using code_t = unsigned long long;

struct Cube {
  uint8_t p = 3;
  uint8_t n = 0;
  std::array<uint8_t, kMaxDim * kMaxDim * kMaxDim> a{};

  Cube() = default;
  Cube(int pp, int nn) : p(static_cast<uint8_t>(pp)), n(static_cast<uint8_t>(nn)) {
    require_prime(pp);
    require_dim(nn);
  }

  uint8_t at(int i, int j, int k) const {
    return a[static_cast<size_t>((i * kMaxDim + j) * kMaxDim + k)];
  }
  void set(int i, int j, int k, uint8_t v) {
    a[static_cast<size_t>((i * kMaxDim + j) * kMaxDim + k)] = v;
  }
  bool operator==(const Cube&) const = default;

  // Product of arbitrary coordinate vectors under the cube's bilinear map.
  Vec mul(const Vec& x, const Vec& y) const {
    Vec z = Vec::zero(n);
    for (int i = 0; i < n; ++i) {
      if (!x.c[static_cast<size_t>(i)]) continue;
      for (int j = 0; j < n; ++j) {
        uint8_t f = gf_mul(p, x.c[static_cast<size_t>(i)], y.c[static_cast<size_t>(j)]);
        if (!f) continue;
        for (int k = 0; k < n; ++k)
          z.c[static_cast<size_t>(k)] =
              gf_add(p, z.c[static_cast<size_t>(k)], gf_mul(p, f, at(i, j, k)));
      }
    }
    return z;
  }

  // Matrix of left multiplication by the element with coordinates v.
  Mat lmat(const Vec& v) const {
    Mat m(p, n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        int acc = 0;
        for (int i = 0; i < n; ++i) acc += v.c[static_cast<size_t>(i)] * at(i, j, k);
        m.set(k, j, static_cast<uint8_t>(acc % p));
      }
    return m;
  }

  // Matrix of right multiplication by v.
  Mat rmat(const Vec& v) const {
    Mat m(p, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        int acc = 0;
        for (int j = 0; j < n; ++j) acc += v.c[static_cast<size_t>(j)] * at(i, j, k);
        m.set(k, i, static_cast<uint8_t>(acc % p));
      }
    return m;
  }
};

struct StandardBasis {
  int p = 3;
  int n = 0;
  std::array<Mat, kMaxDim> A;  // A[0] is the identity

  StandardBasis() = default;
  StandardBasis(int pp, int nn) : p(pp), n(nn) {
    require_prime(pp);
    require_dim(nn);
    for (int i = 0; i < nn; ++i) A[static_cast<size_t>(i)] = Mat(pp, nn);
    A[0] = Mat::identity(pp, nn);
  }
  bool operator==(const StandardBasis&) const = default;
};

// ---- Integer codec ---------------------------------------------------------
//
// A basis matrix has first column e_pos; the remaining n(n-1) entries are
// base-p digits of a single natural number. Digit j sits at (row r, column c)
// with j = n*(n-c) + (n-r), 1-based, i.e. for p=3, n=5:
//
//     ( |  a19 a14 a9  a4 )
//     ( |  a18 a13 a8  a3 )
//     (e|  a17 a12 a7  a2 )
//     ( |  a16 a11 a6  a1 )
//     ( |  a15 a10 a5  a0 )

inline code_t code_space(int p, int n) {
  require_prime(p);
  require_dim(n);
  code_t v = 1;
  for (int i = 0; i < n * (n - 1); ++i) {
    if (v > ~code_t{0} / static_cast<code_t>(p))
      throw std::overflow_error("matrix code space exceeds 64 bits");
    v *= static_cast<code_t>(p);
  }
  return v;
}

inline Mat decode_matrix(code_t value, int position, int p, int n) {
  if (position < 1 || position > n)
    throw std::invalid_argument("decode_matrix: position out of range");
  if (value >= code_space(p, n))
    throw std::out_of_range("decode_matrix: code value out of range");
  std::array<uint8_t, kMaxDim * kMaxDim> dig{};
  for (int j = 0; j < n * (n - 1); ++j) {
    dig[static_cast<size_t>(j)] = static_cast<uint8_t>(value % static_cast<code_t>(p));
    value /= static_cast<code_t>(p);
  }
  Mat m(p, n);
  m.set(position - 1, 0, 1);
  for (int c = 2; c <= n; ++c)
    for (int r = 1; r <= n; ++r)
      m.set(r - 1, c - 1, dig[static_cast<size_t>(n * (n - c) + (n - r))]);
  return m;
}

inline code_t encode_matrix(const Mat& m, int position) {
  int n = m.n(), p = m.p();
  if (position < 1 || position > n)
    throw std::invalid_argument("encode_matrix: position out of range");
  for (int r = 0; r < n; ++r)
    if (m.at(r, 0) != (r == position - 1 ? 1 : 0))
      throw std::invalid_argument("encode_matrix: first column is not e_" +
                                  std::to_string(position));
  code_space(p, n);  // range check for (p, n)
  code_t value = 0;
  for (int j = n * (n - 1) - 1; j >= 0; --j) {
    int c = n - j / n;
    int r = n - j % n;
    value = value * static_cast<code_t>(p) + m.at(r - 1, c - 1);
  }
  return value;
}

// ---- Basis <-> cube --------------------------------------------------------

inline Cube cube_from_basis(const StandardBasis& s) {
  Cube c(s.p, s.n);
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j)
      for (int k = 0; k < s.n; ++k)
        c.set(i, j, k, s.A[static_cast<size_t>(i)].at(k, j));
  return c;
}

inline StandardBasis basis_from_cube(const Cube& c) {
  StandardBasis s(c.p, c.n);
  for (int i = 0; i < c.n; ++i) {
    Mat m(c.p, c.n);
    for (int j = 0; j < c.n; ++j)
      for (int k = 0; k < c.n; ++k) m.set(k, j, c.at(i, j, k));
    s.A[static_cast<size_t>(i)] = m;
  }
  return s;
}

// ---- Validation ------------------------------------------------------------

struct BasisViolation {
  enum class Kind { NotIdentity, FirstColumn, SingularCombination };
  Kind kind;
  int index = 0;                          // matrix index (1-based) for the first two kinds
  std::array<uint8_t, kMaxDim> lambda{};  // failing combination for the third

  std::string message() const {
    switch (kind) {
      case Kind::NotIdentity:
        return "A_1 is not the identity matrix";
      case Kind::FirstColumn:
        return "first column of A_" + std::to_string(index) + " is not e_" +
               std::to_string(index);
      default: {
        std::string s = "singular combination lambda=(";
        for (int i = 0; i < index; ++i) {
          if (i) s += ",";
          s += std::to_string(lambda[static_cast<size_t>(i)]);
        }
        return s + ")";
      }
    }
  }
};

// Enumerate first-nonzero-normalized projective tuples level by level; calls
// fn(lambda, k) for every representative whose last nonzero index is k.
// Returning false from fn aborts the walk.
template <class Fn>
inline bool for_each_projective(int p, int n, Fn&& fn) {
  std::array<uint8_t, kMaxDim> lam{};
  for (int k = 0; k < n; ++k) {
    // zero prefix, lambda_k = 1
    lam.fill(0);
    lam[static_cast<size_t>(k)] = 1;
    if (!fn(lam, k)) return false;
    // nonzero normalized prefixes over positions < k, lambda_k in 1..p-1
    int prefixes = 1;
    for (int i = 0; i < k; ++i) prefixes *= p;
    for (int v = 1; v < prefixes; ++v) {
      int x = v;
      lam.fill(0);
      for (int i = 0; i < k; ++i) {
        lam[static_cast<size_t>(i)] = static_cast<uint8_t>(x % p);
        x /= p;
      }
      int first = 0;
      while (!lam[static_cast<size_t>(first)]) ++first;
      if (lam[static_cast<size_t>(first)] != 1) continue;
      for (int lk = 1; lk < p; ++lk) {
        lam[static_cast<size_t>(k)] = static_cast<uint8_t>(lk);
        if (!fn(lam, k)) return false;
      }
    }
  }
  return true;
}

// Prop.-1 conditions: A_1 = I, first columns e_i, and every nonzero projective
// combination invertible ((p^n-1)/(p-1) determinants; scalar multiples of a
// combination are simultaneously singular).
inline std::optional<BasisViolation> validate_standard_basis(const StandardBasis& s) {
  if (s.A[0] != Mat::identity(s.p, s.n))
    return BasisViolation{BasisViolation::Kind::NotIdentity, 1, {}};
  for (int i = 1; i < s.n; ++i)
    for (int r = 0; r < s.n; ++r)
      if (s.A[static_cast<size_t>(i)].at(r, 0) != (r == i ? 1 : 0))
        return BasisViolation{BasisViolation::Kind::FirstColumn, i + 1, {}};
  std::optional<BasisViolation> bad;
  for_each_projective(s.p, s.n, [&](const std::array<uint8_t, kMaxDim>& lam, int k) {
    Mat sum(s.p, s.n);
    for (int i = 0; i <= k; ++i)
      sum.add_scaled(s.A[static_cast<size_t>(i)], lam[static_cast<size_t>(i)]);
    if (sum.det() == 0) {
      bad = BasisViolation{BasisViolation::Kind::SingularCombination, s.n, lam};
      return false;
    }
    return true;
  });
  return bad;
}

// ---- S3 transforms ---------------------------------------------------------

using S3 = std::array<uint8_t, 3>;  // sigma[k] = image of slot k

inline const std::array<S3, 6>& all_s3() {
  static const std::array<S3, 6> perms = {{{0, 1, 2},
                                           {1, 0, 2},
                                           {2, 1, 0},
                                           {0, 2, 1},
                                           {1, 2, 0},
                                           {2, 0, 1}}};
  return perms;
}

inline S3 s3_compose(const S3& s, const S3& t) {
  return {s[t[0]], s[t[1]], s[t[2]]};
}

inline std::string s3_name(const S3& s) {
  static const char* names[] = {"id", "(12)", "(13)", "(23)", "(123)", "(132)"};
  const auto& all = all_s3();
  for (size_t i = 0; i < all.size(); ++i)
    if (all[i] == s) return names[i];
  return "?";
}

// out[t] = in[(t[sigma[0]], t[sigma[1]], t[sigma[2]])], so transforms compose
// as T_sigma . T_tau = T_{sigma.tau}.
inline Cube sigma_transform(const Cube& c, const S3& sigma) {
  Cube out(c.p, c.n);
  int t[3];
  for (t[0] = 0; t[0] < c.n; ++t[0])
    for (t[1] = 0; t[1] < c.n; ++t[1])
      for (t[2] = 0; t[2] < c.n; ++t[2])
        out.set(t[0], t[1], t[2], c.at(t[sigma[0]], t[sigma[1]], t[sigma[2]]));
  return out;
}

// ---- Presemifield test -----------------------------------------------------

inline bool is_presemifield(const Cube& c) {
  bool ok = for_each_projective(c.p, c.n, [&](const std::array<uint8_t, kMaxDim>& lam, int) {
    Vec v = Vec::zero(c.n);
    for (int i = 0; i < c.n; ++i) v.c[static_cast<size_t>(i)] = lam[static_cast<size_t>(i)];
    return c.lmat(v).det() != 0;
  });
  return ok;
}

// ---- Isotopy ---------------------------------------------------------------

struct Isotopy {
  Mat F, G, H;

  static Isotopy make(const Mat& f, const Mat& g, const Mat& h) {
    if (!f.invertible() || !g.invertible() || !h.invertible()) throw SingularError();
    return Isotopy{f, g, h};
  }
  static Isotopy identity(int p, int n) {
    Mat i = Mat::identity(p, n);
    return Isotopy{i, i, i};
  }
  Isotopy inverse() const { return Isotopy{F.inverse(), G.inverse(), H.inverse()}; }
  bool operator==(const Isotopy&) const = default;
};

// Apply-after composition: (a . b) applies b first.
inline Isotopy compose(const Isotopy& a, const Isotopy& b) {
  return Isotopy{a.F * b.F, a.G * b.G, a.H * b.H};
}

// Cube of the isotoped algebra a o b = H(F^{-1}(a) * G^{-1}(b)).
inline Cube apply_isotopy(const Cube& c, const Isotopy& t) {
  Mat finv = t.F.inverse();
  Mat ginv = t.G.inverse();
  Cube out(c.p, c.n);
  for (int i = 0; i < c.n; ++i) {
    Vec u = finv.column(i);
    for (int j = 0; j < c.n; ++j) {
      Vec v = ginv.column(j);
      Vec w = t.H.apply(c.mul(u, v));
      for (int k = 0; k < c.n; ++k) out.set(i, j, k, w.c[static_cast<size_t>(k)]);
    }
  }
  return out;
}

// ---- Kaplansky semifieldization -------------------------------------------

struct SemifieldizeResult {
  StandardBasis basis;
  Isotopy witness;  // isotopy from the input cube to cube_from_basis(basis)
};

namespace detail {
// Change of basis sending u to the first basis vector, completed with
// canonical vectors in index order. Returns P with columns = new basis.
inline Mat rebase_matrix(int p, int n, const Vec& u) {
  Mat pmat(p, n);
  std::array<Vec, kMaxDim> cols;
  int count = 0;
  cols[static_cast<size_t>(count++)] = u;
  for (int j = 0; j < n && count < n; ++j) {
    cols[static_cast<size_t>(count)] = Vec::unit(n, j);
    Mat test(p, n);
    for (int i = 0; i <= count; ++i)
      for (int r = 0; r < n; ++r) test.set(r, i, cols[static_cast<size_t>(i)].c[static_cast<size_t>(r)]);
    if (test.rank() == count + 1) ++count;
  }
  if (count != n) throw std::logic_error("rebase: could not complete basis");
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < n; ++r) pmat.set(r, i, cols[static_cast<size_t>(i)].c[static_cast<size_t>(r)]);
  return pmat;
}
}  // namespace detail

// Kaplansky construction: with unit e (the nonzero element of smallest index,
// i.e. e_1), define x o y = R_e^{-1}(x) * L_e^{-1}(y); the identity is e*e,
// and a final change of basis moves it to the first basis vector.
inline SemifieldizeResult semifieldize(const Cube& c) {
  if (!is_presemifield(c)) throw std::invalid_argument("semifieldize: not a presemifield");
  int p = c.p, n = c.n;
  Vec e = Vec::unit(n, 0);
  Mat le = c.lmat(e), re = c.rmat(e);
  Vec u = c.mul(e, e);
  Mat pmat = detail::rebase_matrix(p, n, u);
  Mat pinv = pmat.inverse();
  Isotopy w{pinv * re, pinv * le, pinv};

  Cube out = apply_isotopy(c, w);
  StandardBasis basis = basis_from_cube(out);
  return SemifieldizeResult{basis, w};
}

// ---- Record format ---------------------------------------------------------
//
// One basis per line: "p n enc(A_2) enc(A_3) ... enc(A_n)", A_1 implicit.

struct FormatError : std::runtime_error {
  int line;
  explicit FormatError(int line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

inline std::string format_basis_line(const StandardBasis& s) {
  std::string out = std::to_string(s.p) + " " + std::to_string(s.n);
  for (int i = 1; i < s.n; ++i)
    out += " " + std::to_string(encode_matrix(s.A[static_cast<size_t>(i)], i + 1));
  return out;
}

inline StandardBasis parse_basis_line(const std::string& line, int lineno = 0) {
  std::istringstream in(line);
  int p = 0, n = 0;
  if (!(in >> p >> n)) throw FormatError(lineno, "expected `p n` prefix");
  if (!supported_prime(p)) throw FormatError(lineno, "unsupported prime");
  if (n < 2 || n > kMaxDim) throw FormatError(lineno, "dimension out of range");
  StandardBasis s(p, n);
  for (int i = 1; i < n; ++i) {
    code_t v = 0;
    if (!(in >> v)) throw FormatError(lineno, "expected " + std::to_string(n - 1) + " matrix codes");
    try {
      s.A[static_cast<size_t>(i)] = decode_matrix(v, i + 1, p, n);
    } catch (const std::out_of_range&) {
      throw FormatError(lineno, "matrix code out of range: " + std::to_string(v));
    }
  }
  std::string extra;
  if (in >> extra) throw FormatError(lineno, "trailing tokens after basis codes");
  return s;
}

inline std::vector<code_t> basis_codes(const StandardBasis& s) {
  std::vector<code_t> v;
  for (int i = 1; i < s.n; ++i)
    v.push_back(encode_matrix(s.A[static_cast<size_t>(i)], i + 1));
  return v;
}

}  // namespace semiforge
