#pragma once

// Semifield structure queries on a validated cube: multiplication with eager
// left/right multiplication caches, nuclei and center orders, principal
// isotopes (renormalized to identity at e_1), and generator search.
//
// Elements are integer indices 0..p^n-1 encoding coordinates base p; the
// identity is always index 1 (= e_1) after normalization.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cube.hpp"

namespace semiforge {

struct NucleiProfile {
  int z = 0, nu = 0, nl = 0, nm = 0, nr = 0;  // |Z|, |N|, |N_l|, |N_m|, |N_r|
  bool operator==(const NucleiProfile&) const = default;

  std::string to_string() const {
    return "(" + std::to_string(z) + "," + std::to_string(nu) + "," + std::to_string(nl) +
           "," + std::to_string(nm) + "," + std::to_string(nr) + ")";
  }
};

// A spanning construction from a small generating set: elems[0] is the
// identity, then the generators, then one element per step, where
// elems[m] = elems[step.a] * elems[step.b]. The n elements are linearly
// independent, so an isomorphism is pinned down by the generator images.
struct Generators {
  std::vector<int> gens;
  struct Step {
    int a, b;
  };
  std::vector<int> elems;
  std::vector<Step> steps;
};

namespace detail {
// Echelon span tracker over GF(p) coordinate vectors.
class SpanTracker {
 public:
  SpanTracker(int p, int n) : p_(p), n_(n) {}
  int size() const { return static_cast<int>(rows_.size()); }

  bool add(const Vec& v) {
    Vec red = v;
    for (const Vec& b : rows_) {
      int lead = lead_of(b);
      uint8_t f = red.c[static_cast<size_t>(lead)];
      if (f) {
        uint8_t scale = gf_mul(p_, f, gf_inv(p_, b.c[static_cast<size_t>(lead)]));
        for (int i = 0; i < n_; ++i)
          red.c[static_cast<size_t>(i)] =
              gf_sub(p_, red.c[static_cast<size_t>(i)], gf_mul(p_, scale, b.c[static_cast<size_t>(i)]));
      }
    }
    if (red.is_zero()) return false;
    rows_.push_back(red);
    for (size_t i = rows_.size(); i-- > 1;)
      if (lead_of(rows_[i]) < lead_of(rows_[i - 1]))
        std::swap(rows_[i], rows_[i - 1]);
      else
        break;
    return true;
  }

 private:
  int lead_of(const Vec& v) const {
    int l = 0;
    while (l < n_ && !v.c[static_cast<size_t>(l)]) ++l;
    return l;
  }
  int p_, n_;
  std::vector<Vec> rows_;
};
}  // namespace detail

// Extends seed elements to a spanning construction, or nullopt if the closure
// of {1, seeds...} under the product does not span. Products of constructed
// elements are tried in deterministic order.
template <class Alg>
std::optional<Generators> algebra_close(const Alg& alg, const std::vector<int>& seeds) {
  int p = alg.p(), n = alg.n();
  Generators out;
  out.gens = seeds;
  detail::SpanTracker span(p, n);
  span.add(index_to_vec(p, n, alg.identity()));
  out.elems.push_back(alg.identity());
  for (int g : seeds) {
    if (!span.add(index_to_vec(p, n, g))) return std::nullopt;
    out.elems.push_back(g);
  }
  bool grew = true;
  while (static_cast<int>(out.elems.size()) < n && grew) {
    grew = false;
    int m = static_cast<int>(out.elems.size());
    for (int i = 0; i < m && static_cast<int>(out.elems.size()) < n; ++i)
      for (int j = 0; j < m && static_cast<int>(out.elems.size()) < n; ++j) {
        int prod = alg.mul(out.elems[static_cast<size_t>(i)], out.elems[static_cast<size_t>(j)]);
        if (span.add(index_to_vec(p, n, prod))) {
          out.elems.push_back(prod);
          out.steps.push_back({i, j});
          grew = true;
        }
      }
  }
  if (static_cast<int>(out.elems.size()) < n) return std::nullopt;
  return out;
}

// Greedy: try each single element first, then pairs.
template <class Alg>
Generators algebra_generators(const Alg& alg) {
  for (int g = 2; g < alg.q(); ++g)
    if (auto r = algebra_close(alg, {g})) return *r;
  for (int g1 = 2; g1 < alg.q(); ++g1)
    for (int g2 = g1 + 1; g2 < alg.q(); ++g2)
      if (auto r = algebra_close(alg, {g1, g2})) return *r;
  throw std::logic_error("algebra has no generating set of size <= 2");
}

class Semifield {
 public:
  static Semifield from_basis(const StandardBasis& s, bool validate = true) {
    if (validate) {
      if (auto v = validate_standard_basis(s))
        throw std::invalid_argument("invalid standard basis: " + v->message());
    }
    return Semifield(cube_from_basis(s), s);
  }

  static Semifield from_cube(const Cube& c, bool validate = true) {
    StandardBasis s = basis_from_cube(c);
    return from_basis(s, validate);
  }

  int p() const { return p_; }
  int n() const { return n_; }
  int q() const { return q_; }  // number of elements, p^n
  int identity() const { return 1; }
  const Cube& cube() const { return cube_; }
  const StandardBasis& basis() const { return basis_; }
  const Mat& lmat(int a) const { return l_[static_cast<size_t>(a)]; }
  const Mat& rmat(int a) const { return r_[static_cast<size_t>(a)]; }
  const Vec& vec_of(int a) const { return vecs_[static_cast<size_t>(a)]; }
  int unit_index(int i) const { return units_[static_cast<size_t>(i)]; }

  int mul(int a, int b) const {
    if (!mul_.empty())
      return mul_[static_cast<size_t>(a) * static_cast<size_t>(q_) + static_cast<size_t>(b)];
    return vec_to_index(p_, l_[static_cast<size_t>(a)].apply(vecs_[static_cast<size_t>(b)]));
  }

  bool is_commutative() const {
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (mul(unit_index(i), unit_index(j)) != mul(unit_index(j), unit_index(i))) return false;
    return true;
  }

  bool is_associative() const {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) {
          int a = unit_index(i), b = unit_index(j), c = unit_index(k);
          if (mul(mul(a, b), c) != mul(a, mul(b, c))) return false;
        }
    return true;
  }

  // Exhaustive scan over all q elements with early exit per element. The
  // nucleus conditions are bilinear in the two free slots, so checking them
  // on basis pairs is exact.
  NucleiProfile nuclei() const {
    NucleiProfile prof;
    for (int a = 0; a < q_; ++a) {
      bool nl = true, nm = true, nr = true;
      for (int i = 0; i < n_ && nl; ++i)
        for (int j = 0; j < n_ && nl; ++j) {
          int x = unit_index(i), y = unit_index(j);
          nl = mul(mul(a, x), y) == mul(a, mul(x, y));
        }
      for (int i = 0; i < n_ && nm; ++i)
        for (int j = 0; j < n_ && nm; ++j) {
          int x = unit_index(i), y = unit_index(j);
          nm = mul(mul(x, a), y) == mul(x, mul(a, y));
        }
      for (int i = 0; i < n_ && nr; ++i)
        for (int j = 0; j < n_ && nr; ++j) {
          int x = unit_index(i), y = unit_index(j);
          nr = mul(mul(x, y), a) == mul(x, mul(y, a));
        }
      prof.nl += nl;
      prof.nm += nm;
      prof.nr += nr;
      if (nl && nm && nr) {
        ++prof.nu;
        bool central = true;
        for (int i = 0; i < n_ && central; ++i)
          central = mul(a, unit_index(i)) == mul(unit_index(i), a);
        prof.z += central;
      }
    }
    return prof;
  }

  // Principal isotope D_{x,y}: a o b = R_y^{-1}(a) * L_x^{-1}(b), identity
  // x*y, renormalized so the identity is e_1.
  StandardBasis principal_isotope_basis(int x, int y) const {
    if (x == 0 || y == 0)
      throw std::invalid_argument("principal_isotope: arguments must be nonzero");
    Vec u = vecs_[static_cast<size_t>(mul(x, y))];
    Mat pmat = detail::rebase_matrix(p_, n_, u);
    Mat pinv = pmat.inverse();
    Isotopy w{pinv * r_[static_cast<size_t>(y)], pinv * l_[static_cast<size_t>(x)], pinv};
    return basis_from_cube(apply_isotopy(cube_, w));
  }

  Semifield principal_isotope(int x, int y) const {
    return from_basis(principal_isotope_basis(x, y), false);
  }

  Generators generators() const { return algebra_generators(*this); }

 private:
  Semifield(const Cube& c, const StandardBasis& s) : p_(c.p), n_(c.n), cube_(c), basis_(s) {
    q_ = 1;
    for (int i = 0; i < n_; ++i) q_ *= p_;
    vecs_.resize(static_cast<size_t>(q_));
    for (int a = 0; a < q_; ++a) vecs_[static_cast<size_t>(a)] = index_to_vec(p_, n_, a);
    l_.resize(static_cast<size_t>(q_));
    r_.resize(static_cast<size_t>(q_));
    for (int a = 0; a < q_; ++a) {
      l_[static_cast<size_t>(a)] = cube_.lmat(vecs_[static_cast<size_t>(a)]);
      r_[static_cast<size_t>(a)] = cube_.rmat(vecs_[static_cast<size_t>(a)]);
    }
    for (int i = 0; i < n_; ++i) {
      int u = 1;
      for (int k = 0; k < i; ++k) u *= p_;
      units_.push_back(u);
    }
    if (q_ <= 1024) {
      mul_.resize(static_cast<size_t>(q_) * static_cast<size_t>(q_));
      for (int a = 0; a < q_; ++a)
        for (int b = 0; b < q_; ++b)
          mul_[static_cast<size_t>(a) * static_cast<size_t>(q_) + static_cast<size_t>(b)] =
              static_cast<uint16_t>(
                  vec_to_index(p_, l_[static_cast<size_t>(a)].apply(vecs_[static_cast<size_t>(b)])));
    }
  }

  int p_, n_, q_ = 0;
  Cube cube_;
  StandardBasis basis_;
  std::vector<Vec> vecs_;
  std::vector<Mat> l_, r_;
  std::vector<uint16_t> mul_;
  std::vector<int> units_;
};

inline int multiply(const Semifield& d, int a, int b) { return d.mul(a, b); }

}  // namespace semiforge
