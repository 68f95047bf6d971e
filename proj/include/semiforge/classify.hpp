#pragma once

// Equivalence machinery: isomorphism search, autotopism group and |At|,
// fundamental-triangle orbits, the principal-isotope census, isotopy testing
// (Albert scan over principal isotopes), S3 orbits, and collection-level
// classification into plane records.
//
// The census partitions all (q-1)^2 principal isotopes D_{x,y} into
// isomorphism classes. Pairs are pre-bucketed by cheap isomorphism
// invariants -- commutativity plus the multisets of characteristic
// polynomials of left and right multiplications (the left multiset depends
// only on x, the right one only on y, so both are precomputed per
// coordinate) -- and exact confirmation by isomorphism search always
// follows. Processing order is lexicographic in (x, y), representatives are
// the lexicographically smallest member pair, and the chunked parallel merge
// is order-independent, so results are identical for any thread count.

#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "parallel.hpp"
#include "semifield.hpp"

namespace semiforge {

// ---- Exact rationals (census S/A sums) -------------------------------------

struct Fraction {
  long long num = 0, den = 1;

  static Fraction of(long long n, long long d = 1) {
    Fraction f{n, d};
    f.reduce();
    return f;
  }
  void reduce() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  Fraction operator+(const Fraction& o) const { return of(num * o.den + o.num * den, den * o.den); }
  bool operator==(const Fraction&) const = default;
  std::string to_string() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }
};

// ---- Isomorphism search -----------------------------------------------------

namespace detail {

inline uint64_t multiset_hash_from(std::vector<uint32_t> v, size_t first) {
  std::sort(v.begin() + static_cast<long>(first), v.end());
  uint64_t h = 0xcbf29ce484222325ull;
  for (size_t i = first; i < v.size(); ++i) {
    h ^= v[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

template <class Alg>
std::vector<uint32_t> left_charpolys(const Alg& alg) {
  int n = alg.n(), p = alg.p(), q = alg.q();
  std::vector<uint32_t> out(static_cast<size_t>(q), 0);
  for (int a = 1; a < q; ++a) {
    Mat m(p, n);
    int unit = 1;
    for (int j = 0; j < n; ++j, unit *= p) {
      Vec col = index_to_vec(p, n, alg.mul(a, unit));
      for (int k = 0; k < n; ++k) m.set(k, j, col.c[static_cast<size_t>(k)]);
    }
    out[static_cast<size_t>(a)] = static_cast<uint32_t>(char_poly(m).encode());
  }
  return out;
}

template <class Alg>
std::vector<uint32_t> right_charpolys(const Alg& alg) {
  int n = alg.n(), p = alg.p(), q = alg.q();
  std::vector<uint32_t> out(static_cast<size_t>(q), 0);
  for (int a = 1; a < q; ++a) {
    Mat m(p, n);
    int unit = 1;
    for (int j = 0; j < n; ++j, unit *= p) {
      Vec col = index_to_vec(p, n, alg.mul(unit, a));
      for (int k = 0; k < n; ++k) m.set(k, j, col.c[static_cast<size_t>(k)]);
    }
    out[static_cast<size_t>(a)] = static_cast<uint32_t>(char_poly(m).encode());
  }
  return out;
}

template <class Alg>
Mat basis_matrix(const Alg& alg, const std::vector<int>& elems) {
  int n = alg.n(), p = alg.p();
  Mat b(p, n);
  for (int i = 0; i < n; ++i) {
    Vec v = index_to_vec(p, n, elems[static_cast<size_t>(i)]);
    for (int r = 0; r < n; ++r) b.set(r, i, v.c[static_cast<size_t>(r)]);
  }
  return b;
}

// Enumerates linear bijections phi with phi(a *_from b) = phi(a) *_to phi(b).
// Candidates for generator images are filtered by the characteristic
// polynomial of their left multiplication (a conjugation invariant), each
// assignment is extended through the construction steps, and the resulting
// linear map is verified on all basis pairs. Emit returns false to stop.
template <class From, class To, class CharOf, class Emit>
void for_each_isomorphism(const From& from, const Generators& gen,
                          const std::vector<uint32_t>& gen_targets, const To& to,
                          CharOf&& char_of, Emit&& emit) {
  int n = from.n(), p = from.p(), q = from.q();
  Mat binv = basis_matrix(from, gen.elems).inverse();
  size_t ngens = gen.gens.size();

  std::vector<int> images(static_cast<size_t>(n));
  images[0] = to.identity();

  std::vector<int> unit_from(static_cast<size_t>(n));
  for (int i = 0, u = 1; i < n; ++i, u *= p) unit_from[static_cast<size_t>(i)] = u;

  auto try_assignment = [&]() -> bool {  // false = stop everything
    for (size_t s = 0; s < gen.steps.size(); ++s) {
      const auto& st = gen.steps[s];
      images[ngens + 1 + s] =
          to.mul(images[static_cast<size_t>(st.a)], images[static_cast<size_t>(st.b)]);
    }
    Mat w = basis_matrix(to, images);
    if (w.rank() != n) return true;
    Mat phi = w * binv;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        int a = unit_from[static_cast<size_t>(i)], b = unit_from[static_cast<size_t>(j)];
        if (apply_to_index(phi, from.mul(a, b)) !=
            to.mul(apply_to_index(phi, a), apply_to_index(phi, b)))
          return true;
      }
    return emit(phi);
  };

  if (ngens == 1) {
    for (int a = 1; a < q; ++a) {
      if (char_of(a) != gen_targets[0]) continue;
      images[1] = a;
      if (!try_assignment()) return;
    }
  } else if (ngens == 2) {
    for (int a1 = 1; a1 < q; ++a1) {
      if (char_of(a1) != gen_targets[0]) continue;
      images[1] = a1;
      for (int a2 = 1; a2 < q; ++a2) {
        if (a2 == a1 || char_of(a2) != gen_targets[1]) continue;
        images[2] = a2;
        if (!try_assignment()) return;
      }
    }
  } else {
    throw std::logic_error("isomorphism search supports at most 2 generators");
  }
}

template <class Alg>
std::vector<uint32_t> generator_targets(const Alg& alg, const Generators& gen) {
  int n = alg.n(), p = alg.p();
  std::vector<uint32_t> t;
  for (int g : gen.gens) {
    Mat m(p, n);
    int unit = 1;
    for (int j = 0; j < n; ++j, unit *= p) {
      Vec col = index_to_vec(p, n, alg.mul(g, unit));
      for (int k = 0; k < n; ++k) m.set(k, j, col.c[static_cast<size_t>(k)]);
    }
    t.push_back(static_cast<uint32_t>(char_poly(m).encode()));
  }
  return t;
}

}  // namespace detail

// All linear bijections phi with phi(a*b) = phi(a).phi(b); phi(1) = 1 holds
// by construction. Empty result = not isomorphic.
inline std::vector<Mat> isomorphisms(const Semifield& d1, const Semifield& d2) {
  std::vector<Mat> out;
  if (d1.p() != d2.p() || d1.n() != d2.n()) return out;
  Generators gen = d1.generators();
  auto targets = detail::generator_targets(d1, gen);
  auto charl = detail::left_charpolys(d2);
  detail::for_each_isomorphism(d1, gen, targets, d2,
                               [&](int a) { return charl[static_cast<size_t>(a)]; },
                               [&](const Mat& phi) {
                                 out.push_back(phi);
                                 return true;
                               });
  return out;
}

inline bool is_isomorphic(const Semifield& d1, const Semifield& d2) {
  if (d1.p() != d2.p() || d1.n() != d2.n()) return false;
  Generators gen = d1.generators();
  auto targets = detail::generator_targets(d1, gen);
  auto charl = detail::left_charpolys(d2);
  bool found = false;
  detail::for_each_isomorphism(d1, gen, targets, d2,
                               [&](int a) { return charl[static_cast<size_t>(a)]; },
                               [&](const Mat&) {
                                 found = true;
                                 return false;
                               });
  return found;
}

inline uint64_t aut_order(const Semifield& d) {
  return static_cast<uint64_t>(isomorphisms(d, d).size());
}

// ---- Autotopism group, census, orbits ---------------------------------------

struct AutotopismGroup {
  uint64_t order = 0;
  std::vector<Isotopy> elements;  // empty if not materialized (cap exceeded)
  bool materialized = false;
};

struct Census {
  std::vector<std::pair<uint64_t, uint64_t>> classes;  // (autOrder, classCount), autOrder asc
  Fraction sa_sum;

  std::string to_string() const {  // Table-3 S/A notation, e.g. "24/1+1/5"
    std::string s;
    for (const auto& [aut, cnt] : classes) {
      if (!s.empty()) s += "+";
      s += std::to_string(cnt) + "/" + std::to_string(aut);
    }
    return s;
  }
};

struct TriangleOrbits {
  // (cycles, length) pairs per side, sorted by length; q+1 points per side.
  std::vector<std::pair<uint64_t, uint64_t>> lx, linf, ly;

  static std::string side_string(const std::vector<std::pair<uint64_t, uint64_t>>& side) {
    std::string s;
    for (const auto& [cycles, len] : side) {
      if (!s.empty()) s += "+";
      s += std::to_string(cycles) + "[" + std::to_string(len) + "]";
    }
    return s;
  }
  bool operator==(const TriangleOrbits&) const = default;
};

// Per-algebra classification engine with the precomputed pair tables.
// Holds its own copy of the algebra, so it stays valid independently of the
// caller's storage.
class Analyzer {
 public:
  explicit Analyzer(const Semifield& d, int threads = 0)
      : d_(d), threads_(resolve_threads(threads)) {
    if (d.q() > 1024)
      throw std::invalid_argument("classification supports p^n <= 1024");
    q_ = d.q();
    precompute();
  }

  const Semifield& algebra() const { return d_; }

  uint64_t hash_l(int x) const { return hash_l_[static_cast<size_t>(x)]; }
  uint64_t hash_r(int y) const { return hash_r_[static_cast<size_t>(y)]; }

  // Lightweight unnormalized view of the principal isotope D_{x,y}.
  struct View {
    const Analyzer* an;
    int x, y;
    int p() const { return an->d_.p(); }
    int n() const { return an->d_.n(); }
    int q() const { return an->q_; }
    int identity() const { return an->d_.mul(x, y); }
    int mul(int a, int b) const {
      return an->d_.mul(an->ry_inv(y)[static_cast<size_t>(a)],
                        an->lx_inv(x)[static_cast<size_t>(b)]);
    }
    uint32_t char_of(int a) const {  // enc char poly of left multiplication by a
      return an->char_l_[static_cast<size_t>(x)][an->ry_inv(y)[static_cast<size_t>(a)]];
    }
    bool commutative() const {
      for (int i = 0; i < n(); ++i)
        for (int j = i + 1; j < n(); ++j) {
          int a = an->d_.unit_index(i), b = an->d_.unit_index(j);
          if (mul(a, b) != mul(b, a)) return false;
        }
      return true;
    }
  };

  View view(int x, int y) const { return View{this, x, y}; }

  struct PairClass {
    std::pair<int, int> min_pair;
    uint64_t key_l, key_r;
    bool comm;
    uint64_t pair_count = 0;
    uint64_t aut = 0;  // filled at the end
  };

  struct Classification {
    std::vector<PairClass> classes;          // sorted by min_pair
    std::vector<std::pair<int, int>> d_pairs;  // pairs isomorphic to D itself
    uint64_t at_order = 0;
  };

  const Classification& classification() {
    if (!cls_) cls_ = run_classification();
    return *cls_;
  }

  uint64_t at_order() {
    if (!at_) at_ = run_at_order();
    return *at_;
  }

  Census census() {
    const Classification& c = classification();
    std::map<uint64_t, uint64_t> agg;
    Census out;
    out.sa_sum = Fraction::of(0);
    for (const auto& cl : c.classes) {
      ++agg[cl.aut];
      out.sa_sum = out.sa_sum + Fraction::of(1, static_cast<long long>(cl.aut));
    }
    for (const auto& [aut, cnt] : agg) out.classes.emplace_back(aut, cnt);
    return out;
  }

  AutotopismGroup autotopism_group(uint64_t cap = 1'000'000) {
    AutotopismGroup g;
    g.order = at_order();
    if (g.order > cap) return g;
    const auto& pairs = at_ ? at_pairs_ : classification().d_pairs;
    Generators gen = d_.generators();
    auto targets = detail::generator_targets(d_, gen);
    int n = d_.n();
    for (const auto& [x, y] : pairs) {
      View v = view(x, y);
      Mat ryinv_m = d_.rmat(y).inverse();
      Mat lxinv_m = d_.lmat(x).inverse();
      detail::for_each_isomorphism(d_, gen, targets, v,
                                   [&](int a) { return v.char_of(a); },
                                   [&](const Mat& phi) {
                                     g.elements.push_back(
                                         Isotopy{ryinv_m * phi, lxinv_m * phi, phi});
                                     return true;
                                   });
    }
    if (g.elements.size() != g.order)
      throw std::logic_error("autotopism count mismatch");
    // Every emitted triple satisfies H(a*b) = F(a)*G(b) on all basis pairs.
    for (const Isotopy& t : g.elements)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          int a = d_.unit_index(i), b = d_.unit_index(j);
          if (apply_to_index(t.H, d_.mul(a, b)) !=
              d_.mul(apply_to_index(t.F, a), apply_to_index(t.G, b)))
            throw std::logic_error("autotopism verification failed");
        }
    g.materialized = true;
    return g;
  }

  // Orbits of the component actions on q+1 points per side: G on side L_x,
  // H on side L_y, F on the slopes side L_infty; the extra vertex point is
  // always fixed. Union-find over the (deduplicated) group elements.
  TriangleOrbits triangle_orbits(const AutotopismGroup& g) {
    if (!g.materialized)
      throw std::invalid_argument("triangle_orbits: group not materialized");
    TriangleOrbits out;
    out.lx = side_orbits(g, [](const Isotopy& t) -> const Mat& { return t.G; });
    out.linf = side_orbits(g, [](const Isotopy& t) -> const Mat& { return t.F; });
    out.ly = side_orbits(g, [](const Isotopy& t) -> const Mat& { return t.H; });
    return out;
  }

 private:
  struct Key {
    uint64_t l, r;
    bool comm;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const {
      uint64_t h = k.l * 0x9e3779b97f4a7c15ull ^ (k.r + 0x517cc1b727220a95ull) ^
                   (k.comm ? 0xff51afd7ed558ccdull : 0);
      h ^= h >> 33;
      return static_cast<size_t>(h);
    }
  };

  struct LocalClass {
    std::pair<int, int> min_pair;
    Key key;
    uint64_t count = 0;
    Generators gen;                     // on the view of gen_pair
    std::vector<uint32_t> gen_targets;  // char-poly targets for the generators
    std::pair<int, int> gen_pair;
    std::vector<std::pair<int, int>> d_pairs;  // members when key == key of D
  };

  struct Partial {
    std::vector<LocalClass> classes;
    std::unordered_map<Key, std::vector<size_t>, KeyHash> buckets;
  };

  const std::vector<uint16_t>& lx_inv(int x) const { return lx_inv_[static_cast<size_t>(x)]; }
  const std::vector<uint16_t>& ry_inv(int y) const { return ry_inv_[static_cast<size_t>(y)]; }

  void precompute() {
    int p = d_.p(), n = d_.n();
    lx_inv_.resize(static_cast<size_t>(q_));
    ry_inv_.resize(static_cast<size_t>(q_));
    char_l_.resize(static_cast<size_t>(q_));
    char_r_.resize(static_cast<size_t>(q_));
    hash_l_.assign(static_cast<size_t>(q_), 0);
    hash_r_.assign(static_cast<size_t>(q_), 0);
    run_chunked(q_ - 1, threads_, [&](int, int beg, int end) {
      for (int i = beg; i < end; ++i) {
        int x = i + 1;
        auto& lx = lx_inv_[static_cast<size_t>(x)];
        auto& ry = ry_inv_[static_cast<size_t>(x)];
        lx.resize(static_cast<size_t>(q_));
        ry.resize(static_cast<size_t>(q_));
        Mat lm = d_.lmat(x).inverse();
        Mat rm = d_.rmat(x).inverse();
        for (int a = 0; a < q_; ++a) {
          lx[static_cast<size_t>(a)] = static_cast<uint16_t>(apply_to_index(lm, a));
          ry[static_cast<size_t>(a)] = static_cast<uint16_t>(apply_to_index(rm, a));
        }
        // char polys of L_c . Lx^{-1} (left mults of D_{x,*}) and of
        // R_d . Ry^{-1} (right mults of D_{*,y}), indexed by c resp. d.
        auto& cl = char_l_[static_cast<size_t>(x)];
        auto& cr = char_r_[static_cast<size_t>(x)];
        cl.assign(static_cast<size_t>(q_), 0);
        cr.assign(static_cast<size_t>(q_), 0);
        std::vector<int> lx_units(static_cast<size_t>(n)), ry_units(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) {
          lx_units[static_cast<size_t>(j)] = lx[static_cast<size_t>(d_.unit_index(j))];
          ry_units[static_cast<size_t>(j)] = ry[static_cast<size_t>(d_.unit_index(j))];
        }
        for (int c = 1; c < q_; ++c) {
          Mat m(p, n), m2(p, n);
          for (int j = 0; j < n; ++j) {
            Vec col = d_.vec_of(d_.mul(c, lx_units[static_cast<size_t>(j)]));
            Vec col2 = d_.vec_of(d_.mul(ry_units[static_cast<size_t>(j)], c));
            for (int k = 0; k < n; ++k) {
              m.set(k, j, col.c[static_cast<size_t>(k)]);
              m2.set(k, j, col2.c[static_cast<size_t>(k)]);
            }
          }
          cl[static_cast<size_t>(c)] = static_cast<uint32_t>(char_poly(m).encode());
          cr[static_cast<size_t>(c)] = static_cast<uint32_t>(char_poly(m2).encode());
        }
        hash_l_[static_cast<size_t>(x)] = multiset_hash(cl);
        hash_r_[static_cast<size_t>(x)] = multiset_hash(cr);
      }
    });
  }

  static uint64_t multiset_hash(const std::vector<uint32_t>& v) {
    return detail::multiset_hash_from(v, 1);
  }

  // Exact isomorphism test from a registered class into the view of (x, y).
  bool class_matches(const LocalClass& cl, int x, int y) const {
    View from = view(cl.gen_pair.first, cl.gen_pair.second);
    View to = view(x, y);
    bool found = false;
    detail::for_each_isomorphism(from, cl.gen, cl.gen_targets, to,
                                 [&](int a) { return to.char_of(a); },
                                 [&](const Mat&) {
                                   found = true;
                                   return false;
                                 });
    return found;
  }

  void insert_pair(Partial& part, const Key& keyd, int x, int y) {
    Key key{hash_l_[static_cast<size_t>(x)], hash_r_[static_cast<size_t>(y)],
            view(x, y).commutative()};
    auto it = part.buckets.find(key);
    if (it != part.buckets.end()) {
      for (size_t ci : it->second) {
        LocalClass& cl = part.classes[ci];
        if (class_matches(cl, x, y)) {
          ++cl.count;
          if (key == keyd) cl.d_pairs.emplace_back(x, y);
          return;
        }
      }
    }
    LocalClass cl;
    cl.min_pair = {x, y};
    cl.key = key;
    cl.count = 1;
    cl.gen_pair = {x, y};
    View v = view(x, y);
    cl.gen = algebra_generators(v);
    cl.gen_targets = detail::generator_targets(v, cl.gen);
    if (key == keyd) cl.d_pairs.emplace_back(x, y);
    part.classes.push_back(std::move(cl));
    part.buckets[key].push_back(part.classes.size() - 1);
  }

  void merge_partial(Partial& into, Partial& from) {
    for (LocalClass& cl : from.classes) {
      bool merged = false;
      Key key = cl.key;
      auto it = into.buckets.find(key);
      if (it != into.buckets.end()) {
        for (size_t ci : it->second) {
          LocalClass& target = into.classes[ci];
          if (class_matches(target, cl.min_pair.first, cl.min_pair.second)) {
            target.count += cl.count;
            if (cl.min_pair < target.min_pair) target.min_pair = cl.min_pair;
            target.d_pairs.insert(target.d_pairs.end(), cl.d_pairs.begin(), cl.d_pairs.end());
            merged = true;
            break;
          }
        }
      }
      if (!merged) {
        into.classes.push_back(std::move(cl));
        into.buckets[key].push_back(into.classes.size() - 1);
      }
    }
  }

  Classification run_classification() {
    Key keyd{hash_l_[1], hash_r_[1], view(1, 1).commutative()};
    std::vector<Partial> parts(static_cast<size_t>(chunk_count(q_ - 1, threads_)));
    run_chunked(q_ - 1, threads_, [&](int chunk, int beg, int end) {
      Partial& part = parts[static_cast<size_t>(chunk)];
      for (int i = beg; i < end; ++i)
        for (int y = 1; y < q_; ++y) insert_pair(part, keyd, i + 1, y);
    });
    Partial total;
    for (Partial& p : parts) merge_partial(total, p);

    Classification out;
    std::sort(total.classes.begin(), total.classes.end(),
              [](const LocalClass& a, const LocalClass& b) { return a.min_pair < b.min_pair; });
    uint64_t pair_total = 0;
    for (LocalClass& cl : total.classes) {
      pair_total += cl.count;
      PairClass pc;
      pc.min_pair = cl.min_pair;
      pc.key_l = cl.key.l;
      pc.key_r = cl.key.r;
      pc.comm = cl.key.comm;
      pc.pair_count = cl.count;
      out.classes.push_back(pc);
      if (cl.min_pair == std::pair<int, int>{1, 1}) {
        out.d_pairs = std::move(cl.d_pairs);
        std::sort(out.d_pairs.begin(), out.d_pairs.end());
      }
    }
    uint64_t expect = static_cast<uint64_t>(q_ - 1) * static_cast<uint64_t>(q_ - 1);
    if (pair_total != expect) throw std::logic_error("census lost pairs");
    // aut orders, from each class's lexicographically-least representative
    run_chunked(static_cast<int>(out.classes.size()), threads_, [&](int, int beg, int end) {
      for (int i = beg; i < end; ++i) {
        PairClass& pc = out.classes[static_cast<size_t>(i)];
        View v = view(pc.min_pair.first, pc.min_pair.second);
        Generators gen = algebra_generators(v);
        auto targets = detail::generator_targets(v, gen);
        uint64_t count = 0;
        detail::for_each_isomorphism(v, gen, targets, v,
                                     [&](int a) { return v.char_of(a); },
                                     [&](const Mat&) {
                                       ++count;
                                       return true;
                                     });
        pc.aut = count;
      }
    });
    out.at_order = out.classes.front().aut * out.classes.front().pair_count;
    return out;
  }

  // |At| without the full census: only pairs matching D's own fingerprint
  // need exact tests.
  uint64_t run_at_order() {
    if (cls_) {
      at_pairs_ = cls_->d_pairs;
      return cls_->at_order;
    }
    Key keyd{hash_l_[1], hash_r_[1], view(1, 1).commutative()};
    Generators gen = d_.generators();
    auto targets = detail::generator_targets(d_, gen);
    std::vector<std::vector<std::pair<int, int>>> found(
        static_cast<size_t>(resolve_threads(threads_)) + 2);
    run_chunked(q_ - 1, threads_, [&](int chunk, int beg, int end) {
      auto& local = found[static_cast<size_t>(chunk)];
      for (int i = beg; i < end; ++i) {
        int x = i + 1;
        if (hash_l_[static_cast<size_t>(x)] != keyd.l) continue;
        for (int y = 1; y < q_; ++y) {
          if (hash_r_[static_cast<size_t>(y)] != keyd.r) continue;
          View v = view(x, y);
          if (v.commutative() != keyd.comm) continue;
          bool ok = false;
          detail::for_each_isomorphism(d_, gen, targets, v,
                                       [&](int a) { return v.char_of(a); },
                                       [&](const Mat&) {
                                         ok = true;
                                         return false;
                                       });
          if (ok) local.emplace_back(x, y);
        }
      }
    });
    at_pairs_.clear();
    for (auto& loc : found) at_pairs_.insert(at_pairs_.end(), loc.begin(), loc.end());
    std::sort(at_pairs_.begin(), at_pairs_.end());
    View v11 = view(1, 1);  // identical to D itself
    uint64_t aut = 0;
    detail::for_each_isomorphism(d_, gen, targets, v11,
                                 [&](int a) { return v11.char_of(a); },
                                 [&](const Mat&) {
                                   ++aut;
                                   return true;
                                 });
    return aut * at_pairs_.size();
  }

  template <class Side>
  std::vector<std::pair<uint64_t, uint64_t>> side_orbits(const AutotopismGroup& g, Side&& side) {
    std::set<std::array<uint64_t, 3>> seen;
    std::vector<const Mat*> distinct;
    for (const Isotopy& t : g.elements)
      if (seen.insert(side(t).packed()).second) distinct.push_back(&side(t));
    std::vector<int> parent(static_cast<size_t>(q_));
    for (int i = 0; i < q_; ++i) parent[static_cast<size_t>(i)] = i;
    auto find = [&](int a) {
      while (parent[static_cast<size_t>(a)] != a) {
        parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
        a = parent[static_cast<size_t>(a)];
      }
      return a;
    };
    for (const Mat* m : distinct) {
      for (int t = 0; t < q_; ++t) {
        int u = find(t), v = find(apply_to_index(*m, t));
        if (u != v) parent[static_cast<size_t>(u)] = v;
      }
    }
    std::map<int, uint64_t> sizes;
    for (int t = 0; t < q_; ++t) ++sizes[find(t)];
    std::map<uint64_t, uint64_t> hist;
    for (const auto& [root, sz] : sizes) ++hist[sz];
    ++hist[1];  // the vertex point of the side, always fixed
    std::vector<std::pair<uint64_t, uint64_t>> out;
    for (const auto& [len, cycles] : hist) out.emplace_back(cycles, len);
    return out;
  }

  Semifield d_;
  int threads_;
  int q_;
  std::vector<std::vector<uint16_t>> lx_inv_, ry_inv_;
  std::vector<std::vector<uint32_t>> char_l_, char_r_;
  std::vector<uint64_t> hash_l_, hash_r_;
  std::optional<Classification> cls_;
  std::optional<uint64_t> at_;
  std::vector<std::pair<int, int>> at_pairs_;
};

// ---- Public wrappers --------------------------------------------------------

inline uint64_t at_order(const Semifield& d, int threads = 0) {
  Analyzer a(d, threads);
  return a.at_order();
}

inline Census census(const Semifield& d, int threads = 0) {
  Analyzer a(d, threads);
  return a.census();
}

inline AutotopismGroup autotopism_group(const Semifield& d, uint64_t cap = 1'000'000,
                                        int threads = 0) {
  Analyzer a(d, threads);
  return a.autotopism_group(cap);
}

inline TriangleOrbits triangle_orbits(const Semifield& d, int threads = 0) {
  Analyzer a(d, threads);
  return a.triangle_orbits(a.autotopism_group());
}

// ---- Isotopy test (Albert scan) ---------------------------------------------
//
// D1 is isotopic to D2 iff some principal isotope of D1 is isomorphic to D2.
// Pairs are scanned in lexicographic order with the fingerprint pre-filter;
// the recorded witness isotopy is re-verified through apply_isotopy.

inline bool is_isotopic(Analyzer& a1, const Semifield& d2, Isotopy* witness = nullptr) {
  const Semifield& d1 = a1.algebra();
  if (d1.p() != d2.p() || d1.n() != d2.n()) return false;
  if (d1.nuclei() != d2.nuclei()) return false;  // quick reject, isotopy invariant
  uint64_t target_l = detail::multiset_hash_from(detail::left_charpolys(d2), 1);
  uint64_t target_r = detail::multiset_hash_from(detail::right_charpolys(d2), 1);
  Generators gen = d2.generators();
  auto targets = detail::generator_targets(d2, gen);
  bool d2_comm = d2.is_commutative();
  int q = d1.q();
  for (int x = 1; x < q; ++x) {
    if (a1.hash_l(x) != target_l) continue;
    for (int y = 1; y < q; ++y) {
      if (a1.hash_r(y) != target_r) continue;
      Analyzer::View v = a1.view(x, y);
      if (v.commutative() != d2_comm) continue;
      std::optional<Mat> phi;
      detail::for_each_isomorphism(d2, gen, targets, v,
                                   [&](int a) { return v.char_of(a); },
                                   [&](const Mat& m) {
                                     phi = m;
                                     return false;
                                   });
      if (!phi) continue;
      Mat phi_inv = phi->inverse();
      Isotopy w{phi_inv * d1.rmat(y), phi_inv * d1.lmat(x), phi_inv};
      if (apply_isotopy(d1.cube(), w) != d2.cube())
        throw std::logic_error("isotopy witness verification failed");
      if (witness) *witness = w;
      return true;
    }
  }
  return false;
}

inline bool is_isotopic(const Semifield& d1, const Semifield& d2, Isotopy* witness = nullptr) {
  Analyzer a1(d1);
  return is_isotopic(a1, d2, witness);
}

// ---- S3 orbit ---------------------------------------------------------------

// Semifieldizations of the six axis transforms of cube(D), deduplicated by
// isotopy; one representative (with the first sigma producing it) per class.
inline std::vector<std::pair<S3, Semifield>> s3_orbit(const Semifield& d, int threads = 0) {
  std::vector<std::pair<S3, Semifield>> reps;
  std::vector<std::unique_ptr<Analyzer>> analyzers;
  for (const S3& sigma : all_s3()) {
    Cube c = sigma_transform(d.cube(), sigma);
    Semifield e = Semifield::from_basis(semifieldize(c).basis);
    bool known = false;
    for (auto& an : analyzers)
      if (is_isotopic(*an, e)) {
        known = true;
        break;
      }
    if (!known) {
      reps.emplace_back(sigma, e);
      analyzers.push_back(std::make_unique<Analyzer>(reps.back().second, threads));
    }
  }
  return reps;
}

// ---- Collection classification ----------------------------------------------

struct PlaneRecord {
  std::string id;
  StandardBasis rep;
  NucleiProfile zn;
  uint64_t at = 0;
  TriangleOrbits orbits;
  Census census;
  int s3_class = -1;
  int isotopy_class = -1;
};

inline std::string serialize_plane_record(const PlaneRecord& r) {
  std::string s;
  s += "plane=" + r.id + "\n";
  s += "basis=" + format_basis_line(r.rep) + "\n";
  s += "zn=" + r.zn.to_string() + "\n";
  s += "at=" + std::to_string(r.at) + "\n";
  s += "orbits_lx=" + TriangleOrbits::side_string(r.orbits.lx) + "\n";
  s += "orbits_linf=" + TriangleOrbits::side_string(r.orbits.linf) + "\n";
  s += "orbits_ly=" + TriangleOrbits::side_string(r.orbits.ly) + "\n";
  s += "census=" + r.census.to_string() + "\n";
  s += "sa_sum=" + r.census.sa_sum.to_string() + "\n";
  s += "s3_class=" + std::to_string(r.s3_class) + "\n";
  s += "isotopy_class=" + std::to_string(r.isotopy_class) + "\n";
  return s;
}

// Partition into isotopy classes, group those into S3 classes, and compute
// the per-class invariants. Representatives are the members with the
// lexicographically smallest encoding tuple.
inline std::vector<PlaneRecord> classify_collection(const std::vector<StandardBasis>& bases,
                                                    int threads = 0) {
  struct Class {
    std::unique_ptr<Analyzer> analyzer;
    std::vector<code_t> best_codes;
    StandardBasis best;
  };
  std::vector<Class> classes;
  for (const StandardBasis& b : bases) {
    Semifield d = Semifield::from_basis(b);
    auto codes = basis_codes(b);
    bool placed = false;
    for (Class& cl : classes) {
      if (is_isotopic(*cl.analyzer, d)) {
        if (codes < cl.best_codes) {
          cl.best_codes = codes;
          cl.best = b;
        }
        placed = true;
        break;
      }
    }
    if (!placed)
      classes.push_back(Class{std::make_unique<Analyzer>(d, threads), codes, b});
  }
  // S3 grouping over class representatives
  size_t k = classes.size();
  std::vector<int> parent(k);
  for (size_t i = 0; i < k; ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int a) {
    while (parent[static_cast<size_t>(a)] != a) a = parent[static_cast<size_t>(a)];
    return a;
  };
  for (size_t i = 0; i < k; ++i) {
    for (const S3& sigma : all_s3()) {
      if (sigma == all_s3()[0]) continue;
      Cube c = sigma_transform(classes[i].analyzer->algebra().cube(), sigma);
      Semifield e = Semifield::from_basis(semifieldize(c).basis);
      for (size_t j = 0; j < k; ++j) {
        if (find(static_cast<int>(j)) == find(static_cast<int>(i))) continue;
        if (is_isotopic(*classes[j].analyzer, e)) {
          parent[static_cast<size_t>(find(static_cast<int>(j)))] = find(static_cast<int>(i));
          break;
        }
      }
    }
  }
  std::map<int, int> s3_ids;
  std::vector<PlaneRecord> out;
  for (size_t i = 0; i < k; ++i) {
    int root = find(static_cast<int>(i));
    if (!s3_ids.count(root)) {
      int next = static_cast<int>(s3_ids.size());
      s3_ids[root] = next;
    }
    PlaneRecord r;
    r.id = "C" + std::to_string(i + 1);
    r.rep = classes[i].best;
    r.isotopy_class = static_cast<int>(i);
    r.s3_class = s3_ids[root];
    Semifield d = Semifield::from_basis(classes[i].best);
    Analyzer an(d, threads);
    r.zn = d.nuclei();
    r.at = an.at_order();
    r.census = an.census();
    r.orbits = an.triangle_orbits(an.autotopism_group());
    out.push_back(std::move(r));
  }
  return out;
}

// ---- Autotopism group structure ---------------------------------------------

struct GroupFacts {
  bool abelian = false;
  bool klein_four = false;
  bool solvable = false;
  int derived_length = 0;
  std::map<uint64_t, uint64_t> element_orders;  // order -> count
};

namespace detail {

struct TripleKey {
  std::array<uint64_t, 9> v;
  bool operator==(const TripleKey&) const = default;
  bool operator<(const TripleKey& o) const { return v < o.v; }
};

inline TripleKey triple_key(const Isotopy& t) {
  TripleKey k;
  auto f = t.F.packed(), g = t.G.packed(), h = t.H.packed();
  k.v = {f[0], f[1], f[2], g[0], g[1], g[2], h[0], h[1], h[2]};
  return k;
}

}  // namespace detail

// Solvability, abelian check and element orders; computed only for
// |At| <= limit (default 10^4).
inline std::optional<GroupFacts> group_structure(const std::vector<Isotopy>& els,
                                                 size_t limit = 10000) {
  size_t m = els.size();
  if (m == 0 || m > limit) return std::nullopt;
  struct KeyHash {
    size_t operator()(const detail::TripleKey& k) const {
      uint64_t h = 0xcbf29ce484222325ull;
      for (uint64_t w : k.v) {
        h ^= w;
        h *= 0x100000001b3ull;
      }
      return static_cast<size_t>(h);
    }
  };
  std::unordered_map<detail::TripleKey, int, KeyHash> index;
  index.reserve(2 * m);
  for (size_t i = 0; i < m; ++i) index[detail::triple_key(els[i])] = static_cast<int>(i);
  auto idx_of = [&](const Isotopy& t) {
    auto it = index.find(detail::triple_key(t));
    if (it == index.end()) throw std::logic_error("group not closed under composition");
    return it->second;
  };
  int p = els[0].F.p(), n = els[0].F.n();
  int id_idx = idx_of(Isotopy::identity(p, n));
  std::vector<int> inv_idx(m);
  for (size_t i = 0; i < m; ++i) inv_idx[i] = idx_of(els[i].inverse());

  // Dense index-level multiplication table when it fits comfortably;
  // otherwise compose on demand.
  std::vector<uint16_t> table;
  if (m <= 4096) {
    table.resize(m * m);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j)
        table[i * m + j] = static_cast<uint16_t>(idx_of(compose(els[i], els[j])));
  }
  auto mul = [&](int a, int b) {
    if (!table.empty()) return static_cast<int>(table[static_cast<size_t>(a) * m + static_cast<size_t>(b)]);
    return idx_of(compose(els[static_cast<size_t>(a)], els[static_cast<size_t>(b)]));
  };

  GroupFacts facts;
  for (size_t i = 0; i < m; ++i) {
    uint64_t ord = 1;
    int cur = static_cast<int>(i);
    while (cur != id_idx) {
      cur = mul(cur, static_cast<int>(i));
      ++ord;
    }
    ++facts.element_orders[ord];
  }
  facts.abelian = true;
  for (size_t i = 0; i < m && facts.abelian; ++i)
    for (size_t j = i + 1; j < m && facts.abelian; ++j)
      facts.abelian = mul(static_cast<int>(i), static_cast<int>(j)) ==
                      mul(static_cast<int>(j), static_cast<int>(i));
  facts.klein_four =
      m == 4 && facts.element_orders.count(2) && facts.element_orders.at(2) == 3;

  auto derived = [&](const std::vector<int>& sub) {
    std::set<int> comms;
    for (int a : sub)
      for (int b : sub)
        comms.insert(mul(mul(a, b), mul(inv_idx[static_cast<size_t>(a)],
                                        inv_idx[static_cast<size_t>(b)])));
    // The commutator set is inverse-closed ([a,b]^-1 = [b,a]), so closure
    // under right multiplication from the identity generates the subgroup.
    std::set<int> sub2{id_idx};
    std::vector<int> work{id_idx};
    while (!work.empty()) {
      int a = work.back();
      work.pop_back();
      for (int c : comms) {
        int ac = mul(a, c);
        if (sub2.insert(ac).second) work.push_back(ac);
      }
    }
    return std::vector<int>(sub2.begin(), sub2.end());
  };

  std::vector<int> cur(m);
  for (size_t i = 0; i < m; ++i) cur[i] = static_cast<int>(i);
  facts.derived_length = 0;
  while (cur.size() > 1) {
    std::vector<int> next = derived(cur);
    ++facts.derived_length;
    if (next.size() == cur.size()) {  // perfect term, series stalls
      facts.solvable = false;
      return facts;
    }
    cur = std::move(next);
  }
  facts.solvable = true;
  return facts;
}

}  // namespace semiforge
