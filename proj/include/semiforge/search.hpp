#pragma once

// From-scratch classification: canonical A_2 forms, the constructive
// canonicalization of an order-3^5 semifield onto one of them, and sharded
// backtracking enumeration of standard bases with incremental invertibility
// pruning.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "classify.hpp"

namespace semiforge {

// ---- Canonical A_2 forms ----------------------------------------------------

struct A2Form {
  enum class Family { Irreducible, BlockDiagonal, GenericRootFree };
  Mat matrix;
  Poly charpoly;
  Family family;
};

// For (3,5): exactly the six forms of the order-243 reduction -- the four
// companion matrices of the irreducible quintics with zero x^4 and x^2
// coefficients plus the two block-diagonal forms of the factored ones. For
// other (p, n), where that reduction does not apply: one rational-canonical
// representative (block diagonal of primary factor companions) per monic
// degree-n polynomial with no linear factor; a superset, sound for search
// completeness.
inline std::vector<A2Form> a2_candidates(int p, int n) {
  require_prime(p);
  require_dim(n);
  bool shaped_only = (p == 3 && n == 5);
  struct Entry {
    std::vector<int> coeffs;  // a_0..a_{n-1}
    bool reducible;
    A2Form form;
  };
  std::vector<Entry> entries;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= p;
  for (int v = 0; v < total; ++v) {
    std::vector<int> coeffs(static_cast<size_t>(n) + 1, 0);
    coeffs[static_cast<size_t>(n)] = 1;
    int x = v;
    for (int i = 0; i < n; ++i) {
      coeffs[static_cast<size_t>(i)] = x % p;
      x /= p;
    }
    if (shaped_only && (coeffs[4] != 0 || coeffs[2] != 0)) continue;
    Poly f = Poly::from_coeffs(p, coeffs);
    if (f.has_root()) continue;
    auto factors = factor_monic(f);
    // primary blocks, largest degree first
    std::vector<Poly> blocks;
    for (const auto& [g, e] : factors) {
      Poly block = Poly::one(p);
      for (int i = 0; i < e; ++i) block = block * g;
      blocks.push_back(block);
    }
    std::sort(blocks.begin(), blocks.end(), [](const Poly& a, const Poly& b) {
      if (a.degree() != b.degree()) return a.degree() > b.degree();
      return a.encode() < b.encode();
    });
    Mat m(p, n);
    int off = 0;
    for (const Poly& block : blocks) {
      if (block.degree() == 1) throw std::logic_error("root-free poly with linear factor");
      Mat c = companion(block);
      for (int r = 0; r < block.degree(); ++r)
        for (int cc = 0; cc < block.degree(); ++cc) m.set(off + r, off + cc, c.at(r, cc));
      off += block.degree();
    }
    A2Form::Family fam;
    if (blocks.size() > 1)
      fam = A2Form::Family::BlockDiagonal;
    else if (factors.size() == 1 && factors[0].second == 1)
      fam = A2Form::Family::Irreducible;
    else
      fam = A2Form::Family::GenericRootFree;
    entries.push_back(Entry{std::vector<int>(coeffs.begin(), coeffs.end() - 1),
                            fam != A2Form::Family::Irreducible, A2Form{m, f, fam}});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.reducible != b.reducible) return !a.reducible;
    return a.coeffs < b.coeffs;
  });
  std::vector<A2Form> out;
  for (auto& e : entries) out.push_back(std::move(e.form));
  return out;
}

// ---- Canonicalization (order 3^5) -------------------------------------------

struct CanonicalizationCertificate {
  int element = 0;       // index of the pivot element, in the algebra it was found in
  Poly char_poly;        // char poly of its left multiplication (shape x^5+a2x^3+a4x+a5)
  Poly min_poly;         // local minimal polynomial of the identity under it
  std::vector<int> basis_elements;
  std::pair<int, int> isotope_pair{1, 1};  // principal isotope searched; (1,1) = input itself
  Isotopy witness;                          // input cube -> output cube
};

namespace detail {

// Minimal monic m with m(L)(start) = 0, via the Krylov sequence of start.
inline Poly local_min_poly(const Mat& l, const Vec& start) {
  int p = l.p(), n = l.n();
  std::vector<Vec> krylov{start};
  for (int k = 1; k <= n; ++k) krylov.push_back(l.apply(krylov.back()));
  for (int k = 1; k <= n; ++k) {
    // solve krylov[k] = sum_{i<k} lambda_i krylov[i] if possible
    uint8_t a[kMaxDim][kMaxDim + 1];
    for (int r = 0; r < n; ++r) {
      for (int i = 0; i < k; ++i) a[r][i] = krylov[static_cast<size_t>(i)].c[static_cast<size_t>(r)];
      a[r][k] = krylov[static_cast<size_t>(k)].c[static_cast<size_t>(r)];
    }
    // gaussian elimination on the k+1 column system
    int rank = 0;
    std::vector<int> pivot_col;
    for (int col = 0; col < k && rank < n; ++col) {
      int piv = -1;
      for (int r = rank; r < n; ++r)
        if (a[r][col]) {
          piv = r;
          break;
        }
      if (piv < 0) continue;
      for (int cc = 0; cc <= k; ++cc) std::swap(a[piv][cc], a[rank][cc]);
      uint8_t inv = gf_inv(p, a[rank][col]);
      for (int cc = 0; cc <= k; ++cc) a[rank][cc] = gf_mul(p, a[rank][cc], inv);
      for (int r = 0; r < n; ++r) {
        if (r == rank || !a[r][col]) continue;
        uint8_t f = a[r][col];
        for (int cc = 0; cc <= k; ++cc) a[r][cc] = gf_sub(p, a[r][cc], gf_mul(p, f, a[rank][cc]));
      }
      pivot_col.push_back(col);
      ++rank;
    }
    bool consistent = true;
    for (int r = rank; r < n; ++r)
      if (a[r][k]) {
        consistent = false;
        break;
      }
    if (!consistent) continue;
    std::vector<int> coeffs(static_cast<size_t>(k) + 1, 0);
    coeffs[static_cast<size_t>(k)] = 1;
    for (int r = 0; r < rank; ++r)
      coeffs[static_cast<size_t>(pivot_col[static_cast<size_t>(r)])] = gf_neg(p, a[r][k]);
    return Poly::from_coeffs(p, coeffs);
  }
  throw std::logic_error("local minimal polynomial of degree <= n must exist");
}

inline Mat basis_matrix_from_vecs(int p, int n, const std::vector<Vec>& cols) {
  Mat m(p, n);
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < n; ++r)
      m.set(r, i, cols[static_cast<size_t>(i)].c[static_cast<size_t>(r)]);
  return m;
}

}  // namespace detail

// Prop.-2-style canonicalization: find b with char poly x^5+a2x^3+a4x+a5
// (exists by Chevalley-Warning; scalars never qualify). If the polynomial is
// irreducible, rebase onto the left-power basis {1,b,b^2,b*b^2,b*(b*b^2)} of
// the algebra itself; otherwise scan principal isotopes in lexicographic
// order for an element whose local minimal polynomial is the cubic factor
// and rebase onto {1,c,c^2,d,c*d} with d in the kernel of the quadratic
// factor. Either way A_2 lands in a2_candidates(3,5).
inline std::pair<StandardBasis, CanonicalizationCertificate> canonicalize(const Semifield& d) {
  if (d.p() != 3 || d.n() != 5)
    throw std::invalid_argument("canonicalize: only order 3^5 is supported");
  int p = 3, n = 5;

  auto shaped = [](const Poly& cp) { return cp.coeff(4) == 0 && cp.coeff(2) == 0; };

  auto finish = [&](const Semifield& host, const Isotopy& to_host,
                    CanonicalizationCertificate cert,
                    const std::vector<int>& basis_idx) {
    std::vector<Vec> cols;
    for (int e : basis_idx) cols.push_back(host.vec_of(e));
    Mat pm = detail::basis_matrix_from_vecs(p, n, cols);
    Mat pinv = pm.inverse();
    Isotopy rebase{pinv, pinv, pinv};
    Isotopy w = compose(rebase, to_host);
    Cube out = apply_isotopy(d.cube(), w);
    StandardBasis basis = basis_from_cube(out);
    if (auto v = validate_standard_basis(basis))
      throw std::logic_error("canonicalize produced invalid basis: " + v->message());
    cert.basis_elements = basis_idx;
    cert.witness = w;
    return std::make_pair(basis, cert);
  };

  // Pass 1: an element of the algebra itself with irreducible shaped char poly.
  std::optional<std::pair<int, Poly>> reducible_hit;
  std::optional<std::pair<StandardBasis, CanonicalizationCertificate>> found;
  for_each_projective(p, n, [&](const std::array<uint8_t, kMaxDim>& lam, int) {
    Vec bv = Vec::zero(n);
    for (int i = 0; i < n; ++i) bv.c[static_cast<size_t>(i)] = lam[static_cast<size_t>(i)];
    int b = vec_to_index(p, bv);
    Poly cp = char_poly(d.lmat(b));
    if (!shaped(cp)) return true;
    if (!is_irreducible(cp)) {
      if (!reducible_hit) reducible_hit = {b, cp};
      return true;
    }
    int b2 = d.mul(b, b);
    int b3 = d.mul(b, b2);
    int b4 = d.mul(b, b3);
    CanonicalizationCertificate cert;
    cert.element = b;
    cert.char_poly = cp;
    cert.min_poly = cp;
    cert.isotope_pair = {1, 1};
    found = finish(d, Isotopy::identity(p, n), cert, {d.identity(), b, b2, b3, b4});
    return false;
  });
  if (found) return *found;
  if (!reducible_hit)
    throw std::logic_error("canonicalize: no shaped characteristic polynomial found");

  // Pass 2: reducible case; the shaped char polys here factor as an
  // irreducible cubic times an irreducible quadratic.
  for (int x = 1; x < d.q(); ++x)
    for (int y = 1; y < d.q(); ++y) {
      Semifield e = d.principal_isotope(x, y);
      for (int c = 2; c < e.q(); ++c) {
        Poly cp = char_poly(e.lmat(c));
        if (!shaped(cp) || is_irreducible(cp)) continue;
        auto factors = factor_monic(cp);
        if (factors.size() != 2) continue;
        Poly cubic = factors[0].first.degree() == 3 ? factors[0].first : factors[1].first;
        Poly quad = factors[0].first.degree() == 2 ? factors[0].first : factors[1].first;
        if (cubic.degree() != 3 || quad.degree() != 2 || factors[0].second != 1 ||
            factors[1].second != 1)
          continue;
        Poly mp = detail::local_min_poly(e.lmat(c), e.vec_of(e.identity()));
        if (!(mp == cubic)) continue;
        // d-part: any nonzero element of ker quad(L_c)
        Mat lc = e.lmat(c);
        Mat qm = lc * lc;
        qm.add_scaled(lc, quad.coeff(1));
        qm.add_scaled(Mat::identity(p, n), quad.coeff(0));
        int del = 0;
        for (int cand = 1; cand < e.q() && !del; ++cand)
          if (apply_to_index(qm, cand) == 0) del = cand;
        if (!del) continue;
        int c2 = e.mul(c, c);
        int cd = e.mul(c, del);
        // isotopy from d to e, reconstructed exactly as principal_isotope built it
        Vec u = d.vec_of(d.mul(x, y));
        Mat pm0 = detail::rebase_matrix(p, n, u);
        Mat pinv0 = pm0.inverse();
        Isotopy to_e{pinv0 * d.rmat(y), pinv0 * d.lmat(x), pinv0};
        CanonicalizationCertificate cert;
        cert.element = c;
        cert.char_poly = cp;
        cert.min_poly = mp;
        cert.isotope_pair = {x, y};
        auto result = finish(e, to_e, cert, {e.identity(), c, c2, del, cd});
        return result;
      }
    }
  throw std::logic_error("canonicalize: no admissible element in any principal isotope");
}

// ---- Sharded enumeration ----------------------------------------------------

struct SearchShard {
  int a2_index = 0;
  int prefix_digits = 0;     // fixed leading base-p digits of enc(A_3)
  code_t prefix_value = 0;   // their value, most significant first
  int shard_index = 0;
  int shard_count = 1;
};

// Work plan with at least min_shards shards: the smallest digit count d with
// n_forms * p^d >= min_shards, one shard per (A_2 form, prefix value).
inline std::vector<SearchShard> shard_plan(int p, int n, int min_shards = 1) {
  int forms = static_cast<int>(a2_candidates(p, n).size());
  int d = 0;
  long long units = forms;
  while (units < min_shards) {
    units *= p;
    ++d;
  }
  int per_form = 1;
  for (int i = 0; i < d; ++i) per_form *= p;
  std::vector<SearchShard> plan;
  for (int f = 0; f < forms; ++f)
    for (int v = 0; v < per_form; ++v)
      plan.push_back(SearchShard{f, d, static_cast<code_t>(v),
                                 static_cast<int>(plan.size()), static_cast<int>(units)});
  return plan;
}

struct SearchStats {
  uint64_t candidates = 0;
  uint64_t rejected = 0;
  uint64_t emitted = 0;
  struct Rejection {
    int level;                              // 1-based index of the candidate matrix
    code_t code;                            // its encoding
    std::array<uint8_t, kMaxDim> lambda{};  // singular combination over A_1..A_level
  };
  std::vector<Rejection> samples;  // first few rejections, for replay checks
};

struct SearchControl {
  std::function<void(code_t)> on_a3_done;  // called after each finished A_3 subtree
  code_t resume_after_a3 = 0;              // skip A_3 codes <= this (0 = none)
  bool resume = false;
  std::chrono::steady_clock::time_point deadline{};  // zero = none
  bool use_deadline = false;
  bool stopped = false;  // set when the deadline fired
};

// Emits every standard basis with A_1 = I and A_2 = the shard's form, in
// deterministic (encoding-ascending) order. A partial set is extended only
// if every nonzero projective combination stays invertible; combinations of
// the verified partial set are kept and only those involving the new matrix
// are tested.
inline void enumerate_standard_bases(const SearchShard& shard, int p, int n,
                                     const std::function<void(const StandardBasis&)>& sink,
                                     SearchStats* stats = nullptr,
                                     SearchControl* control = nullptr) {
  auto forms = a2_candidates(p, n);
  if (shard.a2_index < 0 || shard.a2_index >= static_cast<int>(forms.size()))
    throw std::invalid_argument("shard A_2 index out of range");
  StandardBasis basis(p, n);
  basis.A[1] = forms[static_cast<size_t>(shard.a2_index)].matrix;

  struct Combo {
    Mat m;
    std::array<uint8_t, kMaxDim> lambda;
  };
  // All first-nonzero-normalized combinations of the accepted prefix
  // {A_1, ..., A_k}; extended in place on descent, truncated on backtrack.
  std::vector<Combo> combos;
  combos.push_back({Mat::identity(p, n), {1}});
  {
    const Mat& a2 = basis.A[1];
    Combo alone{Mat(p, n), {}};
    alone.m.add_scaled(a2, 1);
    alone.lambda[1] = 1;
    combos.push_back(alone);
    for (int l2 = 1; l2 < p; ++l2) {
      Combo c{Mat::identity(p, n), {1}};
      c.m.add_scaled(a2, static_cast<uint8_t>(l2));
      c.lambda[1] = static_cast<uint8_t>(l2);
      combos.push_back(c);
    }
    for (const Combo& c : combos)
      if (c.m.det() == 0)
        throw std::invalid_argument("A_2 form violates the invertibility conditions");
  }

  code_t space = code_space(p, n);
  code_t a3_begin = 0, a3_end = space;
  if (shard.prefix_digits > 0) {
    code_t tail = space;
    for (int i = 0; i < shard.prefix_digits; ++i) tail /= static_cast<code_t>(p);
    a3_begin = shard.prefix_value * tail;
    a3_end = (shard.prefix_value + 1) * tail;
  }

  // backtracking over levels 3..n
  uint64_t tick = 0;
  std::function<void(int)> descend = [&](int level) {
    code_t begin = (level == 2) ? a3_begin : 0;
    code_t end = (level == 2) ? a3_end : space;
    for (code_t code = begin; code < end; ++code) {
      if (level == 2 && control && control->resume && code <= control->resume_after_a3) continue;
      if (control && control->stopped) return;
      if (control && control->use_deadline && (++tick & 0x3F) == 0 &&
          std::chrono::steady_clock::now() >= control->deadline) {
        control->stopped = true;
        return;
      }
      if (stats) ++stats->candidates;
      Mat cand = decode_matrix(code, level + 1, p, n);
      bool ok = cand.det() != 0;
      std::array<uint8_t, kMaxDim> bad_lambda{};
      if (!ok) bad_lambda[static_cast<size_t>(level)] = 1;
      if (ok) {
        for (const Combo& c : combos) {
          for (int l = 1; l < p && ok; ++l) {
            Mat sum = c.m;
            sum.add_scaled(cand, static_cast<uint8_t>(l));
            if (sum.det() == 0) {
              ok = false;
              bad_lambda = c.lambda;
              bad_lambda[static_cast<size_t>(level)] = static_cast<uint8_t>(l);
            }
          }
          if (!ok) break;
        }
      }
      if (!ok) {
        if (stats) {
          ++stats->rejected;
          if (stats->samples.size() < 64)
            stats->samples.push_back({level + 1, code, bad_lambda});
        }
        continue;
      }
      basis.A[static_cast<size_t>(level)] = cand;
      if (level + 1 == n) {
        if (stats) ++stats->emitted;
        sink(basis);
      } else {
        size_t mark = combos.size();
        Combo alone{cand, {}};
        alone.lambda[static_cast<size_t>(level)] = 1;
        combos.push_back(alone);
        for (size_t i = 0; i < mark; ++i)
          for (int l = 1; l < p; ++l) {
            Combo c = combos[i];
            c.m.add_scaled(cand, static_cast<uint8_t>(l));
            c.lambda[static_cast<size_t>(level)] = static_cast<uint8_t>(l);
            combos.push_back(c);
          }
        descend(level + 1);
        combos.resize(mark);
      }
      if (level == 2 && control && control->on_a3_done && !(control && control->stopped))
        control->on_a3_done(code);
    }
  };
  descend(2);
}

// ---- Full classification ----------------------------------------------------

struct FullClassificationOptions {
  int p = 3;
  int n = 3;
  int shards = 1;
  int threads = 0;
  double budget_seconds = 0;  // 0 = unlimited
  std::string checkpoint_path;
  bool resume = false;
  std::function<void(const StandardBasis&)> emit;  // every newly found basis, in order
  // Bases already emitted by an interrupted run (typically re-read from its
  // result file); consumed for classification but not re-emitted.
  std::vector<StandardBasis> preload;
};

struct FullClassification {
  std::vector<PlaneRecord> records;
  uint64_t s3_classes = 0;
  uint64_t isotopy_classes = 0;
  uint64_t isomorphism_classes = 0;
  uint64_t bases_found = 0;
  bool complete = true;
};

namespace detail {

struct Checkpoint {
  // shard index -> (last finished A_3 code, done flag)
  std::map<int, std::pair<code_t, bool>> shards;

  static Checkpoint load(const std::string& path) {
    Checkpoint ck;
    std::ifstream in(path);
    std::string tok;
    int idx;
    code_t code;
    std::string status;
    while (in >> tok >> idx >> code >> status)
      if (tok == "shard") ck.shards[idx] = {code, status == "done"};
    return ck;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    for (const auto& [idx, st] : shards)
      out << "shard " << idx << " " << st.first << " " << (st.second ? "done" : "partial")
          << "\n";
  }
};

}  // namespace detail

// Enumerate all shards, deduplicate the emitted bases by isotopy on the fly
// (memory proportional to the class count), then classify the class
// representatives.
inline FullClassification full_classification(const FullClassificationOptions& opt) {
  FullClassification out;
  auto plan = shard_plan(opt.p, opt.n, opt.shards);
  detail::Checkpoint ck;
  if (opt.resume && !opt.checkpoint_path.empty()) ck = detail::Checkpoint::load(opt.checkpoint_path);

  struct Class {
    std::unique_ptr<Analyzer> analyzer;
    std::vector<code_t> best_codes;
    StandardBasis best;
  };
  std::vector<Class> classes;

  SearchControl control;
  if (opt.budget_seconds > 0) {
    control.use_deadline = true;
    control.deadline = std::chrono::steady_clock::now() +
                       std::chrono::microseconds(static_cast<long long>(opt.budget_seconds * 1e6));
  }

  auto consume = [&](const StandardBasis& b, bool fresh) {
    ++out.bases_found;
    if (fresh && opt.emit) opt.emit(b);
    Semifield d = Semifield::from_basis(b, false);
    auto codes = basis_codes(b);
    for (Class& cl : classes) {
      if (is_isotopic(*cl.analyzer, d)) {
        if (codes < cl.best_codes) {
          cl.best_codes = codes;
          cl.best = b;
        }
        return;
      }
    }
    classes.push_back(Class{std::make_unique<Analyzer>(d, opt.threads), codes, b});
  };

  for (const StandardBasis& b : opt.preload) consume(b, false);

  for (const SearchShard& shard : plan) {
    auto it = ck.shards.find(shard.shard_index);
    if (it != ck.shards.end() && it->second.second) continue;  // already done
    control.resume = opt.resume && it != ck.shards.end();
    control.resume_after_a3 = control.resume ? it->second.first : 0;
    // bases buffer per A_3 subtree; an interrupted subtree is dropped whole
    // and re-enumerated on resume
    std::vector<StandardBasis> pending;
    control.on_a3_done = [&](code_t code) {
      for (const StandardBasis& b : pending) consume(b, true);
      pending.clear();
      ck.shards[shard.shard_index] = {code, false};
    };
    enumerate_standard_bases(
        shard, opt.p, opt.n, [&](const StandardBasis& b) { pending.push_back(b); }, nullptr,
        &control);
    if (control.stopped) {
      out.complete = false;
      break;
    }
    auto& entry = ck.shards[shard.shard_index];
    entry.second = true;
    if (!opt.checkpoint_path.empty()) ck.save(opt.checkpoint_path);
  }
  if (!out.complete && !opt.checkpoint_path.empty()) ck.save(opt.checkpoint_path);

  if (out.complete) {
    std::vector<StandardBasis> reps;
    for (const Class& cl : classes) reps.push_back(cl.best);
    out.records = classify_collection(reps, opt.threads);
    out.isotopy_classes = out.records.size();
    std::set<int> s3;
    for (const PlaneRecord& r : out.records) {
      s3.insert(r.s3_class);
      for (const auto& [aut, cnt] : r.census.classes) out.isomorphism_classes += cnt;
    }
    out.s3_classes = s3.size();
  }
  return out;
}

}  // namespace semiforge
