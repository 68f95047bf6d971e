#pragma once

// The nine published order-243 standard bases and their expected invariants,
// embedded so that verification runs offline and bit-exact, plus the
// verification runner shared by the CLI and the acceptance suite.

#include <functional>
#include <ostream>
#include <sstream>

#include "search.hpp"

namespace semiforge {

struct PaperFixture {
  const char* label;
  std::array<code_t, 4> codes;  // enc(A_2) .. enc(A_5)
  NucleiProfile zn;
  uint64_t at;
  // all three triangle sides share one multiset per plane
  std::vector<std::pair<uint64_t, uint64_t>> orbit_side;       // (cycles, length)
  std::vector<std::pair<uint64_t, uint64_t>> census_classes;   // (autOrder, classCount)
};

inline const std::vector<PaperFixture>& paper_fixtures() {
  static const std::vector<PaperFixture> fixtures = {
      {"I", {129317742ull, 43151760ull, 25524498ull, 2715668620ull},
       {243, 243, 243, 243, 243}, 292820,
       {{2, 1}, {1, 242}}, {{5, 1}}},
      {"II", {129317638ull, 44994959ull, 28587138ull, 1226007534ull},
       {3, 3, 3, 3, 3}, 2420,
       {{2, 1}, {1, 242}}, {{1, 24}, {5, 1}}},
      {"III", {129317781ull, 52757047ull, 20739470ull, 3274303432ull},
       {3, 3, 3, 3, 3}, 2420,
       {{2, 1}, {1, 242}}, {{1, 24}, {5, 1}}},
      {"IV", {129317742ull, 43393513ull, 26923067ull, 2713804376ull},
       {3, 3, 3, 3, 3}, 20,
       {{2, 1}, {1, 2}, {24, 10}}, {{1, 2928}, {5, 1}}},
      {"V", {129317742ull, 43215002ull, 26537147ull, 2719346408ull},
       {3, 3, 3, 3, 3}, 20,
       {{2, 1}, {1, 2}, {24, 10}}, {{1, 2928}, {5, 1}}},
      {"VI", {129317742ull, 43185096ull, 19259172ull, 2718371119ull},
       {3, 3, 3, 3, 3}, 20,
       {{2, 1}, {1, 2}, {24, 10}}, {{1, 2928}, {5, 1}}},
      {"VII", {129317742ull, 43215002ull, 26558192ull, 2719382129ull},
       {3, 3, 3, 3, 3}, 220,
       {{2, 1}, {1, 22}, {2, 110}}, {{1, 266}, {5, 1}}},
      {"VIII", {129317636ull, 14673002ull, 1139489406ull, 3073918154ull},
       {3, 3, 3, 3, 3}, 4,
       {{2, 1}, {121, 2}}, {{1, 14641}}},
      {"IX", {129317636ull, 18089998ull, 3416237282ull, 1030364558ull},
       {3, 3, 3, 3, 3}, 4,
       {{2, 1}, {121, 2}}, {{1, 14641}}},
  };
  return fixtures;
}

struct HeadlineCounts {
  uint64_t s3 = 9;
  uint64_t isotopy = 23;
  uint64_t isomorphism = 85877;
};

inline HeadlineCounts headline_counts() { return {}; }

inline StandardBasis fixture_basis(const PaperFixture& f) {
  StandardBasis s(3, 5);
  for (int i = 0; i < 4; ++i)
    s.A[static_cast<size_t>(i + 1)] = decode_matrix(f.codes[static_cast<size_t>(i)], i + 2, 3, 5);
  return s;
}

// ---- Verification runner ----------------------------------------------------

struct VerifyOptions {
  bool full = false;        // also expand the S3 orbits and count 9/23/85877
  int threads = 0;
  bool skip_at = false;     // skips |At|, orbits, census and group checks
  bool skip_census = false;
  bool skip_orbits = false;
  bool skip_groups = false;
};

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};

inline std::vector<CheckResult> verify_paper(const VerifyOptions& opt, std::ostream* log = nullptr) {
  std::vector<CheckResult> results;
  auto report = [&](const std::string& name, bool pass, const std::string& detail) {
    results.push_back({name, pass, detail});
    if (log) (*log) << (pass ? "[PASS] " : "[FAIL] ") << name
                    << (detail.empty() ? "" : ": " + detail) << "\n";
  };

  std::vector<Semifield> algebras;
  for (const PaperFixture& f : paper_fixtures()) {
    StandardBasis basis = fixture_basis(f);
    auto violation = validate_standard_basis(basis);
    report(std::string("fixture ") + f.label + " validates", !violation,
           violation ? violation->message() : "");
    algebras.push_back(Semifield::from_basis(basis, false));
  }

  for (size_t i = 0; i < algebras.size(); ++i) {
    const PaperFixture& f = paper_fixtures()[i];
    NucleiProfile zn = algebras[i].nuclei();
    report(std::string("plane ") + f.label + " ZN", zn == f.zn,
           "got " + zn.to_string() + " want " + f.zn.to_string());
  }

  if (!opt.skip_at) {
    for (size_t i = 0; i < algebras.size(); ++i) {
      const PaperFixture& f = paper_fixtures()[i];
      Analyzer an(algebras[i], opt.threads);
      uint64_t at = an.at_order();
      report(std::string("plane ") + f.label + " |At|", at == f.at,
             "got " + std::to_string(at) + " want " + std::to_string(f.at));

      if (!opt.skip_census) {
        Census c = an.census();
        bool match = c.classes == f.census_classes;
        Fraction expect_sum = Fraction::of(0);
        for (const auto& [aut, cnt] : f.census_classes)
          expect_sum = expect_sum + Fraction::of(static_cast<long long>(cnt),
                                                 static_cast<long long>(aut));
        bool identity_ok =
            c.sa_sum.num * static_cast<long long>(at) == 58564LL * c.sa_sum.den;
        report(std::string("plane ") + f.label + " census", match && c.sa_sum == expect_sum,
               "got " + c.to_string());
        report(std::string("plane ") + f.label + " S/A identity", identity_ok,
               c.sa_sum.to_string() + " * " + std::to_string(at) + " == 58564");
      }

      if (!opt.skip_orbits || !opt.skip_groups) {
        AutotopismGroup g = an.autotopism_group();
        if (!opt.skip_orbits) {
          TriangleOrbits orbits = an.triangle_orbits(g);
          bool ok = orbits.lx == f.orbit_side && orbits.linf == f.orbit_side &&
                    orbits.ly == f.orbit_side;
          report(std::string("plane ") + f.label + " triangle orbits", ok,
                 TriangleOrbits::side_string(orbits.lx) + " / " +
                     TriangleOrbits::side_string(orbits.linf) + " / " +
                     TriangleOrbits::side_string(orbits.ly));
        }
        if (!opt.skip_groups && g.order <= 10000) {
          auto facts = group_structure(g.elements);
          bool ok = facts.has_value();
          std::string detail;
          if (ok && (f.label == std::string("VIII") || f.label == std::string("IX"))) {
            ok = facts->klein_four;
            detail = "Klein four";
          } else if (ok && f.at == 20) {
            std::map<uint64_t, uint64_t> want{{1, 1}, {2, 3}, {5, 4}, {10, 12}};
            ok = facts->abelian && facts->element_orders == want;
            detail = "abelian Z2 x Z10";
          } else if (ok && f.at == 2420) {
            ok = facts->solvable;
            detail = "solvable, derived length " + std::to_string(facts->derived_length);
          } else if (ok) {
            detail = "order " + std::to_string(g.order);
          }
          report(std::string("plane ") + f.label + " group structure", ok, detail);
        }
      }
    }
  }

  if (opt.full) {
    std::vector<StandardBasis> all;
    for (const PaperFixture& f : paper_fixtures()) all.push_back(fixture_basis(f));
    auto records = classify_collection(all, opt.threads);
    std::set<int> s3_of_nine;
    for (const PlaneRecord& r : records) s3_of_nine.insert(r.s3_class);
    report("nine planes pairwise non-S3-equivalent",
           records.size() == 9 && s3_of_nine.size() == 9,
           std::to_string(records.size()) + " isotopy classes, " +
               std::to_string(s3_of_nine.size()) + " S3 classes");

    // expand the nine S3 orbits into all isotopy classes
    std::vector<StandardBasis> expanded;
    for (const PaperFixture& f : paper_fixtures()) {
      Semifield d = Semifield::from_basis(fixture_basis(f), false);
      for (const S3& sigma : all_s3())
        expanded.push_back(semifieldize(sigma_transform(d.cube(), sigma)).basis);
    }
    auto full_records = classify_collection(expanded, opt.threads);
    std::set<int> s3_all;
    uint64_t iso_count = 0;
    for (const PlaneRecord& r : full_records) {
      s3_all.insert(r.s3_class);
      for (const auto& [aut, cnt] : r.census.classes) iso_count += cnt;
    }
    HeadlineCounts want = headline_counts();
    report("S3 classes", s3_all.size() == want.s3,
           "got " + std::to_string(s3_all.size()) + " want " + std::to_string(want.s3));
    report("isotopy classes", full_records.size() == want.isotopy,
           "got " + std::to_string(full_records.size()) + " want " +
               std::to_string(want.isotopy));
    report("isomorphism classes", iso_count == want.isomorphism,
           "got " + std::to_string(iso_count) + " want " + std::to_string(want.isomorphism));
  }

  return results;
}

}  // namespace semiforge
