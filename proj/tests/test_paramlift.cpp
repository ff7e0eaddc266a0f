// Oracle and property tests for the parametric lift: component
// normalization, sampling/interpolation in k, homogenization, and the
// reference closed forms of the low-n maps in both families.

#include <catch2/catch_amalgamated.hpp>

#include "kjc/paramlift.hpp"
#include "kjc/polyio.hpp"

using kjc::Family;
using kjc::MultiPoly;
using kjc::Rat;
using kjc::Var;
using kjc::VarSet;

namespace {

MultiPoly v(const VarSet& vs, const char* name) { return MultiPoly::variable(vs, name); }
MultiPoly c(const VarSet& vs, long num, long den = 1) {
    return MultiPoly::constant(vs, kjc::rat_make(num, den));
}

// Every term of every component is homogeneous of the map degree in the
// projective variables (h and the weight parameters).
void check_homogeneous(const kjc::ParametricMap& m) {
    for (const auto& comp : m.comps) {
        REQUIRE(!comp.is_zero());
        for (const auto& t : comp.terms()) {
            int d = 0;
            for (std::size_t i = 0; i < comp.vars().size(); ++i) {
                kjc::VarKind kind = comp.vars().at(i).kind;
                if (kind == kjc::VarKind::L || kind == kjc::VarKind::R ||
                    kind == kjc::VarKind::H)
                    d += t.first.e[i];
            }
            REQUIRE(d == m.map_degree());
        }
    }
}

}  // namespace

TEST_CASE("one-sided n=1 lift matches the reference closed form") {
    kjc::LiftDiagnostics diag;
    kjc::ParametricMap m = kjc::lift(Family::kOneSided, 1, {}, &diag);
    REQUIRE(m.comps.size() == 2);

    VarSet vs = VarSet::of({"l0", "h", "k"});
    MultiPoly l0 = v(vs, "l0"), h = v(vs, "h"), k = v(vs, "k");
    MultiPoly F = h + k * (k + Rat(1)) / Rat(2) * l0;
    MultiPoly Fs = h + (k + Rat(1)) * (k + Rat(2)) / Rat(2) * l0;
    CHECK(m.comps[0] == F);
    CHECK(m.comps[1] == Fs);
    CHECK(kjc::degree_in_k(m) == 2);
    CHECK(kjc::format_map_text(m.comps) ==
          "( h + k(k+1)/2 l0 : h + (k+1)(k+2)/2 l0 )");

    CHECK(diag.interpolation_ks == std::vector<int>{2, 3, 4});
    CHECK(diag.validation_ks == std::vector<int>{5, 6, 7, 8});
    CHECK(diag.skipped_ks.empty());
    check_homogeneous(m);
}

TEST_CASE("one-sided n=2 lift matches the reference closed form up to parameter scaling") {
    kjc::ParametricMap m = kjc::lift(Family::kOneSided, 2);
    REQUIRE(m.comps.size() == 3);
    CHECK(kjc::degree_in_k(m) == 8);
    check_homogeneous(m);

    VarSet vs = VarSet::of({"l0", "l1", "h", "k"});
    MultiPoly l0 = v(vs, "l0"), l1 = v(vs, "l1"), h = v(vs, "h"), k = v(vs, "k");

    // The n=2 reference forms are quoted in rescaled source coordinates,
    // (l0, l1) -> (2 l0, 24 l1) relative to the unit-constant-term
    // normalization used here; one substitution must align every component.
    std::vector<MultiPoly> scaled;
    for (const auto& comp : m.comps)
        scaled.push_back(comp.substitute_poly("l0", Rat(2) * l0)
                             .substitute_poly("l1", Rat(24) * l1));

    // Middle component: 1 + (k+1)(k+2) l0 + 6k(k+1)(k+2)(k+3) l1
    //                   - 3(k-1)k(k+1)^2(k+2)^2(k+3)(k+4) l1^2, homogenized.
    MultiPoly E = h * h + (k + Rat(1)) * (k + Rat(2)) * l0 * h +
                  c(vs, 6) * k * (k + Rat(1)) * (k + Rat(2)) * (k + Rat(3)) * l1 * h -
                  c(vs, 3) * (k - Rat(1)) * k * (k + Rat(1)) * (k + Rat(1)) *
                      (k + Rat(2)) * (k + Rat(2)) * (k + Rat(3)) * (k + Rat(4)) * l1 * l1;
    CHECK(scaled[1] == E);

    // Outer component: 1 + k(k+2) l0 + 6k(k+2)(k^2+2k-1) l1
    //                  - 3(k-1)k^2(k+1)^2(k+2)^2(k+3) l1^2, homogenized.
    MultiPoly F = h * h + k * (k + Rat(2)) * l0 * h +
                  c(vs, 6) * k * (k + Rat(2)) * (k * k + Rat(2) * k - Rat(1)) * l1 * h -
                  c(vs, 3) * (k - Rat(1)) * k * k * (k + Rat(1)) * (k + Rat(1)) *
                      (k + Rat(2)) * (k + Rat(2)) * (k + Rat(3)) * l1 * l1;
    CHECK(scaled[0] == F);
    CHECK(m.comps[0].coefficient_in("h", 2) == MultiPoly::one(vs));

    // Third component is the first shifted by one in k, equivalently the
    // first reflected through k -> -3-k; the middle one is reflection-fixed.
    MultiPoly shift = k + Rat(1);
    MultiPoly refl = c(vs, -3) - k;
    CHECK(m.comps[2] == m.comps[0].substitute_poly("k", shift));
    CHECK(m.comps[2] == m.comps[0].substitute_poly("k", refl));
    CHECK(m.comps[1] == m.comps[1].substitute_poly("k", refl));
}

TEST_CASE("one-sided n=3 lift reproduces reference leading monomials and counts") {
    kjc::ParametricMap m = kjc::lift(Family::kOneSided, 3);
    REQUIRE(m.comps.size() == 4);
    CHECK(kjc::degree_in_k(m) == 18);
    check_homogeneous(m);
    for (const auto& comp : m.comps) CHECK(kjc::coord_monomial_count(comp) == 9);

    VarSet vs = VarSet::of({"l0", "l1", "l2", "h", "k"});
    MultiPoly k = v(vs, "k");

    // F = comps[0]: 1 + k(k+3)/2 l0 + k(k+3)(k^2+3k-1)/4 l1 + ...
    CHECK(m.comps[0].coefficient_in("h", 3) == MultiPoly::one(vs));
    CHECK(m.comps[0].coefficient_in("l0", 1).coefficient_in("h", 2) ==
          k * (k + Rat(3)) / Rat(2));
    CHECK(m.comps[0].coefficient_in("l1", 1).coefficient_in("h", 2) ==
          k * (k + Rat(3)) * (k * k + Rat(3) * k - Rat(1)) / Rat(4));

    // E = comps[1]: 1 + (k+3)(3k+2)/6 l0 + k(k+3)(3k^2+13k+9)/12 l1 + ...
    CHECK(m.comps[1].coefficient_in("l0", 1).coefficient_in("h", 2) ==
          (k + Rat(3)) * (Rat(3) * k + Rat(2)) / Rat(6));
    CHECK(m.comps[1].coefficient_in("l1", 1).coefficient_in("h", 2) ==
          k * (k + Rat(3)) * (Rat(3) * k * k + Rat(13) * k + Rat(9)) / Rat(12));

    // Built-in reflection: f = (F(k) : E(k) : E(-k-4) : F(-k-4)).
    MultiPoly refl = c(vs, -4) - k;
    CHECK(m.comps[2] == m.comps[1].substitute_poly("k", refl));
    CHECK(m.comps[3] == m.comps[0].substitute_poly("k", refl));
}

TEST_CASE("two-sided n=1 lift matches the reference closed form") {
    kjc::ParametricMap m = kjc::lift(Family::kTwoSided, 1);
    REQUIRE(m.comps.size() == 3);
    CHECK(kjc::degree_in_k(m) == 4);
    check_homogeneous(m);

    VarSet vs = VarSet::of({"l0", "r0", "h", "k"});
    MultiPoly l0 = v(vs, "l0"), r0 = v(vs, "r0"), h = v(vs, "h"), k = v(vs, "k");
    MultiPoly k2 = k * k;
    // H(k) = 1 + k^2/2 (l0 + r0 + (k^2-1)/2 l0 r0), homogenized to degree 2.
    MultiPoly H = h * h + k2 / Rat(2) * (l0 + r0) * h +
                  k2 * (k2 - Rat(1)) / Rat(4) * l0 * r0;
    CHECK(m.comps[0] == H);
    CHECK(m.comps[1] == l0 * h - r0 * h);
    CHECK(m.comps[2] == m.comps[0].substitute_poly("k", k + Rat(1)));

    // Reflection k -> -1-k maps H(k) to H(k+1) and fixes the middle line.
    MultiPoly refl = c(vs, -1) - k;
    CHECK(m.comps[2] == m.comps[0].substitute_poly("k", refl));

    // Left-right action on components: j_i picks up (-1)^i.
    CHECK(kjc::lr_swap(m.comps[0]) == m.comps[0]);
    CHECK(kjc::lr_swap(m.comps[1]) == -m.comps[1]);
    CHECK(kjc::lr_swap(m.comps[2]) == m.comps[2]);
}

namespace {

// Reference n=2 two-sided building blocks (d stands for either l or r).
MultiPoly h0_block(const MultiPoly& k, const MultiPoly& d0, const MultiPoly& d1) {
    return Rat(1) +
           (k - Rat(1)) * k *
               (d0 + (k - Rat(2)) * (k + Rat(1)) *
                         (Rat(6) - Rat(3) * (k - Rat(3)) * (k - Rat(1)) * k * (k + Rat(2)) * d1) *
                         d1);
}

MultiPoly j0_block(const MultiPoly& k, const MultiPoly& d0, const MultiPoly& d1) {
    MultiPoly k2 = k * k;
    return (k2 + k + Rat(3)) * d0 + Rat(1) +
           Rat(6) * (k2 * k2 + Rat(2) * k2 * k + k2 + Rat(6)) * d1 -
           Rat(3) * (k2 - Rat(9)) * (k2 - Rat(4)) * (k2 - Rat(1)) * k * (k + Rat(4)) * d1 * d1;
}

MultiPoly j1_block(const MultiPoly& k, const MultiPoly& d0, const MultiPoly& d1) {
    return k * (k + Rat(1)) *
               (d0 + Rat(3) * (k - Rat(1)) * (k + Rat(2)) *
                         (Rat(2) - (k - Rat(2)) * k * (k + Rat(1)) * (k + Rat(3)) * d1) * d1) +
           Rat(1);
}

}  // namespace

TEST_CASE("two-sided n=2 lift matches the reference closed form up to parameter scaling") {
    kjc::ParametricMap m = kjc::lift(Family::kTwoSided, 2);
    REQUIRE(m.comps.size() == 5);
    CHECK(kjc::degree_in_k(m) == 16);
    check_homogeneous(m);

    VarSet vs = VarSet::of({"l0", "l1", "r0", "r1", "h", "k"});
    MultiPoly l0 = v(vs, "l0"), l1 = v(vs, "l1"), r0 = v(vs, "r0"), r1 = v(vs, "r1");
    MultiPoly k = v(vs, "k");
    MultiPoly ks = k + Rat(1);

    // The n=2 reference forms are quoted in the same rescaled source
    // coordinates as the one-sided case, (d0, d1) -> (2 d0, 24 d1) for both
    // d = l and d = r; one substitution must align every component.
    std::vector<MultiPoly> scaled;
    for (const auto& comp : m.comps)
        scaled.push_back(comp.substitute_poly("l0", Rat(2) * l0)
                             .substitute_poly("l1", Rat(24) * l1)
                             .substitute_poly("r0", Rat(2) * r0)
                             .substitute_poly("r1", Rat(24) * r1));

    // H(k) = (H0(k,l)H0(k+1,r) + H0(k,r)H0(k+1,l))/2 - 36(k^2-1)k^2(l1-r1)^2.
    MultiPoly diff2 = (l1 - r1) * (l1 - r1);
    MultiPoly H = (h0_block(k, l0, l1) * h0_block(ks, r0, r1) +
                   h0_block(k, r0, r1) * h0_block(ks, l0, l1)) /
                      Rat(2) -
                  Rat(36) * (k * k - Rat(1)) * k * k * diff2;
    CHECK(scaled[0] == kjc::homogenize_coords(H, 4));

    // J(k) = (J0(k,l)J1(k,r) + J0(k,r)J1(k,l))/2 + 108(k^2-1)k(k+2)(l1-r1)^2.
    MultiPoly J = (j0_block(k, l0, l1) * j1_block(k, r0, r1) +
                   j0_block(k, r0, r1) * j1_block(k, l0, l1)) /
                      Rat(2) +
                  Rat(108) * (k * k - Rat(1)) * k * (k + Rat(2)) * diff2;
    CHECK(scaled[2] == kjc::homogenize_coords(J, 4));

    // Outer pair is the same function shifted by one in k.
    MultiPoly Hs = (h0_block(ks, l0, l1) * h0_block(ks + Rat(1), r0, r1) +
                    h0_block(ks, r0, r1) * h0_block(ks + Rat(1), l0, l1)) /
                       Rat(2) -
                   Rat(36) * (ks * ks - Rat(1)) * ks * ks * diff2;
    CHECK(scaled[4] == kjc::homogenize_coords(Hs, 4));
    CHECK(m.comps[3] == m.comps[1].substitute_poly("k", ks));

    // The antisymmetric component: quoted monomial count and k-degree, unit
    // bare-l0 coefficient, odd left-right parity.
    CHECK(kjc::coord_monomial_count(m.comps[1]) == 12);
    CHECK(m.comps[1].degree_in("k") == 10);
    CHECK(m.comps[1].coefficient_in("l0", 1).coefficient_in("h", 3) == MultiPoly::one(vs));
    CHECK(kjc::lr_swap(m.comps[1]) == -m.comps[1]);
    CHECK(kjc::lr_swap(m.comps[2]) == m.comps[2]);
    CHECK(kjc::lr_swap(m.comps[4]) == m.comps[4]);
    CHECK(kjc::coord_monomial_count(m.comps[0]) == 16);
    CHECK(kjc::coord_monomial_count(m.comps[2]) == 16);

    // Reflection k -> -1-k reverses the component order.
    MultiPoly refl = c(vs, -1) - k;
    for (int i = 0; i < 5; ++i)
        CHECK(m.comps[static_cast<std::size_t>(4 - i)] ==
              m.comps[static_cast<std::size_t>(i)].substitute_poly("k", refl));
}

TEST_CASE("normalization matches the k=1 expansion and is idempotent") {
    kjc::ExpansionVector e = kjc::expansion_at_k(Family::kOneSided, 1, 1);
    std::vector<MultiPoly> norm = kjc::normalize_components(e);
    REQUIRE(norm.size() == 2);
    VarSet vs = VarSet::of({"l0"});
    MultiPoly l0 = v(vs, "l0");
    CHECK(norm[0] == l0 + Rat(1));
    CHECK(norm[1] == Rat(3) * l0 + Rat(1));

    kjc::ExpansionVector renorm = e;
    renorm.coeffs = norm;
    CHECK(kjc::normalize_components(renorm) == norm);
}

TEST_CASE("normalization failure reports the offending component") {
    kjc::ExpansionVector e;
    e.family = Family::kOneSided;
    e.n = 2;
    e.k = 9;
    VarSet vs = VarSet::of({"l0", "l1"});
    e.coeffs = {MultiPoly::one(vs), v(vs, "l1")};
    CHECK_THROWS_AS(kjc::normalize_components(e), kjc::NormalizationFailure);
    try {
        kjc::normalize_components(e);
    } catch (const kjc::NormalizationFailure& f) {
        CHECK(f.k == 9);
        CHECK(f.component == 1);
    }
}

TEST_CASE("homogenization pads with h and rejects overflow") {
    VarSet vs = VarSet::of({"l0", "l1", "k"});
    MultiPoly l0 = v(vs, "l0"), l1 = v(vs, "l1"), k = v(vs, "k");
    MultiPoly p = k * l0 + l0 * l1 + Rat(1);
    MultiPoly q = kjc::homogenize_coords(p, 2);

    VarSet hs = VarSet::of({"l0", "l1", "h", "k"});
    MultiPoly hv = v(hs, "h");
    MultiPoly expect = v(hs, "k") * v(hs, "l0") * hv + v(hs, "l0") * v(hs, "l1") + hv * hv;
    CHECK(q == expect);
    CHECK_THROWS_AS(kjc::homogenize_coords(l0 * l0 * l1, 2), std::invalid_argument);
}

TEST_CASE("specializing the lift at a fresh integer matches a direct solve") {
    struct Case {
        Family fam;
        int n;
        int fresh_k;
    };
    for (Case tc : {Case{Family::kOneSided, 1, 12}, Case{Family::kOneSided, 2, 17},
                    Case{Family::kTwoSided, 1, 14}}) {
        kjc::ParametricMap m = kjc::lift(tc.fam, tc.n);
        std::vector<MultiPoly> direct =
            kjc::normalize_components(kjc::expansion_at_k(tc.fam, tc.n, tc.fresh_k));
        REQUIRE(direct.size() == m.comps.size());
        for (std::size_t i = 0; i < m.comps.size(); ++i) {
            MultiPoly at_k =
                m.comps[i].substitute("k", Rat(tc.fresh_k)).substitute("h", Rat(1));
            CHECK(at_k == direct[i]);
        }
    }
}

TEST_CASE("lift works identically with a thread pool") {
    kjc::LiftOptions opt;
    opt.threads = 3;
    kjc::ParametricMap a = kjc::lift(Family::kTwoSided, 1, opt);
    kjc::ParametricMap b = kjc::lift(Family::kTwoSided, 1);
    REQUIRE(a.comps.size() == b.comps.size());
    for (std::size_t i = 0; i < a.comps.size(); ++i) CHECK(a.comps[i] == b.comps[i]);
}

TEST_CASE("degree helpers") {
    kjc::ParametricMap constant_map;
    constant_map.family = Family::kOneSided;
    constant_map.n = 1;
    VarSet vs = VarSet::of({"l0", "h"});
    constant_map.comps = {v(vs, "h"), v(vs, "l0")};
    CHECK(kjc::degree_in_k(constant_map) == 0);

    CHECK(kjc::degree_bound_in_k(Family::kOneSided, 3) == 18);
    CHECK(kjc::degree_bound_in_k(Family::kOneSided, 4) == 32);
    CHECK(kjc::degree_bound_in_k(Family::kTwoSided, 2) == 16);
    CHECK(kjc::sample_kmin(Family::kOneSided, 4) == 5);
    CHECK(kjc::sample_kmin(Family::kTwoSided, 2) == 5);
}
