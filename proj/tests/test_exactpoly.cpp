// Exact polynomial kernel: fixed-value oracles first, then algebraic
// properties on small pseudo-random inputs.

#include <catch2/catch_amalgamated.hpp>

#include "kjc/polyio.hpp"
#include "kjc/polymatrix.hpp"

using namespace kjc;

namespace {

// tiny deterministic generator for property checks
struct Lcg {
    std::uint64_t s;
    explicit Lcg(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        return s >> 33;
    }
    int range(int lo, int hi) { return lo + static_cast<int>(next() % (hi - lo + 1)); }
};

MultiPoly random_poly(Lcg& g, const VarSet& vs, int max_terms, int max_exp) {
    std::vector<MultiPoly::Term> ts;
    int n = g.range(0, max_terms);
    for (int t = 0; t < n; ++t) {
        Mono m = Mono::unit(vs.size());
        unsigned tot = 0;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            m.e[i] = static_cast<std::uint16_t>(g.range(0, max_exp));
            tot += m.e[i];
        }
        m.total = static_cast<std::uint16_t>(tot);
        int num = g.range(-6, 6);
        int den = g.range(1, 4);
        ts.push_back({m, rat_make(num, den)});
    }
    return MultiPoly::from_terms(vs, std::move(ts));
}

}  // namespace

TEST_CASE("rational canonical form") {
    CHECK(rat_str(rat_parse("-6/4")) == "-3/2");
    CHECK(rat_str(rat_parse("5")) == "5");
    CHECK(rat_make(6, -4) == rat_parse("-3/2"));
    CHECK(rat_str(rat_pow(rat_parse("-2/3"), 3)) == "-8/27");
    CHECK_THROWS(rat_parse("1/0"));
    CHECK(int_nth_root(Int(64), 3).value() == 4);
    CHECK(!int_nth_root(Int(65), 3).has_value());
    CHECK(int_nth_root(Int(-27), 3).value() == -3);
    CHECK(!int_nth_root(Int(-4), 2).has_value());
}

TEST_CASE("monomial order is descending graded-lex") {
    VarSet vs = VarSet::of({"l0", "l1"});
    auto l0 = MultiPoly::variable(vs, "l0");
    auto l1 = MultiPoly::variable(vs, "l1");
    MultiPoly p = l0 * l1 + l1 * l1 + l0.pow(3);
    REQUIRE(p.nterms() == 3);
    CHECK(p.str() == "l0^3 + l0 l1 + l1^2");
    // significance order across kinds: x > j > l > r > h > k
    VarSet all = VarSet::of({"k", "h", "x", "j0", "l0", "r0"});
    CHECK(all.name(0) == "x");
    CHECK(all.name(1) == "j0");
    CHECK(all.name(2) == "l0");
    CHECK(all.name(3) == "r0");
    CHECK(all.name(4) == "h");
    CHECK(all.name(5) == "k");
}

TEST_CASE("ring arithmetic on fixed examples") {
    VarSet vs = VarSet::of({"l0", "h"});
    auto l0 = MultiPoly::variable(vs, "l0");
    auto h = MultiPoly::variable(vs, "h");
    CHECK((l0 + h) * (l0 - h) == l0 * l0 - h * h);
    CHECK((l0 + h).pow(2) == l0 * l0 + Rat(2) * l0 * h + h * h);
    // arithmetic across different varsets unifies them
    auto k = MultiPoly::variable(VarSet::of({"k"}), "k");
    MultiPoly mixed = l0 * k + h;
    CHECK(mixed.degree() == 2);
    CHECK(mixed.vars().size() == 3);
}

TEST_CASE("derivative") {
    VarSet vs = VarSet::of({"l0", "h"});
    auto l0 = MultiPoly::variable(vs, "l0");
    auto h = MultiPoly::variable(vs, "h");
    MultiPoly p = l0 * l0 * h + Rat(3) * l0;
    CHECK(p.derivative("l0") == Rat(2) * l0 * h + MultiPoly::constant(vs, 3));
    CHECK(p.derivative("h") == l0 * l0);
    CHECK(p.derivative("k").is_zero());
}

TEST_CASE("definite integral over [-1,1]") {
    // (1-x)(2x + c) integrates to 2c - 4/3; the symbolic constant is l0
    VarSet vs = VarSet::of({"x", "l0"});
    auto x = MultiPoly::variable(vs, "x");
    auto c = MultiPoly::variable(vs, "l0");
    MultiPoly u = (MultiPoly::one(vs) - x) * (Rat(2) * x + c);
    MultiPoly val = u.definite_integral_unit("x");
    CHECK(val == Rat(2) * c - MultiPoly::constant(vs, rat_parse("4/3")));
    // pure powers: even 2/(m+1), odd 0
    CHECK(x.pow(4).definite_integral_unit("x") == MultiPoly::constant(vs, rat_parse("2/5")));
    CHECK(x.pow(5).definite_integral_unit("x").is_zero());
}

TEST_CASE("content and primitive part") {
    VarSet vs = VarSet::of({"l0", "h"});
    auto l0 = MultiPoly::variable(vs, "l0");
    auto h = MultiPoly::variable(vs, "h");
    MultiPoly p = rat_parse("4/3") * l0 * h + rat_parse("2/3") * h * h;
    auto [c, prim] = p.content_primitive();
    CHECK(c == rat_parse("2/3"));
    CHECK(prim == Rat(2) * l0 * h + h * h);
    CHECK(c * prim == p);
    // sign lives in the content; primitive part has positive leading coefficient
    MultiPoly q = Rat(-4) * l0 - Rat(6) * h;
    auto [cq, pq] = q.content_primitive();
    CHECK(cq == Rat(-2));
    CHECK(pq == Rat(2) * l0 + Rat(3) * h);
}

TEST_CASE("exact division") {
    VarSet vs = VarSet::of({"l0", "h"});
    auto l0 = MultiPoly::variable(vs, "l0");
    auto h = MultiPoly::variable(vs, "h");
    auto q = MultiPoly::divexact(l0 * l0 - h * h, l0 + h);
    REQUIRE(q.has_value());
    CHECK(*q == l0 - h);
    CHECK(!MultiPoly::divexact(l0 * l0 + h, l0 + h).has_value());
}

TEST_CASE("substitution and evaluation") {
    VarSet vs = VarSet::of({"l0", "h", "k"});
    auto l0 = MultiPoly::variable(vs, "l0");
    auto h = MultiPoly::variable(vs, "h");
    auto k = MultiPoly::variable(vs, "k");
    MultiPoly p = k * k * l0 + k * h;
    CHECK(p.substitute("k", Rat(3)) == Rat(9) * l0 + Rat(3) * h);
    // reflection-style substitution k -> -3-k
    MultiPoly half = rat_parse("1/2") * (k * k + k);  // k(k+1)/2
    MultiPoly reflected = half.substitute_poly("k", -k - MultiPoly::constant(vs, 3));
    CHECK(reflected == rat_parse("1/2") * (k + MultiPoly::constant(vs, 2)) *
                           (k + MultiPoly::constant(vs, 3)));
    CHECK(p.evaluate({rat_parse("2"), rat_parse("1/2"), rat_parse("-1")}) ==
          rat_parse("3/2"));
}

TEST_CASE("json round trip is bit-exact") {
    VarSet vs = VarSet::of({"l0", "l1", "h", "k"});
    auto l0 = MultiPoly::variable(vs, "l0");
    auto l1 = MultiPoly::variable(vs, "l1");
    auto h = MultiPoly::variable(vs, "h");
    Rat big = rat_pow(Rat(2), 200) + Rat(1);
    MultiPoly p = big * l0 * l1.pow(3) - rat_parse("7/11") * h.pow(2) + MultiPoly::one(vs);
    std::string s1 = json_dump(poly_to_json(p));
    MultiPoly q = poly_from_json(Json::parse(s1));
    CHECK(q == p);
    CHECK(json_dump(poly_to_json(q)) == s1);

    Lcg g(42);
    for (int it = 0; it < 20; ++it) {
        MultiPoly r = random_poly(g, vs, 8, 4);
        CHECK(poly_from_json(poly_to_json(r)) == r);
    }
}

TEST_CASE("multivariate gcd") {
    VarSet vs = VarSet::of({"l0", "h"});
    auto l0 = MultiPoly::variable(vs, "l0");
    auto h = MultiPoly::variable(vs, "h");
    CHECK(multivariate_gcd(l0 * l0 - h * h, (l0 + h) * (l0 + h)) == l0 + h);
    CHECK(multivariate_gcd(Rat(4) * l0, Rat(6) * l0 * h) == l0);
    CHECK(multivariate_gcd(MultiPoly::constant(vs, 4), Rat(6) * h) ==
          MultiPoly::one(vs));

    Lcg g(7);
    VarSet vs3 = VarSet::of({"l0", "l1", "h"});
    for (int it = 0; it < 10; ++it) {
        MultiPoly a = random_poly(g, vs3, 4, 2);
        MultiPoly b = random_poly(g, vs3, 4, 2);
        MultiPoly f = random_poly(g, vs3, 3, 2);
        if (f.is_zero()) continue;
        MultiPoly gg = multivariate_gcd(a * f, b * f);
        if (a.is_zero() && b.is_zero()) continue;
        // f divides the gcd of (af, bf)
        CHECK(MultiPoly::divexact(gg, f.primitive_part()).has_value());
    }
}

TEST_CASE("nth_root certifies exact powers") {
    VarSet vs = VarSet::of({"j0", "j1", "l0", "h", "k"});
    auto l0 = MultiPoly::variable(vs, "l0");
    auto h = MultiPoly::variable(vs, "h");
    auto j0 = MultiPoly::variable(vs, "j0");
    auto j1 = MultiPoly::variable(vs, "j1");
    auto k = MultiPoly::variable(vs, "k");

    MultiPoly base = l0 + Rat(2) * h;
    auto r3 = nth_root(base.pow(3), 3);
    REQUIRE(r3.has_value());
    CHECK(*r3 == base);

    MultiPoly gam = (k + MultiPoly::one(vs)) * (j0 - j1);
    auto r2 = nth_root(gam.pow(2), 2);
    REQUIRE(r2.has_value());
    CHECK(*r2 == gam);  // even roots come back with positive leading coefficient

    CHECK(nth_root(Rat(4) * l0 * l0, 2).value() == Rat(2) * l0);
    CHECK(nth_root(Rat(-8) * l0.pow(3), 3).value() == Rat(-2) * l0);
    CHECK(!nth_root(l0 * l0 + h, 2).has_value());
    CHECK(!nth_root(l0.pow(2) + h.pow(2), 2).has_value());

    Lcg g(11);
    VarSet vs2 = VarSet::of({"l0", "h"});
    for (int it = 0; it < 8; ++it) {
        MultiPoly f = random_poly(g, vs2, 3, 2);
        if (f.is_zero()) continue;
        unsigned m = static_cast<unsigned>(g.range(2, 4));
        auto r = nth_root(f.pow(m), m);
        REQUIRE(r.has_value());
        CHECK(r->pow(m) == f.pow(m));
    }
}

TEST_CASE("rational root isolation") {
    VarSet vs = VarSet::of({"k"});
    auto k = MultiPoly::variable(vs, "k");
    auto c = [&](const char* s) { return MultiPoly::constant(vs, rat_parse(s)); };

    // (2k+1)(k+2)^2
    MultiPoly p = (Rat(2) * k + c("1")) * (k + c("2")).pow(2);
    auto rr = rational_roots(p, var_parse("k"));
    REQUIRE(rr.roots.size() == 2);
    CHECK(rr.roots[0].first == Rat(-2));
    CHECK(rr.roots[0].second == 2);
    CHECK(rr.roots[1].first == rat_parse("-1/2"));
    CHECK(rr.roots[1].second == 1);
    CHECK(rr.cofactor == MultiPoly::one(vs));

    // k(k^2 - 2): irrational pair certified into the cofactor
    MultiPoly q = k * (k * k - c("2"));
    auto rq = rational_roots(q, var_parse("k"));
    REQUIRE(rq.roots.size() == 1);
    CHECK(rq.roots[0].first == Rat(0));
    CHECK(rq.cofactor == k * k - c("2"));

    // clustered roots at distance 1/2 with multiplicities
    MultiPoly w = (k + c("1")) * (k + c("3/2")).pow(3) * (k + c("2"));
    auto rw = rational_roots(w, var_parse("k"));
    REQUIRE(rw.roots.size() == 3);
    CHECK(rw.roots[0].first == Rat(-2));
    CHECK(rw.roots[1].first == rat_parse("-3/2"));
    CHECK(rw.roots[1].second == 3);
    CHECK(rw.roots[2].first == Rat(-1));
}

TEST_CASE("newton interpolation") {
    VarSet vs = VarSet::of({"l0", "h", "k"});
    auto k = MultiPoly::variable(vs, "k");
    auto l0 = MultiPoly::variable(vs, "l0");
    auto h = MultiPoly::variable(vs, "h");

    MultiPoly truth = k * k - MultiPoly::constant(vs, rat_parse("1/2"));
    std::vector<std::pair<Rat, MultiPoly>> pts;
    for (int x = 0; x <= 2; ++x)
        pts.push_back({Rat(x), MultiPoly::constant(vs, truth.evaluate({Rat(0), Rat(0), Rat(x)}))});
    CHECK(newton_interpolate(var_parse("k"), pts) == truth);

    // polynomial-valued samples
    MultiPoly pm = l0 * k + h;
    std::vector<std::pair<Rat, MultiPoly>> pv;
    for (int x = 0; x <= 1; ++x) pv.push_back({Rat(x), pm.substitute("k", Rat(x))});
    CHECK(newton_interpolate(var_parse("k"), pv) == pm);
}

TEST_CASE("rational function reconstruction") {
    // f(k) = (k^2 + 1) / (2k + 3)
    auto f = [](const Rat& x) -> Rat { return Rat(x * x + 1) / Rat(2 * x + 3); };
    std::vector<std::pair<Rat, Rat>> samples;
    for (int x = 0; x <= 5; ++x) samples.push_back({Rat(x), f(Rat(x))});
    auto rf = ratfun_reconstruct(samples, 2, 1);
    REQUIRE(rf.has_value());
    REQUIRE(rf->den.deg() == 1);
    CHECK(rf->den.c[0] == 3);
    CHECK(rf->den.c[1] == 2);
    REQUIRE(rf->num.deg() == 2);
    CHECK(rf->num.c[0] == 1);
    CHECK(rf->num.c[1] == 0);
    CHECK(rf->num.c[2] == 1);
    // degree bound too small -> no reconstruction
    CHECK(!ratfun_reconstruct(samples, 1, 0).has_value());
}

TEST_CASE("fraction-free kernel") {
    VarSet vs = VarSet::of({"x"});
    auto x = MultiPoly::variable(vs, "x");
    PolyMatrix m = PolyMatrix::make(vs, 2, 2);
    m.at(0, 0) = x;
    m.at(0, 1) = x * x;
    m.at(1, 0) = MultiPoly::one(vs);
    m.at(1, 1) = x;
    auto kr = kernel_fraction_free(m);
    REQUIRE(kr.status == KernelStatus::kOk);
    CHECK(kr.rank == 1);
    REQUIRE(kr.vec.size() == 2);
    CHECK(kr.vec[0] == x);
    CHECK(kr.vec[1] == MultiPoly::constant(vs, -1));
    // primitivity of the kernel vector
    CHECK(gcd_many(kr.vec) == MultiPoly::one(vs));

    PolyMatrix id = PolyMatrix::make(vs, 2, 2);
    id.at(0, 0) = MultiPoly::one(vs);
    id.at(1, 1) = MultiPoly::one(vs);
    CHECK(kernel_fraction_free(id).status == KernelStatus::kFullRank);

    PolyMatrix wide = PolyMatrix::make(vs, 1, 3);
    wide.at(0, 0) = x;
    CHECK(kernel_fraction_free(wide).status == KernelStatus::kNullityAtLeastTwo);
}

TEST_CASE("determinants: fraction-free and expansion routes agree") {
    VarSet vs = VarSet::of({"l0", "h"});
    auto l = MultiPoly::variable(vs, "l0");
    auto h = MultiPoly::variable(vs, "h");
    PolyMatrix m = PolyMatrix::make(vs, 2, 2);
    m.at(0, 0) = l;
    m.at(0, 1) = h;
    m.at(1, 0) = h;
    m.at(1, 1) = l;
    CHECK(bareiss_det(m) == l * l - h * h);
    CHECK(det_expansion(m) == l * l - h * h);

    Lcg g(23);
    for (int it = 0; it < 6; ++it) {
        PolyMatrix r = PolyMatrix::make(vs, 3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) r.at(i, j) = random_poly(g, vs, 3, 2);
        CHECK(bareiss_det(r) == det_expansion(r));
    }
}

TEST_CASE("ring axioms on random polynomials") {
    Lcg g(99);
    VarSet vs = VarSet::of({"l0", "l1", "h"});
    for (int it = 0; it < 15; ++it) {
        MultiPoly a = random_poly(g, vs, 5, 3);
        MultiPoly b = random_poly(g, vs, 5, 3);
        MultiPoly c = random_poly(g, vs, 5, 3);
        CHECK((a + b) * c == a * c + b * c);
        CHECK(a + (-a) == MultiPoly::zero(vs));
        CHECK(a * b == b * a);
        CHECK((a * b).derivative("l0") ==
              a.derivative("l0") * b + a * b.derivative("l0"));
        if (!b.is_zero()) {
            auto q = MultiPoly::divexact(a * b, b);
            REQUIRE(q.has_value());
            CHECK(*q == a);
        }
    }
}

TEST_CASE("text rendering of map components") {
    VarSet vs = VarSet::of({"l0", "h", "k"});
    auto l0 = MultiPoly::variable(vs, "l0");
    auto h = MultiPoly::variable(vs, "h");
    auto k = MultiPoly::variable(vs, "k");
    MultiPoly comp = h + rat_parse("1/2") * (k * k + k) * l0;
    CHECK(format_component_text(comp) == "h + k(k+1)/2 l0");
    MultiPoly comp2 = h + rat_parse("1/2") * (k * k + Rat(3) * k + Rat(2)) * l0;
    CHECK(format_component_text(comp2) == "h + (k+1)(k+2)/2 l0");
    CHECK(format_map_text({comp, comp2}) ==
          "( h + k(k+1)/2 l0 : h + (k+1)(k+2)/2 l0 )");
    MultiPoly neg = h - k * l0;
    CHECK(format_component_text(neg) == "h - k l0");
}
