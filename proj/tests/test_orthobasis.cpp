// Jacobi basis and endpoint-mass pairings: closed-form oracles first,
// classical identities as properties.

#include <catch2/catch_amalgamated.hpp>

#include "kjc/orthobasis.hpp"

using namespace kjc;

namespace {

Int binom(long n, long k) {
    Int b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return b;
}

}  // namespace

TEST_CASE("jacobi polynomials: fixed values") {
    VarSet vs = VarSet::of({"x"});
    auto x = MultiPoly::variable(vs, "x");
    // P_2^{(1,1)} = (3/4)(5x^2 - 1)
    CHECK(jacobi_poly(2, 1, 1) ==
          rat_parse("15/4") * x * x - MultiPoly::constant(vs, rat_parse("3/4")));
    CHECK(jacobi_poly(0, 3, 3) == MultiPoly::one(vs));
    CHECK(jacobi_poly(1, 1, 1) == Rat(2) * x);
    CHECK(jacobi_poly(1, 2, 0) == x + MultiPoly::constant(vs, 1) + x);  // (a-b)/2 + (a+b+2)/2 x
}

TEST_CASE("jacobi normalization P(1) = C(deg+alpha, deg)") {
    for (unsigned a = 0; a <= 4; ++a)
        for (unsigned b = 0; b <= 4; ++b)
            for (unsigned d = 0; d <= 8; ++d) {
                Rat v = jacobi_poly(d, a, b).evaluate({Rat(1)});
                CHECK(v == Rat(binom(d + a, d)));
            }
}

TEST_CASE("symmetric jacobi parity J(-x) = (-1)^deg J(x)") {
    VarSet vs = VarSet::of({"x"});
    auto x = MultiPoly::variable(vs, "x");
    for (unsigned n = 1; n <= 4; ++n)
        for (unsigned d = 0; d <= 6; ++d) {
            MultiPoly J = symmetric_jacobi(d, n);
            MultiPoly refl = J.substitute_poly("x", -x);
            CHECK(refl == (d % 2 == 0 ? J : -J));
        }
}

TEST_CASE("jacobi orthogonality under the plain weight") {
    VarSet vs = VarSet::of({"x"});
    auto x = MultiPoly::variable(vs, "x");
    for (unsigned a = 0; a <= 4; ++a)
        for (unsigned b = 0; b <= 4; ++b) {
            MultiPoly wt = (MultiPoly::one(vs) - x).pow(a) * (MultiPoly::one(vs) + x).pow(b);
            for (unsigned i = 0; i <= 5; ++i)
                for (unsigned j = 0; j < i; ++j) {
                    MultiPoly integrand = wt * jacobi_poly(i, a, b) * jacobi_poly(j, a, b);
                    CHECK(integrand.definite_integral_unit("x").is_zero());
                }
        }
}

TEST_CASE("pairing oracles, one-sided n=1") {
    WeightSpec w{Family::kOneSided, 1};
    VarSet vs = VarSet::of({"x"});
    auto x = MultiPoly::variable(vs, "x");
    VarSet pv = weight_params(w);
    REQUIRE(pv.names() == std::vector<std::string>{"l0"});
    auto l0 = MultiPoly::variable(pv, "l0");

    // <1,1> = int (1-x) + l0 * (1-x)|_{x=-1} = 2 + 2 l0
    CHECK(pairing(MultiPoly::one(vs), MultiPoly::one(vs), w) ==
          MultiPoly::constant(pv, 2) + Rat(2) * l0);
    // <2x,1> = int 2x(1-x) + l0 * (2x(1-x))|_{x=-1} = -4/3 - 4 l0
    CHECK(pairing(Rat(2) * x, MultiPoly::one(vs), w) ==
          MultiPoly::constant(pv, rat_parse("-4/3")) - Rat(4) * l0);
}

TEST_CASE("pairing oracle, one-sided n=2 fixes the derivative-mass sign") {
    WeightSpec w{Family::kOneSided, 2};
    VarSet vs = VarSet::of({"x"});
    VarSet pv = weight_params(w);
    auto l0 = MultiPoly::variable(pv, "l0");
    auto l1 = MultiPoly::variable(pv, "l1");
    // u = (1-x)^2: int u = 8/3; u(-1) = 4; u'(-1) = -4, weighted by (-1)^1
    CHECK(pairing(MultiPoly::one(vs), MultiPoly::one(vs), w) ==
          MultiPoly::constant(pv, rat_parse("8/3")) + Rat(4) * l0 + Rat(4) * l1);
}

TEST_CASE("pairing oracles, two-sided n=1") {
    WeightSpec w{Family::kTwoSided, 1};
    VarSet vs = VarSet::of({"x"});
    auto x = MultiPoly::variable(vs, "x");
    VarSet pv = weight_params(w);
    auto l0 = MultiPoly::variable(pv, "l0");
    auto r0 = MultiPoly::variable(pv, "r0");
    CHECK(pairing(MultiPoly::one(vs), MultiPoly::one(vs), w) ==
          MultiPoly::constant(pv, 2) + l0 + r0);
    CHECK(pairing(Rat(2) * x, MultiPoly::one(vs), w) == Rat(2) * r0 - Rat(2) * l0);
}

TEST_CASE("pairing is symmetric and bilinear") {
    VarSet vs = VarSet::of({"x"});
    auto x = MultiPoly::variable(vs, "x");
    std::vector<MultiPoly> ps = {MultiPoly::one(vs), x, x * x - Rat(1), x.pow(3) + Rat(2) * x};
    for (Family fam : {Family::kOneSided, Family::kTwoSided})
        for (int n = 1; n <= 2; ++n) {
            WeightSpec w{fam, n};
            for (const auto& p : ps)
                for (const auto& q : ps) {
                    CHECK(pairing(p, q, w) == pairing(q, p, w));
                    CHECK(pairing(p + q, x, w) == pairing(p, x, w) + pairing(q, x, w));
                    CHECK(pairing(Rat(3) * p, q, w) == Rat(3) * pairing(p, q, w));
                }
        }
}

TEST_CASE("one-sided pairing at l = 0 reduces to the pure (1-x)^n weight") {
    VarSet vs = VarSet::of({"x"});
    auto x = MultiPoly::variable(vs, "x");
    for (int n = 1; n <= 3; ++n) {
        WeightSpec w{Family::kOneSided, n};
        MultiPoly pr = pairing(x.pow(2), x, w);
        for (int i = 0; i < n; ++i) pr = pr.substitute("l" + std::to_string(i), Rat(0));
        MultiPoly direct =
            (x.pow(3) * (MultiPoly::one(vs) - x).pow(n)).definite_integral_unit("x");
        CHECK(pr == direct.embed(pr.vars()));
    }
}
