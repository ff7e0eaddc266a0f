// Expansion coefficients of the modified-weight orthogonal polynomials:
// hand-solved low-order cases as oracles, orthogonality and symmetry as
// properties.

#include <catch2/catch_amalgamated.hpp>

#include "kjc/krall.hpp"

using namespace kjc;

TEST_CASE("one-sided n=1, k=1 expansion (hand-solved form)") {
    auto ev = expansion_at_k(Family::kOneSided, 1, 1);
    REQUIRE(ev.coeffs.size() == 2);
    VarSet pv = weight_params({Family::kOneSided, 1});
    auto l0 = MultiPoly::variable(pv, "l0");
    CHECK(ev.coeffs[0] == Rat(3) + Rat(3) * l0);
    CHECK(ev.coeffs[1] == Rat(2) + Rat(6) * l0);
}

TEST_CASE("k=0 expansion is the constant itself") {
    for (Family fam : {Family::kOneSided, Family::kTwoSided})
        for (int n = 1; n <= 2; ++n) {
            auto ev = expansion_at_k(fam, n, 0);
            CHECK(ev.coeffs[0] == MultiPoly::one(ev.coeffs[0].vars()));
            for (std::size_t i = 1; i < ev.coeffs.size(); ++i) CHECK(ev.coeffs[i].is_zero());
        }
}

TEST_CASE("assembled Q_k is orthogonal to lower powers") {
    for (int k : {1, 2, 3, 4, 5})
        CHECK(orthogonality_check(expansion_at_k(Family::kOneSided, 1, k)));
    for (int k : {3, 4, 5, 6})
        CHECK(orthogonality_check(expansion_at_k(Family::kOneSided, 2, k)));
    for (int k : {4, 5})
        CHECK(orthogonality_check(expansion_at_k(Family::kOneSided, 3, k)));
    for (int k : {2, 3, 4})
        CHECK(orthogonality_check(expansion_at_k(Family::kTwoSided, 1, k)));
    for (int k : {5, 6})
        CHECK(orthogonality_check(expansion_at_k(Family::kTwoSided, 2, k)));
}

TEST_CASE("vanishing parameters collapse Q_k onto the classical family") {
    auto zero_params = [](MultiPoly p, Family fam, int n) {
        for (int i = 0; i < n; ++i) {
            p = p.substitute("l" + std::to_string(i), Rat(0));
            if (fam == Family::kTwoSided) p = p.substitute("r" + std::to_string(i), Rat(0));
        }
        return p;
    };
    auto proportional = [](const MultiPoly& a, const MultiPoly& b) {
        REQUIRE(!a.is_zero());
        REQUIRE(!b.is_zero());
        return a * b.lead().second == b * a.lead().second;
    };
    for (Family fam : {Family::kOneSided, Family::kTwoSided})
        for (int n = 1; n <= 2; ++n) {
            int k = 2 * n + 2;
            auto ev = expansion_at_k(fam, n, k);
            MultiPoly q0 = zero_params(assemble(ev), fam, n).prune_vars();
            // one-sided weight degenerates to (1-x)^n, two-sided to Legendre
            unsigned alpha = fam == Family::kOneSided ? static_cast<unsigned>(n) : 0u;
            CHECK(proportional(q0, jacobi_poly(static_cast<unsigned>(k), alpha, 0)));
        }
}

TEST_CASE("coefficient degrees stay within the family bound") {
    for (int k : {4, 5, 6}) {
        auto ev1 = expansion_at_k(Family::kOneSided, 2, k);
        for (const auto& c : ev1.coeffs) CHECK(c.degree() <= 2);
        auto ev2 = expansion_at_k(Family::kTwoSided, 2, k);
        for (const auto& c : ev2.coeffs) CHECK(c.degree() <= 4);
    }
}

TEST_CASE("two-sided n=1: reference endpoint polynomials appear at k=2") {
    auto ev = expansion_at_k(Family::kTwoSided, 1, 2);
    REQUIRE(ev.coeffs.size() == 3);
    VarSet pv = weight_params({Family::kTwoSided, 1});
    auto l0 = MultiPoly::variable(pv, "l0");
    auto r0 = MultiPoly::variable(pv, "r0");

    // normalize by the constant term: component 0 gives 1 + 2(l0+r0) + 3 l0 r0,
    // component 2 gives 1 + 9/2(l0+r0) + 18 l0 r0
    auto normalized = [](const MultiPoly& p) {
        Rat c = p.constant_term();
        REQUIRE(c != 0);
        return p / c;
    };
    CHECK(normalized(ev.coeffs[0]) ==
          Rat(1) + Rat(2) * (l0 + r0) + Rat(3) * l0 * r0);
    CHECK(normalized(ev.coeffs[2]) ==
          Rat(1) + rat_parse("9/2") * (l0 + r0) + Rat(18) * l0 * r0);

    // middle coefficient is antisymmetric under l <-> r and proportional to l0 - r0
    CHECK(!ev.coeffs[1].is_zero());
    CHECK(lr_swap(ev.coeffs[1]) == -ev.coeffs[1]);
    CHECK(ev.coeffs[1].degree() == 1);
}

TEST_CASE("two-sided expansions are parity-equivariant under l <-> r") {
    for (int n = 1; n <= 2; ++n)
        for (int k = 2 * n; k <= 2 * n + 2; ++k) {
            auto ev = expansion_at_k(Family::kTwoSided, n, k);
            int s = 0;  // +1 or -1, fixed by the first nonzero coefficient
            for (std::size_t i = 0; i < ev.coeffs.size(); ++i) {
                if (ev.coeffs[i].is_zero()) continue;
                MultiPoly swapped = lr_swap(ev.coeffs[i]);
                int parity = (k - static_cast<int>(i)) % 2 == 0 ? 1 : -1;
                if (s == 0) {
                    if (swapped == ev.coeffs[i] * Rat(parity))
                        s = 1;
                    else if (swapped == ev.coeffs[i] * Rat(-parity))
                        s = -1;
                    REQUIRE(s != 0);
                } else {
                    CHECK(swapped == ev.coeffs[i] * Rat(s * parity));
                }
            }
        }
}

TEST_CASE("expansion input validation") {
    CHECK_THROWS_AS(expansion_at_k(Family::kOneSided, 1, -1), std::invalid_argument);
    CHECK_THROWS_AS(expansion_at_k(Family::kOneSided, 0, 3), std::invalid_argument);
}

TEST_CASE("j-coordinate parity twist") {
    VarSet vs = VarSet::of({"j0", "j1", "j2"});
    auto j0 = MultiPoly::variable(vs, "j0");
    auto j1 = MultiPoly::variable(vs, "j1");
    auto j2 = MultiPoly::variable(vs, "j2");
    CHECK(j_parity_twist(j0 + j1 + j2) == j0 - j1 + j2);
    CHECK(j_parity_twist(j1 * j1) == j1 * j1);
    CHECK(j_parity_twist(j0 * j1 * j2) == -(j0 * j1 * j2));
}
