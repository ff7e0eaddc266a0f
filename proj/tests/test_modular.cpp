// Oracle and property tests for the multi-modular inversion path: word-sized
// modular arithmetic against bignum references, primality testing against a
// sieve and GMP, CRT and bounded rational reconstruction round trips, and
// agreement of the modular solvers with the exact rational one.

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "kjc/modular.hpp"
#include "kjc/paramlift.hpp"

using kjc::Family;
using kjc::FixedMap;
using kjc::Int;
using kjc::MultiPoly;
using kjc::Rat;
using kjc::VarSet;
using kjc::mod::u64;

namespace {

MultiPoly v(const VarSet& vs, const char* name) { return MultiPoly::variable(vs, name); }

Int int_of_u64(u64 x) {
    Int hi(static_cast<unsigned long>(x >> 32));
    Int lo(static_cast<unsigned long>(x & 0xFFFFFFFFull));
    return hi * Int(1L << 32) + lo;
}

}  // namespace

TEST_CASE("modular arithmetic primitives agree with bignum arithmetic") {
    std::mt19937_64 rng(42);
    u64 p = kjc::mod::prev_prime(1ull << 62);
    std::uniform_int_distribution<u64> pick(0, p - 1);
    for (int t = 0; t < 200; ++t) {
        u64 a = pick(rng), b = pick(rng);
        Int pa = int_of_u64(a), pb = int_of_u64(b), pp = int_of_u64(p);
        CHECK(int_of_u64(kjc::mod::addmod(a, b, p)) == (pa + pb) % pp);
        CHECK(int_of_u64(kjc::mod::submod(a, b, p)) == ((pa - pb) % pp + pp) % pp);
        CHECK(int_of_u64(kjc::mod::mulmod(a, b, p)) == (pa * pb) % pp);
        if (a != 0) {
            u64 ia = kjc::mod::invmod(a, p);
            CHECK(kjc::mod::mulmod(a, ia, p) == 1);
        }
    }
    // Exponentiation against GMP.
    for (int t = 0; t < 50; ++t) {
        u64 a = pick(rng), e = pick(rng) % 100000;
        Int ref;
        Int pa = int_of_u64(a), pp = int_of_u64(p), pe(static_cast<unsigned long>(e));
        mpz_powm(ref.get_mpz_t(), pa.get_mpz_t(), pe.get_mpz_t(), pp.get_mpz_t());
        CHECK(int_of_u64(kjc::mod::powmod(a, e, p)) == ref);
    }
    // A non-invertible residue reports failure as zero.
    CHECK(kjc::mod::invmod(0, p) == 0);
    CHECK(kjc::mod::invmod(6, 9) == 0);
    CHECK(kjc::mod::mulmod(kjc::mod::invmod(5, 9), 5, 9) == 1);
}

TEST_CASE("primality testing matches a sieve and known factorizations") {
    const int N = 20000;
    std::vector<char> comp(N, 0);
    for (int i = 2; i * i < N; ++i)
        if (!comp[i])
            for (int j = i * i; j < N; j += i) comp[j] = 1;
    for (int i = 0; i < N; ++i)
        REQUIRE(kjc::mod::is_prime_u64(static_cast<u64>(i)) == (i >= 2 && !comp[i]));

    // 2^61 - 1 is a Mersenne prime; 2^62 - 1 = 3 * 715827883 * 2147483647.
    CHECK(kjc::mod::is_prime_u64((1ull << 61) - 1));
    CHECK_FALSE(kjc::mod::is_prime_u64((1ull << 62) - 1));

    // The largest prime below 2^62, cross-checked against GMP, with every
    // value in the gap composite.
    u64 p = kjc::mod::prev_prime(1ull << 62);
    Int pz = int_of_u64(p);
    CHECK(mpz_probab_prime_p(pz.get_mpz_t(), 40) > 0);
    for (u64 c = p + 1; c < (1ull << 62); ++c) {
        Int cz = int_of_u64(c);
        CHECK(mpz_probab_prime_p(cz.get_mpz_t(), 40) == 0);
    }
}

TEST_CASE("chinese remaindering and rational reconstruction round-trip") {
    u64 p1 = kjc::mod::prev_prime(1ull << 62);
    u64 p2 = kjc::mod::prev_prime(p1);
    u64 p3 = kjc::mod::prev_prime(p2);
    Int M = int_of_u64(p1) * int_of_u64(p2) * int_of_u64(p3);

    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> num(-1000000, 1000000);
    std::uniform_int_distribution<long> den(1, 1000000);

    for (int t = 0; t < 100; ++t) {
        // CRT round trip of a random value below the full modulus.
        Int x = 0;
        for (int limb = 0; limb < 3; ++limb) x = x * Int(1L << 30) + Int(rng() % (1u << 30));
        x %= M;
        Int acc = 0, modulus = 1;
        for (u64 p : {p1, p2, p3}) {
            u64 r = mpz_fdiv_ui(x.get_mpz_t(), p);
            acc = kjc::mod::crt_combine(acc, modulus, r, p);
            modulus *= int_of_u64(p);
        }
        REQUIRE(acc == x);

        // Rational reconstruction of a bounded fraction from its residue.
        Rat q = kjc::rat_make(Int(num(rng)), Int(den(rng)));
        Int d_inv;
        Int dz = q.get_den();
        REQUIRE(mpz_invert(d_inv.get_mpz_t(), dz.get_mpz_t(), M.get_mpz_t()) != 0);
        Int residue = (q.get_num() * d_inv) % M;
        if (residue < 0) residue += M;
        auto back = kjc::mod::rat_reconstruct(residue, M);
        REQUIRE(back.has_value());
        CHECK(*back == q);
    }

    CHECK(*kjc::mod::rat_reconstruct(Int(0), M) == Rat(0));
}

TEST_CASE("polynomial evaluation over a prime field matches rational evaluation") {
    VarSet vs = VarSet::of({"l0", "l1", "h"});
    MultiPoly p = v(vs, "l0") * v(vs, "l0") * kjc::rat_make(3, 7) -
                  v(vs, "l1") * v(vs, "h") * Rat(5) + MultiPoly::constant(vs, kjc::rat_make(-2, 3));
    u64 q = kjc::mod::prev_prime(1ull << 62);
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<u64> pick(1, 1000);
    for (int t = 0; t < 20; ++t) {
        std::vector<u64> pt{pick(rng), pick(rng), pick(rng)};
        Rat exact = kjc::rat_make(3, 7) * Rat(static_cast<long>(pt[0])) * Rat(static_cast<long>(pt[0])) -
                    Rat(5) * Rat(static_cast<long>(pt[1])) * Rat(static_cast<long>(pt[2])) +
                    kjc::rat_make(-2, 3);
        CHECK(kjc::mod::eval_mod(p, pt, q) == kjc::mod::rat_mod(exact, q));
    }
}

TEST_CASE("modular inversion certifies and matches the exact solver") {
    // One-sided n = 1 and n = 2, two-sided n = 1: same canonical inverse and
    // the same composition scalar from both routes.
    struct Case {
        Family fam;
        int n;
        Rat k;
    };
    for (const Case& cs : {Case{Family::kOneSided, 1, Rat(2)},
                           Case{Family::kOneSided, 2, Rat(1)},
                           Case{Family::kTwoSided, 1, Rat(3)}}) {
        kjc::ParametricMap m = kjc::lift(cs.fam, cs.n);
        FixedMap f = kjc::specialize(m, cs.k);
        kjc::InverseResult exact = kjc::invert(f);
        kjc::InverseResult fast = kjc::invert_modular(f);
        CHECK(fast.g.comps == exact.g.comps);
        CHECK(fast.lambda == exact.lambda);
    }
}

TEST_CASE("modular inversion mirrors the failure modes of the exact solver") {
    VarSet vs = VarSet::of({"l0", "h"});
    FixedMap sq = kjc::make_fixed(Family::kOneSided, 1, vs,
                                  {v(vs, "l0") * v(vs, "l0"), v(vs, "h") * v(vs, "h")});
    CHECK_THROWS_AS(kjc::invert_modular(sq), kjc::NoInverseAtDegree);

    VarSet ws = VarSet::of({"l0", "l1", "h"});
    MultiPoly a = v(ws, "l0"), b = v(ws, "l1");
    FixedMap ver = kjc::make_fixed(Family::kOneSided, 2, ws, {a * a, a * b, b * b});
    CHECK_THROWS_AS(kjc::invert_modular(ver), kjc::InverseAnomaly);
}

TEST_CASE("screened modular inversion agrees with the certified one") {
    kjc::ParametricMap m = kjc::lift(Family::kOneSided, 2);
    FixedMap f = kjc::specialize(m, Rat(1));
    FixedMap screened = kjc::invert_modular_screened(f);
    kjc::InverseResult certified = kjc::invert_modular(f);
    CHECK(screened.comps == certified.g.comps);
    CHECK(screened.degree == certified.g.degree);
    CHECK(screened.vars.size() == f.vars.size());
}

TEST_CASE("parametric inversion via modular sampling matches the exact route") {
    for (Family fam : {Family::kOneSided, Family::kTwoSided}) {
        int n = fam == Family::kOneSided ? 2 : 1;
        kjc::ParametricMap m = kjc::lift(fam, n);
        kjc::ParametricMap exact = kjc::invert_parametric(m);
        kjc::ParametricMap fast = kjc::invert_parametric_modular(m);
        REQUIRE(fast.comps.size() == exact.comps.size());
        for (std::size_t i = 0; i < fast.comps.size(); ++i)
            CHECK(fast.comps[i] == exact.comps[i]);
    }
}
