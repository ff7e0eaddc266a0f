#pragma once

// Exact integer/rational arithmetic, backed by GMP.
// Rationals are kept in canonical reduced form with positive denominator.

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace kjc {

using Int = mpz_class;
using Rat = mpq_class;

// Build a reduced rational from numerator/denominator.
inline Rat rat_make(const Int& num, const Int& den) {
    if (den == 0) throw std::invalid_argument("rat_make: zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// Parse "p" or "p/q" (optional leading '-').
inline Rat rat_parse(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0)
        throw std::invalid_argument("rat_parse: bad rational '" + s + "'");
    if (r.get_den() == 0)
        throw std::invalid_argument("rat_parse: zero denominator in '" + s + "'");
    r.canonicalize();
    return r;
}

// Canonical string: "p" when the denominator is 1, else "p/q".
inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline int rat_sgn(const Rat& r) { return sgn(r); }

inline Rat rat_pow(const Rat& base, unsigned long e) {
    Rat r;
    mpz_pow_ui(r.get_num().get_mpz_t(), base.get_num().get_mpz_t(), e);
    mpz_pow_ui(r.get_den().get_mpz_t(), base.get_den().get_mpz_t(), e);
    return r;  // base was canonical, so num^e/den^e is canonical
}

// Exact integer m-th root; returns nothing when a is not a perfect m-th power.
inline std::optional<Int> int_nth_root(const Int& a, unsigned m) {
    if (m == 0) throw std::invalid_argument("int_nth_root: m = 0");
    if (m == 1) return a;
    if (a < 0 && m % 2 == 0) return std::nullopt;
    Int r;
    int exact = mpz_root(r.get_mpz_t(), a.get_mpz_t(), m);
    if (!exact) return std::nullopt;
    return r;
}

// Exact rational m-th root of a canonical rational.
inline std::optional<Rat> rat_nth_root(const Rat& a, unsigned m) {
    auto n = int_nth_root(Int(a.get_num()), m);
    if (!n) return std::nullopt;
    auto d = int_nth_root(Int(a.get_den()), m);
    if (!d) return std::nullopt;
    return rat_make(*n, *d);
}

inline Int int_gcd(const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline Int int_lcm(const Int& a, const Int& b) {
    Int l;
    mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return l;
}

}  // namespace kjc
