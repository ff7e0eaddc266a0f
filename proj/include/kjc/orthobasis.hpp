#pragma once

// Classical Jacobi polynomials and the modified bilinear pairings obtained by
// adding derivative point masses at the interval endpoints.
//
// Pairing conventions (fixed once, relied on everywhere):
//   one-sided, parameter n:
//     <p, q> = I[u] + sum_{i<n} l_i * (-1)^i * (d^i u/dx^i)(-1),  u = p*q*(1-x)^n
//   two-sided, parameter n:
//     <p, q> = I[u] + sum_{i<n} ( l_i * (-1)^i * u^(i)(-1) + r_i * u^(i)(+1) ),
//     u = p*q
// where I[.] integrates over [-1, 1].  The endpoint masses act on the full
// integrand u, including the (1-x)^n factor in the one-sided case.

#include <map>
#include <mutex>
#include <tuple>

#include "kjc/multipoly.hpp"

namespace kjc {

// P_deg^{(alpha,beta)} in the standard normalization P(1) = C(deg+alpha, deg),
// built by the three-term recurrence; values are memoized.
inline MultiPoly jacobi_poly(unsigned deg, unsigned alpha, unsigned beta) {
    static std::map<std::tuple<unsigned, unsigned, unsigned>, MultiPoly> cache;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({deg, alpha, beta});
        if (it != cache.end()) return it->second;
    }
    VarSet vs = VarSet::of({"x"});
    MultiPoly x = MultiPoly::variable(vs, "x");
    MultiPoly p0 = MultiPoly::one(vs);
    if (deg == 0) {
        std::lock_guard<std::mutex> lock(mu);
        cache[{deg, alpha, beta}] = p0;
        return p0;
    }
    long a = alpha, b = beta;
    MultiPoly p1 = MultiPoly::constant(vs, rat_make(a - b, 2)) +
                   MultiPoly::constant(vs, rat_make(a + b + 2, 2)) * x;
    for (unsigned m = 2; m <= deg; ++m) {
        long n = m;
        Rat c0 = rat_make(2 * n * (n + a + b) * (2 * n + a + b - 2), 1);
        Rat c1 = rat_make((2 * n + a + b - 1) * (2 * n + a + b) * (2 * n + a + b - 2), 1);
        Rat c2 = rat_make((2 * n + a + b - 1) * (a * a - b * b), 1);
        Rat c3 = rat_make(2 * (n + a - 1) * (n + b - 1) * (2 * n + a + b), 1);
        MultiPoly p2 = (c1 * x * p1 + c2 * p1 - c3 * p0) / c0;
        p0 = p1;
        p1 = p2;
    }
    std::lock_guard<std::mutex> lock(mu);
    cache[{deg, alpha, beta}] = p1;
    return p1;
}

// The symmetric basis used by both families: alpha = beta = n.
inline MultiPoly symmetric_jacobi(unsigned deg, unsigned n) { return jacobi_poly(deg, n, n); }

struct WeightSpec {
    Family family;
    int n;
};

// Free parameters of a weight: l0..l_{n-1} (+ r0..r_{n-1} two-sided).
inline VarSet weight_params(const WeightSpec& w) {
    std::vector<Var> vars;
    for (int i = 0; i < w.n; ++i) vars.push_back({VarKind::L, static_cast<std::uint16_t>(i)});
    if (w.family == Family::kTwoSided)
        for (int i = 0; i < w.n; ++i) vars.push_back({VarKind::R, static_cast<std::uint16_t>(i)});
    return VarSet::of_vars(std::move(vars));
}

namespace detail {

// i-th x-derivative of u evaluated at x = pt (other variables symbolic).
inline MultiPoly derivative_at(const MultiPoly& u, const Var& x, unsigned i, const Rat& pt) {
    MultiPoly d = u;
    for (unsigned t = 0; t < i; ++t) d = d.derivative(x);
    return d.substitute(x, pt);
}

}  // namespace detail

// The bilinear pairing described in the header comment.  The result is a
// polynomial in the weight parameters (and any other symbolic variables of p
// and q); the x variable is eliminated.
inline MultiPoly pairing(const MultiPoly& p, const MultiPoly& q, const WeightSpec& w) {
    if (w.n < 1) throw std::invalid_argument("pairing: n must be >= 1");
    Var x = var_parse("x");
    VarSet uvs = p.vars().unite(q.vars()).unite(VarSet::of({"x"})).unite(weight_params(w));
    MultiPoly u = p.embed(uvs) * q.embed(uvs);
    if (w.family == Family::kOneSided) {
        MultiPoly one_minus_x = MultiPoly::one(uvs) - MultiPoly::variable(uvs, "x");
        u = u * one_minus_x.pow(w.n);
    }
    MultiPoly acc = u.definite_integral_unit(x);
    MultiPoly du = u;
    for (int i = 0; i < w.n; ++i) {
        if (i > 0) du = du.derivative(x);
        Var li{VarKind::L, static_cast<std::uint16_t>(i)};
        Rat sign = (i % 2 == 0) ? Rat(1) : Rat(-1);
        acc = acc + MultiPoly::variable(uvs, var_name(li)) * sign * du.substitute(x, Rat(-1));
        if (w.family == Family::kTwoSided) {
            Var ri{VarKind::R, static_cast<std::uint16_t>(i)};
            acc = acc + MultiPoly::variable(uvs, var_name(ri)) * du.substitute(x, Rat(1));
        }
    }
    return acc;
}

}  // namespace kjc
