#pragma once

// Polynomial algebra beyond ring arithmetic: multivariate gcd (primitive PRS,
// verified by trial division), exact n-th roots, dense univariate helpers,
// Sturm-based rational root isolation, Newton interpolation, and Cauchy
// rational-function reconstruction.

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kjc/multipoly.hpp"

namespace kjc {

namespace detail {

// Most significant variable with positive degree in p or q; nullopt if none.
inline std::optional<Var> main_variable(const MultiPoly& p, const MultiPoly& q) {
    const VarSet& vs = p.vars();
    for (std::size_t i = 0; i < vs.size(); ++i) {
        Var v = vs.at(i);
        if (p.degree_in(v) > 0 || q.degree_in(v) > 0) return v;
    }
    return std::nullopt;
}

inline MultiPoly gcd_impl(const MultiPoly& A, const MultiPoly& B);

// Content of p with respect to v: primitive gcd of the v-slices.
inline MultiPoly content_in(const MultiPoly& p, const Var& v) {
    auto slices = p.slices_in(v);
    MultiPoly g = MultiPoly::zero(p.vars());
    for (const auto& kv : slices) {
        if (g.is_zero()) {
            g = kv.second.primitive_part();
        } else {
            g = gcd_impl(g, kv.second.primitive_part());
        }
        if (g.is_constant()) break;
    }
    return g;
}

inline MultiPoly primitive_wrt(const MultiPoly& p, const Var& v) {
    MultiPoly c = content_in(p, v);
    auto q = MultiPoly::divexact(p, c);
    if (!q) throw std::logic_error("primitive_wrt: content does not divide");
    return q->primitive_part();
}

// One pseudo-remainder step chain: reduces f modulo g in v until deg_v < deg_v g.
inline MultiPoly prs_reduce(MultiPoly f, const MultiPoly& g, const Var& v) {
    int dg = g.degree_in(v);
    MultiPoly lcg = g.coefficient_in(v, dg);
    MultiPoly vp = MultiPoly::variable(f.vars().unite(g.vars()), var_name(v));
    while (!f.is_zero()) {
        int df = f.degree_in(v);
        if (df < dg) break;
        MultiPoly lcf = f.coefficient_in(v, df);
        f = lcg * f - lcf * vp.pow(df - dg) * g;
    }
    return f;
}

// Primitive-PRS gcd of primitive inputs over a common varset.
inline MultiPoly gcd_impl(const MultiPoly& A, const MultiPoly& B) {
    auto mv = main_variable(A, B);
    if (!mv) return MultiPoly::one(A.vars());  // two nonzero constants
    Var v = *mv;
    MultiPoly contA = content_in(A, v), contB = content_in(B, v);
    auto pa = MultiPoly::divexact(A, contA);
    auto pb = MultiPoly::divexact(B, contB);
    if (!pa || !pb) throw std::logic_error("gcd_impl: content division failed");
    MultiPoly contG = gcd_impl(contA, contB);

    MultiPoly f = pa->primitive_part(), g = pb->primitive_part();
    if (f.degree_in(v) < g.degree_in(v)) std::swap(f, g);
    MultiPoly part = MultiPoly::one(A.vars());
    while (true) {
        if (g.is_zero()) {
            part = primitive_wrt(f, v);
            break;
        }
        if (g.degree_in(v) == 0) break;  // coprime in v
        MultiPoly r = prs_reduce(f, g, v);
        f = g;
        g = r.is_zero() ? r : primitive_wrt(r, v);
    }
    return (contG * part).primitive_part();
}

}  // namespace detail

// Primitive gcd with positive leading coefficient; result verified by trial
// division (a hard invariant of this routine, not just a test).
inline MultiPoly multivariate_gcd(const MultiPoly& a, const MultiPoly& b) {
    if (a.is_zero() && b.is_zero()) return a;
    if (a.is_zero()) return b.primitive_part();
    if (b.is_zero()) return a.primitive_part();
    VarSet u = a.vars().unite(b.vars());
    MultiPoly A = a.embed(u).primitive_part();
    MultiPoly B = b.embed(u).primitive_part();
    MultiPoly g = detail::gcd_impl(A, B);
    if (!MultiPoly::divexact(A, g) || !MultiPoly::divexact(B, g))
        throw std::logic_error("multivariate_gcd: trial-division verification failed");
    return g;
}

inline MultiPoly gcd_many(const std::vector<MultiPoly>& ps) {
    if (ps.empty()) throw std::invalid_argument("gcd_many: empty input");
    MultiPoly g = ps[0];
    for (std::size_t i = 1; i < ps.size(); ++i) {
        if (g.is_constant() && !g.is_zero()) return g.primitive_part();
        g = multivariate_gcd(g, ps[i]);
    }
    return g.is_zero() ? g : g.primitive_part();
}

// Largest e with f^e | p (f nonconstant); returns (e, p / f^e).
inline std::pair<int, MultiPoly> peel_factor(MultiPoly p, const MultiPoly& f) {
    if (f.is_constant()) throw std::invalid_argument("peel_factor: constant factor");
    int e = 0;
    while (!p.is_zero()) {
        auto q = MultiPoly::divexact(p, f);
        if (!q) break;
        p = *q;
        ++e;
    }
    return {e, p};
}

namespace detail {

// Multisets of size m with elements in [lo, hi] and given sum; calls fn with
// (elements descending, multiplicity pattern via repeated entries).
inline void enumerate_multisets(int m, int lo, int hi, int sum, std::vector<int>& cur,
                                const std::function<void(const std::vector<int>&)>& fn) {
    if (m == 0) {
        if (sum == 0) fn(cur);
        return;
    }
    int top = cur.empty() ? hi : std::min(hi, cur.back());
    for (int v = top; v >= lo; --v) {
        if (v * m < sum || v > sum - lo * (m - 1)) continue;
        cur.push_back(v);
        enumerate_multisets(m - 1, lo, v, sum - v, cur, fn);
        cur.pop_back();
    }
}

inline Rat multinomial(int m, const std::vector<int>& elems) {
    // m! / prod (multiplicities!)
    Int num = 1;
    for (int i = 2; i <= m; ++i) num *= i;
    Int den = 1;
    int run = 1;
    for (std::size_t i = 1; i <= elems.size(); ++i) {
        if (i < elems.size() && elems[i] == elems[i - 1]) {
            ++run;
        } else {
            for (int j = 2; j <= run; ++j) den *= j;
            run = 1;
        }
    }
    return rat_make(num, den);
}

}  // namespace detail

// Exact m-th root: returns q with q^m == p, or nullopt.  The candidate is
// found by coefficient matching in the most significant present variable and
// then certified by m successive exact divisions.
inline std::optional<MultiPoly> nth_root(const MultiPoly& p, unsigned m) {
    if (m == 0) throw std::invalid_argument("nth_root: m = 0");
    if (m == 1) return p;
    if (p.is_zero()) return p;
    if (p.is_constant()) {
        auto r = rat_nth_root(p.constant_term(), m);
        if (!r) return std::nullopt;
        return MultiPoly::constant(p.vars(), *r);
    }
    auto mv = detail::main_variable(p, p);
    Var v = *mv;  // p non-constant, so a main variable exists
    int D = p.degree_in(v);
    if (D % static_cast<int>(m) != 0) return std::nullopt;
    int d = D / static_cast<int>(m);

    auto cD = p.coefficient_in(v, D);
    auto qd = nth_root(cD, m);
    if (!qd) return std::nullopt;
    std::vector<MultiPoly> q(d + 1, MultiPoly::zero(p.vars()));
    q[d] = *qd;
    MultiPoly denom = Rat(static_cast<long>(m)) * qd->pow(m - 1);

    for (int j = d - 1; j >= 0; --j) {
        // coefficient of v^((m-1)d + j) from already-known slices (all > j)
        MultiPoly conv = MultiPoly::zero(p.vars());
        std::vector<int> cur;
        detail::enumerate_multisets(static_cast<int>(m), j + 1, d, (static_cast<int>(m) - 1) * d + j,
                                    cur, [&](const std::vector<int>& t) {
                                        MultiPoly prod =
                                            MultiPoly::constant(p.vars(), detail::multinomial(static_cast<int>(m), t));
                                        for (int e : t) prod = prod * q[e];
                                        conv = conv + prod;
                                    });
        MultiPoly target = p.coefficient_in(v, (static_cast<int>(m) - 1) * d + j) - conv;
        auto qj = MultiPoly::divexact(target, denom);
        if (!qj) return std::nullopt;
        q[j] = *qj;
    }

    MultiPoly vp = MultiPoly::variable(p.vars(), var_name(v));
    MultiPoly root = MultiPoly::zero(p.vars());
    for (int j = 0; j <= d; ++j) root = root + q[j] * vp.pow(j);

    // certification: p / root / ... / root (m times) must equal 1 exactly
    MultiPoly rest = p;
    for (unsigned i = 0; i < m; ++i) {
        auto nxt = MultiPoly::divexact(rest, root);
        if (!nxt) return std::nullopt;
        rest = *nxt;
    }
    if (!rest.is_constant() || rest.constant_term() != 1) return std::nullopt;
    return root;
}

// ---------------------------------------------------------------------------
// Dense univariate layer (rational coefficients), used by root isolation,
// interpolation and rational-function reconstruction.

struct UPoly {
    std::vector<Rat> c;  // c[i] multiplies t^i; no trailing zeros

    void normalize() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    int deg() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }

    static UPoly zero() { return {}; }
    static UPoly constant(const Rat& r) {
        UPoly p;
        if (r != 0) p.c = {r};
        return p;
    }

    Rat eval(const Rat& x) const {
        Rat acc(0);
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
        return acc;
    }

    UPoly derivative() const {
        UPoly d;
        for (std::size_t i = 1; i < c.size(); ++i) d.c.push_back(c[i] * Rat(static_cast<long>(i)));
        d.normalize();
        return d;
    }

    friend UPoly operator+(const UPoly& a, const UPoly& b) {
        UPoly s;
        s.c.resize(std::max(a.c.size(), b.c.size()), Rat(0));
        for (std::size_t i = 0; i < a.c.size(); ++i) s.c[i] += a.c[i];
        for (std::size_t i = 0; i < b.c.size(); ++i) s.c[i] += b.c[i];
        s.normalize();
        return s;
    }
    friend UPoly operator-(const UPoly& a, const UPoly& b) {
        UPoly s;
        s.c.resize(std::max(a.c.size(), b.c.size()), Rat(0));
        for (std::size_t i = 0; i < a.c.size(); ++i) s.c[i] += a.c[i];
        for (std::size_t i = 0; i < b.c.size(); ++i) s.c[i] -= b.c[i];
        s.normalize();
        return s;
    }
    friend UPoly operator*(const UPoly& a, const UPoly& b) {
        if (a.is_zero() || b.is_zero()) return zero();
        UPoly s;
        s.c.assign(a.c.size() + b.c.size() - 1, Rat(0));
        for (std::size_t i = 0; i < a.c.size(); ++i)
            for (std::size_t j = 0; j < b.c.size(); ++j) s.c[i + j] += a.c[i] * b.c[j];
        s.normalize();
        return s;
    }
    friend UPoly operator*(const UPoly& a, const Rat& r) {
        UPoly s = a;
        for (auto& x : s.c) x *= r;
        s.normalize();
        return s;
    }

    // Scale by the positive rational that makes coefficients integer/coprime.
    // Sign is preserved (needed by Sturm chains).
    UPoly primitive_posscale() const {
        if (is_zero()) return *this;
        Int g(0), l(1);
        for (const auto& x : c) {
            g = int_gcd(g, Int(x.get_num()));
            l = int_lcm(l, Int(x.get_den()));
        }
        Rat f = rat_make(l, g);
        UPoly s = *this;
        for (auto& x : s.c) x *= f;
        return s;
    }
};

// Quotient and remainder of dense univariate division.
inline std::pair<UPoly, UPoly> upoly_divmod(const UPoly& a, const UPoly& b) {
    if (b.is_zero()) throw std::invalid_argument("upoly_divmod: zero divisor");
    UPoly r = a, q;
    int db = b.deg();
    if (a.deg() >= db) q.c.assign(a.deg() - db + 1, Rat(0));
    while (!r.is_zero() && r.deg() >= db) {
        Rat f = r.c.back() / b.c.back();
        int shift = r.deg() - db;
        q.c[shift] = f;
        for (int i = 0; i <= db; ++i) r.c[shift + i] -= f * b.c[i];
        r.normalize();
    }
    q.normalize();
    return {q, r};
}

inline UPoly upoly_gcd(UPoly a, UPoly b) {
    a = a.primitive_posscale();
    b = b.primitive_posscale();
    while (!b.is_zero()) {
        UPoly r = upoly_divmod(a, b).second.primitive_posscale();
        a = b;
        b = r;
    }
    if (!a.is_zero() && a.c.back() < 0) a = a * Rat(-1);
    return a;
}

// Conversion between a univariate MultiPoly (in `v`) and the dense form.
inline UPoly upoly_from(const MultiPoly& p, const Var& v) {
    int pos = p.vars().find(v);
    UPoly u;
    for (const auto& t : p.terms()) {
        for (std::size_t i = 0; i < p.vars().size(); ++i)
            if (static_cast<int>(i) != pos && t.first.e[i] != 0)
                throw std::invalid_argument("upoly_from: polynomial is not univariate in " + var_name(v));
        unsigned e = pos >= 0 ? t.first.e[pos] : 0u;
        if (u.c.size() <= e) u.c.resize(e + 1, Rat(0));
        u.c[e] = t.second;
    }
    u.normalize();
    return u;
}

inline MultiPoly upoly_to(const UPoly& u, const VarSet& vs, const Var& v) {
    int pos = vs.find(v);
    if (pos < 0) throw std::invalid_argument("upoly_to: variable not in varset");
    std::vector<MultiPoly::Term> ts;
    for (std::size_t i = 0; i < u.c.size(); ++i) {
        if (u.c[i] == 0) continue;
        Mono m = Mono::unit(vs.size());
        m.e[pos] = static_cast<std::uint16_t>(i);
        m.total = static_cast<std::uint16_t>(i);
        ts.push_back({m, u.c[i]});
    }
    return MultiPoly::from_terms(vs, std::move(ts));
}

namespace detail {

inline Int rat_floor(const Rat& r) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return q;
}

// Simplest rational (smallest denominator) strictly inside (lo, hi); hi_inf
// means the interval is (lo, +inf).  Stern-Brocot / continued-fraction walk.
inline Rat simplest_strictly_inside(const Rat& lo, bool hi_inf, const Rat& hi) {
    Int fl = rat_floor(lo);
    Rat n = Rat(fl) + 1;
    if (hi_inf || n < hi) return n;
    Rat a = Rat(1) / (hi - Rat(fl));
    if (lo == Rat(fl)) return Rat(fl) + Rat(1) / simplest_strictly_inside(a, true, Rat(0));
    return Rat(fl) + Rat(1) / simplest_strictly_inside(a, false, Rat(1) / (lo - Rat(fl)));
}

inline std::vector<UPoly> sturm_chain(const UPoly& s) {
    std::vector<UPoly> chain{s.primitive_posscale(), s.derivative().primitive_posscale()};
    while (!chain.back().is_zero() && chain.back().deg() > 0) {
        UPoly r = upoly_divmod(chain[chain.size() - 2], chain.back()).second;
        if (r.is_zero()) break;
        chain.push_back((r * Rat(-1)).primitive_posscale());
    }
    return chain;
}

inline int sturm_variations(const std::vector<UPoly>& chain, const Rat& x) {
    int var = 0, prev = 0;
    for (const auto& p : chain) {
        int s = rat_sgn(p.eval(x));
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++var;
        prev = s;
    }
    return var;
}

}  // namespace detail

struct RationalRoots {
    std::vector<std::pair<Rat, unsigned>> roots;  // ascending, with multiplicities
    MultiPoly cofactor;                           // primitive, positive leading, no rational roots
};

// All rational roots (with multiplicity) of a univariate polynomial, plus the
// certified root-free cofactor.  Sturm isolation + smallest-denominator
// search; no integer factorization involved.
inline RationalRoots rational_roots(const MultiPoly& poly, const Var& v) {
    if (poly.is_zero()) throw std::invalid_argument("rational_roots: zero polynomial");
    UPoly p = upoly_from(poly, v).primitive_posscale();
    RationalRoots out{{}, MultiPoly::zero(poly.vars())};

    // multiplicity of the root 0
    unsigned v0 = 0;
    while (static_cast<int>(v0) <= p.deg() && p.c[v0] == 0) ++v0;
    if (v0 > 0) {
        out.roots.push_back({Rat(0), v0});
        p.c.erase(p.c.begin(), p.c.begin() + v0);
    }

    if (p.deg() >= 1) {
        UPoly s = upoly_divmod(p, upoly_gcd(p, p.derivative())).first.primitive_posscale();
        // Cauchy bound: all roots lie in (-M, M]
        Rat M(1);
        for (int i = 0; i < s.deg(); ++i) {
            Rat q = abs(s.c[i] / s.c.back());
            if (q > M) M = q;
        }
        M += 1;
        auto chain = detail::sturm_chain(s);
        Int lc_bound = abs(Int(s.c.back().get_num()));  // s primitive => integer lc

        std::vector<std::pair<Rat, Rat>> stack{{-M, M}};
        std::vector<Rat> found;
        while (!stack.empty()) {
            auto [lo, hi] = stack.back();
            stack.pop_back();
            int cnt = detail::sturm_variations(chain, lo) - detail::sturm_variations(chain, hi);
            if (cnt == 0) continue;
            if (cnt > 1) {
                Rat mid = (lo + hi) / 2;
                stack.push_back({lo, mid});  // a root at mid lands in (lo, mid]
                stack.push_back({mid, hi});
                continue;
            }
            // exactly one root in (lo, hi]
            if (s.eval(hi) == 0) {
                found.push_back(hi);
                continue;
            }
            while (true) {
                Rat r = detail::simplest_strictly_inside(lo, false, hi);
                if (s.eval(r) == 0) {
                    found.push_back(r);
                    break;
                }
                if (Int(r.get_den()) > lc_bound) break;  // root certified irrational
                Rat mid = (lo + hi) / 2;
                if (s.eval(mid) == 0) {
                    found.push_back(mid);
                    break;
                }
                if (detail::sturm_variations(chain, lo) - detail::sturm_variations(chain, mid) == 1)
                    hi = mid;
                else
                    lo = mid;
            }
        }
        for (const Rat& r : found) {
            // multiplicity in the zero-stripped p
            UPoly lin;  // den*t - num
            lin.c = {-Rat(r.get_num()), Rat(r.get_den())};
            unsigned mult = 0;
            while (true) {
                auto [q, rem] = upoly_divmod(p, lin);
                if (!rem.is_zero()) break;
                p = q;
                ++mult;
            }
            out.roots.push_back({r, mult});
        }
    }

    std::sort(out.roots.begin(), out.roots.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    VarSet uv = poly.vars().contains(v) ? poly.vars() : poly.vars().unite(VarSet::of_vars({v}));
    out.cofactor = upoly_to(p.primitive_posscale(), uv, v);
    if (!out.cofactor.is_zero() && out.cofactor.lead().second < 0)
        out.cofactor = -out.cofactor;
    unsigned total_mult = 0;
    for (auto& rm : out.roots) total_mult += rm.second;
    if (static_cast<int>(total_mult) + out.cofactor.degree_in(v) !=
        upoly_from(poly, v).deg())
        throw std::logic_error("rational_roots: multiplicity bookkeeping failed");
    return out;
}

// Newton interpolation through (x_i, value_i) with polynomial values; exact.
inline MultiPoly newton_interpolate(const Var& t, std::vector<std::pair<Rat, MultiPoly>> pts) {
    if (pts.empty()) throw std::invalid_argument("newton_interpolate: no points");
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (pts[i].first == pts[j].first)
                throw std::invalid_argument("newton_interpolate: duplicate node");
    VarSet vs = VarSet::of_vars({t});
    for (const auto& p : pts) vs = vs.unite(p.second.vars());
    std::vector<MultiPoly> dd;
    dd.reserve(pts.size());
    for (const auto& p : pts) dd.push_back(p.second.embed(vs));
    for (std::size_t j = 1; j < pts.size(); ++j)
        for (std::size_t i = pts.size() - 1; i >= j; --i)
            dd[i] = (dd[i] - dd[i - 1]) / Rat(pts[i].first - pts[i - j].first);
    MultiPoly tv = MultiPoly::variable(vs, var_name(t));
    MultiPoly acc = dd.back();
    for (std::size_t i = pts.size() - 1; i-- > 0;)
        acc = acc * (tv - MultiPoly::constant(vs, pts[i].first)) + dd[i];
    return acc;
}

struct RatFun {
    UPoly num, den;  // den primitive-integer with positive leading coefficient
};

// Cauchy interpolation: rational function num/den with deg num <= dn,
// deg den <= dd matching every sample; nullopt when none exists.
inline std::optional<RatFun> ratfun_reconstruct(const std::vector<std::pair<Rat, Rat>>& samples,
                                                int dn, int dd) {
    if (static_cast<int>(samples.size()) < dn + dd + 2)
        throw std::invalid_argument("ratfun_reconstruct: too few samples");
    bool all_zero = true;
    for (const auto& s : samples)
        if (s.second != 0) all_zero = false;
    if (all_zero) return RatFun{UPoly::zero(), UPoly::constant(Rat(1))};

    // dense Newton interpolant through all samples
    std::vector<Rat> dd_tab;
    dd_tab.reserve(samples.size());
    for (const auto& s : samples) dd_tab.push_back(s.second);
    for (std::size_t j = 1; j < samples.size(); ++j)
        for (std::size_t i = samples.size() - 1; i >= j; --i)
            dd_tab[i] = (dd_tab[i] - dd_tab[i - 1]) / (samples[i].first - samples[i - j].first);
    UPoly f;
    {
        UPoly acc = UPoly::constant(dd_tab.back());
        for (std::size_t i = samples.size() - 1; i-- > 0;) {
            UPoly lin;
            lin.c = {-samples[i].first, Rat(1)};
            acc = acc * lin + UPoly::constant(dd_tab[i]);
        }
        f = acc;
    }
    UPoly M = UPoly::constant(Rat(1));
    for (const auto& s : samples) {
        UPoly lin;
        lin.c = {-s.first, Rat(1)};
        M = M * lin;
    }

    // extended Euclid on (M, f), tracking r = u*M + v*f; stop at deg r <= dn
    UPoly r0 = M, r1 = f;
    UPoly v0 = UPoly::zero(), v1 = UPoly::constant(Rat(1));
    while (!r1.is_zero() && r1.deg() > dn) {
        auto [q, r2] = upoly_divmod(r0, r1);
        UPoly v2 = v0 - q * v1;
        r0 = r1;
        r1 = r2;
        v0 = v1;
        v1 = v2;
    }
    UPoly num = r1, den = v1;
    if (den.is_zero() || den.deg() > dd) return std::nullopt;
    for (const auto& s : samples) {
        Rat dv = den.eval(s.first);
        if (dv == 0) return std::nullopt;
        if (num.eval(s.first) != s.second * dv) return std::nullopt;
    }
    // canonicalize: den primitive integer, positive leading coefficient
    UPoly dp = den.primitive_posscale();
    Rat scale = dp.c.back() / den.c.back();
    num = num * scale;
    den = dp;
    if (den.c.back() < 0) {
        den = den * Rat(-1);
        num = num * Rat(-1);
    }
    return RatFun{num, den};
}

}  // namespace kjc
