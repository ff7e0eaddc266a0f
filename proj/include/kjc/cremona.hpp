#pragma once
// Projective-map algebra for the lifted maps: specialization at a fixed k,
// composition, Jacobian determinants (direct and k-interpolated), structured
// factor extraction, certified inversion (fixed-k and parametric), linear
// inverse-factor detection, and the component-reversal / left-right symmetry
// operators.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kjc/krall.hpp"
#include "kjc/parallel.hpp"
#include "kjc/paramlift.hpp"
#include "kjc/polyalg.hpp"
#include "kjc/polyio.hpp"
#include "kjc/polymatrix.hpp"

namespace kjc {

// ----------------------------------------------------------------------------
// Errors
// ----------------------------------------------------------------------------

// All components vanish identically after specialization.
struct DegenerateMapError : std::runtime_error {
    Family family;
    int n;
    Rat k0;
    DegenerateMapError(Family f, int n_, const Rat& k)
        : std::runtime_error("all map components vanish at k = " + rat_str(k)),
          family(f),
          n(n_),
          k0(k) {}
};

// The inversion system has no solution at the requested degree.
struct NoInverseAtDegree : std::runtime_error {
    explicit NoInverseAtDegree(int degree_)
        : std::runtime_error("no inverse at degree " + std::to_string(degree_)),
          degree(degree_) {}
    int degree;
};

// The inversion system misbehaved (kernel dimension >= 2, inexact division,
// failed certification) — never expected on a birational specialization.
struct InverseAnomaly : std::runtime_error {
    explicit InverseAnomaly(const std::string& what) : std::runtime_error(what) {}
};

// ----------------------------------------------------------------------------
// FixedMap
// ----------------------------------------------------------------------------

// A projective map with rational coefficients: components are homogeneous of
// a common degree in the projective variables, jointly primitive (no common
// polynomial or rational factor), with canonical sign (the first nonzero
// component has a positive leading coefficient).
struct FixedMap {
    Family family = Family::kOneSided;
    int n = 0;
    std::vector<MultiPoly> comps;
    int degree = 0;
    VarSet vars;

    std::size_t arity() const { return vars.size(); }
};

namespace detail {

// Divide a component vector by its joint rational content and fix the sign so
// the first nonzero component has a positive leading coefficient.  Returns
// false when every component is zero.
inline bool joint_primitive(std::vector<MultiPoly>& comps) {
    Int num_gcd = 0, den_lcm = 1;
    const MultiPoly* first_nonzero = nullptr;
    for (const auto& c : comps) {
        if (c.is_zero()) continue;
        if (!first_nonzero) first_nonzero = &c;
        for (const auto& t : c.terms()) {
            num_gcd = int_gcd(num_gcd, t.second.get_num());
            den_lcm = int_lcm(den_lcm, t.second.get_den());
        }
    }
    if (!first_nonzero) return false;
    Rat content = rat_make(num_gcd, den_lcm);
    if (first_nonzero->lead().second < 0) {
        Rat neg = -content;
        content = neg;
    }
    for (auto& c : comps) {
        MultiPoly scaled = c / content;
        c = scaled;
    }
    return true;
}

// Joint polynomial gcd removal + joint rational content + canonical sign.
inline bool canonicalize_components(std::vector<MultiPoly>& comps) {
    VarSet u;
    for (const auto& c : comps) u = u.unite(c.vars());
    for (auto& c : comps) c = c.embed(u);
    std::vector<MultiPoly> nonzero;
    for (const auto& c : comps)
        if (!c.is_zero()) nonzero.push_back(c);
    if (nonzero.empty()) return false;
    MultiPoly g = gcd_many(nonzero);
    if (g.degree() > 0) {
        for (auto& c : comps) {
            auto q = MultiPoly::divexact(c, g);
            if (!q) throw std::logic_error("canonicalize_components: inexact gcd division");
            c = *q;
        }
    }
    return joint_primitive(comps);
}

// The coordinate set j_0 ... j_{nv-1} of the target projective space.
inline VarSet target_coords(std::size_t nv) {
    std::vector<Var> vars;
    for (std::size_t i = 0; i < nv; ++i)
        vars.push_back(Var{VarKind::J, static_cast<std::uint16_t>(i)});
    return VarSet::of_vars(std::move(vars));
}

// Projective coordinate set a parametric map acts on: maps written in the
// target coordinates j_i (e.g. inverses) live on the target space, all
// others on the source space given by the family convention.
inline VarSet parametric_coords(const ParametricMap& m) {
    for (const auto& c : m.comps) {
        const VarSet& vs = c.vars();
        for (std::size_t i = 0; i < vs.size(); ++i)
            if (vs.at(i).kind == VarKind::J) return target_coords(m.comps.size());
    }
    return m.coords();
}

}  // namespace detail

// Build a canonical FixedMap from raw components (joint gcd removed, jointly
// primitive, canonical sign); the variable set is kept even when unused by
// the surviving components.
inline FixedMap make_fixed(Family fam, int n, const VarSet& vars,
                           std::vector<MultiPoly> comps) {
    for (auto& c : comps) {
        MultiPoly p = c.prune_vars();
        c = p.embed(vars.unite(p.vars()));
    }
    if (!detail::canonicalize_components(comps)) throw DegenerateMapError(fam, n, Rat(0));
    FixedMap f;
    f.family = fam;
    f.n = n;
    f.vars = vars;
    for (auto& c : comps) c = c.embed(vars.unite(c.vars()));
    f.comps = std::move(comps);
    f.degree = 0;
    for (const auto& c : f.comps) f.degree = std::max(f.degree, c.degree());
    return f;
}

// Substitute k = k0 into every component, remove the joint content, and fix
// the canonical sign.  Throws DegenerateMapError when everything vanishes.
inline FixedMap specialize(const ParametricMap& m, const Rat& k0) {
    std::vector<MultiPoly> comps;
    comps.reserve(m.comps.size());
    for (const auto& c : m.comps) comps.push_back(c.substitute("k", k0).prune_vars());
    VarSet coords = detail::parametric_coords(m);
    for (auto& c : comps) c = c.embed(coords);
    if (!detail::canonicalize_components(comps)) throw DegenerateMapError(m.family, m.n, k0);
    FixedMap f;
    f.family = m.family;
    f.n = m.n;
    f.vars = coords;
    for (auto& c : comps) c = c.embed(coords);
    f.comps = std::move(comps);
    f.degree = 0;
    for (const auto& c : f.comps) f.degree = std::max(f.degree, c.degree());
    return f;
}

// The identity map on a variable set.
inline FixedMap identity_map(Family fam, int n, const VarSet& vars) {
    std::vector<MultiPoly> comps;
    for (std::size_t i = 0; i < vars.size(); ++i)
        comps.push_back(MultiPoly::variable(vars, vars.name(i)));
    FixedMap f;
    f.family = fam;
    f.n = n;
    f.vars = vars;
    f.comps = std::move(comps);
    f.degree = 1;
    return f;
}

// Evaluate p with its i-th variable replaced by values[i].
inline MultiPoly substitute_vector(const MultiPoly& p, const std::vector<MultiPoly>& values) {
    if (p.vars().size() != values.size())
        throw std::invalid_argument("substitute_vector: arity mismatch");
    if (values.empty()) return p;
    VarSet target = values[0].vars();
    for (const auto& v : values) target = target.unite(v.vars());
    std::vector<MultiPoly> embedded;
    for (const auto& v : values) embedded.push_back(v.embed(target));
    // Cache powers of each value up to the degree appearing in p.
    std::vector<std::vector<MultiPoly>> powers(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        powers[i].push_back(MultiPoly::one(target));
    MultiPoly out = MultiPoly::zero(target);
    for (const auto& t : p.terms()) {
        MultiPoly acc = MultiPoly::constant(target, t.second);
        for (std::size_t i = 0; i < values.size(); ++i) {
            unsigned e = t.first.e[i];
            while (powers[i].size() <= e) powers[i].push_back(powers[i].back() * embedded[i]);
            if (e > 0) acc = acc * powers[i][e];
        }
        out = out + acc;
    }
    return out;
}

// Substitute the inner components into the outer ones and canonicalize.
inline FixedMap compose(const FixedMap& outer, const FixedMap& inner) {
    if (outer.arity() != inner.comps.size())
        throw std::invalid_argument("compose: outer arity != inner component count");
    std::vector<MultiPoly> comps;
    comps.reserve(outer.comps.size());
    for (const auto& c : outer.comps) comps.push_back(substitute_vector(c, inner.comps));
    return make_fixed(inner.family, inner.n, inner.vars, std::move(comps));
}

// ----------------------------------------------------------------------------
// Jacobian determinants
// ----------------------------------------------------------------------------

// Determinant of the matrix of partials with respect to every projective
// variable (including h), in variable-set order.
inline MultiPoly jacobian_det(const FixedMap& f) {
    std::size_t nv = f.vars.size();
    if (f.comps.size() != nv)
        throw std::invalid_argument("jacobian_det: component count != variable count");
    PolyMatrix mat = PolyMatrix::make(f.vars, nv, nv);
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = 0; j < nv; ++j)
            mat.at(i, j) = f.comps[i].embed(f.vars).derivative(f.vars.at(j));
    return det_expansion(mat);
}

// Jacobian determinant with k symbolic.  The determinant is a polynomial of
// known-bounded degree in k, so it is recovered exactly by specializing the
// matrix at (bound+1) integer values of k and Newton-interpolating.
inline MultiPoly jacobian_det(const ParametricMap& m, unsigned threads = 1) {
    VarSet coords = detail::parametric_coords(m);
    std::size_t nv = coords.size();
    if (m.comps.size() != nv)
        throw std::invalid_argument("jacobian_det: component count != variable count");
    int entry_deg = 0;
    for (const auto& c : m.comps) entry_deg = std::max(entry_deg, c.degree_in("k"));
    int bound = static_cast<int>(nv) * entry_deg;
    std::vector<std::pair<Rat, MultiPoly>> samples(static_cast<std::size_t>(bound) + 1);
    parallel_for(samples.size(), threads, [&](std::size_t s) {
        Rat t(static_cast<long>(s));
        PolyMatrix mat = PolyMatrix::make(coords, nv, nv);
        for (std::size_t i = 0; i < nv; ++i) {
            MultiPoly ci = m.comps[i].substitute("k", t).prune_vars().embed(coords);
            for (std::size_t j = 0; j < nv; ++j) mat.at(i, j) = ci.derivative(coords.at(j));
        }
        samples[s] = {t, det_expansion(mat)};
    });
    Var kv = var_parse("k");
    MultiPoly det = newton_interpolate(kv, samples);
    return det.embed(det.vars().unite(coords));
}

// ----------------------------------------------------------------------------
// Factor shapes
// ----------------------------------------------------------------------------

// Outcome of the structured decomposition of a determinant:
//   input = content_in_k * prod factor^multiplicity * residual  (exactly).
// The decomposition succeeded when the residual is a nonzero rational
// constant; otherwise the unexplained leftover is attached verbatim.
struct FactorShape {
    MultiPoly content_in_k;
    std::vector<std::pair<MultiPoly, int>> factors;
    MultiPoly residual;

    bool explained() const { return residual.is_constant() && !residual.is_zero(); }
};

enum class ShapeKind { kForwardShape, kInverseShape };

namespace detail {

// Split off the primitive polynomial-in-k content: p = D(k) * quotient with
// D primitive and positive-leading in k.
inline MultiPoly extract_k_content(const MultiPoly& p, MultiPoly* quotient) {
    Var kv = var_parse("k");
    int kpos = p.vars().find(kv);
    if (p.is_zero() || kpos < 0 || p.degree_in(kv) <= 0) {
        if (quotient) *quotient = p;
        return MultiPoly::one(p.vars());
    }
    // Group the coefficients of each k-free monomial into univariate
    // polynomials in k and take their gcd.
    std::map<std::array<std::uint16_t, kMaxVars>, UPoly> groups;
    for (const auto& t : p.terms()) {
        auto key = t.first.e;
        unsigned ek = key[static_cast<std::size_t>(kpos)];
        key[static_cast<std::size_t>(kpos)] = 0;
        UPoly& u = groups[key];
        if (u.c.size() <= ek) u.c.resize(ek + 1, Rat(0));
        u.c[ek] = t.second;
    }
    UPoly g = UPoly::zero();
    for (auto& [key, u] : groups) {
        u.normalize();
        g = upoly_gcd(g, u);
        if (g.deg() == 0) break;
    }
    VarSet kvs = VarSet::of({"k"});
    MultiPoly content = upoly_to(g, kvs, kv).primitive_part().embed(p.vars());
    if (quotient) {
        auto q = MultiPoly::divexact(p, content);
        if (!q) throw std::logic_error("extract_k_content: inexact division");
        *quotient = *q;
    }
    return content;
}

// Total degree in the coordinate variables only (k does not count).
inline int coordinate_degree(const MultiPoly& p) {
    int kpos = p.vars().find(var_parse("k"));
    int deg = 0;
    for (const auto& t : p.terms()) {
        int d = t.first.total;
        if (kpos >= 0) d -= t.first.e[static_cast<std::size_t>(kpos)];
        deg = std::max(deg, d);
    }
    return deg;
}

// Attempt to write a left-right symmetric polynomial T as S * lr_swap(S) (up
// to a rational constant, returned separately).  Tries, in order: a direct
// quadratic split in h, single-variable gcd splits, then quadratic splits in
// the remaining variables.  Never performs general factorization.
inline std::optional<std::pair<MultiPoly, MultiPoly>> split_lr_product(const MultiPoly& T) {
    if (lr_swap(T) != T) return std::nullopt;
    auto order_pair = [](MultiPoly a, MultiPoly b) {
        a = a.primitive_part();
        b = b.primitive_part();
        VarSet u = a.vars().unite(b.vars());
        MultiPoly ea = a.embed(u), eb = b.embed(u);
        // Deterministic: the member with the greater leading monomial first.
        if (mono_cmp(eb.lead().first, ea.lead().first) > 0) std::swap(a, b);
        return std::make_pair(a, b);
    };
    auto verify = [&](const MultiPoly& s) -> std::optional<std::pair<MultiPoly, MultiPoly>> {
        MultiPoly sp = s.primitive_part();
        MultiPoly sbar = lr_swap(sp);
        MultiPoly prod = sp * sbar.embed(sp.vars().unite(sbar.vars()));
        VarSet u = prod.vars().unite(T.vars());
        MultiPoly pe = prod.embed(u), te = T.embed(u);
        if (pe.is_zero()) return std::nullopt;
        Rat scale = te.lead().second / pe.lead().second;
        MultiPoly scaled = pe * scale;
        if (scaled != te) return std::nullopt;
        return order_pair(sp, sbar);
    };
    // Quadratic split in a variable v where both candidate factors are
    // linear: T = T2 v^2 + T1 v + T0 with T1^2 - 4 T2 T0 a perfect square.
    auto quadratic_split =
        [&](const Var& v) -> std::optional<std::pair<MultiPoly, MultiPoly>> {
        if (T.degree_in(v) != 2) return std::nullopt;
        auto slices = T.slices_in(v);
        MultiPoly t2 = slices.count(2) ? slices[2] : MultiPoly::zero(T.vars());
        MultiPoly t1 = slices.count(1) ? slices[1] : MultiPoly::zero(T.vars());
        MultiPoly t0 = slices.count(0) ? slices[0] : MultiPoly::zero(T.vars());
        if (t2.is_zero() || t0.is_zero()) return std::nullopt;
        MultiPoly disc = t1 * t1 - Rat(4) * t2 * t0;
        if (disc.is_zero()) return std::nullopt;
        auto delta = nth_root(disc, 2);
        if (!delta) return std::nullopt;
        for (int sign = 0; sign < 2; ++sign) {
            MultiPoly d = sign ? -*delta : *delta;
            MultiPoly ad = (t1 + d) / Rat(2);
            MultiPoly bc = (t1 - d) / Rat(2);
            if (ad.is_zero() || bc.is_zero()) continue;
            MultiPoly a = multivariate_gcd(t2, ad);
            auto cq = MultiPoly::divexact(t2.embed(t2.vars().unite(a.vars())),
                                          a.embed(t2.vars().unite(a.vars())));
            auto dq = MultiPoly::divexact(ad.embed(ad.vars().unite(a.vars())),
                                          a.embed(ad.vars().unite(a.vars())));
            if (!cq || !dq) continue;
            VarSet u = bc.vars().unite(cq->vars());
            auto bq = MultiPoly::divexact(bc.embed(u), cq->embed(u));
            if (!bq) continue;
            VarSet w = a.vars().unite(bq->vars()).unite(T.vars());
            MultiPoly cand =
                a.embed(w) * MultiPoly::variable(w, var_name(v)) + bq->embed(w);
            if (auto r = verify(cand)) return r;
        }
        return std::nullopt;
    };
    Var hv = var_parse("h");
    if (T.vars().find(hv) >= 0)
        if (auto r = quadratic_split(hv)) return r;
    for (std::size_t i = 0; i < T.vars().size(); ++i) {
        Var v = T.vars().at(i);
        if (v.kind != VarKind::L && v.kind != VarKind::R) continue;
        MultiPoly dv = T.derivative(v);
        if (dv.is_zero()) continue;
        MultiPoly g = multivariate_gcd(T, dv);
        if (g.degree() <= 0 || g.degree() >= T.degree()) continue;
        if (auto r = verify(g)) return r;
    }
    for (std::size_t i = 0; i < T.vars().size(); ++i) {
        Var v = T.vars().at(i);
        if (v.kind == VarKind::H) continue;
        if (auto r = quadratic_split(v)) return r;
    }
    return std::nullopt;
}

}  // namespace detail

// Structured decomposition of a (forward or inverse) Jacobian determinant.
// Forward: extract the k-content, peel the designated hyperplanes (h), then
// the residual must be a perfect n-th power — of an LR-conjugate product for
// the two-sided family, which is then split.  Inverse: peel the designated
// linear factors (gamma, conjugate); a leftover of the conjectured cofactor
// degree is recorded as a multiplicity-1 factor.  Anything else stays in
// `residual` verbatim.
inline FactorShape factor_shape(const MultiPoly& d, Family fam, int n, ShapeKind kind,
                                const std::vector<MultiPoly>& designated) {
    if (d.is_zero()) throw std::invalid_argument("factor_shape: zero determinant");
    FactorShape shape;
    MultiPoly rest = d;
    shape.content_in_k = detail::extract_k_content(d, &rest);
    for (const auto& g : designated) {
        if (g.is_constant()) continue;
        VarSet u = rest.vars().unite(g.vars());
        MultiPoly gp = g.primitive_part().embed(u);
        auto [mult, quot] = peel_factor(rest.embed(u), gp);
        rest = quot;
        if (mult > 0) shape.factors.emplace_back(gp.prune_vars(), mult);
    }
    if (rest.is_constant()) {
        shape.residual = rest;
        return shape;
    }
    if (kind == ShapeKind::kForwardShape) {
        auto [c, prim] = rest.content_primitive();
        auto root = nth_root(prim, static_cast<unsigned>(n));
        if (!root) {
            shape.residual = rest;
            return shape;
        }
        MultiPoly s = root->primitive_part();
        if (fam == Family::kTwoSided) {
            if (auto pair = detail::split_lr_product(s)) {
                shape.factors.emplace_back(pair->first, n);
                shape.factors.emplace_back(pair->second, n);
                MultiPoly prod = pair->first * pair->second.embed(
                                                   pair->first.vars().unite(pair->second.vars()));
                MultiPoly re = rest.embed(rest.vars().unite(prod.vars()));
                auto q = MultiPoly::divexact(re, prod.pow(static_cast<unsigned>(n)));
                if (!q) throw std::logic_error("factor_shape: inexact split division");
                shape.residual = *q;
                return shape;
            }
        }
        shape.factors.emplace_back(s, n);
        MultiPoly re = rest.embed(rest.vars().unite(s.vars()));
        auto q = MultiPoly::divexact(re, s.embed(re.vars()).pow(static_cast<unsigned>(n)));
        if (!q) throw std::logic_error("factor_shape: inexact root division");
        shape.residual = *q;
        return shape;
    }
    int expected = (fam == Family::kOneSided) ? n - 1 : 2 * n - 1;
    if (detail::coordinate_degree(rest) == expected) {
        auto [c, prim] = rest.content_primitive();
        shape.factors.emplace_back(prim, 1);
        shape.residual = MultiPoly::constant(rest.vars(), c);
        return shape;
    }
    shape.residual = rest;
    return shape;
}

// Exact reconstruction check (the FactorShape type invariant).
inline bool factor_shape_reconstructs(const FactorShape& shape, const MultiPoly& input) {
    MultiPoly prod = shape.content_in_k;
    for (const auto& [f, m] : shape.factors) {
        VarSet u = prod.vars().unite(f.vars());
        prod = prod.embed(u) * f.embed(u).pow(static_cast<unsigned>(m));
    }
    VarSet u = prod.vars().unite(shape.residual.vars()).unite(input.vars());
    return prod.embed(u) * shape.residual.embed(u) == input.embed(u);
}

// ----------------------------------------------------------------------------
// Inversion at a fixed k
// ----------------------------------------------------------------------------

struct InverseResult {
    FixedMap g;        // components ordered like the source variables
    MultiPoly lambda;  // compose(g, f) = lambda * identity
};

// Pluggable per-sample inverter for the parametric reconstruction below;
// an empty function means the exact dense solver.
using SampleInverter = std::function<FixedMap(const FixedMap&)>;

namespace detail {

// All exponent vectors of total degree d in nv variables, in a fixed
// deterministic order (lexicographic on the exponent vector).
inline std::vector<std::vector<unsigned>> homogeneous_exponents(std::size_t nv, int d) {
    std::vector<std::vector<unsigned>> out;
    std::vector<unsigned> cur(nv, 0);
    auto rec = [&](auto&& self, std::size_t pos, int rem) -> void {
        if (pos + 1 == nv) {
            cur[pos] = static_cast<unsigned>(rem);
            out.push_back(cur);
            return;
        }
        for (int e = rem; e >= 0; --e) {
            cur[pos] = static_cast<unsigned>(e);
            self(self, pos + 1, rem - e);
        }
    };
    if (nv > 0) rec(rec, 0, d);
    return out;
}

// Monomial products F^m for every exponent vector m of degree d, computed by
// extending a lower product one factor at a time.
inline std::vector<MultiPoly> monomial_products(const std::vector<MultiPoly>& f, int d,
                                                const std::vector<std::vector<unsigned>>& monos) {
    std::size_t nv = f.size();
    std::map<std::vector<unsigned>, std::size_t> index;
    for (std::size_t i = 0; i < monos.size(); ++i) index[monos[i]] = i;
    // Build up degree by degree.
    std::map<std::vector<unsigned>, MultiPoly> prev;
    prev[std::vector<unsigned>(nv, 0)] = MultiPoly::one(f[0].vars());
    for (int deg = 1; deg <= d; ++deg) {
        std::map<std::vector<unsigned>, MultiPoly> cur;
        for (const auto& [m, p] : prev) {
            for (std::size_t i = 0; i < nv; ++i) {
                std::vector<unsigned> m2 = m;
                ++m2[i];
                if (cur.count(m2)) continue;
                cur.emplace(m2, p * f[i]);
            }
        }
        prev = std::move(cur);
    }
    std::vector<MultiPoly> out(monos.size(), MultiPoly::zero(f[0].vars()));
    for (auto& [m, p] : prev) out[index[m]] = std::move(p);
    return out;
}

// Streaming reduced row echelon form over the rationals.
class RatRref {
  public:
    explicit RatRref(std::size_t cols) : cols_(cols) {}

    void add_row(std::vector<Rat> row) {
        for (auto& [pc, br] : basis_) {
            if (row[pc] == 0) continue;
            Rat f = row[pc];
            for (std::size_t j = 0; j < cols_; ++j)
                if (br[j] != 0) row[j] -= f * br[j];
        }
        std::size_t pc = cols_;
        for (std::size_t j = 0; j < cols_; ++j)
            if (row[j] != 0) {
                pc = j;
                break;
            }
        if (pc == cols_) return;
        Rat lead = row[pc];
        for (std::size_t j = pc; j < cols_; ++j)
            if (row[j] != 0) row[j] /= lead;
        for (auto& [c, br] : basis_) {
            if (br[pc] == 0) continue;
            Rat f = br[pc];
            for (std::size_t j = 0; j < cols_; ++j)
                if (row[j] != 0) br[j] -= f * row[j];
        }
        basis_.emplace(pc, std::move(row));
    }

    std::size_t rank() const { return basis_.size(); }
    std::size_t cols() const { return cols_; }

    // Kernel vector when the nullity is exactly 1.
    std::vector<Rat> kernel_vector() const {
        std::size_t fc = cols_;
        for (std::size_t j = 0; j < cols_; ++j)
            if (!basis_.count(j)) {
                fc = j;
                break;
            }
        if (fc == cols_) throw std::logic_error("RatRref: full rank, no kernel");
        std::vector<Rat> v(cols_, Rat(0));
        v[fc] = 1;
        for (const auto& [pc, br] : basis_) {
            Rat x = -br[fc];
            v[pc] = x;
        }
        return v;
    }

  private:
    std::size_t cols_;
    std::map<std::size_t, std::vector<Rat>> basis_;
};

// Scale a rational vector to a primitive integer vector (gcd 1), preserving
// direction; sign fixed so the first nonzero entry is positive.
inline std::vector<Rat> primitive_vector(const std::vector<Rat>& v) {
    Int num_gcd = 0, den_lcm = 1;
    for (const auto& x : v) {
        if (x == 0) continue;
        num_gcd = int_gcd(num_gcd, x.get_num());
        den_lcm = int_lcm(den_lcm, x.get_den());
    }
    if (num_gcd == 0) return v;
    Rat scale = rat_make(den_lcm, num_gcd);
    std::vector<Rat> out;
    out.reserve(v.size());
    bool flip = false;
    bool seen = false;
    for (const auto& x : v) {
        Rat y = x * scale;
        if (!seen && y != 0) {
            seen = true;
            flip = y < 0;
        }
        out.push_back(y);
    }
    if (flip)
        for (auto& y : out) {
            Rat ny = -y;
            y = ny;
        }
    return out;
}

struct InverseSystem {
    VarSet target;                                // j_0 ... j_N
    std::vector<std::vector<unsigned>> monos;     // candidate exponent vectors
    std::vector<MultiPoly> products;              // F^m for each mono
};

inline InverseSystem build_inverse_system(const FixedMap& f) {
    InverseSystem sys;
    std::size_t nv = f.vars.size();
    sys.target = target_coords(nv);
    sys.monos = homogeneous_exponents(nv, f.degree);
    sys.products = monomial_products(f.comps, f.degree, sys.monos);
    return sys;
}

// Certify a candidate coefficient vector: build G, recover lambda by exact
// division, and check G(F(x)) = lambda * x componentwise.  Throws on failure.
inline InverseResult certify_inverse(const FixedMap& f, const InverseSystem& sys,
                                     const std::vector<Rat>& coeffs) {
    std::size_t nv = f.vars.size();
    std::size_t nm = sys.monos.size();
    std::vector<MultiPoly> gcomps;
    for (std::size_t i = 0; i < nv; ++i) {
        std::vector<MultiPoly::Term> terms;
        for (std::size_t m = 0; m < nm; ++m) {
            const Rat& c = coeffs[i * nm + m];
            if (c == 0) continue;
            Mono mono = Mono::unit(sys.target.size());
            for (std::size_t v = 0; v < nv; ++v) {
                mono.e[v] = static_cast<std::uint16_t>(sys.monos[m][v]);
                mono.total = static_cast<std::uint16_t>(mono.total + sys.monos[m][v]);
            }
            terms.emplace_back(mono, c);
        }
        gcomps.push_back(MultiPoly::from_terms(sys.target, std::move(terms)));
    }
    // G composed with F, using the precomputed products.
    std::vector<MultiPoly> gof(nv, MultiPoly::zero(f.comps[0].vars()));
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t m = 0; m < nm; ++m) {
            const Rat& c = coeffs[i * nm + m];
            if (c != 0) gof[i] = gof[i] + sys.products[m] * c;
        }
    MultiPoly x0 = MultiPoly::variable(f.comps[0].vars(), f.vars.name(0));
    auto lambda = MultiPoly::divexact(gof[0], x0);
    if (!lambda) throw InverseAnomaly("inverse certification: lambda division failed");
    for (std::size_t i = 0; i < nv; ++i) {
        MultiPoly xi = MultiPoly::variable(f.comps[0].vars(), f.vars.name(i));
        if (gof[i] != *lambda * xi)
            throw InverseAnomaly("inverse certification: composition identity failed");
    }
    if (lambda->is_zero()) throw InverseAnomaly("inverse certification: lambda vanishes");
    InverseResult res;
    res.g.family = f.family;
    res.g.n = f.n;
    res.g.vars = sys.target;
    res.g.comps = std::move(gcomps);
    res.g.degree = f.degree;
    res.lambda = *lambda;
    return res;
}

}  // namespace detail

// Invert a fixed map at its own degree by solving the linear system
// G_i(F(x)) x_0 - G_0(F(x)) x_i = 0 over the rationals; the kernel must be
// one-dimensional.  The result is certified by exact composition.
inline InverseResult invert(const FixedMap& f) {
    std::size_t nv = f.vars.size();
    if (f.comps.size() != nv)
        throw std::invalid_argument("invert: component count != variable count");
    detail::InverseSystem sys = detail::build_inverse_system(f);
    std::size_t nm = sys.monos.size();
    std::size_t cols = nv * nm;
    // Rows: for each identity i >= 1, the coefficients of every source
    // monomial of F^m*x_0 (column block i) and -F^m*x_i (column block 0).
    detail::RatRref rref(cols);
    VarSet svars = f.comps[0].vars();
    for (std::size_t i = 1; i < nv; ++i) {
        std::map<Mono, std::vector<std::pair<std::size_t, Rat>>, MonoGt> rows;
        MultiPoly x0 = MultiPoly::variable(svars, f.vars.name(0));
        MultiPoly xi = MultiPoly::variable(svars, f.vars.name(i));
        for (std::size_t m = 0; m < nm; ++m) {
            MultiPoly p0 = sys.products[m] * x0;
            for (const auto& t : p0.terms()) rows[t.first].emplace_back(i * nm + m, t.second);
            MultiPoly pi = sys.products[m] * xi;
            for (const auto& t : pi.terms()) rows[t.first].emplace_back(m, -t.second);
        }
        for (auto& [mono, entries] : rows) {
            std::vector<Rat> row(cols, Rat(0));
            for (auto& [c, val] : entries) row[c] += val;
            rref.add_row(std::move(row));
        }
    }
    if (rref.rank() == cols) throw NoInverseAtDegree(f.degree);
    if (cols - rref.rank() >= 2)
        throw InverseAnomaly("inversion kernel has dimension >= 2 at degree " +
                             std::to_string(f.degree));
    std::vector<Rat> kernel = detail::primitive_vector(rref.kernel_vector());
    return detail::certify_inverse(f, sys, kernel);
}

// ----------------------------------------------------------------------------
// Symmetry operators
// ----------------------------------------------------------------------------

// Left-right conjugation of a single polynomial: swap l_i <-> r_i for
// source-side polynomials, or j_i -> (-1)^i j_i for target-side ones.
inline MultiPoly lr_conjugate(const MultiPoly& p) {
    for (std::size_t i = 0; i < p.vars().size(); ++i)
        if (p.vars().at(i).kind == VarKind::J) return j_parity_twist(p);
    return lr_swap(p);
}

inline std::vector<MultiPoly> reverse_components(std::vector<MultiPoly> comps) {
    std::reverse(comps.begin(), comps.end());
    return comps;
}

inline ParametricMap reverse_components(ParametricMap m) {
    std::reverse(m.comps.begin(), m.comps.end());
    return m;
}

inline FixedMap reverse_components(FixedMap f) {
    std::reverse(f.comps.begin(), f.comps.end());
    return f;
}

// The reflection k -> -n-1-k (one-sided) or k -> -1-k (two-sided).
inline Rat reflection_point_image(Family fam, int n, const Rat& k) {
    Rat shift = (fam == Family::kOneSided) ? Rat(-n - 1) : Rat(-1);
    Rat out = shift - k;
    return out;
}

inline ParametricMap reflect_in_k(const ParametricMap& m) {
    long shift = (m.family == Family::kOneSided) ? -(m.n + 1) : -1;
    ParametricMap out = m;
    for (auto& c : out.comps) {
        c = c.embed(c.vars().unite(VarSet::of({"k"})));
        MultiPoly k = MultiPoly::variable(c.vars(), "k");
        MultiPoly image = MultiPoly::constant(c.vars(), Rat(shift)) - k;
        c = c.substitute_poly("k", image);
    }
    return out;
}

// ----------------------------------------------------------------------------
// Parametric inversion
// ----------------------------------------------------------------------------

namespace detail {

// Reference-normalized inverse sample: all components divided by one fixed
// coefficient so the per-k values are rational functions of k.
struct InverseSample {
    Rat k;
    std::vector<Rat> coeffs;  // flat (component, monomial) coefficient vector
};

inline UPoly upoly_mul(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return UPoly::zero();
    UPoly out;
    out.c.assign(static_cast<std::size_t>(a.deg() + b.deg() + 1), Rat(0));
    for (int i = 0; i <= a.deg(); ++i)
        for (int j = 0; j <= b.deg(); ++j)
            out.c[static_cast<std::size_t>(i + j)] +=
                a.c[static_cast<std::size_t>(i)] * b.c[static_cast<std::size_t>(j)];
    out.normalize();
    return out;
}

// One reconstruction attempt at a fixed degree bound in k; throws
// DegreeBoundFalsified when the bound is too small for some coefficient or
// a held-out sample disagrees.
inline ParametricMap invert_parametric_at_bound(const ParametricMap& m, int bound,
                                                const LiftOptions& opt,
                                                LiftDiagnostics* diag,
                                                const SampleInverter& inverter) {
    std::size_t need = static_cast<std::size_t>(2 * bound + 2);
    std::size_t nv = m.coords().size();
    LiftDiagnostics local;
    LiftDiagnostics& d = diag ? *diag : local;
    d = LiftDiagnostics{};

    // Candidate monomials of the inverse components.
    std::vector<std::vector<unsigned>> monos =
        detail::homogeneous_exponents(nv, map_degree(m.family, m.n));
    std::size_t nm = monos.size();
    VarSet target = detail::target_coords(nv);

    std::vector<detail::InverseSample> samples;
    int skip_budget = 12;
    std::size_t ref_index = 0;
    bool have_ref = false;
    int t = 1;
    auto sample_at = [&](int kv) -> std::optional<detail::InverseSample> {
        try {
            FixedMap f = specialize(m, Rat(kv));
            if (f.degree != map_degree(m.family, m.n)) return std::nullopt;
            FixedMap g = inverter ? inverter(f) : invert(f).g;
            detail::InverseSample s;
            s.k = Rat(kv);
            s.coeffs.assign(nv * nm, Rat(0));
            for (std::size_t i = 0; i < nv; ++i)
                for (const auto& term : g.comps[i].terms()) {
                    std::vector<unsigned> e(nv);
                    for (std::size_t v = 0; v < nv; ++v) e[v] = term.first.e[v];
                    auto it = std::find(monos.begin(), monos.end(), e);
                    if (it == monos.end()) return std::nullopt;
                    s.coeffs[i * nm + static_cast<std::size_t>(it - monos.begin())] =
                        term.second;
                }
            return s;
        } catch (const DegenerateMapError&) {
            return std::nullopt;
        } catch (const NoInverseAtDegree&) {
            return std::nullopt;
        } catch (const InverseAnomaly&) {
            return std::nullopt;
        }
    };
    while (samples.size() < need + kValidationSamples) {
        auto s = sample_at(t);
        bool ok = s.has_value();
        if (ok && !have_ref) {
            // Reference: the first nonzero coefficient of the first sample.
            for (std::size_t i = 0; i < s->coeffs.size(); ++i)
                if (s->coeffs[i] != 0) {
                    ref_index = i;
                    have_ref = true;
                    break;
                }
        }
        if (ok && s->coeffs[ref_index] == 0) ok = false;
        if (ok) {
            for (auto& c : s->coeffs)
                if (&c != &s->coeffs[ref_index]) c /= s->coeffs[ref_index];
            s->coeffs[ref_index] = 1;
            samples.push_back(std::move(*s));
            if (samples.size() <= need)
                d.interpolation_ks.push_back(t);
            else
                d.validation_ks.push_back(t);
        } else {
            d.skipped_ks.push_back(t);
            if (--skip_budget < 0)
                throw std::runtime_error("invert_parametric: skip budget exhausted");
        }
        ++t;
    }

    // Reconstruct each coefficient as a rational function of k.
    std::vector<RatFun> funs(nv * nm);
    std::vector<char> present(nv * nm, 0);
    parallel_for(nv * nm, opt.threads, [&](std::size_t idx) {
        std::vector<std::pair<Rat, Rat>> pts;
        bool any = false;
        for (std::size_t s = 0; s < need; ++s) {
            pts.emplace_back(samples[s].k, samples[s].coeffs[idx]);
            if (samples[s].coeffs[idx] != 0) any = true;
        }
        if (!any) return;
        auto fun = ratfun_reconstruct(pts, bound, bound);
        if (!fun)
            throw DegreeBoundFalsified{m.family, m.n, 0,
                                       static_cast<int>(idx / nm)};
        funs[idx] = *fun;
        present[idx] = 1;
    });

    // Common denominator in k across all coefficients.
    UPoly common = UPoly::constant(Rat(1));
    for (std::size_t idx = 0; idx < funs.size(); ++idx) {
        if (!present[idx]) continue;
        UPoly g = upoly_gcd(common, funs[idx].den);
        auto [q, r] = upoly_divmod(funs[idx].den, g);
        if (!r.is_zero()) throw std::logic_error("invert_parametric: denominator lcm");
        common = detail::upoly_mul(common, q);
    }

    Var kv = var_parse("k");
    VarSet full = target.unite(VarSet::of({"k"}));
    std::vector<MultiPoly> comps(nv, MultiPoly::zero(full));
    for (std::size_t i = 0; i < nv; ++i) {
        for (std::size_t mdx = 0; mdx < nm; ++mdx) {
            std::size_t idx = i * nm + mdx;
            if (!present[idx]) continue;
            auto [q, r] = upoly_divmod(common, funs[idx].den);
            if (!r.is_zero()) throw std::logic_error("invert_parametric: clear denominator");
            UPoly num = detail::upoly_mul(funs[idx].num, q);
            if (num.is_zero()) continue;
            MultiPoly kpoly = upoly_to(num, full, kv);
            std::vector<unsigned> exps(full.size(), 0);
            for (std::size_t v = 0; v < nv; ++v) {
                int pos = full.find(target.at(v));
                exps[static_cast<std::size_t>(pos)] = monos[mdx][v];
            }
            MultiPoly mono = MultiPoly::monomial(full, exps, Rat(1));
            comps[i] = comps[i] + kpoly * mono;
        }
    }
    if (!detail::canonicalize_components(comps))
        throw std::runtime_error("invert_parametric: zero reconstruction");
    for (auto& c : comps) c = c.embed(full);

    ParametricMap out;
    out.family = m.family;
    out.n = m.n;
    out.comps = std::move(comps);

    // Validate on the held-out samples: the specialized reconstruction must
    // match the directly computed inverse projectively (both canonical).
    for (std::size_t s = need; s < samples.size(); ++s) {
        std::vector<MultiPoly> direct(nv, MultiPoly::zero(target));
        for (std::size_t i = 0; i < nv; ++i) {
            std::vector<MultiPoly::Term> terms;
            for (std::size_t mdx = 0; mdx < nm; ++mdx) {
                const Rat& c = samples[s].coeffs[i * nm + mdx];
                if (c == 0) continue;
                Mono mono = Mono::unit(target.size());
                for (std::size_t v = 0; v < nv; ++v) {
                    mono.e[v] = static_cast<std::uint16_t>(monos[mdx][v]);
                    mono.total = static_cast<std::uint16_t>(mono.total + monos[mdx][v]);
                }
                terms.emplace_back(mono, c);
            }
            direct[i] = MultiPoly::from_terms(target, std::move(terms));
        }
        detail::canonicalize_components(direct);
        std::vector<MultiPoly> spec;
        for (const auto& c : out.comps) spec.push_back(c.substitute(kv, samples[s].k).prune_vars().embed(target));
        detail::canonicalize_components(spec);
        for (std::size_t i = 0; i < nv; ++i)
            if (spec[i] != direct[i].embed(target))
                throw DegreeBoundFalsified{m.family, m.n,
                                           static_cast<int>(samples[s].k.get_num().get_si()),
                                           static_cast<int>(i)};
    }
    return out;
}

}  // namespace detail

// Reconstruct the inverse map with k symbolic: invert at integer samples,
// normalize by a reference coefficient, reconstruct every coefficient as a
// rational function of k, clear the common denominator, and validate on
// held-out samples.  The degree bound in k starts at the conjectured forward
// bound; inverse components can exceed it (the two-sided family does), so a
// falsified fit escalates the bound before giving up.
inline ParametricMap invert_parametric(const ParametricMap& m, const LiftOptions& opt = {},
                                       LiftDiagnostics* diag = nullptr,
                                       const SampleInverter& inverter = {}) {
    int bound = degree_bound_in_k(m.family, m.n);
    for (int attempt = 0;; ++attempt) {
        try {
            return detail::invert_parametric_at_bound(m, bound, opt, diag, inverter);
        } catch (const DegreeBoundFalsified&) {
            if (attempt >= 2) throw;
            bound *= 2;
        }
    }
}

// ----------------------------------------------------------------------------
// Inverse structure (the linear factor gamma and its powers)
// ----------------------------------------------------------------------------

struct InverseStructure {
    bool detected = false;
    MultiPoly gamma;
    std::optional<MultiPoly> gamma_conjugate;
    bool conjugate_is_parity_twist = false;  // gamma_conjugate == +-twist(gamma)
    std::vector<int> exponent_pattern;            // gamma power per component
    std::vector<int> conjugate_exponent_pattern;  // conjugate power per component
};

// Detect the linear factor structure of an inverse map: the last (h-)
// component must be c(k) * gamma^n (one-sided) or c(k) * (gamma*conj)^n
// (two-sided, split by the parity grading of the j variables).
inline InverseStructure inverse_structure(const ParametricMap& inv) {
    InverseStructure st;
    st.gamma = MultiPoly::zero(VarSet{});
    if (inv.comps.empty()) return st;
    MultiPoly rest;
    detail::extract_k_content(inv.comps.back(), &rest);
    auto [c, prim] = rest.content_primitive();
    auto root = nth_root(prim, static_cast<unsigned>(inv.n));
    if (!root) return st;
    MultiPoly t = root->primitive_part();
    if (inv.family == Family::kOneSided) {
        if (detail::coordinate_degree(t) != 1) return st;
        st.gamma = t;
        st.detected = true;
    } else {
        if (detail::coordinate_degree(t) != 2) return st;
        // Split t = E^2 - O^2 with E supported on even-index j's and O on
        // odd-index ones (k allowed everywhere).
        VarSet vs = t.vars();
        std::vector<MultiPoly::Term> even_terms, odd_terms;
        for (const auto& term : t.terms()) {
            bool has_even = false, has_odd = false;
            for (std::size_t i = 0; i < vs.size(); ++i) {
                if (term.first.e[i] == 0 || vs.at(i).kind != VarKind::J) continue;
                if (vs.at(i).idx % 2 == 0)
                    has_even = true;
                else
                    has_odd = true;
            }
            if (has_even && has_odd) return st;  // mixed term: not a conjugate pair
            if (has_odd)
                odd_terms.push_back(term);
            else
                even_terms.push_back(term);
        }
        MultiPoly esq = MultiPoly::from_terms(vs, std::move(even_terms));
        MultiPoly osq = -MultiPoly::from_terms(vs, std::move(odd_terms));
        if (esq.is_zero()) return st;
        // Orient the sign: E^2 has a positive leading coefficient, but the
        // primitive normalization of t may have flipped it.
        if (esq.lead().second < 0) {
            t = -t;
            esq = -esq;
            osq = -osq;
        }
        auto eroot = nth_root(esq, 2);
        auto oroot = nth_root(osq, 2);
        if (!eroot || !oroot) return st;
        MultiPoly a = *eroot + *oroot;
        MultiPoly b = *eroot - *oroot;
        if (a * b != t) return st;
        if (mono_cmp(b.lead().first, a.lead().first) > 0 ||
            (mono_cmp(b.lead().first, a.lead().first) == 0 &&
             b.lead().second > a.lead().second))
            std::swap(a, b);
        st.gamma = a.primitive_part();
        MultiPoly tw = j_parity_twist(st.gamma);
        st.conjugate_is_parity_twist = (tw == b || tw == -b);
        // Record the conjugate as the parity-twist image when that is what
        // the cofactor is (the expected situation); otherwise keep the
        // cofactor itself, sign-normalized.
        st.gamma_conjugate = st.conjugate_is_parity_twist ? tw : b.primitive_part();
        st.detected = true;
    }
    for (const auto& comp : inv.comps) {
        VarSet u = comp.vars().unite(st.gamma.vars());
        st.exponent_pattern.push_back(peel_factor(comp.embed(u), st.gamma.embed(u)).first);
        if (st.gamma_conjugate) {
            VarSet w = comp.vars().unite(st.gamma_conjugate->vars());
            st.conjugate_exponent_pattern.push_back(
                peel_factor(comp.embed(w), st.gamma_conjugate->embed(w)).first);
        }
    }
    return st;
}

// ----------------------------------------------------------------------------
// Serialization
// ----------------------------------------------------------------------------

inline Json fixed_to_json(const FixedMap& f, const std::string& kind) {
    Json j;
    j["family"] = family_name(f.family);
    j["n"] = f.n;
    j["kind"] = kind;
    j["normalization"] = kNormalizationVersion;
    j["degree"] = f.degree;
    Json comps = Json::array();
    for (const auto& c : f.comps) comps.push_back(poly_to_json(c));
    j["components"] = comps;
    return j;
}

inline Json parametric_to_json(const ParametricMap& m, const std::string& kind) {
    Json j;
    j["family"] = family_name(m.family);
    j["n"] = m.n;
    j["kind"] = kind;
    j["normalization"] = kNormalizationVersion;
    Json comps = Json::array();
    for (const auto& c : m.comps) comps.push_back(poly_to_json(c));
    j["components"] = comps;
    return j;
}

inline ParametricMap parametric_from_json(const Json& j) {
    ParametricMap m;
    m.family = (j.at("family").get<std::string>() == "one") ? Family::kOneSided
                                                            : Family::kTwoSided;
    m.n = j.at("n").get<int>();
    for (const auto& c : j.at("components")) m.comps.push_back(poly_from_json(c));
    return m;
}

}  // namespace kjc
