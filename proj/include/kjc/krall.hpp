#pragma once

// Expansion of the modified-weight orthogonal polynomial Q_k over the
// symmetric Jacobi basis: Q_k = sum_i c_i(params) * J_{k-i}.  The coefficient
// vector is the (certified) one-dimensional kernel of the moment-constraint
// matrix <J_{k-i}, x^m> for m < k.

#include <stdexcept>
#include <string>
#include <vector>

#include "kjc/orthobasis.hpp"
#include "kjc/polymatrix.hpp"

namespace kjc {

struct ExpansionAnomaly : std::runtime_error {
    Family family;
    int n, k, rank, ncols;
    ExpansionAnomaly(Family f, int n_, int k_, int rank_, int ncols_, const std::string& what_)
        : std::runtime_error("expansion anomaly (family=" + family_name(f) +
                             ", n=" + std::to_string(n_) + ", k=" + std::to_string(k_) +
                             ", rank=" + std::to_string(rank_) + "/" + std::to_string(ncols_) +
                             "): " + what_),
          family(f),
          n(n_),
          k(k_),
          rank(rank_),
          ncols(ncols_) {}
};

struct ExpansionVector {
    Family family;
    int n = 0;
    int k = 0;
    std::vector<MultiPoly> coeffs;  // length n+1 (one-sided) or 2n+1 (two-sided)
};

inline int expansion_length(Family f, int n) { return f == Family::kOneSided ? n + 1 : 2 * n + 1; }

// Coefficients of Q_k over {J_{k-i}}, canonical primitive form (first nonzero
// entry has positive leading coefficient).  Basis members with k-i < 0 are
// omitted from the solve and reported as zero coefficients.
inline ExpansionVector expansion_at_k(Family fam, int n, int k) {
    if (n < 1) throw std::invalid_argument("expansion_at_k: n must be >= 1");
    if (k < 0) throw std::invalid_argument("expansion_at_k: k must be >= 0");
    WeightSpec w{fam, n};
    int len = expansion_length(fam, n);
    std::vector<int> active;
    for (int i = 0; i < len; ++i)
        if (k - i >= 0) active.push_back(i);

    VarSet evs = weight_params(w).unite(VarSet::of({"x"}));
    VarSet xonly = VarSet::of({"x"});
    MultiPoly x = MultiPoly::variable(xonly, "x");
    PolyMatrix m = PolyMatrix::make(evs, static_cast<std::size_t>(k), active.size());
    for (int row = 0; row < k; ++row) {
        MultiPoly xm = x.pow(row);
        for (std::size_t col = 0; col < active.size(); ++col) {
            MultiPoly J = symmetric_jacobi(static_cast<unsigned>(k - active[col]),
                                           static_cast<unsigned>(n));
            m.at(row, col) = pairing(J, xm, w).embed(evs);
        }
    }
    auto kr = kernel_fraction_free(m);
    if (kr.status == KernelStatus::kFullRank)
        throw ExpansionAnomaly(fam, n, k, kr.rank, static_cast<int>(active.size()),
                               "moment constraints admit no expansion (nullity 0)");
    if (kr.status == KernelStatus::kNullityAtLeastTwo)
        throw ExpansionAnomaly(fam, n, k, kr.rank, static_cast<int>(active.size()),
                               "expansion is not unique (nullity >= 2)");

    ExpansionVector out{fam, n, k, {}};
    VarSet params = weight_params(w);
    out.coeffs.assign(len, MultiPoly::zero(params));
    int degree_bound = fam == Family::kOneSided ? n : 2 * n;
    for (std::size_t col = 0; col < active.size(); ++col) {
        MultiPoly c = kr.vec[col].prune_vars();
        if (!c.vars().subset_of(params))
            throw ExpansionAnomaly(fam, n, k, kr.rank, static_cast<int>(active.size()),
                                   "coefficient involves non-parameter variables");
        if (c.degree() > degree_bound)
            throw ExpansionAnomaly(fam, n, k, kr.rank, static_cast<int>(active.size()),
                                   "coefficient degree exceeds bound " +
                                       std::to_string(degree_bound));
        out.coeffs[active[col]] = c.embed(params);
    }
    return out;
}

// Q_k as a polynomial in x and the weight parameters.
inline MultiPoly assemble(const ExpansionVector& ev) {
    VarSet vs = weight_params({ev.family, ev.n}).unite(VarSet::of({"x"}));
    MultiPoly acc = MultiPoly::zero(vs);
    for (std::size_t i = 0; i < ev.coeffs.size(); ++i) {
        int deg = ev.k - static_cast<int>(i);
        if (deg < 0) continue;
        acc = acc + ev.coeffs[i].embed(vs) *
                        symmetric_jacobi(static_cast<unsigned>(deg),
                                         static_cast<unsigned>(ev.n)).embed(vs);
    }
    return acc;
}

// True when the assembled Q_k is orthogonal to all lower powers of x.
inline bool orthogonality_check(const ExpansionVector& ev) {
    WeightSpec w{ev.family, ev.n};
    MultiPoly q = assemble(ev);
    VarSet xonly = VarSet::of({"x"});
    MultiPoly x = MultiPoly::variable(xonly, "x");
    for (int mdeg = 0; mdeg < ev.k; ++mdeg)
        if (!pairing(q, x.pow(mdeg), w).is_zero()) return false;
    return true;
}

// Exchange of the two endpoint parameter lists: l_i <-> r_i.
inline MultiPoly lr_swap(const MultiPoly& p) {
    std::vector<Var> extra;
    for (std::size_t i = 0; i < p.vars().size(); ++i) {
        Var v = p.vars().at(i);
        if (v.kind == VarKind::L || v.kind == VarKind::R) {
            Var partner{v.kind == VarKind::L ? VarKind::R : VarKind::L, v.idx};
            if (!p.vars().contains(partner)) extra.push_back(partner);
        }
    }
    VarSet target = extra.empty() ? p.vars() : p.vars().unite(VarSet::of_vars(extra));
    MultiPoly q = p.embed(target);
    std::vector<int> remap(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) {
        Var v = target.at(i);
        if (v.kind == VarKind::L || v.kind == VarKind::R) {
            Var partner{v.kind == VarKind::L ? VarKind::R : VarKind::L, v.idx};
            remap[i] = target.find(partner);
        } else {
            remap[i] = static_cast<int>(i);
        }
    }
    std::vector<MultiPoly::Term> ts;
    for (const auto& t : q.terms()) {
        Mono m = Mono::unit(target.size());
        m.total = t.first.total;
        for (std::size_t i = 0; i < target.size(); ++i) m.e[remap[i]] = t.first.e[i];
        ts.push_back({m, t.second});
    }
    return MultiPoly::from_terms(target, std::move(ts));
}

// Diagonal parity action on inverse-side coordinates: j_i -> (-1)^i j_i.
inline MultiPoly j_parity_twist(const MultiPoly& p) {
    std::vector<MultiPoly::Term> ts;
    for (const auto& t : p.terms()) {
        long odd = 0;
        for (std::size_t i = 0; i < p.vars().size(); ++i) {
            Var v = p.vars().at(i);
            if (v.kind == VarKind::J && v.idx % 2 == 1) odd += t.first.e[i];
        }
        ts.push_back({t.first, odd % 2 == 0 ? t.second : -t.second});
    }
    return MultiPoly::from_terms(p.vars(), std::move(ts));
}

}  // namespace kjc
