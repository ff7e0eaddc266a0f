#pragma once

// From per-k expansion vectors to one-parameter projective maps.
//
// The expansion solver (krall.hpp) produces, for each integer k, a primitive
// coefficient vector defined only up to scale.  This module pins the scale
// per component (constant term 1; antisymmetric components instead get a unit
// bare-l_0 coefficient), samples consecutive integers k, interpolates every
// component as a polynomial in k, validates the conjectured degree bound on
// held-out samples, and homogenizes with h.

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kjc/krall.hpp"
#include "kjc/parallel.hpp"
#include "kjc/polyalg.hpp"

namespace kjc {

// Bumped whenever the component normalization or sampling scheme changes;
// recorded in reports and cache keys so stale artifacts cannot be mistaken
// for current ones.
inline constexpr const char* kNormalizationVersion = "norm-1";

struct ParametricMap {
    Family family = Family::kOneSided;
    int n = 0;
    // One polynomial per target coordinate, in the projective variables
    // (l_*, r_*, h) with coefficients polynomial in k; homogeneous of degree
    // map_degree() in the projective variables.
    std::vector<MultiPoly> comps;

    int map_degree() const { return family == Family::kOneSided ? n : 2 * n; }
    VarSet coords() const {
        return weight_params(WeightSpec{family, n}).unite(VarSet::of({"h"}));
    }
};

inline int map_degree(Family f, int n) { return f == Family::kOneSided ? n : 2 * n; }

// Conjectured degree bound in k for the lifted components (and inverses).
inline int degree_bound_in_k(Family f, int n) {
    int d = map_degree(f, n);
    return 2 * d * n;  // 2n^2 one-sided, (2n)^2 two-sided
}

// First sample abscissa: one above the expansion length, so every basis
// member J_{k-i} is present and the solution is structurally generic.
inline int sample_kmin(Family f, int n) { return f == Family::kOneSided ? n + 1 : 2 * n + 1; }

inline constexpr int kValidationSamples = 4;

struct NormalizationFailure : std::runtime_error {
    Family family;
    int n;
    int k;
    int component;
    NormalizationFailure(Family f, int n_, int k_, int comp)
        : std::runtime_error("component normalization failed: family=" +
                             std::string(family_name(f)) + " n=" + std::to_string(n_) +
                             " k=" + std::to_string(k_) + " component=" + std::to_string(comp) +
                             " (zero constant term and zero bare-l0 coefficient)"),
          family(f),
          n(n_),
          k(k_),
          component(comp) {}
};

struct DegreeBoundFalsified : std::runtime_error {
    Family family;
    int n;
    int k;
    int component;
    DegreeBoundFalsified(Family f, int n_, int k_, int comp)
        : std::runtime_error("degree-in-k bound falsified: held-out sample k=" +
                             std::to_string(k_) + " disagrees with the interpolant, family=" +
                             std::string(family_name(f)) + " n=" + std::to_string(n_) +
                             " component=" + std::to_string(comp)),
          family(f),
          n(n_),
          k(k_),
          component(comp) {}
};

namespace detail {

// Normalization rule applied to one component; recorded so that samples
// entering one interpolation are scaled consistently.
enum class NormMode : uint8_t { kConstantTerm, kBareL0 };

inline std::vector<MultiPoly> normalize_components_impl(const ExpansionVector& e,
                                                        std::vector<NormMode>* modes_out) {
    std::vector<MultiPoly> out;
    std::vector<NormMode> modes;
    out.reserve(e.coeffs.size());
    Var l0{VarKind::L, 0};
    for (std::size_t i = 0; i < e.coeffs.size(); ++i) {
        const MultiPoly& c = e.coeffs[i];
        Rat c0 = c.constant_term();
        if (rat_sgn(c0) != 0) {
            out.push_back(c / c0);
            modes.push_back(NormMode::kConstantTerm);
            continue;
        }
        Rat a(0);
        if (c.vars().find(l0) >= 0) {
            Rat tmp = c.coefficient_in(l0, 1).constant_term();
            a = tmp;
        }
        if (rat_sgn(a) == 0)
            throw NormalizationFailure(e.family, e.n, e.k, static_cast<int>(i));
        out.push_back(c / a);
        modes.push_back(NormMode::kBareL0);
    }
    if (modes_out) *modes_out = std::move(modes);
    return out;
}

}  // namespace detail

// Scales each expansion coefficient so its constant term (value at l = r = 0)
// becomes 1; coefficients with identically zero constant term (the
// LR-antisymmetric components of the two-sided family) are scaled to a unit
// bare-l_0 coefficient instead.
inline std::vector<MultiPoly> normalize_components(const ExpansionVector& e) {
    return detail::normalize_components_impl(e, nullptr);
}

// Homogenizes p to total degree deg in the projective variables (kinds l, r,
// h) by padding each term with a power of h; k is a coefficient variable and
// does not count toward the degree.
inline MultiPoly homogenize_coords(const MultiPoly& p, int deg) {
    VarSet target = p.vars().unite(VarSet::of({"h"}));
    MultiPoly q = p.embed(target);
    int hpos = target.find(var_parse("h"));
    std::vector<MultiPoly::Term> terms = q.terms();
    for (auto& t : terms) {
        int d = 0;
        for (std::size_t i = 0; i < target.size(); ++i) {
            VarKind kind = target.at(i).kind;
            if (kind == VarKind::L || kind == VarKind::R || kind == VarKind::H)
                d += t.first.e[i];
        }
        if (d > deg)
            throw std::invalid_argument("homogenize_coords: term degree exceeds target");
        t.first.e[static_cast<std::size_t>(hpos)] =
            static_cast<uint16_t>(t.first.e[static_cast<std::size_t>(hpos)] + (deg - d));
        t.first.total = static_cast<uint16_t>(t.first.total + (deg - d));
    }
    return MultiPoly::from_terms(target, std::move(terms));
}

struct LiftDiagnostics {
    std::vector<int> interpolation_ks;
    std::vector<int> validation_ks;
    std::vector<int> skipped_ks;
};

struct LiftOptions {
    unsigned threads = 1;
};

namespace detail {

struct KSample {
    int k = 0;
    std::vector<MultiPoly> comps;
    std::vector<NormMode> modes;
};

// Structurally expected normalization pattern: every one-sided component has
// a nonzero value at l = 0; two-sided components of odd index are
// LR-antisymmetric, hence vanish at l = r = 0.  Samples deviating from this
// pattern (an accidental zero at that particular k) are skipped.
inline std::vector<NormMode> expected_modes(Family fam, int n) {
    std::vector<NormMode> m(static_cast<std::size_t>(expansion_length(fam, n)),
                            NormMode::kConstantTerm);
    if (fam == Family::kTwoSided)
        for (std::size_t i = 1; i < m.size(); i += 2) m[i] = NormMode::kBareL0;
    return m;
}

inline std::optional<KSample> try_sample(Family fam, int n, int k) {
    KSample s;
    s.k = k;
    try {
        ExpansionVector e = expansion_at_k(fam, n, k);
        s.comps = normalize_components_impl(e, &s.modes);
    } catch (const ExpansionAnomaly&) {
        return std::nullopt;
    } catch (const NormalizationFailure&) {
        return std::nullopt;
    }
    return s;
}

}  // namespace detail

// Builds the one-parameter map: samples normalized expansions at consecutive
// integers starting at sample_kmin, interpolates each component as a
// polynomial in k of degree <= degree_bound_in_k, checks the held-out
// samples exactly, and homogenizes.  Samples where the expansion solve or
// the normalization degenerates are skipped and replaced by the next
// integer (recorded in the diagnostics).
inline ParametricMap lift(Family fam, int n, const LiftOptions& opt = {},
                          LiftDiagnostics* diag = nullptr) {
    if (n < 1) throw std::invalid_argument("lift: n must be >= 1");
    const int bound = degree_bound_in_k(fam, n);
    const int need = bound + 1 + kValidationSamples;
    const int skip_budget = 12;

    const std::vector<detail::NormMode> pattern = detail::expected_modes(fam, n);
    std::vector<detail::KSample> got;
    got.reserve(static_cast<std::size_t>(need));
    std::vector<int> skipped;
    int next_k = sample_kmin(fam, n);
    int attempts_left = need + skip_budget;
    while (static_cast<int>(got.size()) < need && attempts_left > 0) {
        int wave = std::max(1, static_cast<int>(opt.threads));
        wave = std::min(wave, attempts_left);
        std::vector<std::optional<detail::KSample>> slot(static_cast<std::size_t>(wave));
        parallel_for(static_cast<std::size_t>(wave), opt.threads, [&](std::size_t i) {
            slot[i] = detail::try_sample(fam, n, next_k + static_cast<int>(i));
        });
        for (int i = 0; i < wave && static_cast<int>(got.size()) < need; ++i) {
            --attempts_left;
            auto& s = slot[static_cast<std::size_t>(i)];
            if (!s.has_value() || s->modes != pattern) {
                skipped.push_back(next_k + i);
                continue;
            }
            got.push_back(std::move(*s));
        }
        next_k += wave;
    }
    if (static_cast<int>(got.size()) < need)
        throw std::runtime_error("lift: sample budget exhausted (family=" +
                                 std::string(family_name(fam)) + " n=" + std::to_string(n) +
                                 ", got " + std::to_string(got.size()) + " of " +
                                 std::to_string(need) + " samples)");

    ParametricMap m;
    m.family = fam;
    m.n = n;
    const Var kvar = var_parse("k");
    const int ncomp = expansion_length(fam, n);
    const int deg = map_degree(fam, n);
    m.comps.resize(static_cast<std::size_t>(ncomp));
    parallel_for(static_cast<std::size_t>(ncomp), opt.threads, [&](std::size_t c) {
        std::vector<std::pair<Rat, MultiPoly>> pts;
        pts.reserve(static_cast<std::size_t>(bound) + 1);
        for (int s = 0; s <= bound; ++s)
            pts.emplace_back(Rat(got[static_cast<std::size_t>(s)].k),
                             got[static_cast<std::size_t>(s)].comps[c]);
        MultiPoly interp = newton_interpolate(kvar, std::move(pts));
        for (int v = bound + 1; v < need; ++v) {
            const auto& sample = got[static_cast<std::size_t>(v)];
            if (!(interp.substitute(kvar, Rat(sample.k)) == sample.comps[c]))
                throw DegreeBoundFalsified(fam, n, sample.k, static_cast<int>(c));
        }
        m.comps[c] = homogenize_coords(interp, deg);
    });

    // Present every component over the same variable set.
    VarSet full = m.coords().unite(VarSet::of({"k"}));
    for (auto& c : m.comps) c = c.embed(full);

    if (diag) {
        diag->interpolation_ks.clear();
        diag->validation_ks.clear();
        diag->skipped_ks = skipped;
        for (int s = 0; s < need; ++s) {
            int k = got[static_cast<std::size_t>(s)].k;
            (s <= bound ? diag->interpolation_ks : diag->validation_ks).push_back(k);
        }
    }
    return m;
}

// Max degree in k over the components.
inline int degree_in_k(const ParametricMap& m) {
    int d = 0;
    for (const auto& c : m.comps) d = std::max(d, c.degree_in("k"));
    return d;
}

// Number of distinct monomials in the projective variables (k-polynomial
// coefficients collapsed), matching how component sizes are usually quoted.
inline int coord_monomial_count(const MultiPoly& p) {
    int kpos = p.vars().find(var_parse("k"));
    std::set<std::array<uint16_t, kMaxVars>> seen;
    for (const auto& t : p.terms()) {
        auto e = t.first.e;
        if (kpos >= 0) e[static_cast<std::size_t>(kpos)] = 0;
        seen.insert(e);
    }
    return static_cast<int>(seen.size());
}

}  // namespace kjc
