#pragma once

// Sparse exact multivariate polynomials over the rationals.
//
// Terms are kept sorted in descending graded-lexicographic order: higher total
// degree first; among equal total degrees, the term with the larger exponent
// on the most significant variable (per VarSet order) comes first.  This
// storage order is also the canonical serialization order.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kjc/rational.hpp"
#include "kjc/varset.hpp"

namespace kjc {

struct Mono {
    std::array<std::uint16_t, kMaxVars> e{};
    std::uint16_t total = 0;
    std::uint8_t n = 0;  // active width == varset size

    static Mono unit(std::size_t nvars) {
        Mono m;
        m.n = static_cast<std::uint8_t>(nvars);
        return m;
    }

    friend bool operator==(const Mono& a, const Mono& b) {
        if (a.n != b.n || a.total != b.total) return false;
        for (std::size_t i = 0; i < a.n; ++i)
            if (a.e[i] != b.e[i]) return false;
        return true;
    }
};

// +1 when a precedes b (a > b in graded-lex), -1 when b precedes a, 0 if equal.
inline int mono_cmp(const Mono& a, const Mono& b) {
    if (a.total != b.total) return a.total > b.total ? 1 : -1;
    for (std::size_t i = 0; i < a.n; ++i) {
        if (a.e[i] != b.e[i]) return a.e[i] > b.e[i] ? 1 : -1;
    }
    return 0;
}

struct MonoGt {
    bool operator()(const Mono& a, const Mono& b) const { return mono_cmp(a, b) > 0; }
};

struct MonoHash {
    std::size_t operator()(const Mono& m) const {
        std::size_t h = 1469598103934665603ull;
        for (std::size_t i = 0; i < m.n; ++i) {
            h ^= m.e[i];
            h *= 1099511628211ull;
        }
        return h;
    }
};

inline Mono mono_mul(const Mono& a, const Mono& b) {
    Mono m = a;
    std::uint32_t tot = 0;
    for (std::size_t i = 0; i < a.n; ++i) {
        std::uint32_t s = static_cast<std::uint32_t>(a.e[i]) + b.e[i];
        if (s > 0xffff) throw std::overflow_error("mono_mul: exponent overflow");
        m.e[i] = static_cast<std::uint16_t>(s);
        tot += s;
    }
    if (tot > 0xffff) throw std::overflow_error("mono_mul: degree overflow");
    m.total = static_cast<std::uint16_t>(tot);
    return m;
}

inline bool mono_divides(const Mono& a, const Mono& b) {  // a | b
    for (std::size_t i = 0; i < a.n; ++i)
        if (a.e[i] > b.e[i]) return false;
    return true;
}

inline Mono mono_div(const Mono& b, const Mono& a) {  // b / a, assumes a | b
    Mono m = b;
    for (std::size_t i = 0; i < a.n; ++i) m.e[i] = static_cast<std::uint16_t>(b.e[i] - a.e[i]);
    m.total = static_cast<std::uint16_t>(b.total - a.total);
    return m;
}

class MultiPoly {
  public:
    using Term = std::pair<Mono, Rat>;

    MultiPoly() = default;

    static MultiPoly zero(const VarSet& vs) {
        MultiPoly p;
        p.vs_ = vs;
        return p;
    }

    static MultiPoly constant(const VarSet& vs, const Rat& c) {
        MultiPoly p = zero(vs);
        if (c != 0) p.t_.push_back({Mono::unit(vs.size()), c});
        return p;
    }

    static MultiPoly one(const VarSet& vs) { return constant(vs, 1); }

    static MultiPoly variable(const VarSet& vs, const std::string& name) {
        int pos = vs.find(name);
        if (pos < 0) throw std::invalid_argument("MultiPoly::variable: '" + name + "' not in varset");
        Mono m = Mono::unit(vs.size());
        m.e[pos] = 1;
        m.total = 1;
        MultiPoly p = zero(vs);
        p.t_.push_back({m, Rat(1)});
        return p;
    }

    static MultiPoly monomial(const VarSet& vs, const std::vector<unsigned>& exps, const Rat& c) {
        if (exps.size() != vs.size()) throw std::invalid_argument("MultiPoly::monomial: arity mismatch");
        if (c == 0) return zero(vs);
        Mono m = Mono::unit(vs.size());
        std::uint32_t tot = 0;
        for (std::size_t i = 0; i < exps.size(); ++i) {
            if (exps[i] > 0xffff) throw std::overflow_error("MultiPoly::monomial: exponent overflow");
            m.e[i] = static_cast<std::uint16_t>(exps[i]);
            tot += exps[i];
        }
        m.total = static_cast<std::uint16_t>(tot);
        MultiPoly p = zero(vs);
        p.t_.push_back({m, c});
        return p;
    }

    // Builds a polynomial from arbitrary (possibly unsorted/duplicated) terms.
    static MultiPoly from_terms(const VarSet& vs, std::vector<Term> terms) {
        MultiPoly p = zero(vs);
        p.t_ = std::move(terms);
        p.normalize();
        return p;
    }

    const VarSet& vars() const { return vs_; }
    const std::vector<Term>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    std::size_t nterms() const { return t_.size(); }

    bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].first.total == 0); }

    // Value of the constant (exponent-free) monomial; 0 when absent.
    Rat constant_term() const {
        if (t_.empty()) return Rat(0);
        if (t_.back().first.total == 0) return t_.back().second;
        return Rat(0);
    }

    int degree() const { return t_.empty() ? -1 : static_cast<int>(t_[0].first.total); }

    int degree_in(const Var& v) const {
        int pos = vs_.find(v);
        if (pos < 0) return 0;
        int d = 0;
        for (const auto& t : t_) d = std::max(d, static_cast<int>(t.first.e[pos]));
        return d;
    }
    int degree_in(const std::string& name) const { return degree_in(var_parse(name)); }

    const Term& lead() const {
        if (t_.empty()) throw std::logic_error("MultiPoly::lead: zero polynomial");
        return t_[0];
    }

    friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
        if (a.vs_ == b.vs_) return a.t_ == b.t_;
        VarSet u = a.vs_.unite(b.vs_);
        return a.embed(u).t_ == b.embed(u).t_;
    }
    friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

    MultiPoly operator-() const {
        MultiPoly p = *this;
        for (auto& t : p.t_) t.second = -t.second;
        return p;
    }

    friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
        if (a.vs_ != b.vs_) {
            VarSet u = a.vs_.unite(b.vs_);
            return a.embed(u) + b.embed(u);
        }
        MultiPoly out = zero(a.vs_);
        out.t_.reserve(a.t_.size() + b.t_.size());
        std::size_t i = 0, j = 0;
        while (i < a.t_.size() && j < b.t_.size()) {
            int c = mono_cmp(a.t_[i].first, b.t_[j].first);
            if (c > 0) {
                out.t_.push_back(a.t_[i++]);
            } else if (c < 0) {
                out.t_.push_back(b.t_[j++]);
            } else {
                Rat s = a.t_[i].second + b.t_[j].second;
                if (s != 0) out.t_.push_back({a.t_[i].first, s});
                ++i, ++j;
            }
        }
        for (; i < a.t_.size(); ++i) out.t_.push_back(a.t_[i]);
        for (; j < b.t_.size(); ++j) out.t_.push_back(b.t_[j]);
        return out;
    }

    friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) { return a + (-b); }

    friend MultiPoly operator+(const MultiPoly& a, const Rat& c) {
        return a + constant(a.vs_, c);
    }
    friend MultiPoly operator+(const Rat& c, const MultiPoly& a) { return a + c; }
    friend MultiPoly operator-(const MultiPoly& a, const Rat& c) { return a + (-c); }
    friend MultiPoly operator-(const Rat& c, const MultiPoly& a) { return (-a) + c; }

    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
        if (a.vs_ != b.vs_) {
            VarSet u = a.vs_.unite(b.vs_);
            return a.embed(u) * b.embed(u);
        }
        if (a.is_zero() || b.is_zero()) return zero(a.vs_);
        std::unordered_map<Mono, Rat, MonoHash> acc;
        acc.reserve(a.t_.size() * 2);
        for (const auto& ta : a.t_)
            for (const auto& tb : b.t_) {
                Rat& slot = acc[mono_mul(ta.first, tb.first)];
                slot += ta.second * tb.second;
            }
        MultiPoly out = zero(a.vs_);
        out.t_.reserve(acc.size());
        for (auto& kv : acc)
            if (kv.second != 0) out.t_.push_back({kv.first, std::move(kv.second)});
        out.sort_terms();
        return out;
    }

    friend MultiPoly operator*(const MultiPoly& a, const Rat& c) {
        if (c == 0) return zero(a.vs_);
        MultiPoly p = a;
        for (auto& t : p.t_) t.second *= c;
        return p;
    }
    friend MultiPoly operator*(const Rat& c, const MultiPoly& a) { return a * c; }

    friend MultiPoly operator/(const MultiPoly& a, const Rat& c) {
        if (c == 0) throw std::invalid_argument("MultiPoly: division by zero scalar");
        MultiPoly p = a;
        for (auto& t : p.t_) t.second /= c;
        return p;
    }

    MultiPoly pow(unsigned e) const {
        MultiPoly r = one(vs_);
        MultiPoly base = *this;
        while (e) {
            if (e & 1) r = r * base;
            e >>= 1;
            if (e) base = base * base;
        }
        return r;
    }

    MultiPoly derivative(const Var& v) const {
        int pos = vs_.find(v);
        if (pos < 0) return zero(vs_);
        MultiPoly out = zero(vs_);
        out.t_.reserve(t_.size());
        for (const auto& t : t_) {
            if (t.first.e[pos] == 0) continue;
            Mono m = t.first;
            Rat c = t.second * Rat(m.e[pos]);
            m.e[pos] -= 1;
            m.total -= 1;
            out.t_.push_back({m, c});
        }
        out.sort_terms();
        return out;
    }
    MultiPoly derivative(const std::string& name) const { return derivative(var_parse(name)); }

    // Integral over [-1, 1] in `v`: v^m contributes 0 for odd m, 2/(m+1) for even m.
    MultiPoly definite_integral_unit(const Var& v) const {
        int pos = vs_.find(v);
        if (pos < 0) return *this * Rat(2);
        std::vector<Term> acc;
        for (const auto& t : t_) {
            unsigned m = t.first.e[pos];
            if (m % 2 == 1) continue;
            Mono mm = t.first;
            mm.total = static_cast<std::uint16_t>(mm.total - m);
            mm.e[pos] = 0;
            acc.push_back({mm, t.second * rat_make(2, m + 1)});
        }
        return from_terms(vs_, std::move(acc));
    }
    MultiPoly definite_integral_unit(const std::string& name) const {
        return definite_integral_unit(var_parse(name));
    }

    // Coefficient of v^e as a polynomial over the same varset (v zeroed out).
    MultiPoly coefficient_in(const Var& v, unsigned e) const {
        int pos = vs_.find(v);
        if (pos < 0) return e == 0 ? *this : zero(vs_);
        std::vector<Term> acc;
        for (const auto& t : t_) {
            if (t.first.e[pos] != e) continue;
            Mono m = t.first;
            m.total = static_cast<std::uint16_t>(m.total - e);
            m.e[pos] = 0;
            acc.push_back({m, t.second});
        }
        return from_terms(vs_, std::move(acc));
    }
    MultiPoly coefficient_in(const std::string& name, unsigned e) const {
        return coefficient_in(var_parse(name), e);
    }

    // All slices by the exponent of v, ascending.
    std::map<unsigned, MultiPoly> slices_in(const Var& v) const {
        std::map<unsigned, MultiPoly> out;
        int pos = vs_.find(v);
        if (pos < 0) {
            if (!is_zero()) out.emplace(0u, *this);
            return out;
        }
        std::map<unsigned, std::vector<Term>> acc;
        for (const auto& t : t_) {
            unsigned e = t.first.e[pos];
            Mono m = t.first;
            m.total = static_cast<std::uint16_t>(m.total - e);
            m.e[pos] = 0;
            acc[e].push_back({m, t.second});
        }
        for (auto& kv : acc) out.emplace(kv.first, from_terms(vs_, std::move(kv.second)));
        return out;
    }

    // Reinterpret over a superset of the variables.
    MultiPoly embed(const VarSet& super) const {
        if (vs_ == super) return *this;
        if (!vs_.subset_of(super))
            throw std::invalid_argument("MultiPoly::embed: target is not a superset");
        std::vector<int> map(vs_.size());
        for (std::size_t i = 0; i < vs_.size(); ++i) map[i] = super.find(vs_.at(i));
        MultiPoly out = zero(super);
        out.t_.reserve(t_.size());
        for (const auto& t : t_) {
            Mono m = Mono::unit(super.size());
            m.total = t.first.total;
            for (std::size_t i = 0; i < vs_.size(); ++i) m.e[map[i]] = t.first.e[i];
            out.t_.push_back({m, t.second});
        }
        out.sort_terms();
        return out;
    }

    // Restrict to the variables that actually occur (canonical minimal varset).
    MultiPoly prune_vars() const {
        std::vector<Var> used;
        for (std::size_t i = 0; i < vs_.size(); ++i) {
            for (const auto& t : t_)
                if (t.first.e[i] != 0) {
                    used.push_back(vs_.at(i));
                    break;
                }
        }
        VarSet sub = VarSet::of_vars(used);
        std::vector<int> map(vs_.size(), -1);
        for (std::size_t i = 0; i < vs_.size(); ++i) map[i] = sub.find(vs_.at(i));
        MultiPoly out = zero(sub);
        out.t_.reserve(t_.size());
        for (const auto& t : t_) {
            Mono m = Mono::unit(sub.size());
            m.total = t.first.total;
            for (std::size_t i = 0; i < vs_.size(); ++i)
                if (t.first.e[i] != 0) m.e[map[i]] = t.first.e[i];
            out.t_.push_back({m, t.second});
        }
        // graded-lex order is stable under dropping all-zero positions
        return out;
    }

    // Substitute a rational value for one variable.
    MultiPoly substitute(const Var& v, const Rat& val) const {
        int pos = vs_.find(v);
        if (pos < 0) return *this;
        std::vector<Rat> powers{Rat(1)};
        std::vector<Term> acc;
        acc.reserve(t_.size());
        for (const auto& t : t_) {
            unsigned e = t.first.e[pos];
            while (powers.size() <= e) powers.push_back(powers.back() * val);
            Mono m = t.first;
            m.total = static_cast<std::uint16_t>(m.total - e);
            m.e[pos] = 0;
            acc.push_back({m, t.second * powers[e]});
        }
        return from_terms(vs_, std::move(acc));
    }
    MultiPoly substitute(const std::string& name, const Rat& val) const {
        return substitute(var_parse(name), val);
    }

    // Substitute polynomials for variables (simultaneously).  Unsubstituted
    // variables persist; the result lives on the union of the remaining
    // variables and the images' variables.
    MultiPoly substitute_many(const std::vector<std::pair<Var, MultiPoly>>& subs) const {
        std::vector<int> which(vs_.size(), -1);
        std::vector<Var> keep;
        for (std::size_t i = 0; i < vs_.size(); ++i) {
            for (std::size_t s = 0; s < subs.size(); ++s)
                if (subs[s].first == vs_.at(i)) which[i] = static_cast<int>(s);
            if (which[i] < 0) keep.push_back(vs_.at(i));
        }
        VarSet target = VarSet::of_vars(keep);
        for (const auto& s : subs) target = target.unite(s.second.vars());
        std::vector<MultiPoly> images(subs.size());
        for (std::size_t s = 0; s < subs.size(); ++s) images[s] = subs[s].second.embed(target);
        // map of kept positions into target
        std::vector<int> pos_map(vs_.size(), -1);
        for (std::size_t i = 0; i < vs_.size(); ++i)
            if (which[i] < 0) pos_map[i] = target.find(vs_.at(i));

        std::vector<std::vector<MultiPoly>> pow_cache(subs.size());
        for (auto& pc : pow_cache) pc.push_back(one(target));

        MultiPoly out = zero(target);
        for (const auto& t : t_) {
            Mono base = Mono::unit(target.size());
            std::uint32_t tot = 0;
            for (std::size_t i = 0; i < vs_.size(); ++i)
                if (which[i] < 0 && t.first.e[i] != 0) {
                    base.e[pos_map[i]] = t.first.e[i];
                    tot += t.first.e[i];
                }
            base.total = static_cast<std::uint16_t>(tot);
            MultiPoly term = zero(target);
            term.t_.push_back({base, t.second});
            for (std::size_t i = 0; i < vs_.size(); ++i) {
                if (which[i] < 0 || t.first.e[i] == 0) continue;
                auto& pc = pow_cache[which[i]];
                unsigned e = t.first.e[i];
                while (pc.size() <= e) pc.push_back(pc.back() * images[which[i]]);
                term = term * pc[e];
            }
            out = out + term;
        }
        return out;
    }

    MultiPoly substitute_poly(const Var& v, const MultiPoly& image) const {
        return substitute_many({{v, image}});
    }
    MultiPoly substitute_poly(const std::string& name, const MultiPoly& image) const {
        return substitute_poly(var_parse(name), image);
    }

    // Evaluate at a full point (one value per varset entry).
    Rat evaluate(const std::vector<Rat>& point) const {
        if (point.size() != vs_.size())
            throw std::invalid_argument("MultiPoly::evaluate: arity mismatch");
        std::vector<std::vector<Rat>> powers(vs_.size(), {Rat(1)});
        Rat sum(0);
        for (const auto& t : t_) {
            Rat prod = t.second;
            for (std::size_t i = 0; i < vs_.size(); ++i) {
                unsigned e = t.first.e[i];
                if (e == 0) continue;
                auto& pc = powers[i];
                while (pc.size() <= e) pc.push_back(pc.back() * point[i]);
                prod *= pc[e];
            }
            sum += prod;
        }
        return sum;
    }

    // Splits into (content, primitive): content carries the sign so that the
    // primitive part has integer coprime coefficients and positive leading one.
    std::pair<Rat, MultiPoly> content_primitive() const {
        if (is_zero()) return {Rat(0), *this};
        Int g(0), l(1);
        for (const auto& t : t_) {
            g = int_gcd(g, Int(t.second.get_num()));
            l = int_lcm(l, Int(t.second.get_den()));
        }
        Rat content = rat_make(g, l);  // positive: gcd of |num| values
        if (t_[0].second < 0) content = -content;
        MultiPoly prim = *this / content;
        return {content, prim};
    }

    MultiPoly primitive_part() const { return content_primitive().second; }

    // Exact division; nullopt when b does not divide a exactly.
    static std::optional<MultiPoly> divexact(const MultiPoly& a, const MultiPoly& b) {
        if (b.is_zero()) throw std::invalid_argument("divexact: zero divisor");
        if (a.vs_ != b.vs_) {
            VarSet u = a.vs_.unite(b.vs_);
            return divexact(a.embed(u), b.embed(u));
        }
        MultiPoly q = zero(a.vs_);
        if (a.is_zero()) return q;
        std::map<Mono, Rat, MonoGt> rem;
        for (const auto& t : a.t_) rem.emplace(t.first, t.second);
        const Mono& lbm = b.t_[0].first;
        const Rat& lbc = b.t_[0].second;
        while (!rem.empty()) {
            const auto& lt = *rem.begin();
            if (!mono_divides(lbm, lt.first)) return std::nullopt;
            Mono qm = mono_div(lt.first, lbm);
            Rat qc = lt.second / lbc;
            q.t_.push_back({qm, qc});
            for (const auto& tb : b.t_) {
                Mono m = mono_mul(qm, tb.first);
                auto it = rem.find(m);
                if (it == rem.end()) {
                    rem.emplace(m, -(qc * tb.second));
                } else {
                    it->second -= qc * tb.second;
                    if (it->second == 0) rem.erase(it);
                }
            }
        }
        return q;  // quotient terms were produced in strictly descending order
    }

    // Debug-oriented rendering: terms in canonical order, e.g. "3 l0^2 h - 1/2 k".
    std::string str() const {
        if (t_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& t : t_) {
            Rat c = t.second;
            if (first) {
                if (c < 0) { os << "-"; c = -c; }
            } else {
                os << (c < 0 ? " - " : " + ");
                if (c < 0) c = -c;
            }
            first = false;
            bool any_var = t.first.total > 0;
            if (!any_var || c != 1) os << rat_str(c);
            bool printed = !any_var || c != 1;
            for (std::size_t i = 0; i < vs_.size(); ++i) {
                unsigned e = t.first.e[i];
                if (e == 0) continue;
                if (printed) os << " ";
                os << vs_.name(i);
                if (e > 1) os << "^" << e;
                printed = true;
            }
        }
        return os.str();
    }

  private:
    void sort_terms() {
        std::sort(t_.begin(), t_.end(),
                  [](const Term& a, const Term& b) { return mono_cmp(a.first, b.first) > 0; });
    }

    void normalize() {
        sort_terms();
        std::vector<Term> out;
        out.reserve(t_.size());
        for (auto& t : t_) {
            if (!out.empty() && mono_cmp(out.back().first, t.first) == 0) {
                out.back().second += t.second;
                if (out.back().second == 0) out.pop_back();
            } else if (t.second != 0) {
                out.push_back(std::move(t));
            }
        }
        t_ = std::move(out);
    }

    VarSet vs_;
    std::vector<Term> t_;
};

}  // namespace kjc
