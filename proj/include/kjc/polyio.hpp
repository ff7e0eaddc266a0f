#pragma once

// Serialization: canonical JSON for polynomials (bit-exact round trip) and a
// human-oriented text rendering with factored coefficients in k.

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

#include "kjc/polyalg.hpp"

namespace kjc {

using Json = nlohmann::ordered_json;

// {"vars": [...], "terms": [{"e": [...], "c": "num/den"}, ...]} with terms in
// the canonical descending graded-lex order.
inline Json poly_to_json(const MultiPoly& p) {
    Json j;
    j["vars"] = p.vars().names();
    Json terms = Json::array();
    for (const auto& t : p.terms()) {
        Json jt;
        Json exps = Json::array();
        for (std::size_t i = 0; i < p.vars().size(); ++i) exps.push_back(t.first.e[i]);
        jt["e"] = exps;
        jt["c"] = rat_str(t.second);
        terms.push_back(jt);
    }
    j["terms"] = terms;
    return j;
}

inline MultiPoly poly_from_json(const Json& j) {
    std::vector<Var> vars;
    for (const auto& name : j.at("vars")) vars.push_back(var_parse(name.get<std::string>()));
    VarSet vs = VarSet::of_vars(vars);
    // positions may permute if input vars were unsorted; map by name
    std::vector<int> pos;
    for (const auto& name : j.at("vars")) pos.push_back(vs.find(name.get<std::string>()));
    std::vector<MultiPoly::Term> terms;
    for (const auto& jt : j.at("terms")) {
        const auto& exps = jt.at("e");
        if (exps.size() != pos.size()) throw std::invalid_argument("poly_from_json: arity mismatch");
        Mono m = Mono::unit(vs.size());
        std::uint32_t tot = 0;
        for (std::size_t i = 0; i < pos.size(); ++i) {
            unsigned e = exps[i].get<unsigned>();
            m.e[pos[i]] = static_cast<std::uint16_t>(e);
            tot += e;
        }
        m.total = static_cast<std::uint16_t>(tot);
        terms.push_back({m, rat_parse(jt.at("c").get<std::string>())});
    }
    return MultiPoly::from_terms(vs, std::move(terms));
}

namespace detail {

// Renders a univariate polynomial in k in factored form when it splits over
// the integers, e.g. "k(k+1)/2"; falls back to an expanded "(...)" form.
inline std::string format_k_coeff(const MultiPoly& c) {
    if (c.is_constant()) {
        Rat r = c.constant_term();
        return rat_str(r);
    }
    Var k = var_parse("k");
    auto rr = rational_roots(c, k);
    bool all_int = rr.cofactor.is_constant();
    for (const auto& rm : rr.roots)
        if (rm.first.get_den() != 1) all_int = false;
    if (!all_int) return "(" + c.str() + ")";
    // c = scale * prod (k - root)^mult, scale = lead coeff
    Rat scale = c.lead().second;
    std::string out;
    if (scale < 0) out += "-";
    Rat mag = abs(scale);
    if (Int(mag.get_num()) != 1) out += Int(mag.get_num()).get_str();
    std::string factors;
    // descending roots print "(k+a)" with smallest shift first: iterate descending
    for (auto it = rr.roots.rbegin(); it != rr.roots.rend(); ++it) {
        Int root_num(it->first.get_num());
        std::string atom;
        if (root_num == 0) {
            atom = "k";
        } else if (root_num < 0) {
            atom = "(k+" + Int(-root_num).get_str() + ")";
        } else {
            atom = "(k-" + root_num.get_str() + ")";
        }
        if (it->second > 1) atom += "^" + std::to_string(it->second);
        factors += atom;
    }
    out += factors;
    if (Int(mag.get_den()) != 1) out += "/" + Int(mag.get_den()).get_str();
    if (out.empty() || out == "-") out += "1";
    return out;
}

}  // namespace detail

// Text form of one map component: monomials in the projective variables with
// their k-coefficients, constant-in-parameters part first (descending h).
inline std::string format_component_text(const MultiPoly& comp) {
    Var k = var_parse("k");
    int kpos = comp.vars().find(k);
    // group terms by the non-k monomial
    struct Group {
        Mono mono;
        std::vector<MultiPoly::Term> kterms;
    };
    std::map<Mono, std::vector<MultiPoly::Term>,
             bool (*)(const Mono&, const Mono&)>
        groups(+[](const Mono& a, const Mono& b) {
            return mono_cmp(a, b) > 0;  // placeholder; re-sorted below
        });
    for (const auto& t : comp.terms()) {
        Mono key = t.first;
        Mono kmono = Mono::unit(comp.vars().size());
        if (kpos >= 0) {
            kmono.e[kpos] = key.e[kpos];
            kmono.total = key.e[kpos];
            key.total = static_cast<std::uint16_t>(key.total - key.e[kpos]);
            key.e[kpos] = 0;
        }
        groups[key].push_back({kmono, t.second});
    }
    // display order: h exponent descending, then descending graded-lex
    int hpos = comp.vars().find(var_parse("h"));
    std::vector<std::pair<Mono, MultiPoly>> ordered;
    for (auto& kv : groups)
        ordered.push_back({kv.first, MultiPoly::from_terms(comp.vars(), std::move(kv.second))});
    std::sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
        if (hpos >= 0 && a.first.e[hpos] != b.first.e[hpos])
            return a.first.e[hpos] > b.first.e[hpos];
        return mono_cmp(a.first, b.first) > 0;
    });

    std::string out;
    bool first = true;
    for (const auto& [mono, kcoef] : ordered) {
        MultiPoly kc = kcoef;
        bool neg = false;
        if (!kc.is_zero() && kc.lead().second < 0) {
            neg = true;
            kc = -kc;
        }
        std::string cs = detail::format_k_coeff(kc);
        std::string monostr;
        for (std::size_t i = 0; i < comp.vars().size(); ++i) {
            unsigned e = mono.e[i];
            if (e == 0) continue;
            if (!monostr.empty()) monostr += " ";
            monostr += comp.vars().name(i);
            if (e > 1) monostr += "^" + std::to_string(e);
        }
        std::string body;
        if (monostr.empty()) {
            body = cs;
        } else if (cs == "1") {
            body = monostr;
        } else {
            body = cs + " " + monostr;
        }
        if (first) {
            out += (neg ? "-" : "") + body;
            first = false;
        } else {
            out += (neg ? " - " : " + ") + body;
        }
    }
    if (out.empty()) out = "0";
    return out;
}

inline std::string format_map_text(const std::vector<MultiPoly>& comps) {
    std::string out = "( ";
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (i) out += " : ";
        out += format_component_text(comps[i]);
    }
    out += " )";
    return out;
}

inline std::string json_dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace kjc
