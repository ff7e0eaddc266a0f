#pragma once

// Named variable catalogs for the polynomial layer.
//
// Every variable is one of six kinds with an optional index.  The global
// significance order (most significant first, used by the monomial order) is
//   x > j0 > j1 > ... > l0 > l1 > ... > r0 > r1 > ... > h > k.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace kjc {

// The two weight families handled throughout the library.
enum class Family { kOneSided, kTwoSided };

inline std::string family_name(Family f) { return f == Family::kOneSided ? "one" : "two"; }

enum class VarKind : std::uint8_t { X = 0, J = 1, L = 2, R = 3, H = 4, K = 5 };

struct Var {
    VarKind kind;
    std::uint16_t idx;  // meaningful for J/L/R, zero otherwise

    friend bool operator==(const Var& a, const Var& b) {
        return a.kind == b.kind && a.idx == b.idx;
    }
    friend bool operator!=(const Var& a, const Var& b) { return !(a == b); }
    // "Less" = more significant (earlier in the catalog).
    friend bool operator<(const Var& a, const Var& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.idx < b.idx;
    }
};

inline std::string var_name(const Var& v) {
    switch (v.kind) {
        case VarKind::X: return "x";
        case VarKind::H: return "h";
        case VarKind::K: return "k";
        case VarKind::J: return "j" + std::to_string(v.idx);
        case VarKind::L: return "l" + std::to_string(v.idx);
        case VarKind::R: return "r" + std::to_string(v.idx);
    }
    throw std::logic_error("var_name: bad kind");
}

inline Var var_parse(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("var_parse: empty name");
    if (s == "x") return {VarKind::X, 0};
    if (s == "h") return {VarKind::H, 0};
    if (s == "k") return {VarKind::K, 0};
    VarKind k;
    switch (s[0]) {
        case 'j': k = VarKind::J; break;
        case 'l': k = VarKind::L; break;
        case 'r': k = VarKind::R; break;
        default: throw std::invalid_argument("var_parse: bad name '" + s + "'");
    }
    std::size_t pos = 0;
    int idx = std::stoi(s.substr(1), &pos);
    if (pos + 1 != s.size() || idx < 0)
        throw std::invalid_argument("var_parse: bad name '" + s + "'");
    return {k, static_cast<std::uint16_t>(idx)};
}

constexpr std::size_t kMaxVars = 16;

// An immutable, significance-ordered set of variables.
class VarSet {
  public:
    VarSet() = default;

    static VarSet of_vars(std::vector<Var> vars) {
        std::sort(vars.begin(), vars.end());
        for (std::size_t i = 1; i < vars.size(); ++i)
            if (vars[i] == vars[i - 1])
                throw std::invalid_argument("VarSet: duplicate variable");
        if (vars.size() > kMaxVars) throw std::invalid_argument("VarSet: too many variables");
        VarSet vs;
        vs.v_ = std::move(vars);
        return vs;
    }

    static VarSet of(std::initializer_list<const char*> names) {
        std::vector<Var> vars;
        for (const char* n : names) vars.push_back(var_parse(n));
        return of_vars(std::move(vars));
    }

    std::size_t size() const { return v_.size(); }
    const Var& at(std::size_t i) const { return v_[i]; }
    std::string name(std::size_t i) const { return var_name(v_[i]); }

    // Position of v, or -1 when absent.
    int find(const Var& v) const {
        auto it = std::lower_bound(v_.begin(), v_.end(), v);
        if (it != v_.end() && *it == v) return static_cast<int>(it - v_.begin());
        return -1;
    }
    int find(const std::string& name) const { return find(var_parse(name)); }
    bool contains(const Var& v) const { return find(v) >= 0; }

    VarSet unite(const VarSet& o) const {
        std::vector<Var> m;
        std::set_union(v_.begin(), v_.end(), o.v_.begin(), o.v_.end(), std::back_inserter(m));
        if (m.size() > kMaxVars) throw std::invalid_argument("VarSet: too many variables");
        VarSet vs;
        vs.v_ = std::move(m);
        return vs;
    }

    // True when every variable of this set occurs in `super`.
    bool subset_of(const VarSet& super) const {
        return std::includes(super.v_.begin(), super.v_.end(), v_.begin(), v_.end());
    }

    friend bool operator==(const VarSet& a, const VarSet& b) { return a.v_ == b.v_; }
    friend bool operator!=(const VarSet& a, const VarSet& b) { return !(a.v_ == b.v_); }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(v_.size());
        for (const auto& v : v_) out.push_back(var_name(v));
        return out;
    }

  private:
    std::vector<Var> v_;  // sorted: most significant first
};

}  // namespace kjc
