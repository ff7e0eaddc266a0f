#pragma once

// Multi-modular fast path for map inversion: the dense rational solver in
// cremona.hpp becomes impractical once the candidate-coefficient count grows
// (degree-4 maps on P^4 already need 350 unknowns with enormous rational
// entries).  This header solves the same kernel problem modulo word-sized
// primes at random evaluation points, combines residues by CRT, recovers
// rational coefficients by bounded rational reconstruction, confirms the
// candidate against one further independent prime, and hands it either to
// the exact certifier or — for the high-volume sampling inside parametric
// reconstruction — to a randomized projective identity screen whose rare
// failure is still caught downstream by the held-out validation.

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "kjc/cremona.hpp"

namespace kjc {

namespace mod {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// All arithmetic below assumes a modulus p < 2^63, so sums never wrap.
inline u64 addmod(u64 a, u64 b, u64 p) {
    u64 s = a + b;
    return s >= p ? s - p : s;
}

inline u64 submod(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + (p - b); }

inline u64 mulmod(u64 a, u64 b, u64 p) {
    return static_cast<u64>(static_cast<u128>(a) * b % p);
}

inline u64 powmod(u64 a, u64 e, u64 p) {
    u64 r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

// Modular inverse by the extended Euclidean algorithm; 0 when none exists.
inline u64 invmod(u64 a, u64 p) {
    std::int64_t t = 0, nt = 1;
    u64 r = p, nr = a % p;
    while (nr != 0) {
        u64 q = r / nr;
        std::int64_t tmp = t - static_cast<std::int64_t>(q) * nt;
        t = nt;
        nt = tmp;
        u64 rr = r - q * nr;
        r = nr;
        nr = rr;
    }
    if (r != 1) return 0;
    return t < 0 ? static_cast<u64>(t + static_cast<std::int64_t>(p)) : static_cast<u64>(t);
}

// Deterministic Miller-Rabin for 64-bit integers (the 12 bases below decide
// primality for every n < 3.3 * 10^24).
inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

// Largest prime strictly below the argument.
inline u64 prev_prime(u64 below) {
    if (below <= 2) throw std::invalid_argument("prev_prime: no prime below 2");
    for (u64 c = below - 1;; --c)
        if (is_prime_u64(c)) return c;
}

// A prime does not qualify for a given computation when it divides some
// denominator in the data; the caller skips it and takes the next one.
struct BadPrime : std::runtime_error {
    explicit BadPrime(const std::string& what) : std::runtime_error(what) {}
};

// Reduce a rational to F_p.  Throws BadPrime when p divides the denominator.
inline u64 rat_mod(const Rat& q, u64 p) {
    u64 den = mpz_fdiv_ui(q.get_den().get_mpz_t(), p);
    if (den == 0) throw BadPrime("rat_mod: prime divides a denominator");
    u64 num = mpz_fdiv_ui(q.get_num().get_mpz_t(), p);
    if (num == 0) return 0;
    return den == 1 ? num : mulmod(num, invmod(den, p), p);
}

// Evaluate a polynomial at a point of F_p^n with per-variable power tables.
inline u64 eval_mod(const MultiPoly& f, const std::vector<u64>& pt, u64 p) {
    std::size_t nv = f.vars().size();
    if (pt.size() != nv) throw std::invalid_argument("eval_mod: point arity mismatch");
    std::vector<std::vector<u64>> pw(nv, std::vector<u64>{1 % p});
    u64 acc = 0;
    for (const auto& term : f.terms()) {
        u64 v = rat_mod(term.second, p);
        for (std::size_t i = 0; i < nv && v != 0; ++i) {
            unsigned e = term.first.e[i];
            while (pw[i].size() <= e) pw[i].push_back(mulmod(pw[i].back(), pt[i], p));
            if (e) v = mulmod(v, pw[i][e], p);
        }
        acc = addmod(acc, v, p);
    }
    return acc;
}

// Streaming reduced row echelon form over F_p, mirroring the rational one in
// cremona.hpp: rows are inserted one at a time, kept pivot-normalized, and
// the kernel vector is read off once the nullity is exactly one.
class ModRref {
  public:
    ModRref(std::size_t cols, u64 p) : cols_(cols), p_(p), col_is_pivot_(cols, false) {}

    // Returns true when the row increased the rank.
    bool add_row(std::vector<u64> row) {
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            u64 c = row[pivot_col_[r]];
            if (c == 0) continue;
            const std::vector<u64>& base = rows_[r];
            for (std::size_t j = 0; j < cols_; ++j)
                if (base[j]) row[j] = submod(row[j], mulmod(c, base[j], p_), p_);
        }
        std::size_t piv = cols_;
        for (std::size_t j = 0; j < cols_; ++j)
            if (row[j]) {
                piv = j;
                break;
            }
        if (piv == cols_) return false;
        u64 inv = invmod(row[piv], p_);
        for (std::size_t j = piv; j < cols_; ++j)
            if (row[j]) row[j] = mulmod(row[j], inv, p_);
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            u64 c = rows_[r][piv];
            if (c == 0) continue;
            for (std::size_t j = 0; j < cols_; ++j)
                if (row[j]) rows_[r][j] = submod(rows_[r][j], mulmod(c, row[j], p_), p_);
        }
        col_is_pivot_[piv] = true;
        rows_.push_back(std::move(row));
        pivot_col_.push_back(piv);
        return true;
    }

    std::size_t rank() const { return rows_.size(); }
    std::size_t nullity() const { return cols_ - rows_.size(); }

    // The kernel vector normalized to 1 at the free column; nullity must be 1.
    std::vector<u64> kernel_vector() const {
        if (nullity() != 1) throw std::logic_error("ModRref::kernel_vector: nullity != 1");
        std::size_t free_col = cols_;
        for (std::size_t j = 0; j < cols_; ++j)
            if (!col_is_pivot_[j]) {
                free_col = j;
                break;
            }
        std::vector<u64> x(cols_, 0);
        x[free_col] = 1;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            u64 c = rows_[r][free_col];
            if (c) x[pivot_col_[r]] = p_ - c;
        }
        return x;
    }

  private:
    std::size_t cols_;
    u64 p_;
    std::vector<std::vector<u64>> rows_;
    std::vector<std::size_t> pivot_col_;
    std::vector<char> col_is_pivot_;
};

// Fold one residue into a CRT accumulator kept in [0, modulus): the result
// is the unique value mod modulus * p reducing to the inputs.  The caller
// multiplies the modulus by p once per prime, after combining every
// coordinate against the old modulus.
inline Int crt_combine(const Int& value, const Int& modulus, u64 residue, u64 p) {
    u64 m_mod_p = mpz_fdiv_ui(modulus.get_mpz_t(), p);
    u64 v_mod_p = mpz_fdiv_ui(value.get_mpz_t(), p);
    u64 t = mulmod(submod(residue % p, v_mod_p, p), invmod(m_mod_p, p), p);
    return value + modulus * Int(static_cast<unsigned long>(t));
}

// Bounded rational reconstruction (Wang): recover n/d from n * d^-1 mod M
// with |n|, d <= sqrt((M-1)/2), which makes the answer unique when it exists.
inline std::optional<Rat> rat_reconstruct(const Int& value, const Int& modulus) {
    Int v = value % modulus;
    if (v < 0) v += modulus;
    if (v == 0) return Rat(0);
    Int bound;
    {
        Int half = (modulus - 1) / 2;
        mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());
    }
    Int r0 = modulus, r1 = v, s0 = 0, s1 = 1;
    while (r1 > bound) {
        Int q = r0 / r1;
        Int r2 = r0 - q * r1;
        Int s2 = s0 - q * s1;
        r0 = r1;
        r1 = r2;
        s0 = s1;
        s1 = s2;
    }
    Int num = r1, den = s1;
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (den == 0 || den > bound) return std::nullopt;
    Int g;
    mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (g != 1) return std::nullopt;
    return rat_make(num, den);
}

}  // namespace mod

struct ModularOptions {
    std::uint64_t seed = 0x243F6A8885A308D3ull;  // deterministic by default
    unsigned max_primes = 64;                     // reconstruction budget
    unsigned screen_points = 20;                  // identity screen sample size
    unsigned extra_rows = 24;                     // consistency margin past full rank
};

namespace detail {

// Shared modular core: solve for the inverse coefficient vector of f (flat
// layout, component-major over the given monomial order) as a primitive
// rational vector whose first nonzero entry is positive.  Every returned
// vector was reconstructed from a product of primes and then confirmed
// against one further independent prime.  Throws NoInverseAtDegree as soon
// as the system has full rank modulo any prime (sound: a genuine inverse
// reduces to a nonzero kernel vector mod every prime, because the primitive
// integer solution has coprime coordinates) and InverseAnomaly when the
// kernel stays multi-dimensional or reconstruction fails to converge.
inline std::vector<Rat> modular_inverse_coeffs(const FixedMap& f,
                                               const std::vector<std::vector<unsigned>>& monos,
                                               const ModularOptions& opt,
                                               std::vector<mod::u64>* used_primes = nullptr) {
    using mod::u64;
    std::size_t nv = f.vars.size();
    std::size_t nm = monos.size();
    std::size_t cols = nv * nm;
    int d = f.degree;

    auto kernel_mod = [&](u64 p, std::mt19937_64& rng) -> std::optional<std::vector<u64>> {
        // Reduce every component of f once.
        std::vector<std::vector<std::pair<const Mono*, u64>>> fred(nv);
        for (std::size_t i = 0; i < nv; ++i)
            for (const auto& term : f.comps[i].terms()) {
                u64 c = mod::rat_mod(term.second, p);
                if (c) fred[i].emplace_back(&term.first, c);
            }
        std::uniform_int_distribution<u64> pick(1, p - 1);
        mod::ModRref rref(cols, p);
        std::size_t consistent = 0;
        std::size_t points = 0, max_points = 4 * cols + 64;
        while (consistent < opt.extra_rows && points < max_points) {
            ++points;
            std::vector<u64> pt(nv);
            for (auto& x : pt) x = pick(rng);
            std::vector<std::vector<u64>> pw(nv, std::vector<u64>{1});
            auto power = [&](std::size_t v, unsigned e) {
                while (pw[v].size() <= e) pw[v].push_back(mod::mulmod(pw[v].back(), pt[v], p));
                return pw[v][e];
            };
            std::vector<u64> y(nv, 0);
            for (std::size_t i = 0; i < nv; ++i)
                for (const auto& [mono, c] : fred[i]) {
                    u64 v = c;
                    for (std::size_t j = 0; j < nv && v; ++j)
                        if (mono->e[j]) v = mod::mulmod(v, power(j, mono->e[j]), p);
                    y[i] = mod::addmod(y[i], v, p);
                }
            std::vector<std::vector<u64>> yw(nv, std::vector<u64>{1});
            auto ypower = [&](std::size_t v, unsigned e) {
                while (yw[v].size() <= e) yw[v].push_back(mod::mulmod(yw[v].back(), y[v], p));
                return yw[v][e];
            };
            std::vector<u64> mv(nm);
            for (std::size_t m = 0; m < nm; ++m) {
                u64 v = 1;
                for (std::size_t j = 0; j < nv && v; ++j)
                    if (monos[m][j]) v = mod::mulmod(v, ypower(j, monos[m][j]), p);
                mv[m] = v;
            }
            // One row per identity G_i(f(pt)) * pt_0 - G_0(f(pt)) * pt_i = 0.
            for (std::size_t i = 1; i < nv; ++i) {
                std::vector<u64> row(cols, 0);
                for (std::size_t m = 0; m < nm; ++m) {
                    if (!mv[m]) continue;
                    row[i * nm + m] = mod::mulmod(mv[m], pt[0], p);
                    row[0 * nm + m] = p - mod::mulmod(mv[m], pt[i], p);
                }
                if (rref.add_row(std::move(row)))
                    consistent = 0;
                else if (rref.nullity() <= 1)
                    ++consistent;
                if (rref.nullity() == 0) throw NoInverseAtDegree(d);
            }
        }
        if (rref.nullity() != 1) return std::nullopt;  // kernel not pinned down
        return rref.kernel_vector();
    };

    Int modulus = 1;
    std::vector<Int> acc(cols, Int(0));
    std::size_t ref = SIZE_MAX;  // first coordinate that is nonzero over Q
    std::optional<std::vector<Rat>> candidate;
    unsigned wide_kernels = 0;
    u64 p = 1ull << 62;
    std::mt19937_64 rng(opt.seed);
    std::vector<u64> primes;
    for (unsigned used = 0; used < opt.max_primes;) {
        p = mod::prev_prime(p);
        std::optional<std::vector<u64>> ker;
        try {
            ker = kernel_mod(p, rng);
        } catch (const mod::BadPrime&) {
            continue;
        }
        if (!ker) {
            if (++wide_kernels >= 2)
                throw InverseAnomaly("modular inversion: kernel dimension exceeds one");
            continue;
        }
        std::size_t first = cols;
        for (std::size_t j = 0; j < cols; ++j)
            if ((*ker)[j]) {
                first = j;
                break;
            }
        if (first < ref) {
            // Every earlier prime divided the true value at this coordinate;
            // restart the accumulation normalized at the earlier coordinate.
            modulus = 1;
            std::fill(acc.begin(), acc.end(), Int(0));
            primes.clear();
            candidate.reset();
            ref = first;
        } else if (first > ref) {
            continue;  // p divides the reference coordinate: skip the prime
        }
        u64 scale = mod::invmod((*ker)[ref], p);
        std::vector<u64> normalized(cols);
        for (std::size_t j = 0; j < cols; ++j) normalized[j] = mod::mulmod((*ker)[j], scale, p);

        if (candidate) {
            // Confirm the reconstructed vector against this fresh prime.
            bool match = true;
            try {
                for (std::size_t j = 0; j < cols && match; ++j)
                    if (mod::rat_mod((*candidate)[j], p) != normalized[j]) match = false;
            } catch (const mod::BadPrime&) {
                continue;  // unusable as a confirmation prime; take the next
            }
            if (match) {
                if (used_primes) {
                    *used_primes = primes;
                    used_primes->push_back(p);
                }
                return primitive_vector(*candidate);
            }
            candidate.reset();  // stale partial reconstruction; keep accumulating
        }

        for (std::size_t j = 0; j < cols; ++j)
            acc[j] = mod::crt_combine(acc[j], modulus, normalized[j], p);
        modulus *= Int(static_cast<unsigned long>(p));
        primes.push_back(p);
        ++used;

        std::vector<Rat> out(cols);
        bool ok = true;
        for (std::size_t j = 0; j < cols && ok; ++j) {
            auto r = mod::rat_reconstruct(acc[j], modulus);
            if (!r)
                ok = false;
            else
                out[j] = *r;
        }
        if (ok) candidate = std::move(out);
    }
    throw InverseAnomaly("modular inversion: reconstruction did not converge");
}

// Build the inverse components over j_0 ... j_{nv-1} from a flat coefficient
// vector (the same layout certify_inverse consumes).
inline std::vector<MultiPoly> inverse_comps_from_coeffs(
    const VarSet& target, const std::vector<std::vector<unsigned>>& monos,
    const std::vector<Rat>& coeffs) {
    std::size_t nv = target.size();
    std::size_t nm = monos.size();
    std::vector<MultiPoly> gcomps;
    for (std::size_t i = 0; i < nv; ++i) {
        std::vector<MultiPoly::Term> terms;
        for (std::size_t m = 0; m < nm; ++m) {
            const Rat& c = coeffs[i * nm + m];
            if (c == 0) continue;
            Mono mono = Mono::unit(nv);
            for (std::size_t v = 0; v < nv; ++v) {
                mono.e[v] = static_cast<std::uint16_t>(monos[m][v]);
                mono.total = static_cast<std::uint16_t>(mono.total + monos[m][v]);
            }
            terms.emplace_back(mono, c);
        }
        gcomps.push_back(MultiPoly::from_terms(target, std::move(terms)));
    }
    return gcomps;
}

}  // namespace detail

// Multi-modular inversion with the full exact certificate: same contract and
// same canonical result as invert(), reached without rational elimination.
inline InverseResult invert_modular(const FixedMap& f, const ModularOptions& opt = {}) {
    if (f.comps.size() != f.vars.size())
        throw std::invalid_argument("invert_modular: component count != variable count");
    detail::InverseSystem sys = detail::build_inverse_system(f);
    std::vector<Rat> coeffs = detail::modular_inverse_coeffs(f, sys.monos, opt);
    return detail::certify_inverse(f, sys, coeffs);
}

// Multi-modular inversion screened by randomized projective identity checks
// at a fresh prime instead of the exact certificate.  Meant for high-volume
// sampling (parametric reconstruction) where held-out validation re-checks
// the result; a screen failure still throws rather than returning silently.
inline FixedMap invert_modular_screened(const FixedMap& f, const ModularOptions& opt = {}) {
    using mod::u64;
    std::size_t nv = f.vars.size();
    if (f.comps.size() != nv)
        throw std::invalid_argument("invert_modular_screened: component count != variable count");
    std::vector<std::vector<unsigned>> monos = detail::homogeneous_exponents(nv, f.degree);
    std::vector<u64> primes;
    std::vector<Rat> coeffs = detail::modular_inverse_coeffs(f, monos, opt, &primes);
    VarSet target = detail::target_coords(nv);
    std::vector<MultiPoly> gcomps = detail::inverse_comps_from_coeffs(target, monos, coeffs);

    // Screen at a prime that played no role in the reconstruction.
    u64 q = mod::prev_prime(primes.empty() ? (1ull << 62) : primes.back());
    std::mt19937_64 rng(opt.seed ^ 0x9E3779B97F4A7C15ull);
    for (unsigned s = 0; s < opt.screen_points; ++s) {
        std::uniform_int_distribution<u64> pick(1, q - 1);
        std::vector<u64> pt(nv);
        for (auto& x : pt) x = pick(rng);
        std::vector<u64> y(nv), g(nv);
        bool usable = true;
        try {
            for (std::size_t i = 0; i < nv; ++i) y[i] = mod::eval_mod(f.comps[i], pt, q);
            for (std::size_t i = 0; i < nv; ++i) g[i] = mod::eval_mod(gcomps[i], y, q);
        } catch (const mod::BadPrime&) {
            q = mod::prev_prime(q);
            usable = false;
        }
        if (!usable) {
            --s;
            continue;
        }
        for (std::size_t i = 1; i < nv; ++i)
            if (mod::mulmod(g[i], pt[0], q) != mod::mulmod(g[0], pt[i], q))
                throw InverseAnomaly("modular inversion: identity screen failed");
    }

    FixedMap out;
    out.family = f.family;
    out.n = f.n;
    out.vars = target;
    out.comps = std::move(gcomps);
    out.degree = 0;
    for (const auto& c : out.comps) out.degree = std::max(out.degree, c.degree());
    return out;
}

// Parametric inversion with the modular solver supplying the per-k samples.
inline ParametricMap invert_parametric_modular(const ParametricMap& m,
                                               const LiftOptions& opt = {},
                                               LiftDiagnostics* diag = nullptr,
                                               const ModularOptions& mopt = {}) {
    return invert_parametric(m, opt, diag, [mopt](const FixedMap& f) {
        return invert_modular_screened(f, mopt);
    });
}

}  // namespace kjc
