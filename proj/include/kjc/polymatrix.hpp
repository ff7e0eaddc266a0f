#pragma once

// Matrices over the polynomial ring: fraction-free (Bareiss) elimination,
// determinants, and one-dimensional kernel extraction with exact
// certification.

#include <stdexcept>
#include <vector>

#include "kjc/polyalg.hpp"

namespace kjc {

struct PolyMatrix {
    VarSet vs;
    std::size_t rows = 0, cols = 0;
    std::vector<MultiPoly> a;  // row-major

    static PolyMatrix make(const VarSet& vs, std::size_t r, std::size_t c) {
        PolyMatrix m;
        m.vs = vs;
        m.rows = r;
        m.cols = c;
        m.a.assign(r * c, MultiPoly::zero(vs));
        return m;
    }
    MultiPoly& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    const MultiPoly& at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

// Fraction-free determinant (Bareiss one-step elimination with row pivoting).
inline MultiPoly bareiss_det(const PolyMatrix& m) {
    if (m.rows != m.cols) throw std::invalid_argument("bareiss_det: non-square matrix");
    std::size_t n = m.rows;
    if (n == 0) return MultiPoly::one(m.vs);
    PolyMatrix w = m;
    int sign = 1;
    MultiPoly prev = MultiPoly::one(m.vs);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        std::size_t piv = k;
        while (piv < n && w.at(piv, k).is_zero()) ++piv;
        if (piv == n) return MultiPoly::zero(m.vs);
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(w.at(piv, j), w.at(k, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                MultiPoly num = w.at(k, k) * w.at(i, j) - w.at(i, k) * w.at(k, j);
                auto q = MultiPoly::divexact(num, prev);
                if (!q) throw std::logic_error("bareiss_det: inexact division");
                w.at(i, j) = *q;
            }
            w.at(i, k) = MultiPoly::zero(m.vs);
        }
        prev = w.at(k, k);
    }
    MultiPoly d = w.at(n - 1, n - 1);
    return sign < 0 ? -d : d;
}

// Determinant by memoized cofactor expansion over column subsets; no
// divisions, efficient for small dense polynomial matrices.
inline MultiPoly det_expansion(const PolyMatrix& m) {
    if (m.rows != m.cols) throw std::invalid_argument("det_expansion: non-square matrix");
    std::size_t n = m.rows;
    if (n == 0) return MultiPoly::one(m.vs);
    if (n > 20) throw std::invalid_argument("det_expansion: matrix too large");
    std::vector<MultiPoly> memo(1u << n);
    memo[0] = MultiPoly::one(m.vs);
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::size_t s = static_cast<std::size_t>(__builtin_popcount(mask));
        std::size_t row = s - 1;
        // Laplace along the last row of the submatrix (rows 0..s-1, columns in
        // mask): sign is (-1)^((s-1) + position of c within the sorted mask).
        MultiPoly acc = MultiPoly::zero(m.vs);
        std::size_t t = 0;
        for (std::size_t c = 0; c < n; ++c) {
            if (!(mask & (1u << c))) continue;
            if (!m.at(row, c).is_zero()) {
                MultiPoly term = m.at(row, c) * memo[mask ^ (1u << c)];
                acc = ((row + t) % 2 == 0) ? acc + term : acc - term;
            }
            ++t;
        }
        memo[mask] = std::move(acc);
    }
    return memo[(1u << n) - 1];
}

enum class KernelStatus { kOk, kFullRank, kNullityAtLeastTwo };

struct KernelResult {
    KernelStatus status = KernelStatus::kOk;
    int rank = 0;
    std::vector<MultiPoly> vec;  // primitive, first nonzero entry has positive leading coeff
};

// Kernel of a matrix expected to have nullity exactly 1.  Fraction-free
// elimination determines rank and pivots; the kernel vector is assembled from
// signed maximal minors (Cramer), made primitive, and certified by an exact
// M * v == 0 check.
inline KernelResult kernel_fraction_free(const PolyMatrix& m) {
    KernelResult out;
    std::size_t rows = m.rows, cols = m.cols;
    PolyMatrix w = m;
    std::vector<std::size_t> rowperm(rows);
    for (std::size_t i = 0; i < rows; ++i) rowperm[i] = i;
    std::vector<std::size_t> pivcols;
    MultiPoly prev = MultiPoly::one(m.vs);
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && w.at(piv, c).is_zero()) ++piv;
        if (piv == rows) continue;
        if (piv != r) {
            for (std::size_t j = 0; j < cols; ++j) std::swap(w.at(piv, j), w.at(r, j));
            std::swap(rowperm[piv], rowperm[r]);
        }
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) {
                MultiPoly num = w.at(r, c) * w.at(i, j) - w.at(i, c) * w.at(r, j);
                auto q = MultiPoly::divexact(num, prev);
                if (!q) throw std::logic_error("kernel_fraction_free: inexact division");
                w.at(i, j) = *q;
            }
            w.at(i, c) = MultiPoly::zero(m.vs);
        }
        prev = w.at(r, c);
        pivcols.push_back(c);
        ++r;
    }
    out.rank = static_cast<int>(pivcols.size());
    if (pivcols.size() == cols) {
        out.status = KernelStatus::kFullRank;
        return out;
    }
    if (cols - pivcols.size() >= 2) {
        out.status = KernelStatus::kNullityAtLeastTwo;
        return out;
    }

    // nullity 1: v_c = (-1)^c det(pivot rows, columns != c)
    std::size_t rk = pivcols.size();
    out.vec.assign(cols, MultiPoly::zero(m.vs));
    for (std::size_t skip = 0; skip < cols; ++skip) {
        PolyMatrix sub = PolyMatrix::make(m.vs, rk, rk);
        for (std::size_t i = 0; i < rk; ++i) {
            std::size_t jj = 0;
            for (std::size_t j = 0; j < cols; ++j) {
                if (j == skip) continue;
                sub.at(i, jj++) = m.at(rowperm[i], j);
            }
        }
        MultiPoly d = bareiss_det(sub);
        out.vec[skip] = (skip % 2 == 0) ? d : -d;
    }

    // canonical form: primitive as a vector, leading nonzero entry positive
    MultiPoly g = gcd_many(out.vec);
    if (g.is_zero()) throw std::logic_error("kernel_fraction_free: zero kernel vector");
    for (auto& vpoly : out.vec) {
        auto q = MultiPoly::divexact(vpoly, g);
        if (!q) throw std::logic_error("kernel_fraction_free: gcd division failed");
        vpoly = *q;
    }
    Rat content(0);
    Int num_g(0), den_l(1);
    for (const auto& vpoly : out.vec)
        for (const auto& t : vpoly.terms()) {
            num_g = int_gcd(num_g, Int(t.second.get_num()));
            den_l = int_lcm(den_l, Int(t.second.get_den()));
        }
    content = rat_make(num_g, den_l);
    for (const auto& vpoly : out.vec) {
        if (vpoly.is_zero()) continue;
        if (vpoly.lead().second < 0) content = -content;
        break;
    }
    for (auto& vpoly : out.vec) vpoly = vpoly / content;

    // certification
    for (std::size_t i = 0; i < rows; ++i) {
        MultiPoly s = MultiPoly::zero(m.vs);
        for (std::size_t c = 0; c < cols; ++c) s = s + m.at(i, c) * out.vec[c];
        if (!s.is_zero()) throw std::logic_error("kernel_fraction_free: M*v != 0");
    }
    return out;
}

}  // namespace kjc
