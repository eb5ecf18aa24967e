#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "matrix.hpp"

namespace wdforge {

/// Eigenvalue data of a square matrix over its own coefficient field:
/// roots of the characteristic polynomial that lie in the field (with
/// algebraic multiplicity), the corresponding eigenspaces (not generalized),
/// and the factor of the characteristic polynomial not known to split.
struct EigenSplit {
    std::vector<std::pair<FieldElem, int>> char_roots;
    std::vector<std::pair<FieldElem, Matrix>> eigenspaces;  // kernel bases, columns
    std::optional<Poly> nonsplit;
};

inline EigenSplit eigen_split(const Matrix& m) {
    RootsResult rr = roots_in_field(m.char_poly());
    EigenSplit out;
    out.char_roots = rr.roots;
    out.nonsplit = rr.nonsplit;
    for (const auto& [lambda, mult] : rr.roots) {
        Matrix shifted = m - Matrix::scalar(m.field(), m.rows(), lambda);
        out.eigenspaces.emplace_back(lambda, shifted.kernel_basis());
    }
    return out;
}

inline Matrix generalized_eigenspace(const Matrix& m, const FieldElem& lambda) {
    Matrix shifted = m - Matrix::scalar(m.field(), m.rows(), lambda);
    return shifted.pow(static_cast<unsigned long>(m.rows())).kernel_basis();
}

/// Additive Jordan-Chevalley decomposition m = s + n with s semisimple
/// (annihilated by the squarefree part of the characteristic polynomial),
/// n nilpotent, and s*n == n*s. Both parts are polynomials in m.
///
/// Computed by Newton iteration x <- x - r(x) * r'(x)^{-1} on the squarefree
/// part r, starting at m. Separability of r (the coefficient fields here are
/// perfect) makes r'(x) invertible along the iteration, and convergence takes
/// at most ceil(log2(rows)) + 1 steps; no splitting field is needed.
struct JordanChevalley {
    Matrix s;
    Matrix n;
};

inline JordanChevalley jordan_chevalley(const Matrix& m) {
    if (!m.is_square()) fail(Err::InvalidInput, "decomposition of a non-square matrix");
    const FieldPtr& F = m.field();
    Poly r = radical(m.char_poly());
    Poly rp = r.derivative();
    auto eval_poly = [&](const Poly& p, const Matrix& x) {
        Matrix v(F, x.rows(), x.rows());
        for (size_t i = p.coeffs().size(); i-- > 0;)
            v = v * x + Matrix::scalar(F, x.rows(), p.coeffs()[i]);
        return v;
    };
    Matrix x = m;
    int guard = 0;
    while (true) {
        Matrix rx = eval_poly(r, x);
        if (rx.is_zero()) break;
        Matrix rpx = eval_poly(rp, x);
        x = x - rx * rpx.inverse();
        hard_check(++guard <= m.rows() + 2, "Newton iteration did not converge");
    }
    JordanChevalley out{x, m - x};
    hard_check(out.n.is_nilpotent(), "non-nilpotent residual in Jordan-Chevalley");
    hard_check(out.s * out.n == out.n * out.s, "Jordan-Chevalley parts do not commute");
    return out;
}

/// Multiplicative decomposition m = s * u = u * s with s semisimple and u
/// unipotent; m must be invertible.
struct MultiplicativeJC {
    Matrix s;
    Matrix u;
};

inline MultiplicativeJC multiplicative_jordan_chevalley(const Matrix& m) {
    JordanChevalley jc = jordan_chevalley(m);
    if (jc.s.det().is_zero()) fail(Err::SingularMatrix, "semisimple part is singular");
    Matrix u = Matrix::identity(m.field(), m.rows()) + jc.s.inverse() * jc.n;
    hard_check(jc.s * u == m, "s*u != m in multiplicative decomposition");
    hard_check(u * jc.s == m, "u*s != m in multiplicative decomposition");
    Matrix u_shift = u - Matrix::identity(m.field(), m.rows());
    hard_check(u_shift.is_nilpotent(), "unipotent part is not unipotent");
    return MultiplicativeJC{jc.s, u};
}

/// Jordan type of a nilpotent matrix: the block-size partition, descending.
/// Block sizes follow from the rank sequence r_i = rank(n^i): the number of
/// blocks of size >= s is r_{s-1} - r_s.
inline std::vector<int> nilpotent_jordan_type(const Matrix& n) {
    if (!n.is_nilpotent()) fail(Err::InvalidInput, "Jordan type of a non-nilpotent matrix");
    int dim = n.rows();
    std::vector<int> ranks;  // r_0 = dim, ..., until 0
    Matrix p = Matrix::identity(n.field(), dim);
    ranks.push_back(dim);
    while (ranks.back() > 0) {
        p = p * n;
        ranks.push_back(p.rank());
    }
    std::vector<int> partition;
    for (size_t s = 1; s < ranks.size(); ++s) {
        int count_ge_s = ranks[s - 1] - ranks[s];
        int count_ge_s1 = s + 1 < ranks.size() ? ranks[s] - ranks[s + 1] : 0;
        for (int i = 0; i < count_ge_s - count_ge_s1; ++i)
            partition.push_back(static_cast<int>(s));
    }
    std::sort(partition.rbegin(), partition.rend());
    return partition;
}

/// Full Jordan type: one (eigenvalue, descending block partition) entry per
/// eigenvalue, sorted by the canonical element order. Requires the
/// characteristic polynomial to split over the coefficient field
/// (NonSplitCharPoly otherwise, carrying the offending factor).
inline std::vector<std::pair<FieldElem, std::vector<int>>> jordan_type(const Matrix& m) {
    RootsResult rr = roots_in_field(m.char_poly());
    if (rr.nonsplit)
        fail(Err::NonSplitCharPoly,
             "characteristic polynomial does not split: " + rr.nonsplit->str(),
             {rr.nonsplit->str()});
    std::vector<std::pair<FieldElem, std::vector<int>>> out;
    for (const auto& [lambda, mult] : rr.roots) {
        Matrix shifted = m - Matrix::scalar(m.field(), m.rows(), lambda);
        // Ranks of (m - lambda)^i stabilize at rows - mult, the dimension of
        // the other generalized eigenspaces; the differences before
        // stabilization count blocks exactly as in the nilpotent case.
        std::vector<int> ranks = {m.rows()};
        Matrix p = Matrix::identity(m.field(), m.rows());
        while (ranks.back() > m.rows() - mult) {
            p = p * shifted;
            ranks.push_back(p.rank());
            hard_check(static_cast<int>(ranks.size()) <= m.rows() + 1,
                       "rank sequence failed to stabilize");
        }
        std::vector<int> partition;
        for (size_t s = 1; s < ranks.size(); ++s) {
            int count_ge_s = ranks[s - 1] - ranks[s];
            int count_ge_s1 = s + 1 < ranks.size() ? ranks[s] - ranks[s + 1] : 0;
            for (int i = 0; i < count_ge_s - count_ge_s1; ++i)
                partition.push_back(static_cast<int>(s));
        }
        std::sort(partition.rbegin(), partition.rend());
        int total = 0;
        for (int b : partition) total += b;
        hard_check(total == mult, "Jordan block sizes do not sum to the multiplicity");
        out.emplace_back(lambda, partition);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return FieldElem::cmp(a.first, b.first) < 0;
    });
    return out;
}

}  // namespace wdforge
