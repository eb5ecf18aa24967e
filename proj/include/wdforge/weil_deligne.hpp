#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "linalg.hpp"

namespace wdforge {

/// Weil-Deligne representation with unramified inertia over a
/// characteristic-zero coefficient field: an invertible Frobenius matrix F
/// and a nilpotent monodromy matrix N with N*F = q*F*N, where q is the
/// residue cardinality. F acts as geometric Frobenius; the commutation sign
/// is fixed by that convention throughout the library.
struct WDRep {
    mpz_class q;
    FieldPtr E;
    Matrix frob;
    Matrix n;

    int d() const { return frob.rows(); }

    FieldElem q_elem() const { return FieldElem::from_rational(E, mpq_class(q)); }

    static WDRep make(const mpz_class& q, FieldPtr E, Matrix frob, Matrix n);
};

/// All violated invariants of a candidate (q, E, F, N); empty means valid.
inline std::vector<std::string> validate_wd(const mpz_class& q, const FieldPtr& E,
                                            const Matrix& frob, const Matrix& n) {
    std::vector<std::string> v;
    if (E->characteristic() != 0) v.push_back("coefficient field must have characteristic 0");
    if (q < 2) {
        v.push_back("q must be a prime power >= 2");
    } else {
        auto fac = detail::z_factor(q);
        if (fac.size() != 1) v.push_back("q = " + q.get_str() + " is not a prime power");
    }
    if (!frob.is_square() || !n.is_square() || frob.rows() != n.rows()) {
        v.push_back("F and N must be square matrices of equal size");
        return v;
    }
    if (!frob.field()->same(*E) || !n.field()->same(*E)) {
        // Later checks mix scalars over E with the matrices, so stop here.
        v.push_back("matrix entries must lie in the declared coefficient field");
        return v;
    }
    if (frob.det().is_zero()) v.push_back("F must be invertible");
    if (!n.is_nilpotent()) v.push_back("N must be nilpotent");
    FieldElem qe = FieldElem::from_rational(E, mpq_class(q));
    if (n * frob != qe * (frob * n)) v.push_back("N*F = q*F*N fails");
    return v;
}

inline WDRep WDRep::make(const mpz_class& q, FieldPtr E, Matrix frob, Matrix n) {
    std::vector<std::string> v = validate_wd(q, E, frob, n);
    if (!v.empty()) fail(Err::ValidationFailed, "invalid Weil-Deligne data", v);
    return WDRep{q, std::move(E), std::move(frob), std::move(n)};
}

/// Special segment block sp(n, c, q): F = diag(c, c/q, ..., c/q^(n-1)) and
/// N sends e_i to e_{i+1}, dropping the last basis vector.
inline WDRep sp(int n, const FieldElem& c, const mpz_class& q) {
    if (n < 1) fail(Err::InvalidInput, "segment length must be >= 1");
    if (c.is_zero()) fail(Err::ZeroParameter, "segment character value must be nonzero");
    const FieldPtr& E = c.field();
    Matrix f(E, n, n), nn(E, n, n);
    FieldElem qe = FieldElem::from_rational(E, mpq_class(q));
    FieldElem cur = c;
    for (int i = 0; i < n; ++i) {
        f.at(i, i) = cur;
        cur = cur / qe;
        if (i + 1 < n) nn.at(i + 1, i) = FieldElem::one(E);
    }
    return WDRep::make(q, E, std::move(f), std::move(nn));
}

inline WDRep direct_sum(const WDRep& a, const WDRep& b) {
    if (a.q != b.q || !a.E->same(*b.E))
        fail(Err::MixedParameters, "direct sum requires matching q and coefficient field");
    return WDRep::make(a.q, a.E, Matrix::block_diag(a.frob, b.frob),
                       Matrix::block_diag(a.n, b.n));
}

/// Twist by the unramified character sending geometric Frobenius to c.
inline WDRep twist_unramified(const WDRep& a, const FieldElem& c) {
    if (c.is_zero()) fail(Err::ZeroParameter, "twist by zero");
    return WDRep::make(a.q, a.E, c * a.frob, a.n);
}

inline WDRep conjugate(const WDRep& a, const Matrix& p) {
    Matrix pinv = p.inverse();
    return WDRep::make(a.q, a.E, p * a.frob * pinv, p * a.n * pinv);
}

inline bool is_frobenius_semisimple(const WDRep& w) {
    Poly r = radical(w.frob.char_poly());
    Matrix acc(w.E, w.d(), w.d());
    for (size_t i = r.coeffs().size(); i-- > 0;)
        acc = acc * w.frob + Matrix::scalar(w.E, w.d(), r.coeffs()[i]);
    return acc.is_zero();
}

/// (F, N) -> (F^ss, N). The semisimple part automatically inherits the
/// commutation with N (it is a polynomial in F), but per the contract this
/// is asserted rather than assumed: WDRep::make re-checks every invariant.
inline WDRep frobenius_semisimplify(const WDRep& w) {
    JordanChevalley jc = jordan_chevalley(w.frob);
    return WDRep::make(w.q, w.E, jc.s, w.n);
}

/// (F, N) -> (F^ss, 0).
inline WDRep semisimplify(const WDRep& w) {
    JordanChevalley jc = jordan_chevalley(w.frob);
    return WDRep::make(w.q, w.E, jc.s, Matrix(w.E, w.d(), w.d()));
}

/// One indecomposable summand class sp(length) twisted to top eigenvalue
/// `top`, with its multiplicity in the decomposition.
struct Segment {
    FieldElem top;
    int length;
    int multiplicity;
};

/// Segment classification of a Frobenius-semisimple representation whose
/// Frobenius characteristic polynomial splits over E.
///
/// N maps the alpha-eigenspace V_alpha into V_{alpha/q} (a consequence of
/// N*F = q*F*N, asserted below), so rank(N^(n-1)|V_alpha) counts summands
/// passing through the eigenvalue alpha with at least n-1 further steps
/// down the chain alpha, alpha/q, alpha/q^2, ... Such a summand is either
/// topped at alpha with length >= n, or passes through q*alpha with >= n
/// further steps; hence
///   #{segments topped at alpha, length >= n}
///     = rank(N^(n-1)|V_alpha) - rank(N^n|V_{q*alpha}),
/// and the exact-length count is the difference of consecutive values.
/// Output is sorted by (length desc, serialized top value asc).
inline std::vector<Segment> segments(const WDRep& w) {
    if (!is_frobenius_semisimple(w))
        fail(Err::NotFrobeniusSemisimple, "apply frobenius_semisimplify first");
    EigenSplit es = eigen_split(w.frob);
    if (es.nonsplit)
        fail(Err::NonSplitCharPoly,
             "Frobenius characteristic polynomial does not split: " + es.nonsplit->str(),
             {es.nonsplit->str()});
    FieldElem qe = w.q_elem();
    // Eigenvalue -> eigenspace basis, keyed canonically.
    std::vector<std::pair<FieldElem, Matrix>> spaces = es.eigenspaces;
    auto find_space = [&](const FieldElem& v) -> const Matrix* {
        for (const auto& [val, sp_] : spaces)
            if (val == v) return &sp_;
        return nullptr;
    };
    // Chain fact: N V_alpha lies in V_{alpha/q}.
    for (const auto& [alpha, space] : spaces) {
        Matrix image = w.n * space;
        if (image.is_zero()) continue;
        FieldElem down = alpha / qe;
        const Matrix* target = find_space(down);
        hard_check(target != nullptr && subspace_leq(image, *target),
                   "N does not map V_alpha into V_{alpha/q}");
    }
    // Powers of N applied to each eigenspace basis.
    std::vector<Segment> out;
    for (const auto& [alpha, space] : spaces) {
        const Matrix* up = find_space(alpha * qe);
        auto rank_pow = [&](const Matrix* sp_, int e) -> int {
            if (!sp_) return 0;
            Matrix m = *sp_;
            for (int i = 0; i < e; ++i) m = w.n * m;
            return m.rank();
        };
        for (int n = 1; n <= w.d(); ++n) {
            int a_n = rank_pow(&space, n - 1) - rank_pow(up, n);
            int a_n1 = rank_pow(&space, n) - rank_pow(up, n + 1);
            int count = a_n - a_n1;
            hard_check(count >= 0, "negative segment count");
            if (count > 0) out.push_back(Segment{alpha, n, count});
        }
    }
    int total = 0;
    for (const Segment& s : out) total += s.length * s.multiplicity;
    hard_check(total == w.d(), "segment lengths do not sum to the dimension");
    std::sort(out.begin(), out.end(), [](const Segment& a, const Segment& b) {
        if (a.length != b.length) return a.length > b.length;
        return FieldElem::cmp(a.top, b.top) < 0;
    });
    return out;
}

namespace detail {

/// Expanded (top, length) list for multiset comparison.
inline std::vector<std::pair<std::string, int>> segment_multiset(const std::vector<Segment>& s) {
    std::vector<std::pair<std::string, int>> v;
    for (const Segment& seg : s)
        for (int i = 0; i < seg.multiplicity; ++i) v.emplace_back(seg.top.str(), seg.length);
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace detail

/// Frobenius-semisimplified isomorphism (the default notion: segment
/// multisets agree). Strict mode additionally compares the Jordan types of
/// the original Frobenius matrices, detecting unipotent differences that
/// semisimplification erases.
inline bool is_isomorphic(const WDRep& a, const WDRep& b, bool strict = false) {
    if (a.q != b.q || !a.E->same(*b.E))
        fail(Err::MixedParameters, "isomorphism test requires matching q and coefficient field");
    std::vector<Segment> sa = segments(frobenius_semisimplify(a));
    std::vector<Segment> sb = segments(frobenius_semisimplify(b));
    if (detail::segment_multiset(sa) != detail::segment_multiset(sb)) return false;
    if (strict) {
        auto ja = jordan_type(a.frob);
        auto jb = jordan_type(b.frob);
        if (ja.size() != jb.size()) return false;
        for (size_t i = 0; i < ja.size(); ++i)
            if (ja[i].first != jb[i].first || ja[i].second != jb[i].second) return false;
    }
    return true;
}

/// Genericity of a 2-dimensional parameter: an L-parameter is generic iff it
/// is not the parameter of a 1-dimensional subquotient; with unramified
/// inertia that means N != 0, or the Frobenius eigenvalue ratio avoids
/// {q, 1/q}.
inline bool is_generic_parameter(const WDRep& w) {
    if (w.d() != 2) fail(Err::WrongRank, "genericity test is for 2-dimensional parameters");
    if (!w.n.is_zero()) return true;
    RootsResult rr = roots_in_field(w.frob.char_poly());
    if (rr.nonsplit)
        fail(Err::NonSplitCharPoly,
             "Frobenius characteristic polynomial does not split: " + rr.nonsplit->str(),
             {rr.nonsplit->str()});
    FieldElem alpha = rr.roots[0].first;
    FieldElem beta = rr.roots.size() > 1 ? rr.roots[1].first : rr.roots[0].first;
    FieldElem ratio = alpha / beta;
    FieldElem qe = w.q_elem();
    return ratio != qe && ratio != qe.inv();
}

/// Nilpotent-orbit closure order on the monodromy operators: N_a is below
/// N_b when rank(N_a^i) <= rank(N_b^i) for every i >= 1.
inline bool monodromy_dominates(const WDRep& a, const WDRep& b) {
    if (a.d() != b.d()) fail(Err::MixedParameters, "monodromy comparison requires equal dimension");
    Matrix pa = Matrix::identity(a.E, a.d());
    Matrix pb = Matrix::identity(b.E, b.d());
    for (int i = 1; i <= a.d(); ++i) {
        pa = pa * a.n;
        pb = pb * b.n;
        if (pa.rank() > pb.rank()) return false;
    }
    return true;
}

}  // namespace wdforge
