#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wdforge/errors.hpp"
#include "wdforge/fields.hpp"
#include "wdforge/linalg.hpp"
#include "wdforge/matrix.hpp"
#include "wdforge/polynomial.hpp"

namespace wdforge {

/// Compact residue arithmetic for group enumeration. The generic field stack
/// is exact but heap-heavy; enumerating a closure of up to 2*10^5 matrices
/// and solving the cocycle systems wants flat integer arithmetic. Elements of
/// F_{l^k} are coefficient vectors of length k with entries in [0, l).
namespace gfeng {

using I64 = long long;
using El = std::vector<I64>;

struct Ctx {
    I64 l = 0;
    int k = 1;
    std::vector<I64> minpoly;  // monic, size k+1; unused when k == 1
};

inline Ctx ctx_from(const FieldPtr& E) {
    if (!E || E->kind() != FieldKind::FiniteField)
        fail(Err::InvalidInput, "group engine needs a finite coefficient field");
    if (E->characteristic() > mpz_class(1) << 31)
        fail(Err::InvalidInput, "residue characteristic too large for the group engine");
    Ctx c;
    c.l = static_cast<I64>(E->characteristic().get_si());
    c.k = E->degree();
    if (c.k > 1) {
        for (const auto& co : E->minpoly_mod()) c.minpoly.push_back(static_cast<I64>(co.get_si()));
        hard_check(static_cast<int>(c.minpoly.size()) == c.k + 1, "finite field lost its modulus");
    }
    return c;
}

inline El el_zero(const Ctx& c) { return El(static_cast<size_t>(c.k), 0); }

inline El el_one(const Ctx& c) {
    El r = el_zero(c);
    r[0] = 1;
    return r;
}

inline El el_from_i64(const Ctx& c, I64 v) {
    El r = el_zero(c);
    r[0] = ((v % c.l) + c.l) % c.l;
    return r;
}

inline bool el_is_zero(const El& a) {
    for (I64 x : a)
        if (x != 0) return false;
    return true;
}

inline El el_add(const Ctx& c, const El& a, const El& b) {
    El r(a);
    for (int i = 0; i < c.k; ++i) r[i] = (r[i] + b[i]) % c.l;
    return r;
}

inline El el_sub(const Ctx& c, const El& a, const El& b) {
    El r(a);
    for (int i = 0; i < c.k; ++i) r[i] = (r[i] - b[i] + c.l) % c.l;
    return r;
}

inline El el_mul(const Ctx& c, const El& a, const El& b) {
    if (c.k == 1) return El{a[0] * b[0] % c.l};
    std::vector<I64> prod(static_cast<size_t>(2 * c.k - 1), 0);
    for (int i = 0; i < c.k; ++i) {
        if (a[i] == 0) continue;
        for (int j = 0; j < c.k; ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % c.l;
    }
    for (int i = 2 * c.k - 2; i >= c.k; --i) {
        I64 coef = prod[i];
        if (coef == 0) continue;
        prod[i] = 0;
        for (int j = 0; j < c.k; ++j)
            prod[i - c.k + j] = (prod[i - c.k + j] - coef * c.minpoly[j] % c.l + c.l * c.l) % c.l;
    }
    prod.resize(static_cast<size_t>(c.k));
    return prod;
}

namespace impl {

inline I64 int_inv(I64 a, I64 m) {
    I64 old_r = a % m, r = m, old_s = 1, s = 0;
    while (r != 0) {
        I64 q = old_r / r;
        std::swap(old_r -= q * r, r);
        std::swap(old_s -= q * s, s);
    }
    hard_check(old_r == 1 || old_r == -1, "inverse of a non-unit residue");
    if (old_r == -1) old_s = -old_s;
    return ((old_s % m) + m) % m;
}

inline int pv_deg(const std::vector<I64>& p) {
    int d = static_cast<int>(p.size()) - 1;
    while (d >= 0 && p[d] == 0) --d;
    return d;
}

}  // namespace impl

inline El el_inv(const Ctx& c, const El& a) {
    if (el_is_zero(a)) fail(Err::DivisionByZero, "inverse of zero");
    if (c.k == 1) return El{impl::int_inv(a[0], c.l)};
    // Extended Euclid in F_l[x] against the field modulus.
    std::vector<I64> r0 = c.minpoly, r1(a);
    std::vector<I64> s0(1, 0), s1(1, 1);
    while (impl::pv_deg(r1) >= 0) {
        int d0 = impl::pv_deg(r0), d1 = impl::pv_deg(r1);
        if (d0 < d1) {
            std::swap(r0, r1);
            std::swap(s0, s1);
            continue;
        }
        I64 q = r0[d0] % c.l * impl::int_inv(r1[d1], c.l) % c.l;
        int shift = d0 - d1;
        for (int i = 0; i <= d1; ++i) r0[i + shift] = (r0[i + shift] - q * r1[i] % c.l + c.l) % c.l;
        if (s0.size() < s1.size() + shift) s0.resize(s1.size() + shift, 0);
        for (size_t i = 0; i < s1.size(); ++i)
            s0[i + shift] = (s0[i + shift] - q * s1[i] % c.l + c.l) % c.l;
    }
    int d = impl::pv_deg(r0);
    hard_check(d == 0, "field modulus is not irreducible");
    I64 scale = impl::int_inv(r0[0], c.l);
    El out = el_zero(c);
    for (size_t i = 0; i < s0.size() && i < out.size(); ++i) out[i] = s0[i] * scale % c.l;
    return out;
}

using Mat2 = std::array<El, 4>;  // row-major 2x2
using Mat3 = std::array<El, 9>;  // row-major 3x3

inline Mat2 m2_identity(const Ctx& c) { return {el_one(c), el_zero(c), el_zero(c), el_one(c)}; }

inline Mat2 m2_mul(const Ctx& c, const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r[2 * i + j] = el_add(c, el_mul(c, a[2 * i], b[j]), el_mul(c, a[2 * i + 1], b[2 + j]));
    return r;
}

inline Mat2 m2_pow(const Ctx& c, Mat2 base, unsigned long e) {
    Mat2 r = m2_identity(c);
    while (e > 0) {
        if (e & 1ul) r = m2_mul(c, r, base);
        base = m2_mul(c, base, base);
        e >>= 1;
    }
    return r;
}

inline El m2_det(const Ctx& c, const Mat2& a) {
    return el_sub(c, el_mul(c, a[0], a[3]), el_mul(c, a[1], a[2]));
}

inline Mat2 m2_inverse(const Ctx& c, const Mat2& a) {
    El det = m2_det(c, a);
    if (el_is_zero(det)) fail(Err::Singular, "matrix is singular");
    El inv = el_inv(c, det);
    El zero = el_zero(c);
    return {el_mul(c, inv, a[3]), el_mul(c, inv, el_sub(c, zero, a[1])),
            el_mul(c, inv, el_sub(c, zero, a[2])), el_mul(c, inv, a[0])};
}

inline bool m2_is_scalar(const Mat2& a) {
    return el_is_zero(a[1]) && el_is_zero(a[2]) && a[0] == a[3];
}

/// Matrix of X -> g X g^{-1} on the trace-zero basis (e, h, f) with
/// e = E12, h = diag(1,-1), f = E21. Coordinates of a trace-zero
/// [[b, a], [c, -b]] are (a, b, c).
inline Mat3 ad0(const Ctx& c, const Mat2& g) {
    Mat2 gi = m2_inverse(c, g);
    Mat3 out;
    const Mat2 basis[3] = {
        Mat2{el_zero(c), el_one(c), el_zero(c), el_zero(c)},
        Mat2{el_one(c), el_zero(c), el_zero(c), el_sub(c, el_zero(c), el_one(c))},
        Mat2{el_zero(c), el_zero(c), el_one(c), el_zero(c)},
    };
    for (int j = 0; j < 3; ++j) {
        Mat2 conj = m2_mul(c, m2_mul(c, g, basis[j]), gi);
        out[0 * 3 + j] = conj[1];
        out[1 * 3 + j] = conj[0];
        out[2 * 3 + j] = conj[2];
    }
    return out;
}

/// Incremental row-echelon accumulator over F_{l^k}; rows are kept normalized
/// with a recorded pivot column so ranks of large sparse systems accumulate
/// one constraint at a time.
class EchelonAccum {
public:
    EchelonAccum(const Ctx& c, int width) : c_(&c), width_(width) {}

    bool insert(std::vector<El> row) {
        for (size_t ri = 0; ri < rows_.size(); ++ri) {
            const El& lead = row[static_cast<size_t>(pivots_[ri])];
            if (el_is_zero(lead)) continue;
            El factor = lead;
            for (int j = 0; j < width_; ++j) {
                if (el_is_zero(rows_[ri][j])) continue;
                row[j] = el_sub(*c_, row[j], el_mul(*c_, factor, rows_[ri][j]));
            }
        }
        int pivot = -1;
        for (int j = 0; j < width_; ++j)
            if (!el_is_zero(row[j])) {
                pivot = j;
                break;
            }
        if (pivot < 0) return false;
        El inv = el_inv(*c_, row[static_cast<size_t>(pivot)]);
        for (int j = pivot; j < width_; ++j) row[j] = el_mul(*c_, inv, row[j]);
        rows_.push_back(std::move(row));
        pivots_.push_back(pivot);
        return true;
    }

    int rank() const { return static_cast<int>(rows_.size()); }

private:
    const Ctx* c_;
    int width_;
    std::vector<std::vector<El>> rows_;
    std::vector<int> pivots_;
};

struct KeyHash {
    size_t operator()(const std::vector<I64>& v) const {
        size_t h = 1469598103934665603ull;
        for (I64 x : v) {
            h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

inline std::vector<I64> m2_key(const Mat2& m) {
    std::vector<I64> key;
    key.reserve(m[0].size() * 4);
    for (const El& e : m)
        for (I64 x : e) key.push_back(x);
    return key;
}

using ElementIndex = std::unordered_map<std::vector<I64>, int, KeyHash>;

/// Breadth-first closure under right multiplication by the sorted generator
/// list. Insertion order is the canonical element order everywhere else.
inline std::vector<Mat2> close_group_engine(const Ctx& c, std::vector<Mat2> gens, long cap,
                                            ElementIndex* index_out = nullptr) {
    std::sort(gens.begin(), gens.end(),
              [](const Mat2& a, const Mat2& b) { return m2_key(a) < m2_key(b); });
    gens.erase(std::unique(gens.begin(), gens.end()), gens.end());

    std::vector<Mat2> elements;
    ElementIndex index;
    std::deque<int> queue;
    elements.push_back(m2_identity(c));
    index.emplace(m2_key(elements[0]), 0);
    queue.push_back(0);
    while (!queue.empty()) {
        int x = queue.front();
        queue.pop_front();
        for (const Mat2& g : gens) {
            Mat2 y = m2_mul(c, elements[x], g);
            auto key = m2_key(y);
            if (index.find(key) != index.end()) continue;
            if (static_cast<long>(elements.size()) >= cap)
                fail(Err::GroupTooLarge, "group closure exceeds the cap",
                     {"cap = " + std::to_string(cap)});
            index.emplace(std::move(key), static_cast<int>(elements.size()));
            elements.push_back(y);
            queue.push_back(static_cast<int>(elements.size()) - 1);
        }
    }
    if (index_out) *index_out = std::move(index);
    return elements;
}

}  // namespace gfeng

/// A finite subgroup of GL_2(F_{l^k}) given by generators. The closure cap
/// bounds enumeration; the separate h1_cap (see h0_h1_ad0) bounds the
/// cohomology solver.
struct MatGroup {
    mpz_class l;
    int k = 1;
    FieldPtr E;
    std::vector<Matrix> generators;
    long cap = 200000;

    static MatGroup make(const mpz_class& l, int k, std::vector<Matrix> generators,
                         long cap = 200000);
};

inline std::vector<std::string> validate_group(const mpz_class& l, int k,
                                               const std::vector<Matrix>& generators, long cap) {
    std::vector<std::string> bad;
    if (!is_prime(l) || l < 5) bad.push_back("l must be a prime at least 5");
    if (k < 1) bad.push_back("k must be at least 1");
    if (cap < 1) bad.push_back("cap must be positive");
    if (generators.empty()) bad.push_back("at least one generator is required");
    if (!bad.empty()) return bad;
    FieldPtr E = Field::finite_field(l, k);
    for (size_t i = 0; i < generators.size(); ++i) {
        const std::string where = " in generator " + std::to_string(i);
        if (generators[i].rows() != 2 || generators[i].cols() != 2)
            bad.push_back("matrix is not 2x2" + where);
        else if (!generators[i].field()->same(*E))
            bad.push_back("entries live in a different field" + where);
        else if (generators[i].det().is_zero())
            bad.push_back("matrix is singular" + where);
    }
    return bad;
}

inline MatGroup MatGroup::make(const mpz_class& l, int k, std::vector<Matrix> generators,
                               long cap) {
    auto bad = validate_group(l, k, generators, cap);
    if (!bad.empty()) fail(Err::ValidationFailed, "invalid matrix group", bad);
    return MatGroup{l, k, Field::finite_field(l, k), std::move(generators), cap};
}

namespace detail {

inline gfeng::El engine_el(const gfeng::Ctx& c, const FieldElem& x) {
    gfeng::El r = gfeng::el_zero(c);
    const auto& co = x.coeffs();
    for (size_t i = 0; i < co.size() && i < r.size(); ++i)
        r[i] = static_cast<gfeng::I64>(co[i].get_num().get_si());
    return r;
}

inline gfeng::Mat2 engine_m2(const gfeng::Ctx& c, const Matrix& m) {
    return {engine_el(c, m.at(0, 0)), engine_el(c, m.at(0, 1)), engine_el(c, m.at(1, 0)),
            engine_el(c, m.at(1, 1))};
}

inline FieldElem field_el(const FieldPtr& E, const gfeng::El& x) {
    std::vector<mpq_class> co;
    co.reserve(x.size());
    for (gfeng::I64 v : x) co.emplace_back(static_cast<long>(v));
    return FieldElem::from_coeffs(E, co);
}

inline Matrix field_m2(const FieldPtr& E, const gfeng::El x[], int rows, int cols) {
    Matrix m(E, rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m.at(i, j) = field_el(E, x[i * cols + j]);
    return m;
}

struct EngineGroup {
    gfeng::Ctx ctx;
    std::vector<gfeng::Mat2> gens;      // sorted, deduplicated
    std::vector<gfeng::Mat2> elements;  // BFS order, identity first
    gfeng::ElementIndex index;
};

inline EngineGroup enumerate(const MatGroup& g) {
    EngineGroup eg;
    eg.ctx = gfeng::ctx_from(g.E);
    std::vector<gfeng::Mat2> gens;
    gens.reserve(g.generators.size());
    for (const Matrix& m : g.generators) gens.push_back(engine_m2(eg.ctx, m));
    eg.elements = gfeng::close_group_engine(eg.ctx, gens, g.cap, &eg.index);
    // Identity generators carry no information for the fixed-space or cocycle
    // systems (every cocycle vanishes on the identity), so drop them here.
    std::erase(gens, gfeng::m2_identity(eg.ctx));
    std::sort(gens.begin(), gens.end(), [](const gfeng::Mat2& a, const gfeng::Mat2& b) {
        return gfeng::m2_key(a) < gfeng::m2_key(b);
    });
    gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
    eg.gens = std::move(gens);
    return eg;
}

}  // namespace detail

/// Deterministic element list of the generated subgroup (BFS order).
inline std::vector<Matrix> close_group(const MatGroup& g) {
    detail::EngineGroup eg = detail::enumerate(g);
    std::vector<Matrix> out;
    out.reserve(eg.elements.size());
    for (const auto& m : eg.elements) out.push_back(detail::field_m2(g.E, m.data(), 2, 2));
    return out;
}

/// Matrix of X -> g X g^{-1} on the trace-zero basis (e, h, f).
inline Matrix ad0_action(const Matrix& g) {
    if (g.rows() != 2 || g.cols() != 2) fail(Err::InvalidInput, "adjoint action needs a 2x2 matrix");
    if (g.det().is_zero()) fail(Err::Singular, "adjoint action of a singular matrix");
    const FieldPtr& E = g.field();
    Matrix gi = g.inverse();
    Matrix out(E, 3, 3);
    Matrix e(E, 2, 2), h(E, 2, 2), f(E, 2, 2);
    e.at(0, 1) = FieldElem::one(E);
    h.at(0, 0) = FieldElem::one(E);
    h.at(1, 1) = FieldElem::zero(E) - FieldElem::one(E);
    f.at(1, 0) = FieldElem::one(E);
    const Matrix* basis[3] = {&e, &h, &f};
    for (int j = 0; j < 3; ++j) {
        Matrix conj = g * (*basis[j]) * gi;
        out.at(0, j) = conj.at(0, 1);
        out.at(1, j) = conj.at(0, 0);
        out.at(2, j) = conj.at(1, 0);
    }
    return out;
}

namespace detail {

/// Linear expressions for cocycle values: each element carries a 3 x (3m)
/// matrix over F_{l^k} mapping the unknown generator values to f(element).
using ExprRow = std::vector<gfeng::El>;

inline ExprRow expr_zero(const gfeng::Ctx& c, int width) {
    return ExprRow(static_cast<size_t>(3 * width), gfeng::el_zero(c));
}

/// dim Z^1 via the spanning-tree reduction: walk the right-multiplication
/// BFS tree defining f on every element from the generator values, and turn
/// every revisited edge into a linear constraint.
inline int z1_tree_reduction(const EngineGroup& eg) {
    const gfeng::Ctx& c = eg.ctx;
    int m = static_cast<int>(eg.gens.size());
    int width = 3 * m;
    std::vector<ExprRow> expr(eg.elements.size());
    std::vector<bool> known(eg.elements.size(), false);
    std::vector<gfeng::Mat3> ad_cache(eg.elements.size());
    expr[0] = expr_zero(c, width);
    known[0] = true;
    gfeng::EchelonAccum accum(c, width);
    std::deque<int> queue{0};
    std::vector<bool> visited(eg.elements.size(), false);
    visited[0] = true;
    while (!queue.empty()) {
        int x = queue.front();
        queue.pop_front();
        ad_cache[x] = gfeng::ad0(c, eg.elements[x]);
        for (int gi = 0; gi < m; ++gi) {
            gfeng::Mat2 y = gfeng::m2_mul(c, eg.elements[x], eg.gens[gi]);
            int yi = eg.index.at(gfeng::m2_key(y));
            // f(x*s) = f(x) + ad0(x) * f(s)
            ExprRow cand = expr[x];
            for (int r = 0; r < 3; ++r)
                for (int col = 0; col < 3; ++col) {
                    size_t pos = static_cast<size_t>(r) * width + 3 * gi + col;
                    cand[pos] = gfeng::el_add(c, cand[pos], ad_cache[x][3 * r + col]);
                }
            if (!known[yi]) {
                expr[yi] = std::move(cand);
                known[yi] = true;
                if (!visited[yi]) {
                    visited[yi] = true;
                    queue.push_back(yi);
                }
            } else {
                for (int r = 0; r < 3; ++r) {
                    std::vector<gfeng::El> row(static_cast<size_t>(width));
                    bool nonzero = false;
                    for (int col = 0; col < width; ++col) {
                        row[col] = gfeng::el_sub(c, cand[static_cast<size_t>(r) * width + col],
                                                 expr[yi][static_cast<size_t>(r) * width + col]);
                        nonzero = nonzero || !gfeng::el_is_zero(row[col]);
                    }
                    if (nonzero) accum.insert(std::move(row));
                }
            }
        }
    }
    return width - accum.rank();
}

/// dim Z^1 via the full pairwise system: parametrize f through the
/// left-multiplication tree, then impose f(gh) = f(g) + ad0(g) f(h) for every
/// ordered pair of elements.
inline int z1_all_pairs(const EngineGroup& eg) {
    const gfeng::Ctx& c = eg.ctx;
    int m = static_cast<int>(eg.gens.size());
    int width = 3 * m;
    size_t n = eg.elements.size();
    std::vector<ExprRow> expr(n);
    std::vector<bool> known(n, false);
    expr[0] = expr_zero(c, width);
    known[0] = true;
    std::vector<gfeng::Mat3> ad_gens(eg.gens.size());
    for (int gi = 0; gi < m; ++gi) ad_gens[gi] = gfeng::ad0(c, eg.gens[gi]);
    std::deque<int> queue{0};
    while (!queue.empty()) {
        int x = queue.front();
        queue.pop_front();
        for (int gi = 0; gi < m; ++gi) {
            gfeng::Mat2 y = gfeng::m2_mul(c, eg.gens[gi], eg.elements[x]);
            int yi = eg.index.at(gfeng::m2_key(y));
            if (known[yi]) continue;
            // f(s*x) = f(s) + ad0(s) * f(x)
            ExprRow next = expr_zero(c, width);
            for (int r = 0; r < 3; ++r) {
                next[static_cast<size_t>(r) * width + 3 * gi + r] = gfeng::el_one(c);
                for (int col = 0; col < width; ++col) {
                    gfeng::El acc = next[static_cast<size_t>(r) * width + col];
                    for (int t = 0; t < 3; ++t)
                        acc = gfeng::el_add(
                            c, acc,
                            gfeng::el_mul(c, ad_gens[gi][3 * r + t],
                                          expr[x][static_cast<size_t>(t) * width + col]));
                    next[static_cast<size_t>(r) * width + col] = acc;
                }
            }
            expr[yi] = std::move(next);
            known[yi] = true;
            queue.push_back(yi);
        }
    }
    for (bool kn : known) hard_check(kn, "left BFS missed a group element");

    gfeng::EchelonAccum accum(c, width);
    std::vector<gfeng::Mat3> ad_cache(n);
    for (size_t g = 0; g < n; ++g) ad_cache[g] = gfeng::ad0(c, eg.elements[g]);
    for (size_t g = 0; g < n; ++g) {
        for (size_t h = 0; h < n; ++h) {
            gfeng::Mat2 prod = gfeng::m2_mul(c, eg.elements[g], eg.elements[h]);
            size_t gh = static_cast<size_t>(eg.index.at(gfeng::m2_key(prod)));
            for (int r = 0; r < 3; ++r) {
                std::vector<gfeng::El> row(static_cast<size_t>(width));
                bool nonzero = false;
                for (int col = 0; col < width; ++col) {
                    gfeng::El acc = expr[g][static_cast<size_t>(r) * width + col];
                    for (int t = 0; t < 3; ++t)
                        acc = gfeng::el_add(
                            c, acc,
                            gfeng::el_mul(c, ad_cache[g][3 * r + t],
                                          expr[h][static_cast<size_t>(t) * width + col]));
                    acc = gfeng::el_sub(c, acc, expr[gh][static_cast<size_t>(r) * width + col]);
                    nonzero = nonzero || !gfeng::el_is_zero(acc);
                    row[static_cast<size_t>(col)] = std::move(acc);
                }
                if (nonzero) accum.insert(std::move(row));
            }
        }
    }
    return width - accum.rank();
}

/// dim of the common fixed space of ad0 over the given matrices.
inline int h0_dim(const gfeng::Ctx& c, const std::vector<gfeng::Mat2>& mats) {
    gfeng::EchelonAccum accum(c, 3);
    for (const auto& g : mats) {
        gfeng::Mat3 a = gfeng::ad0(c, g);
        for (int r = 0; r < 3; ++r) {
            std::vector<gfeng::El> row(3);
            for (int col = 0; col < 3; ++col) {
                row[col] = a[3 * r + col];
                if (r == col) row[col] = gfeng::el_sub(c, row[col], gfeng::el_one(c));
            }
            accum.insert(std::move(row));
        }
        if (accum.rank() == 3) break;
    }
    return 3 - accum.rank();
}

}  // namespace detail

struct CohomologyDims {
    int h0 = 0;
    int h1 = 0;
    size_t group_order = 0;
};

/// H^0 and H^1 of the group on trace-zero matrices. H^0 comes from the
/// generators (and is re-checked against the full element list); H^1 is
/// computed twice, by the spanning-tree reduction and by the full pairwise
/// cocycle system, and the two must agree.
inline CohomologyDims h0_h1_ad0(const MatGroup& g, long h1_cap = 2000) {
    detail::EngineGroup eg = detail::enumerate(g);
    if (static_cast<long>(eg.elements.size()) > h1_cap)
        fail(Err::GroupTooLarge, "group too large for the cohomology solver",
             {"order = " + std::to_string(eg.elements.size()),
              "h1_cap = " + std::to_string(h1_cap)});

    CohomologyDims dims;
    dims.group_order = eg.elements.size();
    dims.h0 = detail::h0_dim(eg.ctx, eg.gens);
    hard_check(dims.h0 == detail::h0_dim(eg.ctx, eg.elements),
               "fixed space differs between generators and elements");

    int z1_tree = detail::z1_tree_reduction(eg);
    int z1_pairs = detail::z1_all_pairs(eg);
    hard_check(z1_tree == z1_pairs, "cocycle space dimensions disagree between methods");
    int b1 = 3 - dims.h0;  // image of v -> (g -> g.v - v) has the complementary rank
    dims.h1 = z1_tree - b1;
    hard_check(dims.h1 >= 0, "coboundaries exceed cocycles");
    return dims;
}

/// Cross-check surfaces: each returns dim H^1 by a single method.
inline int h1_by_tree_reduction(const MatGroup& g, long h1_cap = 2000) {
    detail::EngineGroup eg = detail::enumerate(g);
    if (static_cast<long>(eg.elements.size()) > h1_cap)
        fail(Err::GroupTooLarge, "group too large for the cohomology solver");
    return detail::z1_tree_reduction(eg) - (3 - detail::h0_dim(eg.ctx, eg.gens));
}

inline int h1_by_all_pairs(const MatGroup& g, long h1_cap = 2000) {
    detail::EngineGroup eg = detail::enumerate(g);
    if (static_cast<long>(eg.elements.size()) > h1_cap)
        fail(Err::GroupTooLarge, "group too large for the cohomology solver");
    return detail::z1_all_pairs(eg) - (3 - detail::h0_dim(eg.ctx, eg.gens));
}

namespace detail {

inline unsigned long element_order(const gfeng::Ctx& c, const gfeng::Mat2& h,
                                   unsigned long group_order,
                                   const std::vector<std::pair<mpz_class, int>>& order_factors) {
    gfeng::Mat2 id = gfeng::m2_identity(c);
    unsigned long o = group_order;
    for (const auto& [p, e] : order_factors) {
        unsigned long pl = p.get_ui();
        for (int i = 0; i < e && o % pl == 0; ++i) {
            if (gfeng::m2_pow(c, h, o / pl) == id)
                o /= pl;
            else
                break;
        }
    }
    hard_check(gfeng::m2_pow(c, h, o) == id, "element order computation failed");
    return o;
}

/// The l'-part of h: the power of h of order coprime to l generating the same
/// prime-to-l behavior (exponent 0 mod the l-part, 1 mod the rest).
inline gfeng::Mat2 l_prime_part(const gfeng::Ctx& c, const gfeng::Mat2& h, unsigned long order,
                                const mpz_class& l) {
    unsigned long lp = l.get_ui();
    unsigned long a = 1;
    unsigned long rest = order;
    while (rest % lp == 0) {
        rest /= lp;
        a *= lp;
    }
    if (a == 1) return h;
    if (rest == 1) return gfeng::m2_identity(c);
    unsigned long u =
        static_cast<unsigned long>(gfeng::impl::int_inv(static_cast<gfeng::I64>(a % rest),
                                                        static_cast<gfeng::I64>(rest)));
    return gfeng::m2_pow(c, h, a * u);
}

}  // namespace detail

struct EnormousReport {
    bool absolutely_irreducible = false;
    bool no_l_power_quotient = false;
    bool h0_zero = false;
    bool h1_zero = false;
    bool simple_submodule_condition = false;
    bool verdict = false;

    size_t group_order = 0;
    int h0 = 0;
    int h1 = 0;
    mpz_class l_quotient_order;                // index of the subgroup of l'-parts
    std::optional<Matrix> fixed_vectors;       // basis of H^0 when nonzero, over F_{l^k}
    std::optional<Matrix> failing_submodule;   // simple W with no regular-semisimple fix, over the splitting field
    std::vector<Matrix> submodule_witnesses;   // one regular-semisimple element per simple W, over F_{l^k}
    int splitting_degree = 1;                  // [splitting field : F_l] used for the submodule search
};

namespace detail {

/// Smallest-degree field containing E = F_{l^k} over which every supplied
/// polynomial splits, together with the image of E's generator.
struct SplitExtension {
    FieldPtr field;
    FieldElem gen_image;
};

inline SplitExtension splitting_extension(const FieldPtr& E, const std::vector<Poly>& polys,
                                          int degree_cap) {
    long need = 1;
    for (const Poly& p : polys)
        for (int d : irreducible_factor_degrees(p)) need = std::lcm(need, static_cast<long>(d));
    long total = need * E->degree();
    if (total > degree_cap)
        fail(Err::SplittingFieldTooLarge, "splitting field degree exceeds the cap",
             {"needed = " + std::to_string(total), "cap = " + std::to_string(degree_cap)});
    if (need == 1) return {E, E->degree() > 1 ? FieldElem::generator(E) : FieldElem::zero(E)};

    FieldPtr ext = Field::finite_field(E->characteristic(), static_cast<int>(total));
    if (E->degree() == 1) return {ext, FieldElem::zero(ext)};
    std::vector<FieldElem> minpoly_coeffs;
    for (const auto& co : E->minpoly_mod())
        minpoly_coeffs.push_back(FieldElem::from_rational(ext, mpq_class(co)));
    RootsResult rr = roots_in_field(Poly(ext, std::move(minpoly_coeffs)));
    hard_check(!rr.roots.empty(), "base modulus has no root in the extension");
    FieldElem best = rr.roots[0].first;
    for (const auto& [r, mult] : rr.roots)
        if (FieldElem::cmp(r, best) < 0) best = r;
    return {ext, best};
}

inline Matrix embed_matrix(const Matrix& m, const FieldPtr& ext, const FieldElem& gen_image) {
    if (m.field()->same(*ext)) return m;
    Matrix out(ext, m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out.at(i, j) = embed_into(m.at(i, j), ext, gen_image);
    return out;
}

/// Common-eigenvector spaces of a list of matrices over a field where all
/// their char polys split: one subspace per surviving eigenvalue tuple.
inline std::vector<Matrix> eigen_branches(const std::vector<Matrix>& mats) {
    hard_check(!mats.empty(), "eigen branches need at least one matrix");
    const FieldPtr& E = mats[0].field();
    int dim = mats[0].rows();
    std::vector<Matrix> current{Matrix::identity(E, dim)};
    for (const Matrix& g : mats) {
        RootsResult rr = roots_in_field(g.char_poly());
        hard_check(!rr.nonsplit.has_value(), "char poly fails to split over the splitting field");
        std::vector<std::pair<FieldElem, int>> roots = rr.roots;
        std::sort(roots.begin(), roots.end(),
                  [](const auto& a, const auto& b) { return FieldElem::cmp(a.first, b.first) < 0; });
        std::vector<Matrix> next;
        for (const Matrix& space : current)
            for (const auto& [lambda, mult] : roots) {
                Matrix eig = (g - Matrix::scalar(E, dim, lambda)).kernel_basis();
                if (eig.cols() == 0) continue;
                Matrix meet = intersect_subspaces(space, eig);
                if (meet.cols() > 0) next.push_back(std::move(meet));
            }
        current = std::move(next);
        if (current.empty()) break;
    }
    return current;
}

}  // namespace detail

/// Decides the large-image conditions for the group: absolute irreducibility,
/// no nontrivial l-power quotient, vanishing of H^0 and H^1 on trace-zero
/// matrices, and a regular-semisimple element with nonzero fixed vector in
/// every simple submodule of the trace-zero representation over a splitting
/// extension.
inline EnormousReport is_enormous(const MatGroup& g) {
    constexpr int kSplitDegreeCap = 12;
    detail::EngineGroup eg = detail::enumerate(g);
    const gfeng::Ctx& c = eg.ctx;

    EnormousReport rep;
    rep.group_order = eg.elements.size();

    CohomologyDims dims = h0_h1_ad0(g);
    rep.h0 = dims.h0;
    rep.h1 = dims.h1;
    rep.h0_zero = (dims.h0 == 0);
    rep.h1_zero = (dims.h1 == 0);
    if (!rep.h0_zero) {
        std::vector<Matrix> rows;
        for (const auto& gen : g.generators)
            rows.push_back(ad0_action(gen) - Matrix::identity(g.E, 3));
        Matrix sys(g.E, 3 * static_cast<int>(rows.size()), 3);
        for (size_t i = 0; i < rows.size(); ++i)
            for (int r = 0; r < 3; ++r)
                for (int col = 0; col < 3; ++col)
                    sys.at(3 * static_cast<int>(i) + r, col) = rows[i].at(r, col);
        rep.fixed_vectors = sys.kernel_basis();
        hard_check(rep.fixed_vectors->cols() == dims.h0,
                   "fixed vectors disagree with the engine fixed-space dimension");
    }

    // l-power quotient: trivial iff the l'-parts of all elements generate
    // everything.
    auto order_factors = detail::z_factor(mpz_class(static_cast<long>(eg.elements.size())));
    std::vector<gfeng::Mat2> parts;
    {
        gfeng::ElementIndex seen;
        for (const auto& h : eg.elements) {
            unsigned long o =
                detail::element_order(c, h, static_cast<unsigned long>(eg.elements.size()),
                                      order_factors);
            gfeng::Mat2 part = detail::l_prime_part(c, h, o, g.l);
            auto key = gfeng::m2_key(part);
            if (seen.find(key) == seen.end()) {
                seen.emplace(std::move(key), static_cast<int>(parts.size()));
                parts.push_back(part);
            }
        }
    }
    std::vector<gfeng::Mat2> sub =
        gfeng::close_group_engine(c, parts, static_cast<long>(eg.elements.size()));
    rep.l_quotient_order = mpz_class(static_cast<long>(eg.elements.size() / sub.size()));
    rep.no_l_power_quotient = (sub.size() == eg.elements.size());

    // Absolute irreducibility of the 2-dimensional representation.
    {
        Matrix commutant_sys(g.E, 4 * static_cast<int>(g.generators.size()), 4);
        for (size_t gi = 0; gi < g.generators.size(); ++gi) {
            const Matrix& a = g.generators[gi];
            // rows: entries of a*X - X*a as linear forms in (x00, x01, x10, x11)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    int row = 4 * static_cast<int>(gi) + 2 * i + j;
                    for (int s = 0; s < 2; ++s) {
                        int col_x_sj = 2 * s + j;  // coefficient of x[s][j] from a*X
                        commutant_sys.at(row, col_x_sj) =
                            commutant_sys.at(row, col_x_sj) + a.at(i, s);
                        int col_x_is = 2 * i + s;  // coefficient of x[i][s] from X*a
                        commutant_sys.at(row, col_x_is) =
                            commutant_sys.at(row, col_x_is) - a.at(s, j);
                    }
                }
        }
        bool commutant_scalar = (commutant_sys.kernel_basis().cols() == 1);

        std::vector<Poly> gen_polys;
        for (const Matrix& a : g.generators) gen_polys.push_back(a.char_poly());
        detail::SplitExtension se = detail::splitting_extension(g.E, gen_polys, kSplitDegreeCap);
        std::vector<Matrix> embedded;
        for (const Matrix& a : g.generators)
            embedded.push_back(detail::embed_matrix(a, se.field, se.gen_image));
        bool no_line = detail::eigen_branches(embedded).empty();
        rep.absolutely_irreducible = commutant_scalar && no_line;
    }

    // Simple submodules of the trace-zero representation over a splitting
    // extension for the full acting algebra.
    {
        std::vector<Matrix> algebra_basis;
        std::vector<Matrix> worklist;
        Matrix span(g.E, 0, 9);
        auto try_add = [&](const Matrix& cand) {
            Matrix row(g.E, 1, 9);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) row.at(0, i * 3 + j) = cand.at(i, j);
            Matrix grown = Matrix::hconcat(span.transpose(), row.transpose()).transpose();
            if (grown.rank() > span.rank()) {
                span = std::move(grown);
                algebra_basis.push_back(cand);
                worklist.push_back(cand);
            }
        };
        std::vector<Matrix> ad_gens;
        for (const Matrix& a : g.generators) ad_gens.push_back(ad0_action(a));
        try_add(Matrix::identity(g.E, 3));
        for (const Matrix& a : ad_gens) try_add(a);
        while (!worklist.empty()) {
            Matrix b = worklist.back();
            worklist.pop_back();
            for (const Matrix& a : ad_gens) try_add(a * b);
            if (span.rank() == 9) break;
        }

        std::vector<Poly> polys;
        for (const Matrix& b : algebra_basis) polys.push_back(b.char_poly());
        detail::SplitExtension se = detail::splitting_extension(g.E, polys, kSplitDegreeCap);
        rep.splitting_degree = se.field->degree();
        std::vector<Matrix> ad_embedded;
        for (const Matrix& a : ad_gens)
            ad_embedded.push_back(detail::embed_matrix(a, se.field, se.gen_image));

        std::vector<Matrix> line_branches = detail::eigen_branches(ad_embedded);
        std::vector<Matrix> dual_mats;
        for (const Matrix& a : ad_embedded) dual_mats.push_back(a.inverse().transpose());
        std::vector<Matrix> dual_branches = detail::eigen_branches(dual_mats);

        std::vector<Matrix> simples = line_branches;
        for (const Matrix& phi : dual_branches) {
            // A multi-dimensional family of invariant planes shares a common
            // invariant line, so none of its members is simple.
            if (phi.cols() != 1) continue;
            Matrix plane = phi.transpose().kernel_basis();
            hard_check(plane.cols() == 2, "dual line must cut out a plane");
            bool has_line = false;
            for (const Matrix& b : line_branches)
                if (intersect_subspaces(plane, b).cols() > 0) has_line = true;
            if (!has_line) simples.push_back(plane);
        }
        if (line_branches.empty() && dual_branches.empty())
            simples.push_back(Matrix::identity(se.field, 3));

        rep.simple_submodule_condition = true;
        std::vector<std::optional<Matrix>> fix_cache(eg.elements.size());
        std::vector<bool> regss_cache(eg.elements.size(), false);
        std::vector<bool> cache_set(eg.elements.size(), false);
        for (const Matrix& w : simples) {
            bool found = false;
            for (size_t hi = 0; hi < eg.elements.size() && !found; ++hi) {
                if (!cache_set[hi]) {
                    cache_set[hi] = true;
                    const gfeng::Mat2& h = eg.elements[hi];
                    gfeng::El tr = gfeng::el_add(c, h[0], h[3]);
                    gfeng::El disc = gfeng::el_sub(
                        c, gfeng::el_mul(c, tr, tr),
                        gfeng::el_mul(c, gfeng::el_from_i64(c, 4), gfeng::m2_det(c, h)));
                    regss_cache[hi] = !gfeng::el_is_zero(disc);
                    if (regss_cache[hi]) {
                        Matrix hm = detail::field_m2(g.E, h.data(), 2, 2);
                        Matrix ad_h = detail::embed_matrix(ad0_action(hm), se.field, se.gen_image);
                        fix_cache[hi] =
                            (ad_h - Matrix::identity(se.field, 3)).kernel_basis();
                    }
                }
                if (!regss_cache[hi]) continue;
                if (intersect_subspaces(w, *fix_cache[hi]).cols() > 0) {
                    found = true;
                    rep.submodule_witnesses.push_back(
                        detail::field_m2(g.E, eg.elements[hi].data(), 2, 2));
                }
            }
            if (!found) {
                rep.simple_submodule_condition = false;
                rep.failing_submodule = w;
                break;
            }
        }
    }

    rep.verdict = rep.absolutely_irreducible && rep.no_l_power_quotient && rep.h0_zero &&
                  rep.h1_zero && rep.simple_submodule_condition;
    return rep;
}

struct EigenvaluePlace {
    FieldElem alpha;
    FieldElem beta;
};

struct DecomposedGenericReport {
    bool verdict = false;
    std::optional<size_t> failing_place;
    std::string reason;  // empty when the verdict is true
};

/// Certificate check at a prime p: the mod-l eigenvalue ratios at every
/// supplied place must avoid {1, p, p^-1}, and p must split completely (an
/// input flag; splitting of primes in the base field is outside this tool).
inline DecomposedGenericReport is_decomposed_generic_at(const mpz_class& p, const mpz_class& l,
                                                        const std::vector<EigenvaluePlace>& places,
                                                        bool splits_completely) {
    if (!is_prime(p) || !is_prime(l))
        fail(Err::InvalidInput, "p and l must be prime");
    if (p == l) fail(Err::EqualCharacteristic, "p must differ from l");

    DecomposedGenericReport rep;
    if (!splits_completely) {
        rep.reason = "does not split completely";
        return rep;
    }
    for (size_t i = 0; i < places.size(); ++i) {
        const FieldElem& alpha = places[i].alpha;
        const FieldElem& beta = places[i].beta;
        if (!alpha.field()->same(*beta.field()) ||
            alpha.field()->kind() != FieldKind::FiniteField ||
            alpha.field()->characteristic() != l)
            fail(Err::InvalidInput, "eigenvalues must live in a field of characteristic l");
        if (alpha.is_zero() || beta.is_zero()) fail(Err::ZeroEigenvalue, "eigenvalues must be nonzero");
        FieldElem ratio = alpha / beta;
        FieldElem pbar = FieldElem::from_rational(alpha.field(), mpq_class(p));
        if (ratio == FieldElem::one(alpha.field())) {
            rep.failing_place = i;
            rep.reason = "ratio = 1";
            return rep;
        }
        if (ratio == pbar) {
            rep.failing_place = i;
            rep.reason = "ratio = p";
            return rep;
        }
        if (ratio == pbar.inv()) {
            rep.failing_place = i;
            rep.reason = "ratio = p^-1";
            return rep;
        }
    }
    rep.verdict = true;
    return rep;
}

struct ScalarCertElement {
    Matrix h;     // 2x2 invertible over F_{l^k}
    FieldElem c;  // mod-l cyclotomic character value, nonzero
};

/// True iff some supplied element is scalar while its cyclotomic character
/// value is not 1 (a scalar element outside the cyclotomic kernel).
inline bool exists_scalar_outside_cyclotomic(const std::vector<ScalarCertElement>& elements) {
    for (const auto& e : elements) {
        if (e.h.rows() != 2 || e.h.cols() != 2 || e.h.det().is_zero())
            fail(Err::InvalidInput, "certificate matrices must be invertible and 2x2");
        if (e.c.is_zero()) fail(Err::InvalidInput, "cyclotomic value must be nonzero");
        bool scalar = e.h.at(0, 1).is_zero() && e.h.at(1, 0).is_zero() &&
                      e.h.at(0, 0) == e.h.at(1, 1);
        if (scalar && e.c != FieldElem::one(e.c.field())) return true;
    }
    return false;
}

}  // namespace wdforge
