#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fields.hpp"

namespace wdforge {

/// Dense univariate polynomial over a Field, ascending coefficients with no
/// trailing zeros. The zero polynomial has an empty coefficient vector but
/// still remembers its field.
class Poly {
  public:
    explicit Poly(FieldPtr f) : field_(std::move(f)) {}
    Poly(FieldPtr f, std::vector<FieldElem> c) : field_(std::move(f)), c_(std::move(c)) { trim(); }

    static Poly zero(const FieldPtr& f) { return Poly(f); }
    static Poly one(const FieldPtr& f) { return Poly(f, {FieldElem::one(f)}); }
    static Poly x(const FieldPtr& f) {
        return Poly(f, {FieldElem::zero(f), FieldElem::one(f)});
    }
    static Poly constant(const FieldElem& c) { return Poly(c.field(), {c}); }

    const FieldPtr& field() const { return field_; }
    const std::vector<FieldElem>& coeffs() const { return c_; }
    int deg() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }

    const FieldElem& operator[](size_t i) const { return c_[i]; }

    FieldElem coeff(size_t i) const {
        return i < c_.size() ? c_[i] : FieldElem::zero(field_);
    }

    FieldElem lead() const {
        if (c_.empty()) fail(Err::ZeroParameter, "leading coefficient of zero polynomial");
        return c_.back();
    }

    bool is_monic() const { return !c_.empty() && c_.back().is_one(); }

    Poly monic() const {
        if (is_zero()) return *this;
        FieldElem inv = c_.back().inv();
        Poly r = *this;
        for (auto& x : r.c_) x = x * inv;
        return r;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<FieldElem> r(std::max(a.c_.size(), b.c_.size()),
                                 FieldElem::zero(a.field_));
        for (size_t i = 0; i < a.c_.size(); ++i) r[i] = r[i] + a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) r[i] = r[i] + b.c_[i];
        return Poly(a.field_, std::move(r));
    }

    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<FieldElem> r(std::max(a.c_.size(), b.c_.size()),
                                 FieldElem::zero(a.field_));
        for (size_t i = 0; i < a.c_.size(); ++i) r[i] = r[i] + a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) r[i] = r[i] - b.c_[i];
        return Poly(a.field_, std::move(r));
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly(a.field_);
        std::vector<FieldElem> r(a.c_.size() + b.c_.size() - 1, FieldElem::zero(a.field_));
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] = r[i + j] + a.c_[i] * b.c_[j];
        return Poly(a.field_, std::move(r));
    }

    friend Poly operator*(const FieldElem& s, const Poly& a) {
        Poly r = a;
        for (auto& x : r.c_) x = s * x;
        r.trim();
        return r;
    }

    static void divmod(const Poly& a, const Poly& b, Poly& quo, Poly& rem) {
        if (b.is_zero()) fail(Err::DivisionByZero, "polynomial division by zero");
        rem = a;
        quo = Poly(a.field_);
        quo.c_.assign(rem.c_.size() >= b.c_.size() ? rem.c_.size() - b.c_.size() + 1 : 1,
                      FieldElem::zero(a.field_));
        FieldElem lead_inv = b.lead().inv();
        while (rem.deg() >= b.deg() && !rem.is_zero()) {
            size_t shift = rem.c_.size() - b.c_.size();
            FieldElem c = rem.c_.back() * lead_inv;
            quo.c_[shift] = c;
            for (size_t i = 0; i < b.c_.size(); ++i)
                rem.c_[shift + i] = rem.c_[shift + i] - c * b.c_[i];
            rem.trim();
        }
        quo.trim();
    }

    friend Poly operator/(const Poly& a, const Poly& b) {
        Poly q(a.field_), r(a.field_);
        divmod(a, b, q, r);
        return q;
    }

    friend Poly operator%(const Poly& a, const Poly& b) {
        Poly q(a.field_), r(a.field_);
        divmod(a, b, q, r);
        return r;
    }

    static Poly gcd_monic(Poly a, Poly b) {
        while (!b.is_zero()) {
            Poly r = a % b;
            a = std::move(b);
            b = std::move(r);
        }
        return a.monic();
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly(field_);
        std::vector<FieldElem> r(c_.size() - 1, FieldElem::zero(field_));
        for (size_t i = 1; i < c_.size(); ++i)
            r[i - 1] = FieldElem::from_rational(field_, mpq_class(static_cast<long>(i))) * c_[i];
        return Poly(field_, std::move(r));
    }

    FieldElem eval(const FieldElem& x) const {
        FieldElem v = FieldElem::zero(field_);
        for (size_t i = c_.size(); i-- > 0;) v = v * x + c_[i];
        return v;
    }

    Poly pow_mod(mpz_class e, const Poly& mod) const {
        Poly base = *this % mod;
        Poly r = Poly::one(field_);
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) r = (r * base) % mod;
            base = (base * base) % mod;
            e >>= 1;
        }
        return r;
    }

    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    std::string str() const {
        if (is_zero()) return "0";
        std::string s;
        for (size_t i = c_.size(); i-- > 0;) {
            if (c_[i].is_zero()) continue;
            if (!s.empty()) s += " + ";
            if (i == 0 || !c_[i].is_one()) s += c_[i].str();
            if (i > 0) {
                if (i == 0 || !c_[i].is_one()) s += "*";
                s += "x";
                if (i > 1) s += "^" + std::to_string(i);
            }
        }
        return s;
    }

  private:
    void trim() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }

    FieldPtr field_;
    std::vector<FieldElem> c_;
};

namespace detail {

/// p-th root of a polynomial of the form h(x^p) over F_{l^k}; coefficient
/// p-th roots are c^(l^(k-1)) since Frobenius is an automorphism.
inline Poly frob_pth_root(const Poly& f) {
    const FieldPtr& F = f.field();
    const mpz_class& l = F->characteristic();
    unsigned long p = mpz_get_ui(l.get_mpz_t());
    mpz_class root_exp;
    mpz_pow_ui(root_exp.get_mpz_t(), l.get_mpz_t(), static_cast<unsigned long>(F->degree() - 1));
    std::vector<FieldElem> r;
    for (size_t i = 0; i < f.coeffs().size(); i += p) {
        if (i / p >= r.size()) r.resize(i / p + 1, FieldElem::zero(F));
        r[i / p] = f.coeffs()[i].pow(root_exp);
    }
    for (size_t i = 0; i < f.coeffs().size(); ++i)
        if (i % p != 0 && !f.coeffs()[i].is_zero())
            fail(Err::Internal, "p-th root of a polynomial that is not in x^p");
    return Poly(F, std::move(r));
}

}  // namespace detail

/// Squarefree part (product of the distinct monic irreducible factors).
/// Characteristic-p safe: the inseparable part f' == 0 is handled by taking
/// p-th roots of coefficients, and shared factors between the separable and
/// inseparable parts are merged with an lcm.
inline Poly radical(const Poly& f) {
    if (f.deg() <= 0) return Poly::one(f.field());
    Poly fm = f.monic();
    Poly fp = fm.derivative();
    const mpz_class& ch = f.field()->characteristic();
    if (fp.is_zero()) {
        if (ch == 0) fail(Err::Internal, "zero derivative in characteristic zero");
        return radical(detail::frob_pth_root(fm));
    }
    Poly g = Poly::gcd_monic(fm, fp);
    Poly w = fm / g;
    if (g.deg() <= 0) return w;
    Poly rg = radical(g);
    return w * (rg / Poly::gcd_monic(w, rg));
}

/// Multiset of degrees of the monic irreducible factors of f over a finite
/// field, via distinct-degree gcds on the squarefree part (multiplicities of
/// repeated factors are not reflected). Sorted ascending.
inline std::vector<int> irreducible_factor_degrees(const Poly& f) {
    const FieldPtr& F = f.field();
    if (F->kind() != FieldKind::FiniteField)
        fail(Err::InvalidInput, "factor degrees require a finite field");
    mpz_class q;
    mpz_pow_ui(q.get_mpz_t(), F->characteristic().get_mpz_t(),
               static_cast<unsigned long>(F->degree()));
    Poly rest = radical(f);
    std::vector<int> degrees;
    mpz_class qd(1);
    for (int d = 1; rest.deg() > 0 && d <= rest.deg(); ++d) {
        qd *= q;  // q^d
        Poly xqd = Poly::x(F).pow_mod(qd, rest);
        Poly g = Poly::gcd_monic(xqd - Poly::x(F) % rest, rest);
        if (g.deg() > 0) {
            for (int i = 0; i < g.deg() / d; ++i) degrees.push_back(d);
            rest = rest / g;
        }
    }
    if (rest.deg() > 0) degrees.push_back(rest.deg());
    std::sort(degrees.begin(), degrees.end());
    return degrees;
}

/// Irreducibility over a finite field (Rabin).
inline bool is_irreducible_finite(const Poly& f) {
    const FieldPtr& F = f.field();
    if (F->kind() != FieldKind::FiniteField)
        fail(Err::InvalidInput, "finite-field irreducibility test on the wrong field");
    int n = f.deg();
    if (n <= 0) return false;
    if (n == 1) return true;
    mpz_class q;
    mpz_pow_ui(q.get_mpz_t(), F->characteristic().get_mpz_t(),
               static_cast<unsigned long>(F->degree()));
    Poly fm = f.monic();
    Poly x = Poly::x(F);
    std::vector<int> prime_divisors;
    int m = n;
    for (int p = 2; p * p <= m; ++p)
        if (m % p == 0) {
            prime_divisors.push_back(p);
            while (m % p == 0) m /= p;
        }
    if (m > 1) prime_divisors.push_back(m);
    for (int p : prime_divisors) {
        mpz_class e;
        mpz_pow_ui(e.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(n / p));
        Poly h = x.pow_mod(e, fm) - (x % fm);
        if (Poly::gcd_monic(h, fm).deg() != 0) return false;
    }
    mpz_class e;
    mpz_pow_ui(e.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(n));
    Poly h = x.pow_mod(e, fm) - (x % fm);
    return h.is_zero();
}

namespace detail {

/// All rational roots of a nonzero polynomial with rational coefficients
/// (complete, via the integer divisor search on the primitive integer model).
inline std::vector<mpq_class> rational_roots(const QPoly& p0) {
    QPoly p = p0;
    qp_trim(p);
    if (p.empty()) fail(Err::ZeroParameter, "rational roots of the zero polynomial");
    // Strip powers of x.
    size_t shift = 0;
    while (shift < p.size() && p[shift] == 0) ++shift;
    std::vector<mpq_class> roots;
    if (shift > 0) {
        roots.emplace_back(0);
        p.erase(p.begin(), p.begin() + shift);
    }
    if (p.size() <= 1) return roots;
    mpz_class den(1);
    for (const auto& c : p) den = lcm(den, c.get_den());
    std::vector<mpz_class> g(p.size());
    for (size_t i = 0; i < p.size(); ++i) {
        mpq_class v = p[i] * den;
        g[i] = v.get_num();
    }
    mpz_class content = 0;
    for (const auto& c : g) content = gcd(content, c);
    for (auto& c : g) c /= content;
    auto eval_at = [&](const mpq_class& x) {
        mpq_class v(0);
        for (size_t i = g.size(); i-- > 0;) v = v * x + mpq_class(g[i]);
        return v;
    };
    for (const mpz_class& dn : z_divisors(g.front())) {
        for (const mpz_class& dd : z_divisors(g.back())) {
            for (int sign = -1; sign <= 1; sign += 2) {
                mpq_class cand(sign * dn, dd);
                cand.canonicalize();
                if (eval_at(cand) == 0) roots.push_back(cand);
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

}  // namespace detail

/// Square root in the element's own field, when one exists and the field is
/// within the supported range: Q, any finite field, and simple extensions of
/// degree 2. Simple extensions of degree > 2 are only handled for rational
/// values with rational square roots; other degree > 2 queries raise
/// RootSearchUnsupported because a negative answer could not be certified.
inline std::optional<FieldElem> sqrt_in_field(const FieldElem& a) {
    const FieldPtr& F = a.field();
    if (a.is_zero()) return FieldElem::zero(F);
    switch (F->kind()) {
        case FieldKind::Rationals: {
            const mpq_class& q = a.coeffs()[0];
            if (q < 0) return std::nullopt;
            mpz_class sn, sd;
            if (!mpz_perfect_square_p(q.get_num().get_mpz_t()) ||
                !mpz_perfect_square_p(q.get_den().get_mpz_t()))
                return std::nullopt;
            mpz_sqrt(sn.get_mpz_t(), q.get_num().get_mpz_t());
            mpz_sqrt(sd.get_mpz_t(), q.get_den().get_mpz_t());
            return FieldElem::from_rational(F, mpq_class(sn, sd));
        }
        case FieldKind::FiniteField: {
            const mpz_class& l = F->characteristic();
            mpz_class q;
            mpz_pow_ui(q.get_mpz_t(), l.get_mpz_t(), static_cast<unsigned long>(F->degree()));
            if (l == 2) return a.pow(q / 2);  // squaring is bijective
            // Euler criterion, then express the root via an exponent when
            // q == 3 mod 4, otherwise fall back to a Tonelli-Shanks loop.
            if (!a.pow((q - 1) / 2).is_one()) return std::nullopt;
            if (q % 4 == 3) {
                FieldElem r = a.pow((q + 1) / 4);
                hard_check(r * r == a, "sqrt exponent shortcut");
                return r;
            }
            // Tonelli-Shanks in the cyclic group of order q-1. The needed
            // non-residue is found by a deterministic scan through small
            // coefficient vectors.
            mpz_class s = q - 1;
            unsigned long e = 0;
            while (s % 2 == 0) {
                s /= 2;
                ++e;
            }
            FieldElem z = FieldElem::zero(F);
            {
                std::vector<mpq_class> c(F->degree(), mpq_class(0));
                bool found = false;
                while (!found) {
                    int i = 0;
                    while (i < F->degree()) {
                        c[i] += 1;
                        if (c[i] < mpq_class(l)) break;
                        c[i] = 0;
                        ++i;
                    }
                    if (i == F->degree()) fail(Err::Internal, "non-residue scan exhausted");
                    FieldElem cand = FieldElem::from_coeffs(F, c);
                    if (!cand.is_zero() && !cand.pow((q - 1) / 2).is_one()) {
                        z = cand;
                        found = true;
                    }
                }
            }
            FieldElem m_acc = z.pow(s);
            FieldElem t = a.pow(s);
            FieldElem r = a.pow((s + 1) / 2);
            unsigned long m = e;
            while (!t.is_one()) {
                FieldElem tt = t;
                unsigned long i = 0;
                while (!tt.is_one()) {
                    tt = tt * tt;
                    ++i;
                }
                FieldElem b = m_acc;
                for (unsigned long j = 0; j + i + 1 < m; ++j) b = b * b;
                r = r * b;
                m_acc = b * b;
                t = t * m_acc;
                m = i;
            }
            hard_check(r * r == a, "Tonelli-Shanks result");
            return r;
        }
        case FieldKind::SimpleExtension: {
            const detail::QPoly& mp = F->minpoly();
            if (F->degree() == 2) {
                // z = u + v*theta with theta^2 = -m1*theta - m0. Matching
                // z^2 = d0 + d1*theta gives a rational quadratic in v^2.
                mpq_class m0 = mp[0], m1 = mp[1];
                mpq_class d0 = a.coeffs()[0], d1 = a.coeffs()[1];
                // v == 0 branch: rational square root of a rational value.
                if (d1 == 0) {
                    auto r0 = sqrt_in_field(FieldElem::from_rational(Field::rationals(), d0));
                    if (r0) return FieldElem::from_rational(F, r0->coeffs()[0]);
                }
                // v != 0 branch: u = (d1 + m1 v^2) / (2v), and w = v^2 solves
                // (m1^2 - 4 m0) w^2 + (2 d1 m1 - 4 d0) w + d1^2 = 0.
                detail::QPoly quad = {d1 * d1, 2 * d1 * m1 - 4 * d0, m1 * m1 - 4 * m0};
                detail::qp_trim(quad);
                if (!quad.empty()) {
                    for (const mpq_class& w : detail::rational_roots(quad)) {
                        if (w < 0) continue;
                        auto vroot =
                            sqrt_in_field(FieldElem::from_rational(Field::rationals(), w));
                        if (!vroot) continue;
                        mpq_class v = vroot->coeffs()[0];
                        if (v == 0) continue;
                        mpq_class u = (d1 + m1 * w) / (2 * v);
                        FieldElem z = FieldElem::from_coeffs(F, {u, v});
                        if (z * z == a) return z;
                    }
                }
                return std::nullopt;
            }
            if (auto r = a.as_rational()) {
                auto r0 = sqrt_in_field(FieldElem::from_rational(Field::rationals(), *r));
                if (r0) return FieldElem::from_rational(F, r0->coeffs()[0]);
                fail(Err::RootSearchUnsupported,
                     "square root over an extension of degree > 2 cannot be ruled out");
            }
            fail(Err::RootSearchUnsupported,
                 "square roots over simple extensions of degree > 2 are not supported");
        }
    }
    fail(Err::Internal, "unreachable field kind");
}

/// Roots of f in its own coefficient field, with multiplicities, plus the
/// monic cofactor carrying whatever does not split into linear factors over
/// that field. Complete over Q and over finite fields. Over a simple
/// extension the search covers rational roots plus anything reachable once
/// the residual squarefree factor has degree <= 2; a residual of degree >= 3
/// with strictly irrational roots is returned in `nonsplit` (it may or may
/// not split over the field, so callers treat it as "not known to split").
struct RootsResult {
    std::vector<std::pair<FieldElem, int>> roots;  // sorted by FieldElem::cmp
    std::optional<Poly> nonsplit;                  // monic, degree >= 1 when present
};

namespace detail {

inline std::vector<FieldElem> distinct_roots_finite(const Poly& squarefree);

/// Roots of a squarefree polynomial over a simple extension, best effort as
/// documented on roots_in_field. Returns the unresolved factor via `left`.
inline std::vector<FieldElem> distinct_roots_ext(Poly r, Poly& left) {
    const FieldPtr& F = r.field();
    std::vector<FieldElem> roots;
    bool progress = true;
    while (progress && r.deg() > 0) {
        progress = false;
        if (r.deg() == 1) {
            roots.push_back(-(r.coeff(0) / r.coeff(1)));
            r = Poly::one(F);
            break;
        }
        if (r.deg() == 2) {
            Poly rm = r.monic();
            FieldElem b = rm.coeff(1), c = rm.coeff(0);
            FieldElem four = FieldElem::from_rational(F, mpq_class(4));
            FieldElem disc = b * b - four * c;
            auto s = sqrt_in_field(disc);
            if (s) {
                FieldElem two_inv = FieldElem::from_rational(F, mpq_class(1, 2));
                roots.push_back((-b + *s) * two_inv);
                roots.push_back((-b - *s) * two_inv);
                r = Poly::one(F);
            }
            break;
        }
        // Rational-root pass: a rational c is a root iff it kills every
        // theta-component; candidates come from the first nonzero component.
        QPoly comp;
        for (int pos = 0; pos < F->degree() && comp.empty(); ++pos) {
            QPoly p(r.coeffs().size());
            for (size_t i = 0; i < r.coeffs().size(); ++i) p[i] = r.coeffs()[i].coeffs()[pos];
            qp_trim(p);
            if (!p.empty()) comp = std::move(p);
        }
        for (const mpq_class& cand : rational_roots(comp)) {
            FieldElem c = FieldElem::from_rational(F, cand);
            if (r.eval(c).is_zero()) {
                roots.push_back(c);
                Poly lin(F, {-c, FieldElem::one(F)});
                r = r / lin;
                progress = true;
                break;
            }
        }
    }
    left = r.deg() > 0 ? r.monic() : Poly::one(F);
    return roots;
}

}  // namespace detail

inline RootsResult roots_in_field(const Poly& f) {
    if (f.deg() < 0) fail(Err::ZeroParameter, "roots of the zero polynomial");
    const FieldPtr& F = f.field();
    RootsResult out;
    if (f.deg() == 0) return out;
    Poly rad = radical(f);
    std::vector<FieldElem> distinct;
    Poly left = Poly::one(F);
    switch (F->kind()) {
        case FieldKind::Rationals: {
            detail::QPoly p(rad.coeffs().size());
            for (size_t i = 0; i < p.size(); ++i) p[i] = rad.coeffs()[i].coeffs()[0];
            for (const mpq_class& r : detail::rational_roots(p))
                distinct.push_back(FieldElem::from_rational(F, r));
            break;
        }
        case FieldKind::FiniteField:
            distinct = detail::distinct_roots_finite(rad);
            break;
        case FieldKind::SimpleExtension:
            distinct = detail::distinct_roots_ext(rad, left);
            break;
    }
    std::sort(distinct.begin(), distinct.end(),
              [](const FieldElem& a, const FieldElem& b) { return FieldElem::cmp(a, b) < 0; });
    Poly cof = f.monic();
    for (const FieldElem& r : distinct) {
        Poly lin(F, {-r, FieldElem::one(F)});
        int mult = 0;
        while (true) {
            Poly q(F), rem(F);
            Poly::divmod(cof, lin, q, rem);
            if (!rem.is_zero()) break;
            cof = q;
            ++mult;
        }
        hard_check(mult > 0, "claimed root does not divide");
        out.roots.emplace_back(r, mult);
    }
    if (cof.deg() > 0) out.nonsplit = cof;
    return out;
}

namespace detail {

/// Distinct roots of a squarefree polynomial over a finite field: reduce to
/// the product of linear factors via gcd with x^q - x, then split it.
/// Small fields are scanned directly; larger ones use Cantor-Zassenhaus
/// (odd characteristic) or trace splitting (characteristic 2), derandomized
/// only in the sense that the generator is seeded with a fixed constant.
inline std::vector<FieldElem> distinct_roots_finite(const Poly& squarefree) {
    const FieldPtr& F = squarefree.field();
    const mpz_class& l = F->characteristic();
    mpz_class q;
    mpz_pow_ui(q.get_mpz_t(), l.get_mpz_t(), static_cast<unsigned long>(F->degree()));
    std::vector<FieldElem> roots;
    if (q <= 4096) {
        // Exhaustive scan in coefficient-lexicographic order.
        std::vector<mpq_class> c(F->degree(), mpq_class(0));
        while (true) {
            FieldElem x = FieldElem::from_coeffs(F, c);
            if (squarefree.eval(x).is_zero()) roots.push_back(x);
            int i = 0;
            while (i < F->degree()) {
                c[i] += 1;
                if (c[i] < mpq_class(l)) break;
                c[i] = 0;
                ++i;
            }
            if (i == F->degree()) break;
        }
        return roots;
    }
    Poly x = Poly::x(F);
    Poly linear_part = Poly::gcd_monic(x.pow_mod(q, squarefree) - (x % squarefree), squarefree);
    if (linear_part.deg() <= 0) return roots;
    std::mt19937_64 rng(0x77df00d5u);
    auto random_elem = [&]() {
        std::vector<mpq_class> c(F->degree());
        for (auto& ci : c) ci = mpq_class(mpz_class(rng()) % l);
        return FieldElem::from_coeffs(F, c);
    };
    std::vector<Poly> stack = {linear_part};
    while (!stack.empty()) {
        Poly g = stack.back();
        stack.pop_back();
        if (g.deg() == 1) {
            Poly gm = g.monic();
            roots.push_back(-gm.coeff(0));
            continue;
        }
        Poly h = Poly::one(F);
        while (h.deg() <= 0 || h.deg() == g.deg()) {
            FieldElem a = random_elem();
            Poly shifted(F, {a, FieldElem::one(F)});
            if (l == 2) {
                // Trace map sum_{i<e} (a x)^{2^i} with e = log2(q).
                Poly t = Poly::zero(F);
                Poly term = Poly(F, {FieldElem::zero(F), a}) % g;
                for (int i = 0; i < F->degree(); ++i) {
                    t = (t + term) % g;
                    term = (term * term) % g;
                }
                h = Poly::gcd_monic(t, g);
            } else {
                Poly t = shifted.pow_mod((q - 1) / 2, g) - Poly::one(F);
                h = Poly::gcd_monic(t, g);
            }
        }
        stack.push_back(h);
        stack.push_back(g / h);
    }
    return roots;
}

}  // namespace detail

/// Result of adjoining a root: the extension field, the root inside it, and
/// the image of the base field's generator (identity embedding data).
struct AdjoinResult {
    FieldPtr field;
    FieldElem root;
    std::optional<FieldElem> base_generator_image;  // present when base has degree >= 2
};

/// Smallest-degree field extension of `base` containing a root of the monic
/// polynomial p (which must be irreducible over base; reducible inputs raise
/// ReduciblePolynomial where detectable). Supported bases: Q and finite
/// fields. Simple extensions of Q cannot be extended further here
/// (UnsupportedBase): towers are out of scope.
inline AdjoinResult adjoin_root(const Poly& p, bool trusted = false) {
    const FieldPtr& base = p.field();
    if (p.deg() < 2) fail(Err::InvalidInput, "adjoin_root needs degree >= 2");
    if (!p.is_monic()) fail(Err::InvalidInput, "adjoin_root needs a monic polynomial");
    switch (base->kind()) {
        case FieldKind::SimpleExtension:
            fail(Err::UnsupportedBase, "towers over simple extensions are not supported");
        case FieldKind::Rationals: {
            detail::QPoly m(p.coeffs().size());
            for (size_t i = 0; i < m.size(); ++i) m[i] = p.coeffs()[i].coeffs()[0];
            FieldPtr ext = Field::simple_extension(std::move(m), trusted);
            return AdjoinResult{ext, FieldElem::generator(ext), std::nullopt};
        }
        case FieldKind::FiniteField: {
            if (!is_irreducible_finite(p))
                fail(Err::ReduciblePolynomial, "polynomial is reducible: " + p.str());
            const mpz_class& l = base->characteristic();
            int k = base->degree();
            int total = k * p.deg();
            FieldPtr ext = Field::finite_field(l, total);
            if (k == 1) {
                // Base elements embed as constants; find a root of p in ext.
                Poly lifted(ext);
                {
                    std::vector<FieldElem> c;
                    c.reserve(p.coeffs().size());
                    for (const auto& ci : p.coeffs())
                        c.push_back(FieldElem::from_rational(ext, ci.coeffs()[0]));
                    lifted = Poly(ext, std::move(c));
                }
                RootsResult rr = roots_in_field(lifted);
                hard_check(!rr.roots.empty(), "irreducible polynomial without roots in its splitting degree");
                return AdjoinResult{ext, rr.roots.front().first, std::nullopt};
            }
            // Embed the base generator first: a root of the base minimal
            // polynomial inside ext (smallest in the canonical element order,
            // for reproducibility), then map p's coefficients along it.
            Poly base_min(ext);
            {
                std::vector<FieldElem> c;
                for (const auto& ci : base->minpoly())
                    c.push_back(FieldElem::from_rational(ext, ci));
                base_min = Poly(ext, std::move(c));
            }
            RootsResult base_roots = roots_in_field(base_min);
            hard_check(!base_roots.roots.empty(), "base minimal polynomial has no root in ext");
            FieldElem g_img = base_roots.roots.front().first;
            auto embed = [&](const FieldElem& a) {
                FieldElem v = FieldElem::zero(ext);
                for (size_t i = a.coeffs().size(); i-- > 0;)
                    v = v * g_img + FieldElem::from_rational(ext, a.coeffs()[i]);
                return v;
            };
            std::vector<FieldElem> c;
            c.reserve(p.coeffs().size());
            for (const auto& ci : p.coeffs()) c.push_back(embed(ci));
            RootsResult rr = roots_in_field(Poly(ext, std::move(c)));
            hard_check(!rr.roots.empty(), "irreducible polynomial without roots in its splitting degree");
            return AdjoinResult{ext, rr.roots.front().first, g_img};
        }
    }
    fail(Err::Internal, "unreachable field kind");
}

/// Identity-respecting embedding of `a` into `ext` along the generator image
/// computed by adjoin_root (or trivially, for prime fields and rationals).
inline FieldElem embed_into(const FieldElem& a, const FieldPtr& ext,
                            const std::optional<FieldElem>& base_generator_image) {
    if (a.field()->same(*ext)) return a;
    if (a.field()->degree() == 1) {
        return FieldElem::from_rational(ext, a.coeffs()[0]);
    }
    if (!base_generator_image)
        fail(Err::InvalidInput, "embedding an extension element needs a generator image");
    FieldElem v = FieldElem::zero(ext);
    for (size_t i = a.coeffs().size(); i-- > 0;)
        v = v * (*base_generator_image) + FieldElem::from_rational(ext, a.coeffs()[i]);
    return v;
}

}  // namespace wdforge
