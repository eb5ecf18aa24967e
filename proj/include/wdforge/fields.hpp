#pragma once

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace wdforge {

namespace detail {

// ---------------------------------------------------------------------------
// Raw dense polynomial helpers over mpq_class, ascending coefficients.
// These back the element arithmetic of simple extensions and finite fields;
// the user-facing generic polynomial type lives in polynomial.hpp.
// ---------------------------------------------------------------------------

using QPoly = std::vector<mpq_class>;

inline void qp_trim(QPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int qp_deg(const QPoly& p) { return static_cast<int>(p.size()) - 1; }

inline QPoly qp_add(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()), mpq_class(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    qp_trim(r);
    return r;
}

inline QPoly qp_sub(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()), mpq_class(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    qp_trim(r);
    return r;
}

inline QPoly qp_mul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1, mpq_class(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    qp_trim(r);
    return r;
}

inline void qp_divmod(const QPoly& a, const QPoly& b, QPoly& quo, QPoly& rem) {
    if (b.empty()) fail(Err::DivisionByZero, "polynomial division by zero");
    rem = a;
    qp_trim(rem);
    quo.assign(rem.size() >= b.size() ? rem.size() - b.size() + 1 : 1, mpq_class(0));
    const mpq_class& lead = b.back();
    while (qp_deg(rem) >= qp_deg(b)) {
        size_t shift = rem.size() - b.size();
        mpq_class c = rem.back() / lead;
        quo[shift] = c;
        for (size_t i = 0; i < b.size(); ++i) rem[shift + i] -= c * b[i];
        qp_trim(rem);
    }
    qp_trim(quo);
}

inline QPoly qp_rem(const QPoly& a, const QPoly& b) {
    QPoly q, r;
    qp_divmod(a, b, q, r);
    return r;
}

inline QPoly qp_monic(QPoly p) {
    qp_trim(p);
    if (p.empty()) return p;
    mpq_class lead = p.back();
    for (auto& c : p) c /= lead;
    return p;
}

inline QPoly qp_gcd_monic(QPoly a, QPoly b) {
    qp_trim(a);
    qp_trim(b);
    while (!b.empty()) {
        QPoly r = qp_rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return qp_monic(a);
}

/// Extended gcd: returns (g, s) with s*a == g (mod m), g monic. Used for
/// inversion in Q[x]/(m): when gcd(a, m) == 1, s is the inverse of a.
inline std::pair<QPoly, QPoly> qp_half_extgcd(QPoly a, QPoly m) {
    QPoly old_r = std::move(a), r = std::move(m);
    QPoly old_s = {mpq_class(1)}, s = {};
    qp_trim(old_r);
    qp_trim(r);
    while (!r.empty()) {
        QPoly q, rem;
        qp_divmod(old_r, r, q, rem);
        QPoly new_s = qp_sub(old_s, qp_mul(q, s));
        old_r = std::move(r);
        r = std::move(rem);
        old_s = std::move(s);
        s = std::move(new_s);
    }
    if (old_r.empty()) return {old_r, old_s};
    mpq_class lead = old_r.back();
    for (auto& c : old_r) c /= lead;
    for (auto& c : old_s) c /= lead;
    return {old_r, old_s};
}

// ---------------------------------------------------------------------------
// Raw polynomial helpers over F_l (prime field), coefficients as mpz_class
// canonical residues in [0, l).
// ---------------------------------------------------------------------------

using ZPoly = std::vector<mpz_class>;

inline void zp_trim(ZPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int zp_deg(const ZPoly& p) { return static_cast<int>(p.size()) - 1; }

inline mpz_class z_mod(const mpz_class& a, const mpz_class& l) {
    mpz_class r = a % l;
    if (r < 0) r += l;
    return r;
}

inline mpz_class z_invmod(const mpz_class& a, const mpz_class& l) {
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), l.get_mpz_t()) == 0)
        fail(Err::DivisionByZero, "element not invertible modulo " + l.get_str());
    return r;
}

inline ZPoly zp_add(const ZPoly& a, const ZPoly& b, const mpz_class& l) {
    ZPoly r(std::max(a.size(), b.size()), mpz_class(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] = z_mod(r[i] + b[i], l);
    for (auto& c : r) c = z_mod(c, l);
    zp_trim(r);
    return r;
}

inline ZPoly zp_sub(const ZPoly& a, const ZPoly& b, const mpz_class& l) {
    ZPoly r(std::max(a.size(), b.size()), mpz_class(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    for (auto& c : r) c = z_mod(c, l);
    zp_trim(r);
    return r;
}

inline ZPoly zp_mul(const ZPoly& a, const ZPoly& b, const mpz_class& l) {
    if (a.empty() || b.empty()) return {};
    ZPoly r(a.size() + b.size() - 1, mpz_class(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    for (auto& c : r) c = z_mod(c, l);
    zp_trim(r);
    return r;
}

inline void zp_divmod(const ZPoly& a, const ZPoly& b, const mpz_class& l, ZPoly& quo,
                      ZPoly& rem) {
    if (b.empty()) fail(Err::DivisionByZero, "polynomial division by zero");
    rem = a;
    zp_trim(rem);
    quo.assign(rem.size() >= b.size() ? rem.size() - b.size() + 1 : 1, mpz_class(0));
    mpz_class lead_inv = z_invmod(b.back(), l);
    while (zp_deg(rem) >= zp_deg(b)) {
        size_t shift = rem.size() - b.size();
        mpz_class c = z_mod(rem.back() * lead_inv, l);
        quo[shift] = c;
        for (size_t i = 0; i < b.size(); ++i) rem[shift + i] = z_mod(rem[shift + i] - c * b[i], l);
        zp_trim(rem);
    }
    zp_trim(quo);
}

inline ZPoly zp_rem(const ZPoly& a, const ZPoly& b, const mpz_class& l) {
    ZPoly q, r;
    zp_divmod(a, b, l, q, r);
    return r;
}

inline ZPoly zp_monic(ZPoly p, const mpz_class& l) {
    zp_trim(p);
    if (p.empty()) return p;
    mpz_class inv = z_invmod(p.back(), l);
    for (auto& c : p) c = z_mod(c * inv, l);
    return p;
}

inline ZPoly zp_gcd_monic(ZPoly a, ZPoly b, const mpz_class& l) {
    zp_trim(a);
    zp_trim(b);
    while (!b.empty()) {
        ZPoly r = zp_rem(a, b, l);
        a = std::move(b);
        b = std::move(r);
    }
    return zp_monic(std::move(a), l);
}

inline std::pair<ZPoly, ZPoly> zp_half_extgcd(ZPoly a, ZPoly m, const mpz_class& l) {
    ZPoly old_r = std::move(a), r = std::move(m);
    ZPoly old_s = {mpz_class(1)}, s = {};
    zp_trim(old_r);
    zp_trim(r);
    while (!r.empty()) {
        ZPoly q, rem;
        zp_divmod(old_r, r, l, q, rem);
        ZPoly new_s = zp_sub(old_s, zp_mul(q, s, l), l);
        old_r = std::move(r);
        r = std::move(rem);
        old_s = std::move(s);
        s = std::move(new_s);
    }
    if (old_r.empty()) return {old_r, old_s};
    mpz_class inv = z_invmod(old_r.back(), l);
    for (auto& c : old_r) c = z_mod(c * inv, l);
    for (auto& c : old_s) c = z_mod(c * inv, l);
    return {old_r, old_s};
}

inline ZPoly zp_powmod(ZPoly base, mpz_class e, const ZPoly& mod, const mpz_class& l) {
    ZPoly result = {mpz_class(1)};
    base = zp_rem(base, mod, l);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) result = zp_rem(zp_mul(result, base, l), mod, l);
        base = zp_rem(zp_mul(base, base, l), mod, l);
        e >>= 1;
    }
    return result;
}

inline ZPoly zp_derivative(const ZPoly& p, const mpz_class& l) {
    if (p.size() <= 1) return {};
    ZPoly r(p.size() - 1);
    for (size_t i = 1; i < p.size(); ++i) r[i - 1] = z_mod(p[i] * mpz_class(i), l);
    zp_trim(r);
    return r;
}

/// Rabin irreducibility test for a monic polynomial over F_l.
inline bool zp_is_irreducible(const ZPoly& f, const mpz_class& l) {
    int n = zp_deg(f);
    if (n <= 0) return false;
    if (n == 1) return true;
    ZPoly x = {mpz_class(0), mpz_class(1)};
    // x^(l^n) == x mod f, and for each prime p | n, gcd(x^(l^(n/p)) - x, f) == 1.
    std::vector<int> prime_divisors;
    int m = n;
    for (int p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            prime_divisors.push_back(p);
            while (m % p == 0) m /= p;
        }
    }
    if (m > 1) prime_divisors.push_back(m);
    for (int p : prime_divisors) {
        mpz_class e;
        mpz_pow_ui(e.get_mpz_t(), l.get_mpz_t(), static_cast<unsigned long>(n / p));
        ZPoly h = zp_sub(zp_powmod(x, e, f, l), x, l);
        ZPoly g = zp_gcd_monic(h, f, l);
        if (zp_deg(g) != 0) return false;
    }
    mpz_class e;
    mpz_pow_ui(e.get_mpz_t(), l.get_mpz_t(), static_cast<unsigned long>(n));
    ZPoly h = zp_sub(zp_powmod(x, e, f, l), x, l);
    return h.empty();
}

/// Deterministic search for a monic irreducible polynomial of degree n over
/// F_l: scan constant-first lexicographic order over the lower coefficients.
inline ZPoly zp_find_irreducible(const mpz_class& l, int n) {
    if (n == 1) return {mpz_class(0), mpz_class(1)};
    ZPoly f(n + 1, mpz_class(0));
    f[n] = 1;
    while (true) {
        if (zp_is_irreducible(f, l)) return f;
        // Increment the coefficient vector (c_0, ..., c_{n-1}) in base l.
        int i = 0;
        while (i < n) {
            f[i] += 1;
            if (f[i] < l) break;
            f[i] = 0;
            ++i;
        }
        if (i == n) fail(Err::Internal, "irreducible search exhausted (degree " +
                                            std::to_string(n) + " over F_" + l.get_str() + ")");
    }
}

inline std::string q_str(const mpq_class& q) {
    return q.get_str();
}

/// GMP does not canonicalize directly-constructed rationals; every boundary
/// where raw mpq values enter the library funnels through here.
inline mpq_class q_canon(mpq_class q) {
    if (q.get_den() == 0) fail(Err::DivisionByZero, "rational with zero denominator");
    q.canonicalize();
    return q;
}

// ---------------------------------------------------------------------------
// Integer factorization (trial division + Pollard-Brent rho), backing the
// rational root searches. Deterministic: rho uses a fixed increment sequence.
// ---------------------------------------------------------------------------

inline mpz_class rho_step(const mpz_class& x, const mpz_class& c, const mpz_class& n) {
    return (x * x + c) % n;
}

inline mpz_class pollard_brent(const mpz_class& n) {
    if (n % 2 == 0) return 2;
    for (unsigned long c = 1;; ++c) {
        mpz_class x = 2, y = 2, d = 1;
        mpz_class cc(c);
        while (d == 1) {
            x = rho_step(x, cc, n);
            y = rho_step(rho_step(y, cc, n), cc, n);
            mpz_class diff = abs(x - y);
            if (diff == 0) break;
            d = gcd(diff, n);
        }
        if (d != 1 && d != n) return d;
    }
}

inline void z_factor_into(mpz_class n, std::vector<std::pair<mpz_class, int>>& out) {
    if (n <= 1) return;
    if (mpz_probab_prime_p(n.get_mpz_t(), 40)) {
        for (auto& [p, e] : out)
            if (p == n) {
                ++e;
                return;
            }
        out.emplace_back(n, 1);
        return;
    }
    mpz_class d = pollard_brent(n);
    z_factor_into(d, out);
    z_factor_into(n / d, out);
}

/// Prime factorization of |n|, n != 0, with small trial division first.
inline std::vector<std::pair<mpz_class, int>> z_factor(mpz_class n) {
    n = abs(n);
    std::vector<std::pair<mpz_class, int>> out;
    for (long p : {2L, 3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L}) {
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) out.emplace_back(mpz_class(p), e);
    }
    z_factor_into(n, out);
    return out;
}

/// All positive divisors of |n| in unspecified order; throws
/// RootSearchOverflow past `cap` divisors.
inline std::vector<mpz_class> z_divisors(const mpz_class& n, size_t cap = 1u << 18) {
    std::vector<mpz_class> divs = {mpz_class(1)};
    for (const auto& [p, e] : z_factor(n)) {
        size_t base = divs.size();
        if (base * (e + 1) > cap)
            fail(Err::RootSearchOverflow, "too many divisors in rational root search");
        mpz_class pk = 1;
        for (int i = 1; i <= e; ++i) {
            pk *= p;
            for (size_t j = 0; j < base; ++j) divs.push_back(divs[j] * pk);
        }
    }
    return divs;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Field descriptors
// ---------------------------------------------------------------------------

enum class FieldKind { Rationals, SimpleExtension, FiniteField };

class Field;
using FieldPtr = std::shared_ptr<const Field>;

/// Immutable description of a coefficient field: Q, a simple extension
/// Q[x]/(m) with m monic irreducible, or F_{l^k} = F_l[x]/(m). Elements are
/// coefficient vectors against the power basis of the generator; see
/// FieldElem below. Constructors validate the defining data, so holding a
/// FieldPtr is a certificate that the arithmetic is well defined (modulo the
/// `trusted` escape hatch for high-degree rational minimal polynomials).
class Field : public std::enable_shared_from_this<Field> {
  public:
    FieldKind kind() const { return kind_; }
    /// 0 for characteristic-zero fields, l for F_{l^k}.
    const mpz_class& characteristic() const { return char_; }
    /// Degree over the prime field (Q or F_l). 1 means no extension data.
    int degree() const { return degree_; }
    /// Monic defining polynomial, ascending coefficients, size degree()+1.
    /// Empty for degree-1 fields.
    const detail::QPoly& minpoly() const { return minpoly_; }
    /// True when irreducibility of the minimal polynomial was asserted by the
    /// caller rather than verified (degree > 3 over Q without a certificate).
    bool trusted() const { return trusted_; }

    bool same(const Field& o) const {
        if (this == &o) return true;
        if (kind_ != o.kind_ || degree_ != o.degree_ || char_ != o.char_) return false;
        return minpoly_ == o.minpoly_;
    }

    static FieldPtr rationals() {
        static FieldPtr q = FieldPtr(new Field(FieldKind::Rationals, mpz_class(0), 1, {}, false));
        return q;
    }

    /// Q[x]/(m), m monic of degree >= 2 with rational coefficients.
    /// Irreducibility: degree 2 and 3 are certified by the absence of
    /// rational roots; higher degrees require trusted=true after the same
    /// root screen (UnverifiedIrreducibility otherwise).
    static FieldPtr simple_extension(detail::QPoly m, bool trusted = false);

    /// F_{l^k}. For k == 1 the minimal polynomial may be omitted; for k >= 2
    /// it must be monic irreducible of degree k over F_l (Rabin-checked).
    static FieldPtr finite_field(const mpz_class& l, int k, detail::ZPoly m = {});

    /// Defining polynomial of a finite field with coefficients as residues.
    const detail::ZPoly& minpoly_mod() const { return minpoly_mod_; }

  private:
    Field(FieldKind kind, mpz_class ch, int degree, detail::QPoly m, bool trusted)
        : kind_(kind), char_(std::move(ch)), degree_(degree), minpoly_(std::move(m)),
          trusted_(trusted) {
        if (kind_ == FieldKind::FiniteField) {
            minpoly_mod_.reserve(minpoly_.size());
            for (const auto& c : minpoly_) minpoly_mod_.push_back(c.get_num());
        }
    }

    FieldKind kind_;
    mpz_class char_;
    int degree_;
    detail::QPoly minpoly_;
    detail::ZPoly minpoly_mod_;
    bool trusted_;
};

inline bool is_prime(const mpz_class& n) {
    if (n < 2) return false;
    return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

inline FieldPtr Field::simple_extension(detail::QPoly m, bool trusted) {
    for (auto& c : m) c = detail::q_canon(c);
    detail::qp_trim(m);
    int deg = detail::qp_deg(m);
    if (deg < 2) fail(Err::InvalidInput, "extension minimal polynomial must have degree >= 2");
    if (m.back() != 1) fail(Err::InvalidInput, "extension minimal polynomial must be monic");
    // Rational-root screen. Substituting x -> x/den with den the lcm of the
    // coefficient denominators gives a monic integer polynomial whose rational
    // roots are integers dividing its constant term, so the screen is complete:
    // for degree 2 and 3, no rational root certifies irreducibility.
    {
        mpz_class den(1);
        for (const auto& c : m) den = lcm(den, c.get_den());
        std::vector<mpz_class> g(m.size());
        mpz_class scale(1);
        for (int i = deg; i >= 0; --i) {
            mpq_class v = m[i] * scale;
            if (v.get_den() != 1) fail(Err::Internal, "integerization failed");
            g[i] = v.get_num();
            scale *= den;
        }
        if (g[0] == 0) fail(Err::ReduciblePolynomial, "minimal polynomial has root 0");
        for (const mpz_class& d : detail::z_divisors(g[0])) {
            for (int sign = -1; sign <= 1; sign += 2) {
                mpq_class root(sign * d, den);
                root.canonicalize();
                mpq_class val(0);
                for (int i = deg; i >= 0; --i) val = val * root + m[i];
                if (val == 0)
                    fail(Err::ReduciblePolynomial,
                         "minimal polynomial has rational root " + root.get_str());
            }
        }
        if (deg > 3 && !trusted)
            fail(Err::UnverifiedIrreducibility,
                 "degree " + std::to_string(deg) +
                     " over Q: pass trusted=true to assert irreducibility");
    }
    return FieldPtr(new Field(FieldKind::SimpleExtension, mpz_class(0), deg, std::move(m),
                              trusted && deg > 3));
}

inline FieldPtr Field::finite_field(const mpz_class& l, int k, detail::ZPoly m) {
    if (!is_prime(l)) fail(Err::InvalidInput, "characteristic " + l.get_str() + " is not prime");
    if (k < 1) fail(Err::InvalidInput, "extension degree must be >= 1");
    if (k == 1) {
        if (!m.empty() && detail::zp_deg(m) != 1)
            fail(Err::InvalidInput, "degree-1 finite field takes no minimal polynomial");
        return FieldPtr(new Field(FieldKind::FiniteField, l, 1, {}, false));
    }
    if (m.empty()) m = detail::zp_find_irreducible(l, k);
    for (auto& c : m) c = detail::z_mod(c, l);
    detail::zp_trim(m);
    if (detail::zp_deg(m) != k)
        fail(Err::InvalidInput, "minimal polynomial degree does not match k");
    if (m.back() != 1) fail(Err::InvalidInput, "minimal polynomial must be monic");
    if (!detail::zp_is_irreducible(m, l))
        fail(Err::ReduciblePolynomial, "minimal polynomial is reducible over F_" + l.get_str());
    detail::QPoly mq(m.size());
    for (size_t i = 0; i < m.size(); ++i) mq[i] = mpq_class(m[i]);
    return FieldPtr(new Field(FieldKind::FiniteField, l, k, std::move(mq), false));
}

// ---------------------------------------------------------------------------
// Field elements
// ---------------------------------------------------------------------------

/// Element of a Field, stored as the canonical coefficient vector of length
/// field->degree() against the power basis 1, theta, ..., theta^(deg-1).
/// Rationals are length-1 vectors; finite-field coefficients are integral
/// residues in [0, l). Equality is exact coefficient equality, which is
/// canonical-form equality.
class FieldElem {
  public:
    FieldElem() = default;

    static FieldElem zero(const FieldPtr& f) {
        return FieldElem(f, std::vector<mpq_class>(f->degree(), mpq_class(0)));
    }

    static FieldElem one(const FieldPtr& f) { return from_rational(f, mpq_class(1)); }

    /// Embed a rational number. In characteristic l the denominator must be
    /// prime to l; the value is reduced to a residue.
    static FieldElem from_rational(const FieldPtr& f, const mpq_class& q_raw) {
        mpq_class q = detail::q_canon(q_raw);
        std::vector<mpq_class> c(f->degree(), mpq_class(0));
        if (f->kind() == FieldKind::FiniteField) {
            mpz_class num = detail::z_mod(q.get_num(), f->characteristic());
            if (q.get_den() != 1) {
                mpz_class den = detail::z_mod(q.get_den(), f->characteristic());
                if (den == 0)
                    fail(Err::DivisionByZero,
                         "denominator divisible by the characteristic");
                num = detail::z_mod(num * detail::z_invmod(den, f->characteristic()),
                                    f->characteristic());
            }
            c[0] = mpq_class(num);
        } else {
            c[0] = q;
        }
        return FieldElem(f, std::move(c));
    }

    static FieldElem from_integer(const FieldPtr& f, long v) {
        return from_rational(f, mpq_class(v));
    }

    /// Build from a coefficient vector of length <= degree (zero padded).
    static FieldElem from_coeffs(const FieldPtr& f, std::vector<mpq_class> c) {
        if (static_cast<int>(c.size()) > f->degree())
            fail(Err::InvalidInput, "coefficient vector longer than field degree");
        for (auto& x : c) x = detail::q_canon(x);
        c.resize(f->degree(), mpq_class(0));
        if (f->kind() == FieldKind::FiniteField) {
            for (auto& x : c) {
                if (x.get_den() != 1) {
                    mpz_class den = detail::z_mod(x.get_den(), f->characteristic());
                    if (den == 0)
                        fail(Err::DivisionByZero, "denominator divisible by the characteristic");
                    x = mpq_class(detail::z_mod(x.get_num() * detail::z_invmod(den, f->characteristic()),
                                                f->characteristic()));
                } else {
                    x = mpq_class(detail::z_mod(x.get_num(), f->characteristic()));
                }
            }
        }
        return FieldElem(f, std::move(c));
    }

    /// The class of x in Q[x]/(m) or F_l[x]/(m); requires degree >= 2.
    static FieldElem generator(const FieldPtr& f) {
        if (f->degree() < 2) fail(Err::InvalidInput, "prime field has no generator element");
        std::vector<mpq_class> c(f->degree(), mpq_class(0));
        c[1] = 1;
        return FieldElem(f, std::move(c));
    }

    const FieldPtr& field() const { return field_; }
    const std::vector<mpq_class>& coeffs() const { return c_; }

    bool is_zero() const {
        for (const auto& x : c_)
            if (x != 0) return false;
        return true;
    }

    bool is_one() const {
        if (c_.empty() || c_[0] != 1) return false;
        for (size_t i = 1; i < c_.size(); ++i)
            if (c_[i] != 0) return false;
        return true;
    }

    /// The rational value when the element lies in the prime field (always
    /// succeeds for Q; for extensions requires vanishing higher coefficients).
    std::optional<mpq_class> as_rational() const {
        for (size_t i = 1; i < c_.size(); ++i)
            if (c_[i] != 0) return std::nullopt;
        return c_.empty() ? mpq_class(0) : c_[0];
    }

    FieldElem operator-() const {
        FieldElem r = *this;
        if (field_->kind() == FieldKind::FiniteField) {
            for (auto& x : r.c_)
                x = mpq_class(detail::z_mod(-x.get_num(), field_->characteristic()));
        } else {
            for (auto& x : r.c_) x = -x;
        }
        return r;
    }

    friend FieldElem operator+(const FieldElem& a, const FieldElem& b) {
        a.require_same_field(b);
        FieldElem r = a;
        if (a.field_->kind() == FieldKind::FiniteField) {
            const mpz_class& l = a.field_->characteristic();
            for (size_t i = 0; i < r.c_.size(); ++i)
                r.c_[i] = mpq_class(detail::z_mod(r.c_[i].get_num() + b.c_[i].get_num(), l));
        } else {
            for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
        }
        return r;
    }

    friend FieldElem operator-(const FieldElem& a, const FieldElem& b) {
        a.require_same_field(b);
        FieldElem r = a;
        if (a.field_->kind() == FieldKind::FiniteField) {
            const mpz_class& l = a.field_->characteristic();
            for (size_t i = 0; i < r.c_.size(); ++i)
                r.c_[i] = mpq_class(detail::z_mod(r.c_[i].get_num() - b.c_[i].get_num(), l));
        } else {
            for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_[i];
        }
        return r;
    }

    friend FieldElem operator*(const FieldElem& a, const FieldElem& b) {
        a.require_same_field(b);
        const FieldPtr& f = a.field_;
        switch (f->kind()) {
            case FieldKind::Rationals:
                return FieldElem(f, {a.c_[0] * b.c_[0]});
            case FieldKind::SimpleExtension: {
                detail::QPoly p = detail::qp_rem(detail::qp_mul(a.c_, b.c_), f->minpoly());
                p.resize(f->degree(), mpq_class(0));
                return FieldElem(f, std::move(p));
            }
            case FieldKind::FiniteField: {
                const mpz_class& l = f->characteristic();
                if (f->degree() == 1)
                    return FieldElem(
                        f, {mpq_class(detail::z_mod(a.c_[0].get_num() * b.c_[0].get_num(), l))});
                detail::ZPoly pa = a.residues(), pb = b.residues();
                detail::ZPoly p = detail::zp_rem(detail::zp_mul(pa, pb, l), f->minpoly_mod(), l);
                p.resize(f->degree(), mpz_class(0));
                std::vector<mpq_class> c(p.size());
                for (size_t i = 0; i < p.size(); ++i) c[i] = mpq_class(p[i]);
                return FieldElem(f, std::move(c));
            }
        }
        fail(Err::Internal, "unreachable field kind");
    }

    FieldElem inv() const {
        if (is_zero()) fail(Err::DivisionByZero, "inverse of zero");
        const FieldPtr& f = field_;
        switch (f->kind()) {
            case FieldKind::Rationals:
                return FieldElem(f, {mpq_class(1) / c_[0]});
            case FieldKind::SimpleExtension: {
                auto [g, s] = detail::qp_half_extgcd(c_, f->minpoly());
                if (detail::qp_deg(g) != 0)
                    fail(Err::DivisionByZero, "non-invertible element (reducible modulus?)");
                detail::QPoly r = detail::qp_rem(s, f->minpoly());
                r.resize(f->degree(), mpq_class(0));
                return FieldElem(f, std::move(r));
            }
            case FieldKind::FiniteField: {
                const mpz_class& l = f->characteristic();
                if (f->degree() == 1)
                    return FieldElem(f, {mpq_class(detail::z_invmod(c_[0].get_num(), l))});
                auto [g, s] = detail::zp_half_extgcd(residues(), f->minpoly_mod(), l);
                if (detail::zp_deg(g) != 0)
                    fail(Err::DivisionByZero, "non-invertible element (reducible modulus?)");
                detail::ZPoly r = detail::zp_rem(s, f->minpoly_mod(), l);
                r.resize(f->degree(), mpz_class(0));
                std::vector<mpq_class> c(r.size());
                for (size_t i = 0; i < r.size(); ++i) c[i] = mpq_class(r[i]);
                return FieldElem(f, std::move(c));
            }
        }
        fail(Err::Internal, "unreachable field kind");
    }

    friend FieldElem operator/(const FieldElem& a, const FieldElem& b) { return a * b.inv(); }

    FieldElem pow(mpz_class e) const {
        if (e < 0) return inv().pow(-e);
        FieldElem base = *this;
        FieldElem r = one(field_);
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) r = r * base;
            base = base * base;
            e >>= 1;
        }
        return r;
    }

    friend bool operator==(const FieldElem& a, const FieldElem& b) {
        return a.field_->same(*b.field_) && a.c_ == b.c_;
    }
    friend bool operator!=(const FieldElem& a, const FieldElem& b) { return !(a == b); }

    /// Deterministic total order on elements of one field (coefficientwise),
    /// used to make root lists and segment reports reproducible.
    static int cmp(const FieldElem& a, const FieldElem& b) {
        for (size_t i = 0; i < a.c_.size(); ++i) {
            int c = mpq_cmp(a.c_[i].get_mpq_t(), b.c_[i].get_mpq_t());
            if (c != 0) return c;
        }
        return 0;
    }

    /// Canonical display form: "a/b" for prime-field values, "[c0,c1,...]"
    /// for extension elements.
    std::string str() const {
        if (field_->degree() == 1) return detail::q_str(c_[0]);
        std::string s = "[";
        for (size_t i = 0; i < c_.size(); ++i) {
            if (i) s += ",";
            s += detail::q_str(c_[i]);
        }
        s += "]";
        return s;
    }

    detail::ZPoly residues() const {
        detail::ZPoly p(c_.size());
        for (size_t i = 0; i < c_.size(); ++i) p[i] = c_[i].get_num();
        detail::zp_trim(p);
        return p;
    }

  private:
    FieldElem(FieldPtr f, std::vector<mpq_class> c) : field_(std::move(f)), c_(std::move(c)) {}

    void require_same_field(const FieldElem& o) const {
        if (!field_ || !o.field_ || !field_->same(*o.field_))
            fail(Err::MixedParameters, "elements of different fields");
    }

    FieldPtr field_;
    std::vector<mpq_class> c_;
};

/// l-adic valuation of a nonzero rational.
inline mpz_class valuation_q(const mpz_class& l, const mpq_class& x) {
    if (x == 0) fail(Err::ZeroParameter, "valuation of zero");
    mpz_class v = 0;
    mpz_class n = x.get_num();
    while (n % l == 0) {
        n /= l;
        ++v;
    }
    mpz_class d = x.get_den();
    while (d % l == 0) {
        d /= l;
        --v;
    }
    return v;
}

/// Valuation of a nonzero element of Q or of Q(theta) given v(theta).
/// The extension case uses the monomial rule: v(sum c_i theta^i) is the
/// minimum of v(c_i) + i*v(theta) when that minimum is attained exactly once;
/// a tie means the supplied data does not determine the valuation and raises
/// NoValuationData.
inline mpq_class valuation(const mpz_class& l, const FieldElem& x,
                           const std::optional<mpq_class>& theta_val = std::nullopt) {
    if (x.is_zero()) fail(Err::ZeroParameter, "valuation of zero");
    const FieldPtr& f = x.field();
    if (f->kind() == FieldKind::FiniteField)
        fail(Err::InvalidInput, "valuation is defined in characteristic zero");
    if (f->kind() == FieldKind::Rationals) return mpq_class(valuation_q(l, x.coeffs()[0]));
    if (!theta_val)
        fail(Err::NoValuationData, "extension element needs a generator valuation");
    std::optional<mpq_class> best;
    int count = 0;
    for (size_t i = 0; i < x.coeffs().size(); ++i) {
        if (x.coeffs()[i] == 0) continue;
        mpq_class v = mpq_class(valuation_q(l, x.coeffs()[i])) + mpq_class(i) * (*theta_val);
        if (!best || v < *best) {
            best = v;
            count = 1;
        } else if (v == *best) {
            ++count;
        }
    }
    if (count != 1)
        fail(Err::NoValuationData,
             "valuation not determined by the generator valuation (minimum attained twice)");
    return *best;
}

}  // namespace wdforge
