#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wdforge/phin_module.hpp"
#include "wdforge/wd_functor.hpp"
#include "wdforge/weil_deligne.hpp"

namespace wdforge {

enum class LocalKind { UnramifiedPrincipalSeries, SteinbergTwist };

inline const char* local_kind_name(LocalKind k) {
    switch (k) {
        case LocalKind::UnramifiedPrincipalSeries: return "unramified-principal-series";
        case LocalKind::SteinbergTwist: return "steinberg-twist";
    }
    return "?";
}

/// The automorphic side of a comparison: an unramified principal series with
/// its two Satake parameters, or an unramified twist of Steinberg with the
/// character value at geometric Frobenius. Parameters are taken already
/// normalized (any half-integral twist is the caller's responsibility, since
/// square roots of q generally live outside an exact coefficient field).
struct LocalAutomorphicDatum {
    LocalKind kind = LocalKind::UnramifiedPrincipalSeries;
    mpz_class q;
    FieldPtr E;
    std::vector<FieldElem> params;  // PS: {alpha, beta}; Steinberg: {c}

    static LocalAutomorphicDatum unramified_ps(const FieldElem& alpha, const FieldElem& beta,
                                               const mpz_class& q);
    static LocalAutomorphicDatum steinberg(const FieldElem& c, const mpz_class& q);
};

namespace detail {

inline void require_parameter_field(const FieldPtr& E, const mpz_class& q) {
    if (!E || E->kind() == FieldKind::FiniteField)
        fail(Err::InvalidInput, "parameters must live in a characteristic-zero field");
    if (q < 2 || z_factor(q).size() != 1) fail(Err::InvalidInput, "q must be a prime power");
}

}  // namespace detail

inline LocalAutomorphicDatum LocalAutomorphicDatum::unramified_ps(const FieldElem& alpha,
                                                                  const FieldElem& beta,
                                                                  const mpz_class& q) {
    if (alpha.is_zero() || beta.is_zero()) fail(Err::ZeroParameter, "Satake parameters must be nonzero");
    if (!alpha.field()->same(*beta.field()))
        fail(Err::MixedParameters, "Satake parameters in different fields");
    detail::require_parameter_field(alpha.field(), q);
    return LocalAutomorphicDatum{LocalKind::UnramifiedPrincipalSeries, q, alpha.field(),
                                 {alpha, beta}};
}

inline LocalAutomorphicDatum LocalAutomorphicDatum::steinberg(const FieldElem& c,
                                                              const mpz_class& q) {
    if (c.is_zero()) fail(Err::ZeroParameter, "twisting character value must be nonzero");
    detail::require_parameter_field(c.field(), q);
    return LocalAutomorphicDatum{LocalKind::SteinbergTwist, q, c.field(), {c}};
}

/// Parameter of an unramified principal series: diag(alpha, beta), no
/// monodromy.
inline WDRep rec_unramified_ps(const FieldElem& alpha, const FieldElem& beta,
                               const mpz_class& q) {
    LocalAutomorphicDatum d = LocalAutomorphicDatum::unramified_ps(alpha, beta, q);
    Matrix f(d.E, 2, 2), n(d.E, 2, 2);
    f.at(0, 0) = alpha;
    f.at(1, 1) = beta;
    return WDRep::make(q, d.E, f, n);
}

/// Parameter of an unramified Steinberg twist: the two-dimensional special
/// parameter scaled by the character value.
inline WDRep rec_steinberg_twist(const FieldElem& c, const mpz_class& q) {
    LocalAutomorphicDatum d = LocalAutomorphicDatum::steinberg(c, q);
    return sp(2, c, q);
}

inline WDRep rec_of(const LocalAutomorphicDatum& d) {
    switch (d.kind) {
        case LocalKind::UnramifiedPrincipalSeries:
            return rec_unramified_ps(d.params[0], d.params[1], d.q);
        case LocalKind::SteinbergTwist:
            return rec_steinberg_twist(d.params[0], d.q);
    }
    fail(Err::UnsupportedLocalType, "unknown local type");
}

enum class CompatLevel { Ss, Fss, Monodromy };

inline const char* compat_level_name(CompatLevel level) {
    switch (level) {
        case CompatLevel::Ss: return "ss";
        case CompatLevel::Fss: return "fss";
        case CompatLevel::Monodromy: return "monodromy";
    }
    return "?";
}

struct CompatReport {
    bool ss_match = false;
    bool fss_match = false;
    bool monodromy_ok = false;
    CompatLevel level = CompatLevel::Fss;
    bool verdict = false;  // the boolean selected by `level`
    std::vector<Segment> galois_segments;
    std::vector<Segment> automorphic_segments;
    std::string reason;
};

/// Compares a Galois-side Weil-Deligne representation against an automorphic
/// datum at three strengths: semisimplified Frobenius eigenvalues only (ss),
/// the full Frobenius-semisimple class including monodromy (fss), and the
/// one-sided rank condition that Galois monodromy is no larger (monodromy).
inline CompatReport compat_check(const WDRep& galois, const LocalAutomorphicDatum& datum,
                                 CompatLevel level) {
    if (galois.q != datum.q) fail(Err::MixedParameters, "q differs between the two sides");
    WDRep automorphic = rec_of(datum);
    if (!galois.E->same(*automorphic.E))
        fail(Err::MixedParameters, "coefficient fields differ between the two sides");

    CompatReport rep;
    rep.level = level;
    rep.ss_match = is_isomorphic(semisimplify(galois), semisimplify(automorphic));
    rep.fss_match = is_isomorphic(galois, automorphic);
    rep.monodromy_ok = monodromy_dominates(galois, automorphic);
    rep.galois_segments = segments(frobenius_semisimplify(galois));
    rep.automorphic_segments = segments(frobenius_semisimplify(automorphic));

    hard_check(!rep.fss_match || rep.ss_match, "fss match without ss match");
    hard_check(!rep.fss_match || rep.monodromy_ok, "fss match without monodromy domination");

    if (rep.fss_match) {
        rep.reason = "compatible";
    } else if (!rep.ss_match) {
        rep.reason = "semisimplifications differ";
    } else if (datum.kind == LocalKind::SteinbergTwist && galois.n.is_zero()) {
        rep.reason = "crystalline vs special: contradiction locus of the main theorem";
    } else {
        rep.reason = "Frobenius-semisimple classes differ";
    }

    switch (level) {
        case CompatLevel::Ss: rep.verdict = rep.ss_match; break;
        case CompatLevel::Fss: rep.verdict = rep.fss_match; break;
        case CompatLevel::Monodromy: rep.verdict = rep.monodromy_ok; break;
    }
    return rep;
}

/// Same comparison with the Galois side supplied as a filtered module; the
/// module is converted through its Weil-Deligne representation at tau.
inline CompatReport compat_check(const PhiNModule& galois, int tau,
                                 const LocalAutomorphicDatum& datum, CompatLevel level) {
    return compat_check(wd_of(galois, tau), datum, level);
}

}  // namespace wdforge
