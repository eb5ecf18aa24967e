#pragma once

#include <tuple>
#include <vector>

#include "wdforge/phin_module.hpp"
#include "wdforge/weil_deligne.hpp"

namespace wdforge {

/// The Weil-Deligne representation carried by the tau-component: geometric
/// Frobenius of the base acts through the f-fold composite of phi (the
/// smallest Frobenius power fixing each component), N is the monodromy of the
/// chosen component, and q = l^f. The commutation N*F = q*F*N follows by
/// composing the f componentwise relations; it is re-validated, not assumed.
inline WDRep wd_of(const PhiNModule& D, int tau = 0) {
    if (tau < 0 || tau >= D.f) fail(Err::IndexOutOfRange, "tau out of range");
    mpz_class q;
    mpz_pow_ui(q.get_mpz_t(), D.l.get_mpz_t(), static_cast<unsigned long>(D.f));
    return WDRep::make(q, D.E, cyclic_composite(D, tau), D.n[tau]);
}

struct TauIndependenceReport {
    bool verdict = true;
    std::vector<std::tuple<int, int, bool>> pairs;  // (i, j, isomorphic), i < j, lex order
};

/// The isomorphism class of wd_of(D, tau) should not depend on tau; this
/// checks all pairs and reports each comparison.
inline TauIndependenceReport tau_independence_check(const PhiNModule& D) {
    std::vector<WDRep> reps;
    reps.reserve(D.f);
    for (int tau = 0; tau < D.f; ++tau) reps.push_back(wd_of(D, tau));

    TauIndependenceReport rep;
    for (int i = 0; i < D.f; ++i)
        for (int j = i + 1; j < D.f; ++j) {
            bool iso = is_isomorphic(reps[i], reps[j]);
            rep.pairs.emplace_back(i, j, iso);
            if (!iso) rep.verdict = false;
        }
    return rep;
}

}  // namespace wdforge
