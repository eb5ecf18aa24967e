#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wdforge/errors.hpp"
#include "wdforge/fields.hpp"
#include "wdforge/linalg.hpp"
#include "wdforge/matrix.hpp"

namespace wdforge {

/// A free rank-d module over the unramified base of degree f with Frobenius
/// and monodromy, presented componentwise: the base splits the module into f
/// components indexed by tau, Frobenius maps component tau to tau+1 (mod f)
/// with matrix phi[tau], and N acts on component tau by n[tau].
struct PhiNModule {
    mpz_class l;              // residue characteristic, prime
    int f = 1;                // degree of the unramified base
    int d = 1;                // rank
    FieldPtr E;               // coefficient field, characteristic zero
    std::vector<Matrix> phi;  // phi[tau]: component tau -> component tau+1, invertible
    std::vector<Matrix> n;    // n[tau]: component tau -> itself, nilpotent

    static PhiNModule make(const mpz_class& l, int f, int d, FieldPtr E,
                           std::vector<Matrix> phi, std::vector<Matrix> n);
};

/// Full structural check; returns one message per violation (empty = valid).
inline std::vector<std::string> validate_phin(const mpz_class& l, int f, int d,
                                              const FieldPtr& E,
                                              const std::vector<Matrix>& phi,
                                              const std::vector<Matrix>& n) {
    std::vector<std::string> bad;
    if (!E) {
        bad.push_back("coefficient field is missing");
        return bad;
    }
    if (E->kind() == FieldKind::FiniteField)
        bad.push_back("coefficient field must have characteristic zero");
    if (!is_prime(l)) bad.push_back("l must be prime");
    if (f < 1) bad.push_back("f must be at least 1");
    if (d < 1) bad.push_back("rank must be at least 1");
    if (static_cast<int>(phi.size()) != f) bad.push_back("phi must have one matrix per tau");
    if (static_cast<int>(n.size()) != f) bad.push_back("n must have one matrix per tau");
    if (!bad.empty()) return bad;

    for (int i = 0; i < f; ++i) {
        const std::string where = " at tau=" + std::to_string(i);
        if (phi[i].rows() != d || phi[i].cols() != d)
            bad.push_back("phi is not " + std::to_string(d) + "x" + std::to_string(d) + where);
        else if (!phi[i].field()->same(*E))
            bad.push_back("phi entries live in a different field" + where);
        else if (phi[i].det().is_zero())
            bad.push_back("phi is singular" + where);
        if (n[i].rows() != d || n[i].cols() != d)
            bad.push_back("n is not " + std::to_string(d) + "x" + std::to_string(d) + where);
        else if (!n[i].field()->same(*E))
            bad.push_back("n entries live in a different field" + where);
        else if (!n[i].is_nilpotent())
            bad.push_back("n is not nilpotent" + where);
    }
    if (!bad.empty()) return bad;

    FieldElem le = FieldElem::from_rational(E, mpq_class(l));
    for (int i = 0; i < f; ++i) {
        // Nphi = l*phiN, componentwise: phi[i] shifts tau, so the N on the
        // left lives on component i+1.
        if (n[(i + 1) % f] * phi[i] != le * (phi[i] * n[i]))
            bad.push_back("commutation n[" + std::to_string((i + 1) % f) + "]*phi[" +
                          std::to_string(i) + "] = l*phi[" + std::to_string(i) + "]*n[" +
                          std::to_string(i) + "] fails");
    }
    return bad;
}

inline PhiNModule PhiNModule::make(const mpz_class& l, int f, int d, FieldPtr E,
                                   std::vector<Matrix> phi, std::vector<Matrix> n) {
    auto bad = validate_phin(l, f, d, E, phi, n);
    if (!bad.empty()) fail(Err::ValidationFailed, "invalid phi-N module", bad);
    return PhiNModule{l, f, d, std::move(E), std::move(phi), std::move(n)};
}

/// Matrix of the f-fold Frobenius composite on component tau:
/// phi[tau-1] ... phi[tau+1] * phi[tau], applying phi[tau] first.
inline Matrix cyclic_composite(const PhiNModule& m, int tau) {
    if (tau < 0 || tau >= m.f) fail(Err::IndexOutOfRange, "tau out of range");
    Matrix acc = Matrix::identity(m.E, m.d);
    for (int s = 0; s < m.f; ++s) acc = m.phi[(tau + s) % m.f] * acc;
    return acc;
}

/// One recorded step of a decreasing filtration: the columns of `basis` span
/// the subspace in degree `jump` (and in every degree down to the previous
/// recorded jump plus one).
struct FiltrationStep {
    long jump = 0;
    Matrix basis;
};

/// A PhiNModule with a decreasing exhaustive separated filtration on each
/// tau-component. Steps are recorded at the jumps only, with strictly
/// increasing jumps and strictly decreasing dimensions from d down to 0.
///
/// When E is an extension of the rationals, l-adic valuations on E are not
/// determined by the field data alone; `theta_valuation` optionally supplies
/// v_l of the generator so that weak admissibility can be decided.
struct FilteredPhiNModule {
    PhiNModule m;
    std::vector<std::vector<FiltrationStep>> filtration;  // indexed by tau
    std::optional<mpq_class> theta_valuation;

    static FilteredPhiNModule make(PhiNModule m,
                                   std::vector<std::vector<FiltrationStep>> filtration,
                                   std::optional<mpq_class> theta_valuation = std::nullopt);
};

inline std::vector<std::string> validate_filtration(
    const PhiNModule& m, const std::vector<std::vector<FiltrationStep>>& filtration) {
    std::vector<std::string> bad;
    if (static_cast<int>(filtration.size()) != m.f) {
        bad.push_back("filtration must have one step list per tau");
        return bad;
    }
    for (int tau = 0; tau < m.f; ++tau) {
        const auto& steps = filtration[tau];
        const std::string where = " at tau=" + std::to_string(tau);
        if (steps.empty()) {
            bad.push_back("filtration has no steps" + where);
            continue;
        }
        bool shapes_ok = true;
        for (const auto& st : steps) {
            if (st.basis.rows() != m.d || !st.basis.field()->same(*m.E)) {
                bad.push_back("filtration basis has wrong shape or field" + where);
                shapes_ok = false;
                break;
            }
            if (st.basis.rank() != st.basis.cols()) {
                bad.push_back("filtration basis columns are dependent" + where);
                shapes_ok = false;
                break;
            }
        }
        if (!shapes_ok) continue;
        if (steps.front().basis.cols() != m.d)
            bad.push_back("first filtration step must be the whole space" + where);
        if (steps.back().basis.cols() != 0)
            bad.push_back("last filtration step must be zero" + where);
        for (size_t t = 0; t + 1 < steps.size(); ++t) {
            if (steps[t].jump >= steps[t + 1].jump)
                bad.push_back("filtration jumps must strictly increase" + where);
            if (steps[t].basis.cols() <= steps[t + 1].basis.cols())
                bad.push_back("filtration dimensions must strictly decrease" + where);
            else if (!subspace_leq(steps[t + 1].basis, steps[t].basis))
                bad.push_back("filtration steps are not nested" + where);
        }
    }
    return bad;
}

inline FilteredPhiNModule FilteredPhiNModule::make(
    PhiNModule m, std::vector<std::vector<FiltrationStep>> filtration,
    std::optional<mpq_class> theta_valuation) {
    auto bad = validate_filtration(m, filtration);
    if (!bad.empty()) fail(Err::ValidationFailed, "invalid filtration", bad);
    return FilteredPhiNModule{std::move(m), std::move(filtration), std::move(theta_valuation)};
}

/// Hodge-Tate weights of the tau-component: the multiset of filtration jumps,
/// each with multiplicity the graded dimension there. Ascending.
inline std::vector<long> hodge_tate_weights(const FilteredPhiNModule& D, int tau) {
    if (tau < 0 || tau >= D.m.f) fail(Err::IndexOutOfRange, "tau out of range");
    const auto& steps = D.filtration[tau];
    std::vector<long> w;
    for (size_t t = 0; t + 1 < steps.size(); ++t) {
        int mult = steps[t].basis.cols() - steps[t + 1].basis.cols();
        for (int i = 0; i < mult; ++i) w.push_back(steps[t].jump);
    }
    return w;
}

/// Rank 2 with Hodge-Tate weights {0,1} on every component.
inline bool is_weight_zero_type(const FilteredPhiNModule& D) {
    if (D.m.d != 2) fail(Err::WrongRank, "weight type is defined for rank 2");
    for (int tau = 0; tau < D.m.f; ++tau) {
        auto w = hodge_tate_weights(D, tau);
        if (w != std::vector<long>{0, 1}) return false;
    }
    return true;
}

struct WeakAdmissibilityReport {
    mpq_class t_n;
    mpq_class t_h;
    bool verdict = false;
};

namespace detail {

/// Largest recorded jump whose step contains the given nonzero subspace.
inline long filtration_degree(const Matrix& sub, const std::vector<FiltrationStep>& steps) {
    for (size_t t = steps.size(); t-- > 0;) {
        if (steps[t].basis.cols() >= sub.cols() && subspace_leq(sub, steps[t].basis))
            return steps[t].jump;
    }
    fail(Err::Internal, "subspace escapes an exhaustive filtration");
}

/// All lines through the origin that generate a sub-object: stable under the
/// cyclic Frobenius composite and killed by N. Each is returned by its
/// tau=0 representative; transporting with phi yields the other components.
inline std::vector<Matrix> stable_lines(const PhiNModule& m,
                                        const std::vector<std::vector<FiltrationStep>>& filtration,
                                        const std::vector<Matrix>& transports) {
    Matrix f0 = m.phi[m.f - 1];
    for (int s = m.f - 2; s >= 0; --s) f0 = f0 * m.phi[s];
    EigenSplit es = eigen_split(f0);

    std::vector<Matrix> lines;
    bool scalar_composite = false;
    for (const auto& [lambda, space] : es.eigenspaces) {
        if (space.cols() == 1) {
            if ((m.n[0] * space).is_zero()) lines.push_back(space);
        } else {
            // Composite is scalar (d = 2 forces it), so every line is stable
            // and N = 0. The filtration degree of a line varies only when its
            // transport hits a one-dimensional step, so the candidates are
            // the pullbacks of those steps plus one line missing them all.
            scalar_composite = true;
            hard_check(m.n[0].is_zero(), "scalar composite forces N = 0");
            for (int tau = 0; tau < m.f; ++tau)
                for (const auto& st : filtration[tau])
                    if (st.basis.cols() == 1) {
                        Matrix pulled = transports[tau].inverse() * st.basis;
                        bool seen = false;
                        for (const auto& have : lines)
                            if (subspace_eq(have, pulled)) seen = true;
                        if (!seen) lines.push_back(pulled);
                    }
        }
    }
    if (scalar_composite) {
        // A line distinct from every special candidate; E is infinite so a
        // small probe list always contains one.
        for (int probe = 0; static_cast<size_t>(probe) <= lines.size() + 1; ++probe) {
            Matrix cand(m.E, m.d, 1);
            if (probe == 0) {
                cand.at(1, 0) = FieldElem::one(m.E);
            } else {
                cand.at(0, 0) = FieldElem::one(m.E);
                cand.at(1, 0) = FieldElem::from_integer(m.E, probe - 1);
            }
            bool seen = false;
            for (const auto& have : lines)
                if (subspace_eq(have, cand)) seen = true;
            if (!seen) {
                lines.push_back(cand);
                break;
            }
        }
    }
    return lines;
}

}  // namespace detail

/// Weak admissibility for rank at most 2: the Newton number t_N (valuation of
/// the composite-Frobenius determinant, per base degree) must equal the Hodge
/// number t_H (sum of all filtration jumps with multiplicity, per base
/// degree), and every stable line must satisfy the reverse inequality
/// t_H <= t_N. Valuations on extension fields need `theta_valuation`.
inline WeakAdmissibilityReport is_weakly_admissible(const FilteredPhiNModule& D) {
    const PhiNModule& m = D.m;
    if (m.d > 2) fail(Err::UnsupportedRank, "weak admissibility is implemented for rank <= 2");

    WeakAdmissibilityReport rep;
    Matrix f0 = cyclic_composite(m, 0);
    rep.t_n = valuation(m.l, f0.det(), D.theta_valuation) / m.f;
    mpq_class jump_sum = 0;
    for (int tau = 0; tau < m.f; ++tau)
        for (long w : hodge_tate_weights(D, tau)) jump_sum += w;
    rep.t_h = jump_sum / m.f;
    rep.verdict = (rep.t_n == rep.t_h);
    if (!rep.verdict || m.d == 1) return rep;

    std::vector<Matrix> transports(m.f, Matrix::identity(m.E, m.d));
    for (int tau = 1; tau < m.f; ++tau) transports[tau] = m.phi[tau - 1] * transports[tau - 1];

    for (const Matrix& line : detail::stable_lines(m, D.filtration, transports)) {
        Matrix image = f0 * line;
        int pivot = 0;
        while (line.at(pivot, 0).is_zero()) ++pivot;
        FieldElem lambda = image.at(pivot, 0) / line.at(pivot, 0);
        hard_check(image == lambda * line, "stable line is not an eigenline");
        mpq_class sub_tn = valuation(m.l, lambda, D.theta_valuation) / m.f;
        mpq_class sub_th = 0;
        for (int tau = 0; tau < m.f; ++tau)
            sub_th += detail::filtration_degree(transports[tau] * line, D.filtration[tau]);
        sub_th /= m.f;
        if (sub_th > sub_tn) {
            rep.verdict = false;
            return rep;
        }
    }
    return rep;
}

struct MonodromyModuleReport {
    bool n_nonzero = false;
    bool has_j0 = false;
    long j0 = 0;                       // meaningful only when has_j0
    bool fil_differs_from_n_image = false;
    bool verdict = false;
};

/// Rank-2 modules over the degree-1 base that carry an L-invariant: N is
/// nonzero, some filtration step is a line Fil^{j0}, and that line differs
/// from the image of N.
inline MonodromyModuleReport is_monodromy_module(const FilteredPhiNModule& D) {
    if (D.m.f != 1) fail(Err::UnsupportedBase, "monodromy modules are defined over the degree-1 base");
    if (D.m.d != 2) fail(Err::WrongRank, "monodromy modules have rank 2");

    MonodromyModuleReport rep;
    rep.n_nonzero = !D.m.n[0].is_zero();
    const Matrix* line = nullptr;
    for (const auto& st : D.filtration[0])
        if (st.basis.cols() == 1) {
            rep.has_j0 = true;
            rep.j0 = st.jump;
            line = &st.basis;
        }
    if (rep.has_j0) {
        Matrix n_image = column_space_basis(D.m.n[0]);
        rep.fil_differs_from_n_image = !(n_image.cols() == 1 && subspace_eq(n_image, *line));
    }
    rep.verdict = rep.n_nonzero && rep.has_j0 && rep.fil_differs_from_n_image;
    return rep;
}

struct LInvariantResult {
    FieldElem value;
    FieldElem alpha;  // the Frobenius eigenvalue off the kernel of N: alpha = l * beta
    long j0 = 0;
};

namespace detail {

/// Eigenvalue of a matrix on a known stable line.
inline FieldElem eigenvalue_on_line(const Matrix& m, const Matrix& line) {
    Matrix image = m * line;
    int pivot = 0;
    while (line.at(pivot, 0).is_zero()) ++pivot;
    FieldElem lambda = image.at(pivot, 0) / line.at(pivot, 0);
    hard_check(image == lambda * line, "line is not an eigenline");
    return lambda;
}

inline FieldElem l_invariant_from(const Matrix& x, const Matrix& nx, const Matrix& v) {
    Matrix coords = Matrix::hconcat(x, nx);
    auto ab = coords.solve(v);
    hard_check(ab.has_value(), "filtration line escapes the eigenvector frame");
    FieldElem a = ab->at(0, 0), b = ab->at(1, 0);
    hard_check(!a.is_zero(), "filtration line coincides with the image of N");
    return FieldElem::zero(x.field()) - b / a;
}

}  // namespace detail

/// The invariant L with x - L*Nx spanning Fil^{j0}, for x the Frobenius
/// eigenvector off ker N. The kernel of N is Frobenius-stable with some
/// eigenvalue beta, and the structure forces the second eigenvalue to be
/// alpha = l*beta; both facts are checked, not assumed.
inline LInvariantResult l_invariant(const FilteredPhiNModule& D) {
    MonodromyModuleReport mono = is_monodromy_module(D);
    if (!mono.verdict) fail(Err::NotMonodromyModule, "input is not a monodromy module");

    const Matrix& phi = D.m.phi[0];
    const Matrix& n = D.m.n[0];
    Matrix ker = n.kernel_basis();
    hard_check(ker.cols() == 1, "nonzero nilpotent on rank 2 must have a line kernel");
    FieldElem beta = detail::eigenvalue_on_line(phi, ker);
    FieldElem alpha = FieldElem::from_rational(D.m.E, mpq_class(D.m.l)) * beta;

    Matrix shifted = phi - Matrix::scalar(D.m.E, 2, alpha);
    Matrix x = shifted.kernel_basis();
    if (x.cols() != 1)
        fail(Err::NonSplitCharPoly, "Frobenius has no eigenvector at alpha = l*beta");
    Matrix nx = n * x;
    hard_check(!nx.is_zero(), "eigenvector at alpha must miss ker N");

    const Matrix* fil_line = nullptr;
    for (const auto& st : D.filtration[0])
        if (st.basis.cols() == 1) fil_line = &st.basis;

    FieldElem value = detail::l_invariant_from(x, nx, fil_line->col(0));
    // The result must not depend on the eigenvector normalization.
    FieldElem c = FieldElem::from_integer(D.m.E, 7);
    FieldElem value2 = detail::l_invariant_from(c * x, c * nx, fil_line->col(0));
    hard_check(value == value2, "L-invariant depends on eigenvector scaling");

    return LInvariantResult{value, alpha, mono.j0};
}

}  // namespace wdforge
