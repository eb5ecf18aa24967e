#include <catch2/catch_amalgamated.hpp>

#include "generators.hpp"
#include "wdforge/wd_functor.hpp"

using namespace wdforge;

namespace {

FieldPtr Q() { return Field::rationals(); }
FieldElem qe(long v) { return FieldElem::from_integer(Q(), v); }

}  // namespace

TEST_CASE("degree-1 base: the functor forgets nothing", "[functor]") {
    Matrix phi(Q(), 2, 2), n(Q(), 2, 2);
    phi.at(0, 0) = qe(5);
    phi.at(1, 1) = qe(1);
    n.at(1, 0) = qe(1);
    PhiNModule m = PhiNModule::make(5, 1, 2, Q(), {phi}, {n});
    WDRep w = wd_of(m);
    CHECK(w.q == 5);
    CHECK(w.frob == phi);
    CHECK(w.n == n);
    CHECK_THROWS_AS(wd_of(m, 1), WdError);
    CHECK_THROWS_AS(wd_of(m, -1), WdError);
}

TEST_CASE("composite order: the factor at the base point applies first", "[functor]") {
    // noncommuting factors pin the order: at tau = 0 the composite is
    // phi[1] * phi[0] (phi[0] applied first), at tau = 1 it is phi[0] * phi[1]
    Matrix a(Q(), 2, 2), b(Q(), 2, 2);
    a.at(0, 0) = qe(1);
    a.at(0, 1) = qe(1);
    a.at(1, 1) = qe(1);
    b.at(0, 0) = qe(2);
    b.at(1, 1) = qe(3);
    Matrix z(Q(), 2, 2);
    PhiNModule m = PhiNModule::make(5, 2, 2, Q(), {a, b}, {z, z});
    CHECK(cyclic_composite(m, 0) == b * a);
    CHECK(cyclic_composite(m, 1) == a * b);
    CHECK(wd_of(m, 0).frob == b * a);
    CHECK(wd_of(m, 1).frob == a * b);
    CHECK(wd_of(m, 0).q == 25);

    // scalars in rank 1: both composites multiply out to the same number
    Matrix sa(Q(), 1, 1), sb(Q(), 1, 1), sz(Q(), 1, 1);
    sa.at(0, 0) = qe(2);
    sb.at(0, 0) = qe(3);
    PhiNModule s = PhiNModule::make(5, 2, 1, Q(), {sa, sb}, {sz, sz});
    CHECK(wd_of(s, 0).frob.at(0, 0) == qe(6));
    CHECK(wd_of(s, 1).frob.at(0, 0) == qe(6));
    CHECK(tau_independence_check(s).verdict);
}

TEST_CASE("a vanishing monodromy operator propagates around the cycle", "[functor]") {
    // phi = [diag(25,5), I] admits n[0] = 0 only together with n[1] = 0
    Matrix p0(Q(), 2, 2), z(Q(), 2, 2);
    p0.at(0, 0) = qe(25);
    p0.at(1, 1) = qe(5);
    PhiNModule m = PhiNModule::make(5, 2, 2, Q(), {p0, Matrix::identity(Q(), 2)}, {z, z});
    CHECK(tau_independence_check(m).verdict);

    // nonzero n[1] against n[0] = 0 violates the commutation and is rejected
    Matrix n1(Q(), 2, 2);
    n1.at(1, 0) = qe(1);
    CHECK_THROWS_AS(PhiNModule::make(5, 2, 2, Q(), {p0, Matrix::identity(Q(), 2)}, {z, n1}),
                    WdError);
}

TEST_CASE("base-point change acts by conjugation with the Frobenius factor", "[functor]") {
    testgen::Rng rng(31337);
    for (int trial = 0; trial < 30; ++trial) {
        int f = static_cast<int>(testgen::rnd_int(rng, 2, 3));
        int d = static_cast<int>(testgen::rnd_int(rng, 1, 4));
        PhiNModule m = testgen::rnd_phin(rng, 5, f, d);
        for (int tau = 0; tau < f; ++tau) {
            WDRep here = wd_of(m, tau);
            WDRep next = wd_of(m, (tau + 1) % f);
            Matrix t = m.phi[tau];
            Matrix ti = t.inverse();
            REQUIRE(next.frob == t * here.frob * ti);
            // n transports with an extra factor of l, matching the module's
            // commutation rule n[tau+1] * phi[tau] = l * phi[tau] * n[tau].
            REQUIRE(next.n == FieldElem::from_rational(Q(), mpq_class(5)) * (t * here.n * ti));
        }
    }
}

TEST_CASE("the representation class is independent of the base point", "[functor]") {
    testgen::Rng rng(60);
    for (int trial = 0; trial < 40; ++trial) {
        int f = static_cast<int>(testgen::rnd_int(rng, 1, 3));
        int d = static_cast<int>(testgen::rnd_int(rng, 1, 4));
        PhiNModule m = testgen::rnd_phin(rng, 5, f, d);
        TauIndependenceReport rep = tau_independence_check(m);
        REQUIRE(rep.verdict);
        REQUIRE(rep.pairs.size() == static_cast<size_t>(f * (f - 1) / 2));
        for (const auto& [i, j, ok] : rep.pairs) {
            CHECK(i < j);
            CHECK(ok);
        }
    }
}

TEST_CASE("functor output classifies by the blocks the module was built from", "[functor]") {
    testgen::Rng rng(8080);
    for (int trial = 0; trial < 25; ++trial) {
        int f = static_cast<int>(testgen::rnd_int(rng, 1, 3));
        int d = static_cast<int>(testgen::rnd_int(rng, 2, 4));
        PhiNModule m = testgen::rnd_phin(rng, 5, f, d);
        // q of the output is l^f
        WDRep w = wd_of(m, 0);
        mpz_class expect_q;
        mpz_pow_ui(expect_q.get_mpz_t(), mpz_class(5).get_mpz_t(), static_cast<unsigned long>(f));
        REQUIRE(w.q == expect_q);
        // the composite pair is exactly the seed pair up to conjugation, so
        // every base point yields the same segment multiset
        auto base = wdforge::detail::segment_multiset(segments(frobenius_semisimplify(w)));
        for (int tau = 1; tau < f; ++tau) {
            auto other = wdforge::detail::segment_multiset(
                segments(frobenius_semisimplify(wd_of(m, tau))));
            REQUIRE(other == base);
        }
    }
}
