#include <catch2/catch_amalgamated.hpp>

#include "generators.hpp"
#include "wdforge/local_compat.hpp"

using namespace wdforge;

namespace {

FieldPtr Q() { return Field::rationals(); }
FieldElem qe(long v) { return FieldElem::from_integer(Q(), v); }

WDRep diag_rep(const mpz_class& q, long a, long b) {
    Matrix f(Q(), 2, 2), n(Q(), 2, 2);
    f.at(0, 0) = qe(a);
    f.at(1, 1) = qe(b);
    return WDRep::make(q, Q(), std::move(f), std::move(n));
}

}  // namespace

TEST_CASE("automorphic data validates its parameters", "[compat]") {
    CHECK_THROWS_AS(LocalAutomorphicDatum::unramified_ps(qe(0), qe(3), 5), WdError);
    CHECK_THROWS_AS(LocalAutomorphicDatum::unramified_ps(qe(2), qe(0), 5), WdError);
    CHECK_THROWS_AS(LocalAutomorphicDatum::steinberg(qe(0), 5), WdError);
    CHECK_THROWS_AS(LocalAutomorphicDatum::steinberg(qe(2), 6), WdError);  // q not a prime power
    CHECK_THROWS_AS(LocalAutomorphicDatum::steinberg(
                        FieldElem::one(Field::finite_field(5, 1)), 5),
                    WdError);  // parameters live in characteristic zero
    FieldPtr Qi = Field::simple_extension({mpq_class(1), mpq_class(0), mpq_class(1)});
    CHECK_THROWS_AS(LocalAutomorphicDatum::unramified_ps(qe(2), FieldElem::one(Qi), 5), WdError);

    LocalAutomorphicDatum ps = LocalAutomorphicDatum::unramified_ps(qe(2), qe(3), 5);
    CHECK(ps.kind == LocalKind::UnramifiedPrincipalSeries);
    CHECK(std::string(local_kind_name(ps.kind)) == "unramified-principal-series");
    LocalAutomorphicDatum st = LocalAutomorphicDatum::steinberg(qe(2), 5);
    CHECK(std::string(local_kind_name(st.kind)) == "steinberg-twist");
}

TEST_CASE("the parameter-building recipes", "[compat]") {
    WDRep ps = rec_of(LocalAutomorphicDatum::unramified_ps(qe(2), qe(3), 5));
    CHECK(ps.q == 5);
    CHECK(ps.frob.at(0, 0) == qe(2));
    CHECK(ps.frob.at(1, 1) == qe(3));
    CHECK(ps.frob.at(0, 1).is_zero());
    CHECK(ps.n.is_zero());

    WDRep st = rec_of(LocalAutomorphicDatum::steinberg(qe(10), 5));
    WDRep expect = sp(2, qe(10), 5);
    CHECK(st.frob == expect.frob);
    CHECK(st.n == expect.n);
}

TEST_CASE("crystalline against special: the contradiction pair", "[compat]") {
    // same Frobenius eigenvalues {alpha, alpha/q}, but no monodromy on the
    // Galois side: semisimplifications agree and nothing finer does
    WDRep galois = diag_rep(5, 10, 2);
    LocalAutomorphicDatum st = LocalAutomorphicDatum::steinberg(qe(10), 5);

    CompatReport ss = compat_check(galois, st, CompatLevel::Ss);
    CHECK(ss.ss_match);
    CHECK_FALSE(ss.fss_match);
    CHECK(ss.verdict);
    CHECK(ss.level == CompatLevel::Ss);
    CHECK(ss.reason == "crystalline vs special: contradiction locus of the main theorem");

    CompatReport fss = compat_check(galois, st, CompatLevel::Fss);
    CHECK_FALSE(fss.verdict);
    CHECK(fss.reason == "crystalline vs special: contradiction locus of the main theorem");
    // segments on both sides, computed on the semisimplified classes
    REQUIRE(fss.galois_segments.size() == 2);
    REQUIRE(fss.automorphic_segments.size() == 1);
    CHECK(fss.automorphic_segments[0].length == 2);
    CHECK(fss.automorphic_segments[0].top == qe(10));

    // the crystalline parameter is not generic
    CHECK_FALSE(is_generic_parameter(galois));

    // giving the Galois side the Steinberg monodromy flips the verdict
    WDRep special = sp(2, qe(10), 5);
    CompatReport fixed = compat_check(special, st, CompatLevel::Fss);
    CHECK(fixed.fss_match);
    CHECK(fixed.verdict);
    CHECK(fixed.reason == "compatible");
    CHECK(is_generic_parameter(special));
}

TEST_CASE("remaining reasons and the level switch", "[compat]") {
    // different eigenvalue multisets: nothing matches
    WDRep galois = diag_rep(5, 1, 7);
    LocalAutomorphicDatum ps = LocalAutomorphicDatum::unramified_ps(qe(2), qe(3), 5);
    CompatReport r = compat_check(galois, ps, CompatLevel::Fss);
    CHECK_FALSE(r.ss_match);
    CHECK_FALSE(r.fss_match);
    CHECK(r.reason == "semisimplifications differ");
    CHECK_FALSE(r.verdict);
    CHECK_FALSE(compat_check(galois, ps, CompatLevel::Ss).verdict);
    // the monodromy level only compares nilpotent ranks: 0 vs 0 passes
    CompatReport rm = compat_check(galois, ps, CompatLevel::Monodromy);
    CHECK(rm.monodromy_ok);
    CHECK(rm.verdict);

    // Steinberg Galois side against a principal-series datum with the same
    // eigenvalues: semisimple match, finer mismatch, and the Galois monodromy
    // exceeds the automorphic one
    WDRep special = sp(2, qe(10), 5);
    LocalAutomorphicDatum same_eigs = LocalAutomorphicDatum::unramified_ps(qe(10), qe(2), 5);
    CompatReport r2 = compat_check(special, same_eigs, CompatLevel::Fss);
    CHECK(r2.ss_match);
    CHECK_FALSE(r2.fss_match);
    CHECK(r2.reason == "Frobenius-semisimple classes differ");
    CHECK_FALSE(r2.monodromy_ok);
    CHECK_FALSE(compat_check(special, same_eigs, CompatLevel::Monodromy).verdict);

    // principal series compatible at every level
    WDRep good = diag_rep(5, 2, 3);
    CompatReport r3 = compat_check(good, ps, CompatLevel::Monodromy);
    CHECK(r3.ss_match);
    CHECK(r3.fss_match);
    CHECK(r3.monodromy_ok);
    CHECK(r3.verdict);
    CHECK(r3.reason == "compatible");
}

TEST_CASE("mismatched parameters are rejected, not compared", "[compat]") {
    WDRep galois = diag_rep(5, 2, 3);
    CHECK_THROWS_AS(
        compat_check(galois, LocalAutomorphicDatum::unramified_ps(qe(2), qe(3), 25),
                     CompatLevel::Ss),
        WdError);
    FieldPtr Qi = Field::simple_extension({mpq_class(1), mpq_class(0), mpq_class(1)});
    auto datum_qi = LocalAutomorphicDatum::unramified_ps(
        FieldElem::from_integer(Qi, 2), FieldElem::from_integer(Qi, 3), 5);
    CHECK_THROWS_AS(compat_check(galois, datum_qi, CompatLevel::Ss), WdError);
}

TEST_CASE("a filtered module enters the comparison through its parameter", "[compat]") {
    // Frobenius diag(5,1) with N e1 = e2 is exactly the special parameter
    // with top eigenvalue 5
    Matrix phi(Q(), 2, 2), n(Q(), 2, 2);
    phi.at(0, 0) = qe(5);
    phi.at(1, 1) = qe(1);
    n.at(1, 0) = qe(1);
    PhiNModule m = PhiNModule::make(5, 1, 2, Q(), {phi}, {n});
    CompatReport r =
        compat_check(m, 0, LocalAutomorphicDatum::steinberg(qe(5), 5), CompatLevel::Fss);
    CHECK(r.verdict);
    CHECK(r.reason == "compatible");
    CHECK_THROWS_AS(
        compat_check(m, 2, LocalAutomorphicDatum::steinberg(qe(5), 5), CompatLevel::Fss),
        WdError);
}

TEST_CASE("reports are internally consistent on random inputs", "[compat]") {
    testgen::Rng rng(987654321);
    const std::vector<std::string> vocabulary{
        "compatible", "semisimplifications differ",
        "crystalline vs special: contradiction locus of the main theorem",
        "Frobenius-semisimple classes differ"};
    for (int trial = 0; trial < 60; ++trial) {
        auto pair = testgen::rnd_wd_pair(rng, Q(), 5, 2);
        WDRep galois = WDRep::make(5, Q(), pair.frob, pair.n);
        LocalAutomorphicDatum datum =
            testgen::rnd_int(rng, 0, 1) == 0
                ? LocalAutomorphicDatum::unramified_ps(
                      qe(testgen::rnd_int(rng, 1, 6)),
                      qe(testgen::rnd_int(rng, 7, 12)), 5)
                : LocalAutomorphicDatum::steinberg(qe(testgen::rnd_int(rng, 1, 12)), 5);
        for (CompatLevel level : {CompatLevel::Ss, CompatLevel::Fss, CompatLevel::Monodromy}) {
            CompatReport r = compat_check(galois, datum, level);
            if (r.fss_match) {
                REQUIRE(r.ss_match);
                REQUIRE(r.monodromy_ok);
            }
            bool expected = level == CompatLevel::Ss    ? r.ss_match
                            : level == CompatLevel::Fss ? r.fss_match
                                                        : r.monodromy_ok;
            REQUIRE(r.verdict == expected);
            REQUIRE(std::find(vocabulary.begin(), vocabulary.end(), r.reason) !=
                    vocabulary.end());
        }
    }
}
