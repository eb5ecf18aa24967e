#include <catch2/catch_amalgamated.hpp>

#include "generators.hpp"
#include "wdforge/json_io.hpp"

using namespace wdforge;

namespace {

FieldPtr Q() { return Field::rationals(); }
FieldElem qe(long v) { return FieldElem::from_integer(Q(), v); }

template <typename F>
Err thrown_code(F&& fn) {
    try {
        fn();
    } catch (const WdError& e) {
        return e.code();
    }
    FAIL("expected a WdError");
    return Err::Internal;
}

}  // namespace

TEST_CASE("field serialization round-trips", "[json]") {
    for (const FieldPtr& E :
         {Field::rationals(), Field::simple_extension({mpq_class(1), mpq_class(0), mpq_class(1)}),
          Field::finite_field(5, 1), Field::finite_field(5, 2), Field::finite_field(11, 3)}) {
        FieldPtr back = field_from_json(field_to_json(E));
        REQUIRE(back->same(*E));
    }
    CHECK(thrown_code([] { field_from_json(Json{{"kind", "padic"}}); }) == Err::InvalidInput);
    CHECK(thrown_code([] { field_from_json(Json::array()); }) == Err::InvalidInput);
    CHECK(thrown_code([] { field_from_json(Json{{"kind", "extension"}}); }) == Err::InvalidInput);
    CHECK(thrown_code([] { field_from_json(Json{{"kind", "finite"}}); }) == Err::InvalidInput);
}

TEST_CASE("scalars travel as canonical fraction strings", "[json]") {
    CHECK(parse_rational(Json("2/4"), "x") == mpq_class(1, 2));
    CHECK(parse_rational(Json(-7), "x") == mpq_class(-7));
    CHECK(parse_rational(Json("-3/9"), "x") == mpq_class(-1, 3));
    CHECK(thrown_code([] { parse_rational(Json("a/b"), "x"); }) == Err::InvalidInput);
    CHECK(thrown_code([] { parse_rational(Json(2.5), "x"); }) == Err::InvalidInput);
    CHECK(thrown_code([] { parse_rational(Json::object(), "x"); }) == Err::InvalidInput);
    CHECK(thrown_code([] { parse_integer(Json("1/2"), "x"); }) == Err::InvalidInput);
    CHECK(parse_integer(Json("6/3"), "x") == 2);

    // emission canonicalizes
    CHECK(elem_to_json(FieldElem::from_rational(Q(), mpq_class(2, 4))) == Json("1/2"));
    CHECK(elem_to_json(qe(-7)) == Json("-7"));

    // extension elements are coefficient arrays, low degree first
    FieldPtr Qi = Field::simple_extension({mpq_class(1), mpq_class(0), mpq_class(1)});
    FieldElem z = FieldElem::from_coeffs(Qi, {mpq_class(1, 2), mpq_class(-3)});
    Json j = elem_to_json(z);
    REQUIRE(j.is_array());
    CHECK(j == Json::array({"1/2", "-3"}));
    CHECK(elem_from_json(Qi, j) == z);
    CHECK(elem_from_json(Qi, Json(4)) == FieldElem::from_integer(Qi, 4));
}

TEST_CASE("matrices are rows, bases are spanning vectors", "[json]") {
    Matrix m(Q(), 2, 3);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) m.at(i, j) = qe(10 * i + j);
    Json jm = matrix_to_json(m);
    REQUIRE(jm.size() == 2);      // two rows
    REQUIRE(jm[0].size() == 3);   // of three entries
    CHECK(matrix_from_json(Q(), jm, "m") == m);
    CHECK(thrown_code([&] { matrix_from_json(Q(), Json::array(), "m"); }) == Err::InvalidInput);
    CHECK(thrown_code([&] {
              matrix_from_json(Q(), Json::parse(R"([["1","2"],["3"]])"), "m");
          }) == Err::InvalidInput);

    // a basis is the list of its columns
    Matrix basis(Q(), 3, 1);
    basis.at(0, 0) = qe(1);
    basis.at(2, 0) = qe(-3);
    Json jb = basis_to_json(basis);
    REQUIRE(jb.size() == 1);     // one vector
    REQUIRE(jb[0].size() == 3);  // of length three
    CHECK(basis_from_json(Q(), jb, 3, "b") == basis);
    CHECK(basis_from_json(Q(), Json::array(), 3, "b").cols() == 0);
    CHECK(thrown_code([&] { basis_from_json(Q(), jb, 2, "b"); }) == Err::InvalidInput);
}

TEST_CASE("module serialization round-trips with schema metadata", "[json]") {
    testgen::Rng rng(55);
    auto gen = testgen::rnd_monodromy_module(rng, 5);
    Json j = phin_to_json(gen.module);
    CHECK(j["wdforge_schema"] == 1);
    CHECK(j["type"] == "phin-module");
    CHECK(j["l"] == "5");
    FilteredPhiNModule back = phin_from_json(j);
    CHECK(back.m.phi[0] == gen.module.m.phi[0]);
    CHECK(back.m.n[0] == gen.module.m.n[0]);
    REQUIRE(back.filtration[0].size() == gen.module.filtration[0].size());
    for (size_t i = 0; i < back.filtration[0].size(); ++i) {
        CHECK(back.filtration[0][i].jump == gen.module.filtration[0][i].jump);
        CHECK(back.filtration[0][i].basis == gen.module.filtration[0][i].basis);
    }
    CHECK(l_invariant(back).value == l_invariant(gen.module).value);

    // emission is deterministic, keys sorted
    CHECK(phin_to_json(back).dump() == j.dump());

    // valuation plumbing
    CHECK_FALSE(j.contains("valuation"));
    FieldPtr E = Field::simple_extension({mpq_class(-5), mpq_class(0), mpq_class(1)});
    FieldElem s = FieldElem::generator(E);
    PhiNModule em = PhiNModule::make(5, 1, 1, E, {s * Matrix::identity(E, 1)},
                                     {Matrix(E, 1, 1)});
    Matrix full(E, 1, 1);
    full.at(0, 0) = FieldElem::one(E);
    FilteredPhiNModule ed = FilteredPhiNModule::make(
        std::move(em), {{{0, full}, {1, Matrix(E, 1, 0)}}}, mpq_class(1, 2));
    Json ej = phin_to_json(ed);
    REQUIRE(ej.contains("valuation"));
    CHECK(ej["valuation"]["theta"] == "1/2");
    FilteredPhiNModule eback = phin_from_json(ej);
    REQUIRE(eback.theta_valuation.has_value());
    CHECK(*eback.theta_valuation == mpq_class(1, 2));

    // a module with a broken invariant is rejected at parse time
    Json bad = j;
    bad["l"] = "4";
    CHECK(thrown_code([&] { phin_from_json(bad); }) == Err::ValidationFailed);
    Json missing = j;
    missing.erase("phi");
    CHECK(thrown_code([&] { phin_from_json(missing); }) == Err::InvalidInput);
}

TEST_CASE("representation serialization round-trips", "[json]") {
    testgen::Rng rng(66);
    auto pair = testgen::rnd_wd_pair(rng, Q(), 25, 3);
    WDRep w = WDRep::make(25, Q(), pair.frob, pair.n);
    Json j = wd_to_json(w);
    CHECK(j["wdforge_schema"] == 1);
    CHECK(j["type"] == "weil-deligne");
    CHECK(j["q"] == "25");
    WDRep back = wd_from_json(j);
    CHECK(back.frob == w.frob);
    CHECK(back.n == w.n);
    CHECK(back.q == w.q);
    CHECK(wd_to_json(back).dump() == j.dump());

    Json bad = j;
    bad["q"] = "6";
    CHECK(thrown_code([&] { wd_from_json(bad); }) == Err::ValidationFailed);
    Json segs = segments_to_json(segments(frobenius_semisimplify(w)));
    REQUIRE(segs.is_array());
    REQUIRE(!segs.empty());
    CHECK(segs[0].contains("top"));
    CHECK(segs[0].contains("length"));
    CHECK(segs[0].contains("multiplicity"));
}

TEST_CASE("diagnostics inputs parse from their documented shapes", "[json]") {
    Json jg = Json::parse(R"({
        "l": 5, "k": 1,
        "generators": [[["2","0"],["0","1"]], [["4","1"],["4","0"]]]
    })");
    MatGroup g = group_from_json(jg);
    CHECK(g.l == 5);
    CHECK(g.k == 1);
    CHECK(g.cap == 200000);
    CHECK(close_group(g).size() == 480);
    CHECK(thrown_code([&] {
              Json j2 = jg;
              j2["generators"] = Json::array();
              group_from_json(j2);
          }) == Err::ValidationFailed);

    Json jd = Json::parse(R"({
        "p": 7, "l": 11, "splits_completely": true,
        "places": [{"alpha": "2", "beta": "3"}]
    })");
    DecomposedGenericInput in = decgen_from_json(jd);
    CHECK(in.p == 7);
    CHECK(in.l == 11);
    CHECK(in.splits_completely);
    REQUIRE(in.places.size() == 1);
    DecomposedGenericReport rep =
        is_decomposed_generic_at(in.p, in.l, in.places, in.splits_completely);
    CHECK(rep.reason == "ratio = p^-1");

    Json js = Json::parse(R"({
        "l": 5,
        "elements": [{"h": [["2","0"],["0","2"]], "c": "3"}]
    })");
    auto elements = scalarcert_from_json(js);
    REQUIRE(elements.size() == 1);
    CHECK(exists_scalar_outside_cyclotomic(elements));

    Json ja = Json::parse(R"({
        "kind": "unramified-principal-series",
        "q": "5", "E": {"kind": "rationals"}, "alpha": "2", "beta": "3"
    })");
    LocalAutomorphicDatum ps = automorphic_from_json(ja);
    CHECK(ps.kind == LocalKind::UnramifiedPrincipalSeries);
    Json jst = Json::parse(R"({
        "kind": "steinberg-twist",
        "q": "5", "E": {"kind": "rationals"}, "c": "10"
    })");
    CHECK(automorphic_from_json(jst).kind == LocalKind::SteinbergTwist);
    Json jun = jst;
    jun["kind"] = "supercuspidal";
    CHECK(thrown_code([&] { automorphic_from_json(jun); }) == Err::UnsupportedLocalType);
}

TEST_CASE("report serializers carry the schema version", "[json]") {
    EnormousReport er = is_enormous(MatGroup::make(
        5, 1,
        {[] {
            Matrix m(Field::finite_field(5, 1), 2, 2);
            m.at(0, 0) = FieldElem::from_integer(Field::finite_field(5, 1), 1);
            m.at(0, 1) = FieldElem::from_integer(Field::finite_field(5, 1), 1);
            m.at(1, 1) = FieldElem::from_integer(Field::finite_field(5, 1), 1);
            return m;
        }()}));
    Json je = enormous_to_json(er);
    CHECK(je["wdforge_schema"] == 1);
    CHECK(je["type"] == "enormous-report");
    CHECK(je["verdict"] == false);
    CHECK(je["l_quotient_order"] == "5");
    CHECK(je["group_order"] == 5);
    REQUIRE(je.contains("fixed_vectors"));  // nonzero fixed space is reported

    WDRep galois = rec_of(LocalAutomorphicDatum::unramified_ps(qe(10), qe(2), 5));
    CompatReport cr =
        compat_check(galois, LocalAutomorphicDatum::steinberg(qe(10), 5), CompatLevel::Fss);
    Json jc = compat_to_json(cr);
    CHECK(jc["wdforge_schema"] == 1);
    CHECK(jc["level"] == "fss");
    CHECK(jc["verdict"] == false);
    CHECK(jc["ss_match"] == true);
    CHECK(jc["reason"] == "crystalline vs special: contradiction locus of the main theorem");
    REQUIRE(jc["galois_segments"].is_array());
    CHECK(jc["galois_segments"].size() == 2);
    CHECK(jc["automorphic_segments"].size() == 1);
}
