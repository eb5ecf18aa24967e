#include <catch2/catch_amalgamated.hpp>

#include "wdforge/fields.hpp"

using namespace wdforge;

TEST_CASE("rational arithmetic is canonical", "[fields]") {
    FieldPtr Q = Field::rationals();
    FieldElem a = FieldElem::from_rational(Q, mpq_class(2, 4));
    FieldElem b = FieldElem::from_rational(Q, mpq_class(1, 2));
    CHECK(a == b);
    CHECK((a + b) == FieldElem::one(Q));
    CHECK((a * b) == FieldElem::from_rational(Q, mpq_class(1, 4)));
    CHECK((a - b).is_zero());
    CHECK(a.inv() == FieldElem::from_integer(Q, 2));
    CHECK(a.str() == "1/2");
    CHECK(FieldElem::from_integer(Q, -3).str() == "-3");
    CHECK_THROWS_AS(FieldElem::zero(Q).inv(), WdError);
}

TEST_CASE("prime field residues", "[fields]") {
    FieldPtr F5 = Field::finite_field(5, 1);
    FieldElem two = FieldElem::from_integer(F5, 2);
    FieldElem four = FieldElem::from_integer(F5, 4);
    CHECK((two + four) == FieldElem::one(F5));
    CHECK((two * four) == FieldElem::from_integer(F5, 3));
    CHECK((-two) == FieldElem::from_integer(F5, 3));
    CHECK(FieldElem::from_integer(F5, 3).inv() == two);
    CHECK(FieldElem::from_integer(F5, 7) == two);
    // Rational embedding clears denominators prime to 5.
    CHECK(FieldElem::from_rational(F5, mpq_class(1, 2)) == FieldElem::from_integer(F5, 3));
    CHECK_THROWS_AS(FieldElem::from_rational(F5, mpq_class(1, 5)), WdError);
    CHECK(two.pow(mpz_class(-1)) == two.inv());
    CHECK(two.pow(mpz_class(4)) == FieldElem::one(F5));
}

TEST_CASE("quadratic extension of F_5", "[fields]") {
    // x^2 + 2 is irreducible: -2 = 3 is not among the squares {0,1,4} mod 5.
    FieldPtr F25 = Field::finite_field(5, 2, {mpz_class(2), mpz_class(0), mpz_class(1)});
    FieldElem t = FieldElem::generator(F25);
    CHECK(t * t == FieldElem::from_integer(F25, 3));
    FieldElem x = FieldElem::from_coeffs(F25, {mpq_class(1), mpq_class(2)});  // 1 + 2t
    CHECK(x * x.inv() == FieldElem::one(F25));
    // Frobenius: x^25 == x for every element.
    CHECK(x.pow(mpz_class(25)) == x);
    CHECK(t.pow(mpz_class(25)) == t);
    CHECK(x.str() == "[1,2]");
    // Reducible modulus is rejected: x^2 - 1 = (x-1)(x+1).
    CHECK_THROWS_AS(Field::finite_field(5, 2, {mpz_class(4), mpz_class(0), mpz_class(1)}),
                    WdError);
    CHECK_THROWS_AS(Field::finite_field(6, 1), WdError);
}

TEST_CASE("simple extension arithmetic", "[fields]") {
    FieldPtr K = Field::simple_extension({mpq_class(-2), mpq_class(0), mpq_class(1)});  // x^2-2
    FieldElem t = FieldElem::generator(K);
    CHECK(t * t == FieldElem::from_integer(K, 2));
    FieldElem a = FieldElem::from_coeffs(K, {mpq_class(1), mpq_class(1)});   // 1 + t
    FieldElem b = FieldElem::from_coeffs(K, {mpq_class(1), mpq_class(-1)});  // 1 - t
    CHECK(a * b == FieldElem::from_integer(K, -1));
    CHECK(t.inv() == FieldElem::from_coeffs(K, {mpq_class(0), mpq_class(1, 2)}));
    CHECK((a / a) == FieldElem::one(K));
}

TEST_CASE("extension constructors validate irreducibility", "[fields]") {
    // x^2 - 4 has the rational root 2.
    CHECK_THROWS_AS(Field::simple_extension({mpq_class(-4), mpq_class(0), mpq_class(1)}),
                    WdError);
    // x^3 - 2 passes the degree <= 3 root screen.
    CHECK_NOTHROW(Field::simple_extension({mpq_class(-2), mpq_class(0), mpq_class(0), mpq_class(1)}));
    // Degree 4 needs the trusted flag even with no rational root.
    detail::QPoly x4p1 = {mpq_class(1), mpq_class(0), mpq_class(0), mpq_class(0), mpq_class(1)};
    CHECK_THROWS_AS(Field::simple_extension(x4p1), WdError);
    CHECK_NOTHROW(Field::simple_extension(x4p1, true));
    // ... but a detectable rational root still wins over the flag.
    detail::QPoly withroot = {mpq_class(-1), mpq_class(0), mpq_class(0), mpq_class(0), mpq_class(1)};
    CHECK_THROWS_AS(Field::simple_extension(withroot, true), WdError);
    // Non-monic input is rejected.
    CHECK_THROWS_AS(Field::simple_extension({mpq_class(1), mpq_class(0), mpq_class(2)}), WdError);
}

TEST_CASE("structural field identity", "[fields]") {
    FieldPtr a = Field::finite_field(5, 2, {mpz_class(2), mpz_class(0), mpz_class(1)});
    FieldPtr b = Field::finite_field(5, 2, {mpz_class(2), mpz_class(0), mpz_class(1)});
    FieldPtr c = Field::finite_field(5, 2, {mpz_class(3), mpz_class(0), mpz_class(1)});  // x^2+3
    CHECK(a->same(*b));
    CHECK_FALSE(a->same(*c));
    CHECK_FALSE(a->same(*Field::rationals()));
    FieldElem x = FieldElem::generator(a);
    FieldElem y = FieldElem::generator(b);
    CHECK(x == y);
    CHECK_THROWS_AS(x + FieldElem::generator(c), WdError);
}

TEST_CASE("element ordering is a strict total order on samples", "[fields]") {
    FieldPtr F25 = Field::finite_field(5, 2, {mpz_class(2), mpz_class(0), mpz_class(1)});
    std::vector<FieldElem> es;
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b)
            es.push_back(FieldElem::from_coeffs(F25, {mpq_class(a), mpq_class(b)}));
    for (const auto& x : es)
        for (const auto& y : es) {
            int c = FieldElem::cmp(x, y);
            CHECK(c == -FieldElem::cmp(y, x));
            CHECK((c == 0) == (x == y));
        }
}

TEST_CASE("l-adic valuation on Q", "[fields]") {
    FieldPtr Q = Field::rationals();
    mpz_class five(5);
    CHECK(valuation(five, FieldElem::from_integer(Q, 50)) == mpq_class(2));
    CHECK(valuation(five, FieldElem::from_rational(Q, mpq_class(1, 5))) == mpq_class(-1));
    CHECK(valuation(five, FieldElem::from_integer(Q, 3)) == mpq_class(0));
    CHECK_THROWS_AS(valuation(five, FieldElem::zero(Q)), WdError);
}

TEST_CASE("valuation on a simple extension via the generator", "[fields]") {
    FieldPtr K = Field::simple_extension({mpq_class(-5), mpq_class(0), mpq_class(1)});  // x^2-5
    mpz_class five(5);
    FieldElem t = FieldElem::generator(K);
    mpq_class half(1, 2);
    CHECK(valuation(five, t, half) == half);
    CHECK(valuation(five, t * t * t, half) == mpq_class(3, 2));
    // 5 + theta: min(1, 1/2) is attained once.
    FieldElem x = FieldElem::from_coeffs(K, {mpq_class(5), mpq_class(1)});
    CHECK(valuation(five, x, half) == half);
    // Without generator data the query is rejected.
    CHECK_THROWS_AS(valuation(five, t), WdError);
    // A tie leaves the valuation undetermined: v(5) = 1 = v(1*theta) at v(theta)=1.
    CHECK_THROWS_AS(valuation(five, x, mpq_class(1)), WdError);
}
