#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "wdforge/errors.hpp"
#include "wdforge/fields.hpp"
#include "wdforge/group_diagnostics.hpp"
#include "wdforge/local_compat.hpp"
#include "wdforge/matrix.hpp"
#include "wdforge/phin_module.hpp"
#include "wdforge/wd_functor.hpp"
#include "wdforge/weil_deligne.hpp"

namespace wdforge {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Scalars. Exact values travel as strings ("2", "-1/3"); plain JSON integers
// are accepted on input for convenience.

inline mpq_class parse_rational(const Json& j, const std::string& what) {
    try {
        if (j.is_number_integer()) return mpq_class(j.get<long>());
        if (j.is_string()) {
            mpq_class q(j.get<std::string>());
            return detail::q_canon(q);
        }
    } catch (const std::exception&) {
        // fall through to the error below
    }
    fail(Err::InvalidInput, what + " must be an integer or a rational string");
}

inline mpz_class parse_integer(const Json& j, const std::string& what) {
    mpq_class q = parse_rational(j, what);
    if (q.get_den() != 1) fail(Err::InvalidInput, what + " must be an integer");
    return q.get_num();
}

inline std::string rational_str(const mpq_class& q) { return detail::q_str(q); }

// ---------------------------------------------------------------------------
// Fields.

inline Json field_to_json(const FieldPtr& E) {
    Json j;
    switch (E->kind()) {
        case FieldKind::Rationals:
            j["kind"] = "rationals";
            break;
        case FieldKind::SimpleExtension: {
            j["kind"] = "extension";
            Json coeffs = Json::array();
            for (const auto& c : E->minpoly()) coeffs.push_back(rational_str(c));
            j["minpoly"] = std::move(coeffs);
            break;
        }
        case FieldKind::FiniteField: {
            j["kind"] = "finite";
            j["l"] = E->characteristic().get_str();
            j["k"] = E->degree();
            if (E->degree() > 1) {
                Json coeffs = Json::array();
                for (const auto& c : E->minpoly_mod()) coeffs.push_back(c.get_str());
                j["minpoly"] = std::move(coeffs);
            }
            break;
        }
    }
    return j;
}

inline FieldPtr field_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        fail(Err::InvalidInput, "field must be an object with a \"kind\"");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "rationals") return Field::rationals();
    if (kind == "extension") {
        if (!j.contains("minpoly") || !j["minpoly"].is_array())
            fail(Err::InvalidInput, "extension field needs a \"minpoly\" array");
        detail::QPoly m;
        for (const auto& c : j["minpoly"]) m.push_back(parse_rational(c, "minpoly coefficient"));
        bool trusted = j.value("trusted", false);
        return Field::simple_extension(m, trusted);
    }
    if (kind == "finite") {
        if (!j.contains("l")) fail(Err::InvalidInput, "finite field needs \"l\"");
        mpz_class l = parse_integer(j["l"], "l");
        int k = j.value("k", 1);
        if (j.contains("minpoly")) {
            detail::ZPoly m;
            for (const auto& c : j["minpoly"]) m.push_back(parse_integer(c, "minpoly coefficient"));
            return Field::finite_field(l, k, m);
        }
        return Field::finite_field(l, k);
    }
    fail(Err::InvalidInput, "unknown field kind \"" + kind + "\"");
}

// ---------------------------------------------------------------------------
// Elements: a bare scalar over the rationals, a coefficient array otherwise
// (low degree first). Input accepts a bare scalar in any field.

inline Json elem_to_json(const FieldElem& x) {
    if (x.field()->kind() == FieldKind::Rationals) return rational_str(x.coeffs()[0]);
    Json arr = Json::array();
    for (const auto& c : x.coeffs()) arr.push_back(rational_str(c));
    return arr;
}

inline FieldElem elem_from_json(const FieldPtr& E, const Json& j) {
    if (j.is_array()) {
        std::vector<mpq_class> coeffs;
        for (const auto& c : j) coeffs.push_back(parse_rational(c, "coefficient"));
        return FieldElem::from_coeffs(E, coeffs);
    }
    return FieldElem::from_rational(E, parse_rational(j, "element"));
}

// ---------------------------------------------------------------------------
// Matrices are arrays of rows; subspace bases are arrays of spanning vectors
// (the columns of the basis matrix).

inline Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(elem_to_json(m.at(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const FieldPtr& E, const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) fail(Err::InvalidInput, what + " must be a non-empty array of rows");
    int rows = static_cast<int>(j.size());
    if (!j[0].is_array() || j[0].empty())
        fail(Err::InvalidInput, what + " rows must be non-empty arrays");
    int cols = static_cast<int>(j[0].size());
    Matrix m(E, rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
            fail(Err::InvalidInput, what + " rows have inconsistent lengths");
        for (int c = 0; c < cols; ++c) m.at(i, c) = elem_from_json(E, j[i][c]);
    }
    return m;
}

inline Json basis_to_json(const Matrix& basis) {
    Json vecs = Json::array();
    for (int j = 0; j < basis.cols(); ++j) {
        Json v = Json::array();
        for (int i = 0; i < basis.rows(); ++i) v.push_back(elem_to_json(basis.at(i, j)));
        vecs.push_back(std::move(v));
    }
    return vecs;
}

inline Matrix basis_from_json(const FieldPtr& E, const Json& j, int dim, const std::string& what) {
    if (!j.is_array()) fail(Err::InvalidInput, what + " must be an array of vectors");
    Matrix basis(E, dim, static_cast<int>(j.size()));
    for (size_t v = 0; v < j.size(); ++v) {
        if (!j[v].is_array() || static_cast<int>(j[v].size()) != dim)
            fail(Err::InvalidInput, what + " vectors must have length " + std::to_string(dim));
        for (int i = 0; i < dim; ++i)
            basis.at(i, static_cast<int>(v)) = elem_from_json(E, j[v][i]);
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Weil-Deligne representations.

inline Json wd_to_json(const WDRep& w) {
    Json j;
    j["wdforge_schema"] = kSchemaVersion;
    j["type"] = "weil-deligne";
    j["q"] = w.q.get_str();
    j["E"] = field_to_json(w.E);
    j["frobenius"] = matrix_to_json(w.frob);
    j["n"] = matrix_to_json(w.n);
    return j;
}

inline WDRep wd_from_json(const Json& j) {
    if (!j.is_object()) fail(Err::InvalidInput, "representation must be a JSON object");
    for (const char* key : {"q", "E", "frobenius", "n"})
        if (!j.contains(key))
            fail(Err::InvalidInput, std::string("representation needs \"") + key + "\"");
    FieldPtr E = field_from_json(j["E"]);
    mpz_class q = parse_integer(j["q"], "q");
    Matrix frob = matrix_from_json(E, j["frobenius"], "frobenius");
    Matrix n = matrix_from_json(E, j["n"], "n");
    return WDRep::make(q, E, std::move(frob), std::move(n));
}

inline Json segments_to_json(const std::vector<Segment>& segs) {
    Json arr = Json::array();
    for (const auto& s : segs) {
        Json e;
        e["top"] = elem_to_json(s.top);
        e["length"] = s.length;
        e["multiplicity"] = s.multiplicity;
        arr.push_back(std::move(e));
    }
    return arr;
}

// ---------------------------------------------------------------------------
// Filtered phi-N modules.

inline Json phin_to_json(const FilteredPhiNModule& D) {
    Json j;
    j["wdforge_schema"] = kSchemaVersion;
    j["type"] = "phin-module";
    j["l"] = D.m.l.get_str();
    j["f"] = D.m.f;
    j["d"] = D.m.d;
    j["E"] = field_to_json(D.m.E);
    Json phis = Json::array(), ns = Json::array();
    for (const auto& p : D.m.phi) phis.push_back(matrix_to_json(p));
    for (const auto& nn : D.m.n) ns.push_back(matrix_to_json(nn));
    j["phi"] = std::move(phis);
    j["n"] = std::move(ns);
    Json fil = Json::array();
    for (const auto& steps : D.filtration) {
        Json tau_steps = Json::array();
        for (const auto& st : steps) {
            Json s;
            s["jump"] = st.jump;
            s["basis"] = basis_to_json(st.basis);
            tau_steps.push_back(std::move(s));
        }
        fil.push_back(std::move(tau_steps));
    }
    j["filtration"] = std::move(fil);
    if (D.theta_valuation) j["valuation"] = Json{{"theta", rational_str(*D.theta_valuation)}};
    return j;
}

inline FilteredPhiNModule phin_from_json(const Json& j) {
    if (!j.is_object()) fail(Err::InvalidInput, "module must be a JSON object");
    for (const char* key : {"l", "f", "d", "E", "phi", "n", "filtration"})
        if (!j.contains(key)) fail(Err::InvalidInput, std::string("module needs \"") + key + "\"");
    FieldPtr E = field_from_json(j["E"]);
    mpz_class l = parse_integer(j["l"], "l");
    int f = j["f"].is_number_integer() ? j["f"].get<int>()
                                       : static_cast<int>(parse_integer(j["f"], "f").get_si());
    int d = j["d"].is_number_integer() ? j["d"].get<int>()
                                       : static_cast<int>(parse_integer(j["d"], "d").get_si());
    if (!j["phi"].is_array() || !j["n"].is_array() || !j["filtration"].is_array())
        fail(Err::InvalidInput, "phi, n and filtration must be arrays");
    std::vector<Matrix> phi, n;
    for (const auto& p : j["phi"]) phi.push_back(matrix_from_json(E, p, "phi"));
    for (const auto& nn : j["n"]) n.push_back(matrix_from_json(E, nn, "n"));
    PhiNModule m = PhiNModule::make(l, f, d, E, std::move(phi), std::move(n));

    std::vector<std::vector<FiltrationStep>> fil;
    for (const auto& tau_steps : j["filtration"]) {
        if (!tau_steps.is_array()) fail(Err::InvalidInput, "filtration components must be arrays");
        std::vector<FiltrationStep> steps;
        for (const auto& s : tau_steps) {
            if (!s.is_object() || !s.contains("jump") || !s.contains("basis"))
                fail(Err::InvalidInput, "filtration steps need \"jump\" and \"basis\"");
            steps.push_back(
                FiltrationStep{static_cast<long>(parse_integer(s["jump"], "jump").get_si()),
                               basis_from_json(E, s["basis"], d, "filtration basis")});
        }
        fil.push_back(std::move(steps));
    }
    std::optional<mpq_class> theta;
    if (j.contains("valuation")) {
        if (!j["valuation"].is_object() || !j["valuation"].contains("theta"))
            fail(Err::InvalidInput, "valuation must be an object with \"theta\"");
        theta = parse_rational(j["valuation"]["theta"], "theta valuation");
    }
    return FilteredPhiNModule::make(std::move(m), std::move(fil), std::move(theta));
}

// ---------------------------------------------------------------------------
// Matrix groups and the diagnostics inputs.

inline MatGroup group_from_json(const Json& j) {
    if (!j.is_object()) fail(Err::InvalidInput, "group must be a JSON object");
    for (const char* key : {"l", "generators"})
        if (!j.contains(key)) fail(Err::InvalidInput, std::string("group needs \"") + key + "\"");
    mpz_class l = parse_integer(j["l"], "l");
    int k = j.value("k", 1);
    long cap = j.value("cap", 200000L);
    FieldPtr E = Field::finite_field(l, k);
    if (!j["generators"].is_array())
        fail(Err::InvalidInput, "generators must be an array of matrices");
    std::vector<Matrix> gens;
    for (const auto& g : j["generators"]) gens.push_back(matrix_from_json(E, g, "generator"));
    return MatGroup::make(l, k, std::move(gens), cap);
}

inline Json enormous_to_json(const EnormousReport& r) {
    Json j;
    j["wdforge_schema"] = kSchemaVersion;
    j["type"] = "enormous-report";
    j["group_order"] = static_cast<long>(r.group_order);
    j["absolutely_irreducible"] = r.absolutely_irreducible;
    j["no_l_power_quotient"] = r.no_l_power_quotient;
    j["l_quotient_order"] = r.l_quotient_order.get_str();
    j["h0"] = r.h0;
    j["h1"] = r.h1;
    j["h0_zero"] = r.h0_zero;
    j["h1_zero"] = r.h1_zero;
    j["simple_submodule_condition"] = r.simple_submodule_condition;
    j["splitting_degree"] = r.splitting_degree;
    if (r.fixed_vectors) j["fixed_vectors"] = basis_to_json(*r.fixed_vectors);
    if (r.failing_submodule) j["failing_submodule"] = basis_to_json(*r.failing_submodule);
    Json wit = Json::array();
    for (const auto& w : r.submodule_witnesses) wit.push_back(matrix_to_json(w));
    j["submodule_witnesses"] = std::move(wit);
    j["verdict"] = r.verdict;
    return j;
}

struct DecomposedGenericInput {
    mpz_class p;
    mpz_class l;
    std::vector<EigenvaluePlace> places;
    bool splits_completely = false;
};

inline DecomposedGenericInput decgen_from_json(const Json& j) {
    if (!j.is_object()) fail(Err::InvalidInput, "input must be a JSON object");
    for (const char* key : {"p", "l", "splits_completely", "places"})
        if (!j.contains(key)) fail(Err::InvalidInput, std::string("input needs \"") + key + "\"");
    DecomposedGenericInput in;
    in.p = parse_integer(j["p"], "p");
    in.l = parse_integer(j["l"], "l");
    if (!j["splits_completely"].is_boolean())
        fail(Err::InvalidInput, "splits_completely must be a boolean");
    in.splits_completely = j["splits_completely"].get<bool>();
    int k = j.value("k", 1);
    FieldPtr E = Field::finite_field(in.l, k);
    if (!j["places"].is_array()) fail(Err::InvalidInput, "places must be an array");
    for (const auto& pl : j["places"]) {
        if (!pl.is_object() || !pl.contains("alpha") || !pl.contains("beta"))
            fail(Err::InvalidInput, "places need \"alpha\" and \"beta\"");
        in.places.push_back(
            EigenvaluePlace{elem_from_json(E, pl["alpha"]), elem_from_json(E, pl["beta"])});
    }
    return in;
}

inline std::vector<ScalarCertElement> scalarcert_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("l") || !j.contains("elements"))
        fail(Err::InvalidInput, "input needs \"l\" and \"elements\"");
    mpz_class l = parse_integer(j["l"], "l");
    int k = j.value("k", 1);
    FieldPtr E = Field::finite_field(l, k);
    if (!j["elements"].is_array()) fail(Err::InvalidInput, "elements must be an array");
    std::vector<ScalarCertElement> out;
    for (const auto& e : j["elements"]) {
        if (!e.is_object() || !e.contains("h") || !e.contains("c"))
            fail(Err::InvalidInput, "elements need \"h\" and \"c\"");
        out.push_back(ScalarCertElement{matrix_from_json(E, e["h"], "h"),
                                        elem_from_json(E, e["c"])});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Automorphic data and compatibility reports.

inline LocalAutomorphicDatum automorphic_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        fail(Err::InvalidInput, "automorphic datum needs a \"kind\"");
    std::string kind = j["kind"].get<std::string>();
    if (!j.contains("q") || !j.contains("E"))
        fail(Err::InvalidInput, "automorphic datum needs \"q\" and \"E\"");
    FieldPtr E = field_from_json(j["E"]);
    mpz_class q = parse_integer(j["q"], "q");
    if (kind == "unramified-principal-series") {
        if (!j.contains("alpha") || !j.contains("beta"))
            fail(Err::InvalidInput, "principal series needs \"alpha\" and \"beta\"");
        return LocalAutomorphicDatum::unramified_ps(elem_from_json(E, j["alpha"]),
                                                    elem_from_json(E, j["beta"]), q);
    }
    if (kind == "steinberg-twist") {
        if (!j.contains("c")) fail(Err::InvalidInput, "Steinberg twist needs \"c\"");
        return LocalAutomorphicDatum::steinberg(elem_from_json(E, j["c"]), q);
    }
    fail(Err::UnsupportedLocalType, "unsupported local type \"" + kind + "\"");
}

inline Json compat_to_json(const CompatReport& r) {
    Json j;
    j["wdforge_schema"] = kSchemaVersion;
    j["type"] = "compat-report";
    j["level"] = compat_level_name(r.level);
    j["ss_match"] = r.ss_match;
    j["fss_match"] = r.fss_match;
    j["monodromy_ok"] = r.monodromy_ok;
    j["galois_segments"] = segments_to_json(r.galois_segments);
    j["automorphic_segments"] = segments_to_json(r.automorphic_segments);
    j["reason"] = r.reason;
    j["verdict"] = r.verdict;
    return j;
}

}  // namespace wdforge
