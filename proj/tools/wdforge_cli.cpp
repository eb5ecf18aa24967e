// wdforge: exact-arithmetic toolkit for filtered (phi,N)-modules,
// Weil-Deligne representations and mod-l image diagnostics.
//
// Every command reads JSON files, writes one JSON document to standard
// output, and exits with 0 (predicate true / computation succeeded),
// 1 (predicate false) or 2 (invalid input). Parameters are expected
// already normalized: no square roots of q are ever introduced.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include "wdforge/json_io.hpp"

namespace {

using namespace wdforge;

bool g_pretty = false;

void emit(const Json& j) {
    if (g_pretty)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << j.dump() << "\n";
}

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Err::InvalidInput, "cannot read file: " + path);
    try {
        return Json::parse(in);
    } catch (const std::exception& e) {
        fail(Err::InvalidInput, "malformed JSON in " + path + ": " + e.what());
    }
}

std::string doc_type(const Json& j) {
    if (j.is_object() && j.contains("type") && j["type"].is_string())
        return j["type"].get<std::string>();
    return "";
}

int as_exit(bool predicate) { return predicate ? 0 : 1; }

// --- validate ---------------------------------------------------------------

int run_validate(const std::string& path) {
    Json j = read_json(path);
    if (!j.is_object()) fail(Err::InvalidInput, "input must be a JSON object");
    std::string kind = doc_type(j);
    Json out;
    out["wdforge_schema"] = kSchemaVersion;
    out["type"] = "validation-report";
    try {
        if (kind == "phin-module") {
            FilteredPhiNModule D = phin_from_json(j);
            out["object_type"] = "phin-module";
            out["l"] = D.m.l.get_str();
            out["f"] = D.m.f;
            out["d"] = D.m.d;
        } else if (kind == "weil-deligne") {
            WDRep w = wd_from_json(j);
            out["object_type"] = "weil-deligne";
            out["q"] = w.q.get_str();
            out["d"] = w.d();
        } else if (j.contains("generators")) {
            MatGroup g = group_from_json(j);
            out["object_type"] = "matrix-group";
            out["l"] = g.l.get_str();
            out["k"] = g.k;
        } else if (j.contains("places")) {
            decgen_from_json(j);
            out["object_type"] = "decomposed-generic-input";
        } else if (j.contains("elements")) {
            scalarcert_from_json(j);
            out["object_type"] = "scalar-certificate-input";
        } else if (j.contains("kind")) {
            LocalAutomorphicDatum d = automorphic_from_json(j);
            out["object_type"] = "automorphic-datum";
            out["q"] = d.q.get_str();
        } else {
            fail(Err::InvalidInput, "unrecognized document: no known type markers");
        }
    } catch (const WdError& e) {
        if (e.code() != Err::ValidationFailed) throw;
        out["object_type"] = kind.empty() ? "unknown" : kind;
        out["valid"] = false;
        out["error"] = e.what();
        if (!e.details().empty()) out["violations"] = e.details();
        emit(out);
        return 1;
    }
    out["valid"] = true;
    emit(out);
    return 0;
}

// --- module commands ---------------------------------------------------------

int run_wd(const std::string& path, int tau) {
    FilteredPhiNModule D = phin_from_json(read_json(path));
    emit(wd_to_json(wd_of(D.m, tau)));
    return 0;
}

int run_tauindep(const std::string& path) {
    FilteredPhiNModule D = phin_from_json(read_json(path));
    TauIndependenceReport rep = tau_independence_check(D.m);
    Json out;
    out["wdforge_schema"] = kSchemaVersion;
    out["type"] = "tau-independence";
    out["verdict"] = rep.verdict;
    Json pairs = Json::array();
    for (const auto& [i, j, ok] : rep.pairs)
        pairs.push_back(Json{{"i", i}, {"j", j}, {"isomorphic", ok}});
    out["pairs"] = std::move(pairs);
    emit(out);
    return as_exit(rep.verdict);
}

int run_linv(const std::string& path) {
    FilteredPhiNModule D = phin_from_json(read_json(path));
    LInvariantResult r = l_invariant(D);
    Json out;
    out["wdforge_schema"] = kSchemaVersion;
    out["type"] = "l-invariant";
    out["l_invariant"] = elem_to_json(r.value);
    out["alpha"] = elem_to_json(r.alpha);
    out["j0"] = r.j0;
    emit(out);
    return 0;
}

int run_wa(const std::string& path) {
    FilteredPhiNModule D = phin_from_json(read_json(path));
    WeakAdmissibilityReport r = is_weakly_admissible(D);
    Json out;
    out["wdforge_schema"] = kSchemaVersion;
    out["type"] = "weak-admissibility";
    out["t_n"] = rational_str(r.t_n);
    out["t_h"] = rational_str(r.t_h);
    out["verdict"] = r.verdict;
    emit(out);
    return as_exit(r.verdict);
}

int run_htweights(const std::string& path) {
    FilteredPhiNModule D = phin_from_json(read_json(path));
    Json out;
    out["wdforge_schema"] = kSchemaVersion;
    out["type"] = "ht-weights";
    Json weights = Json::array();
    for (int tau = 0; tau < D.m.f; ++tau) weights.push_back(hodge_tate_weights(D, tau));
    out["weights"] = std::move(weights);
    if (D.m.d == 2) out["weight_zero_type"] = is_weight_zero_type(D);
    emit(out);
    return 0;
}

// --- representation commands --------------------------------------------------

int run_fss(const std::string& path) {
    emit(wd_to_json(frobenius_semisimplify(wd_from_json(read_json(path)))));
    return 0;
}

int run_ss(const std::string& path) {
    emit(wd_to_json(semisimplify(wd_from_json(read_json(path)))));
    return 0;
}

int run_segments(const std::string& path) {
    WDRep w = wd_from_json(read_json(path));
    Json out;
    out["wdforge_schema"] = kSchemaVersion;
    out["type"] = "segments";
    out["q"] = w.q.get_str();
    out["segments"] = segments_to_json(segments(w));
    emit(out);
    return 0;
}

int run_iso(const std::string& a_path, const std::string& b_path, bool strict) {
    WDRep a = wd_from_json(read_json(a_path));
    WDRep b = wd_from_json(read_json(b_path));
    bool iso = is_isomorphic(a, b, strict);
    Json out;
    out["wdforge_schema"] = kSchemaVersion;
    out["type"] = "isomorphism";
    out["strict"] = strict;
    out["isomorphic"] = iso;
    emit(out);
    return as_exit(iso);
}

int run_generic(const std::string& path) {
    bool g = is_generic_parameter(wd_from_json(read_json(path)));
    Json out;
    out["wdforge_schema"] = kSchemaVersion;
    out["type"] = "genericity";
    out["generic"] = g;
    emit(out);
    return as_exit(g);
}

int run_monodromy(const std::string& a_path, const std::string& b_path) {
    WDRep a = wd_from_json(read_json(a_path));
    WDRep b = wd_from_json(read_json(b_path));
    bool dom = monodromy_dominates(a, b);
    Json out;
    out["wdforge_schema"] = kSchemaVersion;
    out["type"] = "monodromy-domination";
    out["dominates"] = dom;
    emit(out);
    return as_exit(dom);
}

// --- compatibility --------------------------------------------------------------

int run_compat(const std::string& galois_path, const std::string& auto_path,
               const std::string& level_name, int tau) {
    Json gj = read_json(galois_path);
    LocalAutomorphicDatum datum = automorphic_from_json(read_json(auto_path));
    CompatLevel level = level_name == "ss"    ? CompatLevel::Ss
                        : level_name == "fss" ? CompatLevel::Fss
                                              : CompatLevel::Monodromy;
    CompatReport rep = doc_type(gj) == "phin-module"
                           ? compat_check(phin_from_json(gj).m, tau, datum, level)
                           : compat_check(wd_from_json(gj), datum, level);
    emit(compat_to_json(rep));
    return as_exit(rep.verdict);
}

// --- finite-group diagnostics -----------------------------------------------------

int run_enormous(const std::string& path) {
    EnormousReport rep = is_enormous(group_from_json(read_json(path)));
    emit(enormous_to_json(rep));
    return as_exit(rep.verdict);
}

int run_decgen(const std::string& path) {
    DecomposedGenericInput in = decgen_from_json(read_json(path));
    DecomposedGenericReport rep =
        is_decomposed_generic_at(in.p, in.l, in.places, in.splits_completely);
    Json out;
    out["wdforge_schema"] = kSchemaVersion;
    out["type"] = "decomposed-generic";
    out["verdict"] = rep.verdict;
    out["reason"] = rep.reason;
    if (rep.failing_place) out["failing_place"] = static_cast<long>(*rep.failing_place);
    emit(out);
    return as_exit(rep.verdict);
}

int run_scalarcert(const std::string& path) {
    bool found = exists_scalar_outside_cyclotomic(scalarcert_from_json(read_json(path)));
    Json out;
    out["wdforge_schema"] = kSchemaVersion;
    out["type"] = "scalar-certificate";
    out["found"] = found;
    emit(out);
    return as_exit(found);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "wdforge: exact arithmetic for filtered (phi,N)-modules, Weil-Deligne\n"
        "representations and mod-l image diagnostics.\n\n"
        "Inputs are JSON; every command prints one JSON document to stdout.\n"
        "Exit codes: 0 = predicate true / success, 1 = predicate false,\n"
        "2 = invalid input. All parameters are taken already normalized:\n"
        "callers wanting half-integral twists must apply them beforehand,\n"
        "since q^(1/2) generally lies outside the exact coefficient field."};
    app.require_subcommand(1);
    app.add_flag("--pretty", g_pretty, "indent the JSON output for reading");

    std::function<int()> run;
    std::string file_a, file_b, level;
    int tau = 0;
    bool strict = false;

    auto* c_validate = app.add_subcommand("validate", "check a document's structural invariants");
    c_validate->add_option("file", file_a, "input JSON")->required();
    c_validate->callback([&] { run = [&] { return run_validate(file_a); }; });

    auto* c_wd = app.add_subcommand(
        "wd", "associated Weil-Deligne representation of a filtered (phi,N)-module");
    c_wd->add_option("file", file_a, "module JSON")->required();
    c_wd->add_option("--tau", tau, "base point (default 0)");
    c_wd->callback([&] { run = [&] { return run_wd(file_a, tau); }; });

    auto* c_ti = app.add_subcommand(
        "tauindep", "verify the representation class is the same at every base point");
    c_ti->add_option("file", file_a, "module JSON")->required();
    c_ti->callback([&] { run = [&] { return run_tauindep(file_a); }; });

    auto* c_fss = app.add_subcommand("fss", "Frobenius-semisimplification");
    c_fss->add_option("file", file_a, "representation JSON")->required();
    c_fss->callback([&] { run = [&] { return run_fss(file_a); }; });

    auto* c_ss = app.add_subcommand("ss", "full semisimplification (also kills N)");
    c_ss->add_option("file", file_a, "representation JSON")->required();
    c_ss->callback([&] { run = [&] { return run_ss(file_a); }; });

    auto* c_seg = app.add_subcommand(
        "segments", "segment decomposition of a Frobenius-semisimple representation");
    c_seg->add_option("file", file_a, "representation JSON")->required();
    c_seg->callback([&] { run = [&] { return run_segments(file_a); }; });

    auto* c_iso = app.add_subcommand("iso", "compare two representations up to isomorphism");
    c_iso->add_option("a", file_a, "first representation")->required();
    c_iso->add_option("b", file_b, "second representation")->required();
    c_iso->add_flag("--strict", strict, "also compare the unipotent part of Frobenius");
    c_iso->callback([&] { run = [&] { return run_iso(file_a, file_b, strict); }; });

    auto* c_gen = app.add_subcommand(
        "generic", "genericity of a rank-2 parameter (eigenvalue ratio not 1 or q)");
    c_gen->add_option("file", file_a, "representation JSON")->required();
    c_gen->callback([&] { run = [&] { return run_generic(file_a); }; });

    auto* c_linv = app.add_subcommand("linv", "L-invariant of a rank-2 monodromy module");
    c_linv->add_option("file", file_a, "module JSON")->required();
    c_linv->callback([&] { run = [&] { return run_linv(file_a); }; });

    auto* c_wa = app.add_subcommand("wa", "weak admissibility (t_N = t_H + subobject bound)");
    c_wa->add_option("file", file_a, "module JSON")->required();
    c_wa->callback([&] { run = [&] { return run_wa(file_a); }; });

    auto* c_ht = app.add_subcommand("htweights", "Hodge-Tate weights per embedding");
    c_ht->add_option("file", file_a, "module JSON")->required();
    c_ht->callback([&] { run = [&] { return run_htweights(file_a); }; });

    auto* c_mon = app.add_subcommand(
        "monodromy", "check the first monodromy is dominated by the second");
    c_mon->add_option("a", file_a, "first representation")->required();
    c_mon->add_option("b", file_b, "second representation")->required();
    c_mon->callback([&] { run = [&] { return run_monodromy(file_a, file_b); }; });

    auto* c_compat = app.add_subcommand(
        "compat", "local compatibility of a Galois-side object with an automorphic datum");
    c_compat->add_option("galois", file_a, "representation or module JSON")->required();
    c_compat->add_option("automorphic", file_b, "automorphic datum JSON")->required();
    c_compat->add_option("--level", level, "comparison level")
        ->required()
        ->check(CLI::IsMember({"ss", "fss", "monodromy"}));
    c_compat->add_option("--tau", tau, "base point when the Galois side is a module");
    c_compat->callback([&] { run = [&] { return run_compat(file_a, file_b, level, tau); }; });

    auto* c_en = app.add_subcommand("enormous", "enormous-image report for a matrix group");
    c_en->add_option("file", file_a, "group JSON")->required();
    c_en->callback([&] { run = [&] { return run_enormous(file_a); }; });

    auto* c_dg = app.add_subcommand(
        "decgen", "decomposed-generic certificate at an auxiliary prime");
    c_dg->add_option("file", file_a, "input JSON")->required();
    c_dg->callback([&] { run = [&] { return run_decgen(file_a); }; });

    auto* c_sc = app.add_subcommand(
        "scalarcert", "find a scalar element with ratio outside the cyclotomic locus");
    c_sc->add_option("file", file_a, "elements JSON")->required();
    c_sc->callback([&] { run = [&] { return run_scalarcert(file_a); }; });

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return run ? run() : 2;
    } catch (const wdforge::WdError& e) {
        Json out;
        out["wdforge_schema"] = wdforge::kSchemaVersion;
        out["type"] = "error";
        out["code"] = e.code_name();
        out["message"] = e.what();
        if (!e.details().empty()) out["details"] = e.details();
        emit(out);
        return 2;
    } catch (const std::exception& e) {
        Json out;
        out["wdforge_schema"] = wdforge::kSchemaVersion;
        out["type"] = "error";
        out["code"] = "Internal";
        out["message"] = e.what();
        emit(out);
        return 2;
    }
}
