// Acceptance suite: nine end-to-end criteria covering the L-invariant, the
// base-point independence of the associated representation, structural
// validation, semisimplification algebra, the crystalline-vs-special
// contradiction, the cohomology engine, the auxiliary-prime certificate,
// weak admissibility on the worked example, and the CLI golden contract.
//
// Usage: acceptance --fixtures <dir> --golden <dir> --cli <path>
// Prints one [PASS]/[FAIL] line per criterion; exits 0 iff all pass.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "wdforge/json_io.hpp"

using namespace wdforge;
namespace fs = std::filesystem;

namespace {

std::string g_fixtures, g_golden, g_cli;

struct Failure {
    std::string note;
};

void expect(bool cond, const std::string& note) {
    if (!cond) throw Failure{note};
}

FieldPtr Q() { return Field::rationals(); }
FieldElem qe(long v) { return FieldElem::from_integer(Q(), v); }

Matrix mat2(const FieldPtr& E, long a, long b, long c, long d) {
    Matrix m(E, 2, 2);
    m.at(0, 0) = FieldElem::from_integer(E, a);
    m.at(0, 1) = FieldElem::from_integer(E, b);
    m.at(1, 0) = FieldElem::from_integer(E, c);
    m.at(1, 1) = FieldElem::from_integer(E, d);
    return m;
}

// The rank-2 worked example: phi = diag(l, 1), N e1 = e2, middle filtration
// step spanned by e1 - 3 e2 at the given jump.
FilteredPhiNModule worked_example(long middle_jump) {
    Matrix phi = mat2(Q(), 5, 0, 0, 1);
    Matrix n = mat2(Q(), 0, 0, 1, 0);
    PhiNModule m = PhiNModule::make(5, 1, 2, Q(), {phi}, {n});
    Matrix full = Matrix::identity(Q(), 2);
    Matrix line(Q(), 2, 1);
    line.at(0, 0) = qe(1);
    line.at(1, 0) = qe(-3);
    std::vector<FiltrationStep> steps;
    steps.push_back(FiltrationStep{0, full});
    steps.push_back(FiltrationStep{middle_jump, line});
    steps.push_back(FiltrationStep{middle_jump + 1, Matrix(Q(), 2, 0)});
    return FilteredPhiNModule::make(std::move(m), {std::move(steps)});
}

// --- criterion 1: L-invariant ------------------------------------------------

void crit_l_invariant() {
    LInvariantResult r = l_invariant(worked_example(1));
    expect(r.value == qe(3), "worked example: L != 3");
    expect(r.alpha == qe(5), "worked example: alpha != 5");
    expect(r.j0 == 1, "worked example: j0 != 1");

    testgen::Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        auto gen = testgen::rnd_monodromy_module(rng, 5);
        FieldElem before = l_invariant(gen.module).value;
        expect(before == FieldElem::from_rational(Q(), gen.expected_l),
               "random module: L != construction value");
        Matrix g = testgen::rnd_invertible(rng, Q(), 2);
        FieldElem after = l_invariant(testgen::change_basis(gen.module, g)).value;
        expect(before == after, "random module: L changed under basis change");
    }
}

// --- criterion 2: base-point independence --------------------------------------

void crit_tau_independence() {
    testgen::Rng rng(202);
    for (int trial = 0; trial < 200; ++trial) {
        int f = 1 + static_cast<int>(testgen::rnd_int(rng, 0, 2));
        int d = 1 + static_cast<int>(testgen::rnd_int(rng, 0, 3));
        PhiNModule m = testgen::rnd_phin(rng, 5, f, d);
        TauIndependenceReport rep = tau_independence_check(m);
        expect(rep.verdict, "base-point dependence detected");
        expect(rep.pairs.size() == static_cast<size_t>(f * (f - 1) / 2),
               "wrong number of pairwise comparisons");
    }
}

// --- criterion 3: structural invariants everywhere ------------------------------

void crit_structural() {
    testgen::Rng rng(303);
    long objects = 0, violations = 0;
    auto check_wd = [&](const WDRep& w) {
        ++objects;
        if (!validate_wd(w.q, w.E, w.frob, w.n).empty()) ++violations;
    };
    auto check_phin = [&](const PhiNModule& m) {
        ++objects;
        if (!validate_phin(m.l, m.f, m.d, m.E, m.phi, m.n).empty()) ++violations;
    };
    for (int trial = 0; trial < 130; ++trial) {
        mpz_class q = (trial % 2 == 0) ? 5 : 25;
        int d = 1 + static_cast<int>(testgen::rnd_int(rng, 0, 4));
        auto pair = testgen::rnd_wd_pair(rng, Q(), q, d);
        WDRep w = WDRep::make(q, Q(), pair.frob, pair.n);
        check_wd(w);
        check_wd(frobenius_semisimplify(w));
        check_wd(semisimplify(w));
        check_wd(twist_unramified(w, qe(2 + trial % 5)));
        auto pair2 = testgen::rnd_wd_pair(rng, Q(), q, 1 + (trial % 3));
        WDRep w2 = WDRep::make(q, Q(), pair2.frob, pair2.n);
        check_wd(w2);
        check_wd(direct_sum(w, w2));

        int f = 1 + static_cast<int>(testgen::rnd_int(rng, 0, 2));
        int dm = 1 + static_cast<int>(testgen::rnd_int(rng, 0, 2));
        PhiNModule m = testgen::rnd_phin(rng, 5, f, dm);
        check_phin(m);
        for (int tau = 0; tau < f; ++tau) check_wd(wd_of(m, tau));
    }
    expect(objects >= 1000, "fewer than 1000 objects exercised: " + std::to_string(objects));
    expect(violations == 0, std::to_string(violations) + " validation violations");
}

// --- criterion 4: semisimplification algebra -------------------------------------

Matrix eval_poly_at(const Poly& p, const Matrix& x) {
    Matrix v(x.field(), x.rows(), x.rows());
    for (size_t i = p.coeffs().size(); i-- > 0;)
        v = v * x + Matrix::scalar(x.field(), x.rows(), p.coeffs()[i]);
    return v;
}

void crit_semisimplification() {
    testgen::Rng rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        int d = 1 + static_cast<int>(testgen::rnd_int(rng, 0, 4));
        auto pair = testgen::rnd_wd_pair(rng, Q(), 25, d);
        WDRep w = WDRep::make(25, Q(), pair.frob, pair.n);

        WDRep f1 = frobenius_semisimplify(w);
        WDRep f2 = frobenius_semisimplify(f1);
        expect(f2.frob == f1.frob && f2.n == f1.n, "fss is not idempotent");
        WDRep s1 = semisimplify(w);
        WDRep s2 = semisimplify(s1);
        expect(s2.frob == s1.frob && s2.n == s1.n, "ss is not idempotent");
        expect(s1.n.is_zero(), "ss left a nonzero N");

        // decompose -> rebuild -> compare the isomorphism class
        std::vector<Segment> segs = segments(f1);
        std::vector<WDRep> blocks;
        for (const Segment& s : segs)
            for (int c = 0; c < s.multiplicity; ++c) blocks.push_back(sp(s.length, s.top, 25));
        WDRep rebuilt = blocks.front();
        for (size_t i = 1; i < blocks.size(); ++i) rebuilt = direct_sum(rebuilt, blocks[i]);
        expect(is_isomorphic(rebuilt, w), "segment decomposition does not rebuild the class");
    }

    // multiplicative decomposition on two coefficient fields
    for (const FieldPtr& E :
         {Q(), Field::simple_extension({mpq_class(1), mpq_class(0), mpq_class(1)})}) {
        for (int trial = 0; trial < 200; ++trial) {
            int d = 1 + static_cast<int>(testgen::rnd_int(rng, 0, 3));
            Matrix m = testgen::rnd_invertible(rng, E, d);
            MultiplicativeJC jc = multiplicative_jordan_chevalley(m);
            expect(jc.s * jc.u == m && jc.u * jc.s == m, "s*u != m or u*s != m");
            Matrix shift = jc.u - Matrix::identity(E, d);
            expect(shift.is_nilpotent(), "unipotent part is not unipotent");
            Poly rad = radical(jc.s.char_poly());
            expect(eval_poly_at(rad, jc.s).is_zero(),
                   "semisimple part not annihilated by a squarefree polynomial");
        }
    }
}

// --- criterion 5: the crystalline-vs-special contradiction ------------------------

void crit_contradiction() {
    FieldElem alpha = qe(10);
    Matrix frob(Q(), 2, 2);
    frob.at(0, 0) = alpha;
    frob.at(1, 1) = qe(2);  // alpha / q
    WDRep crystalline = WDRep::make(5, Q(), frob, Matrix(Q(), 2, 2));
    LocalAutomorphicDatum steinberg = LocalAutomorphicDatum::steinberg(alpha, 5);

    CompatReport at_ss = compat_check(crystalline, steinberg, CompatLevel::Ss);
    expect(at_ss.verdict, "semisimplifications should agree");
    CompatReport at_fss = compat_check(crystalline, steinberg, CompatLevel::Fss);
    expect(!at_fss.verdict, "Frobenius-semisimple classes should differ");
    expect(at_fss.reason == "crystalline vs special: contradiction locus of the main theorem",
           "wrong diagnostic reason: " + at_fss.reason);
    expect(!is_generic_parameter(frobenius_semisimplify(crystalline)),
           "the N = 0 side should be non-generic");

    WDRep special = sp(2, alpha, 5);
    CompatReport fixed = compat_check(special, steinberg, CompatLevel::Fss);
    expect(fixed.verdict, "the Steinberg monodromy should restore compatibility");
    expect(is_generic_parameter(special), "sp(2) should be generic");
}

// --- criterion 6: cohomology engine ------------------------------------------------

void crit_cohomology() {
    FieldPtr F5 = Field::finite_field(5, 1);

    MatGroup trivial = MatGroup::make(5, 1, {Matrix::identity(F5, 2)});
    CohomologyDims t = h0_h1_ad0(trivial);
    expect(t.h0 == 3 && t.h1 == 0, "trivial group is (3, 0)");

    auto dual_agree = [](const MatGroup& g) {
        int a = h1_by_tree_reduction(g);
        int b = h1_by_all_pairs(g);
        expect(a == b, "cocycle methods disagree");
        return a;
    };
    expect(dual_agree(trivial) == 0, "trivial H^1 != 0");

    // 24 generated subgroups of order coprime to l: classical vanishing
    testgen::Rng rng(606);
    int coprime_checked = 0;
    for (const long lv : {5L, 7L}) {
        mpz_class l(lv);
        for (int i = 0; i < 12; ++i) {
            MatGroup g = testgen::rnd_coprime_cyclic(rng, l);
            size_t order = close_group(g).size();
            expect(order % static_cast<size_t>(lv) != 0, "group order is divisible by l");
            expect(order <= 2000, "coprime group exceeded the size bound");
            CohomologyDims dims = h0_h1_ad0(g);
            expect(dims.h1 == 0, "coprime-order H^1 != 0");
            expect(dual_agree(g) == 0, "dual methods nonzero on a coprime group");
            ++coprime_checked;
        }
    }
    expect(coprime_checked >= 20, "fewer than 20 coprime groups");

    MatGroup unipotent = MatGroup::make(5, 1, {mat2(F5, 1, 1, 0, 1)});
    CohomologyDims u = h0_h1_ad0(unipotent);
    expect(u.h0 == 1 && u.h1 == 1, "order-5 unipotent group is (1, 1)");
    expect(dual_agree(unipotent) == 1, "unipotent H^1 != 1");

    MatGroup gl2 = MatGroup::make(5, 1, {mat2(F5, 2, 0, 0, 1), mat2(F5, 4, 1, 4, 0)});
    expect(close_group(gl2).size() == 480, "|GL_2(F_5)| != 480");
    expect(dual_agree(gl2) == 0, "GL_2(F_5) H^1 != 0");

    // the full report, twice: identical bytes
    EnormousReport r1 = is_enormous(gl2);
    EnormousReport r2 = is_enormous(gl2);
    expect(r1.verdict, "GL_2(F_5) must have enormous image");
    expect(enormous_to_json(r1).dump() == enormous_to_json(r2).dump(),
           "enormous report is not bit-identical across runs");
}

// --- criterion 7: decomposed-generic arithmetic -------------------------------------

void crit_decgen() {
    FieldPtr F11 = Field::finite_field(11, 1);
    auto e = [&](long v) { return FieldElem::from_integer(F11, v); };
    DecomposedGenericReport reject =
        is_decomposed_generic_at(7, 11, {EigenvaluePlace{e(2), e(3)}}, true);
    expect(!reject.verdict, "(p=7, 2, 3) must be rejected");
    expect(reject.reason == "ratio = p^-1", "wrong reason: " + reject.reason);
    DecomposedGenericReport accept =
        is_decomposed_generic_at(2, 11, {EigenvaluePlace{e(1), e(5)}}, true);
    expect(accept.verdict, "(p=2, 1, 5) must be accepted");
    expect(accept.reason.empty(), "accepted input must carry no reason");
}

// --- criterion 8: weak admissibility on the worked example ---------------------------

void crit_weak_admissibility() {
    WeakAdmissibilityReport good = is_weakly_admissible(worked_example(1));
    expect(good.t_n == 1 && good.t_h == 1, "worked example: t_N or t_H != 1");
    expect(good.verdict, "worked example must be weakly admissible");

    WeakAdmissibilityReport bad = is_weakly_admissible(worked_example(3));
    expect(bad.t_h == 3, "jump-3 variant: t_H != 3");
    expect(!bad.verdict, "jump-3 variant must fail");
}

// --- criterion 9: CLI golden contract --------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    expect(static_cast<bool>(in), "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void crit_cli() {
    size_t fixture_count = 0;
    for (const auto& entry : fs::directory_iterator(g_fixtures))
        if (entry.path().extension() == ".json") ++fixture_count;
    expect(fixture_count >= 12,
           "fixture corpus has only " + std::to_string(fixture_count) + " files");

    Json manifest = Json::parse(slurp(fs::path(g_golden) / "manifest.json"));
    expect(manifest["cases"].is_array() && !manifest["cases"].empty(), "empty manifest");

    for (const Json& c : manifest["cases"]) {
        std::string name = c["name"].get<std::string>();
        std::string cmd = "'" + g_cli + "'";
        for (const Json& a : c["args"]) {
            std::string arg = a.get<std::string>();
            if (!arg.empty() && arg[0] == '@')
                arg = (fs::path(g_fixtures) / arg.substr(1)).string();
            cmd += " '" + arg + "'";
        }
        FILE* pipe = popen(cmd.c_str(), "r");
        expect(pipe != nullptr, name + ": cannot start the tool");
        std::string out;
        char buf[4096];
        size_t got;
        while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
        int status = pclose(pipe);
        expect(WIFEXITED(status), name + ": tool did not exit normally");
        int code = WEXITSTATUS(status);
        expect(code == c["exit"].get<int>(),
               name + ": exit " + std::to_string(code) + " != " +
                   std::to_string(c["exit"].get<int>()));

        Json doc = Json::parse(out, nullptr, false);
        expect(!doc.is_discarded(), name + ": output is not valid JSON");
        expect(doc.contains("wdforge_schema") && doc["wdforge_schema"] == 1,
               name + ": missing schema version");

        std::string golden = slurp(fs::path(g_golden) / c["golden"].get<std::string>());
        expect(out == golden, name + ": output differs from the golden file");
    }
}

// --- driver -------------------------------------------------------------------------

bool run(int id, const std::string& label, const std::function<void()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    std::string note;
    bool ok = true;
    try {
        fn();
    } catch (const Failure& f) {
        ok = false;
        note = f.note;
    } catch (const std::exception& e) {
        ok = false;
        note = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char line[512];
    std::snprintf(line, sizeof line, "[%s] %d. %s (%.2fs)%s%s", ok ? "PASS" : "FAIL", id,
                  label.c_str(), secs, note.empty() ? "" : " -- ", note.c_str());
    std::cout << line << std::endl;
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; i += 2) {
        std::string flag = argv[i];
        if (flag == "--fixtures") g_fixtures = argv[i + 1];
        else if (flag == "--golden") g_golden = argv[i + 1];
        else if (flag == "--cli") g_cli = argv[i + 1];
    }
    if (g_fixtures.empty() || g_golden.empty() || g_cli.empty()) {
        std::cerr << "usage: acceptance --fixtures <dir> --golden <dir> --cli <path>\n";
        return 2;
    }

    struct Timed {
        int id;
        const char* label;
        std::function<void()> fn;
        double budget;  // seconds; 0 = no bound
    };
    std::vector<Timed> criteria = {
        {1, "L-invariant: worked example and 200 basis changes", crit_l_invariant, 5},
        {2, "base-point independence on 200 random modules", crit_tau_independence, 30},
        {3, "structural validation across >= 1000 objects", crit_structural, 0},
        {4, "semisimplification algebra and multiplicative decomposition",
         crit_semisimplification, 30},
        {5, "crystalline-vs-special contradiction", crit_contradiction, 0},
        {6, "cohomology engine with dual-method agreement", crit_cohomology, 120},
        {7, "decomposed-generic certificate", crit_decgen, 1},
        {8, "weak admissibility on the worked example", crit_weak_admissibility, 0},
        {9, "CLI golden contract", crit_cli, 0},
    };

    bool all = true;
    for (const Timed& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        bool ok = run(c.id, c.label, c.fn);
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (ok && c.budget > 0 && secs > c.budget) {
            std::cout << "[FAIL] " << c.id << ". exceeded the " << c.budget
                      << "s budget: " << secs << "s" << std::endl;
            ok = false;
        }
        all = all && ok;
    }
    std::cout << (all ? "all criteria passed" : "ACCEPTANCE FAILED") << std::endl;
    return all ? 0 : 1;
}
