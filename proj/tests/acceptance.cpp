// Acceptance run: one PASS/FAIL line per criterion, with exact expected values and pinned time limits.
#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "dfderiv.hpp"

using namespace dfderiv;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        notes.push_back(std::string(ok ? "ok: " : "FAILED: ") + what);
    }
};

int failures = 0;

void criterion(int n, const std::string& title, double limit_s, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("unexpected error: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream lim;
    lim << "runtime " << s << " s, limit " << limit_s << " s";
    o.require(s < limit_s, lim.str());
    if (!o.pass) ++failures;
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << title << "\n";
    for (const auto& line : o.notes) std::cout << "    " << line << "\n";
    std::cout.flush();
}

CarrierPtr build(const std::string& id, Construction c, ScalarDomain base, CarrierKind kind = CarrierKind::ring,
                 std::vector<DeclaredFact> facts = {}) {
    CarrierDescriptor d;
    d.id = id;
    d.kind = kind;
    d.construction = c;
    d.base = base;
    d.size = 2;
    d.declared_facts = std::move(facts);
    return make_carrier(d);
}

CarrierPtr pair_of(const CarrierPtr& r) {
    CarrierDescriptor d;
    d.id = "M";
    d.kind = CarrierKind::right_module;
    d.construction = Construction::product;
    d.components = {r, r};
    d.ring = r;
    return make_carrier(d);
}

Element poly(std::vector<Rational> c) { return Element::polynomial(std::move(c)); }
Element vec(Element a, Element b) { return Element::tuple({std::move(a), std::move(b)}); }
Element mat(long a, long b, long c, long d) { return Element::matrix(2, {a, b, c, d}); }

std::string show(const Witness& w) {
    std::string in;
    for (const auto& e : w.inputs) in += (in.empty() ? "" : ", ") + to_string(e);
    return "inputs (" + in + "), lhs " + to_string(w.lhs) + ", rhs " + to_string(w.rhs) + ", residual " + to_string(w.residual);
}

std::string num(std::uint64_t v) { return std::to_string(v); }

Json run_file(const std::string& name, std::size_t partitions) {
    auto s = parse_scenario(std::string(DFDERIV_SOURCE_DIR) + "/scenarios/" + name);
    RunOptions o;
    o.partitions = partitions;
    return run_scenario(s, o).report;
}

const Json* task(const Json& report, const std::string& id) {
    for (const auto& t : report["tasks"])
        if (t["id"] == id) return &t;
    return nullptr;
}

} // namespace

int main() {
    const auto qx = build("R", Construction::polynomial, ScalarDomain::rationals());
    const auto m = pair_of(qx);
    const Element x = poly({0, 1});
    const Element xx = vec(x, x);

    criterion(1, "composite of two (delta,f)-derivations on Q[x]^2 fails at ([x; x], x)", 1.0, [&](Outcome& o) {
        const auto delta1 = formal_derivative(qx), delta2 = scaled_derivative(qx, 1);
        const auto f1 = pair_identity(m), f2 = pair_scaling(m, 1, 1);
        const auto d1 = d_example(m, DExample::d1_ex21), d2 = d_example(m, DExample::d2_ex21, 1);
        CheckOptions c;
        c.require_derivation = false;
        c.focus = {{xx, x}};
        const auto comp = check_df_derivation(map_compose(d1, d2), map_compose(delta1, delta2), map_compose(f1, f2), c);
        o.require(!comp.pass, "composite check FAILS");
        if (!comp.witnesses.empty()) {
            const auto& w = comp.witnesses.front();
            const bool exact = w.inputs == std::vector<Element>{xx, x} && w.lhs == vec(poly({2, 2}), poly({0, 2})) && w.rhs == vec(x, x);
            o.require(exact, "witness m = [x; x], a = x, lhs [2+2x; 2x], rhs [x; x]: " + show(w));
        }
        const auto r1 = check_df_derivation(d1, delta1, f1);
        o.require(r1.pass && r1.strategy == "probe-complete", "(d1, delta1, f1) passes probe-complete at degree 8 (" + num(r1.inputs_tested) + " inputs)");
        const auto r2 = check_df_derivation(d2, delta2, f2);
        o.require(r2.pass, "(d2, delta2, f2) passes" +
                               (r2.witnesses.empty() ? std::string() : "; first failure " + show(r2.witnesses.front()) + ", " + num(r2.failures) + " failing inputs"));
    });

    criterion(2, "d1 gamma is not a module endomorphism of Q[x]^2", 1.0, [&](Outcome& o) {
        CheckOptions c;
        c.focus = {{xx, x}};
        const auto r = check_endomorphism(map_compose(d_example(m, DExample::d1_ex21), gamma_mix(m)), c);
        o.require(!r.pass, "endomorphism check FAILS");
        if (!r.witnesses.empty()) {
            const auto& w = r.witnesses.front();
            o.require(w.inputs == std::vector<Element>{xx, x} && w.lhs == vec(poly({0, 10}), poly({0, 2})) && w.rhs == vec(poly({0, 5}), x),
                      "witness at ([x; x], x): " + show(w));
        }
    });

    criterion(3, "inclusions of the vanishing-second-entry submodule and the projected mixing map", 2.0, [&](Outcome& o) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto rep = run_file("example_2_3.json", 1);
        for (const char* id : {"d1_into_L", "d2_into_L"}) {
            const auto* t = task(rep, id);
            o.require(t && (*t)["verdict"] == "PASS", std::string(id) + " holds on the full probe set");
        }
        const auto* c = task(rep, "deltas_into_colon");
        o.require(c && (*c)["verdict"] == "FAIL", "delta1 delta2 does not land in (L:M)");
        const auto* e = task(rep, "deltas_at_x2");
        o.require(e && (*e)["result"]["value"] == Json::parse("[[2, 1]]"), "delta1 delta2 (x^2) = 2");
        const double s1 = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(s1 < 1.0, "first part under 1 s (" + std::to_string(s1) + " s)");
        const auto t1 = std::chrono::steady_clock::now();
        const auto v = map_compose(d_example(m, DExample::d1_ex23), gamma_mix_projected(m))(vec(x, poly({})));
        o.require(v == vec(poly({2}), poly({})), "d1 gamma([x; 0]) = [2; 0], got " + to_string(v));
        const double s2 = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
        o.require(s2 < 1.0, "second part under 1 s (" + std::to_string(s2) + " s)");
    });

    criterion(4, "right multiplication by B0 is a Jordan (ad B0, -id)-derivation of M2(Q)", 5.0, [&](Outcome& o) {
        const auto s = build("S", Construction::matrix, ScalarDomain::rationals(), CarrierKind::algebra);
        std::mt19937_64 rng(3301);
        std::size_t passed = 0;
        for (int k = 0; k < 20; ++k) {
            auto e = [&] { return long(rng() % 5) - 2; };
            const long a = e(), b = e(), c = e(), d = e();
            const auto b0 = mat(a, b, c, d);
            const auto r = check_jordan_df_derivation(right_mult_into(s, s, b0), inner_derivation(s, b0), negation(s, s));
            if (r.pass && r.strategy == "probe-complete") ++passed;
            else o.require(false, "B0 = " + to_string(b0));
        }
        o.require(passed == 20, num(passed) + " of 20 seeded B0 pass probe-complete");
        const auto b0 = mat(0, 1, 0, 0);
        const auto D = right_mult_into(s, s, b0);
        const auto delta = inner_derivation(s, b0);
        const auto f = negation(s, s);
        const auto [lhs, rhs] = evaluate_law("jordan", D, &f, &delta, {mat(1, 0, 0, 0)});
        o.require(lhs == b0 && rhs == b0, "A = E11: lhs " + to_string(lhs) + ", rhs " + to_string(rhs));
    });

    const auto s3 = build("S", Construction::matrix, ScalarDomain::modular(3), CarrierKind::algebra);
    const auto inner = inner_derivation_family(s3);
    const auto id3 = identity_map(s3);

    criterion(5, "enumeration counts on M2(Z3)", 300.0, [&](Outcome& o) {
        const auto ders = enumerate_additive_maps({s3, s3, {}, {Constraint::derivation()}});
        o.require(ders.count == 27 && ders.complete, "derivations = " + num(ders.count) + " (expected 27)");
        o.require(inner.size() == 27, "inner derivations = " + num(inner.size()));
        std::size_t df_ok = 0, cross_ok = 0, jordan_ok = 0;
        DfEnumerationOptions raw;
        raw.force_search = true;
        raw.keep_maps = false;
        for (const auto& d : inner) {
            df_ok += enumerate_df_derivations(d.map, id3).count == 81;
            cross_ok += enumerate_df_derivations(d.map, id3, raw).count == 81;
            DfEnumerationOptions j;
            j.keep_maps = false;
            jordan_ok += enumerate_jordan_df_derivations(d.map, id3, j).count == 81;
        }
        o.require(df_ok == 27, "(delta, id)-derivations = 81 for " + num(df_ok) + " of 27 inner delta (closed form)");
        o.require(cross_ok == 27, "raw search agrees for " + num(cross_ok) + " of 27");
        o.require(jordan_ok == 27, "Jordan (delta, id)-derivations = 81 for " + num(jordan_ok) + " of 27");
    });

    criterion(6, "composition oracles on M = R = M2(Z3)", 600.0, [&](Outcome& o) {
        const auto fam = df_family(s3, inner, {{"id", id3}});
        const auto res = posner_oracles("M2(Z3)", fam);
        o.require(fam.triples.size() == 27 * 81, "exhaustive family of " + num(fam.triples.size()) + " triples");
        o.require(res.composition.counterexample_count == 0, "biconditional counterexamples = " + num(res.composition.counterexample_count));
        std::string why;
        if (!res.ring.counterexamples.empty()) why = "; first: " + res.ring.counterexamples.front().first + " | " + res.ring.counterexamples.front().second;
        o.require(res.ring.counterexample_count == 0, "\"d1 = 0 or d2 = 0\" counterexamples = " + num(res.ring.counterexample_count) + why);
        const auto sampled = posner_sampled("M2(Z3)", s3, inner, unit_left_mult_family(s3), 100000, 6001);
        o.require(sampled.composition.counterexample_count == 0, "sampled biconditional counterexamples = " + num(sampled.composition.counterexample_count));
        o.require(sampled.ring.counterexample_count == 0, "sampled \"d1 = 0 or d2 = 0\" counterexamples = " + num(sampled.ring.counterexample_count));
    });

    criterion(7, "prime-submodule trichotomy on upper-triangular 2x2 matrices over Z3", 300.0, [&](Outcome& o) {
        const auto t = build("T", Construction::upper_triangular, ScalarDomain::modular(3));
        const auto fam = df_family(t, derivation_family(t), unit_left_mult_family(t));
        const auto strict = Substructure::generated(t, {mat(0, 1, 0, 0)}, Side::right);
        bool refused = false;
        try {
            creedon_oracle("T2(Z3)", fam, strict);
        } catch (const Error& e) {
            refused = e.code() == ErrorCode::hypothesis_failed;
        }
        o.require(refused, "strictly-upper submodule fails primality and is refused");
        const auto l = Substructure::generated(t, {mat(1, 0, 0, 0), mat(0, 1, 0, 0)}, Side::right);
        const auto rep = creedon_oracle("T2(Z3)", fam, l);
        bool hyps = !rep.hypotheses.empty();
        for (const auto& h : rep.hypotheses) hyps = hyps && h.holds();
        o.require(hyps, "L = {a22 = 0}: prime and M/L 2-torsion-free");
        o.require(rep.counterexample_count == 0, "trichotomy counterexamples = " + num(rep.counterexample_count) + " (skipped " +
                                                     num(rep.tally_of("antecedent fails (skipped)")) + ")");
    });

    criterion(8, "Jordan (delta,f)-derivations of M2(Z3) are (delta,f)-derivations", 900.0, [&](Outcome& o) {
        const auto fs = central_scaling_family(s3, s3);
        o.require(fs.size() == 3, "central scalings = " + num(fs.size()));
        const auto rep = jordan_implies_derivation_oracle("M2(Z3)", inner, fs);
        o.require(rep.counterexample_count == 0, "Jordan maps failing the (delta,f)-law = " + num(rep.counterexample_count));
        o.require(rep.tally_of("Jordan maps") == rep.tally_of("(delta,f)-derivations") && rep.tally_of("Jordan maps") > 0,
                  "class counts " + num(rep.tally_of("Jordan maps")) + " = " + num(rep.tally_of("(delta,f)-derivations")));
    });

    criterion(9, "lemma suite on M2(Z3) (exhaustive) and M2(Q) (probe)", 600.0, [&](Outcome& o) {
        std::vector<LemmaContext> ctx;
        for (const auto& b : s3->enumerate())
            ctx.push_back({"right_mult " + to_string(b), BracketContext(right_mult_into(s3, s3, b), inner_derivation(s3, b), negation(s3, s3))});
        for (const auto& delta : {zero_map(s3, s3), inner_derivation(s3, mat(1, 0, 0, 0))}) {
            DfEnumerationOptions j;
            const auto maps = enumerate_jordan_df_derivations(delta, id3, j).maps("D");
            for (const auto& D : maps) ctx.push_back({D.name() + " for " + delta.name(), BracketContext(D, delta, id3)});
        }
        const auto sq = build("SQ", Construction::matrix, ScalarDomain::rationals(), CarrierKind::algebra, {{Fact::two_torsion_free, "Q has characteristic 0"}});
        std::vector<LemmaContext> qctx;
        std::mt19937_64 rng(9001);
        for (int k = 0; k < 20; ++k) {
            auto e = [&] { return long(rng() % 5) - 2; };
            const long a = e(), b = e(), c = e(), d = e();
            const auto b0 = mat(a, b, c, d);
            qctx.push_back({"right_mult " + to_string(b0), BracketContext(right_mult_into(sq, sq, b0), inner_derivation(sq, b0), negation(sq, sq))});
        }
        for (const auto& [label, rep] : {std::pair{std::string("M2(Z3)"), lemma_suite("M2(Z3)", ctx)}, std::pair{std::string("M2(Q)"), lemma_suite("M2(Q)", qctx)}}) {
            std::map<std::string, std::array<std::uint64_t, 3>> per;
            for (const auto& v : rep.lemmas) {
                if (!v.gating) continue;
                auto& c = per[v.lemma];
                c[v.skipped ? 2 : (v.pass() ? 0 : 1)]++;
            }
            for (const auto& [lemma, c] : per)
                o.require(c[1] == 0, label + " " + lemma + ": " + num(c[0]) + " pass, " + num(c[1]) + " fail, " + num(c[2]) + " skipped");
        }
        const auto z6 = build("Z6", Construction::modular, ScalarDomain::modular(6));
        const auto t = build("T", Construction::upper_triangular, ScalarDomain::modular(3));
        const auto ip = ideal_prime_scan("finite", {t, z6, s3, pair_of(z6)});
        o.require(ip.pass(), "(L:M) prime for every prime submodule L (" + num(ip.tally_of("prime submodules")) + " checked)");
    });

    criterion(10, "negative controls", 1.0, [&](Outcome& o) {
        const auto s2 = build("S2", Construction::matrix, ScalarDomain::modular(2), CarrierKind::algebra);
        const auto tf = is_two_torsion_free(s2);
        o.require(tf.verdict == Verdict::fails && !tf.witness.empty(), "M2(Z2) has 2-torsion, witness " + (tf.witness.empty() ? "-" : to_string(tf.witness[0])));
        auto s = parse_scenario(std::string(DFDERIV_SOURCE_DIR) + "/scenarios/negative_m2z2.json");
        const auto r = run_scenario(s);
        o.require(r.exit_code == exit_hypothesis, "every oracle on M2(Z2) exits with status " + std::to_string(r.exit_code));
        for (const auto& t : r.report["tasks"]) {
            if (t["type"] == "fact") continue;
            o.require(t["verdict"] == "ERROR" && t["error"]["code"] == "HypothesisFailed", t["id"].get<std::string>() + " refused");
        }
        bool refuted = false;
        try {
            build("Z4", Construction::modular, ScalarDomain::modular(4), CarrierKind::ring, {{Fact::two_torsion_free, "claimed"}});
        } catch (const Error& e) {
            refuted = e.code() == ErrorCode::declared_fact_refuted;
        }
        o.require(refuted, "Z/4 declared two_torsion_free raises DeclaredFactRefuted");
    });

    criterion(11, "reports independent of worker partitions", 900.0, [&](Outcome& o) {
        for (const char* f : {"enumeration_m2z3.json", "posner_m2z3.json", "creedon_t2z3.json", "jordan_m2z3.json", "lemma_suite_m2z3.json"}) {
            const auto a = strip_timing(run_file(f, 1)).dump();
            const auto b = strip_timing(run_file(f, 2)).dump();
            o.require(a == b, std::string(f) + ": partitions 1 and 2 byte-identical (" + std::to_string(a.size()) + " bytes)");
        }
    });

    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed")) << "\n";
    return failures ? 1 : 0;
}
