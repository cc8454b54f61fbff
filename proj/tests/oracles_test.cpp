#include "support.hpp"

using namespace dft;

namespace {

/** Independent integer model of R = M2(Z3) acting on itself, elements coded 0..80. */
struct IntModel {
    std::vector<Mod2> el = all_mod2(3);
    std::vector<int> mul, add;
    IntModel() {
        mul.resize(81 * 81);
        add.resize(81 * 81);
        for (int i = 0; i < 81; ++i)
            for (int j = 0; j < 81; ++j) {
                mul[i * 81 + j] = code(el[i] * el[j]);
                add[i * 81 + j] = code(el[i] + el[j]);
            }
    }
    static int code(const Mod2& m) { return int(m.e[0] * 27 + m.e[1] * 9 + m.e[2] * 3 + m.e[3]); }
};

struct Triple {
    std::vector<int> delta, d;
    bool zero = false, endo = false;
};

/** The 27 inner derivations times the 81 maps a -> t a + ad_B(a). */
std::vector<Triple> model_family(const IntModel& m) {
    std::set<std::vector<int>> seen;
    std::vector<Triple> out;
    for (const auto& b : m.el) {
        std::vector<int> ad(81);
        for (int a = 0; a < 81; ++a) ad[a] = IntModel::code(b * m.el[a] - m.el[a] * b);
        if (!seen.insert(ad).second) continue;
        for (int t = 0; t < 81; ++t) {
            Triple x;
            x.delta = ad;
            x.d.resize(81);
            for (int a = 0; a < 81; ++a) x.d[a] = m.add[m.mul[t * 81 + a] * 81 + ad[a]];
            x.zero = std::all_of(x.d.begin(), x.d.end(), [](int v) { return v == 0; });
            x.endo = true;
            for (int p = 0; p < 81 && x.endo; ++p)
                for (int a = 0; a < 81 && x.endo; ++a) x.endo = x.d[m.mul[p * 81 + a]] == m.mul[x.d[p] * 81 + a];
            out.push_back(std::move(x));
        }
    }
    return out;
}

struct ModelTally {
    std::uint64_t holds = 0, d1_zero = 0, d2_zero = 0, both_endo = 0, ring_counterexamples = 0;
};

ModelTally model_posner(const IntModel& m) {
    const auto fam = model_family(m);
    ModelTally t;
    for (const auto& a : fam)
        for (const auto& b : fam) {
            bool ok = true;
            for (int x = 0; x < 81 && ok; ++x)
                for (int r = 0; r < 81 && ok; ++r) {
                    const int lhs = a.d[b.d[m.mul[x * 81 + r]]];
                    const int rhs = m.add[m.mul[a.d[b.d[x]] * 81 + r] * 81 + m.mul[x * 81 + a.delta[b.delta[r]]]];
                    ok = lhs == rhs;
                }
            if (!ok) continue;
            ++t.holds;
            if (a.zero)
                ++t.d1_zero;
            else if (b.zero)
                ++t.d2_zero;
            else if (a.endo && b.endo)
                ++t.both_endo;
            if (!a.zero && !b.zero) ++t.ring_counterexamples;
        }
    return t;
}

DfFamily m2z3_family(std::size_t partitions = 1) {
    const auto r = m2(3);
    return df_family(r, inner_derivation_family(r), {{"id", identity_map(r)}}, partitions);
}

void expect_hypothesis_failed(const std::function<void()>& f) {
    try {
        f();
        FAIL() << "expected HypothesisFailed";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::hypothesis_failed) << e.what();
    }
}

} // namespace

TEST(Oracles, FamilyShapeOnM2Z3) {
    const auto fam = m2z3_family();
    EXPECT_EQ(fam.deltas, 27u);
    EXPECT_EQ(fam.fs, 1u);
    EXPECT_EQ(fam.triples.size(), 27u * 81u);
}

TEST(Oracles, PosnerTalliesMatchIndependentModel) {
    const IntModel model;
    const auto expected = model_posner(model);
    // Frozen from the independent model above.
    EXPECT_EQ(expected.holds, 10773u);
    EXPECT_EQ(expected.d1_zero, 2187u);
    EXPECT_EQ(expected.d2_zero, 2186u);
    EXPECT_EQ(expected.both_endo, 6400u);
    EXPECT_EQ(expected.ring_counterexamples, 6400u);

    const auto res = posner_oracles("M2(Z3)", m2z3_family());
    EXPECT_TRUE(res.composition.pass());
    EXPECT_EQ(res.composition.counterexample_count, 0u);
    EXPECT_EQ(res.composition.tally_of("pairs where the composite law holds"), expected.holds);
    EXPECT_EQ(res.composition.tally_of("branch d1 = 0"), expected.d1_zero);
    EXPECT_EQ(res.composition.tally_of("branch d2 = 0"), expected.d2_zero);
    EXPECT_EQ(res.composition.tally_of("branch both endomorphisms"), expected.both_endo);
    EXPECT_EQ(res.ring.counterexample_count, expected.ring_counterexamples);
    EXPECT_FALSE(res.ring.pass());
}

TEST(Oracles, RingFormCounterexamplesAreNonzeroLeftMultiplications) {
    const auto res = posner_ring_oracle("M2(Z3)", m2z3_family());
    ASSERT_FALSE(res.counterexamples.empty());
    for (const auto& c : res.counterexamples) {
        // Both sides use the zero derivation, so d is left multiplication by d(1).
        EXPECT_NE(c.first.find("delta=ad([[0, 0], [0, 0]])"), std::string::npos) << c.first;
        EXPECT_NE(c.second.find("delta=ad([[0, 0], [0, 0]])"), std::string::npos) << c.second;
    }
}

TEST(Oracles, PosnerTalliesIndependentOfPartitions) {
    const auto a = posner_oracles("M2(Z3)", m2z3_family(1), 1);
    const auto b = posner_oracles("M2(Z3)", m2z3_family(3), 3);
    EXPECT_EQ(strip_timing(report_to_json(a.composition)), strip_timing(report_to_json(b.composition)));
    EXPECT_EQ(strip_timing(report_to_json(a.ring)), strip_timing(report_to_json(b.ring)));
}

TEST(Oracles, SampledPosnerIsSeededAndDeterministic) {
    const auto r = m2(3);
    const auto deltas = inner_derivation_family(r);
    const auto units = unit_left_mult_family(r);
    EXPECT_EQ(units.size(), 48u);
    const auto a = posner_sampled("M2(Z3)", r, deltas, units, 2000, 17);
    const auto b = posner_sampled("M2(Z3)", r, deltas, units, 2000, 17);
    EXPECT_EQ(a.composition.counterexample_count, 0u);
    EXPECT_EQ(strip_timing(report_to_json(a.ring)), strip_timing(report_to_json(b.ring)));
    const auto c = posner_sampled("M2(Z3)", r, deltas, units, 2000, 18);
    EXPECT_NE(report_to_json(a.composition)["tallies"], report_to_json(c.composition)["tallies"]);
}

TEST(Oracles, CreedonTrichotomyOnTriangularMatrices) {
    const auto t = t2(3);
    const auto l = Substructure::generated(t, {mat(1, 0, 0, 0), mat(0, 1, 0, 0)}, Side::right);
    const auto fam = df_family(t, derivation_family(t), unit_left_mult_family(t));
    const auto rep = creedon_oracle("T2(Z3)", fam, l);
    EXPECT_TRUE(rep.pass());
    for (const auto& h : rep.hypotheses) EXPECT_TRUE(h.holds()) << h.predicate;
    EXPECT_EQ(rep.tally_of("antecedent fails (skipped)"), 3779136u);
    EXPECT_EQ(rep.tally_of("branch d1(M) in L"), 2834352u);
    EXPECT_EQ(rep.tally_of("branch d2(M) in L"), 1889568u);
    EXPECT_EQ(rep.tally_of("branch deltas into (L:M)"), 0u);
}

TEST(Oracles, CreedonRefusesNonPrimeSubmodule) {
    const auto t = t2(3);
    const auto strict = Substructure::generated(t, {mat(0, 1, 0, 0)}, Side::right);
    const auto fam = df_family(t, derivation_family(t), unit_left_mult_family(t));
    expect_hypothesis_failed([&] { creedon_oracle("T2(Z3)", fam, strict); });
}

TEST(Oracles, JordanMapsAreDfDerivations) {
    const auto s = m2(3);
    const auto rep = jordan_implies_derivation_oracle("M2(Z3)", inner_derivation_family(s), central_scaling_family(s, s));
    EXPECT_TRUE(rep.pass());
    EXPECT_EQ(rep.tally_of("Jordan maps"), 6561u);
    EXPECT_EQ(rep.tally_of("(delta,f)-derivations"), 6561u);
}

TEST(Oracles, ColonOfPrimeSubmoduleIsPrime) {
    const auto rep = ideal_prime_scan("small", {t2(3), modular(6), m2(3)});
    EXPECT_TRUE(rep.pass());
    EXPECT_EQ(rep.tally_of("prime submodules"), 9u);
}

TEST(Oracles, EndomorphismCorollaries) {
    const auto [iff, zero] = endomorphism_corollaries("M2(Z3)", m2z3_family());
    EXPECT_TRUE(iff.pass());
    EXPECT_TRUE(zero.pass());
    EXPECT_EQ(iff.tally_of("composite is an endomorphism") + iff.tally_of("composite is not an endomorphism"), 2187u * 81u);
}

TEST(Oracles, PrimeIdealCorollaryCounterexamplesAreZeroDivisorPairs) {
    const auto r = m2(3);
    const auto rep = prime_ideal_corollary("M2(Z3)", m2z3_family(), Substructure::zero(r, Side::two_sided));
    // Left multiplications by nonzero t1, t2 with t1 t2 = 0: 32 rank-one t1, 8 nonzero t2 each.
    std::uint64_t independent = 0;
    for (const auto& a : all_mod2(3))
        for (const auto& b : all_mod2(3)) {
            const Mod2 z{{0, 0, 0, 0}, 3};
            if (!(a == z) && !(b == z) && a * b == z) ++independent;
        }
    EXPECT_EQ(independent, 256u);
    EXPECT_EQ(rep.counterexample_count, independent);
}

TEST(Oracles, TwoTorsionInstanceIsRefusedEverywhere) {
    const auto r = m2(2);
    const auto deltas = inner_derivation_family(r);
    const std::vector<NamedMap> ids{{"id", identity_map(r)}};
    const auto fam = df_family(r, deltas, ids);
    expect_hypothesis_failed([&] { posner_composition_oracle("M2(Z2)", fam); });
    expect_hypothesis_failed([&] { posner_ring_oracle("M2(Z2)", fam); });
    expect_hypothesis_failed([&] { posner_sampled("M2(Z2)", r, deltas, unit_left_mult_family(r), 10, 1); });
    expect_hypothesis_failed([&] { creedon_oracle("M2(Z2)", fam, Substructure::generated(r, {mat(1, 0, 0, 0)}, Side::right)); });
    expect_hypothesis_failed([&] { jordan_implies_derivation_oracle("M2(Z2)", deltas, central_scaling_family(r, r)); });
    expect_hypothesis_failed([&] { endomorphism_corollaries("M2(Z2)", fam); });
    expect_hypothesis_failed([&] { prime_ideal_corollary("M2(Z2)", fam, Substructure::zero(r, Side::two_sided)); });
}

TEST(Oracles, FamilyRejectsNonDerivations) {
    const auto r = m2(3);
    expect_hypothesis_failed([&] { df_family(r, {{"id", identity_map(r)}}, {{"id", identity_map(r)}}); });
    expect_hypothesis_failed([&] { df_family(r, inner_derivation_family(r), {{"zero", zero_map(r, r)}}); });
}
