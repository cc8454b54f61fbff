#include "support.hpp"

using namespace dft;

namespace {

BracketContext right_mult_context(const CarrierPtr& s, const Element& b0) {
    return BracketContext(right_mult_into(s, s, b0), inner_derivation(s, b0), negation(s, s));
}

const LemmaVerdict* find(const OracleReport& r, const std::string& lemma) {
    for (const auto& v : r.lemmas)
        if (v.lemma == lemma) return &v;
    return nullptr;
}

} // namespace

TEST(Jordan, ProductAndAction) {
    const auto s = m2(3);
    const auto a = mat(1, 1, 0, 0), b = mat(0, 0, 1, 0);
    EXPECT_EQ(jordan_product(*s, a, b), s->add(s->mul(a, b), s->mul(b, a)));
    EXPECT_EQ(jordan_action(*s, a, b), s->add(s->mul(a, b), s->mul(b, a)));
}

TEST(Jordan, BracketIsBiadditive) {
    const auto s = m2(3);
    const auto ctx = right_mult_context(s, mat(0, 1, 2, 1));
    const auto es = s->enumerate();
    std::mt19937_64 rng(3);
    for (int k = 0; k < 400; ++k) {
        const auto& x = es[rng() % es.size()];
        const auto& y = es[rng() % es.size()];
        const auto& z = es[rng() % es.size()];
        ASSERT_EQ(ctx.bracket(s->add(x, y), z), s->add(ctx.bracket(x, z), ctx.bracket(y, z)));
        ASSERT_EQ(ctx.bracket(x, s->add(y, z)), s->add(ctx.bracket(x, y), ctx.bracket(x, z)));
    }
}

TEST(Jordan, BracketVanishesForDfDerivations) {
    const auto s = m2(3);
    const auto delta = inner_derivation(s, mat(1, 0, 0, 0));
    const BracketContext ctx(delta, delta, identity_map(s));
    for (const auto& x : s->enumerate())
        for (const auto& y : s->enumerate()) ASSERT_EQ(ctx.bracket(x, y), s->zero());
}

TEST(Jordan, RightMultiplicationFamilyIsJordan) {
    const auto s = m2(3);
    for (const auto& b : s->enumerate()) EXPECT_TRUE(right_mult_context(s, b).is_jordan()) << to_string(b);
}

TEST(Jordan, ActionLawImpliesJordanLaw) {
    const auto s = m2(3);
    for (const auto& b : s->enumerate()) {
        const auto ctx = right_mult_context(s, b);
        if (ctx.satisfies_action_law()) EXPECT_TRUE(ctx.is_jordan());
    }
    const auto delta = inner_derivation(s, mat(0, 1, 0, 0));
    for (const auto& d : enumerate_jordan_df_derivations(delta, identity_map(s)).maps("D")) {
        const BracketContext ctx(d, delta, identity_map(s));
        if (ctx.satisfies_action_law()) EXPECT_TRUE(ctx.is_jordan());
    }
}

TEST(Jordan, SymmetryResidualIsCommutatorTimesX) {
    // With D = right mult by B0, delta = ad B0, f = -id: D(y)x + f(y)d(x) - yD(x) - d(y)f(x) = (B0 y - y B0) x.
    const auto s = m2(3);
    const Mod2 b0{{0, 1, 0, 0}, 3};
    const auto ctx = right_mult_context(s, b0.element());
    std::size_t nonzero = 0;
    for (const auto& x : all_mod2(3))
        for (const auto& y : all_mod2(3)) {
            const auto expected = ((b0 * y - y * b0) * x).element();
            const auto r = ctx.lemma_residual(LemmaId::L32, {x.element(), y.element()});
            ASSERT_EQ(r[0], expected);
            nonzero += !(expected == s->zero());
        }
    EXPECT_GT(nonzero, 0u);
}

TEST(Jordan, HypothesisUnmetIsReported) {
    const auto s = m2(3);
    const auto ctx = right_mult_context(s, mat(0, 1, 0, 0));
    try {
        ctx.lemma_residual(LemmaId::L38, {mat(1, 0, 0, 0), mat(1, 0, 0, 0)});
        FAIL() << "expected HypothesisUnmet";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::hypothesis_unmet);
    }
    EXPECT_EQ(ctx.lemma_residual(LemmaId::C331, {mat(1, 0, 0, 0), mat(0, 0, 0, 1)}).size(), 2u);
}

TEST(Jordan, LemmaIdsRoundTrip) {
    for (auto id : all_lemmas) EXPECT_EQ(lemma_from_name(lemma_name(id)), id);
    try {
        lemma_from_name("L99");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::unknown_lemma);
    }
}

TEST(Jordan, LemmaChainVanishesOnJordanContexts) {
    const auto s = m2(3);
    std::vector<LemmaContext> ctxs;
    for (const auto& b : {mat(0, 1, 0, 0), mat(1, 2, 0, 1), mat(2, 0, 0, 2), mat(1, 1, 1, 0)})
        ctxs.push_back({"right_mult " + to_string(b), right_mult_context(s, b)});
    const auto rep = lemma_suite("M2(Z3)", ctxs);
    for (const char* id : {"L33", "L34", "L35", "L36a", "L36b", "L37", "L38", "L39", "L314", "T331a", "T331b", "C331-proof", "L310", "L311",
                           "L312", "L313"}) {
        std::size_t seen = 0;
        for (const auto& v : rep.lemmas)
            if (v.lemma == id) {
                ++seen;
                EXPECT_FALSE(v.skipped) << id << " " << v.context;
                EXPECT_TRUE(v.pass()) << id << " " << v.context;
            }
        EXPECT_EQ(seen, ctxs.size()) << id;
    }
}

TEST(Jordan, CentralContextsPassEverything) {
    const auto s = m2(3);
    const auto rep = lemma_suite("M2(Z3)", {{"central", right_mult_context(s, mat(2, 0, 0, 2))}});
    for (const auto& v : rep.lemmas) {
        EXPECT_FALSE(v.skipped) << v.lemma;
        EXPECT_TRUE(v.pass()) << v.lemma;
    }
    EXPECT_TRUE(rep.pass());
}

TEST(Jordan, NonCentralContextFailsSymmetryLemma) {
    const auto s = m2(3);
    const auto rep = lemma_suite("M2(Z3)", {{"E12", right_mult_context(s, mat(0, 1, 0, 0))}});
    const auto* l32 = find(rep, "L32");
    ASSERT_NE(l32, nullptr);
    EXPECT_FALSE(l32->pass());
    EXPECT_FALSE(l32->witnesses.empty());
    const auto* l31 = find(rep, "L31");
    ASSERT_NE(l31, nullptr);
    EXPECT_TRUE(l31->skipped);
    EXPECT_FALSE(rep.pass());
}

TEST(Jordan, SuiteRefusesTwoTorsion) {
    const auto s = m2(2);
    try {
        lemma_suite("M2(Z2)", {{"id", BracketContext(identity_map(s), zero_map(s, s), identity_map(s))}});
        FAIL() << "expected HypothesisFailed";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::hypothesis_failed);
    }
}

TEST(Jordan, SquareZeroElementsLieInP) {
    const auto s = m2(3);
    for (const auto& b : {mat(0, 1, 0, 0), mat(1, 2, 0, 1)}) {
        const auto ctx = right_mult_context(s, b);
        for (const auto& x : s->enumerate())
            if (s->mul(x, x) == s->zero()) EXPECT_TRUE(ctx.in_P(x)) << to_string(x);
    }
}

TEST(Jordan, ProbeModeContextOverRationals) {
    const auto s = carrier("M2Q", Construction::matrix, ScalarDomain::rationals(), CarrierKind::algebra, 2, {{Fact::two_torsion_free, "given"}});
    const auto rep = lemma_suite("M2(Q)", {{"central", right_mult_context(s, mat(1, 0, 0, 1))}});
    for (const auto& v : rep.lemmas) {
        if (v.skipped) continue;
        EXPECT_EQ(v.strategy, "probe-complete") << v.lemma;
        EXPECT_TRUE(v.pass()) << v.lemma;
    }
}
