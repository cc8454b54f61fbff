#include "support.hpp"

using namespace dft;

namespace {

/** Table of an independently computed map over the library's enumeration order. */
template <class F>
std::vector<Index> table_of(const CarrierPtr& s, F&& f) {
    std::vector<Index> t;
    for (const auto& x : s->enumerate()) {
        Mod2 m{{long(numerator(x.entries[0])), long(numerator(x.entries[1])), long(numerator(x.entries[2])), long(numerator(x.entries[3]))}, 3};
        t.push_back(s->index(f(m).element()));
    }
    return t;
}

} // namespace

TEST(Enumeration, DerivationsOfM2Z3AreTheInnerOnes) {
    const auto s = m2(3);
    // Independent count: distinct commutator maps A -> BA - AB.
    std::set<std::vector<Index>> inner;
    for (const auto& b : all_mod2(3)) inner.insert(table_of(s, [&](const Mod2& a) { return b * a - a * b; }));
    EXPECT_EQ(inner.size(), 27u);
    const auto res = enumerate_additive_maps({s, s, {}, {Constraint::derivation()}});
    EXPECT_TRUE(res.complete);
    EXPECT_EQ(res.count, inner.size());
    std::set<std::vector<Index>> found(res.tables.begin(), res.tables.end());
    EXPECT_EQ(found, inner);
}

TEST(Enumeration, DfDerivationsMatchClosedFormAndRawSearch) {
    const auto s = m2(3);
    const auto id = identity_map(s);
    for (const auto& b : {Mod2{{0, 1, 0, 0}, 3}, Mod2{{1, 2, 1, 0}, 3}}) {
        const auto delta = inner_derivation(s, b.element());
        std::set<std::vector<Index>> expected;
        for (const auto& t : all_mod2(3)) expected.insert(table_of(s, [&](const Mod2& a) { return t * a + (b * a - a * b); }));
        EXPECT_EQ(expected.size(), 81u);
        const auto closed = enumerate_df_derivations(delta, id);
        EXPECT_EQ(closed.method, "cyclic closed form");
        DfEnumerationOptions raw;
        raw.force_search = true;
        const auto search = enumerate_df_derivations(delta, id, raw);
        EXPECT_EQ(search.method, "generator search");
        EXPECT_EQ(closed.count, 81u);
        EXPECT_EQ(search.count, 81u);
        EXPECT_EQ(std::set<std::vector<Index>>(closed.tables.begin(), closed.tables.end()), expected);
        EXPECT_EQ(std::set<std::vector<Index>>(search.tables.begin(), search.tables.end()), expected);
    }
}

TEST(Enumeration, JordanCountEqualsDfCountOnPrimeInstance) {
    const auto s = m2(3);
    const auto id = identity_map(s);
    for (const auto& b : {mat(0, 0, 0, 0), mat(0, 1, 0, 0), mat(1, 1, 2, 0)}) {
        const auto delta = inner_derivation(s, b);
        const auto df = enumerate_df_derivations(delta, id);
        const auto jd = enumerate_jordan_df_derivations(delta, id);
        EXPECT_EQ(jd.count, 81u);
        EXPECT_EQ(std::set<std::vector<Index>>(df.tables.begin(), df.tables.end()),
                  std::set<std::vector<Index>>(jd.tables.begin(), jd.tables.end()));
    }
}

TEST(Enumeration, JordanStreamContainsDfStream) {
    const auto t = t2(3);
    const auto id = identity_map(t);
    for (const auto& b : {mat(0, 1, 0, 0), mat(1, 0, 0, 2)}) {
        const auto delta = inner_derivation(t, b);
        const auto df = enumerate_df_derivations(delta, id);
        const auto jd = enumerate_jordan_df_derivations(delta, id);
        const std::set<std::vector<Index>> js(jd.tables.begin(), jd.tables.end());
        for (const auto& d : df.tables) EXPECT_TRUE(js.count(d));
        EXPECT_GE(jd.count, df.count);
    }
}

TEST(Enumeration, CompletenessAudit) {
    const auto s = m2(3);
    const auto id = identity_map(s);
    const Mod2 b{{2, 1, 0, 1}, 3};
    const auto delta = inner_derivation(s, b.element());
    DfEnumerationOptions raw;
    raw.force_search = true;
    const auto res = enumerate_df_derivations(delta, id, raw);
    const std::set<std::vector<Index>> stream(res.tables.begin(), res.tables.end());
    const auto all = all_mod2(3);
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const auto& t = all[rng() % all.size()];
        const auto d = table_of(s, [&](const Mod2& a) { return t * a + (b * a - a * b); });
        ASSERT_TRUE(stream.count(d)) << "trial " << trial;
    }
}

TEST(Enumeration, CountsAndOrderIndependentOfPartitions) {
    const auto s = m2(3);
    const auto delta = inner_derivation(s, mat(0, 1, 0, 0));
    const auto id = identity_map(s);
    DfEnumerationOptions one, three;
    one.force_search = three.force_search = true;
    three.partitions = 3;
    const auto a = enumerate_df_derivations(delta, id, one);
    const auto b = enumerate_df_derivations(delta, id, three);
    EXPECT_EQ(a.count, b.count);
    EXPECT_EQ(a.examined, b.examined);
    EXPECT_EQ(a.tables, b.tables);
    const auto c = enumerate_df_derivations(delta, id, one);
    EXPECT_EQ(a.tables, c.tables);
}

TEST(Enumeration, ModuleEndomorphismsOfCyclicModule) {
    const auto z = modular(6);
    const auto res = enumerate_additive_maps({z, z, {}, {Constraint::module_hom()}});
    EXPECT_EQ(res.count, 6u);
    const auto m = pair_module(modular(2));
    // End of (Z2)^2 over Z2: all 2x2 matrices over Z2.
    EXPECT_EQ(enumerate_additive_maps({m, m, {}, {Constraint::module_hom()}}).count, 16u);
}

TEST(Enumeration, FixedValuesNarrowTheStream) {
    const auto s = m2(3);
    const auto res = enumerate_additive_maps(
        {s, s, {}, {Constraint::derivation(), Constraint::fixed_values({{mat(1, 0, 0, 0), mat(0, 0, 0, 0)}, {mat(0, 0, 0, 1), s->zero()}})}});
    // Derivations vanishing on E11 and E22 are ad(B) with B diagonal: 3 distinct maps.
    EXPECT_EQ(res.count, 3u);
}

TEST(Enumeration, BudgetExceededCarriesPartialResult) {
    const auto s = m2(3);
    EnumerationSpec spec{s, s, {}, {Constraint::derivation()}};
    spec.budget = 10;
    try {
        enumerate_additive_maps(spec);
        FAIL() << "expected BudgetExceeded";
    } catch (const BudgetExceeded& e) {
        EXPECT_EQ(e.code(), ErrorCode::budget_exceeded);
        EXPECT_FALSE(e.partial().complete);
    }
}

TEST(Enumeration, InfiniteCarriersAreRefused) {
    const auto r = qx();
    try {
        enumerate_df_derivations(formal_derivative(r), identity_map(r));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::not_finite);
    }
}
