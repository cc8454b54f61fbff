#include "support.hpp"

using namespace dft;

TEST(Maps, FormalDerivativeValues) {
    const auto r = qx();
    const auto d = formal_derivative(r);
    EXPECT_EQ(d(poly({5, 3, 0, 2})), poly({3, 0, 6}));
    EXPECT_EQ(scaled_derivative(r, 3)(poly({0, 0, 1})), poly({0, 6}));
}

TEST(Maps, GammaMixValues) {
    // gamma([a; b]) = [2a + 3b; a]
    const auto m = pair_module(qx());
    const auto g = gamma_mix(m);
    EXPECT_EQ(g(vec(poly({0, 1}), poly({0, 1}))), vec(poly({0, 5}), poly({0, 1})));
}

TEST(Maps, InnerDerivationValue) {
    const auto s = m2q();
    const auto ad = inner_derivation(s, mat(0, 1, 0, 0));
    // B0 A - A B0 with A = E11
    EXPECT_EQ(ad(mat(1, 0, 0, 0)), mat(0, -1, 0, 0));
}

TEST(Maps, RightMultIntoValue) {
    const auto s = m2q();
    EXPECT_EQ(right_mult_into(s, s, mat(0, 1, 0, 0))(mat(1, 0, 0, 0)), mat(0, 1, 0, 0));
}

TEST(Maps, ConstructorsAreAdditiveOnFiniteCarriers) {
    const auto r = m2(3);
    const Element b = mat(1, 2, 0, 1);
    for (const auto& m : {inner_derivation(r, b), identity_map(r), zero_map(r, r), left_mult(r, b), right_mult(r, b), negation(r, r),
                          right_mult_into(r, r, b), central_scale(r, r, mat(2, 0, 0, 2))}) {
        const auto rep = check_additive(m);
        EXPECT_TRUE(rep.pass) << m.name();
        EXPECT_EQ(rep.strategy, "exhaustive");
    }
}

TEST(Maps, ConstructorsAreAdditiveOnSymbolicCarriers) {
    const auto r = qx();
    const auto m = pair_module(r);
    for (const auto& f : {formal_derivative(r), scaled_derivative(r, 2), identity_map(r)}) EXPECT_TRUE(check_additive(f).pass) << f.name();
    for (const auto& f : {pair_identity(m), pair_scaling(m, 1, 2), project_first(m), gamma_mix(m), gamma_mix_projected(m),
                          d_example(m, DExample::d1_ex21), d_example(m, DExample::d2_ex21), d_example(m, DExample::d1_ex23)}) {
        const auto rep = check_additive(f);
        EXPECT_TRUE(rep.pass) << f.name();
        EXPECT_EQ(rep.strategy, "probe-complete");
    }
}

TEST(Maps, CompositionIsAssociative) {
    const auto r = qx();
    const auto a = formal_derivative(r);
    const auto b = scaled_derivative(r, 2);
    const auto c = left_mult(r, poly({1, 1}));
    const auto eq = maps_equal(map_compose(map_compose(a, b), c), map_compose(a, map_compose(b, c)));
    EXPECT_TRUE(eq.equal);
    EXPECT_EQ(eq.strategy, "probe-complete");
}

TEST(Maps, MapsEqualReportsWitness) {
    const auto r = qx();
    const auto eq = maps_equal(formal_derivative(r), scaled_derivative(r, 2));
    ASSERT_FALSE(eq.equal);
    ASSERT_TRUE(eq.witness);
    EXPECT_NE(*eq.left_value, *eq.right_value);
}

TEST(Maps, ProbeBasisEqualityExtendsToRandomPolynomials) {
    // Coefficientwise-linear rules that agree on monomials agree everywhere within the degree bound.
    const auto r = qx();
    const auto a = map_add(formal_derivative(r), formal_derivative(r));
    const auto b = scaled_derivative(r, 2);
    std::mt19937_64 rng(11);
    for (int k = 0; k < 200; ++k) {
        std::vector<Rational> c;
        for (int i = 0; i <= 8; ++i) c.push_back(Rational(long(rng() % 21) - 10, long(rng() % 5) + 1));
        ASSERT_EQ(a(poly(c)), b(poly(c)));
    }
}

TEST(Maps, AddAndNegateCancel) {
    const auto r = m2(3);
    const auto ad = inner_derivation(r, mat(0, 1, 1, 0));
    EXPECT_TRUE(maps_equal(map_add(ad, map_negate(ad)), zero_map(r, r)).equal);
}

TEST(Maps, TableBackedMapsMatchRuleBackedMaps) {
    const auto r = m2(3);
    const auto ad = inner_derivation(r, mat(1, 1, 0, 2));
    const auto t = AdditiveMap::from_indices("t", r, r, ad.table());
    EXPECT_TRUE(t.table_backed());
    EXPECT_TRUE(maps_equal(t, ad).equal);
}

TEST(Maps, FromPairsRejectsIncompleteTables) {
    const auto r = modular(3);
    try {
        AdditiveMap::from_pairs("p", r, r, {{Element::scalar(0), Element::scalar(0)}});
        FAIL() << "expected MalformedDescriptor";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::malformed_descriptor);
    }
}

TEST(Maps, CompositionChecksCarriers) {
    try {
        map_compose(identity_map(m2(3)), identity_map(qx()));
        FAIL() << "expected CarrierMismatch";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::carrier_mismatch);
    }
}
