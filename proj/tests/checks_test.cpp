#include "support.hpp"

using namespace dft;

namespace {

/** Dense integer polynomials, lowest degree first; independent of the library. */
using P = std::vector<long>;

P trim(P a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}
P padd(const P& a, const P& b) {
    P c(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) c[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] += b[i];
    return trim(c);
}
P pmul(const P& a, const P& b) {
    if (a.empty() || b.empty()) return {};
    P c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return trim(c);
}
P pder(const P& a) {
    P c;
    for (std::size_t i = 1; i < a.size(); ++i) c.push_back(long(i) * a[i]);
    return trim(c);
}
Element el(const P& a) {
    std::vector<Rational> c(a.begin(), a.end());
    return Element::polynomial(std::move(c));
}

struct Pair {
    P a, b;
};
Element el(const Pair& v) { return vec(el(v.a), el(v.b)); }

// Example maps with p = q = 1: d1 = (a', b'), d2 = (a' + a, b), delta1 = delta2 = ', f1 = f2 = id.
Pair d1(const Pair& v) { return {pder(v.a), pder(v.b)}; }
Pair d2(const Pair& v) { return {padd(pder(v.a), v.a), v.b}; }
Pair times(const Pair& v, const P& r) { return {pmul(v.a, r), pmul(v.b, r)}; }

struct Example21 {
    CarrierPtr r = qx();
    CarrierPtr m = pair_module(r);
    AdditiveMap delta1 = formal_derivative(r);
    AdditiveMap delta2 = scaled_derivative(r, 1);
    AdditiveMap f1 = pair_identity(m);
    AdditiveMap f2 = pair_scaling(m, 1, 1);
    AdditiveMap map_d1 = d_example(m, DExample::d1_ex21);
    AdditiveMap map_d2 = d_example(m, DExample::d2_ex21, 1);
};

} // namespace

TEST(Checks, FirstExampleMapIsDfDerivation) {
    Example21 e;
    const auto rep = check_df_derivation(e.map_d1, e.delta1, e.f1);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.strategy, "probe-complete");
    EXPECT_GT(rep.inputs_tested, 300u);
}

TEST(Checks, SecondExampleMapFailsWithReproducibleWitness) {
    Example21 e;
    CheckOptions o;
    o.focus = {{vec(poly({}), poly({1})), poly({0, 1})}};
    const auto rep = check_df_derivation(e.map_d2, e.delta2, e.f2, o);
    ASSERT_FALSE(rep.pass);
    const auto& w = rep.witnesses.front();
    // Independent evaluation at m = [0; 1], a = x: d2(m a) = [0; x], d2(m) a + f2(m) a' = [0; x] + [0; 1].
    const Pair m{{}, {1}};
    const P a{0, 1};
    const Pair lhs = d2(times(m, a));
    const Pair rhs{padd(times(d2(m), a).a, times(m, pder(a)).a), padd(times(d2(m), a).b, times(m, pder(a)).b)};
    EXPECT_EQ(w.lhs, el(lhs));
    EXPECT_EQ(w.rhs, el(rhs));
    EXPECT_EQ(w.residual, vec(poly({}), poly({-1})));
}

TEST(Checks, CompositeFailsAtTheExampleWitness) {
    Example21 e;
    CheckOptions o;
    o.require_derivation = false;
    o.focus = {{vec(poly({0, 1}), poly({0, 1})), poly({0, 1})}};
    const auto rep = check_df_derivation(map_compose(e.map_d1, e.map_d2), map_compose(e.delta1, e.delta2), map_compose(e.f1, e.f2), o);
    ASSERT_FALSE(rep.pass);
    const auto& w = rep.witnesses.front();
    const Pair m{{0, 1}, {0, 1}};
    const P a{0, 1};
    const Pair lhs = d1(d2(times(m, a)));
    const Pair dm = d1(d2(m));
    const P da = pder(pder(a));
    const Pair rhs{padd(pmul(dm.a, a), pmul(m.a, da)), padd(pmul(dm.b, a), pmul(m.b, da))};
    EXPECT_EQ(w.inputs, (std::vector<Element>{el(m), el(a)}));
    EXPECT_EQ(w.lhs, el(lhs));
    EXPECT_EQ(w.rhs, el(rhs));
    EXPECT_EQ(w.lhs, vec(poly({2, 2}), poly({0, 2})));
    EXPECT_EQ(w.rhs, vec(poly({0, 1}), poly({0, 1})));
}

TEST(Checks, CompositeDeltaIsNotADerivation) {
    Example21 e;
    try {
        check_df_derivation(map_compose(e.map_d1, e.map_d2), map_compose(e.delta1, e.delta2), map_compose(e.f1, e.f2));
        FAIL() << "expected PrereqFailed";
    } catch (const Error& err) {
        EXPECT_EQ(err.code(), ErrorCode::prereq_failed);
    }
}

TEST(Checks, EndomorphismFailureAtExampleWitness) {
    const auto r = qx();
    const auto m = pair_module(r);
    const auto dg = map_compose(d_example(m, DExample::d1_ex21), gamma_mix(m));
    CheckOptions o;
    o.focus = {{vec(poly({0, 1}), poly({0, 1})), poly({0, 1})}};
    const auto rep = check_endomorphism(dg, o);
    ASSERT_FALSE(rep.pass);
    const auto& w = rep.witnesses.front();
    // gamma([x; x]) = [5x; x]; d1 gamma([x^2; x^2]) = [10x; 2x]; d1 gamma([x; x]) x = [5x; x].
    const Pair g2{{0, 0, 5}, {0, 0, 1}};
    const Pair g1{{0, 5}, {0, 1}};
    EXPECT_EQ(w.lhs, el(d1(g2)));
    EXPECT_EQ(w.rhs, el(times(d1(g1), {0, 1})));
}

TEST(Checks, InclusionExampleValues) {
    const auto r = qx();
    const auto m = pair_module(r);
    // d1 of the inclusion example applied to gamma([x; 0]) = [2x; x] gives [2; 0].
    const auto v = map_compose(d_example(m, DExample::d1_ex23), gamma_mix(m))(vec(poly({0, 1}), poly({})));
    EXPECT_EQ(v, vec(poly({2}), poly({})));
    const auto dd = map_compose(formal_derivative(r), scaled_derivative(r, 1))(poly({0, 0, 1}));
    EXPECT_EQ(dd, el(pder(pder({0, 0, 1}))));
}

TEST(Checks, InnerDerivationsAreDerivations) {
    const auto s = m2(3);
    for (const auto& b : s->enumerate()) EXPECT_TRUE(check_derivation(inner_derivation(s, b)).pass);
    EXPECT_TRUE(check_derivation(formal_derivative(qx())).pass);
}

TEST(Checks, RightMultiplicationIsNotAModuleHomInGeneral) {
    const auto s = m2(3);
    EXPECT_TRUE(check_module_hom(left_mult(s, mat(1, 1, 0, 1))).pass);
    const auto r = check_module_hom(right_mult(s, mat(1, 1, 0, 1)));
    EXPECT_FALSE(r.pass);
    EXPECT_FALSE(r.witnesses.empty());
    EXPECT_TRUE(check_bimodule_hom(negation(m2q(), m2q())).pass);
}

TEST(Checks, DfPassImpliesJordanPass) {
    const auto s = m2(3);
    const auto id = identity_map(s);
    for (const auto& b : {mat(0, 1, 0, 0), mat(1, 2, 0, 1)}) {
        const auto delta = inner_derivation(s, b);
        const auto res = enumerate_df_derivations(delta, id);
        ASSERT_EQ(res.count, 81u);
        for (const auto& d : res.maps("d")) {
            ASSERT_TRUE(check_df_derivation(d, delta, id).pass);
            ASSERT_TRUE(check_jordan_df_derivation(d, delta, id).pass);
        }
    }
}

TEST(Checks, ExhaustiveVerdictIndependentOfPartitions) {
    const auto s = m2(3);
    const auto delta = inner_derivation(s, mat(0, 1, 0, 0));
    const auto d = left_mult(s, mat(1, 1, 0, 2));
    CheckOptions a, b;
    b.partitions = 4;
    const auto r1 = check_df_derivation(d, delta, identity_map(s), a);
    const auto r2 = check_df_derivation(d, delta, identity_map(s), b);
    EXPECT_EQ(r1.pass, r2.pass);
    EXPECT_EQ(r1.failures, r2.failures);
    ASSERT_EQ(r1.witnesses.size(), r2.witnesses.size());
    for (std::size_t i = 0; i < r1.witnesses.size(); ++i) EXPECT_EQ(r1.witnesses[i].inputs, r2.witnesses[i].inputs);
}

TEST(Checks, EveryWitnessReevaluatesToItsResidual) {
    const auto s = m2(3);
    const auto delta = inner_derivation(s, mat(0, 1, 0, 0));
    const auto id = identity_map(s);
    const auto d = left_mult(s, mat(1, 1, 0, 2));
    CheckOptions o;
    o.max_witnesses = 20;
    const auto rep = check_df_derivation(d, delta, id, o);
    ASSERT_FALSE(rep.witnesses.empty());
    for (const auto& w : rep.witnesses) {
        const auto [l, r] = evaluate_law(w.law, d, &id, &delta, w.inputs);
        EXPECT_EQ(l, w.lhs);
        EXPECT_EQ(r, w.rhs);
        EXPECT_EQ(s->sub(l, r), w.residual);
    }
}

TEST(Checks, JordanExampleOverRationalMatrices) {
    const auto s = m2q();
    const Element b0 = mat(0, 1, 0, 0);
    const auto D = right_mult_into(s, s, b0);
    const auto delta = inner_derivation(s, b0);
    const auto f = negation(s, s);
    const auto rep = check_jordan_df_derivation(D, delta, f);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.strategy, "probe-complete");
    // A = E11: D(A^2) = A B0 = [[0,1],[0,0]]; D(A)A + f(A)delta(A) = 0 + (-A)(B0 A - A B0) = [[0,1],[0,0]].
    const auto [lhs, rhs] = evaluate_law("jordan", D, &f, &delta, {mat(1, 0, 0, 0)});
    EXPECT_EQ(lhs, mat(0, 1, 0, 0));
    EXPECT_EQ(rhs, mat(0, 1, 0, 0));
}

TEST(Checks, ProbeChecksAreDeterministic) {
    Example21 e;
    const auto a = check_df_derivation(e.map_d2, e.delta2, e.f2);
    const auto b = check_df_derivation(e.map_d2, e.delta2, e.f2);
    EXPECT_EQ(a.failures, b.failures);
    EXPECT_EQ(a.inputs_tested, b.inputs_tested);
    ASSERT_EQ(a.witnesses.size(), b.witnesses.size());
    for (std::size_t i = 0; i < a.witnesses.size(); ++i) EXPECT_EQ(a.witnesses[i].inputs, b.witnesses[i].inputs);
}
