#pragma once

#include <concepts>
#include <utility>

#include "dfderiv/carrier.hpp"
#include "dfderiv/maps.hpp"

namespace dfderiv {

/**
 * Operations a law needs: arithmetic in the source module, the target module
 * and the acting ring, plus the three maps d, f, δ of a (δ,f)-law. Two models
 * exist: ElementOps (exact values, any carrier) and IndexOps (precomputed
 * tables of finite carriers).
 */
template <class O>
concept LawOps = requires(const O& o, typename O::Value v) {
    { o.src_add(v, v) } -> std::convertible_to<typename O::Value>;
    { o.src_act(v, v) } -> std::convertible_to<typename O::Value>;
    { o.src_act_left(v, v) } -> std::convertible_to<typename O::Value>;
    { o.tgt_add(v, v) } -> std::convertible_to<typename O::Value>;
    { o.tgt_act(v, v) } -> std::convertible_to<typename O::Value>;
    { o.tgt_act_left(v, v) } -> std::convertible_to<typename O::Value>;
    { o.d(v) } -> std::convertible_to<typename O::Value>;
    { o.f(v) } -> std::convertible_to<typename O::Value>;
    { o.delta(v) } -> std::convertible_to<typename O::Value>;
};

struct ElementOps {
    using Value = Element;
    const Carrier* src = nullptr;
    const Carrier* tgt = nullptr;
    const AdditiveMap* dm = nullptr;
    const AdditiveMap* fm = nullptr;
    const AdditiveMap* deltam = nullptr;

    Element src_add(const Element& a, const Element& b) const { return src->add(a, b); }
    Element src_act(const Element& x, const Element& r) const { return src->act_right(x, r); }
    Element src_act_left(const Element& r, const Element& x) const { return src->act_left(r, x); }
    Element tgt_add(const Element& a, const Element& b) const { return tgt->add(a, b); }
    Element tgt_act(const Element& m, const Element& r) const { return tgt->act_right(m, r); }
    Element tgt_act_left(const Element& r, const Element& m) const { return tgt->act_left(r, m); }
    Element d(const Element& x) const { return (*dm)(x); }
    Element f(const Element& x) const { return (*fm)(x); }
    Element delta(const Element& a) const { return (*deltam)(a); }
};

struct IndexOps {
    using Value = Index;
    const FiniteTables* src = nullptr;
    const FiniteTables* tgt = nullptr;
    const Index* dm = nullptr;
    const Index* fm = nullptr;
    const Index* deltam = nullptr;

    Index src_add(Index a, Index b) const { return src->plus(a, b); }
    Index src_act(Index x, Index r) const { return src->right(x, r); }
    Index src_act_left(Index r, Index x) const { return src->left(r, x); }
    Index tgt_add(Index a, Index b) const { return tgt->plus(a, b); }
    Index tgt_act(Index m, Index r) const { return tgt->right(m, r); }
    Index tgt_act_left(Index r, Index m) const { return tgt->left(r, m); }
    Index d(Index x) const { return dm[x]; }
    Index f(Index x) const { return fm[x]; }
    Index delta(Index a) const { return deltam[a]; }
};

static_assert(LawOps<ElementOps>);
static_assert(LawOps<IndexOps>);

namespace law {

template <LawOps O, class V = typename O::Value>
std::pair<V, V> additive(const O& o, const V& a, const V& b) {
    return {o.d(o.src_add(a, b)), o.tgt_add(o.d(a), o.d(b))};
}

/** δ(ab) = δ(a)b + aδ(b), with the ring acting on itself. */
template <LawOps O, class V = typename O::Value>
std::pair<V, V> leibniz(const O& o, const V& a, const V& b) {
    return {o.d(o.src_act(a, b)), o.tgt_add(o.tgt_act(o.d(a), b), o.tgt_act_left(a, o.d(b)))};
}

template <LawOps O, class V = typename O::Value>
std::pair<V, V> hom_right(const O& o, const V& m, const V& r) {
    return {o.d(o.src_act(m, r)), o.tgt_act(o.d(m), r)};
}

template <LawOps O, class V = typename O::Value>
std::pair<V, V> hom_left(const O& o, const V& r, const V& m) {
    return {o.d(o.src_act_left(r, m)), o.tgt_act_left(r, o.d(m))};
}

/** d(xa) = d(x)a + f(x)δ(a). */
template <LawOps O, class V = typename O::Value>
std::pair<V, V> df(const O& o, const V& x, const V& a) {
    return {o.d(o.src_act(x, a)), o.tgt_add(o.tgt_act(o.d(x), a), o.tgt_act(o.f(x), o.delta(a)))};
}

/** D(x²) = D(x)x + f(x)δ(x); the source is the algebra itself. */
template <LawOps O, class V = typename O::Value>
std::pair<V, V> jordan(const O& o, const V& x) {
    return {o.d(o.src_act(x, x)), o.tgt_add(o.tgt_act(o.d(x), x), o.tgt_act(o.f(x), o.delta(x)))};
}

} // namespace law
} // namespace dfderiv
