#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dfderiv/checks.hpp"
#include "dfderiv/structure.hpp"

namespace dfderiv {

/** a • b = ab + ba. */
inline Element jordan_product(const Carrier& s, const Element& a, const Element& b) {
    if (!s.is_ring()) fail(ErrorCode::carrier_mismatch, "jordan_product: " + s.id() + " is not an algebra");
    if (!s.contains(a) || !s.contains(b)) fail(ErrorCode::carrier_mismatch, "jordan_product: operands not in " + s.id());
    return s.add(s.mul(a, b), s.mul(b, a));
}

/** m •′ s = ms + sm. */
inline Element jordan_action(const Carrier& m, const Element& x, const Element& s) {
    if (!m.has_left_action()) fail(ErrorCode::carrier_mismatch, "jordan_action: " + m.id() + " is not a bimodule");
    const auto r = m.acting_ring();
    if (!m.contains(x) || !r->contains(s)) fail(ErrorCode::carrier_mismatch, "jordan_action: operands do not match " + m.id());
    return m.add(m.act_right(x, s), m.act_left(s, x));
}

enum class LemmaId { L31, L32, L33, L34, L35, L36a, L36b, L37, L38, L39, C331, L314, T331a, T331b };

inline constexpr std::array<LemmaId, 14> all_lemmas{LemmaId::L31,  LemmaId::L32,  LemmaId::L33,  LemmaId::L34,  LemmaId::L35,
                                                    LemmaId::L36a, LemmaId::L36b, LemmaId::L37,  LemmaId::L38,  LemmaId::L39,
                                                    LemmaId::C331, LemmaId::L314, LemmaId::T331a, LemmaId::T331b};

constexpr std::string_view lemma_name(LemmaId id) {
    switch (id) {
    case LemmaId::L31: return "L31";
    case LemmaId::L32: return "L32";
    case LemmaId::L33: return "L33";
    case LemmaId::L34: return "L34";
    case LemmaId::L35: return "L35";
    case LemmaId::L36a: return "L36a";
    case LemmaId::L36b: return "L36b";
    case LemmaId::L37: return "L37";
    case LemmaId::L38: return "L38";
    case LemmaId::L39: return "L39";
    case LemmaId::C331: return "C331";
    case LemmaId::L314: return "L314";
    case LemmaId::T331a: return "T331a";
    case LemmaId::T331b: return "T331b";
    }
    return "?";
}

inline LemmaId lemma_from_name(std::string_view s) {
    for (auto id : all_lemmas)
        if (lemma_name(id) == s) return id;
    fail(ErrorCode::unknown_lemma, "unknown lemma id " + std::string(s));
}

/** Number of algebra inputs a lemma takes. */
constexpr std::size_t lemma_arity(LemmaId id) {
    switch (id) {
    case LemmaId::L31: return 1;
    case LemmaId::L34:
    case LemmaId::L36a:
    case LemmaId::L36b:
    case LemmaId::L39:
    case LemmaId::T331a: return 3;
    case LemmaId::L314: return 4;
    default: return 2;
    }
}

/** Input-space hypothesis of a lemma. */
enum class Hypothesis { none, commuting, zero_product, in_P };

constexpr Hypothesis lemma_hypothesis(LemmaId id) {
    switch (id) {
    case LemmaId::L37: return Hypothesis::commuting;
    case LemmaId::L38:
    case LemmaId::L39:
    case LemmaId::C331: return Hypothesis::zero_product;
    case LemmaId::L314: return Hypothesis::in_P;
    default: return Hypothesis::none;
    }
}

/** Number of residuals a lemma reports (C331 reports its statement and proof forms). */
constexpr std::size_t lemma_outputs(LemmaId id) { return id == LemmaId::C331 ? 2 : 1; }

/** Arithmetic of S, M and the maps D, f, δ, as exact elements. */
struct JordanElementOps {
    using Value = Element;
    const Carrier* s;
    const Carrier* m;
    const AdditiveMap* D;
    const AdditiveMap* f;
    const AdditiveMap* delta;

    Element smul(const Element& a, const Element& b) const { return s->mul(a, b); }
    Element sadd(const Element& a, const Element& b) const { return s->add(a, b); }
    Element ssub(const Element& a, const Element& b) const { return s->sub(a, b); }
    Element madd(const Element& a, const Element& b) const { return m->add(a, b); }
    Element msub(const Element& a, const Element& b) const { return m->sub(a, b); }
    Element mr(const Element& x, const Element& a) const { return m->act_right(x, a); }
    Element ml(const Element& a, const Element& x) const { return m->act_left(a, x); }
    Element d(const Element& x) const { return (*D)(x); }
    Element ff(const Element& x) const { return (*f)(x); }
    Element dl(const Element& x) const { return (*delta)(x); }
    bool s_is_zero(const Element& a) const { return a == s->zero(); }
};

/** Same arithmetic over the operation tables of finite carriers. */
struct JordanIndexOps {
    using Value = Index;
    const FiniteTables* s;
    const FiniteTables* m;
    const Index* D;
    const Index* f;
    const Index* delta;

    Index smul(Index a, Index b) const { return s->times(a, b); }
    Index sadd(Index a, Index b) const { return s->plus(a, b); }
    Index ssub(Index a, Index b) const { return s->minus(a, b); }
    Index madd(Index a, Index b) const { return m->plus(a, b); }
    Index msub(Index a, Index b) const { return m->minus(a, b); }
    Index mr(Index x, Index a) const { return m->right(x, a); }
    Index ml(Index a, Index x) const { return m->left(a, x); }
    Index d(Index x) const { return D[x]; }
    Index ff(Index x) const { return f[x]; }
    Index dl(Index x) const { return delta[x]; }
    bool s_is_zero(Index a) const { return a == s->zero; }
};

namespace lemma {

/** x^y = D(xy) − D(x)y − f(x)δ(y). */
template <class O, class V = typename O::Value>
V bracket(const O& o, const V& x, const V& y) {
    return o.msub(o.msub(o.d(o.smul(x, y)), o.mr(o.d(x), y)), o.mr(o.ff(x), o.dl(y)));
}

template <class O, class V = typename O::Value>
V commutator(const O& o, const V& a, const V& b) {
    return o.ssub(o.smul(a, b), o.smul(b, a));
}

/** Hypothesis test on the inputs; `in_p` decides membership in 𝒫. */
template <class O, class V = typename O::Value, class InP>
bool hypothesis_holds(const O& o, LemmaId id, const V* in, InP&& in_p) {
    switch (lemma_hypothesis(id)) {
    case Hypothesis::none: return true;
    case Hypothesis::commuting: return o.s_is_zero(commutator(o, in[0], in[1]));
    case Hypothesis::zero_product: return o.s_is_zero(o.smul(in[0], in[1]));
    case Hypothesis::in_P: return in_p(in[2]) && in_p(in[3]);
    }
    return false;
}

/** Residual(s) of a lemma at inputs satisfying its hypothesis. */
template <class O, class V = typename O::Value>
std::array<V, 2> residual(const O& o, LemmaId id, const V* in) {
    const V& x = in[0];
    switch (id) {
    case LemmaId::L31: {
        // D(x²) − D(x)x − f(x)δ(x)
        return {bracket(o, x, x), {}};
    }
    case LemmaId::L32: {
        const V& y = in[1];
        // D(y)x + f(y)δ(x) − yD(x) − δ(y)f(x)
        V lhs = o.madd(o.mr(o.d(y), x), o.mr(o.ff(y), o.dl(x)));
        V rhs = o.madd(o.ml(y, o.d(x)), o.ml(o.dl(y), o.ff(x)));
        return {o.msub(lhs, rhs), {}};
    }
    case LemmaId::L33: {
        const V& y = in[1];
        V xy = o.smul(x, y);
        V xyx = o.smul(xy, x);
        V r = o.d(xyx);
        r = o.msub(r, o.mr(o.d(x), o.smul(y, x)));
        r = o.msub(r, o.mr(o.mr(o.ff(x), o.dl(y)), x));
        r = o.msub(r, o.mr(o.mr(o.ff(x), y), o.dl(x)));
        return {r, {}};
    }
    case LemmaId::L34: {
        const V& y = in[1];
        const V& z = in[2];
        V xyz = o.smul(o.smul(x, y), z);
        V zyx = o.smul(o.smul(z, y), x);
        V r = o.d(o.sadd(xyz, zyx));
        r = o.msub(r, o.mr(o.d(x), o.smul(y, z)));
        r = o.msub(r, o.mr(o.d(z), o.smul(y, x)));
        r = o.msub(r, o.mr(o.mr(o.ff(x), o.dl(y)), z));
        r = o.msub(r, o.mr(o.mr(o.ff(z), o.dl(y)), x));
        r = o.msub(r, o.mr(o.mr(o.ff(x), y), o.dl(z)));
        r = o.msub(r, o.mr(o.mr(o.ff(z), y), o.dl(x)));
        return {r, {}};
    }
    case LemmaId::L35: {
        const V& y = in[1];
        return {o.mr(bracket(o, x, y), commutator(o, x, y)), {}};
    }
    case LemmaId::L36a: {
        const V& y = in[1];
        const V& z = in[2];
        // x^y (zy − yz) + z^y (xy − yx)
        return {o.madd(o.mr(bracket(o, x, y), commutator(o, z, y)), o.mr(bracket(o, z, y), commutator(o, x, y))), {}};
    }
    case LemmaId::L36b: {
        const V& y = in[1];
        const V& z = in[2];
        // x^y (zx − xz) + z^x (yx − xy)
        return {o.madd(o.mr(bracket(o, x, y), commutator(o, z, x)), o.mr(bracket(o, z, x), commutator(o, y, x))), {}};
    }
    case LemmaId::L37: return {bracket(o, x, in[1]), {}};
    case LemmaId::L38: {
        const V& y = in[1];
        return {o.madd(o.mr(o.d(x), y), o.mr(o.ff(x), o.dl(y))), {}};
    }
    case LemmaId::L39: {
        const V& y = in[1];
        const V& z = in[2];
        return {bracket(o, o.smul(y, x), z), {}};
    }
    case LemmaId::C331: {
        const V& y = in[1];
        V base = o.msub(o.d(o.smul(y, x)), o.mr(o.d(y), x));
        V statement = o.msub(base, o.ml(o.dl(y), o.ff(x)));
        V proof = o.msub(base, o.mr(o.ff(y), o.dl(x)));
        return {statement, proof};
    }
    case LemmaId::L314: {
        const V& y = in[1];
        // y^x (zw − wz)
        return {o.mr(bracket(o, y, x), commutator(o, in[2], in[3])), {}};
    }
    case LemmaId::T331a: {
        const V& y = in[1];
        const V& z = in[2];
        // x^(y+z) − x^y − x^z
        return {o.msub(o.msub(bracket(o, x, o.sadd(y, z)), bracket(o, x, y)), bracket(o, x, z)), {}};
    }
    case LemmaId::T331b: {
        const V& y = in[1];
        // x^y + y^x
        return {o.madd(bracket(o, x, y), bracket(o, y, x)), {}};
    }
    }
    return {};
}

} // namespace lemma

/**
 * The triple (D, δ, f) behind the bracket x^y, with D, f : S → M and δ on S.
 * Construction validates δ as a derivation, f as a bimodule homomorphism and
 * D as additive (PrereqFailed otherwise). Copies share cached tables.
 */
class BracketContext {
public:
    BracketContext(AdditiveMap D, AdditiveMap delta, AdditiveMap f, const CheckOptions& opt = {})
        : st_(std::make_shared<State>(std::move(D), std::move(delta), std::move(f), opt)) {
        const auto& d = st_->D;
        if (!d.source()->is_ring()) fail(ErrorCode::carrier_mismatch, "bracket context: " + d.source()->id() + " is not an algebra");
        if (!d.target()->has_left_action()) fail(ErrorCode::carrier_mismatch, "bracket context: " + d.target()->id() + " is not a bimodule");
        detail::df_carriers(d, st_->delta, st_->f);
        CheckOptions pre = opt;
        pre.focus.clear();
        detail::require_prereq(check_additive(d, pre), "additivity of D");
        detail::require_prereq(check_derivation(st_->delta, pre), "delta as derivation");
        detail::require_prereq(check_bimodule_hom(st_->f, pre), "f as bimodule homomorphism");
    }

    const AdditiveMap& D() const { return st_->D; }
    const AdditiveMap& delta() const { return st_->delta; }
    const AdditiveMap& f() const { return st_->f; }
    const CarrierPtr& S() const { return st_->D.source(); }
    const CarrierPtr& M() const { return st_->D.target(); }
    const CheckOptions& options() const { return st_->opt; }
    bool finite() const { return detail::tabulable(*S()) && detail::tabulable(*M()); }

    JordanElementOps element_ops() const { return {S().get(), M().get(), &st_->D, &st_->f, &st_->delta}; }
    JordanIndexOps index_ops() const {
        return {&S()->tables(), &M()->tables(), D().table().data(), f().table().data(), delta().table().data()};
    }

    Element bracket(const Element& x, const Element& y) const {
        if (!S()->contains(S()->canonical(x)) || !S()->contains(S()->canonical(y)))
            fail(ErrorCode::carrier_mismatch, "bracket inputs must lie in " + S()->id());
        return lemma::bracket(element_ops(), S()->canonical(x), S()->canonical(y));
    }

    /** D(x²) = D(x)x + f(x)δ(x) everywhere (exhaustive or probe-complete). */
    bool is_jordan() const {
        std::call_once(st_->jordan_once, [this] {
            CheckOptions o = st_->opt;
            o.focus.clear();
            o.require_derivation = false;
            st_->jordan = run_single_law(o, [](const auto& ops, const auto& x) { return lemma::bracket(ops, x, x); });
        });
        return st_->jordan;
    }

    /** D(x • y) = D(x) •′ y + f(x) •′ δ(y) on every pair. */
    bool satisfies_action_law() const {
        std::call_once(st_->action_once, [this] { st_->action = compute_action_law(); });
        return st_->action;
    }

    /** Is D a (δ,f)-derivation at x against every a; exact for finite S, and over the additive basis otherwise. */
    bool in_P(const Element& x) const {
        if (finite()) return P_flags()[S()->index(x)] != 0;
        const auto o = element_ops();
        const Element cx = S()->canonical(x);
        std::vector<Element> basis;
        for (const auto& b : S()->probe_basis(st_->opt.probe)) basis.push_back(b);
        for (const auto& a : basis)
            if (!(lemma::bracket(o, cx, a) == M()->zero())) return false;
        return true;
    }

    const std::vector<char>& P_flags() const {
        std::call_once(st_->p_once, [this] { st_->p = P_members(D(), delta(), f()); });
        return st_->p;
    }

    /** Residual(s) at explicit inputs; HypothesisUnmet when the inputs violate the lemma's hypothesis. */
    std::vector<Element> lemma_residual(LemmaId id, const std::vector<Element>& inputs) const {
        if (inputs.size() != lemma_arity(id))
            fail(ErrorCode::malformed_descriptor, std::string(lemma_name(id)) + " takes " + std::to_string(lemma_arity(id)) + " inputs");
        std::vector<Element> in;
        for (const auto& e : inputs) in.push_back(S()->canonical(e));
        const auto o = element_ops();
        if (!lemma::hypothesis_holds(o, id, in.data(), [&](const Element& e) { return in_P(e); }))
            fail(ErrorCode::hypothesis_unmet, std::string(lemma_name(id)) + " hypothesis fails at the given inputs");
        auto r = lemma::residual(o, id, in.data());
        std::vector<Element> out{r[0]};
        if (lemma_outputs(id) == 2) out.push_back(r[1]);
        return out;
    }

private:
    struct State {
        State(AdditiveMap d, AdditiveMap dl, AdditiveMap ff, CheckOptions o)
            : D(std::move(d)), delta(std::move(dl)), f(std::move(ff)), opt(std::move(o)) {}
        AdditiveMap D, delta, f;
        CheckOptions opt;
        std::once_flag jordan_once, action_once, p_once;
        bool jordan = false, action = false;
        std::vector<char> p;
    };

    template <class Law>
    bool run_single_law(const CheckOptions& o, Law&& law) const {
        if (finite()) {
            const auto ops = index_ops();
            const auto& t = S()->tables();
            const auto zero = M()->tables().zero;
            for (std::size_t x = 0; x < t.n; ++x)
                if (law(ops, Index(x)) != zero) return false;
            return true;
        }
        const auto ops = element_ops();
        for (const auto& x : probe_inputs(*S(), o.probe, "jordan law"))
            if (!(law(ops, x) == M()->zero())) return false;
        return true;
    }

    bool compute_action_law() const {
        auto residual = [](const auto& o, const auto& x, const auto& y) {
            auto lhs = o.d(o.sadd(o.smul(x, y), o.smul(y, x)));
            auto dx = o.d(x);
            auto fx = o.ff(x);
            auto dy = o.dl(y);
            auto rhs = o.madd(o.madd(o.mr(dx, y), o.ml(y, dx)), o.madd(o.mr(fx, dy), o.ml(dy, fx)));
            return o.msub(lhs, rhs);
        };
        if (finite()) {
            const auto ops = index_ops();
            const auto& t = S()->tables();
            const auto zero = M()->tables().zero;
            for (std::size_t x = 0; x < t.n; ++x)
                for (std::size_t y = 0; y < t.n; ++y)
                    if (residual(ops, Index(x), Index(y)) != zero) return false;
            return true;
        }
        const auto ops = element_ops();
        const auto basis = S()->probe_basis(st_->opt.probe);
        for (const auto& x : basis)
            for (const auto& y : basis)
                if (!(residual(ops, x, y) == M()->zero())) return false;
        return true;
    }

    std::shared_ptr<State> st_;
};

inline Element bracket(const BracketContext& ctx, const Element& x, const Element& y) { return ctx.bracket(x, y); }

inline std::vector<Element> lemma_residual(const BracketContext& ctx, std::string_view lemma_id, const std::vector<Element>& inputs) {
    return ctx.lemma_residual(lemma_from_name(lemma_id), inputs);
}

} // namespace dfderiv
