#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dfderiv/carrier.hpp"

namespace dfderiv {

enum class Role { derivation, module_hom, bimodule_hom, df_derivation, jordan_df_derivation, endomorphism, unclassified };

constexpr std::string_view role_name(Role r) {
    switch (r) {
    case Role::derivation: return "derivation";
    case Role::module_hom: return "module_hom";
    case Role::bimodule_hom: return "bimodule_hom";
    case Role::df_derivation: return "df_derivation";
    case Role::jordan_df_derivation: return "jordan_df_derivation";
    case Role::endomorphism: return "endomorphism";
    case Role::unclassified: return "unclassified";
    }
    return "?";
}

/** A claimed role; validated only by the checks module. */
struct RoleClaim {
    Role role = Role::unclassified;
    std::string delta; // name of δ for (Jordan) (δ,f)-derivations
    std::string f;
};

/**
 * Additive map between carriers, backed by a rule or by a finite table.
 * Cheap to copy; the table form of a finite map is computed once on demand.
 */
class AdditiveMap {
public:
    using Rule = std::function<Element(const Element&)>;

    AdditiveMap(std::string name, CarrierPtr source, CarrierPtr target, Rule rule, RoleClaim role = {})
        : impl_(std::make_shared<Impl>()) {
        impl_->name = std::move(name);
        impl_->source = std::move(source);
        impl_->target = std::move(target);
        impl_->rule = std::move(rule);
        impl_->role = std::move(role);
    }

    /** Table-backed map from an index table over the source enumeration. */
    static AdditiveMap from_indices(std::string name, CarrierPtr source, CarrierPtr target, std::vector<Index> table,
                                    RoleClaim role = {}) {
        const auto& st = source->tables();
        const auto& tt = target->tables();
        if (table.size() != st.n) fail(ErrorCode::malformed_descriptor, "table for " + name + " has wrong length");
        for (auto v : table)
            if (v >= tt.n) fail(ErrorCode::malformed_descriptor, "table for " + name + " has an out-of-range value");
        auto tgt = target;
        auto src = source;
        auto shared = std::make_shared<const std::vector<Index>>(std::move(table));
        AdditiveMap m(std::move(name), source, target,
                      [src, tgt, shared](const Element& x) { return tgt->at((*shared)[src->index(x)]); }, std::move(role));
        m.impl_->table_backed = true;
        std::call_once(m.impl_->once, [&] { m.impl_->table = *shared; });
        return m;
    }

    /** Table-backed map from explicit (input, output) pairs; every source element exactly once. */
    static AdditiveMap from_pairs(std::string name, CarrierPtr source, CarrierPtr target,
                                  const std::vector<std::pair<Element, Element>>& pairs, RoleClaim role = {}) {
        const auto& st = source->tables();
        std::vector<Index> table(st.n, Index(-1));
        for (const auto& [in, out] : pairs) {
            auto i = source->index(in);
            if (table[i] != Index(-1)) fail(ErrorCode::malformed_descriptor, name + " assigns " + to_string(in) + " twice");
            table[i] = target->index(out);
        }
        for (std::size_t i = 0; i < table.size(); ++i)
            if (table[i] == Index(-1)) fail(ErrorCode::malformed_descriptor, name + " leaves " + to_string(st.elements[i]) + " unassigned");
        return from_indices(std::move(name), std::move(source), std::move(target), std::move(table), std::move(role));
    }

    const std::string& name() const { return impl_->name; }
    const CarrierPtr& source() const { return impl_->source; }
    const CarrierPtr& target() const { return impl_->target; }
    const RoleClaim& role() const { return impl_->role; }
    bool table_backed() const { return impl_->table_backed; }

    Element operator()(const Element& x) const { return impl_->target->canonical(impl_->rule(impl_->source->canonical(x))); }

    /** Values on the source enumeration, as target indices. */
    const std::vector<Index>& table() const {
        std::call_once(impl_->once, [this] {
            const auto& st = impl_->source->tables();
            const auto& tt = impl_->target->tables();
            std::vector<Index> t(st.n);
            for (std::size_t i = 0; i < st.n; ++i) t[i] = tt.find(impl_->target->canonical(impl_->rule(st.elements[i])));
            impl_->table = std::move(t);
        });
        return impl_->table;
    }

    AdditiveMap renamed(std::string name) const {
        AdditiveMap m(*this);
        m.impl_ = std::make_shared<Impl>();
        m.impl_->name = std::move(name);
        m.impl_->source = impl_->source;
        m.impl_->target = impl_->target;
        m.impl_->rule = impl_->rule;
        m.impl_->role = impl_->role;
        m.impl_->table_backed = impl_->table_backed;
        return m;
    }

    AdditiveMap with_role(RoleClaim role) const {
        AdditiveMap m = renamed(impl_->name);
        m.impl_->role = std::move(role);
        return m;
    }

private:
    struct Impl {
        std::string name;
        CarrierPtr source, target;
        Rule rule;
        RoleClaim role;
        bool table_backed = false;
        std::once_flag once;
        std::vector<Index> table;
    };
    std::shared_ptr<Impl> impl_;
};

namespace detail {

inline void require_same(const Carrier& a, const Carrier& b, const std::string& what) {
    if (!same_structure(a, b)) fail(ErrorCode::carrier_mismatch, what + ": " + a.id() + " (" + a.signature() + ") vs " + b.id() + " (" + b.signature() + ")");
}

inline const PolynomialCarrier* as_poly(const Carrier& c) { return dynamic_cast<const PolynomialCarrier*>(&c); }
inline const ProductCarrier* as_product(const Carrier& c) { return dynamic_cast<const ProductCarrier*>(&c); }

/** Applies a coefficientwise polynomial rule to a polynomial ring or to each polynomial component of a product. */
inline AdditiveMap::Rule polynomial_rule(const CarrierPtr& c, const std::string& name,
                                         std::function<std::vector<Rational>(const std::vector<Rational>&)> f) {
    if (auto* p = as_poly(*c)) {
        return [p, f](const Element& a) { return p->make(f(a.entries)); };
    }
    if (auto* prod = as_product(*c)) {
        std::vector<const PolynomialCarrier*> comps;
        for (const auto& k : prod->components()) {
            auto* p = as_poly(*k);
            if (!p) fail(ErrorCode::unsupported_carrier, name + " needs polynomial components, got " + k->signature());
            comps.push_back(p);
        }
        return [comps, f](const Element& a) {
            std::vector<Element> parts;
            for (std::size_t i = 0; i < comps.size(); ++i) parts.push_back(comps[i]->make(f(a.parts[i].entries)));
            return Element::tuple(std::move(parts));
        };
    }
    fail(ErrorCode::unsupported_carrier, name + " needs a polynomial construction, got " + c->signature());
}

inline std::vector<Rational> derivative(const std::vector<Rational>& a, const Rational& q) {
    if (a.size() <= 1) return {};
    std::vector<Rational> out(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) out[i - 1] = q * Rational(static_cast<long long>(i)) * a[i];
    return out;
}

inline const ProductCarrier& pair_carrier(const CarrierPtr& m, const std::string& name) {
    auto* prod = as_product(*m);
    if (!prod || prod->components().size() != 2) fail(ErrorCode::unsupported_carrier, name + " needs a two-component product module");
    return *prod;
}

/** Scales each component i of a pair by s[i], coefficientwise over the component domain. */
inline AdditiveMap::Rule pair_linear(const CarrierPtr& m, const std::string& name,
                                     std::function<std::vector<Element>(const Carrier&, const Carrier&, const Element&, const Element&)> f) {
    const auto& prod = pair_carrier(m, name);
    auto a = prod.components()[0];
    auto b = prod.components()[1];
    return [a, b, f](const Element& v) { return Element::tuple(f(*a, *b, v.parts[0], v.parts[1])); };
}

inline Element scale_by(const Carrier& c, const Element& e, const Rational& s) {
    if (auto* p = as_poly(c)) {
        std::vector<Rational> v(e.entries);
        for (auto& q : v) q *= s;
        return p->make(std::move(v));
    }
    if (!is_integral(s)) fail(ErrorCode::non_integral_scaling, "cannot scale " + c.signature() + " by " + to_string(s));
    return c.scale(numerator(s).convert_to<long long>(), e);
}

} // namespace detail

/** a ↦ a′ on a polynomial ring, or componentwise on a product of polynomial modules. */
inline AdditiveMap formal_derivative(const CarrierPtr& c) {
    RoleClaim role{c->is_ring() ? Role::derivation : Role::unclassified, {}, {}};
    return AdditiveMap("formal_derivative", c, c,
                       detail::polynomial_rule(c, "formal_derivative", [](const auto& a) { return detail::derivative(a, 1); }), role);
}

/** a ↦ q·a′. */
inline AdditiveMap scaled_derivative(const CarrierPtr& c, const Rational& q) {
    RoleClaim role{c->is_ring() ? Role::derivation : Role::unclassified, {}, {}};
    return AdditiveMap("scaled_derivative(" + to_string(q) + ")", c, c,
                       detail::polynomial_rule(c, "scaled_derivative", [q](const auto& a) { return detail::derivative(a, q); }), role);
}

/** A ↦ B0·A − A·B0. */
inline AdditiveMap inner_derivation(const CarrierPtr& ring, const Element& b0) {
    if (!ring->is_ring()) fail(ErrorCode::carrier_mismatch, "inner_derivation needs a ring, got " + ring->id());
    if (!ring->contains(ring->canonical(b0))) fail(ErrorCode::carrier_mismatch, to_string(b0) + " is not in " + ring->id());
    Element b = ring->canonical(b0);
    auto r = ring;
    return AdditiveMap("inner_derivation(" + to_string(b) + ")", ring, ring,
                       [r, b](const Element& a) { return r->sub(r->mul(b, a), r->mul(a, b)); }, {Role::derivation, {}, {}});
}

inline AdditiveMap identity_map(const CarrierPtr& c) {
    return AdditiveMap("identity", c, c, [](const Element& a) { return a; }, {c->is_ring() ? Role::endomorphism : Role::module_hom, {}, {}});
}

inline AdditiveMap zero_map(const CarrierPtr& source, const CarrierPtr& target) {
    auto t = target;
    return AdditiveMap("zero", source, target, [t](const Element&) { return t->zero(); }, {Role::module_hom, {}, {}});
}

/** [a; b] ↦ [a; b] on a pair module. */
inline AdditiveMap pair_identity(const CarrierPtr& m) {
    detail::pair_carrier(m, "pair_identity");
    return AdditiveMap("pair_identity", m, m, [](const Element& a) { return a; }, {Role::module_hom, {}, {}});
}

namespace detail {

inline bool integer_based(const ProductCarrier& p) {
    for (const auto& c : p.components()) {
        auto* poly = as_poly(*c);
        if (poly && poly->base().kind != ScalarDomain::Kind::rationals) return true;
    }
    return false;
}

} // namespace detail

/** [a; b] ↦ [(p/q)a; (1/q)b]; q ≠ 0, and q must divide over an integer-based module. */
inline AdditiveMap pair_scaling(const CarrierPtr& m, const Rational& p, const Rational& q) {
    if (q == 0) fail(ErrorCode::malformed_descriptor, "pair_scaling requires q != 0");
    const auto& prod = detail::pair_carrier(m, "pair_scaling");
    Rational s0 = p / q, s1 = Rational(1) / q;
    if (detail::integer_based(prod) && (!is_integral(s0) || !is_integral(s1)))
        fail(ErrorCode::non_integral_scaling, "pair_scaling(" + to_string(p) + "," + to_string(q) + ") over an integer-based module");
    return AdditiveMap("pair_scaling(" + to_string(p) + "," + to_string(q) + ")", m, m,
                       detail::pair_linear(m, "pair_scaling",
                                           [s0, s1](const Carrier& ca, const Carrier& cb, const Element& a, const Element& b) {
                                               return std::vector<Element>{detail::scale_by(ca, a, s0), detail::scale_by(cb, b, s1)};
                                           }),
                       {Role::module_hom, {}, {}});
}

/** [a; b] ↦ [a; 0]. */
inline AdditiveMap project_first(const CarrierPtr& m) {
    return AdditiveMap("project_first", m, m,
                       detail::pair_linear(m, "project_first",
                                           [](const Carrier&, const Carrier& cb, const Element& a, const Element&) {
                                               return std::vector<Element>{a, cb.zero()};
                                           }),
                       {Role::module_hom, {}, {}});
}

/** [a; b] ↦ [(p/q)a; 0]. */
inline AdditiveMap project_scaled(const CarrierPtr& m, const Rational& p, const Rational& q) {
    if (q == 0) fail(ErrorCode::malformed_descriptor, "project_scaled requires q != 0");
    const auto& prod = detail::pair_carrier(m, "project_scaled");
    Rational s0 = p / q;
    if (detail::integer_based(prod) && !is_integral(s0))
        fail(ErrorCode::non_integral_scaling, "project_scaled(" + to_string(p) + "," + to_string(q) + ") over an integer-based module");
    return AdditiveMap("project_scaled(" + to_string(p) + "," + to_string(q) + ")", m, m,
                       detail::pair_linear(m, "project_scaled",
                                           [s0](const Carrier& ca, const Carrier& cb, const Element& a, const Element&) {
                                               return std::vector<Element>{detail::scale_by(ca, a, s0), cb.zero()};
                                           }),
                       {Role::module_hom, {}, {}});
}

/** [a; b] ↦ [2a + 3b; a]. */
inline AdditiveMap gamma_mix(const CarrierPtr& m) {
    return AdditiveMap("gamma_mix", m, m,
                       detail::pair_linear(m, "gamma_mix",
                                           [](const Carrier& ca, const Carrier&, const Element& a, const Element& b) {
                                               return std::vector<Element>{ca.add(ca.scale(2, a), ca.scale(3, b)), a};
                                           }),
                       {Role::module_hom, {}, {}});
}

/** [a; b] ↦ [2a + 3b; 0]. */
inline AdditiveMap gamma_mix_projected(const CarrierPtr& m) {
    return AdditiveMap("gamma_mix_projected", m, m,
                       detail::pair_linear(m, "gamma_mix_projected",
                                           [](const Carrier& ca, const Carrier& cb, const Element& a, const Element& b) {
                                               return std::vector<Element>{ca.add(ca.scale(2, a), ca.scale(3, b)), cb.zero()};
                                           }),
                       {Role::module_hom, {}, {}});
}

/** m ↦ c·m, for a bimodule or a ring acting on itself. */
inline AdditiveMap left_mult(const CarrierPtr& m, const Element& c) {
    auto r = m->acting_ring();
    Element k = r->canonical(c);
    auto mm = m;
    return AdditiveMap("left_mult(" + to_string(k) + ")", m, m, [mm, k](const Element& a) { return mm->act_left(k, a); },
                       {Role::module_hom, {}, {}});
}

/** m ↦ m·c. */
inline AdditiveMap right_mult(const CarrierPtr& m, const Element& c) {
    auto r = m->acting_ring();
    Element k = r->canonical(c);
    auto mm = m;
    return AdditiveMap("right_mult(" + to_string(k) + ")", m, m, [mm, k](const Element& a) { return mm->act_right(a, k); },
                       {Role::jordan_df_derivation, {}, {}});
}

/**
 * x ↦ c·x from an algebra S into a bimodule M over S, for central c; the
 * bimodule homomorphisms S → M of the matrix examples.
 */
inline AdditiveMap central_scale(const CarrierPtr& source, const CarrierPtr& target, const Element& c) {
    detail::require_same(*source, *target->acting_ring(), "central_scale");
    Element k = source->canonical(c);
    auto t = target;
    return AdditiveMap("central_scale(" + to_string(k) + ")", source, target,
                       [t, k](const Element& x) { return t->act_left(k, t->canonical(x)); }, {Role::bimodule_hom, {}, {}});
}

/** A ↦ −A between carriers of the same construction. */
inline AdditiveMap negation(const CarrierPtr& source, const CarrierPtr& target) {
    detail::require_same(*source, *target, "negation");
    auto t = target;
    return AdditiveMap("negation", source, target, [t](const Element& a) { return t->neg(t->canonical(a)); }, {Role::bimodule_hom, {}, {}});
}

/** A ↦ A·B0 from an algebra into a bimodule of the same construction. */
inline AdditiveMap right_mult_into(const CarrierPtr& source, const CarrierPtr& target, const Element& b0) {
    detail::require_same(*source, *target, "right_mult");
    Element b = source->canonical(b0);
    auto t = target;
    return AdditiveMap("right_mult(" + to_string(b) + ")", source, target,
                       [t, b](const Element& a) { return t->act_right(t->canonical(a), b); }, {Role::jordan_df_derivation, {}, {}});
}

enum class DExample { d1_ex21, d2_ex21, d1_ex23, d2_ex23 };

/** The pointwise-defined d maps of the pair-module examples. */
inline AdditiveMap d_example(const CarrierPtr& m, DExample which, const Rational& p = 1) {
    const auto& prod = detail::pair_carrier(m, "d_example");
    for (const auto& c : prod.components())
        if (!detail::as_poly(*c)) fail(ErrorCode::unsupported_carrier, "d_example needs polynomial components");
    auto* pa = detail::as_poly(*prod.components()[0]);
    auto* pb = detail::as_poly(*prod.components()[1]);
    auto der = [](const PolynomialCarrier* c, const Element& a) { return c->make(detail::derivative(a.entries, 1)); };
    std::string name;
    AdditiveMap::Rule rule;
    switch (which) {
    case DExample::d1_ex21:
        name = "d1_ex21";
        rule = [=](const Element& v) { return Element::tuple({der(pa, v.parts[0]), der(pb, v.parts[1])}); };
        break;
    case DExample::d2_ex21:
        name = "d2_ex21(" + to_string(p) + ")";
        rule = [=](const Element& v) {
            return Element::tuple({pa->add(detail::scale_by(*pa, der(pa, v.parts[0]), p), v.parts[0]), v.parts[1]});
        };
        break;
    case DExample::d1_ex23:
        name = "d1_ex23";
        rule = [=](const Element& v) { return Element::tuple({der(pa, v.parts[0]), pb->zero()}); };
        break;
    case DExample::d2_ex23:
        name = "d2_ex23(" + to_string(p) + ")";
        rule = [=](const Element& v) {
            return Element::tuple({pa->add(detail::scale_by(*pa, der(pa, v.parts[0]), p), v.parts[0]), pb->zero()});
        };
        break;
    }
    return AdditiveMap(name, m, m, rule, {Role::df_derivation, {}, {}});
}

/** outer ∘ inner. */
inline AdditiveMap map_compose(const AdditiveMap& outer, const AdditiveMap& inner) {
    detail::require_same(*inner.target(), *outer.source(), "compose " + outer.name() + " after " + inner.name());
    return AdditiveMap("(" + outer.name() + " . " + inner.name() + ")", inner.source(), outer.target(),
                       [outer, inner](const Element& x) { return outer(inner(x)); });
}

inline AdditiveMap map_add(const AdditiveMap& a, const AdditiveMap& b) {
    detail::require_same(*a.source(), *b.source(), "add sources");
    detail::require_same(*a.target(), *b.target(), "add targets");
    auto t = a.target();
    return AdditiveMap("(" + a.name() + " + " + b.name() + ")", a.source(), a.target(),
                       [a, b, t](const Element& x) { return t->add(a(x), b(x)); });
}

inline AdditiveMap map_negate(const AdditiveMap& a) {
    auto t = a.target();
    return AdditiveMap("-" + a.name(), a.source(), a.target(), [a, t](const Element& x) { return t->neg(a(x)); });
}

/** Result of a map-equality test; `strategy` is exhaustive or probe-complete. */
struct MapEquality {
    bool equal = true;
    std::string strategy;
    std::optional<Element> witness;
    std::optional<Element> left_value, right_value;
    std::size_t inputs_tested = 0;
};

/**
 * Probe inputs of a single variable: the probe basis, all pairwise basis sums
 * and the seeded random samples. Finite carriers return every element.
 */
inline std::vector<Element> probe_inputs(const Carrier& c, const ProbeSpec& p, std::string_view purpose) {
    if (c.finite()) return c.enumerate();
    std::vector<Element> out = c.probe_basis(p);
    const std::size_t nb = out.size();
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = i + 1; j < nb; ++j) out.push_back(c.add(out[i], out[j]));
    auto rng = seeded_rng(p.seed, c.signature(), purpose);
    for (std::size_t k = 0; k < p.random_samples; ++k) out.push_back(c.random_element(rng, p));
    return out;
}

inline MapEquality maps_equal(const AdditiveMap& a, const AdditiveMap& b, const ProbeSpec& probe = {}) {
    detail::require_same(*a.source(), *b.source(), "maps_equal sources");
    detail::require_same(*a.target(), *b.target(), "maps_equal targets");
    MapEquality r;
    const auto& src = *a.source();
    r.strategy = src.finite() ? "exhaustive" : "probe-complete";
    for (const auto& x : probe_inputs(src, probe, "maps_equal")) {
        ++r.inputs_tested;
        Element u = a(x), v = b(x);
        if (!(u == v)) {
            r.equal = false;
            r.witness = x;
            r.left_value = std::move(u);
            r.right_value = std::move(v);
            return r;
        }
    }
    return r;
}

} // namespace dfderiv
