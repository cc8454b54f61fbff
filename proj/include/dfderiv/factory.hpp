#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dfderiv/structure.hpp"

namespace dfderiv {

enum class Construction { modular, scalar, polynomial, matrix, upper_triangular, product, quotient_ring, quotient_module, sub };

constexpr std::string_view construction_name(Construction c) {
    switch (c) {
    case Construction::modular: return "modular";
    case Construction::scalar: return "scalar";
    case Construction::polynomial: return "polynomial";
    case Construction::matrix: return "matrix";
    case Construction::upper_triangular: return "upper_triangular";
    case Construction::product: return "product";
    case Construction::quotient_ring: return "quotient_ring";
    case Construction::quotient_module: return "quotient_module";
    case Construction::sub: return "sub";
    }
    return "?";
}

struct CarrierDescriptor {
    std::string id;
    CarrierKind kind = CarrierKind::ring;
    Construction construction = Construction::modular;
    ScalarDomain base;            // modular, scalar, polynomial, matrix
    std::size_t size = 2;         // matrix side length
    std::vector<CarrierPtr> components; // product
    CarrierPtr ring;              // acting ring of a module
    std::optional<Substructure> substructure; // quotients, sub
    std::optional<ScalarDomain> scalar_action; // algebras
    std::vector<DeclaredFact> declared_facts;
};

namespace detail {

inline void check_unital(const Carrier& c) {
    if (c.is_ring()) return;
    const auto r = c.acting_ring();
    const Element one = r->one();
    std::vector<Element> sample;
    if (c.finite()) {
        sample = c.enumerate();
    } else {
        sample = c.probe_basis(ProbeSpec{});
    }
    for (const auto& m : sample) {
        if (!(c.act_right(m, one) == c.canonical(m)))
            fail(ErrorCode::non_unital_module, c.id() + ": m*1 != m at " + to_string(m));
        if (c.has_left_action() && !(c.act_left(one, m) == c.canonical(m)))
            fail(ErrorCode::non_unital_module, c.id() + ": 1*m != m at " + to_string(m));
    }
}

} // namespace detail

/**
 * Builds and validates a carrier. Declared facts on finite carriers are
 * re-derived and must hold; on infinite carriers they are kept as metadata.
 */
inline CarrierPtr make_carrier(const CarrierDescriptor& d) {
    const bool is_module = d.kind == CarrierKind::right_module || d.kind == CarrierKind::bimodule;
    if (d.id.empty()) fail(ErrorCode::malformed_descriptor, "carrier id is empty");
    if (is_module && !d.ring && d.construction != Construction::quotient_module && d.construction != Construction::sub)
        fail(ErrorCode::malformed_descriptor, d.id + ": a module needs an acting ring");
    if (!is_module && d.ring) fail(ErrorCode::malformed_descriptor, d.id + ": rings act on themselves");
    if (d.ring && !d.ring->is_ring()) fail(ErrorCode::malformed_descriptor, d.id + ": acting carrier " + d.ring->id() + " is not a ring");
    std::shared_ptr<Carrier> c;
    switch (d.construction) {
    case Construction::modular:
        if (d.base.kind != ScalarDomain::Kind::modular || d.base.modulus < 1)
            fail(ErrorCode::malformed_descriptor, d.id + ": modular construction needs a positive modulus");
        c = std::make_shared<ScalarCarrier>(d.id, d.base, d.kind, d.ring);
        break;
    case Construction::scalar: c = std::make_shared<ScalarCarrier>(d.id, d.base, d.kind, d.ring); break;
    case Construction::polynomial: c = std::make_shared<PolynomialCarrier>(d.id, d.base, d.kind, d.ring); break;
    case Construction::matrix:
    case Construction::upper_triangular:
        if (d.size == 0) fail(ErrorCode::malformed_descriptor, d.id + ": matrix size must be positive");
        c = std::make_shared<MatrixCarrier>(d.id, d.size, d.base, d.construction == Construction::upper_triangular, d.kind, d.ring);
        break;
    case Construction::product:
        if (d.components.empty()) fail(ErrorCode::malformed_descriptor, d.id + ": product needs components");
        c = std::make_shared<ProductCarrier>(d.id, d.components, d.kind, d.ring);
        break;
    case Construction::quotient_ring:
    case Construction::quotient_module:
        if (!d.substructure) fail(ErrorCode::malformed_descriptor, d.id + ": quotient needs an ideal or submodule");
        if ((d.construction == Construction::quotient_ring) != d.substructure->parent()->is_ring())
            fail(ErrorCode::malformed_descriptor, d.id + ": quotient kind does not match its parent");
        c = std::make_shared<QuotientCarrier>(d.id, *d.substructure);
        break;
    case Construction::sub:
        if (!d.substructure) fail(ErrorCode::malformed_descriptor, d.id + ": sub construction needs a substructure");
        c = std::make_shared<SubCarrier>(d.id, *d.substructure);
        break;
    }
    if (is_module && d.ring && c->acting_ring() != d.ring && !same_structure(*c->acting_ring(), *d.ring))
        fail(ErrorCode::malformed_descriptor, d.id + ": acting ring mismatch");
    if (c->finite() && *c->cardinality() > table_cap)
        fail(ErrorCode::carrier_too_large, d.id + " has " + c->cardinality()->str() + " elements (cap " + std::to_string(table_cap) + ")");
    detail::check_unital(*c);
    c->declare(d.declared_facts);
    if (c->finite() && (c->acting_ring()->finite())) {
        for (const auto& f : d.declared_facts) {
            auto v = evaluate_fact(c, f.fact);
            if (v.verdict == Verdict::fails) {
                std::string w;
                for (const auto& e : v.witness) w += (w.empty() ? "" : ", ") + to_string(e);
                fail(ErrorCode::declared_fact_refuted,
                     d.id + " declares " + std::string(fact_name(f.fact)) + " but it fails" + (w.empty() ? "" : " (witness " + w + ")"));
            }
        }
    }
    return c;
}

} // namespace dfderiv
