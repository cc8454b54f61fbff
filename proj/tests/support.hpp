#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dfderiv.hpp"

namespace dft {

using namespace dfderiv;

inline CarrierPtr carrier(const std::string& id, Construction c, ScalarDomain base, CarrierKind kind = CarrierKind::ring,
                          std::size_t size = 2, std::vector<DeclaredFact> facts = {}) {
    CarrierDescriptor d;
    d.id = id;
    d.kind = kind;
    d.construction = c;
    d.base = base;
    d.size = size;
    d.declared_facts = std::move(facts);
    return make_carrier(d);
}

inline CarrierPtr modular(Integer n) { return carrier("Z" + n.str(), Construction::modular, ScalarDomain::modular(n)); }
inline CarrierPtr m2(Integer n) { return carrier("M2Z" + n.str(), Construction::matrix, ScalarDomain::modular(n), CarrierKind::algebra); }
inline CarrierPtr m2q() { return carrier("M2Q", Construction::matrix, ScalarDomain::rationals(), CarrierKind::algebra); }
inline CarrierPtr t2(Integer n) { return carrier("T2Z" + n.str(), Construction::upper_triangular, ScalarDomain::modular(n)); }
inline CarrierPtr qx() { return carrier("Qx", Construction::polynomial, ScalarDomain::rationals()); }

inline CarrierPtr pair_module(const CarrierPtr& r) {
    CarrierDescriptor d;
    d.id = r->id() + "^2";
    d.kind = CarrierKind::right_module;
    d.construction = Construction::product;
    d.components = {r, r};
    d.ring = r;
    return make_carrier(d);
}

inline Element mat(long a, long b, long c, long d) { return Element::matrix(2, {a, b, c, d}); }
inline Element poly(std::vector<Rational> c) { return Element::polynomial(std::move(c)); }
inline Element vec(Element a, Element b) { return Element::tuple({std::move(a), std::move(b)}); }

/** Plain 2x2 integer matrices mod n, independent of the library arithmetic. */
struct Mod2 {
    std::array<long, 4> e{};
    long n = 3;

    static long red(long v, long n) { return ((v % n) + n) % n; }
    Mod2 operator*(const Mod2& o) const {
        return {{red(e[0] * o.e[0] + e[1] * o.e[2], n), red(e[0] * o.e[1] + e[1] * o.e[3], n), red(e[2] * o.e[0] + e[3] * o.e[2], n),
                 red(e[2] * o.e[1] + e[3] * o.e[3], n)},
                n};
    }
    Mod2 operator+(const Mod2& o) const { return {{red(e[0] + o.e[0], n), red(e[1] + o.e[1], n), red(e[2] + o.e[2], n), red(e[3] + o.e[3], n)}, n}; }
    Mod2 operator-(const Mod2& o) const { return {{red(e[0] - o.e[0], n), red(e[1] - o.e[1], n), red(e[2] - o.e[2], n), red(e[3] - o.e[3], n)}, n}; }
    bool operator<(const Mod2& o) const { return e < o.e; }
    bool operator==(const Mod2& o) const { return e == o.e; }
    Element element() const { return mat(e[0], e[1], e[2], e[3]); }
};

inline std::vector<Mod2> all_mod2(long n, bool upper = false) {
    std::vector<Mod2> out;
    for (long a = 0; a < n; ++a)
        for (long b = 0; b < n; ++b)
            for (long c = 0; c < (upper ? 1 : n); ++c)
                for (long d = 0; d < n; ++d) out.push_back({{a, b, c, d}, n});
    return out;
}

inline Json parse_json(const std::string& s) { return Json::parse(s); }

inline RunResult run_text(const std::string& text, RunOptions o = {}) {
    auto s = parse_scenario_text(text, "test");
    return run_scenario(s, o);
}

inline std::string scenario_path(const std::string& name) { return std::string(DFDERIV_SOURCE_DIR) + "/scenarios/" + name; }

} // namespace dft
