#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "dfderiv/error.hpp"

namespace dfderiv {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline bool is_integral(const Rational& q) { return denominator(q) == 1; }

inline std::string to_string(const Integer& z) { return z.str(); }

inline std::string to_string(const Rational& q) {
    if (is_integral(q)) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

/** Least nonnegative residue of z modulo n (n > 0). */
inline Integer mod_floor(const Integer& z, const Integer& n) {
    Integer r = z % n;
    if (r < 0) r += n;
    return r;
}

/** Coefficient domain of a carrier construction. */
struct ScalarDomain {
    enum class Kind { integers, rationals, modular };

    Kind kind = Kind::integers;
    Integer modulus = 0;

    static ScalarDomain integers() { return {Kind::integers, 0}; }
    static ScalarDomain rationals() { return {Kind::rationals, 0}; }
    static ScalarDomain modular(const Integer& n) {
        if (n <= 0) fail(ErrorCode::malformed_descriptor, "modulus must be positive");
        return {Kind::modular, n};
    }

    bool finite() const { return kind == Kind::modular; }

    std::string name() const {
        switch (kind) {
        case Kind::integers: return "Z";
        case Kind::rationals: return "Q";
        case Kind::modular: return "Z/" + modulus.str();
        }
        return "?";
    }

    /** Canonical representative of q in this domain; rejects fractions outside Q. */
    Rational normalize(const Rational& q) const {
        switch (kind) {
        case Kind::rationals: return q;
        case Kind::integers:
            if (!is_integral(q)) fail(ErrorCode::non_integral_scaling, to_string(q) + " is not an integer");
            return q;
        case Kind::modular: {
            if (!is_integral(q)) fail(ErrorCode::non_integral_scaling, to_string(q) + " is not a residue");
            return Rational(mod_floor(numerator(q), modulus));
        }
        }
        return q;
    }

    bool contains(const Rational& q) const {
        switch (kind) {
        case Kind::rationals: return true;
        case Kind::integers: return is_integral(q);
        case Kind::modular: return is_integral(q) && q >= 0 && numerator(q) < modulus;
        }
        return false;
    }

    friend bool operator==(const ScalarDomain& a, const ScalarDomain& b) {
        return a.kind == b.kind && a.modulus == b.modulus;
    }
};

} // namespace dfderiv
