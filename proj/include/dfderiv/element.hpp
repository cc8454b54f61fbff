#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dfderiv/scalar.hpp"

namespace dfderiv {

/**
 * Exact value of a carrier element. The payload shape is fixed by the carrier
 * construction; elements carry no carrier pointer, so the owning carrier is
 * always passed alongside.
 *
 * - scalar: one entry
 * - polynomial: coefficients lowest degree first, no trailing zeros
 * - matrix: dim*dim entries, row-major
 * - tuple: one element per product component
 */
struct Element {
    enum class Kind : unsigned char { scalar, polynomial, matrix, tuple };

    Kind kind = Kind::scalar;
    std::size_t dim = 0;
    std::vector<Rational> entries;
    std::vector<Element> parts;

    static Element scalar(Rational q) {
        Element e;
        e.kind = Kind::scalar;
        e.entries.push_back(std::move(q));
        return e;
    }

    static Element polynomial(std::vector<Rational> coeffs) {
        Element e;
        e.kind = Kind::polynomial;
        while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
        e.entries = std::move(coeffs);
        return e;
    }

    static Element matrix(std::size_t k, std::vector<Rational> rows) {
        Element e;
        e.kind = Kind::matrix;
        e.dim = k;
        e.entries = std::move(rows);
        return e;
    }

    static Element tuple(std::vector<Element> parts) {
        Element e;
        e.kind = Kind::tuple;
        e.parts = std::move(parts);
        return e;
    }

    const Rational& at(std::size_t i, std::size_t j) const { return entries[i * dim + j]; }

    friend bool operator==(const Element& a, const Element& b) {
        return a.kind == b.kind && a.dim == b.dim && a.entries == b.entries && a.parts == b.parts;
    }

    /** Lexicographic on the canonical payload; this is the enumeration order. */
    friend std::strong_ordering operator<=>(const Element& a, const Element& b) {
        if (a.kind != b.kind) return a.kind <=> b.kind;
        if (a.dim != b.dim) return a.dim <=> b.dim;
        const std::size_t n = std::min(a.entries.size(), b.entries.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (a.entries[i] < b.entries[i]) return std::strong_ordering::less;
            if (b.entries[i] < a.entries[i]) return std::strong_ordering::greater;
        }
        if (a.entries.size() != b.entries.size()) return a.entries.size() <=> b.entries.size();
        const std::size_t m = std::min(a.parts.size(), b.parts.size());
        for (std::size_t i = 0; i < m; ++i) {
            if (auto c = a.parts[i] <=> b.parts[i]; c != 0) return c;
        }
        return a.parts.size() <=> b.parts.size();
    }
};

namespace detail {

inline std::string poly_to_string(const std::vector<Rational>& c) {
    if (c.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0) continue;
        Rational mag = c[i] < 0 ? Rational(-c[i]) : c[i];
        if (out.empty()) {
            if (c[i] < 0) out += "-";
        } else {
            out += c[i] < 0 ? " - " : " + ";
        }
        const bool unit = mag == 1;
        if (i == 0 || !unit) out += to_string(mag);
        if (i >= 1) out += "x";
        if (i >= 2) out += "^" + std::to_string(i);
    }
    return out;
}

} // namespace detail

inline std::string to_string(const Element& e) {
    switch (e.kind) {
    case Element::Kind::scalar: return to_string(e.entries.front());
    case Element::Kind::polynomial: return detail::poly_to_string(e.entries);
    case Element::Kind::matrix: {
        std::string out = "[";
        for (std::size_t i = 0; i < e.dim; ++i) {
            out += i ? ", [" : "[";
            for (std::size_t j = 0; j < e.dim; ++j) {
                if (j) out += ", ";
                out += to_string(e.at(i, j));
            }
            out += "]";
        }
        return out + "]";
    }
    case Element::Kind::tuple: {
        std::string out = "[";
        for (std::size_t i = 0; i < e.parts.size(); ++i) {
            if (i) out += "; ";
            out += to_string(e.parts[i]);
        }
        return out + "]";
    }
    }
    return "?";
}

} // namespace dfderiv
