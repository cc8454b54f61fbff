#pragma once

#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dfderiv/checks.hpp"
#include "dfderiv/enumeration.hpp"
#include "dfderiv/oracles.hpp"
#include "dfderiv/structure.hpp"

namespace dfderiv {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json integer_to_json(const Integer& z) {
    if (z >= std::numeric_limits<std::int64_t>::min() && z <= std::numeric_limits<std::int64_t>::max())
        return static_cast<std::int64_t>(z);
    return z.str();
}

inline Integer integer_from_json(const Json& j, const std::string& where) {
    if (j.is_number_integer()) return Integer(j.get<std::int64_t>());
    if (j.is_string()) {
        try {
            return Integer(j.get<std::string>());
        } catch (const std::exception&) {
        }
    }
    fail(ErrorCode::parse_error, where + ": expected an integer");
}

} // namespace detail

/** Rationals serialize as [numerator, denominator]. */
inline Json rational_to_json(const Rational& q) {
    return Json::array({detail::integer_to_json(numerator(q)), detail::integer_to_json(denominator(q))});
}

/** Accepts an integer, a decimal-integer string, or [numerator, denominator]. */
inline Rational rational_from_json(const Json& j, const std::string& where) {
    if (j.is_array()) {
        if (j.size() != 2) fail(ErrorCode::parse_error, where + ": a rational is [numerator, denominator]");
        const Integer n = detail::integer_from_json(j[0], where);
        const Integer d = detail::integer_from_json(j[1], where);
        if (d == 0) fail(ErrorCode::parse_error, where + ": zero denominator");
        // Boost 1.74 rejects a negative denominator in the two-argument constructor.
        return d < 0 ? Rational(-n, -d) : Rational(n, d);
    }
    return Rational(detail::integer_from_json(j, where));
}

inline Json element_to_json(const Element& e) {
    switch (e.kind) {
    case Element::Kind::scalar: return rational_to_json(e.entries.empty() ? Rational(0) : e.entries.front());
    case Element::Kind::polynomial: {
        Json a = Json::array();
        for (const auto& c : e.entries) a.push_back(rational_to_json(c));
        return a;
    }
    case Element::Kind::matrix: {
        Json rows = Json::array();
        for (std::size_t i = 0; i < e.dim; ++i) {
            Json row = Json::array();
            for (std::size_t k = 0; k < e.dim; ++k) row.push_back(rational_to_json(e.entries[i * e.dim + k]));
            rows.push_back(std::move(row));
        }
        return rows;
    }
    case Element::Kind::tuple: {
        Json a = Json::array();
        for (const auto& p : e.parts) a.push_back(element_to_json(p));
        return a;
    }
    }
    return nullptr;
}

/** Decodes an element of `c`; the carrier fixes the shape. */
inline Element element_from_json(const Carrier& c, const Json& j, const std::string& where) {
    Element e;
    if (auto* q = dynamic_cast<const QuotientCarrier*>(&c)) {
        e = element_from_json(*q->parent(), j, where);
    } else if (auto* s = dynamic_cast<const SubCarrier*>(&c)) {
        e = element_from_json(*s->parent(), j, where);
    } else if (dynamic_cast<const ScalarCarrier*>(&c)) {
        e = Element::scalar(rational_from_json(j, where));
    } else if (dynamic_cast<const PolynomialCarrier*>(&c)) {
        if (!j.is_array()) fail(ErrorCode::parse_error, where + ": a polynomial is a coefficient array, lowest degree first");
        std::vector<Rational> cs;
        for (std::size_t i = 0; i < j.size(); ++i) cs.push_back(rational_from_json(j[i], where + "[" + std::to_string(i) + "]"));
        e = Element::polynomial(std::move(cs));
    } else if (auto* m = dynamic_cast<const MatrixCarrier*>(&c)) {
        const std::size_t k = m->size();
        if (!j.is_array() || j.size() != k) fail(ErrorCode::parse_error, where + ": expected " + std::to_string(k) + " matrix rows");
        std::vector<Rational> entries;
        for (std::size_t i = 0; i < k; ++i) {
            if (!j[i].is_array() || j[i].size() != k) fail(ErrorCode::parse_error, where + ": row " + std::to_string(i) + " has the wrong length");
            for (std::size_t l = 0; l < k; ++l) entries.push_back(rational_from_json(j[i][l], where + "[" + std::to_string(i) + "][" + std::to_string(l) + "]"));
        }
        e = Element::matrix(k, std::move(entries));
    } else if (auto* p = dynamic_cast<const ProductCarrier*>(&c)) {
        const auto& comps = p->components();
        if (!j.is_array() || j.size() != comps.size())
            fail(ErrorCode::parse_error, where + ": expected a " + std::to_string(comps.size()) + "-tuple");
        std::vector<Element> parts;
        for (std::size_t i = 0; i < comps.size(); ++i) parts.push_back(element_from_json(*comps[i], j[i], where + "[" + std::to_string(i) + "]"));
        e = Element::tuple(std::move(parts));
    } else {
        fail(ErrorCode::unsupported_carrier, where + ": no JSON encoding for " + c.id());
    }
    if (!c.contains(c.canonical(e))) fail(ErrorCode::parse_error, where + ": value is not in " + c.id());
    return c.canonical(e);
}

inline Json elements_to_json(const std::vector<Element>& es) {
    Json a = Json::array();
    for (const auto& e : es) a.push_back(element_to_json(e));
    return a;
}

inline Json witness_to_json(const Witness& w) {
    return Json{{"law", w.law},
                {"inputs", elements_to_json(w.inputs)},
                {"lhs", element_to_json(w.lhs)},
                {"rhs", element_to_json(w.rhs)},
                {"residual", element_to_json(w.residual)}};
}

inline Json report_to_json(const VerificationReport& r) {
    Json ws = Json::array();
    for (const auto& w : r.witnesses) ws.push_back(witness_to_json(w));
    Json j{{"check", r.check}, {"strategy", r.strategy}, {"verdict", r.pass ? "PASS" : "FAIL"}, {"inputs_tested", r.inputs_tested},
           {"failures", r.failures}, {"witnesses", std::move(ws)}};
    if (!r.notes.empty()) j["notes"] = r.notes;
    j["elapsed_ms"] = r.elapsed_ms;
    return j;
}

inline Json fact_to_json(const StructuralFact& f) {
    Json j{{"subject", f.subject}, {"predicate", f.predicate}, {"verdict", std::string(verdict_name(f.verdict))}};
    if (!f.witness.empty()) j["witness"] = elements_to_json(f.witness);
    if (!f.note.empty()) j["note"] = f.note;
    return j;
}

inline Json pairs_to_json(const std::vector<std::pair<std::string, std::uint64_t>>& v) {
    Json o = Json::object();
    for (const auto& [k, n] : v) o[k] = n;
    return o;
}

inline Json lemma_verdict_to_json(const LemmaVerdict& v) {
    Json j{{"lemma", v.lemma}, {"context", v.context}, {"strategy", v.strategy}, {"gating", v.gating},
           {"verdict", v.skipped ? "SKIPPED" : (v.pass() ? "PASS" : "FAIL")}};
    if (v.skipped) {
        j["skip_reason"] = v.skip_reason;
        return j;
    }
    j["inputs_tested"] = v.inputs_tested;
    j["hypothesis_filtered"] = v.hypothesis_filtered;
    j["failures"] = v.failures;
    if (!v.witnesses.empty()) {
        Json ws = Json::array();
        for (const auto& w : v.witnesses) ws.push_back(witness_to_json(w));
        j["witnesses"] = std::move(ws);
    }
    return j;
}

inline Json report_to_json(const OracleReport& r) {
    Json hyps = Json::array();
    for (const auto& h : r.hypotheses) hyps.push_back(fact_to_json(h));
    Json ces = Json::array();
    for (const auto& c : r.counterexamples) {
        Json cj{{"first", c.first}, {"second", c.second}, {"reason", c.reason}};
        if (!c.witness.empty()) cj["witness"] = elements_to_json(c.witness);
        ces.push_back(std::move(cj));
    }
    Json j{{"oracle", r.oracle},
           {"instance", r.instance},
           {"verdict", r.pass() ? "PASS" : "FAIL"},
           {"hypotheses", std::move(hyps)},
           {"quantifiers", pairs_to_json(r.quantifiers)},
           {"tallies", pairs_to_json(r.tallies)},
           {"counterexample_count", r.counterexample_count},
           {"counterexamples", std::move(ces)}};
    if (!r.lemmas.empty()) {
        Json ls = Json::array();
        for (const auto& l : r.lemmas) ls.push_back(lemma_verdict_to_json(l));
        j["lemmas"] = std::move(ls);
    }
    if (!r.notes.empty()) j["notes"] = r.notes;
    j["elapsed_ms"] = r.elapsed_ms;
    return j;
}

/** Summary of an enumeration: counts and, for small results, the tables as input/output pairs. */
inline Json report_to_json(const EnumerationResult& r, std::size_t max_listed = 0) {
    Json j{{"method", r.method}, {"count", r.count}, {"examined", r.examined}, {"complete", r.complete}};
    if (max_listed && r.source && r.target) {
        const auto& st = r.source->tables();
        const auto& tt = r.target->tables();
        Json maps = Json::array();
        for (std::size_t k = 0; k < r.tables.size() && k < max_listed; ++k) {
            Json pairs = Json::array();
            for (std::size_t i = 0; i < st.n; ++i)
                pairs.push_back(Json::array({element_to_json(st.elements[i]), element_to_json(tt.elements[r.tables[k][i]])}));
            maps.push_back(std::move(pairs));
        }
        j["maps"] = std::move(maps);
    }
    j["elapsed_ms"] = r.elapsed_ms;
    return j;
}

/** Copy of `j` with every "elapsed_ms" member removed, for regression comparison. */
inline Json strip_timing(const Json& j) {
    if (j.is_object()) {
        Json o = Json::object();
        for (auto it = j.begin(); it != j.end(); ++it)
            if (it.key() != "elapsed_ms") o[it.key()] = strip_timing(it.value());
        return o;
    }
    if (j.is_array()) {
        Json a = Json::array();
        for (const auto& v : j) a.push_back(strip_timing(v));
        return a;
    }
    return j;
}

} // namespace dfderiv
