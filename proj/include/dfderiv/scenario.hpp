#pragma once

#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dfderiv/factory.hpp"
#include "dfderiv/json_codec.hpp"

namespace dfderiv {

struct Task {
    std::string id;
    std::string type; // check, evaluate, fact, inclusion, enumerate, oracle, lemma_suite
    Json params;
    std::optional<Json> expect;
};

/** A parsed scenario; every reference has been resolved. */
struct Scenario {
    std::string name;
    std::string description;
    ProbeSpec probe;
    std::vector<std::string> carrier_ids, substructure_ids, map_ids;
    std::map<std::string, CarrierPtr> carriers;
    std::map<std::string, Substructure> substructures;
    std::map<std::string, AdditiveMap> maps;
    std::vector<Task> tasks;

    const CarrierPtr& carrier(const std::string& id) const {
        auto it = carriers.find(id);
        if (it == carriers.end()) fail(ErrorCode::resolve_error, "unknown carrier \"" + id + "\"");
        return it->second;
    }
    const Substructure& substructure(const std::string& id) const {
        auto it = substructures.find(id);
        if (it == substructures.end()) fail(ErrorCode::resolve_error, "unknown substructure \"" + id + "\"");
        return it->second;
    }
    const AdditiveMap& map(const std::string& id) const {
        auto it = maps.find(id);
        if (it == maps.end()) fail(ErrorCode::resolve_error, "unknown map \"" + id + "\"");
        return it->second;
    }
};

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> probe_degree;
    std::optional<std::uint64_t> budget;
    std::size_t partitions = 1;
    /** Task types to run; empty runs everything. */
    std::set<std::string> types;
};

struct RunResult {
    int exit_code = 0;
    Json report;
};

inline constexpr int exit_pass = 0;
inline constexpr int exit_mismatch = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_hypothesis = 3;

/** Exit status for an error code: parse-phase errors are usage errors, structural failures are hypothesis errors. */
inline int exit_code_for(ErrorCode c) {
    switch (c) {
    case ErrorCode::parse_error:
    case ErrorCode::resolve_error: return exit_usage;
    case ErrorCode::hypothesis_failed:
    case ErrorCode::hypothesis_unmet:
    case ErrorCode::validation_error:
    case ErrorCode::declared_fact_refuted:
    case ErrorCode::prereq_failed:
    case ErrorCode::non_unital_module: return exit_hypothesis;
    default: return exit_mismatch;
    }
}

namespace detail {

inline const Json& field(const Json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) fail(ErrorCode::parse_error, where + ": missing field \"" + key + "\"");
    return obj.at(key);
}

inline std::string string_field(const Json& obj, const std::string& key, const std::string& where) {
    const auto& v = field(obj, key, where);
    if (!v.is_string()) fail(ErrorCode::parse_error, where + "." + key + ": expected a string");
    return v.get<std::string>();
}

inline std::uint64_t uint_field(const Json& obj, const std::string& key, const std::string& where, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        fail(ErrorCode::parse_error, where + "." + key + ": expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

inline bool bool_field(const Json& obj, const std::string& key, const std::string& where, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) fail(ErrorCode::parse_error, where + "." + key + ": expected true or false");
    return obj.at(key).get<bool>();
}

inline ScalarDomain parse_domain(const Json& j, const std::string& where) {
    if (j.is_object()) return ScalarDomain::modular(integer_from_json(field(j, "modulus", where), where + ".modulus"));
    if (!j.is_string()) fail(ErrorCode::parse_error, where + ": expected \"Z\", \"Q\", \"Z/n\" or {\"modulus\": n}");
    const auto s = j.get<std::string>();
    if (s == "Z") return ScalarDomain::integers();
    if (s == "Q") return ScalarDomain::rationals();
    if (s.rfind("Z/", 0) == 0) return ScalarDomain::modular(integer_from_json(Json(s.substr(2)), where));
    fail(ErrorCode::parse_error, where + ": unknown scalar domain \"" + s + "\"");
}

inline CarrierKind parse_kind(const std::string& s, const std::string& where) {
    for (auto k : {CarrierKind::ring, CarrierKind::algebra, CarrierKind::right_module, CarrierKind::bimodule})
        if (kind_name(k) == s) return k;
    fail(ErrorCode::parse_error, where + ": unknown carrier kind \"" + s + "\"");
}

inline Construction parse_construction(const std::string& s, const std::string& where) {
    for (auto c : {Construction::modular, Construction::scalar, Construction::polynomial, Construction::matrix, Construction::upper_triangular,
                   Construction::product, Construction::quotient_ring, Construction::quotient_module, Construction::sub})
        if (construction_name(c) == s) return c;
    fail(ErrorCode::parse_error, where + ": unknown construction \"" + s + "\"");
}

inline Fact parse_fact(const std::string& s, const std::string& where) {
    for (auto f : {Fact::prime, Fact::two_torsion_free, Fact::jointly_prime, Fact::faithful})
        if (fact_name(f) == s) return f;
    fail(ErrorCode::parse_error, where + ": unknown structural fact \"" + s + "\"");
}

inline Side parse_side(const std::string& s, const std::string& where) {
    for (auto x : {Side::left, Side::right, Side::two_sided})
        if (side_name(x) == s) return x;
    fail(ErrorCode::parse_error, where + ": unknown side \"" + s + "\"");
}

inline ProbeSpec parse_probe(const Json& j, const std::string& where) {
    ProbeSpec p;
    if (j.is_null()) return p;
    if (!j.is_object()) fail(ErrorCode::parse_error, where + ": expected an object");
    p.max_degree = uint_field(j, "max_degree", where, p.max_degree);
    p.random_samples = uint_field(j, "random_samples", where, p.random_samples);
    p.seed = uint_field(j, "seed", where, p.seed);
    if (j.contains("coefficients")) {
        const auto& cs = j.at("coefficients");
        if (!cs.is_array() || cs.empty()) fail(ErrorCode::parse_error, where + ".coefficients: expected a nonempty array");
        p.coefficients.clear();
        for (std::size_t i = 0; i < cs.size(); ++i) p.coefficients.push_back(rational_from_json(cs[i], where + ".coefficients"));
    }
    return p;
}

/** Builds carriers, substructures and maps on demand so declaration order is free; cycles are resolve errors. */
class Resolver {
public:
    Resolver(Scenario& s, std::map<std::string, Json> carriers, std::map<std::string, Json> subs, std::map<std::string, Json> maps)
        : s_(s), carrier_decls_(std::move(carriers)), sub_decls_(std::move(subs)), map_decls_(std::move(maps)) {}

    CarrierPtr carrier(const std::string& id, const std::string& where) {
        if (auto it = s_.carriers.find(id); it != s_.carriers.end()) return it->second;
        auto d = carrier_decls_.find(id);
        if (d == carrier_decls_.end()) fail(ErrorCode::resolve_error, where + ": unknown carrier \"" + id + "\"");
        enter("carrier " + id, where);
        auto c = build_carrier(id, d->second, "carriers[" + id + "]");
        leave("carrier " + id);
        s_.carriers.emplace(id, c);
        return c;
    }

    const Substructure& substructure(const std::string& id, const std::string& where) {
        if (auto it = s_.substructures.find(id); it != s_.substructures.end()) return it->second;
        auto d = sub_decls_.find(id);
        if (d == sub_decls_.end()) fail(ErrorCode::resolve_error, where + ": unknown substructure \"" + id + "\"");
        enter("substructure " + id, where);
        auto sub = build_substructure(d->second, "substructures[" + id + "]");
        leave("substructure " + id);
        return s_.substructures.emplace(id, std::move(sub)).first->second;
    }

    AdditiveMap map(const std::string& id, const std::string& where) {
        if (auto it = s_.maps.find(id); it != s_.maps.end()) return it->second;
        auto d = map_decls_.find(id);
        if (d == map_decls_.end()) fail(ErrorCode::resolve_error, where + ": unknown map \"" + id + "\"");
        enter("map " + id, where);
        auto m = build_map(id, d->second, "maps[" + id + "]");
        leave("map " + id);
        s_.maps.emplace(id, m);
        return m;
    }

private:
    void enter(const std::string& what, const std::string& where) {
        if (!active_.insert(what).second) fail(ErrorCode::resolve_error, where + ": circular reference through " + what);
    }
    void leave(const std::string& what) { active_.erase(what); }

    CarrierPtr build_carrier(const std::string& id, const Json& j, const std::string& where) {
        CarrierDescriptor d;
        d.id = id;
        d.kind = j.contains("kind") ? parse_kind(string_field(j, "kind", where), where + ".kind") : CarrierKind::ring;
        d.construction = parse_construction(string_field(j, "construction", where), where + ".construction");
        if (d.construction == Construction::modular) {
            d.base = ScalarDomain::modular(integer_from_json(field(j, "modulus", where), where + ".modulus"));
        } else if (j.contains("base")) {
            d.base = parse_domain(j.at("base"), where + ".base");
        }
        d.size = uint_field(j, "size", where, 2);
        if (j.contains("components")) {
            const auto& cs = j.at("components");
            if (!cs.is_array()) fail(ErrorCode::parse_error, where + ".components: expected an array of carrier ids");
            for (const auto& c : cs) {
                if (!c.is_string()) fail(ErrorCode::parse_error, where + ".components: expected carrier ids");
                d.components.push_back(carrier(c.get<std::string>(), where + ".components"));
            }
        }
        if (j.contains("ring")) d.ring = carrier(string_field(j, "ring", where), where + ".ring");
        if (j.contains("substructure")) d.substructure = substructure(string_field(j, "substructure", where), where + ".substructure");
        if (j.contains("scalar_action")) d.scalar_action = parse_domain(j.at("scalar_action"), where + ".scalar_action");
        if (j.contains("declared_facts")) {
            const auto& fs = j.at("declared_facts");
            if (!fs.is_array()) fail(ErrorCode::parse_error, where + ".declared_facts: expected an array");
            for (const auto& f : fs) {
                if (!f.is_string()) fail(ErrorCode::parse_error, where + ".declared_facts: expected fact names");
                d.declared_facts.push_back({parse_fact(f.get<std::string>(), where + ".declared_facts"), "declared in scenario"});
            }
        }
        return make_carrier(d);
    }

    Substructure build_substructure(const Json& j, const std::string& where) {
        auto parent = carrier(string_field(j, "parent", where), where + ".parent");
        const Side side = j.contains("side") ? parse_side(string_field(j, "side", where), where + ".side")
                                             : (parent->is_ring() ? Side::two_sided : Side::right);
        auto elements = [&](const std::string& key) {
            const auto& a = field(j, key, where);
            if (!a.is_array()) fail(ErrorCode::parse_error, where + "." + key + ": expected an array of elements");
            std::vector<Element> out;
            for (std::size_t i = 0; i < a.size(); ++i)
                out.push_back(element_from_json(*parent, a[i], where + "." + key + "[" + std::to_string(i) + "]"));
            return out;
        };
        if (j.contains("generators")) return Substructure::generated(parent, elements("generators"), side);
        if (j.contains("elements")) return Substructure::from_elements(parent, elements("elements"), side);
        if (j.contains("vanishing_components")) {
            std::vector<std::size_t> comps;
            for (const auto& c : j.at("vanishing_components")) comps.push_back(c.get<std::size_t>());
            return Substructure::vanishing_components(parent, comps, side);
        }
        if (bool_field(j, "zero", where, false)) return parent->finite() ? Substructure::zero(parent, side) : Substructure::symbolic_zero(parent, side);
        if (bool_field(j, "whole", where, false)) return parent->finite() ? Substructure::whole(parent, side) : Substructure::symbolic_whole(parent, side);
        fail(ErrorCode::parse_error, where + ": needs generators, elements, vanishing_components, zero or whole");
    }

    AdditiveMap ref(const Json& j, const std::string& where) {
        if (j.is_string()) return map(j.get<std::string>(), where);
        if (j.is_object() && j.size() == 1) {
            const auto& [k, v] = *j.items().begin();
            if (k == "compose" && v.is_array() && v.size() == 2) return map_compose(ref(v[0], where), ref(v[1], where));
            if (k == "add" && v.is_array() && v.size() == 2) return map_add(ref(v[0], where), ref(v[1], where));
            if (k == "negate") return map_negate(ref(v, where));
        }
        fail(ErrorCode::parse_error, where + ": expected a map id or {compose|add: [a, b]} or {negate: a}");
    }

    AdditiveMap build_map(const std::string& id, const Json& j, const std::string& where) {
        const auto ctor = string_field(j, "constructor", where);
        auto src = [&] { return carrier(string_field(j, "source", where), where + ".source"); };
        auto tgt = [&](const CarrierPtr& fallback) {
            return j.contains("target") ? carrier(string_field(j, "target", where), where + ".target") : fallback;
        };
        auto q = [&](const std::string& k, Rational fallback) {
            return j.contains(k) ? rational_from_json(j.at(k), where + "." + k) : fallback;
        };
        auto elem = [&](const CarrierPtr& c, const std::string& k) { return element_from_json(*c, field(j, k, where), where + "." + k); };
        std::optional<AdditiveMap> m;
        if (ctor == "identity") m = identity_map(src());
        else if (ctor == "zero") {
            auto s = src();
            m = zero_map(s, tgt(s));
        } else if (ctor == "formal_derivative") m = formal_derivative(src());
        else if (ctor == "scaled_derivative") m = scaled_derivative(src(), q("q", 1));
        else if (ctor == "inner_derivation") {
            auto s = src();
            m = inner_derivation(s, elem(s, "b0"));
        } else if (ctor == "pair_identity") m = pair_identity(src());
        else if (ctor == "pair_scaling") m = pair_scaling(src(), q("p", 1), q("q", 1));
        else if (ctor == "project_first") m = project_first(src());
        else if (ctor == "project_scaled") m = project_scaled(src(), q("p", 1), q("q", 1));
        else if (ctor == "gamma_mix") m = gamma_mix(src());
        else if (ctor == "gamma_mix_projected") m = gamma_mix_projected(src());
        else if (ctor == "left_mult") {
            auto s = src();
            m = left_mult(s, elem(s->acting_ring(), "c"));
        } else if (ctor == "right_mult") {
            auto s = src();
            m = right_mult(s, elem(s->acting_ring(), "c"));
        } else if (ctor == "central_scale") {
            auto s = src();
            m = central_scale(s, tgt(s), elem(s, "c"));
        } else if (ctor == "negation") {
            auto s = src();
            m = negation(s, tgt(s));
        } else if (ctor == "right_mult_into") {
            auto s = src();
            m = right_mult_into(s, tgt(s), elem(s, "b0"));
        } else if (ctor == "d_example") {
            const auto which = string_field(j, "which", where);
            DExample w;
            if (which == "d1_ex21") w = DExample::d1_ex21;
            else if (which == "d2_ex21") w = DExample::d2_ex21;
            else if (which == "d1_ex23") w = DExample::d1_ex23;
            else if (which == "d2_ex23") w = DExample::d2_ex23;
            else fail(ErrorCode::parse_error, where + ".which: unknown d map \"" + which + "\"");
            m = d_example(src(), w, q("p", 1));
        } else if (ctor == "compose") {
            m = map_compose(ref(field(j, "outer", where), where + ".outer"), ref(field(j, "inner", where), where + ".inner"));
        } else if (ctor == "add") {
            m = map_add(ref(field(j, "a", where), where + ".a"), ref(field(j, "b", where), where + ".b"));
        } else if (ctor == "negate") {
            m = map_negate(ref(field(j, "of", where), where + ".of"));
        } else if (ctor == "table") {
            auto s = src();
            auto t = tgt(s);
            const auto& pairs = field(j, "pairs", where);
            if (!pairs.is_array()) fail(ErrorCode::parse_error, where + ".pairs: expected [input, output] pairs");
            std::vector<std::pair<Element, Element>> ps;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const std::string w = where + ".pairs[" + std::to_string(i) + "]";
                if (!pairs[i].is_array() || pairs[i].size() != 2) fail(ErrorCode::parse_error, w + ": expected [input, output]");
                ps.emplace_back(element_from_json(*s, pairs[i][0], w), element_from_json(*t, pairs[i][1], w));
            }
            m = AdditiveMap::from_pairs(id, s, t, ps);
        } else {
            fail(ErrorCode::parse_error, where + ".constructor: unknown constructor \"" + ctor + "\"");
        }
        return m->renamed(id);
    }

public:
    AdditiveMap map_ref(const Json& j, const std::string& where) { return ref(j, where); }

private:
    Scenario& s_;
    std::map<std::string, Json> carrier_decls_, sub_decls_, map_decls_;
    std::set<std::string> active_;
};

inline std::map<std::string, Json> collect(const Json& doc, const std::string& key, std::vector<std::string>& order) {
    std::map<std::string, Json> out;
    if (!doc.contains(key)) return out;
    const auto& a = doc.at(key);
    if (!a.is_array()) fail(ErrorCode::parse_error, key + ": expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string where = key + "[" + std::to_string(i) + "]";
        const auto id = string_field(a[i], "id", where);
        if (!out.emplace(id, a[i]).second) fail(ErrorCode::parse_error, where + ": duplicate id \"" + id + "\"");
        order.push_back(id);
    }
    return out;
}

inline const std::set<std::string> task_types{"check", "evaluate", "fact", "inclusion", "enumerate", "oracle", "lemma_suite"};
inline const std::set<std::string> map_keys{"map", "delta", "f", "D"};
inline const std::set<std::string> carrier_keys{"carrier", "module", "ring", "algebra", "source", "target"};
inline const std::set<std::string> substructure_keys{"submodule", "ideal", "into", "into_colon", "substructure"};
inline const std::set<std::string> element_keys{"focus", "input", "b0"};

/** Resolves every reference in task parameters so dangling ids fail at parse time. */
inline void resolve_refs(const Json& j, Resolver& r, const std::string& where) {
    if (!j.is_object()) return;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& k = it.key();
        const auto& v = it.value();
        const std::string w = where + "." + k;
        if (element_keys.count(k)) continue;
        if (map_keys.count(k)) {
            (void)r.map_ref(v, w);
        } else if ((k == "deltas" || k == "fs") && v.is_array()) {
            for (const auto& m : v) (void)r.map_ref(m, w);
        } else if (carrier_keys.count(k) && v.is_string()) {
            (void)r.carrier(v.get<std::string>(), w);
        } else if (k == "modules" && v.is_array()) {
            for (const auto& m : v) (void)r.carrier(m.get<std::string>(), w);
        } else if (substructure_keys.count(k) && v.is_string()) {
            (void)r.substructure(v.get<std::string>(), w);
        } else if (k == "contexts" && v.is_array()) {
            for (std::size_t i = 0; i < v.size(); ++i) resolve_refs(v[i], r, w + "[" + std::to_string(i) + "]");
        }
    }
}

inline std::string located(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace detail

/** Parses scenario text; `origin` prefixes diagnostics. */
inline Scenario parse_scenario_text(const std::string& text, const std::string& origin = "scenario") {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        fail(ErrorCode::parse_error, origin + ": " + detail::located(text, e.byte) + ": malformed JSON");
    }
    Scenario s;
    try {
        if (!doc.is_object()) fail(ErrorCode::parse_error, "top level: expected an object");
        s.name = detail::string_field(doc, "name", "top level");
        if (doc.contains("description")) s.description = detail::string_field(doc, "description", "top level");
        s.probe = detail::parse_probe(doc.contains("probe") ? doc.at("probe") : Json(), "probe");
        auto carriers = detail::collect(doc, "carriers", s.carrier_ids);
        auto subs = detail::collect(doc, "substructures", s.substructure_ids);
        auto maps = detail::collect(doc, "maps", s.map_ids);
        detail::Resolver r(s, carriers, subs, maps);
        for (const auto& id : s.carrier_ids) (void)r.carrier(id, "carriers");
        for (const auto& id : s.substructure_ids) (void)r.substructure(id, "substructures");
        for (const auto& id : s.map_ids) (void)r.map(id, "maps");
        if (doc.contains("tasks")) {
            const auto& ts = doc.at("tasks");
            if (!ts.is_array()) fail(ErrorCode::parse_error, "tasks: expected an array");
            std::set<std::string> ids;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                const std::string where = "tasks[" + std::to_string(i) + "]";
                Task t;
                t.type = detail::string_field(ts[i], "type", where);
                if (!detail::task_types.count(t.type)) fail(ErrorCode::parse_error, where + ".type: unknown task type \"" + t.type + "\"");
                t.id = ts[i].contains("id") ? detail::string_field(ts[i], "id", where) : t.type + "#" + std::to_string(i);
                if (!ids.insert(t.id).second) fail(ErrorCode::parse_error, where + ": duplicate task id \"" + t.id + "\"");
                t.params = ts[i];
                t.params.erase("type");
                t.params.erase("id");
                if (t.params.contains("expect")) {
                    t.expect = t.params.at("expect");
                    t.params.erase("expect");
                }
                detail::resolve_refs(t.params, r, where);
                s.tasks.push_back(std::move(t));
            }
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::declared_fact_refuted) throw Error(ErrorCode::validation_error, origin + ": " + e.what());
        throw Error(e.code() == ErrorCode::parse_error || e.code() == ErrorCode::resolve_error ? e.code() : ErrorCode::validation_error,
                    origin + ": " + e.what());
    }
    return s;
}

inline Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::parse_error, path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Running

namespace detail {

struct TaskRun {
    const Scenario& s;
    const RunOptions& opt;
    ProbeSpec probe;
    Resolver* resolver = nullptr;

    AdditiveMap map(const Json& p, const std::string& key) const { return resolver->map_ref(field(p, key, key), key); }
    CarrierPtr carrier(const Json& p, const std::string& key) const { return s.carrier(string_field(p, key, key)); }

    CheckOptions check_options(const Json& p) const {
        CheckOptions o;
        o.probe = probe;
        o.partitions = opt.partitions;
        o.max_witnesses = uint_field(p, "max_witnesses", "max_witnesses", 5);
        o.require_derivation = bool_field(p, "require_derivation", "require_derivation", true);
        return o;
    }

    std::uint64_t budget(const Json& p) const { return opt.budget ? *opt.budget : uint_field(p, "budget", "budget", default_budget); }

    std::vector<NamedMap> family(const Json& p, const std::string& key, const CarrierPtr& ring, const CarrierPtr& module) const {
        const auto& v = field(p, key, key);
        if (v.is_array()) {
            std::vector<NamedMap> out;
            for (const auto& m : v) {
                auto am = resolver->map_ref(m, key);
                out.push_back({am.name(), am});
            }
            return out;
        }
        const auto name = v.get<std::string>();
        if (name == "inner") return inner_derivation_family(ring);
        if (name == "derivations") return derivation_family(ring);
        if (name == "identity") return {{"id", identity_map(module)}};
        if (name == "unit_left_mults") return unit_left_mult_family(module);
        if (name == "central_scalings") return central_scaling_family(ring, module);
        fail(ErrorCode::parse_error, key + ": unknown family \"" + name + "\"");
    }
};

/** Carriers of each law input position, for decoding focus tuples and witnesses. */
inline std::vector<CarrierPtr> law_domains(const std::string& law, const AdditiveMap& d) {
    const auto& src = d.source();
    if (law == "additive") return {src, src};
    if (law == "leibniz") return {src, src};
    if (law == "hom_right" || law == "df") return {src, src->acting_ring()};
    if (law == "hom_left") return {src->acting_ring(), src};
    if (law == "jordan") return {src};
    fail(ErrorCode::parse_error, "unknown law \"" + law + "\"");
}

inline std::string law_of_check(const std::string& check) {
    if (check == "additive") return "additive";
    if (check == "derivation") return "leibniz";
    if (check == "module_hom" || check == "bimodule_hom" || check == "endomorphism") return "hom_right";
    if (check == "df_derivation") return "df";
    if (check == "jordan_df_derivation") return "jordan";
    fail(ErrorCode::parse_error, "check: unknown check \"" + check + "\"");
}

inline std::vector<std::vector<Element>> decode_tuples(const Json& a, const std::vector<CarrierPtr>& doms, const std::string& where) {
    std::vector<std::vector<Element>> out;
    if (!a.is_array()) fail(ErrorCode::parse_error, where + ": expected an array of input tuples");
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string w = where + "[" + std::to_string(i) + "]";
        if (!a[i].is_array() || a[i].size() != doms.size()) fail(ErrorCode::parse_error, w + ": expected " + std::to_string(doms.size()) + " inputs");
        std::vector<Element> t;
        for (std::size_t k = 0; k < doms.size(); ++k) t.push_back(element_from_json(*doms[k], a[i][k], w));
        out.push_back(std::move(t));
    }
    return out;
}

struct Outcome {
    std::string verdict; // PASS, FAIL
    Json result;
};

inline Outcome run_check(const TaskRun& tr, const Json& p) {
    const auto check = string_field(p, "check", "check");
    const auto d = tr.map(p, "map");
    auto o = tr.check_options(p);
    const auto law = law_of_check(check);
    if (p.contains("focus")) o.focus = decode_tuples(p.at("focus"), law_domains(law, d), "focus");
    VerificationReport r;
    if (check == "additive") r = check_additive(d, o);
    else if (check == "derivation") r = check_derivation(d, o);
    else if (check == "module_hom") r = check_module_hom(d, o);
    else if (check == "bimodule_hom") r = check_bimodule_hom(d, o);
    else if (check == "endomorphism") r = check_endomorphism(d, o);
    else if (check == "df_derivation") r = check_df_derivation(d, tr.map(p, "delta"), tr.map(p, "f"), o);
    else r = check_jordan_df_derivation(d, tr.map(p, "delta"), tr.map(p, "f"), o);
    Json j = report_to_json(r);
    j["map"] = d.name();
    return {r.pass ? "PASS" : "FAIL", std::move(j)};
}

inline Outcome run_evaluate(const TaskRun& tr, const Json& p) {
    const auto d = tr.map(p, "map");
    const auto x = element_from_json(*d.source(), field(p, "input", "input"), "input");
    const auto v = d(x);
    return {"PASS", Json{{"map", d.name()}, {"input", element_to_json(x)}, {"value", element_to_json(v)},
                         {"is_zero", v == d.target()->zero()}}};
}

inline Outcome run_fact(const TaskRun& tr, const Json& p) {
    const auto fact = string_field(p, "fact", "fact");
    StructuralFact f;
    if (fact == "prime_submodule") {
        const auto& l = tr.s.substructure(string_field(p, "substructure", "substructure"));
        f = is_prime_submodule(l, l.parent());
    } else if (fact == "prime_ideal") {
        f = is_prime_ideal(tr.s.substructure(string_field(p, "substructure", "substructure")));
    } else if (fact == "quotient_two_torsion_free") {
        const auto& l = tr.s.substructure(string_field(p, "substructure", "substructure"));
        f = quotient_two_torsion_free(l, l.parent()->id() + "/" + string_field(p, "substructure", "substructure"));
    } else {
        const auto c = tr.carrier(p, "carrier");
        if (fact == "two_torsion_free") f = is_two_torsion_free(c);
        else if (fact == "prime_ring") f = is_prime_ring(c, tr.opt.partitions);
        else if (fact == "prime_module") f = is_prime_module(c);
        else if (fact == "jointly_prime") f = is_jointly_prime(c);
        else if (fact == "prime_algebra") f = is_prime_algebra(c);
        else if (fact == "faithful") f = is_faithful(c);
        else fail(ErrorCode::parse_error, "fact: unknown fact \"" + fact + "\"");
    }
    return {f.holds() ? "PASS" : "FAIL", fact_to_json(f)};
}

inline Outcome run_inclusion(const TaskRun& tr, const Json& p) {
    const auto d = tr.map(p, "map");
    std::string label;
    const Substructure target = [&] {
        if (p.contains("into")) {
            label = string_field(p, "into", "into");
            return tr.s.substructure(label);
        }
        const auto id = string_field(p, "into_colon", "into_colon");
        const auto& l = tr.s.substructure(id);
        label = "(" + id + ":" + l.parent()->id() + ")";
        return colon_ideal(l, l.parent());
    }();
    if (!same_structure(*target.parent(), *d.target())) fail(ErrorCode::carrier_mismatch, "inclusion: map target is not the parent of " + label);
    std::vector<Element> inputs;
    if (p.contains("focus")) {
        const auto& f = p.at("focus");
        if (!f.is_array()) fail(ErrorCode::parse_error, "focus: expected an array of elements");
        for (std::size_t i = 0; i < f.size(); ++i) inputs.push_back(element_from_json(*d.source(), f[i], "focus[" + std::to_string(i) + "]"));
    }
    for (auto& x : probe_inputs(*d.source(), tr.probe, "inclusion")) inputs.push_back(std::move(x));
    Json j{{"map", d.name()}, {"into", label}, {"strategy", d.source()->finite() ? "exhaustive" : "probe-complete"}};
    std::uint64_t tested = 0;
    for (const auto& x : inputs) {
        ++tested;
        const auto v = d(x);
        if (!target.contains(v)) {
            j["holds"] = false;
            j["inputs_tested"] = tested;
            j["witness"] = Json{{"input", element_to_json(x)}, {"value", element_to_json(v)}};
            return {"FAIL", std::move(j)};
        }
    }
    j["holds"] = true;
    j["inputs_tested"] = tested;
    return {"PASS", std::move(j)};
}

inline Outcome run_enumerate(const TaskRun& tr, const Json& p) {
    const auto what = string_field(p, "what", "what");
    const std::size_t list = uint_field(p, "list", "list", 0);
    DfEnumerationOptions o;
    o.budget = tr.budget(p);
    o.partitions = tr.opt.partitions;
    o.force_search = bool_field(p, "force_search", "force_search", false);
    const bool cross = bool_field(p, "cross_check", "cross_check", false);
    if (what == "derivations" || what == "module_homs" || what == "endomorphisms") {
        const auto c = tr.carrier(p, "carrier");
        EnumerationSpec spec{c, c, {}, {}};
        if (what == "derivations") spec.constraints.push_back(Constraint::derivation());
        else spec.constraints.push_back(Constraint::module_hom());
        spec.budget = o.budget;
        spec.partitions = o.partitions;
        auto r = enumerate_additive_maps(spec);
        return {r.complete ? "PASS" : "FAIL", report_to_json(r, list)};
    }
    if (what != "df_derivations" && what != "jordan_df_derivations") fail(ErrorCode::parse_error, "what: unknown enumeration \"" + what + "\"");
    const bool jordan = what == "jordan_df_derivations";
    auto one = [&](const AdditiveMap& delta, const AdditiveMap& f) {
        auto r = jordan ? enumerate_jordan_df_derivations(delta, f, o) : enumerate_df_derivations(delta, f, o);
        Json j = report_to_json(r, list);
        bool ok = r.complete;
        if (cross) {
            auto so = o;
            so.force_search = true;
            auto other = jordan ? enumerate_df_derivations(delta, f, o) : enumerate_df_derivations(delta, f, so);
            auto a = r.tables, b = other.tables;
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            j["cross_check"] = Json{{"method", other.method}, {"count", other.count}, {"agree", a == b}};
            ok = ok && a == b;
        }
        return std::pair{ok, j};
    };
    if (p.contains("deltas")) {
        const auto f = tr.map(p, "f");
        auto deltas = tr.family(p, "deltas", f.source()->acting_ring(), f.source());
        Json per = Json::array();
        bool ok = true;
        std::uint64_t lo = ~std::uint64_t(0), hi = 0;
        for (const auto& d : deltas) {
            auto [good, j] = one(d.map, f);
            ok = ok && good;
            lo = std::min<std::uint64_t>(lo, j["count"].get<std::uint64_t>());
            hi = std::max<std::uint64_t>(hi, j["count"].get<std::uint64_t>());
            Json e{{"delta", d.label}};
            e.update(j);
            per.push_back(std::move(e));
        }
        Json res{{"deltas", deltas.size()}, {"min_count", lo}, {"max_count", hi}, {"per_delta", std::move(per)}};
        return {ok ? "PASS" : "FAIL", std::move(res)};
    }
    auto [ok, j] = one(tr.map(p, "delta"), tr.map(p, "f"));
    return {ok ? "PASS" : "FAIL", std::move(j)};
}

inline Outcome oracle_outcome(const OracleReport& r) { return {r.pass() ? "PASS" : "FAIL", report_to_json(r)}; }

inline Outcome run_oracle(const TaskRun& tr, const Json& p, const std::string& task_id) {
    const auto oracle = string_field(p, "oracle", "oracle");
    const std::string instance = p.contains("instance") ? string_field(p, "instance", "instance") : tr.s.name + "/" + task_id;
    if (oracle == "ideal_prime") {
        std::vector<CarrierPtr> mods;
        for (const auto& m : field(p, "modules", "modules")) mods.push_back(tr.s.carrier(m.get<std::string>()));
        return oracle_outcome(ideal_prime_scan(instance, mods));
    }
    if (oracle == "jordan_implies_derivation") {
        const auto s = tr.carrier(p, "algebra");
        const auto m = p.contains("module") ? tr.carrier(p, "module") : s;
        return oracle_outcome(jordan_implies_derivation_oracle(instance, tr.family(p, "deltas", s, s), tr.family(p, "fs", s, m), tr.opt.partitions,
                                                               tr.budget(p)));
    }
    const auto m = tr.carrier(p, "module");
    const auto r = m->acting_ring();
    if (oracle == "posner_sampled") {
        const auto samples = uint_field(p, "samples", "samples", 100000);
        const auto seed = tr.opt.seed ? *tr.opt.seed : uint_field(p, "seed", "seed", tr.probe.seed);
        auto res = posner_sampled(instance, m, tr.family(p, "deltas", r, m), tr.family(p, "fs", r, m), samples, seed);
        const auto which = p.contains("statement") ? string_field(p, "statement", "statement") : "composition";
        return oracle_outcome(which == "ring" ? res.ring : res.composition);
    }
    auto fam = df_family(m, tr.family(p, "deltas", r, m), tr.family(p, "fs", r, m), tr.opt.partitions);
    if (oracle == "posner_composition") return oracle_outcome(posner_composition_oracle(instance, fam, tr.opt.partitions));
    if (oracle == "posner_ring") return oracle_outcome(posner_ring_oracle(instance, fam, tr.opt.partitions));
    if (oracle == "creedon") return oracle_outcome(creedon_oracle(instance, fam, tr.s.substructure(string_field(p, "submodule", "submodule")), tr.opt.partitions));
    if (oracle == "prime_ideal_corollary")
        return oracle_outcome(prime_ideal_corollary(instance, fam, tr.s.substructure(string_field(p, "ideal", "ideal")), tr.opt.partitions));
    if (oracle == "endomorphism_iff" || oracle == "endomorphism_zero") {
        auto [iff, zero] = endomorphism_corollaries(instance, fam);
        return oracle_outcome(oracle == "endomorphism_iff" ? iff : zero);
    }
    fail(ErrorCode::parse_error, "oracle: unknown oracle \"" + oracle + "\"");
}

inline std::vector<Element> b0_choices(const TaskRun& tr, const Carrier& s, const Json& spec) {
    if (spec.is_string() && spec.get<std::string>() == "all") return s.enumerate();
    if (spec.is_array()) {
        std::vector<Element> out;
        for (std::size_t i = 0; i < spec.size(); ++i) out.push_back(element_from_json(s, spec[i], "b0[" + std::to_string(i) + "]"));
        return out;
    }
    if (spec.is_object() && spec.contains("random")) {
        auto* mc = dynamic_cast<const MatrixCarrier*>(&s);
        if (!mc) fail(ErrorCode::unsupported_carrier, "b0.random needs a matrix algebra");
        const auto n = uint_field(spec, "random", "b0", 20);
        std::int64_t lo = -2, hi = 2;
        if (spec.contains("range")) {
            lo = spec.at("range").at(0).get<std::int64_t>();
            hi = spec.at("range").at(1).get<std::int64_t>();
        }
        auto rng = seeded_rng(tr.probe.seed, s.signature(), "random B0");
        std::uniform_int_distribution<std::int64_t> dist(lo, hi);
        std::vector<Element> out;
        const auto k = mc->size();
        for (std::uint64_t i = 0; i < n; ++i) {
            std::vector<Rational> e;
            for (std::size_t j = 0; j < k * k; ++j) e.push_back(Rational(dist(rng)));
            out.push_back(s.canonical(Element::matrix(k, std::move(e))));
        }
        return out;
    }
    fail(ErrorCode::parse_error, "b0: expected \"all\", an element list or {\"random\": n}");
}

inline Outcome run_lemma_suite(const TaskRun& tr, const Json& p, const std::string& task_id) {
    const auto s = tr.carrier(p, "algebra");
    const auto m = p.contains("module") ? tr.carrier(p, "module") : s;
    const std::string instance = p.contains("instance") ? string_field(p, "instance", "instance") : tr.s.name + "/" + task_id;
    auto copt = tr.check_options(p);
    std::vector<LemmaContext> ctxs;
    const auto& cs = field(p, "contexts", "contexts");
    if (!cs.is_array()) fail(ErrorCode::parse_error, "contexts: expected an array");
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const auto& c = cs[i];
        const std::string family = c.contains("family") ? string_field(c, "family", "contexts") : "explicit";
        if (family == "right_mult_inner_negation") {
            for (const auto& b0 : b0_choices(tr, *s, field(c, "b0", "contexts")))
                ctxs.push_back({"B0=" + to_string(b0), BracketContext(right_mult_into(s, m, b0), inner_derivation(s, b0), negation(s, m), copt)});
        } else if (family == "jordan_enumerated") {
            const auto delta = tr.map(c, "delta");
            const auto f = tr.map(c, "f");
            DfEnumerationOptions o;
            o.budget = tr.budget(p);
            o.partitions = tr.opt.partitions;
            o.trusted = true;
            auto res = enumerate_jordan_df_derivations(delta, f, o);
            auto ds = res.maps("D", {Role::jordan_df_derivation, delta.name(), f.name()});
            for (const auto& d : ds) ctxs.push_back({delta.name() + ", " + f.name() + ", " + d.name(), BracketContext(d, delta, f, copt)});
        } else if (family == "explicit") {
            const auto d = tr.map(c, "D");
            ctxs.push_back({c.contains("label") ? string_field(c, "label", "contexts") : d.name(), BracketContext(d, tr.map(c, "delta"), tr.map(c, "f"), copt)});
        } else {
            fail(ErrorCode::parse_error, "contexts[" + std::to_string(i) + "].family: unknown family \"" + family + "\"");
        }
    }
    LemmaSuiteOptions lo;
    lo.set_lemmas = bool_field(p, "set_lemmas", "set_lemmas", true);
    return oracle_outcome(lemma_suite(instance, ctxs, lo));
}

/** Re-encodes an expected element through its carrier so comparisons are canonical. */
inline Json canonical_element(const Carrier& c, const Json& j, const std::string& where) { return element_to_json(element_from_json(c, j, where)); }

/** Canonical form of an expected witness, decoded against the law's domains and value carrier. */
inline Json canonical_witness(const Json& w, const std::vector<CarrierPtr>& doms, const CarrierPtr& value) {
    Json out = Json::object();
    if (w.contains("inputs")) {
        Json ins = Json::array();
        const auto& a = w.at("inputs");
        if (!a.is_array() || a.size() != doms.size()) fail(ErrorCode::parse_error, "expect.witness.inputs: wrong arity");
        for (std::size_t k = 0; k < doms.size(); ++k) ins.push_back(canonical_element(*doms[k], a[k], "expect.witness.inputs"));
        out["inputs"] = std::move(ins);
    }
    for (const char* k : {"lhs", "rhs", "residual"})
        if (w.contains(k)) out[k] = canonical_element(*value, w.at(k), std::string("expect.witness.") + k);
    return out;
}

inline std::vector<std::string> compare_expectations(const TaskRun& tr, const Task& t, const Outcome& out) {
    std::vector<std::string> bad;
    if (!t.expect) {
        if (out.verdict != "PASS") bad.push_back("verdict " + out.verdict + " (expected PASS)");
        return bad;
    }
    const auto& e = *t.expect;
    if (!e.is_object()) fail(ErrorCode::parse_error, t.id + ".expect: expected an object");
    for (auto it = e.begin(); it != e.end(); ++it) {
        const auto& k = it.key();
        const auto& v = it.value();
        const auto& r = out.result;
        if (k == "verdict") {
            if (v.get<std::string>() != out.verdict) bad.push_back("verdict " + out.verdict + " (expected " + v.get<std::string>() + ")");
        } else if (k == "error") {
            bad.push_back("no error raised (expected " + v.get<std::string>() + ")");
        } else if (k == "counterexamples") {
            if (r.value("counterexample_count", std::uint64_t(0)) != v.get<std::uint64_t>())
                bad.push_back("counterexamples " + r["counterexample_count"].dump() + " (expected " + v.dump() + ")");
        } else if (k == "count") {
            if (!r.contains("count") || r["count"] != v) bad.push_back("count " + r.value("count", Json()).dump() + " (expected " + v.dump() + ")");
        } else if (k == "count_each") {
            if (r.value("min_count", Json()) != v || r.value("max_count", Json()) != v)
                bad.push_back("counts range " + r.value("min_count", Json()).dump() + ".." + r.value("max_count", Json()).dump() + " (expected " + v.dump() + ")");
        } else if (k == "holds") {
            if (r.value("holds", Json()) != v) bad.push_back("holds " + r.value("holds", Json()).dump() + " (expected " + v.dump() + ")");
        } else if (k == "tallies") {
            for (auto ti = v.begin(); ti != v.end(); ++ti)
                if (!r["tallies"].contains(ti.key()) || r["tallies"][ti.key()] != ti.value())
                    bad.push_back("tally \"" + ti.key() + "\" " + r["tallies"].value(ti.key(), Json()).dump() + " (expected " + ti.value().dump() + ")");
        } else if (k == "value") {
            const auto d = tr.map(t.params, "map");
            if (canonical_element(*d.target(), v, "expect.value") != r["value"]) bad.push_back("value " + r["value"].dump() + " (expected " + v.dump() + ")");
        } else if (k == "witness") {
            Json got;
            if (t.type == "check") {
                if (!r.contains("witnesses") || r["witnesses"].empty()) {
                    bad.push_back("no witness recorded");
                    continue;
                }
                const auto& w = r["witnesses"][0];
                const auto d = tr.map(t.params, "map");
                const auto want = canonical_witness(v, law_domains(w["law"].get<std::string>(), d), d.target());
                for (auto wi = want.begin(); wi != want.end(); ++wi)
                    if (w[wi.key()] != wi.value()) bad.push_back("witness " + wi.key() + " " + w[wi.key()].dump() + " (expected " + wi.value().dump() + ")");
            } else if (t.type == "fact") {
                if (!r.contains("witness")) bad.push_back("no witness recorded");
            } else if (t.type == "inclusion") {
                const auto d = tr.map(t.params, "map");
                if (!r.contains("witness")) {
                    bad.push_back("no witness recorded");
                    continue;
                }
                if (v.contains("input") && canonical_element(*d.source(), v["input"], "expect.witness.input") != r["witness"]["input"])
                    bad.push_back("witness input " + r["witness"]["input"].dump() + " (expected " + v["input"].dump() + ")");
                if (v.contains("value") && canonical_element(*d.target(), v["value"], "expect.witness.value") != r["witness"]["value"])
                    bad.push_back("witness value " + r["witness"]["value"].dump() + " (expected " + v["value"].dump() + ")");
            }
        } else {
            fail(ErrorCode::parse_error, t.id + ".expect: unknown expectation \"" + k + "\"");
        }
    }
    return bad;
}

} // namespace detail

/** Executes the scenario's tasks in order and assembles the report; see exit_code_for for status priorities. */
inline RunResult run_scenario(Scenario& s, const RunOptions& opt = {}) {
    detail::TaskRun tr{s, opt, s.probe};
    if (opt.seed) tr.probe.seed = *opt.seed;
    if (opt.probe_degree) tr.probe.max_degree = *opt.probe_degree;
    detail::Resolver resolver(s, {}, {}, {});
    tr.resolver = &resolver;
    Json tasks = Json::array();
    int code = exit_pass;
    auto raise = [&](int c) {
        auto rank = [](int x) { return x == exit_usage ? 3 : x == exit_hypothesis ? 2 : x == exit_mismatch ? 1 : 0; };
        if (rank(c) > rank(code)) code = c;
    };
    std::uint64_t passed = 0, mismatched = 0, errors = 0;
    for (const auto& t : s.tasks) {
        if (!opt.types.empty() && !opt.types.count(t.type)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Json rec{{"id", t.id}, {"type", t.type}};
        if (t.expect) rec["expected"] = *t.expect;
        try {
            detail::Outcome out;
            if (t.type == "check") out = detail::run_check(tr, t.params);
            else if (t.type == "evaluate") out = detail::run_evaluate(tr, t.params);
            else if (t.type == "fact") out = detail::run_fact(tr, t.params);
            else if (t.type == "inclusion") out = detail::run_inclusion(tr, t.params);
            else if (t.type == "enumerate") out = detail::run_enumerate(tr, t.params);
            else if (t.type == "oracle") out = detail::run_oracle(tr, t.params, t.id);
            else out = detail::run_lemma_suite(tr, t.params, t.id);
            const auto bad = detail::compare_expectations(tr, t, out);
            rec["verdict"] = out.verdict;
            rec["matches"] = bad.empty();
            if (!bad.empty()) {
                rec["mismatches"] = bad;
                raise(exit_mismatch);
                ++mismatched;
            } else {
                ++passed;
            }
            rec["result"] = std::move(out.result);
        } catch (const Error& e) {
            rec["verdict"] = "ERROR";
            rec["error"] = Json{{"code", std::string(error_name(e.code()))}, {"message", e.what()}};
            if (auto* be = dynamic_cast<const BudgetExceeded*>(&e)) rec["error"]["partial_count"] = be->partial().count;
            const bool expected = t.expect && t.expect->contains("error") && (*t.expect)["error"] == std::string(error_name(e.code()));
            rec["matches"] = expected;
            if (expected) {
                ++passed;
            } else {
                raise(exit_code_for(e.code()));
                ++errors;
            }
        }
        rec["elapsed_ms"] = detail::ms_since(t0);
        tasks.push_back(std::move(rec));
    }
    Json report{{"scenario", s.name},
                {"options", Json{{"seed", tr.probe.seed}, {"probe_degree", tr.probe.max_degree}, {"budget", opt.budget ? Json(*opt.budget) : Json()}}},
                {"status", code == exit_pass ? "pass" : code == exit_mismatch ? "fail" : code == exit_hypothesis ? "hypothesis_failed" : "usage_error"},
                {"exit_code", code},
                {"summary", Json{{"tasks", tasks.size()}, {"matched", passed}, {"mismatched", mismatched}, {"errors", errors}}},
                {"tasks", std::move(tasks)}};
    return {code, std::move(report)};
}

/**
 * Re-evaluates every check witness in a report through the library and
 * returns the task ids whose recorded residual does not reproduce.
 */
inline std::vector<std::string> reevaluate_witnesses(const Scenario& s, const Json& report) {
    std::vector<std::string> bad;
    std::map<std::string, const Task*> by_id;
    for (const auto& t : s.tasks) by_id[t.id] = &t;
    for (const auto& rec : report.at("tasks")) {
        if (rec.at("type") != "check" || !rec.contains("result")) continue;
        const auto* t = by_id.at(rec.at("id").get<std::string>());
        const auto& p = t->params;
        auto get = [&](const std::string& k) -> std::optional<AdditiveMap> {
            if (!p.contains(k)) return std::nullopt;
            const auto& v = p.at(k);
            if (v.is_string()) return s.map(v.get<std::string>());
            detail::Resolver r(const_cast<Scenario&>(s), {}, {}, {});
            return r.map_ref(v, k);
        };
        const auto d = *get("map");
        const auto f = get("f");
        const auto delta = get("delta");
        for (const auto& w : rec.at("result").at("witnesses")) {
            const auto law = w.at("law").get<std::string>();
            const auto doms = detail::law_domains(law, d);
            std::vector<Element> in;
            for (std::size_t k = 0; k < doms.size(); ++k) in.push_back(element_from_json(*doms[k], w.at("inputs").at(k), "witness"));
            auto [lhs, rhs] = evaluate_law(law, d, f ? &*f : nullptr, delta ? &*delta : nullptr, in);
            const auto residual = d.target()->sub(lhs, rhs);
            if (element_to_json(residual) != w.at("residual")) bad.push_back(rec.at("id").get<std::string>());
        }
    }
    return bad;
}

namespace detail {

/** JSON with [n, 1] rationals shortened to n, for text output. */
inline std::string compact(const Json& j) {
    std::function<Json(const Json&)> go = [&](const Json& v) -> Json {
        if (v.is_array()) {
            if (v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer()) {
                if (v[1].get<std::int64_t>() == 1) return v[0];
                return v[0].dump() + "/" + v[1].dump();
            }
            Json a = Json::array();
            for (const auto& x : v) a.push_back(go(x));
            return a;
        }
        if (v.is_object()) {
            Json o = Json::object();
            for (auto it = v.begin(); it != v.end(); ++it) o[it.key()] = go(it.value());
            return o;
        }
        return v;
    };
    return go(j).dump();
}

} // namespace detail

/** Human-readable rendering of a run report; rationals print as n or "n/d". */
inline std::string render_text(const Json& report) {
    using detail::compact;
    std::ostringstream o;
    o << "scenario " << report.value("scenario", std::string("?")) << ": " << report.value("status", std::string("?")) << " (exit "
      << report.value("exit_code", 0) << ")\n";
    for (const auto& t : report.at("tasks")) {
        o << "  [" << t.value("type", std::string()) << "] " << t.value("id", std::string()) << ": " << t.value("verdict", std::string());
        o << (t.value("matches", false) ? "" : "  MISMATCH") << "\n";
        if (t.contains("mismatches"))
            for (const auto& m : t["mismatches"]) o << "      mismatch: " << m.get<std::string>() << "\n";
        if (t.contains("result") && t["result"].contains("witness") && t["result"]["witness"].is_array())
            o << "      witness " << compact(t["result"]["witness"]) << "\n";
        if (t.contains("error")) o << "      error: " << t["error"]["message"].get<std::string>() << "\n";
        if (!t.contains("result")) continue;
        const auto& r = t["result"];
        if (r.contains("strategy") && r.contains("inputs_tested"))
            o << "      " << r["strategy"].get<std::string>() << ", " << r["inputs_tested"] << " inputs\n";
        if (r.contains("witnesses") && !r["witnesses"].empty()) {
            const auto& w = r["witnesses"][0];
            o << "      witness " << compact(w["inputs"]) << ": lhs " << compact(w["lhs"]) << ", rhs " << compact(w["rhs"]) << ", residual "
              << compact(w["residual"]) << "\n";
        }
        if (r.contains("value")) o << "      value " << compact(r["value"]) << "\n";
        if (r.contains("witness") && r["witness"].is_object()) o << "      witness " << compact(r["witness"]) << "\n";
        if (r.contains("count")) o << "      count " << r["count"] << " (" << r.value("method", std::string()) << ")\n";
        if (r.contains("per_delta")) o << "      counts " << r["min_count"] << ".." << r["max_count"] << " over " << r["deltas"] << " deltas\n";
        if (r.contains("counterexample_count")) {
            o << "      counterexamples " << r["counterexample_count"] << "\n";
            for (auto it = r["tallies"].begin(); it != r["tallies"].end(); ++it) o << "      " << it.key() << ": " << it.value() << "\n";
        }
        if (r.contains("lemmas")) {
            std::map<std::string, std::array<std::uint64_t, 3>> agg;
            for (const auto& l : r["lemmas"]) {
                auto& a = agg[l["lemma"].get<std::string>()];
                const auto v = l["verdict"].get<std::string>();
                ++a[v == "PASS" ? 0 : v == "FAIL" ? 1 : 2];
            }
            for (const auto& [name, a] : agg)
                o << "      " << name << ": " << a[0] << " pass, " << a[1] << " fail, " << a[2] << " skipped\n";
        }
    }
    return o.str();
}

} // namespace dfderiv
