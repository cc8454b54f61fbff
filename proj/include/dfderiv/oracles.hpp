#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dfderiv/enumeration.hpp"
#include "dfderiv/jordan.hpp"
#include "dfderiv/structure.hpp"

namespace dfderiv {

/** Cap on counterexamples stored per report; the count is always exact. */
inline constexpr std::size_t counterexample_cap = 20;

struct Counterexample {
    std::string first, second; // labels of the quantified objects
    std::string reason;
    std::vector<Element> witness;
};

struct LemmaVerdict {
    std::string lemma;
    std::string context;
    std::string strategy; // exhaustive, probe-complete, skipped
    bool gating = true;
    bool skipped = false;
    std::string skip_reason;
    std::uint64_t inputs_tested = 0;
    std::uint64_t hypothesis_filtered = 0;
    std::uint64_t failures = 0;
    std::vector<Witness> witnesses;

    bool pass() const { return skipped || failures == 0; }
};

struct OracleReport {
    std::string oracle;
    std::string instance;
    std::vector<std::pair<std::string, std::uint64_t>> quantifiers;
    std::vector<std::pair<std::string, std::uint64_t>> tallies;
    std::vector<Counterexample> counterexamples;
    std::uint64_t counterexample_count = 0;
    std::vector<StructuralFact> hypotheses;
    std::vector<LemmaVerdict> lemmas;
    std::vector<std::string> notes;
    double elapsed_ms = 0;

    bool pass() const {
        if (counterexample_count) return false;
        for (const auto& l : lemmas)
            if (l.gating && !l.pass()) return false;
        return true;
    }
    void tally(const std::string& name, std::uint64_t n) {
        for (auto& [k, v] : tallies)
            if (k == name) {
                v += n;
                return;
            }
        tallies.emplace_back(name, n);
    }
    std::uint64_t tally_of(const std::string& name) const {
        for (const auto& [k, v] : tallies)
            if (k == name) return v;
        return 0;
    }
    void add_counterexample(Counterexample c) {
        ++counterexample_count;
        if (counterexamples.size() < counterexample_cap) counterexamples.push_back(std::move(c));
    }
};

struct NamedMap {
    std::string label;
    AdditiveMap map;
};

/** A validated (δ, f, d) triple in table form over a finite module M over R. */
struct DfTriple {
    std::string delta_label, f_label, d_label;
    std::vector<Index> delta, f, d;
    bool d_zero = false;
    bool d_endo = false;

    std::string label() const { return "delta=" + delta_label + ", f=" + f_label + ", d=" + d_label; }
};

struct DfFamily {
    CarrierPtr module;
    std::vector<DfTriple> triples;
    std::uint64_t deltas = 0, fs = 0;
};

namespace detail {

inline void hypothesis(OracleReport& rep, StructuralFact fact) {
    const bool ok = fact.holds();
    std::string what = fact.subject + " " + fact.predicate;
    std::string w;
    for (const auto& e : fact.witness) w += (w.empty() ? "" : ", ") + to_string(e);
    rep.hypotheses.push_back(std::move(fact));
    if (!ok) fail(ErrorCode::hypothesis_failed, "hypothesis fails: " + what + (w.empty() ? "" : " (witness " + w + ")"));
}

inline StructuralFact fact_from_report(const std::string& subject, const std::string& predicate, const VerificationReport& r) {
    StructuralFact f{subject, predicate, r.pass ? Verdict::holds : Verdict::fails, {}, {}};
    if (!r.pass && !r.witnesses.empty()) {
        f.witness = r.witnesses.front().inputs;
        f.note = describe_witness(r.witnesses.front());
    }
    return f;
}

/** M/L is 2-torsion-free: 2x ∈ L implies x ∈ L. */
inline StructuralFact quotient_two_torsion_free(const Substructure& l, const std::string& subject) {
    const auto& t = l.parent()->tables();
    for (std::size_t x = 0; x < t.n; ++x)
        if (!l.contains_index(Index(x)) && l.contains_index(t.plus(Index(x), Index(x))))
            return {subject, "two_torsion_free", Verdict::fails, {t.elements[x]}, "2x lies in the submodule but x does not"};
    return {subject, "two_torsion_free", Verdict::holds, {}, {}};
}

inline bool surjective(const AdditiveMap& f) {
    const auto& t = f.table();
    std::vector<char> hit(f.target()->tables().n, 0);
    for (auto v : t) hit[v] = 1;
    return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

inline bool is_zero_table(const std::vector<Index>& t, Index zero) {
    return std::all_of(t.begin(), t.end(), [&](Index v) { return v == zero; });
}

/** d(xa) = d(x)a for every x, a. */
inline bool is_endo_table(const std::vector<Index>& d, const FiniteTables& mt) {
    for (std::size_t x = 0; x < mt.n; ++x)
        for (std::size_t a = 0; a < mt.rn; ++a)
            if (d[mt.right(Index(x), Index(a))] != mt.right(d[x], Index(a))) return false;
    return true;
}

inline std::string d_label(const CarrierPtr& m, const std::vector<Index>& d, std::optional<Index> g, std::size_t k) {
    if (g) return "d[" + to_string(m->at(*g)) + " -> " + to_string(m->at(d[*g])) + "]";
    return "d#" + std::to_string(k);
}

} // namespace detail

/** Distinct inner derivations ad(B) of a finite ring, labelled by the first B in enumeration order. */
inline std::vector<NamedMap> inner_derivation_family(const CarrierPtr& r) {
    std::vector<NamedMap> out;
    std::set<std::vector<Index>> seen;
    for (const auto& b : r->enumerate()) {
        auto d = inner_derivation(r, b);
        if (seen.insert(d.table()).second) out.push_back({"ad(" + to_string(b) + ")", d});
    }
    return out;
}

/** All derivations of a finite ring, by enumeration. */
inline std::vector<NamedMap> derivation_family(const CarrierPtr& r) {
    auto res = enumerate_additive_maps({r, r, {}, {Constraint::derivation()}});
    std::vector<NamedMap> out;
    auto maps = res.maps("der", {Role::derivation, {}, {}});
    for (std::size_t i = 0; i < maps.size(); ++i) out.push_back({maps[i].name(), maps[i]});
    return out;
}

/** x ↦ u·x for every unit u of a finite ring acting on M from the left. */
inline std::vector<NamedMap> unit_left_mult_family(const CarrierPtr& m) {
    auto r = m->acting_ring();
    const auto& t = r->tables();
    std::vector<NamedMap> out;
    for (std::size_t u = 0; u < t.n; ++u) {
        bool unit = false;
        for (std::size_t v = 0; v < t.n && !unit; ++v) unit = t.times(Index(u), Index(v)) == t.one && t.times(Index(v), Index(u)) == t.one;
        if (unit) out.push_back({"left_mult(" + to_string(t.elements[u]) + ")", left_mult(m, t.elements[u])});
    }
    return out;
}

/** x ↦ c·x for every central c of S. */
inline std::vector<NamedMap> central_scaling_family(const CarrierPtr& s, const CarrierPtr& m) {
    std::vector<NamedMap> out;
    for (const auto& c : center(s)) out.push_back({"central_scale(" + to_string(c) + ")", central_scale(s, m, c)});
    return out;
}

/**
 * Validated (δ, f, d) triples: δ derivations, f module epimorphisms and every
 * (δ,f)-derivation d. Invalid δ or f raise HypothesisFailed.
 */
inline DfFamily df_family(const CarrierPtr& m, const std::vector<NamedMap>& deltas, const std::vector<NamedMap>& fs, std::size_t partitions = 1) {
    DfFamily fam;
    fam.module = m;
    fam.deltas = deltas.size();
    fam.fs = fs.size();
    const auto& mt = m->tables();
    for (const auto& d : deltas)
        if (!check_derivation(d.map).pass) fail(ErrorCode::hypothesis_failed, d.label + " is not a derivation");
    for (const auto& f : fs) {
        if (!check_module_hom(f.map).pass) fail(ErrorCode::hypothesis_failed, f.label + " is not a module homomorphism");
        if (!detail::surjective(f.map)) fail(ErrorCode::hypothesis_failed, f.label + " is not an epimorphism");
    }
    const auto g = detail::cyclic_generator(*m);
    for (const auto& d : deltas)
        for (const auto& f : fs) {
            DfEnumerationOptions o;
            o.trusted = true;
            o.partitions = partitions;
            auto res = enumerate_df_derivations(d.map, f.map, o);
            for (std::size_t k = 0; k < res.tables.size(); ++k) {
                DfTriple t;
                t.delta_label = d.label;
                t.f_label = f.label;
                t.delta = d.map.table();
                t.f = f.map.table();
                t.d = res.tables[k];
                t.d_label = detail::d_label(m, t.d, g, k);
                t.d_zero = detail::is_zero_table(t.d, mt.zero);
                t.d_endo = detail::is_endo_table(t.d, mt);
                fam.triples.push_back(std::move(t));
            }
        }
    return fam;
}

namespace detail {

/** d1d2(xa) = d1d2(x)a + f1f2(x)δ1δ2(a) everywhere; returns the first failing (x, a). */
inline std::optional<std::pair<Index, Index>> composite_df_failure(const DfTriple& t1, const DfTriple& t2, const FiniteTables& mt) {
    for (std::size_t x = 0; x < mt.n; ++x) {
        const Index dx = t1.d[t2.d[x]];
        const Index fx = t1.f[t2.f[x]];
        for (std::size_t a = 0; a < mt.rn; ++a) {
            const Index lhs = t1.d[t2.d[mt.right(Index(x), Index(a))]];
            const Index rhs = mt.plus(mt.right(dx, Index(a)), mt.right(fx, t1.delta[t2.delta[a]]));
            if (lhs != rhs) return std::pair{Index(x), Index(a)};
        }
    }
    return std::nullopt;
}

struct PosnerTally {
    std::uint64_t pairs = 0, p_true = 0;
    std::uint64_t br1 = 0, br2 = 0, br3 = 0, neither = 0;
    std::uint64_t ring_skipped = 0, ring_d1 = 0, ring_d2 = 0;
    std::uint64_t comp_count = 0, ring_count = 0;
    std::vector<Counterexample> comp, ring;
};

inline void posner_pair(const DfTriple& a, const DfTriple& b, const CarrierPtr& m, PosnerTally& t) {
    const auto& mt = m->tables();
    ++t.pairs;
    const auto failure = composite_df_failure(a, b, mt);
    const bool p = !failure;
    const bool q = a.d_zero || b.d_zero || (a.d_endo && b.d_endo);
    if (p) {
        ++t.p_true;
        if (a.d_zero)
            ++t.br1;
        else if (b.d_zero)
            ++t.br2;
        else if (a.d_endo && b.d_endo)
            ++t.br3;
    } else if (!q) {
        ++t.neither;
    }
    auto nonzero_witness = [&](const DfTriple& x) {
        for (std::size_t i = 0; i < mt.n; ++i)
            if (x.d[i] != mt.zero) return mt.elements[i];
        return mt.elements[mt.zero];
    };
    if (p != q) {
        ++t.comp_count;
        if (t.comp.size() < counterexample_cap) {
            Counterexample c{a.label(), b.label(), {}, {}};
            if (p) {
                c.reason = "composite is a (d1d2)-law derivation but no branch holds";
                c.witness = {nonzero_witness(a), nonzero_witness(b)};
            } else {
                c.reason = "a branch holds but the composite law fails";
                c.witness = {mt.elements[failure->first], m->acting_ring()->at(failure->second)};
            }
            t.comp.push_back(std::move(c));
        }
    }
    if (!p) {
        ++t.ring_skipped;
    } else if (a.d_zero) {
        ++t.ring_d1;
    } else if (b.d_zero) {
        ++t.ring_d2;
    } else {
        ++t.ring_count;
        if (t.ring.size() < counterexample_cap)
            t.ring.push_back({a.label(), b.label(), "composite law holds with d1 != 0 and d2 != 0", {nonzero_witness(a), nonzero_witness(b)}});
    }
}

inline void merge_tally(PosnerTally& into, PosnerTally&& p) {
    into.pairs += p.pairs;
    into.p_true += p.p_true;
    into.br1 += p.br1;
    into.br2 += p.br2;
    into.br3 += p.br3;
    into.neither += p.neither;
    into.ring_skipped += p.ring_skipped;
    into.ring_d1 += p.ring_d1;
    into.ring_d2 += p.ring_d2;
    into.comp_count += p.comp_count;
    into.ring_count += p.ring_count;
    for (auto& c : p.comp)
        if (into.comp.size() < counterexample_cap) into.comp.push_back(std::move(c));
    for (auto& c : p.ring)
        if (into.ring.size() < counterexample_cap) into.ring.push_back(std::move(c));
}

inline std::pair<OracleReport, OracleReport> posner_reports(const std::string& instance, const PosnerTally& t) {
    OracleReport comp;
    comp.oracle = "posner_composition";
    comp.instance = instance;
    comp.tally("pairs where the composite law holds", t.p_true);
    comp.tally("branch d1 = 0", t.br1);
    comp.tally("branch d2 = 0", t.br2);
    comp.tally("branch both endomorphisms", t.br3);
    comp.tally("composite fails, no branch", t.neither);
    comp.counterexample_count = t.comp_count;
    comp.counterexamples = t.comp;
    OracleReport ring;
    ring.oracle = "posner_ring";
    ring.instance = instance;
    ring.tally("antecedent fails (skipped)", t.ring_skipped);
    ring.tally("d1 = 0", t.ring_d1);
    ring.tally("d2 = 0", t.ring_d2);
    ring.counterexample_count = t.ring_count;
    ring.counterexamples = t.ring;
    return {std::move(comp), std::move(ring)};
}

inline void posner_hypotheses(OracleReport& rep, const CarrierPtr& m, bool ring_form) {
    if (ring_form) {
        detail::hypothesis(rep, is_two_torsion_free(m));
        detail::hypothesis(rep, is_prime_ring(m));
    } else {
        detail::hypothesis(rep, is_two_torsion_free(m));
        detail::hypothesis(rep, is_prime_module(m));
    }
}

} // namespace detail

struct PosnerResult {
    OracleReport composition; // the biconditional over ordered pairs of triples
    OracleReport ring;        // the implication "d1 = 0 or d2 = 0"
};

/**
 * Both Posner-type oracles over every ordered pair of triples of one family.
 * M must be finite, prime and 2-torsion-free; the ring oracle additionally
 * needs M to be the ring itself.
 */
inline PosnerResult posner_oracles(const std::string& instance, const DfFamily& fam, std::size_t partitions = 1) {
    auto t0 = std::chrono::steady_clock::now();
    const auto& m = fam.module;
    OracleReport hyp;
    detail::posner_hypotheses(hyp, m, false);
    const bool ring_form = m->is_ring();
    if (ring_form) detail::hypothesis(hyp, is_prime_ring(m));
    const std::size_t n = fam.triples.size();
    auto parts = run_partitioned(n, partitions, [&](std::size_t b, std::size_t e) {
        detail::PosnerTally t;
        for (std::size_t i = b; i < e; ++i)
            for (std::size_t j = 0; j < n; ++j) detail::posner_pair(fam.triples[i], fam.triples[j], m, t);
        return t;
    });
    detail::PosnerTally total;
    for (auto& p : parts) detail::merge_tally(total, std::move(p));
    auto [comp, ring] = detail::posner_reports(instance, total);
    for (auto* r : {&comp, &ring}) {
        r->hypotheses = hyp.hypotheses;
        r->quantifiers = {{"deltas", fam.deltas}, {"fs", fam.fs}, {"triples", n}, {"pairs", total.pairs}};
        r->elapsed_ms = detail::ms_since(t0);
    }
    if (!ring_form) {
        ring.notes.push_back("module is not the ring itself; ring oracle not applicable");
    }
    return {std::move(comp), std::move(ring)};
}

inline OracleReport posner_composition_oracle(const std::string& instance, const DfFamily& fam, std::size_t partitions = 1) {
    return posner_oracles(instance, fam, partitions).composition;
}

inline OracleReport posner_ring_oracle(const std::string& instance, const DfFamily& fam, std::size_t partitions = 1) {
    if (!fam.module->is_ring()) fail(ErrorCode::hypothesis_failed, "posner_ring_oracle needs R as a module over itself");
    return posner_oracles(instance, fam, partitions).ring;
}

/**
 * Seeded sampling over triples (δ, f = left multiplication by a unit u,
 * d(a) = t·a + u·δ(a)) on a finite ring R as a module over itself.
 */
inline PosnerResult posner_sampled(const std::string& instance, const CarrierPtr& r, const std::vector<NamedMap>& deltas,
                                   const std::vector<NamedMap>& units, std::uint64_t samples, std::uint64_t seed) {
    auto t0 = std::chrono::steady_clock::now();
    OracleReport hyp;
    detail::posner_hypotheses(hyp, r, true);
    const auto& t = r->tables();
    for (const auto& d : deltas)
        if (!check_derivation(d.map).pass) fail(ErrorCode::hypothesis_failed, d.label + " is not a derivation");
    for (const auto& f : units)
        if (!check_module_hom(f.map).pass || !detail::surjective(f.map)) fail(ErrorCode::hypothesis_failed, f.label + " is not an epimorphism");
    auto rng = seeded_rng(seed, r->signature(), "posner sampled pairs");
    auto make = [&](std::size_t di, std::size_t ui, Index tv) {
        DfTriple x;
        x.delta_label = deltas[di].label;
        x.f_label = units[ui].label;
        x.delta = deltas[di].map.table();
        x.f = units[ui].map.table();
        const Index u = x.f[t.one];
        x.d.resize(t.n);
        for (std::size_t a = 0; a < t.n; ++a) x.d[a] = t.plus(t.times(tv, Index(a)), t.times(u, x.delta[a]));
        x.d_label = "d[" + to_string(t.elements[t.one]) + " -> " + to_string(t.elements[tv]) + "]";
        x.d_zero = detail::is_zero_table(x.d, t.zero);
        x.d_endo = detail::is_endo_table(x.d, t);
        // Each sampled d is checked against the (δ,f)-law before use.
        for (std::size_t p = 0; p < t.n; ++p)
            for (std::size_t a = 0; a < t.n; ++a)
                if (x.d[t.times(Index(p), Index(a))] != t.plus(t.times(x.d[p], Index(a)), t.times(x.f[p], x.delta[a])))
                    fail(ErrorCode::hypothesis_failed, "sampled map is not a (delta,f)-derivation: " + x.label());
        return x;
    };
    detail::PosnerTally total;
    for (std::uint64_t s = 0; s < samples; ++s) {
        std::size_t d1 = rng() % deltas.size(), u1 = rng() % units.size();
        Index v1 = Index(rng() % t.n);
        std::size_t d2 = rng() % deltas.size(), u2 = rng() % units.size();
        Index v2 = Index(rng() % t.n);
        detail::posner_pair(make(d1, u1, v1), make(d2, u2, v2), r, total);
    }
    auto [comp, ring] = detail::posner_reports(instance, total);
    for (auto* rep : {&comp, &ring}) {
        rep->hypotheses = hyp.hypotheses;
        rep->quantifiers = {{"deltas", deltas.size()}, {"fs", units.size()}, {"ds per (delta,f)", t.n}, {"sampled pairs", samples}};
        rep->notes.push_back("seeded sampling, seed " + std::to_string(seed));
        rep->elapsed_ms = detail::ms_since(t0);
    }
    return {std::move(comp), std::move(ring)};
}

/**
 * If d1d2(M) ⊆ L and δ1δ2(R) ⊆ (L:M), then d1(M) ⊆ L, or d2(M) ⊆ L, or
 * neither and δ1(R), δ2(R) ⊆ (L:M). L must be prime and M/L 2-torsion-free.
 */
inline OracleReport creedon_oracle(const std::string& instance, const DfFamily& fam, const Substructure& l, std::size_t partitions = 1) {
    auto t0 = std::chrono::steady_clock::now();
    const auto& m = fam.module;
    detail::require_same(*l.parent(), *m, "creedon_oracle");
    OracleReport rep;
    rep.oracle = "creedon";
    rep.instance = instance;
    detail::hypothesis(rep, is_prime_submodule(l, m));
    detail::hypothesis(rep, detail::quotient_two_torsion_free(l, m->id() + "/L"));
    const auto colon = colon_ideal(l, m);
    const auto& mt = m->tables();
    const auto& rt = m->acting_ring()->tables();
    const std::size_t n = fam.triples.size();
    std::vector<char> d_in(n), delta_in(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& t = fam.triples[i];
        d_in[i] = std::all_of(t.d.begin(), t.d.end(), [&](Index v) { return l.contains_index(v); });
        delta_in[i] = std::all_of(t.delta.begin(), t.delta.end(), [&](Index v) { return colon.contains_index(v); });
    }
    struct Part {
        std::uint64_t pairs = 0, skipped = 0, b1 = 0, b2 = 0, b3 = 0, count = 0;
        std::vector<Counterexample> ce;
    };
    auto parts = run_partitioned(n, partitions, [&](std::size_t b, std::size_t e) {
        Part p;
        for (std::size_t i = b; i < e; ++i) {
            const auto& t1 = fam.triples[i];
            for (std::size_t j = 0; j < n; ++j) {
                const auto& t2 = fam.triples[j];
                ++p.pairs;
                bool ante = true;
                for (std::size_t x = 0; x < mt.n && ante; ++x) ante = l.contains_index(t1.d[t2.d[x]]);
                for (std::size_t a = 0; a < rt.n && ante; ++a) ante = colon.contains_index(t1.delta[t2.delta[a]]);
                if (!ante) {
                    ++p.skipped;
                    continue;
                }
                if (d_in[i])
                    ++p.b1;
                else if (d_in[j])
                    ++p.b2;
                else if (delta_in[i] && delta_in[j])
                    ++p.b3;
                else {
                    ++p.count;
                    if (p.ce.size() < counterexample_cap) p.ce.push_back({t1.label(), t2.label(), "antecedent holds but no branch does", {}});
                }
            }
        }
        return p;
    });
    std::uint64_t pairs = 0;
    for (auto& p : parts) {
        pairs += p.pairs;
        rep.tally("antecedent fails (skipped)", p.skipped);
        rep.tally("branch d1(M) in L", p.b1);
        rep.tally("branch d2(M) in L", p.b2);
        rep.tally("branch deltas into (L:M)", p.b3);
        for (auto& c : p.ce) rep.add_counterexample(std::move(c));
        rep.counterexample_count += p.count - std::min<std::uint64_t>(p.count, p.ce.size());
    }
    rep.quantifiers = {{"deltas", fam.deltas}, {"fs", fam.fs}, {"triples", n}, {"pairs", pairs}, {"|L|", l.size()}, {"|(L:M)|", colon.size()}};
    rep.elapsed_ms = detail::ms_since(t0);
    return rep;
}

/**
 * For every (δ, f): every Jordan (δ,f)-derivation is a (δ,f)-derivation, and
 * the two enumerated classes coincide. Needs S a prime algebra and M a
 * 2-torsion-free jointly prime bimodule.
 */
inline OracleReport jordan_implies_derivation_oracle(const std::string& instance, const std::vector<NamedMap>& deltas, const std::vector<NamedMap>& fs,
                                                     std::size_t partitions = 1, std::uint64_t budget = default_budget) {
    auto t0 = std::chrono::steady_clock::now();
    if (deltas.empty() || fs.empty()) fail(ErrorCode::malformed_descriptor, "jordan oracle needs nonempty families");
    const auto s = fs.front().map.source();
    const auto m = fs.front().map.target();
    OracleReport rep;
    rep.oracle = "jordan_implies_derivation";
    rep.instance = instance;
    detail::hypothesis(rep, is_prime_algebra(s));
    detail::hypothesis(rep, is_two_torsion_free(m));
    detail::hypothesis(rep, is_jointly_prime(m));
    for (const auto& d : deltas)
        detail::hypothesis(rep, detail::fact_from_report(d.label, "derivation", check_derivation(d.map)));
    for (const auto& f : fs)
        detail::hypothesis(rep, detail::fact_from_report(f.label, "bimodule_hom", check_bimodule_hom(f.map)));
    const auto& st = s->tables();
    const auto& mt = m->tables();
    std::uint64_t jordan_total = 0, df_total = 0, checked = 0;
    for (const auto& d : deltas)
        for (const auto& f : fs) {
            DfEnumerationOptions o;
            o.trusted = true;
            o.partitions = partitions;
            o.budget = budget;
            auto jd = enumerate_jordan_df_derivations(d.map, f.map, o);
            auto df = enumerate_df_derivations(d.map, f.map, o);
            jordan_total += jd.count;
            df_total += df.count;
            const auto& ft = f.map.table();
            const auto& dt = d.map.table();
            const std::string pair = d.label + ", " + f.label;
            for (const auto& tab : jd.tables) {
                ++checked;
                std::optional<std::pair<Index, Index>> bad;
                for (std::size_t x = 0; x < st.n && !bad; ++x)
                    for (std::size_t a = 0; a < st.n && !bad; ++a)
                        if (tab[st.times(Index(x), Index(a))] != mt.plus(mt.right(tab[x], Index(a)), mt.right(ft[x], dt[a])))
                            bad = std::pair{Index(x), Index(a)};
                if (bad) {
                    rep.add_counterexample({pair, "D[" + to_string(st.elements[st.one]) + " -> " + to_string(mt.elements[tab[st.one]]) + "]",
                                            "Jordan map fails the (delta,f)-law", {st.elements[bad->first], st.elements[bad->second]}});
                }
            }
            auto a = jd.tables;
            auto b = df.tables;
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            if (a != b)
                rep.add_counterexample({pair, "", "Jordan count " + std::to_string(jd.count) + " vs (delta,f) count " + std::to_string(df.count), {}});
        }
    rep.quantifiers = {{"deltas", deltas.size()}, {"fs", fs.size()}, {"pairs", deltas.size() * fs.size()}};
    rep.tally("Jordan maps", jordan_total);
    rep.tally("(delta,f)-derivations", df_total);
    rep.tally("Jordan maps checked against the (delta,f)-law", checked);
    rep.elapsed_ms = detail::ms_since(t0);
    return rep;
}

// ---------------------------------------------------------------------------
// Lemma suite

struct LemmaContext {
    std::string label;
    BracketContext ctx;
};

namespace detail {

/** Variable-arity probe tuples: basis^k, then zipped seeded samples. */
inline std::vector<std::vector<Element>> probe_tuples_k(const Carrier& s, std::size_t k, const ProbeSpec& p, const std::string& purpose) {
    std::vector<std::vector<Element>> out;
    const auto basis = s.probe_basis(p);
    std::vector<std::size_t> idx(k, 0);
    if (!basis.empty()) {
        while (true) {
            std::vector<Element> t;
            for (auto i : idx) t.push_back(basis[i]);
            out.push_back(std::move(t));
            std::size_t d = k;
            bool done = true;
            while (d > 0) {
                --d;
                if (++idx[d] < basis.size()) {
                    done = false;
                    break;
                }
                idx[d] = 0;
            }
            if (done) break;
        }
    }
    auto rng = seeded_rng(p.seed, s.signature(), purpose);
    for (std::size_t i = 0; i < p.random_samples; ++i) {
        std::vector<Element> t;
        for (std::size_t j = 0; j < k; ++j) t.push_back(s.random_element(rng, p));
        out.push_back(std::move(t));
    }
    return out;
}

/** Records a nonzero residual; lhs is the residual and rhs the zero it should equal. */
inline void record_failure(LemmaVerdict& v, std::vector<Element> in, const Element& residual, const Element& zero, std::size_t max_witnesses) {
    ++v.failures;
    if (v.witnesses.size() >= max_witnesses) return;
    Witness w;
    w.law = v.lemma;
    w.inputs = std::move(in);
    w.residual = residual;
    w.lhs = residual;
    w.rhs = zero;
    v.witnesses.push_back(std::move(w));
}

/** Exhaustive scan of one residual lemma over S^k, filtered by its hypothesis. */
inline void scan_lemma_exhaustive(const BracketContext& ctx, LemmaId id, std::size_t slot, LemmaVerdict& v, std::size_t max_witnesses) {
    const auto o = ctx.index_ops();
    const auto& st = ctx.S()->tables();
    const auto& mt = ctx.M()->tables();
    const std::size_t k = lemma_arity(id);
    const auto& pflags = lemma_hypothesis(id) == Hypothesis::in_P ? ctx.P_flags() : std::vector<char>{};
    auto in_p = [&](Index x) { return pflags[x] != 0; };
    std::array<Index, 4> in{};
    if (id == LemmaId::L314) {
        // y^x (zw − wz): skip the (z, w) loop when the bracket vanishes.
        std::vector<Index> p;
        for (std::size_t i = 0; i < st.n; ++i)
            if (pflags[i]) p.push_back(Index(i));
        for (std::size_t x = 0; x < st.n; ++x)
            for (std::size_t y = 0; y < st.n; ++y) {
                const Index br = lemma::bracket(o, Index(y), Index(x));
                if (br == mt.zero) {
                    v.inputs_tested += p.size() * p.size();
                    continue;
                }
                for (auto z : p)
                    for (auto w : p) {
                        ++v.inputs_tested;
                        in = {Index(x), Index(y), z, w};
                        auto r = lemma::residual(o, id, in.data());
                        if (r[0] != mt.zero)
                            record_failure(v, {st.elements[x], st.elements[y], st.elements[z], st.elements[w]}, mt.elements[r[0]], mt.elements[mt.zero], max_witnesses);
                    }
            }
        v.hypothesis_filtered = std::uint64_t(st.n) * st.n * st.n * st.n - v.inputs_tested;
        return;
    }
    std::array<std::size_t, 4> pos{};
    while (true) {
        for (std::size_t i = 0; i < k; ++i) in[i] = Index(pos[i]);
        if (lemma::hypothesis_holds(o, id, in.data(), in_p)) {
            ++v.inputs_tested;
            auto r = lemma::residual(o, id, in.data());
            if (r[slot] != mt.zero) {
                std::vector<Element> ins;
                for (std::size_t i = 0; i < k; ++i) ins.push_back(st.elements[in[i]]);
                record_failure(v, std::move(ins), mt.elements[r[slot]], mt.elements[mt.zero], max_witnesses);
            }
        } else {
            ++v.hypothesis_filtered;
        }
        std::size_t d = k;
        bool done = true;
        while (d > 0) {
            --d;
            if (++pos[d] < st.n) {
                done = false;
                break;
            }
            pos[d] = 0;
        }
        if (done) break;
    }
}

inline void scan_lemma_probe(const BracketContext& ctx, LemmaId id, std::size_t slot, LemmaVerdict& v, std::size_t max_witnesses) {
    const auto o = ctx.element_ops();
    const auto zero = ctx.M()->zero();
    const auto tuples = probe_tuples_k(*ctx.S(), lemma_arity(id), ctx.options().probe, "lemma " + std::string(lemma_name(id)));
    auto in_p = [&](const Element& e) { return ctx.in_P(e); };
    for (const auto& t : tuples) {
        if (!lemma::hypothesis_holds(o, id, t.data(), in_p)) {
            ++v.hypothesis_filtered;
            continue;
        }
        ++v.inputs_tested;
        auto r = lemma::residual(o, id, t.data());
        if (!(r[slot] == zero)) record_failure(v, t, r[slot], zero, max_witnesses);
    }
}

/** Set-level lemmas over 𝒫, T(x) and the center, on finite contexts. */
inline void set_lemmas(const LemmaContext& lc, std::vector<LemmaVerdict>& out, bool jointly_prime, bool prime_algebra, std::size_t max_witnesses) {
    const auto& ctx = lc.ctx;
    const auto& st = ctx.S()->tables();
    const auto& mt = ctx.M()->tables();
    std::vector<char> central(st.n, 0);
    for (std::size_t x = 0; x < st.n; ++x) {
        bool c = true;
        for (std::size_t a = 0; a < st.n && c; ++a) c = st.times(Index(x), Index(a)) == st.times(Index(a), Index(x));
        central[x] = c;
    }
    auto verdict = [&](const std::string& name) {
        LemmaVerdict v;
        v.lemma = name;
        v.context = lc.label;
        v.strategy = "exhaustive";
        return v;
    };
    auto skip = [&](LemmaVerdict v, const std::string& why) {
        v.skipped = true;
        v.strategy = "skipped";
        v.skip_reason = why;
        return v;
    };
    // T(x) is a subbimodule for every x.
    {
        auto v = verdict("L310");
        auto v11 = verdict("L311");
        for (std::size_t x = 0; x < st.n; ++x) {
            ++v.inputs_tested;
            std::vector<char> mem(mt.n, 0);
            for (std::size_t e = 0; e < mt.n; ++e) {
                bool in = true;
                for (std::size_t a = 0; a < st.n && in; ++a)
                    in = mt.right(Index(e), st.minus(st.times(Index(x), Index(a)), st.times(Index(a), Index(x)))) == mt.zero;
                mem[e] = in;
            }
            bool closed = true;
            try {
                (void)Substructure::from_members(ctx.M(), mem, Side::two_sided);
            } catch (const Error&) {
                closed = false;
            }
            if (!closed) record_failure(v, {st.elements[x]}, ctx.M()->zero(), ctx.M()->zero(), max_witnesses);
            if (jointly_prime && !central[x]) {
                ++v11.inputs_tested;
                for (std::size_t e = 0; e < mt.n; ++e)
                    if (mem[e] && e != mt.zero) {
                        record_failure(v11, {st.elements[x]}, mt.elements[e], ctx.M()->zero(), max_witnesses);
                        break;
                    }
            }
        }
        out.push_back(std::move(v));
        out.push_back(jointly_prime ? std::move(v11) : skip(std::move(v11), "bimodule is not jointly prime"));
    }
    const bool full = jointly_prime && prime_algebra && ctx.is_jordan();
    const std::string why = !ctx.is_jordan() ? "D is not a Jordan (delta,f)-derivation" : "instance is not jointly prime over a prime algebra";
    const auto& p = ctx.P_flags();
    {
        auto v = verdict("L312");
        if (full) {
            for (std::size_t u = 0; u < st.n; ++u) {
                if (!p[u] || central[u]) continue;
                for (std::size_t w = 0; w < st.n; ++w) {
                    if (st.times(Index(w), Index(u)) != st.times(Index(u), Index(w))) continue;
                    ++v.inputs_tested;
                    if (!p[w]) record_failure(v, {st.elements[u], st.elements[w]}, ctx.M()->zero(), ctx.M()->zero(), max_witnesses);
                }
            }
            out.push_back(std::move(v));
        } else {
            out.push_back(skip(std::move(v), why));
        }
    }
    {
        auto v = verdict("L313");
        if (full) {
            for (std::size_t s = 0; s < st.n; ++s) {
                if (st.times(Index(s), Index(s)) != st.zero) continue;
                ++v.inputs_tested;
                if (!p[s]) record_failure(v, {st.elements[s]}, ctx.M()->zero(), ctx.M()->zero(), max_witnesses);
            }
            out.push_back(std::move(v));
        } else {
            out.push_back(skip(std::move(v), why));
        }
    }
}

} // namespace detail

struct LemmaSuiteOptions {
    std::size_t max_witnesses = 3;
    /** Run the set-level lemmas on finite contexts. */
    bool set_lemmas = true;
};

/**
 * Every residual lemma over its hypothesis-filtered input space for each
 * context (exhaustive on finite carriers, probe-complete otherwise), plus the
 * set-level lemmas on finite contexts. Lemmas whose hypotheses fail for a
 * context get explicit skip records.
 */
inline OracleReport lemma_suite(const std::string& instance, const std::vector<LemmaContext>& contexts, const LemmaSuiteOptions& opt = {}) {
    auto t0 = std::chrono::steady_clock::now();
    OracleReport rep;
    rep.oracle = "lemma_suite";
    rep.instance = instance;
    if (contexts.empty()) return rep;
    const auto m = contexts.front().ctx.M();
    const auto s = contexts.front().ctx.S();
    detail::hypothesis(rep, is_two_torsion_free(m));
    bool jp = false, pa = false;
    if (m->finite() && s->finite()) {
        auto j = is_jointly_prime(m);
        auto a = is_prime_algebra(s);
        jp = j.verdict == Verdict::holds;
        pa = a.verdict == Verdict::holds;
        rep.hypotheses.push_back(std::move(j));
        rep.hypotheses.push_back(std::move(a));
    }
    for (const auto& lc : contexts) {
        const auto& ctx = lc.ctx;
        const bool finite = ctx.finite();
        for (auto id : all_lemmas) {
            for (std::size_t slot = 0; slot < lemma_outputs(id); ++slot) {
                LemmaVerdict v;
                v.lemma = std::string(lemma_name(id));
                if (id == LemmaId::C331) {
                    v.lemma += slot == 0 ? "-statement" : "-proof";
                    v.gating = slot == 1;
                }
                v.context = lc.label;
                std::string why;
                if (id == LemmaId::L31) {
                    if (!ctx.satisfies_action_law()) why = "Jordan-action law fails for this context";
                } else if (id == LemmaId::T331a) {
                    // Additivity in the exponent needs only additive D, δ, f.
                } else if (!ctx.is_jordan()) {
                    why = "D is not a Jordan (delta,f)-derivation";
                }
                if (!why.empty()) {
                    v.skipped = true;
                    v.strategy = "skipped";
                    v.skip_reason = why;
                } else if (finite) {
                    v.strategy = "exhaustive";
                    detail::scan_lemma_exhaustive(ctx, id, slot, v, opt.max_witnesses);
                } else {
                    v.strategy = "probe-complete";
                    detail::scan_lemma_probe(ctx, id, slot, v, opt.max_witnesses);
                }
                rep.lemmas.push_back(std::move(v));
            }
        }
        if (finite && opt.set_lemmas) detail::set_lemmas(lc, rep.lemmas, jp, pa, opt.max_witnesses);
    }
    std::uint64_t evaluated = 0, failed = 0, skipped = 0;
    for (const auto& l : rep.lemmas) {
        evaluated += l.inputs_tested;
        if (l.skipped) ++skipped;
        if (!l.pass()) ++failed;
    }
    rep.quantifiers = {{"contexts", contexts.size()}, {"lemma runs", rep.lemmas.size()}, {"inputs evaluated", evaluated}};
    rep.tally("lemma runs failing", failed);
    rep.tally("lemma runs skipped", skipped);
    rep.elapsed_ms = detail::ms_since(t0);
    return rep;
}

/** Prime submodule L ⇒ (L:M) prime ideal, over every right submodule of a finite module. */
inline OracleReport ideal_prime_scan(const std::string& instance, const std::vector<CarrierPtr>& modules) {
    auto t0 = std::chrono::steady_clock::now();
    OracleReport rep;
    rep.oracle = "ideal_prime";
    rep.instance = instance;
    std::uint64_t subs = 0, prime = 0;
    for (const auto& m : modules) {
        auto lat = substructure_lattice(m, Side::right);
        if (!lat.complete) rep.notes.push_back(m->id() + ": submodule lattice incomplete");
        for (const auto& l : lat.members) {
            ++subs;
            if (!is_prime_submodule(l, m).holds()) continue;
            ++prime;
            auto f = is_prime_ideal(colon_ideal(l, m));
            if (!f.holds()) rep.add_counterexample({m->id(), "submodule of size " + std::to_string(l.size()), "(L:M) is not prime", l.elements()});
        }
    }
    rep.quantifiers = {{"modules", modules.size()}, {"submodules", subs}};
    rep.tally("prime submodules", prime);
    rep.elapsed_ms = detail::ms_since(t0);
    return rep;
}

/**
 * Implication scans of the endomorphism corollaries over a triple family and
 * the endomorphisms γ(x) = c·x of R as a module over itself:
 * dγ ∈ End ⇔ (d = 0 or γ = 0 or d ∈ End), and dγ = 0 ⇒ the same disjunction.
 */
inline std::pair<OracleReport, OracleReport> endomorphism_corollaries(const std::string& instance, const DfFamily& fam) {
    auto t0 = std::chrono::steady_clock::now();
    const auto& r = fam.module;
    if (!r->is_ring()) fail(ErrorCode::hypothesis_failed, "endomorphism corollaries need R as a module over itself");
    OracleReport iff, zero;
    iff.oracle = "endomorphism_iff";
    zero.oracle = "endomorphism_zero";
    iff.instance = zero.instance = instance;
    detail::posner_hypotheses(iff, r, false);
    zero.hypotheses = iff.hypotheses;
    const auto& t = r->tables();
    std::vector<std::vector<Index>> gammas;
    std::vector<std::string> glabels;
    for (std::size_t c = 0; c < t.n; ++c) {
        std::vector<Index> g(t.n);
        for (std::size_t x = 0; x < t.n; ++x) g[x] = t.times(Index(c), Index(x));
        gammas.push_back(std::move(g));
        glabels.push_back("gamma=left_mult(" + to_string(t.elements[c]) + ")");
    }
    for (const auto& tr : fam.triples)
        for (std::size_t c = 0; c < gammas.size(); ++c) {
            const auto& g = gammas[c];
            const bool g_zero = c == t.zero;
            std::vector<Index> dg(t.n);
            for (std::size_t x = 0; x < t.n; ++x) dg[x] = tr.d[g[x]];
            const bool endo = detail::is_endo_table(dg, t);
            const bool branch = tr.d_zero || g_zero || tr.d_endo;
            iff.tally(endo ? "composite is an endomorphism" : "composite is not an endomorphism", 1);
            if (endo != branch) iff.add_counterexample({tr.label(), glabels[c], endo ? "endomorphism without a branch" : "branch without endomorphism", {}});
            if (detail::is_zero_table(dg, t.zero)) {
                zero.tally("d.gamma = 0", 1);
                if (!branch) zero.add_counterexample({tr.label(), glabels[c], "d.gamma = 0 without a branch", {}});
            } else {
                zero.tally("antecedent fails (skipped)", 1);
            }
        }
    for (auto* rep : {&iff, &zero}) {
        rep->quantifiers = {{"triples", fam.triples.size()}, {"gammas", gammas.size()}};
        rep->elapsed_ms = detail::ms_since(t0);
    }
    return {std::move(iff), std::move(zero)};
}

/** P prime, R/P 2-torsion-free: d1d2(R), δ1δ2(R) ⊆ P ⇒ d1(R) ⊆ P or d2(R) ⊆ P. */
inline OracleReport prime_ideal_corollary(const std::string& instance, const DfFamily& fam, const Substructure& p, std::size_t partitions = 1) {
    auto t0 = std::chrono::steady_clock::now();
    const auto& r = fam.module;
    if (!r->is_ring()) fail(ErrorCode::hypothesis_failed, "prime ideal corollary needs R as a module over itself");
    OracleReport rep;
    rep.oracle = "prime_ideal_corollary";
    rep.instance = instance;
    detail::hypothesis(rep, is_prime_ideal(p));
    detail::hypothesis(rep, detail::quotient_two_torsion_free(p, r->id() + "/P"));
    const auto& t = r->tables();
    const std::size_t n = fam.triples.size();
    std::vector<char> in(n);
    for (std::size_t i = 0; i < n; ++i)
        in[i] = std::all_of(fam.triples[i].d.begin(), fam.triples[i].d.end(), [&](Index v) { return p.contains_index(v); });
    struct Part {
        std::uint64_t skipped = 0, holds = 0, count = 0;
        std::vector<Counterexample> ce;
    };
    auto parts = run_partitioned(n, partitions, [&](std::size_t b, std::size_t e) {
        Part out;
        for (std::size_t i = b; i < e; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const auto& a = fam.triples[i];
                const auto& c = fam.triples[j];
                bool ante = true;
                for (std::size_t x = 0; x < t.n && ante; ++x) ante = p.contains_index(a.d[c.d[x]]) && p.contains_index(a.delta[c.delta[x]]);
                if (!ante) {
                    ++out.skipped;
                } else if (in[i] || in[j]) {
                    ++out.holds;
                } else {
                    ++out.count;
                    if (out.ce.size() < counterexample_cap) out.ce.push_back({a.label(), c.label(), "antecedent holds, neither d inside P", {}});
                }
            }
        return out;
    });
    for (auto& part : parts) {
        rep.tally("antecedent fails (skipped)", part.skipped);
        rep.tally("conclusion holds", part.holds);
        for (auto& c : part.ce) rep.add_counterexample(std::move(c));
        rep.counterexample_count += part.count - std::min<std::uint64_t>(part.count, part.ce.size());
    }
    rep.quantifiers = {{"triples", n}, {"pairs", std::uint64_t(n) * n}};
    rep.elapsed_ms = detail::ms_since(t0);
    return rep;
}

} // namespace dfderiv
