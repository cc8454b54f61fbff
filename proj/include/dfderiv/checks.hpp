#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dfderiv/laws.hpp"
#include "dfderiv/maps.hpp"
#include "dfderiv/parallel.hpp"

namespace dfderiv {

struct Witness {
    std::string law;
    std::vector<Element> inputs;
    Element lhs, rhs, residual;
};

struct VerificationReport {
    std::string check;
    std::string strategy; // "exhaustive" or "probe-complete"
    bool pass = true;
    std::vector<Witness> witnesses;
    std::uint64_t inputs_tested = 0;
    std::uint64_t failures = 0;
    double elapsed_ms = 0;
    std::vector<std::string> notes;
    std::string value_carrier;
};

struct CheckOptions {
    ProbeSpec probe;
    std::size_t partitions = 1;
    std::size_t max_witnesses = 5;
    /** Probe-mode inputs tested before the generated probe set. */
    std::vector<std::vector<Element>> focus;
    /** Whether check_df_derivation insists that δ satisfies Leibniz. */
    bool require_derivation = true;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <std::size_t K>
struct Hit {
    std::array<Index, K> in;
    Index lhs, rhs;
};

template <std::size_t K>
struct IndexScan {
    std::uint64_t tested = 0, failures = 0;
    std::vector<Hit<K>> hits;
};

/** Exhaustive scan over dims[0] x ... x dims[K-1]; partitions split the first coordinate. */
template <std::size_t K, class Eval>
IndexScan<K> scan_indices(const std::array<std::size_t, K>& dims, std::size_t partitions, std::size_t max_hits, Eval&& eval) {
    auto parts = run_partitioned(dims[0], partitions, [&](std::size_t b, std::size_t e) {
        IndexScan<K> p;
        for (std::size_t d = 1; d < K; ++d)
            if (dims[d] == 0) return p;
        std::array<Index, K> in{};
        for (std::size_t i0 = b; i0 < e; ++i0) {
            in.fill(0);
            in[0] = Index(i0);
            while (true) {
                auto [l, r] = eval(in);
                ++p.tested;
                if (l != r) {
                    ++p.failures;
                    if (p.hits.size() < max_hits) p.hits.push_back({in, l, r});
                }
                std::size_t d = K;
                while (d > 1) {
                    --d;
                    if (++in[d] < dims[d]) break;
                    in[d] = 0;
                    if (d == 1) d = 0;
                }
                if (d == 0 || K == 1) break;
            }
        }
        return p;
    });
    IndexScan<K> out;
    for (auto& p : parts) {
        out.tested += p.tested;
        out.failures += p.failures;
        for (auto& h : p.hits)
            if (out.hits.size() < max_hits) out.hits.push_back(h);
    }
    return out;
}

template <std::size_t K>
using Tuple = std::array<Element, K>;

template <std::size_t K>
struct ElementScan {
    std::uint64_t tested = 0, failures = 0;
    std::vector<std::pair<Tuple<K>, std::pair<Element, Element>>> hits;
};

template <std::size_t K, class Eval>
ElementScan<K> scan_elements(const std::vector<Tuple<K>>& tuples, std::size_t partitions, std::size_t max_hits, Eval&& eval) {
    auto parts = run_partitioned(tuples.size(), partitions, [&](std::size_t b, std::size_t e) {
        ElementScan<K> p;
        for (std::size_t i = b; i < e; ++i) {
            auto sides = eval(tuples[i]);
            ++p.tested;
            if (!(sides.first == sides.second)) {
                ++p.failures;
                if (p.hits.size() < max_hits) p.hits.push_back({tuples[i], std::move(sides)});
            }
        }
        return p;
    });
    ElementScan<K> out;
    for (auto& p : parts) {
        out.tested += p.tested;
        out.failures += p.failures;
        for (auto& h : p.hits)
            if (out.hits.size() < max_hits) out.hits.push_back(std::move(h));
    }
    return out;
}

/**
 * Probe tuples for a K-ary law: focus tuples, then basis^K (basis plus
 * pairwise sums when K = 1), then K-wise zipped seeded samples.
 */
template <std::size_t K>
std::vector<Tuple<K>> probe_tuples(const std::array<const Carrier*, K>& cs, const ProbeSpec& p, std::string_view purpose,
                                   const std::vector<std::vector<Element>>& focus) {
    std::vector<Tuple<K>> out;
    for (const auto& f : focus) {
        if (f.size() != K) fail(ErrorCode::malformed_descriptor, "focus input has arity " + std::to_string(f.size()) + ", law needs " + std::to_string(K));
        Tuple<K> t;
        for (std::size_t i = 0; i < K; ++i) t[i] = cs[i]->canonical(f[i]);
        out.push_back(std::move(t));
    }
    if constexpr (K == 1) {
        for (auto& e : probe_inputs(*cs[0], p, purpose)) out.push_back({std::move(e)});
    } else {
        std::array<std::vector<Element>, K> bases;
        for (std::size_t i = 0; i < K; ++i) bases[i] = cs[i]->probe_basis(p);
        std::array<std::size_t, K> idx{};
        bool empty = false;
        for (auto& b : bases) empty = empty || b.empty();
        while (!empty) {
            Tuple<K> t;
            for (std::size_t i = 0; i < K; ++i) t[i] = bases[i][idx[i]];
            out.push_back(std::move(t));
            std::size_t d = K;
            while (d > 0) {
                --d;
                if (++idx[d] < bases[d].size()) break;
                idx[d] = 0;
                if (d == 0) empty = true;
            }
        }
        if (!cs[0]->finite() || p.random_samples) {
            std::vector<std::mt19937_64> rngs;
            for (std::size_t i = 0; i < K; ++i)
                rngs.push_back(seeded_rng(p.seed, cs[i]->signature(), std::string(purpose) + "#" + std::to_string(i)));
            for (std::size_t s = 0; s < p.random_samples; ++s) {
                Tuple<K> t;
                for (std::size_t i = 0; i < K; ++i) t[i] = cs[i]->random_element(rngs[i], p);
                out.push_back(std::move(t));
            }
        }
    }
    return out;
}

inline bool tabulable(const Carrier& c) {
    auto n = c.cardinality();
    return n && *n <= table_cap;
}

/**
 * Runs one K-ary law over its domains, exhaustively when every carrier is
 * finite and tabulable, otherwise over the probe set.
 */
template <std::size_t K, class IdxEval, class ElemEval>
VerificationReport run_law(std::string check, std::string law, const std::array<CarrierPtr, K>& domains, const CarrierPtr& values,
                           bool exhaustive, const CheckOptions& opt, IdxEval&& idx_eval, ElemEval&& elem_eval) {
    VerificationReport rep;
    rep.check = std::move(check);
    rep.value_carrier = values->id();
    if (exhaustive) {
        rep.strategy = "exhaustive";
        std::array<std::size_t, K> dims;
        for (std::size_t i = 0; i < K; ++i) dims[i] = domains[i]->tables().n;
        auto scan = scan_indices<K>(dims, opt.partitions, opt.max_witnesses, idx_eval);
        rep.inputs_tested = scan.tested;
        rep.failures = scan.failures;
        const auto& vt = values->tables();
        for (const auto& h : scan.hits) {
            Witness w;
            w.law = law;
            for (std::size_t i = 0; i < K; ++i) w.inputs.push_back(domains[i]->at(h.in[i]));
            w.lhs = vt.elements[h.lhs];
            w.rhs = vt.elements[h.rhs];
            w.residual = vt.elements[vt.minus(h.lhs, h.rhs)];
            rep.witnesses.push_back(std::move(w));
        }
    } else {
        rep.strategy = "probe-complete";
        std::array<const Carrier*, K> cs;
        for (std::size_t i = 0; i < K; ++i) cs[i] = domains[i].get();
        auto tuples = probe_tuples<K>(cs, opt.probe, rep.check + "/" + law, opt.focus);
        auto scan = scan_elements<K>(tuples, opt.partitions, opt.max_witnesses, elem_eval);
        rep.inputs_tested = scan.tested;
        rep.failures = scan.failures;
        for (auto& [in, sides] : scan.hits) {
            Witness w;
            w.law = law;
            w.inputs.assign(in.begin(), in.end());
            w.residual = values->sub(sides.first, sides.second);
            w.lhs = std::move(sides.first);
            w.rhs = std::move(sides.second);
            rep.witnesses.push_back(std::move(w));
        }
    }
    rep.pass = rep.failures == 0;
    return rep;
}

inline void merge_into(VerificationReport& into, VerificationReport&& part, std::size_t max_witnesses) {
    into.inputs_tested += part.inputs_tested;
    into.failures += part.failures;
    for (auto& w : part.witnesses)
        if (into.witnesses.size() < max_witnesses) into.witnesses.push_back(std::move(w));
    into.pass = into.pass && part.pass;
    for (auto& n : part.notes) into.notes.push_back(std::move(n));
}

inline void require_ring(const Carrier& c, const std::string& what) {
    if (!c.is_ring()) fail(ErrorCode::carrier_mismatch, what + ": " + c.id() + " is not a ring");
}

/** Focus inputs belong to the main law only. */
inline CheckOptions prereq_options(const CheckOptions& opt) {
    CheckOptions pre = opt;
    pre.focus.clear();
    return pre;
}

inline std::string describe_witness(const Witness& w) {
    std::string s = w.law + " at (";
    for (std::size_t i = 0; i < w.inputs.size(); ++i) s += (i ? ", " : "") + to_string(w.inputs[i]);
    return s + "): lhs " + to_string(w.lhs) + ", rhs " + to_string(w.rhs);
}

} // namespace detail

/** m(a + b) = m(a) + m(b). */
inline VerificationReport check_additive(const AdditiveMap& m, const CheckOptions& opt = {}) {
    auto t0 = detail::Clock::now();
    const bool ex = detail::tabulable(*m.source()) && detail::tabulable(*m.target());
    IndexOps io;
    ElementOps eo{m.source().get(), m.target().get(), &m, &m, &m};
    if (ex) io = {&m.source()->tables(), &m.target()->tables(), m.table().data(), nullptr, nullptr};
    auto rep = detail::run_law<2>(
        "additive", "additive", {m.source(), m.source()}, m.target(), ex, opt,
        [&](const std::array<Index, 2>& in) { return law::additive(io, in[0], in[1]); },
        [&](const detail::Tuple<2>& in) { return law::additive(eo, in[0], in[1]); });
    rep.elapsed_ms = detail::ms_since(t0);
    return rep;
}

/** δ(ab) = δ(a)b + aδ(b) on a ring; additivity is checked first. */
inline VerificationReport check_derivation(const AdditiveMap& delta, const CheckOptions& opt = {}) {
    auto t0 = detail::Clock::now();
    detail::require_ring(*delta.source(), "check_derivation");
    detail::require_same(*delta.source(), *delta.target(), "check_derivation");
    auto add = check_additive(delta, detail::prereq_options(opt));
    if (!add.pass) {
        add.check = "derivation";
        add.notes.push_back("prerequisite additivity failed");
        add.elapsed_ms = detail::ms_since(t0);
        return add;
    }
    const auto& r = delta.source();
    const bool ex = detail::tabulable(*r);
    IndexOps io;
    ElementOps eo{r.get(), r.get(), &delta, &delta, &delta};
    if (ex) io = {&r->tables(), &r->tables(), delta.table().data(), nullptr, nullptr};
    auto rep = detail::run_law<2>(
        "derivation", "leibniz", {r, r}, r, ex, opt, [&](const std::array<Index, 2>& in) { return law::leibniz(io, in[0], in[1]); },
        [&](const detail::Tuple<2>& in) { return law::leibniz(eo, in[0], in[1]); });
    rep.inputs_tested += add.inputs_tested;
    rep.elapsed_ms = detail::ms_since(t0);
    return rep;
}

namespace detail {

inline VerificationReport hom_impl(const AdditiveMap& f, const CheckOptions& opt, bool left, std::string name) {
    auto t0 = Clock::now();
    require_same(*f.source()->acting_ring(), *f.target()->acting_ring(), name + " acting rings");
    auto add = check_additive(f, prereq_options(opt));
    if (!add.pass) {
        add.check = name;
        add.notes.push_back("prerequisite additivity failed");
        add.elapsed_ms = ms_since(t0);
        return add;
    }
    const auto& m = f.source();
    const auto& n = f.target();
    auto r = m->acting_ring();
    const bool ex = tabulable(*m) && tabulable(*n) && tabulable(*r);
    IndexOps io;
    ElementOps eo{m.get(), n.get(), &f, &f, &f};
    if (ex) io = {&m->tables(), &n->tables(), f.table().data(), nullptr, nullptr};
    auto rep = run_law<2>(
        name, "hom_right", {m, r}, n, ex, opt, [&](const std::array<Index, 2>& in) { return law::hom_right(io, in[0], in[1]); },
        [&](const Tuple<2>& in) { return law::hom_right(eo, in[0], in[1]); });
    if (left) {
        if (!m->has_left_action() || !n->has_left_action())
            fail(ErrorCode::carrier_mismatch, name + ": source and target must be bimodules");
        auto l = run_law<2>(
            name, "hom_left", {r, m}, n, ex, opt, [&](const std::array<Index, 2>& in) { return law::hom_left(io, in[0], in[1]); },
            [&](const Tuple<2>& in) { return law::hom_left(eo, in[0], in[1]); });
        merge_into(rep, std::move(l), opt.max_witnesses);
    }
    rep.inputs_tested += add.inputs_tested;
    rep.elapsed_ms = ms_since(t0);
    return rep;
}

} // namespace detail

/** f(m·r) = f(m)·r. */
inline VerificationReport check_module_hom(const AdditiveMap& f, const CheckOptions& opt = {}) {
    return detail::hom_impl(f, opt, false, "module_hom");
}

/** Module hom that also satisfies f(r·m) = r·f(m). */
inline VerificationReport check_bimodule_hom(const AdditiveMap& f, const CheckOptions& opt = {}) {
    return detail::hom_impl(f, opt, true, "bimodule_hom");
}

/** Module hom from a module to itself. */
inline VerificationReport check_endomorphism(const AdditiveMap& m, const CheckOptions& opt = {}) {
    detail::require_same(*m.source(), *m.target(), "check_endomorphism");
    return detail::hom_impl(m, opt, false, "endomorphism");
}

namespace detail {

inline void require_prereq(const VerificationReport& r, const std::string& what) {
    if (r.pass) return;
    std::string msg = what + " failed";
    if (!r.witnesses.empty()) msg += ": " + describe_witness(r.witnesses.front());
    fail(ErrorCode::prereq_failed, msg);
}

inline void df_carriers(const AdditiveMap& d, const AdditiveMap& delta, const AdditiveMap& f) {
    require_same(*d.source(), *f.source(), "d and f sources");
    require_same(*d.target(), *f.target(), "d and f targets");
    require_same(*delta.source(), *delta.target(), "delta");
    require_same(*delta.source(), *d.source()->acting_ring(), "delta and the ring acting on the source");
    require_same(*delta.source(), *d.target()->acting_ring(), "delta and the ring acting on the target");
    require_ring(*delta.source(), "delta");
}

} // namespace detail

/**
 * d(xa) = d(x)a + f(x)δ(a) for d, f : M → N and δ on the ring R acting on
 * both. Prerequisites (additivity of d, δ, f; f a module hom; δ a derivation
 * unless opt.require_derivation is false) fail fast with PrereqFailed.
 */
inline VerificationReport check_df_derivation(const AdditiveMap& d, const AdditiveMap& delta, const AdditiveMap& f,
                                              const CheckOptions& opt = {}) {
    auto t0 = detail::Clock::now();
    detail::df_carriers(d, delta, f);
    const auto pre = detail::prereq_options(opt);
    detail::require_prereq(check_additive(d, pre), "additivity of d");
    detail::require_prereq(check_additive(delta, pre), "additivity of delta");
    detail::require_prereq(check_module_hom(f, pre), "f as module homomorphism");
    VerificationReport rep;
    if (opt.require_derivation) detail::require_prereq(check_derivation(delta, pre), "delta as derivation");
    const auto& m = d.source();
    const auto& n = d.target();
    auto r = m->acting_ring();
    const bool ex = detail::tabulable(*m) && detail::tabulable(*n) && detail::tabulable(*r);
    IndexOps io;
    ElementOps eo{m.get(), n.get(), &d, &f, &delta};
    if (ex) io = {&m->tables(), &n->tables(), d.table().data(), f.table().data(), delta.table().data()};
    rep = detail::run_law<2>(
        "df_derivation", "df", {m, r}, n, ex, opt, [&](const std::array<Index, 2>& in) { return law::df(io, in[0], in[1]); },
        [&](const detail::Tuple<2>& in) { return law::df(eo, in[0], in[1]); });
    if (!opt.require_derivation) rep.notes.push_back("delta not required to be a derivation");
    rep.elapsed_ms = detail::ms_since(t0);
    return rep;
}

/**
 * D(x²) = D(x)x + f(x)δ(x) for D, f : S → M, S an algebra and M a bimodule
 * over S. Prerequisites as for check_df_derivation, with f a bimodule hom.
 */
inline VerificationReport check_jordan_df_derivation(const AdditiveMap& D, const AdditiveMap& delta, const AdditiveMap& f,
                                                     const CheckOptions& opt = {}) {
    auto t0 = detail::Clock::now();
    detail::require_ring(*D.source(), "check_jordan_df_derivation");
    detail::df_carriers(D, delta, f);
    const auto pre = detail::prereq_options(opt);
    detail::require_prereq(check_additive(D, pre), "additivity of D");
    detail::require_prereq(check_additive(delta, pre), "additivity of delta");
    detail::require_prereq(check_bimodule_hom(f, pre), "f as bimodule homomorphism");
    if (opt.require_derivation) detail::require_prereq(check_derivation(delta, pre), "delta as derivation");
    const auto& s = D.source();
    const auto& m = D.target();
    const bool ex = detail::tabulable(*s) && detail::tabulable(*m);
    IndexOps io;
    ElementOps eo{s.get(), m.get(), &D, &f, &delta};
    if (ex) io = {&s->tables(), &m->tables(), D.table().data(), f.table().data(), delta.table().data()};
    auto rep = detail::run_law<1>(
        "jordan_df_derivation", "jordan", {s}, m, ex, opt, [&](const std::array<Index, 1>& in) { return law::jordan(io, in[0]); },
        [&](const detail::Tuple<1>& in) { return law::jordan(eo, in[0]); });
    rep.elapsed_ms = detail::ms_since(t0);
    return rep;
}

/** Both sides of a named law at explicit inputs; used to re-evaluate recorded witnesses. */
inline std::pair<Element, Element> evaluate_law(std::string_view law_name, const AdditiveMap& d, const AdditiveMap* f,
                                                const AdditiveMap* delta, const std::vector<Element>& in) {
    ElementOps o{d.source().get(), d.target().get(), &d, f ? f : &d, delta ? delta : &d};
    auto need = [&](std::size_t k) {
        if (in.size() != k) fail(ErrorCode::malformed_descriptor, std::string(law_name) + " takes " + std::to_string(k) + " inputs");
    };
    if (law_name == "additive") return need(2), law::additive(o, in[0], in[1]);
    if (law_name == "leibniz") return need(2), law::leibniz(o, in[0], in[1]);
    if (law_name == "hom_right") return need(2), law::hom_right(o, in[0], in[1]);
    if (law_name == "hom_left") return need(2), law::hom_left(o, in[0], in[1]);
    if (law_name == "df") {
        if (!f || !delta) fail(ErrorCode::malformed_descriptor, "df law needs f and delta");
        return need(2), law::df(o, in[0], in[1]);
    }
    if (law_name == "jordan") {
        if (!f || !delta) fail(ErrorCode::malformed_descriptor, "jordan law needs f and delta");
        return need(1), law::jordan(o, in[0]);
    }
    fail(ErrorCode::malformed_descriptor, "unknown law " + std::string(law_name));
}

} // namespace dfderiv
