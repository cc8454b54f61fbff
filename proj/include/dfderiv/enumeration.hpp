#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dfderiv/checks.hpp"
#include "dfderiv/parallel.hpp"

namespace dfderiv {

/** Default cap on examined partial assignments. */
inline constexpr std::uint64_t default_budget = 100'000'000;

struct Constraint {
    enum class Kind { derivation, module_hom, df_derivation, jordan_df_derivation, fixed_values };
    Kind kind = Kind::derivation;
    std::optional<AdditiveMap> delta;
    std::optional<AdditiveMap> f;
    std::vector<std::pair<Element, Element>> fixed;

    static Constraint derivation() { return {Kind::derivation, {}, {}, {}}; }
    static Constraint module_hom() { return {Kind::module_hom, {}, {}, {}}; }
    static Constraint df(AdditiveMap delta, AdditiveMap f) { return {Kind::df_derivation, std::move(delta), std::move(f), {}}; }
    static Constraint jordan(AdditiveMap delta, AdditiveMap f) { return {Kind::jordan_df_derivation, std::move(delta), std::move(f), {}}; }
    static Constraint fixed_values(std::vector<std::pair<Element, Element>> v) { return {Kind::fixed_values, {}, {}, std::move(v)}; }
};

constexpr std::string_view constraint_name(Constraint::Kind k) {
    switch (k) {
    case Constraint::Kind::derivation: return "derivation";
    case Constraint::Kind::module_hom: return "module_hom";
    case Constraint::Kind::df_derivation: return "df_derivation";
    case Constraint::Kind::jordan_df_derivation: return "jordan_df_derivation";
    case Constraint::Kind::fixed_values: return "fixed_values";
    }
    return "?";
}

struct EnumerationSpec {
    CarrierPtr source, target;
    /** Ordered generators of the source additive group; empty means the carrier's own basis. */
    std::vector<AdditiveGenerator> basis;
    std::vector<Constraint> constraints;
    std::uint64_t budget = default_budget;
    std::size_t partitions = 1;
    /** Keep the map tables, or only count them. */
    bool keep_maps = true;
};

struct EnumerationResult {
    std::string method; // "generator search" or "cyclic closed form"
    std::vector<std::vector<Index>> tables;
    std::uint64_t count = 0;
    std::uint64_t examined = 0;
    bool complete = true;
    std::size_t generators = 0;
    double elapsed_ms = 0;
    CarrierPtr source, target;

    /** The enumerated maps, in stream order. */
    std::vector<AdditiveMap> maps(const std::string& prefix = "map", RoleClaim role = {}) const {
        std::vector<AdditiveMap> out;
        for (std::size_t i = 0; i < tables.size(); ++i)
            out.push_back(AdditiveMap::from_indices(prefix + "#" + std::to_string(i), source, target, tables[i], role));
        return out;
    }
};

/** BudgetExceeded carrying the partial result. */
class BudgetExceeded : public Error {
public:
    BudgetExceeded(const std::string& what, EnumerationResult partial)
        : Error(ErrorCode::budget_exceeded, what), partial_(std::move(partial)) {}
    const EnumerationResult& partial() const { return partial_; }

private:
    EnumerationResult partial_;
};

namespace detail {

/** Coordinates of every source element over an ordered generator basis. */
struct Coordinates {
    std::vector<std::uint64_t> orders;
    std::vector<Index> gens;
    std::vector<std::uint8_t> level; // 1 + highest nonzero coordinate; 0 for zero
    std::vector<Index> rest;         // element minus its top term
    std::vector<std::uint32_t> coef; // top coordinate
    std::vector<std::vector<Index>> by_level;
};

inline Coordinates coordinates(const Carrier& src, const std::vector<AdditiveGenerator>& basis) {
    const auto& t = src.tables();
    Coordinates c;
    if (basis.size() > 250) fail(ErrorCode::unsupported_carrier, "generator basis too long");
    std::uint64_t total = 1;
    for (const auto& g : basis) {
        if (g.order == 0) fail(ErrorCode::not_finite, "generator of infinite order");
        c.orders.push_back(g.order);
        c.gens.push_back(src.index(g.element));
        total *= g.order;
    }
    if (total != t.n) fail(ErrorCode::malformed_descriptor, "generator basis does not match the carrier size");
    const Index unset = Index(-1);
    c.level.assign(t.n, 0);
    c.rest.assign(t.n, unset);
    c.coef.assign(t.n, 0);
    c.by_level.resize(basis.size() + 1);
    std::vector<char> seen(t.n, 0);
    seen[t.zero] = 1;
    c.rest[t.zero] = t.zero;
    c.by_level[0].push_back(t.zero);
    std::vector<Index> span{t.zero};
    for (std::size_t i = 0; i < basis.size(); ++i) {
        std::vector<Index> grown = span;
        Index mult = t.zero;
        for (std::uint64_t k = 1; k < c.orders[i]; ++k) {
            mult = t.plus(mult, c.gens[i]);
            for (auto s : span) {
                Index e = t.plus(s, mult);
                if (seen[e]) fail(ErrorCode::malformed_descriptor, "generator basis is not independent");
                seen[e] = 1;
                c.level[e] = std::uint8_t(i + 1);
                c.rest[e] = s;
                c.coef[e] = std::uint32_t(k);
                c.by_level[i + 1].push_back(e);
                grown.push_back(e);
            }
        }
        // The generator's order must be exact.
        if (t.plus(mult, c.gens[i]) != t.zero) fail(ErrorCode::malformed_descriptor, "generator order is wrong");
        span = std::move(grown);
    }
    return c;
}

/** One law instance: values of the map at up to three source elements plus constants. */
struct Instance {
    enum class Shape : std::uint8_t {
        leibniz,    // val[p] == val[q]·r + q·val[r]   (p = qr)
        hom,        // val[p] == val[q]·r              (p = q·r)
        df,         // val[p] == val[q]·r + c          (c = f(q)δ(r))
        jordan,     // val[p] == val[q]·q + c          (p = q², c = f(q)δ(q))
        fixed,      // val[p] == c
    };
    Shape shape;
    Index p, q, r, c;
};

struct Plan {
    Coordinates coords;
    std::vector<std::vector<Instance>> by_level;
    std::vector<std::vector<Index>> candidates; // target elements killed by each generator order
};

inline Plan make_plan(const EnumerationSpec& spec) {
    const auto& src = *spec.source;
    const auto& tgt = *spec.target;
    if (!src.finite() || !tgt.finite()) fail(ErrorCode::not_finite, "enumeration needs finite carriers");
    const auto& st = src.tables();
    const auto& tt = tgt.tables();
    Plan plan;
    const auto basis = spec.basis.empty() ? src.additive_basis() : spec.basis;
    plan.coords = coordinates(src, basis);
    const auto& co = plan.coords;
    plan.by_level.resize(basis.size() + 1);
    auto lv = [&](std::initializer_list<Index> xs) {
        std::uint8_t l = 0;
        for (auto x : xs) l = std::max(l, co.level[x]);
        return l;
    };
    for (const auto& con : spec.constraints) {
        switch (con.kind) {
        case Constraint::Kind::derivation: {
            if (!src.is_ring()) fail(ErrorCode::carrier_mismatch, "derivation constraint needs a ring source");
            require_same(src, tgt, "derivation constraint");
            for (std::size_t a = 0; a < st.n; ++a)
                for (std::size_t b = 0; b < st.n; ++b) {
                    Index ab = st.times(Index(a), Index(b));
                    plan.by_level[lv({Index(a), Index(b), ab})].push_back({Instance::Shape::leibniz, ab, Index(a), Index(b), 0});
                }
            break;
        }
        case Constraint::Kind::module_hom: {
            require_same(*src.acting_ring(), *tgt.acting_ring(), "module_hom constraint");
            const auto& rt = src.acting_ring()->tables();
            for (std::size_t m = 0; m < st.n; ++m)
                for (std::size_t r = 0; r < rt.n; ++r) {
                    Index mr = st.right(Index(m), Index(r));
                    plan.by_level[lv({Index(m), mr})].push_back({Instance::Shape::hom, mr, Index(m), Index(r), 0});
                }
            break;
        }
        case Constraint::Kind::df_derivation: {
            if (!con.delta || !con.f) fail(ErrorCode::malformed_descriptor, "df constraint needs delta and f");
            require_same(*con.f->source(), src, "df constraint f source");
            require_same(*con.f->target(), tgt, "df constraint f target");
            require_same(*con.delta->source(), *src.acting_ring(), "df constraint delta");
            const auto& rt = src.acting_ring()->tables();
            const auto& ft = con.f->table();
            const auto& dt = con.delta->table();
            for (std::size_t m = 0; m < st.n; ++m)
                for (std::size_t r = 0; r < rt.n; ++r) {
                    Index mr = st.right(Index(m), Index(r));
                    Index c = tt.right(ft[m], dt[r]);
                    plan.by_level[lv({Index(m), mr})].push_back({Instance::Shape::df, mr, Index(m), Index(r), c});
                }
            break;
        }
        case Constraint::Kind::jordan_df_derivation: {
            if (!con.delta || !con.f) fail(ErrorCode::malformed_descriptor, "jordan constraint needs delta and f");
            if (!src.is_ring()) fail(ErrorCode::carrier_mismatch, "jordan constraint needs an algebra source");
            require_same(*con.f->source(), src, "jordan constraint f source");
            require_same(*con.f->target(), tgt, "jordan constraint f target");
            require_same(*con.delta->source(), src, "jordan constraint delta");
            require_same(*tgt.acting_ring(), src, "jordan constraint target ring");
            const auto& ft = con.f->table();
            const auto& dt = con.delta->table();
            for (std::size_t x = 0; x < st.n; ++x) {
                Index xx = st.times(Index(x), Index(x));
                Index c = tt.right(ft[x], dt[x]);
                plan.by_level[lv({Index(x), xx})].push_back({Instance::Shape::jordan, xx, Index(x), Index(x), c});
            }
            break;
        }
        case Constraint::Kind::fixed_values:
            for (const auto& [in, out] : con.fixed) {
                Index p = src.index(in);
                plan.by_level[co.level[p]].push_back({Instance::Shape::fixed, p, 0, 0, tgt.index(out)});
            }
            break;
        }
    }
    plan.candidates.resize(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t t = 0; t < tt.n; ++t) {
            Index acc = tt.zero;
            for (std::uint64_t k = 0; k < co.orders[i]; ++k) acc = tt.plus(acc, Index(t));
            if (acc == tt.zero) plan.candidates[i].push_back(Index(t));
        }
    return plan;
}

struct SearchPart {
    std::vector<std::vector<Index>> tables;
    std::uint64_t count = 0, examined = 0;
    bool exhausted = false;
};

/** Depth-first search over generator images; the first generator ranges over candidates[0][b, e). */
inline SearchPart search(const Plan& plan, const FiniteTables& tt, const EnumerationSpec& spec, std::size_t b, std::size_t e) {
    SearchPart out;
    const auto& co = plan.coords;
    const std::size_t k = co.gens.size();
    std::vector<Index> val(co.level.size(), tt.zero);
    auto holds = [&](const Instance& in) {
        switch (in.shape) {
        case Instance::Shape::leibniz: return val[in.p] == tt.plus(tt.right(val[in.q], in.r), tt.left(in.q, val[in.r]));
        case Instance::Shape::hom: return val[in.p] == tt.right(val[in.q], in.r);
        case Instance::Shape::df: return val[in.p] == tt.plus(tt.right(val[in.q], in.r), in.c);
        case Instance::Shape::jordan: return val[in.p] == tt.plus(tt.right(val[in.q], in.q), in.c);
        case Instance::Shape::fixed: return val[in.p] == in.c;
        }
        return false;
    };
    auto assign_level = [&](std::size_t i, Index t) {
        // Multiples of t, then every element whose top generator is i.
        std::vector<Index> mult(co.orders[i]);
        mult[0] = tt.zero;
        for (std::size_t m = 1; m < mult.size(); ++m) mult[m] = tt.plus(mult[m - 1], t);
        for (auto x : co.by_level[i + 1]) val[x] = tt.plus(val[co.rest[x]], mult[co.coef[x]]);
        for (const auto& in : plan.by_level[i + 1])
            if (!holds(in)) return false;
        return true;
    };
    for (const auto& in : plan.by_level[0])
        if (!holds(in)) return out;
    if (k == 0) {
        if (b == 0 && e > 0) {
            ++out.count;
            if (spec.keep_maps) out.tables.push_back(val);
        }
        return out;
    }
    std::vector<std::size_t> pos(k, 0);
    std::size_t depth = 0;
    pos[0] = b;
    while (true) {
        const auto& cand = plan.candidates[depth];
        const std::size_t end = depth == 0 ? e : cand.size();
        if (pos[depth] >= end) {
            if (depth == 0) break;
            --depth;
            ++pos[depth];
            continue;
        }
        if (++out.examined > spec.budget) {
            out.exhausted = true;
            return out;
        }
        if (assign_level(depth, cand[pos[depth]])) {
            if (depth + 1 == k) {
                ++out.count;
                if (spec.keep_maps) out.tables.push_back(val);
                ++pos[depth];
            } else {
                ++depth;
                pos[depth] = 0;
            }
        } else {
            ++pos[depth];
        }
    }
    return out;
}

inline double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

/**
 * Every additive map source → target satisfying the constraints, by
 * depth-first search over generator images with pruning after each level.
 */
inline EnumerationResult enumerate_additive_maps(const EnumerationSpec& spec) {
    auto t0 = std::chrono::steady_clock::now();
    const auto plan = detail::make_plan(spec);
    const auto& tt = spec.target->tables();
    EnumerationResult res;
    res.method = "generator search";
    res.source = spec.source;
    res.target = spec.target;
    res.generators = plan.coords.gens.size();
    const std::size_t first = plan.candidates.empty() ? 1 : plan.candidates[0].size();
    auto parts = run_partitioned(first, spec.partitions, [&](std::size_t b, std::size_t e) {
        return detail::search(plan, tt, spec, b, e);
    });
    bool exhausted = false;
    for (auto& p : parts) {
        res.count += p.count;
        res.examined += p.examined;
        exhausted = exhausted || p.exhausted;
        for (auto& t : p.tables) res.tables.push_back(std::move(t));
    }
    res.elapsed_ms = detail::elapsed_since(t0);
    if (exhausted || res.examined > spec.budget) {
        res.complete = false;
        throw BudgetExceeded("enumeration examined more than " + std::to_string(spec.budget) + " partial assignments", std::move(res));
    }
    return res;
}

namespace detail {

/** A generator g with g·R = M, if one exists. */
inline std::optional<Index> cyclic_generator(const Carrier& m) {
    const auto& mt = m.tables();
    if (m.is_ring()) return mt.one;
    const auto& rt = m.acting_ring()->tables();
    for (std::size_t g = 0; g < mt.n; ++g) {
        std::vector<char> hit(mt.n, 0);
        std::size_t n = 0;
        for (std::size_t r = 0; r < rt.n; ++r) {
            Index x = mt.right(Index(g), Index(r));
            if (!hit[x]) {
                hit[x] = 1;
                ++n;
            }
        }
        if (n == mt.n) return Index(g);
    }
    return std::nullopt;
}

inline void require_df_prereqs(const AdditiveMap& delta, const AdditiveMap& f, bool bimodule, const CheckOptions& opt) {
    detail::require_prereq(check_derivation(delta, opt), "delta as derivation");
    detail::require_prereq(bimodule ? check_bimodule_hom(f, opt) : check_module_hom(f, opt), bimodule ? "f as bimodule homomorphism" : "f as module homomorphism");
}

} // namespace detail

struct DfEnumerationOptions {
    std::uint64_t budget = default_budget;
    std::size_t partitions = 1;
    bool keep_maps = true;
    /** Skip the cyclic closed form and always use the generator search. */
    bool force_search = false;
    /** Skip prerequisite validation of δ and f (already validated by the caller). */
    bool trusted = false;
};

/**
 * All d : M → M with d(xa) = d(x)a + f(x)δ(a). For cyclic M = gR the
 * candidates are d(g·a) = t·a + f(g)δ(a), one per t, each verified on every
 * (x, a); otherwise the generator search with a df constraint.
 */
inline EnumerationResult enumerate_df_derivations(const AdditiveMap& delta, const AdditiveMap& f, const DfEnumerationOptions& opt = {}) {
    auto t0 = std::chrono::steady_clock::now();
    const auto& m = f.source();
    if (!m->finite() || !m->acting_ring()->finite()) fail(ErrorCode::not_finite, "enumerate_df_derivations needs finite carriers");
    detail::require_same(*m, *f.target(), "enumerate_df_derivations: f must be a self-map");
    detail::require_same(*delta.source(), *m->acting_ring(), "enumerate_df_derivations: delta");
    if (!opt.trusted) detail::require_df_prereqs(delta, f, false, {});
    const auto g = opt.force_search ? std::nullopt : detail::cyclic_generator(*m);
    if (!g) {
        EnumerationSpec spec{m, m, {}, {Constraint::df(delta, f)}, opt.budget, opt.partitions, opt.keep_maps};
        auto res = enumerate_additive_maps(spec);
        res.elapsed_ms = detail::elapsed_since(t0);
        return res;
    }
    const auto& mt = m->tables();
    const auto& rt = m->acting_ring()->tables();
    const auto& ft = f.table();
    const auto& dt = delta.table();
    const Index fg = ft[*g];
    EnumerationResult res;
    res.method = "cyclic closed form";
    res.source = m;
    res.target = m;
    res.generators = 1;
    auto parts = run_partitioned(mt.n, opt.partitions, [&](std::size_t b, std::size_t e) {
        detail::SearchPart p;
        const Index unset = Index(-1);
        std::vector<Index> d(mt.n);
        for (std::size_t t = b; t < e; ++t) {
            ++p.examined;
            std::fill(d.begin(), d.end(), unset);
            bool ok = true;
            for (std::size_t a = 0; a < rt.n && ok; ++a) {
                Index x = mt.right(*g, Index(a));
                Index v = mt.plus(mt.right(Index(t), Index(a)), mt.right(fg, dt[a]));
                if (d[x] == unset)
                    d[x] = v;
                else
                    ok = d[x] == v; // well-defined on g·R
            }
            for (std::size_t x = 0; x < mt.n && ok; ++x)
                for (std::size_t y = x; y < mt.n && ok; ++y) ok = d[mt.plus(Index(x), Index(y))] == mt.plus(d[x], d[y]);
            for (std::size_t x = 0; x < mt.n && ok; ++x)
                for (std::size_t a = 0; a < rt.n && ok; ++a)
                    ok = d[mt.right(Index(x), Index(a))] == mt.plus(mt.right(d[x], Index(a)), mt.right(ft[x], dt[a]));
            if (ok) {
                ++p.count;
                if (opt.keep_maps) p.tables.push_back(d);
            }
        }
        return p;
    });
    for (auto& p : parts) {
        res.count += p.count;
        res.examined += p.examined;
        for (auto& t : p.tables) res.tables.push_back(std::move(t));
    }
    res.elapsed_ms = detail::elapsed_since(t0);
    return res;
}

/** All additive D : S → M with D(x²) = D(x)x + f(x)δ(x), by pruned generator search. */
inline EnumerationResult enumerate_jordan_df_derivations(const AdditiveMap& delta, const AdditiveMap& f, const DfEnumerationOptions& opt = {}) {
    const auto& s = f.source();
    const auto& m = f.target();
    if (!s->finite() || !m->finite()) fail(ErrorCode::not_finite, "enumerate_jordan_df_derivations needs finite carriers");
    if (!opt.trusted) detail::require_df_prereqs(delta, f, true, {});
    EnumerationSpec spec{s, m, {}, {Constraint::jordan(delta, f)}, opt.budget, opt.partitions, opt.keep_maps};
    return enumerate_additive_maps(spec);
}

} // namespace dfderiv
