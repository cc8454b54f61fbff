#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dfderiv/maps.hpp"
#include "dfderiv/parallel.hpp"
#include "dfderiv/substructure.hpp"

namespace dfderiv {

enum class Verdict { holds, fails, declared, incomplete };

constexpr std::string_view verdict_name(Verdict v) {
    switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::declared: return "declared";
    case Verdict::incomplete: return "incomplete";
    }
    return "?";
}

struct StructuralFact {
    std::string subject;
    std::string predicate;
    Verdict verdict = Verdict::holds;
    std::vector<Element> witness;
    std::string note;

    bool holds() const { return verdict == Verdict::holds || verdict == Verdict::declared; }
};

/** Default cap on enumerated substructure lattices. */
inline constexpr std::size_t lattice_cap = 10000;

namespace detail {

inline void require_finite(const Carrier& c, const std::string& what) {
    if (!c.finite()) fail(ErrorCode::infinite_carrier, what + ": " + c.id() + " is infinite");
}

/** Declared-fact fallback for infinite carriers. */
inline StructuralFact declared_or_throw(const Carrier& c, Fact f, const std::string& predicate) {
    if (!c.declares(f)) fail(ErrorCode::infinite_carrier, predicate + ": " + c.id() + " is infinite and declares no such fact");
    StructuralFact s{c.id(), predicate, Verdict::declared, {}, {}};
    for (const auto& d : c.declared_facts())
        if (d.fact == f) s.note = d.note;
    return s;
}

inline std::vector<char> mask_of(const std::vector<Index>& idx, std::size_t n) {
    std::vector<char> m(n, 0);
    for (auto i : idx) m[i] = 1;
    return m;
}

} // namespace detail

/** Ann(M) = {r : m·r = 0 for all m}, a two-sided ideal of the acting ring. */
inline Substructure right_annihilator(const CarrierPtr& m) {
    detail::require_finite(*m, "right_annihilator");
    auto r = m->acting_ring();
    detail::require_finite(*r, "right_annihilator");
    const auto& mt = m->tables();
    const auto& rt = r->tables();
    std::vector<char> mem(rt.n, 0);
    for (std::size_t x = 0; x < rt.n; ++x) {
        bool kills = true;
        for (std::size_t e = 0; e < mt.n && kills; ++e) kills = mt.right(Index(e), Index(x)) == mt.zero;
        mem[x] = kills;
    }
    return Substructure::from_members(r, std::move(mem), Side::two_sided);
}

/**
 * (K:M) = {r : M·r ⊆ K}. Predicate-form K over a symbolic pair module uses
 * the closed form: a nonempty vanishing pattern over polynomial components
 * gives {0}, the empty pattern gives the whole ring.
 */
inline Substructure colon_ideal(const Substructure& k, const CarrierPtr& m) {
    detail::require_same(*k.parent(), *m, "colon_ideal");
    auto r = m->acting_ring();
    if (k.is_predicate()) {
        if (k.is_whole()) return Substructure::symbolic_whole(r, Side::two_sided);
        auto* prod = detail::as_product(*m);
        bool domains = prod != nullptr;
        if (prod)
            for (auto c : k.vanishing()) domains = domains && detail::as_poly(*prod->components()[c]) != nullptr;
        if (!k.vanishing().empty() && domains) return Substructure::symbolic_zero(r, Side::two_sided);
        fail(ErrorCode::infinite_carrier, "colon_ideal: no closed form for " + k.describe() + " in " + m->id());
    }
    detail::require_finite(*m, "colon_ideal");
    const auto& mt = m->tables();
    const auto& rt = r->tables();
    std::vector<char> mem(rt.n, 0);
    for (std::size_t x = 0; x < rt.n; ++x) {
        bool in = true;
        for (std::size_t e = 0; e < mt.n && in; ++e) in = k.contains_index(mt.right(Index(e), Index(x)));
        mem[x] = in;
    }
    return Substructure::from_members(r, std::move(mem), Side::two_sided);
}

/** 2m = 0 ⇒ m = 0. */
inline StructuralFact is_two_torsion_free(const CarrierPtr& m) {
    if (!m->finite()) return detail::declared_or_throw(*m, Fact::two_torsion_free, "two_torsion_free");
    const auto& t = m->tables();
    StructuralFact s{m->id(), "two_torsion_free", Verdict::holds, {}, {}};
    for (std::size_t i = 0; i < t.n; ++i)
        if (i != t.zero && t.plus(Index(i), Index(i)) == t.zero) {
            s.verdict = Verdict::fails;
            s.witness = {t.elements[i]};
            s.note = "2m = 0 with m != 0";
            break;
        }
    return s;
}

/** xRy = 0 ⇒ x = 0 or y = 0. */
inline StructuralFact is_prime_ring(const CarrierPtr& r, std::size_t partitions = 1) {
    if (!r->is_ring()) fail(ErrorCode::carrier_mismatch, "is_prime_ring: " + r->id() + " is not a ring");
    if (!r->finite()) return detail::declared_or_throw(*r, Fact::prime, "prime_ring");
    const auto& t = r->tables();
    auto parts = run_partitioned(t.n, partitions, [&](std::size_t b, std::size_t e) -> std::optional<std::pair<Index, Index>> {
        for (std::size_t x = b; x < e; ++x) {
            if (x == t.zero) continue;
            for (std::size_t y = 0; y < t.n; ++y) {
                if (y == t.zero) continue;
                bool all_zero = true;
                for (std::size_t m = 0; m < t.n && all_zero; ++m) all_zero = t.times(t.times(Index(x), Index(m)), Index(y)) == t.zero;
                if (all_zero) return std::pair{Index(x), Index(y)};
            }
        }
        return std::nullopt;
    });
    StructuralFact s{r->id(), "prime_ring", Verdict::holds, {}, {}};
    for (auto& p : parts)
        if (p) {
            s.verdict = Verdict::fails;
            s.witness = {t.elements[p->first], t.elements[p->second]};
            s.note = "xRy = 0 with x, y nonzero";
            break;
        }
    return s;
}

/** P proper two-sided and aRb ⊆ P ⇒ a ∈ P or b ∈ P. */
inline StructuralFact is_prime_ideal(const Substructure& p) {
    const auto& r = p.parent();
    StructuralFact s{r->id() + " ideal " + p.describe(), "prime_ideal", Verdict::holds, {}, {}};
    if (p.is_predicate()) fail(ErrorCode::infinite_carrier, "is_prime_ideal: predicate-form ideal");
    if (p.side() != Side::two_sided) fail(ErrorCode::not_two_sided, "is_prime_ideal needs a two-sided ideal");
    if (p.is_whole()) {
        s.verdict = Verdict::fails;
        s.note = "ideal is not proper";
        return s;
    }
    const auto& t = r->tables();
    for (std::size_t a = 0; a < t.n; ++a) {
        if (p.contains_index(Index(a))) continue;
        for (std::size_t b = 0; b < t.n; ++b) {
            if (p.contains_index(Index(b))) continue;
            bool inside = true;
            for (std::size_t x = 0; x < t.n && inside; ++x) inside = p.contains_index(t.times(t.times(Index(a), Index(x)), Index(b)));
            if (inside) {
                s.verdict = Verdict::fails;
                s.witness = {t.elements[a], t.elements[b]};
                s.note = "aRb inside P with a, b outside";
                return s;
            }
        }
    }
    return s;
}

/** L proper and mRx ⊆ L ⇒ m ∈ L or x ∈ (L:M). */
inline StructuralFact is_prime_submodule(const Substructure& l, const CarrierPtr& m) {
    detail::require_same(*l.parent(), *m, "is_prime_submodule");
    StructuralFact s{m->id() + " submodule " + (l.is_predicate() ? l.describe() : "#" + std::to_string(l.size())), "prime_submodule",
                     Verdict::holds, {}, {}};
    if (!m->finite()) {
        if (l.is_zero()) {
            auto d = detail::declared_or_throw(*m, Fact::prime, "prime_submodule");
            d.subject = s.subject;
            return d;
        }
        fail(ErrorCode::infinite_carrier, "is_prime_submodule: " + m->id() + " is infinite");
    }
    if (l.is_whole()) {
        s.verdict = Verdict::fails;
        s.note = "submodule is not proper";
        return s;
    }
    const auto colon = colon_ideal(l, m);
    const auto& mt = m->tables();
    const auto& rt = m->acting_ring()->tables();
    for (std::size_t e = 0; e < mt.n; ++e) {
        if (l.contains_index(Index(e))) continue;
        for (std::size_t x = 0; x < rt.n; ++x) {
            if (colon.contains_index(Index(x))) continue;
            bool inside = true;
            for (std::size_t r = 0; r < rt.n && inside; ++r) inside = l.contains_index(mt.right(Index(e), rt.times(Index(r), Index(x))));
            if (inside) {
                s.verdict = Verdict::fails;
                s.witness = {mt.elements[e], rt.elements[x]};
                s.note = "mRx inside L with m outside L and x outside (L:M)";
                return s;
            }
        }
    }
    return s;
}

/** M is prime when its zero submodule is prime. */
inline StructuralFact is_prime_module(const CarrierPtr& m) {
    if (!m->finite()) return detail::declared_or_throw(*m, Fact::prime, "prime_module");
    auto f = is_prime_submodule(Substructure::zero(m, Side::right), m);
    f.subject = m->id();
    f.predicate = "prime_module";
    return f;
}

struct Lattice {
    std::vector<Substructure> members;
    bool complete = true;
};

/**
 * Substructures of the given side, as the join-closure of single-generator
 * closures; stops with complete = false once `cap` members exist.
 */
inline Lattice substructure_lattice(const CarrierPtr& parent, Side side, std::size_t cap = lattice_cap) {
    detail::require_finite(*parent, "substructure_lattice");
    const auto& t = parent->tables();
    Lattice out;
    std::set<std::vector<char>> seen;
    auto add = [&](Substructure s) {
        if (seen.insert(s.members()).second) {
            out.members.push_back(std::move(s));
            return true;
        }
        return false;
    };
    add(Substructure::zero(parent, side));
    for (std::size_t i = 0; i < t.n; ++i) {
        if (out.members.size() >= cap) {
            out.complete = false;
            return out;
        }
        add(Substructure::generated_by_indices(parent, {Index(i)}, side));
    }
    const std::size_t principal = out.members.size();
    for (std::size_t i = 1; i < out.members.size(); ++i) {
        for (std::size_t j = 1; j < std::min(i, principal); ++j) {
            if (out.members.size() >= cap) {
                out.complete = false;
                return out;
            }
            add(out.members[i].join(out.members[j]));
        }
    }
    return out;
}

/** K = 0: I N J = 0 ⇒ I M J = 0 or N = 0, over left ideals I, right ideals J, bisubmodules N. */
inline StructuralFact is_jointly_prime(const CarrierPtr& m, std::size_t cap = lattice_cap) {
    if (!m->has_left_action()) fail(ErrorCode::carrier_mismatch, "is_jointly_prime: " + m->id() + " is not a bimodule");
    if (!m->finite()) return detail::declared_or_throw(*m, Fact::jointly_prime, "jointly_prime");
    auto s = m->acting_ring();
    const auto& mt = m->tables();
    const auto lefts = substructure_lattice(s, Side::left, cap);
    const auto rights = substructure_lattice(s, Side::right, cap);
    const auto bis = substructure_lattice(m, Side::two_sided, cap);
    StructuralFact out{m->id(), "jointly_prime", Verdict::holds, {}, {}};
    for (const auto& i : lefts.members) {
        if (i.is_zero()) continue;
        const auto ii = i.member_indices();
        for (const auto& j : rights.members) {
            if (j.is_zero()) continue;
            const auto jj = j.member_indices();
            // Elements n with I n J = 0.
            std::vector<char> killed(mt.n, 1);
            bool all = true;
            for (std::size_t n = 0; n < mt.n; ++n) {
                for (auto a : ii) {
                    for (auto b : jj)
                        if (mt.left(a, mt.right(Index(n), b)) != mt.zero) {
                            killed[n] = 0;
                            break;
                        }
                    if (!killed[n]) break;
                }
                all = all && killed[n];
            }
            if (all) continue; // I M J = 0
            for (const auto& nsub : bis.members) {
                if (nsub.is_zero()) continue;
                bool inside = true;
                for (auto x : nsub.member_indices()) inside = inside && killed[x];
                if (inside) {
                    out.verdict = Verdict::fails;
                    out.witness = {i.elements().back(), j.elements().back(), nsub.elements().back()};
                    out.note = "I N J = 0 with I M J != 0 and N != 0; I = " + i.describe() + ", J = " + j.describe() + ", N = " + nsub.describe();
                    return out;
                }
            }
        }
    }
    if (!(lefts.complete && rights.complete && bis.complete)) {
        out.verdict = Verdict::incomplete;
        out.note = "substructure lattice cap reached";
    }
    return out;
}

/** UV = 0 ⇒ U = 0 or V = 0 over two-sided ideals. */
inline StructuralFact is_prime_algebra(const CarrierPtr& s, std::size_t cap = lattice_cap) {
    if (!s->is_ring()) fail(ErrorCode::carrier_mismatch, "is_prime_algebra: " + s->id() + " is not an algebra");
    if (!s->finite()) return detail::declared_or_throw(*s, Fact::prime, "prime_algebra");
    const auto& t = s->tables();
    const auto ideals = substructure_lattice(s, Side::two_sided, cap);
    StructuralFact out{s->id(), "prime_algebra", Verdict::holds, {}, {}};
    for (const auto& u : ideals.members) {
        if (u.is_zero()) continue;
        const auto uu = u.member_indices();
        for (const auto& v : ideals.members) {
            if (v.is_zero()) continue;
            bool zero = true;
            for (auto a : uu) {
                for (auto b : v.member_indices())
                    if (t.times(a, b) != t.zero) {
                        zero = false;
                        break;
                    }
                if (!zero) break;
            }
            if (zero) {
                out.verdict = Verdict::fails;
                out.witness = {u.elements().back(), v.elements().back()};
                out.note = "UV = 0 with U = " + u.describe() + ", V = " + v.describe();
                return out;
            }
        }
    }
    if (!ideals.complete) {
        out.verdict = Verdict::incomplete;
        out.note = "ideal lattice cap reached";
    }
    return out;
}

/** M·r = 0 ⇒ r = 0. */
inline StructuralFact is_faithful(const CarrierPtr& m) {
    if (!m->finite() || !m->acting_ring()->finite()) return detail::declared_or_throw(*m, Fact::faithful, "faithful");
    auto ann = right_annihilator(m);
    StructuralFact s{m->id(), "faithful", ann.is_zero() ? Verdict::holds : Verdict::fails, {}, {}};
    if (!ann.is_zero()) {
        for (auto i : ann.member_indices())
            if (i != m->acting_ring()->tables().zero) {
                s.witness = {m->acting_ring()->at(i)};
                break;
            }
        s.note = "nonzero ring element annihilates the module";
    }
    return s;
}

/** The structural predicate behind a declarable fact. */
inline StructuralFact evaluate_fact(const CarrierPtr& c, Fact f) {
    switch (f) {
    case Fact::two_torsion_free: return is_two_torsion_free(c);
    case Fact::prime: return c->is_ring() ? is_prime_ring(c) : is_prime_module(c);
    case Fact::jointly_prime: return is_jointly_prime(c);
    case Fact::faithful: return is_faithful(c);
    }
    fail(ErrorCode::malformed_descriptor, "unknown fact");
}

/** Z(S) in enumeration order. */
inline std::vector<Element> center(const CarrierPtr& s) {
    if (!s->is_ring()) fail(ErrorCode::carrier_mismatch, "center: " + s->id() + " is not a ring");
    detail::require_finite(*s, "center");
    const auto& t = s->tables();
    std::vector<Element> out;
    for (std::size_t x = 0; x < t.n; ++x) {
        bool central = true;
        for (std::size_t a = 0; a < t.n && central; ++a) central = t.times(Index(x), Index(a)) == t.times(Index(a), Index(x));
        if (central) out.push_back(t.elements[x]);
    }
    return out;
}

/** T(x) = {m : m(xa − ax) = 0 for all a}; checked to be a subbimodule. */
inline Substructure T_set(const Element& x, const CarrierPtr& m) {
    auto s = m->acting_ring();
    detail::require_finite(*m, "T_set");
    detail::require_finite(*s, "T_set");
    const auto& mt = m->tables();
    const auto& st = s->tables();
    const Index xi = s->index(x);
    std::vector<Index> comm(st.n);
    for (std::size_t a = 0; a < st.n; ++a) comm[a] = st.minus(st.times(xi, Index(a)), st.times(Index(a), xi));
    std::vector<char> mem(mt.n, 0);
    for (std::size_t e = 0; e < mt.n; ++e) {
        bool in = true;
        for (std::size_t a = 0; a < st.n && in; ++a) in = mt.right(Index(e), comm[a]) == mt.zero;
        mem[e] = in;
    }
    return Substructure::from_members(m, std::move(mem), m->has_left_action() ? Side::two_sided : Side::right);
}

/** Membership flags of 𝒫 = {x : D(xa) = D(x)a + f(x)δ(a) for all a}. */
inline std::vector<char> P_members(const AdditiveMap& D, const AdditiveMap& delta, const AdditiveMap& f) {
    const auto& s = D.source();
    const auto& m = D.target();
    detail::require_finite(*s, "P_set");
    detail::require_finite(*m, "P_set");
    const auto& st = s->tables();
    const auto& mt = m->tables();
    const auto& d = D.table();
    const auto& ft = f.table();
    const auto& dt = delta.table();
    std::vector<char> mem(st.n, 0);
    for (std::size_t x = 0; x < st.n; ++x) {
        bool in = true;
        for (std::size_t a = 0; a < st.n && in; ++a) {
            Index lhs = d[st.times(Index(x), Index(a))];
            Index rhs = mt.plus(mt.right(d[x], Index(a)), mt.right(ft[x], dt[a]));
            in = lhs == rhs;
        }
        mem[x] = in;
    }
    return mem;
}

inline std::vector<Element> P_set(const AdditiveMap& D, const AdditiveMap& delta, const AdditiveMap& f) {
    const auto mem = P_members(D, delta, f);
    std::vector<Element> out;
    for (std::size_t i = 0; i < mem.size(); ++i)
        if (mem[i]) out.push_back(D.source()->at(Index(i)));
    return out;
}

/** δ*(x + A) = δ(x) + A on R/A; requires δ(A) ⊆ A. */
inline AdditiveMap induce_quotient_derivation(const AdditiveMap& delta, const Substructure& a, std::string quotient_id = {}) {
    const auto& r = delta.source();
    detail::require_same(*r, *delta.target(), "induce_quotient_derivation");
    detail::require_same(*r, *a.parent(), "induce_quotient_derivation ideal");
    detail::require_finite(*r, "induce_quotient_derivation");
    const auto& tab = delta.table();
    for (auto i : a.member_indices())
        if (!a.contains_index(tab[i]))
            fail(ErrorCode::not_invariant, "delta maps " + to_string(r->at(i)) + " in the ideal to " + to_string(r->at(tab[i])) + " outside it");
    if (quotient_id.empty()) quotient_id = r->id() + "/A";
    auto q = std::make_shared<QuotientCarrier>(quotient_id, a);
    auto d = delta;
    return AdditiveMap(delta.name() + "*", q, q, [q, d](const Element& x) { return q->project(d(x)); }, delta.role());
}

} // namespace dfderiv
