#pragma once

#include <algorithm>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dfderiv/carrier.hpp"

namespace dfderiv {

/**
 * Which multiplications a substructure is closed under. For a ring parent:
 * left/right/two-sided ideal. For a module parent: `right` is a submodule,
 * `two_sided` a bisubmodule.
 */
enum class Side { left, right, two_sided };

constexpr std::string_view side_name(Side s) {
    switch (s) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::two_sided: return "two_sided";
    }
    return "?";
}

/**
 * Ideal or submodule of a carrier. Finite parents carry an explicit member
 * bitmap; symbolic product parents may use the predicate form "these
 * components vanish".
 */
class Substructure {
public:
    /** Smallest substructure containing gens, by closure. */
    static Substructure generated(CarrierPtr parent, const std::vector<Element>& gens, Side side) {
        const auto& t = parent->tables();
        std::vector<Index> g;
        for (const auto& e : gens) g.push_back(parent->index(e));
        return Substructure(parent, closure(*parent, t, g, side), side);
    }

    static Substructure generated_by_indices(CarrierPtr parent, const std::vector<Index>& gens, Side side) {
        const auto& t = parent->tables();
        return Substructure(parent, closure(*parent, t, gens, side), side);
    }

    /** Explicit member set; validated for closure. */
    static Substructure from_members(CarrierPtr parent, std::vector<char> members, Side side) {
        Substructure s(parent, std::move(members), side);
        if (auto w = s.closure_violation()) fail(ErrorCode::closure_failure, *w);
        return s;
    }

    static Substructure from_elements(CarrierPtr parent, const std::vector<Element>& elems, Side side) {
        const auto& t = parent->tables();
        std::vector<char> m(t.n, 0);
        for (const auto& e : elems) m[parent->index(e)] = 1;
        return from_members(parent, std::move(m), side);
    }

    static Substructure whole(CarrierPtr parent, Side side) {
        const auto n = parent->tables().n;
        return Substructure(parent, std::vector<char>(n, 1), side);
    }

    static Substructure zero(CarrierPtr parent, Side side) {
        const auto& t = parent->tables();
        std::vector<char> m(t.n, 0);
        m[t.zero] = 1;
        return Substructure(parent, std::move(m), side);
    }

    /** Predicate form over a product carrier: members are tuples whose listed components are zero. */
    static Substructure vanishing_components(CarrierPtr parent, std::vector<std::size_t> comps, Side side) {
        auto* prod = dynamic_cast<const ProductCarrier*>(parent.get());
        if (!prod) fail(ErrorCode::unsupported_carrier, "vanishing-component predicate needs a product carrier");
        for (auto c : comps)
            if (c >= prod->components().size()) fail(ErrorCode::malformed_descriptor, "component index out of range");
        Substructure s;
        s.parent_ = std::move(parent);
        s.side_ = side;
        std::sort(comps.begin(), comps.end());
        s.vanishing_ = std::move(comps);
        s.predicate_ = true;
        return s;
    }

    /** Predicate form {0} or the whole carrier, for symbolic parents. */
    static Substructure symbolic_zero(CarrierPtr parent, Side side) {
        Substructure s;
        s.parent_ = std::move(parent);
        s.side_ = side;
        s.predicate_ = true;
        s.zero_only_ = true;
        return s;
    }
    static Substructure symbolic_whole(CarrierPtr parent, Side side) {
        Substructure s;
        s.parent_ = std::move(parent);
        s.side_ = side;
        s.predicate_ = true;
        return s;
    }

    const CarrierPtr& parent() const { return parent_; }
    Side side() const { return side_; }
    bool is_predicate() const { return predicate_; }
    const std::vector<std::size_t>& vanishing() const { return vanishing_; }
    const std::vector<char>& members() const { return members_; }

    bool contains_index(Index i) const { return members_[i] != 0; }
    bool contains(const Element& e) const {
        if (predicate_) {
            if (zero_only_) return parent_->canonical(e) == parent_->zero();
            for (auto c : vanishing_) {
                auto* prod = static_cast<const ProductCarrier*>(parent_.get());
                if (!(e.parts.at(c) == prod->components()[c]->zero())) return false;
            }
            return true;
        }
        return members_[parent_->index(e)] != 0;
    }

    std::size_t size() const {
        if (predicate_) fail(ErrorCode::infinite_carrier, "predicate-form substructure has no finite size");
        return static_cast<std::size_t>(std::count(members_.begin(), members_.end(), 1));
    }
    bool is_zero() const { return predicate_ ? zero_only_ : size() == 1; }
    bool is_whole() const { return predicate_ ? (!zero_only_ && vanishing_.empty()) : size() == members_.size(); }

    std::vector<Index> member_indices() const {
        std::vector<Index> out;
        for (std::size_t i = 0; i < members_.size(); ++i)
            if (members_[i]) out.push_back(static_cast<Index>(i));
        return out;
    }
    std::vector<Element> elements() const {
        std::vector<Element> out;
        for (auto i : member_indices()) out.push_back(parent_->at(i));
        return out;
    }

    /** Description of the first closure failure, if any. */
    std::optional<std::string> closure_violation() const {
        const auto& t = parent_->tables();
        if (!members_[t.zero]) return "zero is not a member";
        const auto mem = member_indices();
        for (auto a : mem) {
            for (auto b : mem)
                if (!members_[t.plus(a, b)]) return "not closed under addition: " + to_string(t.elements[a]) + " + " + to_string(t.elements[b]);
            for (std::size_t r = 0; r < t.rn; ++r) {
                if ((side_ != Side::left || !parent_->is_ring()) && !members_[t.right(a, Index(r))])
                    return "not closed under right action at " + to_string(t.elements[a]);
                if (side_ != Side::right && t.has_left && !members_[t.left(Index(r), a)])
                    return "not closed under left action at " + to_string(t.elements[a]);
            }
        }
        return std::nullopt;
    }

    /** Join (sum) of two substructures of the same parent. */
    Substructure join(const Substructure& other) const {
        std::vector<Index> gens = member_indices();
        for (auto i : other.member_indices()) gens.push_back(i);
        return generated_by_indices(parent_, gens, side_);
    }

    friend bool operator==(const Substructure& a, const Substructure& b) {
        return a.predicate_ == b.predicate_ && a.zero_only_ == b.zero_only_ && a.members_ == b.members_ &&
               a.vanishing_ == b.vanishing_;
    }

    std::string describe() const {
        if (predicate_) {
            if (zero_only_) return "{0}";
            if (vanishing_.empty()) return "(whole carrier)";
            std::string s = "{components";
            for (auto c : vanishing_) s += " " + std::to_string(c);
            return s + " vanish}";
        }
        std::string s = "{";
        bool first = true;
        for (auto i : member_indices()) {
            if (!first) s += ", ";
            first = false;
            s += to_string(parent_->at(i));
        }
        return s + "}";
    }

private:
    Substructure() = default;
    Substructure(CarrierPtr parent, std::vector<char> members, Side side)
        : parent_(std::move(parent)), side_(side), members_(std::move(members)) {}

    static std::vector<char> closure(const Carrier& parent, const FiniteTables& t, const std::vector<Index>& gens, Side side) {
        std::vector<char> m(t.n, 0);
        std::vector<Index> members;
        std::deque<Index> queue;
        auto push = [&](Index x) {
            if (!m[x]) {
                m[x] = 1;
                queue.push_back(x);
            }
        };
        push(t.zero);
        for (auto g : gens) push(g);
        const bool right = side != Side::left || !parent.is_ring();
        const bool left = side != Side::right && t.has_left;
        while (!queue.empty()) {
            Index x = queue.front();
            queue.pop_front();
            for (std::size_t r = 0; r < t.rn; ++r) {
                if (right) push(t.right(x, Index(r)));
                if (left) push(t.left(Index(r), x));
            }
            members.push_back(x);
            for (auto y : members) push(t.plus(x, y));
        }
        return m;
    }

    CarrierPtr parent_;
    Side side_ = Side::two_sided;
    std::vector<char> members_;
    std::vector<std::size_t> vanishing_;
    bool predicate_ = false;
    bool zero_only_ = false;
};

/**
 * Quotient of a finite ring by a two-sided ideal, or of a finite module by a
 * submodule. Coset representative: least coset element in enumeration order.
 */
class QuotientCarrier final : public Carrier {
public:
    QuotientCarrier(std::string id, Substructure sub)
        : Carrier(std::move(id), kind_for(sub), sub.parent()->is_ring() ? nullptr : sub.parent()->acting_ring()),
          parent_(sub.parent()), sub_(std::move(sub)) {
        if (sub_.is_predicate()) fail(ErrorCode::unsupported_carrier, "quotients by predicate-form substructures are not supported");
        if (parent_->is_ring() && sub_.side() != Side::two_sided)
            fail(ErrorCode::not_two_sided, "quotient ring needs a two-sided ideal");
        if (!parent_->is_ring() && sub_.side() == Side::left)
            fail(ErrorCode::malformed_descriptor, "quotient module needs a right submodule");
        if (auto w = sub_.closure_violation()) fail(ErrorCode::closure_failure, *w);
        const auto& t = parent_->tables();
        rep_.assign(t.n, Index(-1));
        const auto mem = sub_.member_indices();
        for (std::size_t x = 0; x < t.n; ++x) {
            if (rep_[x] != Index(-1)) continue;
            reps_.push_back(Index(x));
            for (auto s : mem) rep_[t.plus(Index(x), s)] = Index(x);
        }
    }

    const CarrierPtr& parent() const { return parent_; }
    const Substructure& kernel() const { return sub_; }

    /** Natural projection of a parent element. */
    Element project(const Element& e) const {
        const auto& t = parent_->tables();
        return t.elements[rep_[parent_->index(e)]];
    }

    std::string signature() const override {
        std::uint64_t h = 1469598103934665603ull;
        for (char c : sub_.members()) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
        return "(" + parent_->signature() + " / #" + std::to_string(sub_.size()) + ":" + std::to_string(h) + ")";
    }
    Element zero() const override { return project(parent_->zero()); }
    Element one() const override { return project(parent_->one()); }
    Element add(const Element& a, const Element& b) const override { return project(parent_->add(a, b)); }
    Element neg(const Element& a) const override { return project(parent_->neg(a)); }
    Element act_right(const Element& m, const Element& r) const override { return project(parent_->act_right(m, r)); }
    Element act_left(const Element& r, const Element& m) const override {
        if (!has_left_action()) fail(ErrorCode::unsupported_carrier, id() + " is not a bimodule");
        return project(parent_->act_left(r, m));
    }
    bool contains(const Element& e) const override {
        if (!parent_->contains(e)) return false;
        const auto i = parent_->index(e);
        return rep_[i] == i;
    }
    Element canonical(const Element& e) const override { return project(parent_->canonical(e)); }
    std::optional<Integer> cardinality() const override { return Integer(reps_.size()); }
    std::vector<Element> enumerate() const override {
        std::vector<Element> out;
        for (auto r : reps_) out.push_back(parent_->at(r));
        return out;
    }

protected:
    Element raw_mul(const Element& a, const Element& b) const override { return project(parent_->mul(a, b)); }

private:
    static CarrierKind kind_for(const Substructure& s) {
        const auto k = s.parent()->kind();
        if (s.parent()->is_ring()) return k;
        if (k == CarrierKind::bimodule && s.side() == Side::two_sided) return CarrierKind::bimodule;
        return CarrierKind::right_module;
    }

    CarrierPtr parent_;
    Substructure sub_;
    std::vector<Index> rep_;
    std::vector<Index> reps_;
};

/** A submodule (or ideal) regarded as a module in its own right. */
class SubCarrier final : public Carrier {
public:
    SubCarrier(std::string id, Substructure sub)
        : Carrier(std::move(id), sub.side() == Side::two_sided && sub.parent()->has_left_action() ? CarrierKind::bimodule : CarrierKind::right_module,
                  sub.parent()->acting_ring()),
          parent_(sub.parent()), sub_(std::move(sub)) {
        if (sub_.is_predicate()) fail(ErrorCode::unsupported_carrier, "predicate-form substructures have no element list");
        if (sub_.side() == Side::left) fail(ErrorCode::malformed_descriptor, "a left ideal is not a right module");
        if (auto w = sub_.closure_violation()) fail(ErrorCode::closure_failure, *w);
    }

    const CarrierPtr& parent() const { return parent_; }
    const Substructure& substructure() const { return sub_; }

    std::string signature() const override {
        std::uint64_t h = 1469598103934665603ull;
        for (char c : sub_.members()) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
        return "(" + parent_->signature() + " >= #" + std::to_string(sub_.size()) + ":" + std::to_string(h) + ")";
    }
    Element zero() const override { return parent_->zero(); }
    Element add(const Element& a, const Element& b) const override { return parent_->add(a, b); }
    Element neg(const Element& a) const override { return parent_->neg(a); }
    Element act_right(const Element& m, const Element& r) const override { return parent_->act_right(m, r); }
    Element act_left(const Element& r, const Element& m) const override { return parent_->act_left(r, m); }
    bool contains(const Element& e) const override { return parent_->contains(e) && sub_.contains(e); }
    Element canonical(const Element& e) const override {
        Element c = parent_->canonical(e);
        if (!sub_.contains(c)) fail(ErrorCode::carrier_mismatch, to_string(e) + " is not in " + id());
        return c;
    }
    std::optional<Integer> cardinality() const override { return Integer(sub_.size()); }
    std::vector<Element> enumerate() const override { return sub_.elements(); }

private:
    CarrierPtr parent_;
    Substructure sub_;
};

} // namespace dfderiv
