#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dfderiv/element.hpp"
#include "dfderiv/error.hpp"
#include "dfderiv/probe.hpp"
#include "dfderiv/scalar.hpp"

namespace dfderiv {

using Index = std::uint32_t;

/** Largest carrier for which operation tables are materialized. */
inline constexpr std::size_t table_cap = 2048;

enum class CarrierKind { ring, algebra, right_module, bimodule };

constexpr std::string_view kind_name(CarrierKind k) {
    switch (k) {
    case CarrierKind::ring: return "ring";
    case CarrierKind::algebra: return "algebra";
    case CarrierKind::right_module: return "right_module";
    case CarrierKind::bimodule: return "bimodule";
    }
    return "?";
}

enum class Fact { prime, two_torsion_free, jointly_prime, faithful };

constexpr std::string_view fact_name(Fact f) {
    switch (f) {
    case Fact::prime: return "prime";
    case Fact::two_torsion_free: return "two_torsion_free";
    case Fact::jointly_prime: return "jointly_prime";
    case Fact::faithful: return "faithful";
    }
    return "?";
}

struct DeclaredFact {
    Fact fact;
    std::string note;
};

/** Generator of a cyclic direct summand of the additive group; order 0 means infinite. */
struct AdditiveGenerator {
    Element element;
    std::uint64_t order = 0;
};

/** Dense operation tables of a finite carrier, indexed by enumeration position. */
struct FiniteTables {
    std::vector<Element> elements;
    std::map<Element, Index> index_of;
    std::size_t n = 0;  // carrier size
    std::size_t rn = 0; // acting ring size
    std::vector<Index> add, neg, mul, act_r, act_l;
    Index zero = 0;
    Index one = 0;
    bool has_mul = false;
    bool has_left = false;

    Index plus(Index a, Index b) const { return add[std::size_t(a) * n + b]; }
    Index minus(Index a, Index b) const { return add[std::size_t(a) * n + neg[b]]; }
    Index times(Index a, Index b) const { return mul[std::size_t(a) * n + b]; }
    Index right(Index m, Index r) const { return act_r[std::size_t(m) * rn + r]; }
    Index left(Index r, Index m) const { return act_l[std::size_t(r) * n + m]; }

    Index find(const Element& e) const {
        auto it = index_of.find(e);
        if (it == index_of.end()) fail(ErrorCode::carrier_mismatch, "element " + to_string(e) + " not in carrier");
        return it->second;
    }
};

class Carrier;
using CarrierPtr = std::shared_ptr<const Carrier>;

/**
 * A ring, algebra, right module or bimodule with exact element arithmetic.
 * Immutable once shared; finite tables are built lazily and thread-safely.
 */
class Carrier : public std::enable_shared_from_this<Carrier> {
public:
    virtual ~Carrier() = default;

    const std::string& id() const { return id_; }
    CarrierKind kind() const { return kind_; }
    bool is_ring() const { return kind_ == CarrierKind::ring || kind_ == CarrierKind::algebra; }
    bool has_left_action() const { return kind_ != CarrierKind::right_module; }
    const std::vector<DeclaredFact>& declared_facts() const { return facts_; }
    bool declares(Fact f) const {
        for (const auto& d : facts_)
            if (d.fact == f) return true;
        return false;
    }

    /** Structural identity of the construction; equal signatures mean interchangeable elements. */
    virtual std::string signature() const = 0;

    /** Ring acting on the right (and left, for bimodules); a ring acts on itself. */
    CarrierPtr acting_ring() const { return ring_ ? ring_ : shared_from_this(); }

    virtual Element zero() const = 0;
    virtual Element add(const Element& a, const Element& b) const = 0;
    virtual Element neg(const Element& a) const = 0;
    Element sub(const Element& a, const Element& b) const { return add(a, neg(b)); }

    Element mul(const Element& a, const Element& b) const {
        if (!is_ring()) fail(ErrorCode::unsupported_carrier, id_ + " has no multiplication");
        return raw_mul(a, b);
    }
    virtual Element one() const { fail(ErrorCode::unsupported_carrier, id_ + " has no identity"); }
    virtual Element act_right(const Element& m, const Element& r) const { return raw_mul(m, r); }
    virtual Element act_left(const Element& r, const Element& m) const {
        if (!has_left_action()) fail(ErrorCode::unsupported_carrier, id_ + " is not a bimodule");
        return raw_mul(r, m);
    }

    /** k * m by repeated doubling. */
    Element scale(long long k, const Element& m) const {
        Element base = k < 0 ? neg(m) : m;
        unsigned long long e = k < 0 ? static_cast<unsigned long long>(-(k + 1)) + 1 : static_cast<unsigned long long>(k);
        Element acc = zero();
        while (e) {
            if (e & 1) acc = add(acc, base);
            base = add(base, base);
            e >>= 1;
        }
        return acc;
    }

    virtual bool contains(const Element& e) const = 0;
    virtual Element canonical(const Element& e) const = 0;
    virtual std::optional<Integer> cardinality() const = 0;
    bool finite() const { return cardinality().has_value(); }

    virtual std::vector<Element> enumerate() const {
        fail(ErrorCode::infinite_carrier, id_ + " is infinite");
    }
    virtual std::vector<AdditiveGenerator> additive_basis() const;
    virtual std::vector<Element> probe_basis(const ProbeSpec&) const { return enumerate(); }
    virtual Element random_element(std::mt19937_64& rng, const ProbeSpec&) const {
        const auto& t = tables();
        return t.elements[rng() % t.n];
    }

    const FiniteTables& tables() const {
        std::call_once(tables_once_, [this] { tables_ = build_tables(); });
        return *tables_;
    }
    Index index(const Element& e) const { return tables().find(canonical(e)); }
    const Element& at(Index i) const { return tables().elements[i]; }

    void declare(std::vector<DeclaredFact> facts) { facts_ = std::move(facts); }

protected:
    Carrier(std::string id, CarrierKind kind, CarrierPtr ring)
        : id_(std::move(id)), kind_(kind), ring_(std::move(ring)) {}

    virtual Element raw_mul(const Element&, const Element&) const {
        fail(ErrorCode::unsupported_carrier, id_ + " has no multiplication");
    }

private:
    std::unique_ptr<FiniteTables> build_tables() const;

    std::string id_;
    CarrierKind kind_;
    CarrierPtr ring_;
    std::vector<DeclaredFact> facts_;
    mutable std::once_flag tables_once_;
    mutable std::unique_ptr<FiniteTables> tables_;
};

inline bool same_structure(const Carrier& a, const Carrier& b) { return &a == &b || a.signature() == b.signature(); }

inline std::unique_ptr<FiniteTables> Carrier::build_tables() const {
    auto card = cardinality();
    if (!card) fail(ErrorCode::infinite_carrier, id_ + " is infinite");
    if (*card > table_cap)
        fail(ErrorCode::carrier_too_large, id_ + " has " + card->str() + " elements (cap " + std::to_string(table_cap) + ")");
    auto t = std::make_unique<FiniteTables>();
    t->elements = enumerate();
    t->n = t->elements.size();
    for (std::size_t i = 0; i < t->n; ++i) t->index_of.emplace(t->elements[i], static_cast<Index>(i));
    const std::size_t n = t->n;
    t->add.resize(n * n);
    t->neg.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
        t->neg[a] = t->find(neg(t->elements[a]));
        for (std::size_t b = a; b < n; ++b) {
            Index s = t->find(add(t->elements[a], t->elements[b]));
            t->add[a * n + b] = s;
            t->add[b * n + a] = s;
        }
    }
    t->zero = t->find(zero());
    if (is_ring()) {
        t->has_mul = true;
        t->has_left = true;
        t->rn = n;
        t->mul.resize(n * n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) t->mul[a * n + b] = t->find(raw_mul(t->elements[a], t->elements[b]));
        t->act_r = t->mul;
        t->act_l = t->mul;
        t->one = t->find(one());
    } else {
        const auto& rt = ring_->tables();
        t->rn = rt.n;
        t->act_r.resize(n * rt.n);
        for (std::size_t m = 0; m < n; ++m)
            for (std::size_t r = 0; r < rt.n; ++r)
                t->act_r[m * rt.n + r] = t->find(act_right(t->elements[m], rt.elements[r]));
        if (has_left_action()) {
            t->has_left = true;
            t->act_l.resize(rt.n * n);
            for (std::size_t r = 0; r < rt.n; ++r)
                for (std::size_t m = 0; m < n; ++m)
                    t->act_l[r * n + m] = t->find(act_left(rt.elements[r], t->elements[m]));
        }
    }
    return t;
}

namespace detail {

/**
 * Direct-sum decomposition of a finite additive group by greedy choice of
 * maximal-order elements. Throws when the greedy choice does not span.
 */
inline std::vector<AdditiveGenerator> greedy_basis(const Carrier& c) {
    const auto& t = c.tables();
    const std::size_t n = t.n;
    std::vector<std::uint64_t> order(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        Index x = static_cast<Index>(i);
        std::uint64_t k = 1;
        while (x != t.zero) {
            x = t.plus(x, static_cast<Index>(i));
            ++k;
        }
        order[i] = i == t.zero ? 1 : k;
    }
    std::vector<Index> by_order(n);
    for (std::size_t i = 0; i < n; ++i) by_order[i] = static_cast<Index>(i);
    std::stable_sort(by_order.begin(), by_order.end(), [&](Index a, Index b) { return order[a] > order[b]; });

    std::vector<char> span(n, 0);
    span[t.zero] = 1;
    std::size_t span_size = 1;
    std::vector<AdditiveGenerator> out;
    for (Index g : by_order) {
        if (span_size == n) break;
        if (span[g]) continue;
        // Cyclic subgroup must meet the current span trivially.
        bool trivial = true;
        Index x = g;
        for (std::uint64_t k = 1; k < order[g]; ++k, x = t.plus(x, g)) {
            if (span[x]) {
                trivial = false;
                break;
            }
        }
        if (!trivial) continue;
        std::vector<Index> members;
        for (std::size_t i = 0; i < n; ++i)
            if (span[i]) members.push_back(static_cast<Index>(i));
        Index mult = t.zero;
        for (std::uint64_t k = 0; k < order[g]; ++k, mult = t.plus(mult, g)) {
            if (k == 0) continue;
            for (Index m : members) span[t.plus(m, mult)] = 1;
        }
        span_size *= order[g];
        out.push_back({t.elements[g], order[g]});
    }
    if (span_size != n) fail(ErrorCode::unsupported_carrier, c.id() + ": additive group has no greedy cyclic decomposition");
    return out;
}

} // namespace detail

inline std::vector<AdditiveGenerator> Carrier::additive_basis() const { return detail::greedy_basis(*this); }

/** Z, Q or Z/n acting on itself. */
class ScalarCarrier final : public Carrier {
public:
    ScalarCarrier(std::string id, ScalarDomain d, CarrierKind kind = CarrierKind::ring, CarrierPtr ring = nullptr)
        : Carrier(std::move(id), kind, std::move(ring)), d_(std::move(d)) {}

    const ScalarDomain& domain() const { return d_; }
    std::string signature() const override { return d_.name(); }
    Element zero() const override { return Element::scalar(0); }
    Element one() const override { return Element::scalar(d_.normalize(1)); }
    Element add(const Element& a, const Element& b) const override { return Element::scalar(d_.normalize(a.entries[0] + b.entries[0])); }
    Element neg(const Element& a) const override { return Element::scalar(d_.normalize(-a.entries[0])); }
    bool contains(const Element& e) const override {
        return e.kind == Element::Kind::scalar && e.entries.size() == 1 && d_.contains(e.entries[0]);
    }
    Element canonical(const Element& e) const override {
        if (e.kind != Element::Kind::scalar || e.entries.size() != 1)
            fail(ErrorCode::carrier_mismatch, to_string(e) + " is not a scalar");
        return Element::scalar(d_.normalize(e.entries[0]));
    }
    std::optional<Integer> cardinality() const override {
        if (d_.finite()) return d_.modulus;
        return std::nullopt;
    }
    std::vector<Element> enumerate() const override {
        if (!d_.finite()) return Carrier::enumerate();
        std::vector<Element> out;
        for (Integer k = 0; k < d_.modulus; ++k) out.push_back(Element::scalar(Rational(k)));
        return out;
    }
    std::vector<AdditiveGenerator> additive_basis() const override {
        std::uint64_t order = d_.finite() ? d_.modulus.convert_to<std::uint64_t>() : 0;
        if (d_.finite() && d_.modulus == 1) return {};
        return {{one(), order}};
    }
    std::vector<Element> probe_basis(const ProbeSpec& p) const override {
        if (d_.finite()) return enumerate();
        (void)p;
        return {one()};
    }
    Element random_element(std::mt19937_64& rng, const ProbeSpec& p) const override {
        if (d_.finite()) return Carrier::random_element(rng, p);
        return Element::scalar(d_.normalize(p.coefficients[rng() % p.coefficients.size()]));
    }

protected:
    Element raw_mul(const Element& a, const Element& b) const override {
        return Element::scalar(d_.normalize(a.entries[0] * b.entries[0]));
    }

private:
    ScalarDomain d_;
};

/** Commutative polynomial ring in one variable x over a scalar domain. */
class PolynomialCarrier final : public Carrier {
public:
    PolynomialCarrier(std::string id, ScalarDomain base, CarrierKind kind = CarrierKind::ring, CarrierPtr ring = nullptr)
        : Carrier(std::move(id), kind, std::move(ring)), base_(std::move(base)) {}

    const ScalarDomain& base() const { return base_; }
    std::string signature() const override { return base_.name() + "[x]"; }
    Element zero() const override { return Element::polynomial({}); }
    Element one() const override { return make({1}); }
    Element add(const Element& a, const Element& b) const override {
        std::vector<Rational> c(std::max(a.entries.size(), b.entries.size()));
        for (std::size_t i = 0; i < a.entries.size(); ++i) c[i] += a.entries[i];
        for (std::size_t i = 0; i < b.entries.size(); ++i) c[i] += b.entries[i];
        return make(std::move(c));
    }
    Element neg(const Element& a) const override {
        std::vector<Rational> c(a.entries.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = -a.entries[i];
        return make(std::move(c));
    }
    bool contains(const Element& e) const override {
        if (e.kind != Element::Kind::polynomial) return false;
        if (!e.entries.empty() && e.entries.back() == 0) return false;
        for (const auto& q : e.entries)
            if (!base_.contains(q)) return false;
        return true;
    }
    Element canonical(const Element& e) const override {
        if (e.kind != Element::Kind::polynomial) fail(ErrorCode::carrier_mismatch, to_string(e) + " is not a polynomial");
        return make(e.entries);
    }
    std::optional<Integer> cardinality() const override { return std::nullopt; }
    std::vector<AdditiveGenerator> additive_basis() const override {
        fail(ErrorCode::not_finite, signature() + " has no finite additive basis");
    }
    std::vector<Element> probe_basis(const ProbeSpec& p) const override {
        std::vector<Element> out;
        for (std::size_t d = 0; d <= p.max_degree; ++d) out.push_back(monomial(d));
        return out;
    }
    Element random_element(std::mt19937_64& rng, const ProbeSpec& p) const override {
        const std::size_t deg = rng() % (p.max_degree + 1);
        std::vector<Rational> c(deg + 1);
        for (auto& q : c) q = p.coefficients[rng() % p.coefficients.size()];
        return make(std::move(c));
    }

    Element monomial(std::size_t d, const Rational& c = 1) const {
        std::vector<Rational> v(d + 1);
        v[d] = c;
        return make(std::move(v));
    }
    Element make(std::vector<Rational> c) const {
        for (auto& q : c) q = base_.normalize(q);
        return Element::polynomial(std::move(c));
    }

protected:
    Element raw_mul(const Element& a, const Element& b) const override {
        if (a.entries.empty() || b.entries.empty()) return zero();
        std::vector<Rational> c(a.entries.size() + b.entries.size() - 1);
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            if (a.entries[i] == 0) continue;
            for (std::size_t j = 0; j < b.entries.size(); ++j) c[i + j] += a.entries[i] * b.entries[j];
        }
        return make(std::move(c));
    }

private:
    ScalarDomain base_;
};

/** k x k matrices over a scalar domain, optionally restricted to upper-triangular form. */
class MatrixCarrier final : public Carrier {
public:
    MatrixCarrier(std::string id, std::size_t k, ScalarDomain base, bool upper = false,
                  CarrierKind kind = CarrierKind::ring, CarrierPtr ring = nullptr)
        : Carrier(std::move(id), kind, std::move(ring)), k_(k), base_(std::move(base)), upper_(upper) {
        if (k_ == 0) fail(ErrorCode::malformed_descriptor, "matrix size must be positive");
    }

    std::size_t size() const { return k_; }
    const ScalarDomain& base() const { return base_; }
    bool upper_triangular() const { return upper_; }
    std::string signature() const override {
        return std::string(upper_ ? "T" : "M") + std::to_string(k_) + "(" + base_.name() + ")";
    }
    Element zero() const override { return Element::matrix(k_, std::vector<Rational>(k_ * k_)); }
    Element one() const override {
        std::vector<Rational> v(k_ * k_);
        for (std::size_t i = 0; i < k_; ++i) v[i * k_ + i] = base_.normalize(1);
        return Element::matrix(k_, std::move(v));
    }
    Element add(const Element& a, const Element& b) const override {
        std::vector<Rational> v(k_ * k_);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = base_.normalize(a.entries[i] + b.entries[i]);
        return Element::matrix(k_, std::move(v));
    }
    Element neg(const Element& a) const override {
        std::vector<Rational> v(k_ * k_);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = base_.normalize(-a.entries[i]);
        return Element::matrix(k_, std::move(v));
    }
    bool contains(const Element& e) const override {
        if (e.kind != Element::Kind::matrix || e.dim != k_ || e.entries.size() != k_ * k_) return false;
        for (std::size_t i = 0; i < k_; ++i)
            for (std::size_t j = 0; j < k_; ++j) {
                if (!base_.contains(e.at(i, j))) return false;
                if (upper_ && i > j && e.at(i, j) != 0) return false;
            }
        return true;
    }
    Element canonical(const Element& e) const override {
        if (e.kind != Element::Kind::matrix || e.dim != k_ || e.entries.size() != k_ * k_)
            fail(ErrorCode::carrier_mismatch, to_string(e) + " is not a " + std::to_string(k_) + "x" + std::to_string(k_) + " matrix");
        std::vector<Rational> v(e.entries);
        for (std::size_t i = 0; i < k_; ++i)
            for (std::size_t j = 0; j < k_; ++j) {
                auto& q = v[i * k_ + j];
                q = base_.normalize(q);
                if (upper_ && i > j && q != 0) fail(ErrorCode::carrier_mismatch, to_string(e) + " is not upper triangular");
            }
        return Element::matrix(k_, std::move(v));
    }
    std::optional<Integer> cardinality() const override {
        if (!base_.finite()) return std::nullopt;
        Integer c = 1;
        for (std::size_t i = 0; i < free_positions().size(); ++i) c *= base_.modulus;
        return c;
    }
    std::vector<Element> enumerate() const override {
        if (!base_.finite()) return Carrier::enumerate();
        const auto pos = free_positions();
        const auto n = base_.modulus.convert_to<std::uint64_t>();
        std::vector<std::uint64_t> digits(pos.size(), 0);
        std::vector<Element> out;
        while (true) {
            std::vector<Rational> v(k_ * k_);
            for (std::size_t i = 0; i < pos.size(); ++i) v[pos[i]] = Rational(digits[i]);
            out.push_back(Element::matrix(k_, std::move(v)));
            std::size_t i = pos.size();
            while (i > 0) {
                --i;
                if (++digits[i] < n) break;
                digits[i] = 0;
                if (i == 0) return out;
            }
            if (pos.empty()) return out;
        }
    }
    std::vector<AdditiveGenerator> additive_basis() const override {
        std::uint64_t order = base_.finite() ? base_.modulus.convert_to<std::uint64_t>() : 0;
        std::vector<AdditiveGenerator> out;
        for (auto p : free_positions()) out.push_back({unit(p / k_, p % k_), order});
        return out;
    }
    std::vector<Element> probe_basis(const ProbeSpec& p) const override {
        if (base_.finite()) return enumerate();
        (void)p;
        std::vector<Element> out;
        for (auto q : free_positions()) out.push_back(unit(q / k_, q % k_));
        return out;
    }
    Element random_element(std::mt19937_64& rng, const ProbeSpec& p) const override {
        if (base_.finite()) return Carrier::random_element(rng, p);
        std::vector<Rational> v(k_ * k_);
        for (auto q : free_positions()) v[q] = base_.normalize(p.coefficients[rng() % p.coefficients.size()]);
        return Element::matrix(k_, std::move(v));
    }

    /** Matrix unit E_ij scaled by c. */
    Element unit(std::size_t i, std::size_t j, const Rational& c = 1) const {
        std::vector<Rational> v(k_ * k_);
        v[i * k_ + j] = base_.normalize(c);
        return Element::matrix(k_, std::move(v));
    }
    Element make(std::vector<Rational> rows) const { return canonical(Element::matrix(k_, std::move(rows))); }

protected:
    Element raw_mul(const Element& a, const Element& b) const override {
        std::vector<Rational> v(k_ * k_);
        for (std::size_t i = 0; i < k_; ++i)
            for (std::size_t l = 0; l < k_; ++l) {
                const Rational& x = a.entries[i * k_ + l];
                if (x == 0) continue;
                for (std::size_t j = 0; j < k_; ++j) v[i * k_ + j] += x * b.entries[l * k_ + j];
            }
        for (auto& q : v) q = base_.normalize(q);
        return Element::matrix(k_, std::move(v));
    }

private:
    std::vector<std::size_t> free_positions() const {
        std::vector<std::size_t> pos;
        for (std::size_t i = 0; i < k_; ++i)
            for (std::size_t j = 0; j < k_; ++j)
                if (!upper_ || i <= j) pos.push_back(i * k_ + j);
        return pos;
    }

    std::size_t k_;
    ScalarDomain base_;
    bool upper_;
};

/**
 * Direct product. As a ring the operations are componentwise; as a module over
 * a ring R every component must be R itself or an R-module, and R acts
 * componentwise.
 */
class ProductCarrier final : public Carrier {
public:
    ProductCarrier(std::string id, std::vector<CarrierPtr> components, CarrierKind kind, CarrierPtr ring = nullptr)
        : Carrier(std::move(id), kind, std::move(ring)), comps_(std::move(components)) {
        if (comps_.empty()) fail(ErrorCode::malformed_descriptor, "product needs at least one component");
        if (!is_ring()) {
            auto r = acting_ring();
            for (const auto& c : comps_)
                if (!same_structure(*c->acting_ring(), *r))
                    fail(ErrorCode::malformed_descriptor, "component " + c->id() + " is not a module over " + r->id());
        }
    }

    const std::vector<CarrierPtr>& components() const { return comps_; }
    std::string signature() const override {
        std::string s = "(";
        for (std::size_t i = 0; i < comps_.size(); ++i) s += (i ? " x " : "") + comps_[i]->signature();
        return s + ")";
    }
    Element zero() const override {
        return map_parts([](const Carrier& c, std::size_t) { return c.zero(); });
    }
    Element one() const override {
        return map_parts([](const Carrier& c, std::size_t) { return c.one(); });
    }
    Element add(const Element& a, const Element& b) const override {
        return map_parts([&](const Carrier& c, std::size_t i) { return c.add(a.parts[i], b.parts[i]); });
    }
    Element neg(const Element& a) const override {
        return map_parts([&](const Carrier& c, std::size_t i) { return c.neg(a.parts[i]); });
    }
    Element act_right(const Element& m, const Element& r) const override {
        if (is_ring()) return raw_mul(m, r);
        return map_parts([&](const Carrier& c, std::size_t i) { return c.act_right(m.parts[i], r); });
    }
    Element act_left(const Element& r, const Element& m) const override {
        if (is_ring()) return raw_mul(r, m);
        if (!has_left_action()) fail(ErrorCode::unsupported_carrier, id() + " is not a bimodule");
        return map_parts([&](const Carrier& c, std::size_t i) { return c.act_left(r, m.parts[i]); });
    }
    bool contains(const Element& e) const override {
        if (e.kind != Element::Kind::tuple || e.parts.size() != comps_.size()) return false;
        for (std::size_t i = 0; i < comps_.size(); ++i)
            if (!comps_[i]->contains(e.parts[i])) return false;
        return true;
    }
    Element canonical(const Element& e) const override {
        if (e.kind != Element::Kind::tuple || e.parts.size() != comps_.size())
            fail(ErrorCode::carrier_mismatch, to_string(e) + " is not a " + std::to_string(comps_.size()) + "-tuple");
        return map_parts([&](const Carrier& c, std::size_t i) { return c.canonical(e.parts[i]); });
    }
    std::optional<Integer> cardinality() const override {
        Integer c = 1;
        for (const auto& p : comps_) {
            auto k = p->cardinality();
            if (!k) return std::nullopt;
            c *= *k;
        }
        return c;
    }
    std::vector<Element> enumerate() const override {
        if (!finite()) return Carrier::enumerate();
        std::vector<std::vector<Element>> lists;
        for (const auto& p : comps_) lists.push_back(p->enumerate());
        std::vector<std::size_t> digits(lists.size(), 0);
        std::vector<Element> out;
        while (true) {
            std::vector<Element> parts;
            for (std::size_t i = 0; i < lists.size(); ++i) parts.push_back(lists[i][digits[i]]);
            out.push_back(Element::tuple(std::move(parts)));
            std::size_t i = lists.size();
            while (true) {
                if (i == 0) return out;
                --i;
                if (++digits[i] < lists[i].size()) break;
                digits[i] = 0;
            }
        }
    }
    std::vector<AdditiveGenerator> additive_basis() const override {
        std::vector<AdditiveGenerator> out;
        for (std::size_t i = 0; i < comps_.size(); ++i)
            for (auto& g : comps_[i]->additive_basis()) out.push_back({embed(i, g.element), g.order});
        return out;
    }
    std::vector<Element> probe_basis(const ProbeSpec& p) const override {
        if (finite()) return enumerate();
        std::vector<Element> out;
        for (std::size_t i = 0; i < comps_.size(); ++i)
            for (auto& b : comps_[i]->probe_basis(p)) out.push_back(embed(i, b));
        return out;
    }
    Element random_element(std::mt19937_64& rng, const ProbeSpec& p) const override {
        if (finite()) return Carrier::random_element(rng, p);
        return map_parts([&](const Carrier& c, std::size_t) { return c.random_element(rng, p); });
    }

    /** Element with v in component i and zero elsewhere. */
    Element embed(std::size_t i, const Element& v) const {
        return map_parts([&](const Carrier& c, std::size_t j) { return j == i ? v : c.zero(); });
    }

protected:
    Element raw_mul(const Element& a, const Element& b) const override {
        return map_parts([&](const Carrier& c, std::size_t i) { return c.mul(a.parts[i], b.parts[i]); });
    }

private:
    template <class F>
    Element map_parts(F&& f) const {
        std::vector<Element> parts;
        parts.reserve(comps_.size());
        for (std::size_t i = 0; i < comps_.size(); ++i) parts.push_back(f(*comps_[i], i));
        return Element::tuple(std::move(parts));
    }

    std::vector<CarrierPtr> comps_;
};

} // namespace dfderiv
