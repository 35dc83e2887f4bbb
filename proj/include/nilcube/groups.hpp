#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nilcube/common.hpp"

namespace nilcube {

using Rational = boost::rational<std::int64_t>;

// Reduce a rational into [0, 1).
Rational frac(const Rational& r);
// Signed representative of r mod 1 in (-1/2, 1/2].
Rational signed_frac(const Rational& r);
std::string to_string(const Rational& r);
Rational parse_rational(const std::string& s);

// Direct sum of cyclic groups Z/n_1 + ... + Z/n_r.  A factor may be flagged as
// a circle factor, meaning its residues r stand for r/n in Q/Z; this is how the
// finite subgroups of the torus are represented.
class FiniteAbelianGroup {
public:
    FiniteAbelianGroup() = default;
    explicit FiniteAbelianGroup(std::vector<std::uint64_t> factors,
                                std::vector<bool> circle = {});

    static FiniteAbelianGroup cyclic(std::uint64_t n) { return FiniteAbelianGroup({n}); }
    static FiniteAbelianGroup circle(std::uint64_t n) { return FiniteAbelianGroup({n}, {true}); }
    // Parses "[2,4]", "[t64]", "[]", or a bare "6".
    static FiniteAbelianGroup parse(const std::string& descriptor);

    const std::vector<std::uint64_t>& factors() const { return factors_; }
    const std::vector<bool>& circle_flags() const { return circle_; }
    std::size_t arity() const { return factors_.size(); }
    std::uint64_t order() const;
    bool has_circle() const;
    std::string descriptor() const;

    // Elements are encoded as mixed-radix integers in [0, order()).
    std::vector<std::uint64_t> decode(std::uint64_t code) const;
    std::uint64_t encode(const std::vector<std::uint64_t>& residues) const;
    std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t neg(std::uint64_t a) const;
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return add(a, neg(b)); }
    std::uint64_t zero() const { return 0; }

    bool operator==(const FiniteAbelianGroup& o) const {
        return factors_ == o.factors_ && circle_ == o.circle_;
    }

private:
    std::vector<std::uint64_t> factors_;
    std::vector<bool> circle_;
};

// Invariant-factor normal form (d_1 | d_2 | ... , every d_i >= 2).
std::vector<std::uint64_t> invariant_factors(const std::vector<std::uint64_t>& cyclic_orders);
bool isomorphic(const FiniteAbelianGroup& a, const FiniteAbelianGroup& b);
std::size_t grp_rank(const FiniteAbelianGroup& a);

// Element of F x (Q/Z)^t with F a finite abelian group given by moduli.
struct TorusValue {
    std::vector<std::uint64_t> fmod;
    std::vector<std::uint64_t> fres;
    std::vector<Rational> torus;

    TorusValue() = default;
    static TorusValue zero_like(const TorusValue& shape);
    static TorusValue circle(const Rational& r);
    static TorusValue finite(std::vector<std::uint64_t> moduli, std::vector<std::uint64_t> residues);

    bool same_shape(const TorusValue& o) const {
        return fmod == o.fmod && torus.size() == o.torus.size();
    }
    bool is_zero() const;
    TorusValue operator+(const TorusValue& o) const;
    TorusValue operator-(const TorusValue& o) const;
    TorusValue operator-() const;
    TorusValue& operator+=(const TorusValue& o);
    TorusValue& operator-=(const TorusValue& o);
    bool operator==(const TorusValue& o) const {
        return fmod == o.fmod && fres == o.fres && torus == o.torus;
    }
    bool operator!=(const TorusValue& o) const { return !(*this == o); }
    bool operator<(const TorusValue& o) const;
    std::string str() const;
};

// Conversions between group codes and values.  Finite factors land in the
// finite part, circle factors in the torus part.
TorusValue to_value(const FiniteAbelianGroup& g, std::uint64_t code);
std::optional<std::uint64_t> from_value(const FiniteAbelianGroup& g, const TorusValue& v);
TorusValue parse_value(const FiniteAbelianGroup& g, const std::string& s);
// Shape used for values of g (finite moduli, torus dimension).
TorusValue zero_value(const FiniteAbelianGroup& g);
// Smallest group of g's shape whose circle factors contain every given value.
FiniteAbelianGroup refine_circle(const FiniteAbelianGroup& g, const std::vector<TorusValue>& values);

// d2 distance.  The squared Euclidean value is kept so the result stays exact.
class Distance {
public:
    static Distance infinite() { Distance d; d.inf_ = true; return d; }
    static Distance from_squared(const Rational& sq) { Distance d; d.sq_ = sq; return d; }
    static Distance from_value(const Rational& v) { return from_squared(v * v); }

    bool is_infinite() const { return inf_; }
    const Rational& squared() const { return sq_; }
    // Exact value when the squared distance is a square of a rational.
    std::optional<Rational> exact() const;
    std::string str() const;

    bool operator<(const Distance& o) const;
    bool operator==(const Distance& o) const { return inf_ == o.inf_ && (inf_ || sq_ == o.sq_); }
    bool operator<=(const Distance& o) const { return *this < o || *this == o; }
    bool operator>(const Distance& o) const { return o < *this; }

private:
    bool inf_ = false;
    Rational sq_{0};
};

Distance d2(const TorusValue& x, const TorusValue& y);

// Alternating sum over {0,1}^k with the value at vertex v weighted by (-1)^|v|.
// Vertex v has index sum v_i 2^i.
TorusValue sigma(int k, const std::vector<TorusValue>& f);
std::uint64_t sigma(int k, const std::vector<std::uint64_t>& f, const FiniteAbelianGroup& g);

struct ConcentrationFailure {
    std::size_t i = 0, j = 0;
};

// Exact average of values lying in an open d2-ball of radius 1/4.  Throws
// Error(Concentration) naming a pair at distance >= 1/2 (or the first pair
// that no tested center covers).
TorusValue concentrated_average(const std::vector<TorusValue>& values);
// Same, without throwing; returns nullopt and fills the witness on failure.
std::optional<TorusValue> try_concentrated_average(const std::vector<TorusValue>& values,
                                                   ConcentrationFailure* witness = nullptr);
// Largest pairwise d2 distance.
Distance diameter(const std::vector<TorusValue>& values);

} // namespace nilcube
