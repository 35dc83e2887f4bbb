#include "nilcube/groups.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace nilcube {

Rational frac(const Rational& r) {
    std::int64_t n = r.numerator(), d = r.denominator();
    std::int64_t m = n % d;
    if (m < 0) m += d;
    return Rational(m, d);
}

Rational signed_frac(const Rational& r) {
    Rational f = frac(r);
    if (f > Rational(1, 2)) f -= 1;
    return f;
}

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(s));
        std::int64_t d = std::stoll(s.substr(slash + 1));
        if (d == 0) throw Error(ErrorKind::Structural, "zero denominator in '" + s + "'");
        return Rational(std::stoll(s.substr(0, slash)), d);
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::Structural, "malformed rational '" + s + "'");
    }
}

// ---------------------------------------------------------------------------

FiniteAbelianGroup::FiniteAbelianGroup(std::vector<std::uint64_t> factors, std::vector<bool> circle)
    : factors_(std::move(factors)), circle_(std::move(circle)) {
    if (circle_.empty()) circle_.assign(factors_.size(), false);
    if (circle_.size() != factors_.size())
        throw Error(ErrorKind::Structural, "circle flags do not match factor count");
    for (auto f : factors_)
        if (f < 2) throw Error(ErrorKind::Structural, "cyclic factor orders must be at least 2");
}

FiniteAbelianGroup FiniteAbelianGroup::parse(const std::string& descriptor) {
    std::string s;
    for (char c : descriptor)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']') throw Error(ErrorKind::Structural, "unterminated group descriptor '" + descriptor + "'");
        s = s.substr(1, s.size() - 2);
    }
    std::vector<std::uint64_t> f;
    std::vector<bool> c;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        bool circ = false;
        if (tok[0] == 't') {
            circ = true;
            tok = tok.substr(1);
        }
        std::uint64_t n = 0;
        try {
            n = std::stoull(tok);
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::Structural, "malformed group descriptor '" + descriptor + "'");
        }
        if (n == 1) continue;
        f.push_back(n);
        c.push_back(circ);
    }
    return FiniteAbelianGroup(f, c);
}

std::uint64_t FiniteAbelianGroup::order() const {
    std::uint64_t o = 1;
    for (auto f : factors_) o *= f;
    return o;
}

bool FiniteAbelianGroup::has_circle() const {
    return std::find(circle_.begin(), circle_.end(), true) != circle_.end();
}

std::string FiniteAbelianGroup::descriptor() const {
    std::string s = "[";
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) s += ",";
        if (circle_[i]) s += "t";
        s += std::to_string(factors_[i]);
    }
    return s + "]";
}

std::vector<std::uint64_t> FiniteAbelianGroup::decode(std::uint64_t code) const {
    std::vector<std::uint64_t> r(factors_.size());
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        r[i] = code % factors_[i];
        code /= factors_[i];
    }
    return r;
}

std::uint64_t FiniteAbelianGroup::encode(const std::vector<std::uint64_t>& residues) const {
    std::uint64_t code = 0;
    for (std::size_t i = factors_.size(); i-- > 0;) code = code * factors_[i] + residues[i] % factors_[i];
    return code;
}

std::uint64_t FiniteAbelianGroup::add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t code = 0, mult = 1;
    for (auto f : factors_) {
        code += ((a % f + b % f) % f) * mult;
        a /= f;
        b /= f;
        mult *= f;
    }
    return code;
}

std::uint64_t FiniteAbelianGroup::neg(std::uint64_t a) const {
    std::uint64_t code = 0, mult = 1;
    for (auto f : factors_) {
        code += ((f - a % f) % f) * mult;
        a /= f;
        mult *= f;
    }
    return code;
}

namespace {

std::vector<std::pair<std::uint64_t, std::uint64_t>> factorize(std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        std::uint64_t pk = 1;
        while (n % p == 0) {
            n /= p;
            pk *= p;
        }
        out.emplace_back(p, pk);
    }
    if (n > 1) out.emplace_back(n, n);
    return out;
}

} // namespace

std::vector<std::uint64_t> invariant_factors(const std::vector<std::uint64_t>& cyclic_orders) {
    std::map<std::uint64_t, std::vector<std::uint64_t>> powers;
    for (auto n : cyclic_orders)
        for (auto [p, pk] : factorize(n)) powers[p].push_back(pk);
    std::size_t len = 0;
    for (auto& [p, v] : powers) {
        std::sort(v.rbegin(), v.rend());
        len = std::max(len, v.size());
    }
    std::vector<std::uint64_t> out(len, 1);
    for (auto& [p, v] : powers)
        for (std::size_t j = 0; j < v.size(); ++j) out[j] *= v[j];
    std::reverse(out.begin(), out.end());
    return out;
}

bool isomorphic(const FiniteAbelianGroup& a, const FiniteAbelianGroup& b) {
    return invariant_factors(a.factors()) == invariant_factors(b.factors());
}

std::size_t grp_rank(const FiniteAbelianGroup& a) { return invariant_factors(a.factors()).size(); }

// ---------------------------------------------------------------------------

TorusValue TorusValue::zero_like(const TorusValue& shape) {
    TorusValue z;
    z.fmod = shape.fmod;
    z.fres.assign(shape.fmod.size(), 0);
    z.torus.assign(shape.torus.size(), Rational(0));
    return z;
}

TorusValue TorusValue::circle(const Rational& r) {
    TorusValue v;
    v.torus.push_back(frac(r));
    return v;
}

TorusValue TorusValue::finite(std::vector<std::uint64_t> moduli, std::vector<std::uint64_t> residues) {
    TorusValue v;
    v.fmod = std::move(moduli);
    v.fres = std::move(residues);
    for (std::size_t i = 0; i < v.fres.size(); ++i) v.fres[i] %= v.fmod[i];
    return v;
}

bool TorusValue::is_zero() const {
    for (auto r : fres)
        if (r) return false;
    for (auto& t : torus)
        if (t != 0) return false;
    return true;
}

static void require_shape(const TorusValue& a, const TorusValue& b) {
    if (!a.same_shape(b)) throw Error(ErrorKind::Structural, "coefficient shapes differ");
}

TorusValue& TorusValue::operator+=(const TorusValue& o) {
    require_shape(*this, o);
    for (std::size_t i = 0; i < fres.size(); ++i) fres[i] = (fres[i] + o.fres[i]) % fmod[i];
    for (std::size_t i = 0; i < torus.size(); ++i) torus[i] = frac(torus[i] + o.torus[i]);
    return *this;
}

TorusValue& TorusValue::operator-=(const TorusValue& o) {
    require_shape(*this, o);
    for (std::size_t i = 0; i < fres.size(); ++i) fres[i] = (fres[i] + fmod[i] - o.fres[i]) % fmod[i];
    for (std::size_t i = 0; i < torus.size(); ++i) torus[i] = frac(torus[i] - o.torus[i]);
    return *this;
}

TorusValue TorusValue::operator+(const TorusValue& o) const {
    TorusValue r = *this;
    r += o;
    return r;
}

TorusValue TorusValue::operator-(const TorusValue& o) const {
    TorusValue r = *this;
    r -= o;
    return r;
}

TorusValue TorusValue::operator-() const { return zero_like(*this) - *this; }

bool TorusValue::operator<(const TorusValue& o) const {
    if (fres != o.fres) return fres < o.fres;
    return torus < o.torus;
}

std::string TorusValue::str() const {
    std::vector<std::string> parts;
    for (auto r : fres) parts.push_back(std::to_string(r));
    for (auto& t : torus) parts.push_back(to_string(t));
    if (parts.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + parts[i];
    return s;
}

TorusValue zero_value(const FiniteAbelianGroup& g) { return to_value(g, 0); }

TorusValue to_value(const FiniteAbelianGroup& g, std::uint64_t code) {
    TorusValue v;
    auto res = g.decode(code);
    for (std::size_t i = 0; i < g.arity(); ++i) {
        auto n = static_cast<std::int64_t>(g.factors()[i]);
        if (g.circle_flags()[i]) {
            v.torus.push_back(Rational(static_cast<std::int64_t>(res[i]), n));
        } else {
            v.fmod.push_back(g.factors()[i]);
            v.fres.push_back(res[i]);
        }
    }
    return v;
}

std::optional<std::uint64_t> from_value(const FiniteAbelianGroup& g, const TorusValue& v) {
    std::vector<std::uint64_t> res(g.arity());
    std::size_t fi = 0, ti = 0;
    for (std::size_t i = 0; i < g.arity(); ++i) {
        auto n = g.factors()[i];
        if (g.circle_flags()[i]) {
            if (ti >= v.torus.size()) return std::nullopt;
            Rational t = frac(v.torus[ti++]) * static_cast<std::int64_t>(n);
            if (t.denominator() != 1) return std::nullopt;
            res[i] = static_cast<std::uint64_t>(t.numerator());
        } else {
            if (fi >= v.fres.size() || v.fmod[fi] != n) return std::nullopt;
            res[i] = v.fres[fi++];
        }
    }
    if (fi != v.fres.size() || ti != v.torus.size()) return std::nullopt;
    return g.encode(res);
}

TorusValue parse_value(const FiniteAbelianGroup& g, const std::string& s) {
    TorusValue v = zero_value(g);
    std::stringstream ss(s);
    std::string tok;
    std::size_t fi = 0, ti = 0, i = 0;
    while (std::getline(ss, tok, ',')) {
        if (i >= g.arity()) throw Error(ErrorKind::Structural, "too many coordinates in value '" + s + "'");
        Rational r = parse_rational(tok);
        if (g.circle_flags()[i]) {
            v.torus[ti++] = frac(r);
        } else {
            if (r.denominator() != 1) throw Error(ErrorKind::Structural, "fraction in finite coordinate of '" + s + "'");
            auto n = static_cast<std::int64_t>(g.factors()[i]);
            v.fres[fi++] = static_cast<std::uint64_t>(((r.numerator() % n) + n) % n);
        }
        ++i;
    }
    if (i != g.arity() && !(g.arity() == 0 && s == "0"))
        throw Error(ErrorKind::Structural, "wrong coordinate count in value '" + s + "'");
    return v;
}

FiniteAbelianGroup refine_circle(const FiniteAbelianGroup& g, const std::vector<TorusValue>& values) {
    std::vector<std::uint64_t> f = g.factors();
    std::size_t ti = 0;
    for (std::size_t i = 0; i < g.arity(); ++i) {
        if (!g.circle_flags()[i]) continue;
        std::uint64_t n = f[i];
        for (auto& v : values) n = std::lcm(n, static_cast<std::uint64_t>(v.torus[ti].denominator()));
        f[i] = n;
        ++ti;
    }
    return FiniteAbelianGroup(f, g.circle_flags());
}

// ---------------------------------------------------------------------------

static bool rational_sqrt(const Rational& r, Rational& out) {
    auto isqrt = [](std::int64_t n, std::int64_t& s) {
        if (n < 0) return false;
        s = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<long double>(n))));
        while (s * s > n) --s;
        while ((s + 1) * (s + 1) <= n) ++s;
        return s * s == n;
    };
    std::int64_t a, b;
    if (!isqrt(r.numerator(), a) || !isqrt(r.denominator(), b)) return false;
    out = Rational(a, b);
    return true;
}

std::optional<Rational> Distance::exact() const {
    if (inf_) return std::nullopt;
    Rational s;
    if (rational_sqrt(sq_, s)) return s;
    return std::nullopt;
}

std::string Distance::str() const {
    if (inf_) return "inf";
    if (auto e = exact()) return to_string(*e);
    return "sqrt(" + to_string(sq_) + ")";
}

bool Distance::operator<(const Distance& o) const {
    if (inf_) return false;
    if (o.inf_) return true;
    return sq_ < o.sq_;
}

Distance d2(const TorusValue& x, const TorusValue& y) {
    require_shape(x, y);
    if (x.fres != y.fres) return Distance::infinite();
    Rational sq(0);
    for (std::size_t i = 0; i < x.torus.size(); ++i) {
        Rational t = signed_frac(x.torus[i] - y.torus[i]);
        sq += t * t;
    }
    return Distance::from_squared(sq);
}

TorusValue sigma(int k, const std::vector<TorusValue>& f) {
    std::size_t n = std::size_t(1) << k;
    if (f.size() != n) throw Error(ErrorKind::Structural, "sigma: function is not total on the discrete cube");
    TorusValue acc = TorusValue::zero_like(f[0]);
    for (std::size_t v = 0; v < n; ++v) {
        if (popcount(static_cast<std::uint32_t>(v)) & 1) acc -= f[v];
        else acc += f[v];
    }
    return acc;
}

std::uint64_t sigma(int k, const std::vector<std::uint64_t>& f, const FiniteAbelianGroup& g) {
    std::size_t n = std::size_t(1) << k;
    if (f.size() != n) throw Error(ErrorKind::Structural, "sigma: function is not total on the discrete cube");
    std::uint64_t acc = 0;
    for (std::size_t v = 0; v < n; ++v)
        acc = (popcount(static_cast<std::uint32_t>(v)) & 1) ? g.sub(acc, f[v]) : g.add(acc, f[v]);
    return acc;
}

namespace {

const Rational kQuarterSq(1, 16);

bool covers(const std::vector<TorusValue>& values, const TorusValue& z, std::size_t* bad) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        Distance d = d2(values[i], z);
        if (d.is_infinite() || d.squared() >= kQuarterSq) {
            if (bad) *bad = i;
            return false;
        }
    }
    return true;
}

// Midpoint of the shortest arc covering the given circle points.
Rational arc_center(std::vector<Rational> ts) {
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    if (ts.size() == 1) return ts[0];
    std::size_t best = 0;
    Rational gap(-1);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        Rational g = (i + 1 < ts.size()) ? ts[i + 1] - ts[i] : ts[0] + 1 - ts[i];
        if (g > gap) {
            gap = g;
            best = i;
        }
    }
    Rational start = ts[(best + 1) % ts.size()];
    return frac(start + (Rational(1) - gap) / 2);
}

} // namespace

std::optional<TorusValue> try_concentrated_average(const std::vector<TorusValue>& values,
                                                   ConcentrationFailure* witness) {
    if (values.empty()) throw Error(ErrorKind::Precondition, "average of an empty multiset");
    for (std::size_t i = 1; i < values.size(); ++i) {
        require_shape(values[0], values[i]);
        if (values[i].fres != values[0].fres) {
            if (witness) *witness = {0, i};
            return std::nullopt;
        }
    }
    std::vector<TorusValue> centers(values.begin(), values.end());
    TorusValue box = values[0];
    for (std::size_t c = 0; c < box.torus.size(); ++c) {
        std::vector<Rational> ts;
        for (auto& v : values) ts.push_back(v.torus[c]);
        box.torus[c] = arc_center(ts);
    }
    centers.push_back(box);

    const TorusValue* center = nullptr;
    std::size_t bad = 0;
    for (auto& z : centers) {
        if (covers(values, z, &bad)) {
            center = &z;
            break;
        }
    }
    if (!center) {
        if (witness) {
            *witness = {0, bad};
            for (std::size_t i = 0; i < values.size(); ++i)
                for (std::size_t j = i + 1; j < values.size(); ++j)
                    if (!(d2(values[i], values[j]) < Distance::from_value(Rational(1, 2)))) {
                        *witness = {i, j};
                        return std::nullopt;
                    }
        }
        return std::nullopt;
    }
    TorusValue out = *center;
    const auto m = static_cast<std::int64_t>(values.size());
    for (std::size_t c = 0; c < out.torus.size(); ++c) {
        Rational sum(0);
        for (auto& v : values) sum += center->torus[c] + signed_frac(v.torus[c] - center->torus[c]);
        out.torus[c] = frac(sum / m);
    }
    return out;
}

TorusValue concentrated_average(const std::vector<TorusValue>& values) {
    ConcentrationFailure w;
    auto r = try_concentrated_average(values, &w);
    if (!r)
        throw Error(ErrorKind::Concentration, "values #" + std::to_string(w.i) + " (" + values[w.i].str() +
                                                  ") and #" + std::to_string(w.j) + " (" + values[w.j].str() +
                                                  ") do not fit in a ball of radius 1/4");
    return *r;
}

Distance diameter(const std::vector<TorusValue>& values) {
    Distance best = Distance::from_squared(Rational(0));
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j) {
            Distance d = d2(values[i], values[j]);
            if (best < d) best = d;
        }
    return best;
}

} // namespace nilcube
