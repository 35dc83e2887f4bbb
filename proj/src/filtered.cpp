#include "nilcube/filtered.hpp"

#include <algorithm>
#include <numeric>

namespace nilcube {

FilteredGroup::FilteredGroup(std::vector<std::string> labels, std::vector<Elem> table,
                             std::vector<std::vector<Elem>> filtration)
    : labels_(std::move(labels)), table_(std::move(table)), filtration_(std::move(filtration)) {
    const std::size_t N = labels_.size();
    if (N == 0) throw Error(ErrorKind::Structural, "group without elements");
    if (N > Budget::global().max_group_order)
        throw Error(ErrorKind::Budget, "group order " + std::to_string(N) + " exceeds the cap of " +
                                           std::to_string(Budget::global().max_group_order));
    if (table_.size() != N * N) throw Error(ErrorKind::Structural, "multiplication table has the wrong size");
    for (Elem e : table_)
        if (e >= N) throw Error(ErrorKind::Structural, "multiplication table entry out of range");

    bool found = false;
    for (Elem e = 0; e < N && !found; ++e) {
        bool ok = true;
        for (Elem x = 0; x < N && ok; ++x) ok = mul(e, x) == x && mul(x, e) == x;
        if (ok) {
            id_ = e;
            found = true;
        }
    }
    if (!found) throw Error(ErrorKind::Structural, "multiplication table has no identity");
    inv_.assign(N, 0);
    for (Elem a = 0; a < N; ++a) {
        bool ok = false;
        for (Elem b = 0; b < N; ++b)
            if (mul(a, b) == id_ && mul(b, a) == id_) {
                inv_[a] = b;
                ok = true;
                break;
            }
        if (!ok) throw Error(ErrorKind::Structural, "element " + labels_[a] + " has no inverse");
    }
    // Associativity spot check on a deterministic sample of triples.
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    auto next = [&] {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return static_cast<Elem>(state % N);
    };
    for (int t = 0; t < 2000; ++t) {
        Elem a = next(), b = next(), c = next();
        if (mul(mul(a, b), c) != mul(a, mul(b, c)))
            throw Error(ErrorKind::Structural, "multiplication is not associative at (" + labels_[a] + "," +
                                                   labels_[b] + "," + labels_[c] + ")");
    }
    member_.assign(filtration_.size(), std::vector<bool>(N, false));
    for (std::size_t i = 0; i < filtration_.size(); ++i) {
        auto& lv = filtration_[i];
        std::sort(lv.begin(), lv.end());
        lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
        for (Elem e : lv) {
            if (e >= N) throw Error(ErrorKind::Structural, "filtration member out of range");
            member_[i][e] = true;
        }
    }
    trivial_ = {id_};
}

int FilteredGroup::degree() const {
    int d = 0;
    for (std::size_t i = 0; i < filtration_.size(); ++i)
        if (filtration_[i].size() > 1) d = static_cast<int>(i);
    return d;
}

const std::vector<Elem>& FilteredGroup::level(std::size_t i) const {
    return i < filtration_.size() ? filtration_[i] : trivial_;
}

bool FilteredGroup::in_level(Elem g, std::size_t i) const {
    return i < member_.size() ? static_cast<bool>(member_[i][g]) : g == id_;
}

FiltrationReport filt_validate(const FilteredGroup& G) {
    const std::size_t N = G.order();
    for (std::size_t i = 0; i < G.levels(); ++i) {
        const auto& lv = G.level(i);
        if (!G.in_level(G.identity(), i))
            throw Error(ErrorKind::Structural, "G_" + std::to_string(i) + " does not contain the identity");
        for (Elem a : lv) {
            if (!G.in_level(G.inv(a), i))
                throw Error(ErrorKind::Structural, "G_" + std::to_string(i) + " is not closed under inverses");
            for (Elem b : lv)
                if (!G.in_level(G.mul(a, b), i))
                    throw Error(ErrorKind::Structural, "G_" + std::to_string(i) + " is not a subgroup");
        }
        if (i > 0)
            for (Elem a : lv)
                if (!G.in_level(a, i - 1))
                    throw Error(ErrorKind::Structural, "filtration is not descending at G_" + std::to_string(i));
    }
    for (std::size_t i = 0; i < 2; ++i)
        if (G.level(i).size() != N)
            throw Error(ErrorKind::Structural, "G_" + std::to_string(i) + " must be the whole group");

    FiltrationReport rep;
    for (std::size_t i = 1; i < G.levels(); ++i)
        for (std::size_t j = i; j < G.levels(); ++j)
            for (Elem a : G.level(i))
                for (Elem b : G.level(j))
                    if (!G.in_level(G.commutator(a, b), i + j)) {
                        rep.valid = false;
                        if (rep.violations.size() < 16) rep.violations.push_back({i, j, a, b});
                    }
    return rep;
}

FaceDecomposition FaceDecomposition::make(int n) {
    FaceDecomposition d;
    d.n = n;
    for (std::uint32_t v = 0; v < (1u << n); ++v) {
        d.faces.push_back(v);
        d.codims.push_back(popcount(v));
    }
    return d;
}

namespace {

// Proper subsets of each vertex, in increasing order.
std::vector<std::vector<std::uint32_t>> proper_subsets(int n) {
    std::vector<std::vector<std::uint32_t>> out(std::size_t(1) << n);
    for (std::uint32_t i = 0; i < out.size(); ++i)
        for (std::uint32_t j = 0; j < i; ++j)
            if ((j & ~i) == 0) out[i].push_back(j);
    return out;
}

void check_function(const FilteredGroup& G, int n, const std::vector<Elem>& q) {
    if (n < 0 || n > 6) throw Error(ErrorKind::Structural, "unsupported cube dimension");
    if (q.size() != (std::size_t(1) << n)) throw Error(ErrorKind::Structural, "cube function is not total");
    for (Elem e : q)
        if (e >= G.order()) throw Error(ErrorKind::Structural, "cube value is not a group element");
}

} // namespace

HKResult hk_factorize(const FilteredGroup& G, int n, const std::vector<Elem>& q) {
    check_function(G, n, q);
    auto subs = proper_subsets(n);
    HKResult r;
    HKFactorization f;
    f.coefficients.resize(q.size());
    for (std::uint32_t i = 0; i < q.size(); ++i) {
        Elem prod = G.identity();
        for (auto j : subs[i]) prod = G.mul(prod, f.coefficients[j]);
        Elem g = G.mul(G.inv(prod), q[i]);
        if (!G.in_level(g, static_cast<std::size_t>(popcount(i)))) {
            r.reject_index = i;
            return r;
        }
        f.coefficients[i] = g;
    }
    r.factorization = std::move(f);
    return r;
}

std::vector<Elem> hk_recompose(const FilteredGroup& G, int n, const HKFactorization& f) {
    std::size_t V = std::size_t(1) << n;
    if (f.coefficients.size() != V) throw Error(ErrorKind::Structural, "factorization has the wrong length");
    // q = g_0^{F_0} g_1^{F_1} ... evaluated pointwise.
    std::vector<Elem> q(V, G.identity());
    for (std::uint32_t i = 0; i < V; ++i)
        for (std::uint32_t v = 0; v < V; ++v)
            if ((i & ~v) == 0) q[v] = G.mul(q[v], f.coefficients[i]);
    return q;
}

std::uint64_t hk_count(const FilteredGroup& G, int n) {
    long double c = 1;
    std::uint64_t exact = 1;
    for (std::uint32_t v = 0; v < (1u << n); ++v) {
        auto s = G.level(static_cast<std::size_t>(popcount(v))).size();
        c *= static_cast<long double>(s);
        exact *= s;
    }
    if (c > 1.8e19L) return ~std::uint64_t(0);
    return exact;
}

void hk_for_each(const FilteredGroup& G, int n, const std::function<void(const std::vector<Elem>&)>& visit) {
    if (n < 0 || n > 6) throw Error(ErrorKind::Structural, "unsupported cube dimension");
    std::uint64_t need = hk_count(G, n);
    if (need > Budget::global().max_cubes)
        throw Error(ErrorKind::Budget, "Cu^" + std::to_string(n) + " needs " + std::to_string(need) +
                                           " cubes, budget is " + std::to_string(Budget::global().max_cubes));
    const std::uint32_t V = 1u << n;
    auto subs = proper_subsets(n);
    std::vector<Elem> coef(V), q(V);
    std::function<void(std::uint32_t)> rec = [&](std::uint32_t i) {
        if (i == V) {
            visit(q);
            return;
        }
        Elem prod = G.identity();
        for (auto j : subs[i]) prod = G.mul(prod, coef[j]);
        for (Elem g : G.level(static_cast<std::size_t>(popcount(i)))) {
            coef[i] = g;
            q[i] = G.mul(prod, g);
            rec(i + 1);
        }
    };
    rec(0);
}

std::vector<std::vector<Elem>> hk_enumerate(const FilteredGroup& G, int n) {
    std::vector<std::vector<Elem>> out;
    hk_for_each(G, n, [&](const std::vector<Elem>& q) { out.push_back(q); });
    return out;
}

std::vector<Point> coset_map(const FilteredGroup& G, const std::vector<Elem>& gamma) {
    const std::size_t N = G.order();
    std::vector<bool> in(N, false);
    for (Elem e : gamma) {
        if (e >= N) throw Error(ErrorKind::Structural, "subgroup member out of range");
        in[e] = true;
    }
    if (!in[G.identity()]) throw Error(ErrorKind::Structural, "Gamma does not contain the identity");
    for (Elem a : gamma)
        for (Elem b : gamma)
            if (!in[G.mul(a, b)]) throw Error(ErrorKind::Structural, "Gamma is not a subgroup");
    std::vector<Elem> rep(N);
    for (Elem g = 0; g < N; ++g) {
        Elem m = g;
        for (Elem c : gamma) m = std::min(m, G.mul(g, c));
        rep[g] = m;
    }
    std::vector<Elem> reps(rep);
    std::sort(reps.begin(), reps.end());
    reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
    std::vector<Point> out(N);
    for (Elem g = 0; g < N; ++g)
        out[g] = static_cast<Point>(std::lower_bound(reps.begin(), reps.end(), rep[g]) - reps.begin());
    return out;
}

CubespacePtr quotient_nilspace(const FilteredGroup& G, const std::vector<Elem>& gamma, int nmax) {
    auto cm = coset_map(G, gamma);
    std::size_t P = *std::max_element(cm.begin(), cm.end()) + 1;
    std::vector<std::string> labels(P);
    std::vector<bool> seen(P, false);
    for (Elem g = 0; g < G.order(); ++g)
        if (!seen[cm[g]]) {
            seen[cm[g]] = true;
            labels[cm[g]] = G.labels()[g];
        }
    auto X = std::make_shared<Cubespace>(labels, nmax);
    X->declared_step = G.degree();
    X->name = gamma.size() <= 1 ? G.name : G.name + "/Gamma";
    for (int n = 0; n <= nmax; ++n) {
        std::vector<Key> keys;
        std::uint64_t expect = hk_count(G, n);
        if (expect <= Budget::global().max_cubes) keys.reserve(expect);
        std::vector<Point> f(std::size_t(1) << n);
        hk_for_each(G, n, [&](const std::vector<Elem>& q) {
            for (std::size_t v = 0; v < q.size(); ++v) f[v] = cm[q[v]];
            keys.push_back(X->pack(n, f));
        });
        X->set_cubes(n, std::move(keys));
    }
    return X;
}

FilteredGroup heisenberg(std::uint64_t N) {
    if (N < 2) throw Error(ErrorKind::Structural, "Heisenberg modulus must be at least 2");
    if (N * N * N > Budget::global().max_group_order)
        throw Error(ErrorKind::Budget, "Heisenberg group mod " + std::to_string(N) + " exceeds the group cap");
    const std::size_t M = N * N * N;
    auto idx = [N](std::uint64_t a, std::uint64_t b, std::uint64_t c) { return static_cast<Elem>(a + N * b + N * N * c); };
    std::vector<std::string> labels(M);
    std::vector<Elem> table(M * M);
    std::vector<Elem> all, center;
    for (std::uint64_t c = 0; c < N; ++c)
        for (std::uint64_t b = 0; b < N; ++b)
            for (std::uint64_t a = 0; a < N; ++a) {
                labels[idx(a, b, c)] = std::to_string(a) + "." + std::to_string(b) + "." + std::to_string(c);
                if (a == 0 && b == 0) center.push_back(idx(a, b, c));
            }
    for (Elem e = 0; e < M; ++e) all.push_back(e);
    for (std::uint64_t x = 0; x < M; ++x) {
        std::uint64_t a = x % N, b = (x / N) % N, c = x / (N * N);
        for (std::uint64_t y = 0; y < M; ++y) {
            std::uint64_t a2 = y % N, b2 = (y / N) % N, c2 = y / (N * N);
            table[x * M + y] = idx((a + a2) % N, (b + b2) % N, (c + c2 + a * b2) % N);
        }
    }
    FilteredGroup G(labels, table, {all, all, center, {idx(0, 0, 0)}});
    G.name = "heis(" + std::to_string(N) + ")";
    return G;
}

FilteredGroup cyclic_deg2(std::uint64_t N) {
    if (N < 1) throw Error(ErrorKind::Structural, "cyclic-deg2 parameter must be positive");
    const std::size_t M = 2 * N;
    std::vector<std::string> labels(M);
    std::vector<Elem> table(M * M), all;
    for (Elem x = 0; x < M; ++x) {
        labels[x] = std::to_string(x);
        all.push_back(x);
        for (Elem y = 0; y < M; ++y) table[x * M + y] = static_cast<Elem>((x + y) % M);
    }
    FilteredGroup G(labels, table, {all, all, {0, static_cast<Elem>(N)}, {0}});
    G.name = "cyclic-deg2(" + std::to_string(N) + ")";
    return G;
}

std::string element_label(const FiniteAbelianGroup& A, std::uint64_t code) {
    if (A.arity() == 0) return "0";
    auto r = A.decode(code);
    std::string s;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) s += ".";
        if (A.circle_flags()[i]) s += to_string(Rational(static_cast<std::int64_t>(r[i]), static_cast<std::int64_t>(A.factors()[i])));
        else s += std::to_string(r[i]);
    }
    return s;
}

FilteredGroup abelian_filtered(const FiniteAbelianGroup& A, int k) {
    const std::uint64_t M = A.order();
    if (M > Budget::global().max_group_order)
        throw Error(ErrorKind::Budget, "group order " + std::to_string(M) + " exceeds the cap");
    std::vector<std::string> labels(M);
    std::vector<Elem> table(M * M);
    for (std::uint64_t x = 0; x < M; ++x) {
        labels[x] = element_label(A, x);
        for (std::uint64_t y = 0; y < M; ++y) table[x * M + y] = static_cast<Elem>(A.add(x, y));
    }
    FilteredGroup G = abelian_filtered_from_table(labels, table, k);
    G.name = "D" + std::to_string(k) + "(" + A.descriptor() + ")";
    return G;
}

FilteredGroup abelian_filtered_from_table(std::vector<std::string> labels, const std::vector<Elem>& add_table, int k) {
    const std::size_t M = labels.size();
    std::vector<Elem> all(M);
    std::iota(all.begin(), all.end(), 0);
    std::vector<std::vector<Elem>> filt(static_cast<std::size_t>(k) + 1, all);
    FilteredGroup tmp(labels, add_table, {all});
    filt.push_back({tmp.identity()});
    return FilteredGroup(std::move(labels), add_table, std::move(filt));
}

} // namespace nilcube
