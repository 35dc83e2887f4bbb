#include "nilcube/cocycles.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "nilcube/linalg.hpp"

namespace nilcube {

namespace {

std::string show_cube(const Cubespace& X, const std::vector<Point>& f) {
    std::string s = "(";
    for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + X.label(f[i]);
    return s + ")";
}

std::uint64_t sigma_codes(const FiniteAbelianGroup& A, const std::vector<std::uint64_t>& z) {
    std::uint64_t s = 0;
    for (std::uint32_t v = 0; v < z.size(); ++v) s = (popcount(v) & 1) ? A.sub(s, z[v]) : A.add(s, z[v]);
    return s;
}

struct Generator {
    CubeMorphismSpec phi;
    bool negate;
};

std::vector<Generator> automorphism_generators(int d) {
    std::vector<Generator> g{{CubeMorphismSpec::reflection(d, 0), true}};
    if (d >= 2) g.push_back({CubeMorphismSpec::transposition(d, 0, 1), false});
    if (d >= 3) g.push_back({CubeMorphismSpec::cycle(d), false});
    return g;
}

// Visits (q1, q2, q3) index triples of concatenations along the last axis.
// Returns false through the visitor to stop early.
template <class F>
void for_each_concatenation(const Cubespace& X, int d, F&& visit) {
    const std::size_t half = std::size_t(1) << (d - 1);
    const auto& cubes = X.cubes(d);
    std::vector<Point> q1(2 * half), q2(2 * half), q3(2 * half);
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        X.unpack(d, cubes[i], q1.data());
        auto [lo, hi] = X.prefix_range(d, q1.data() + half, static_cast<int>(half));
        for (std::size_t j = lo; j < hi; ++j) {
            X.unpack(d, cubes[j], q2.data());
            for (std::size_t v = 0; v < half; ++v) {
                q3[v] = q1[v];
                q3[v + half] = q2[v + half];
            }
            auto k = X.index_of(d, X.pack(d, q3));
            if (!visit(i, j, k, q1, q2, q3)) return;
        }
    }
}

void require_same_base(const Cocycle& rho) {
    if (!rho.base) throw Error(ErrorKind::Structural, "cocycle without a base space");
    if (rho.dim < 1 || rho.dim > rho.base->nmax())
        throw Error(ErrorKind::Config, "cocycle dimension " + std::to_string(rho.dim) + " is outside 1..n_max");
    if (rho.table.size() != rho.base->count(rho.dim))
        throw Error(ErrorKind::Structural, "cocycle table is not total on Cu^" + std::to_string(rho.dim));
    for (auto v : rho.table)
        if (v >= rho.A.order()) throw Error(ErrorKind::Structural, "cocycle value outside the coefficient group");
}

TorusValue sigma_values(const std::vector<TorusValue>& z) {
    TorusValue s = TorusValue::zero_like(z[0]);
    for (std::uint32_t v = 0; v < z.size(); ++v) {
        if (popcount(v) & 1) s -= z[v];
        else s += z[v];
    }
    return s;
}

std::uint64_t coded(const FiniteAbelianGroup& A, const TorusValue& v, const char* what) {
    auto c = from_value(A, v);
    if (!c) throw Error(ErrorKind::Structural, std::string(what) + " " + v.str() + " is not in " + A.descriptor());
    return *c;
}

// Largest n <= cap whose extension cube count stays in budget and packs.
int affordable_nmax(const Cubespace& X, std::size_t asize, int d, int cap) {
    int nm = 0;
    for (int n = 1; n <= cap; ++n) {
        if (bits_for(X.size() * asize) * (1u << n) > 64) break;
        int free = 0;
        for (std::uint32_t u = 0; u < (1u << n); ++u)
            if (n < d || popcount(u) < d) ++free;
        long double est = static_cast<long double>(X.count(n));
        for (int i = 0; i < free; ++i) est *= static_cast<long double>(asize);
        if (est > static_cast<long double>(Budget::global().max_cubes)) break;
        nm = n;
    }
    return nm;
}

} // namespace

std::uint64_t Cocycle::at(Key q) const {
    auto idx = base->index_of(dim, q);
    if (!idx) throw Error(ErrorKind::Structural, "cocycle evaluated off the cube set");
    return table[*idx];
}

Cocycle zero_cocycle(const CubespacePtr& X, int dim, const FiniteAbelianGroup& A) {
    Cocycle rho{X, dim, A, std::vector<std::uint64_t>(X->count(dim), 0)};
    return rho;
}

Cocycle coboundary(const CubespacePtr& X, int dim, const FiniteAbelianGroup& A, const std::vector<std::uint64_t>& g) {
    if (g.size() != X->size()) throw Error(ErrorKind::Structural, "function has the wrong number of points");
    Cocycle rho{X, dim, A, {}};
    rho.table.reserve(X->count(dim));
    std::vector<Point> q(std::size_t(1) << dim);
    std::vector<std::uint64_t> z(q.size());
    for (Key k : X->cubes(dim)) {
        X->unpack(dim, k, q.data());
        for (std::size_t v = 0; v < q.size(); ++v) z[v] = g[q[v]];
        rho.table.push_back(sigma_codes(A, z));
    }
    return rho;
}

Cocycle recode(const Cocycle& rho, const FiniteAbelianGroup& A) {
    Cocycle out{rho.base, rho.dim, A, {}};
    out.table.reserve(rho.table.size());
    for (std::size_t i = 0; i < rho.table.size(); ++i) out.table.push_back(coded(A, rho.value(i), "value"));
    return out;
}

Cocycle add(const Cocycle& a, const Cocycle& b) {
    if (a.base != b.base || a.dim != b.dim || !(a.A == b.A))
        throw Error(ErrorKind::Structural, "cocycles live on different spaces or groups");
    Cocycle out = a;
    for (std::size_t i = 0; i < out.table.size(); ++i) out.table[i] = a.A.add(a.table[i], b.table[i]);
    return out;
}

CocycleReport cocycle_verify(const Cocycle& rho, std::size_t max_violations) {
    require_same_base(rho);
    CocycleReport R;
    const Cubespace& X = *rho.base;
    const int d = rho.dim;
    const auto& A = rho.A;
    auto note = [&](const std::string& s) {
        if (R.violations.size() < max_violations) R.violations.push_back(s);
    };
    for (auto& gen : automorphism_generators(d)) {
        for (std::size_t i = 0; i < X.count(d); ++i) {
            auto q = X.cube(d, i);
            auto p = pull_back(gen.phi, q);
            auto j = X.index_of(d, X.pack(d, p));
            if (!j) {
                R.automorphism = false;
                note("composition " + show_cube(X, p) + " is not a cube");
                continue;
            }
            std::uint64_t want = gen.negate ? A.neg(rho.table[i]) : rho.table[i];
            if (rho.table[*j] != want) {
                R.automorphism = false;
                note("rho" + show_cube(X, p) + " != " + std::string(gen.negate ? "-" : "") + "rho" +
                     show_cube(X, q) + " under " + gen.phi.str());
            }
        }
    }
    for_each_concatenation(X, d, [&](std::size_t i, std::size_t j, std::optional<std::size_t> k,
                                     const std::vector<Point>& q1, const std::vector<Point>& q2,
                                     const std::vector<Point>& q3) {
        ++R.checked_pairs;
        if (!k) {
            R.concatenation = false;
            note("concatenation " + show_cube(X, q3) + " is not a cube");
        } else if (rho.table[*k] != A.add(rho.table[i], rho.table[j])) {
            R.concatenation = false;
            note("rho" + show_cube(X, q3) + " != rho" + show_cube(X, q1) + " + rho" + show_cube(X, q2));
        }
        return true;
    });
    return R;
}

bool is_coboundary_of(const Cocycle& rho, const std::vector<TorusValue>& g) {
    const Cubespace& X = *rho.base;
    const int d = rho.dim;
    std::vector<Point> q(std::size_t(1) << d);
    std::vector<TorusValue> z(q.size());
    for (std::size_t i = 0; i < X.count(d); ++i) {
        X.unpack(d, X.cubes(d)[i], q.data());
        for (std::size_t v = 0; v < q.size(); ++v) z[v] = g[q[v]];
        if (sigma_values(z) != rho.value(i)) return false;
    }
    return true;
}

std::optional<CoboundarySolution> coboundary_by_averaging(const Cocycle& rho) {
    require_same_base(rho);
    const Cubespace& X = *rho.base;
    CoboundarySolution sol;
    sol.path = SolvePath::Averaging;
    for (Point x = 0; x < X.size(); ++x) {
        auto [lo, hi] = X.prefix_range(rho.dim, &x, 1);
        std::vector<TorusValue> vals;
        for (std::size_t i = lo; i < hi; ++i) vals.push_back(rho.value(i));
        if (vals.empty()) return std::nullopt;
        auto avg = try_concentrated_average(vals);
        if (!avg) return std::nullopt;
        sol.g.push_back(*avg);
    }
    if (!is_coboundary_of(rho, sol.g)) return std::nullopt;
    return sol;
}

std::optional<CoboundarySolution> coboundary_by_linear(const Cocycle& rho) {
    require_same_base(rho);
    const Cubespace& X = *rho.base;
    const int d = rho.dim;
    const std::size_t N = X.count(d), P = X.size();
    IntMatrix M = zero_matrix(N, P);
    std::vector<Point> q(std::size_t(1) << d);
    for (std::size_t i = 0; i < N; ++i) {
        X.unpack(d, X.cubes(d)[i], q.data());
        for (std::uint32_t v = 0; v < q.size(); ++v) M[i][q[v]] += (popcount(v) & 1) ? -1 : 1;
    }
    const auto& A = rho.A;
    std::vector<std::vector<std::uint64_t>> res(P, std::vector<std::uint64_t>(A.arity(), 0));
    for (std::size_t f = 0; f < A.arity(); ++f) {
        std::vector<BigInt> b(N);
        for (std::size_t i = 0; i < N; ++i) b[i] = BigInt(A.decode(rho.table[i])[f]);
        auto y = solve_mod(M, b, BigInt(A.factors()[f]));
        if (!y) return std::nullopt;
        for (std::size_t x = 0; x < P; ++x) res[x][f] = static_cast<std::uint64_t>(mod_floor((*y)[x], BigInt(A.factors()[f])));
    }
    CoboundarySolution sol;
    sol.path = SolvePath::Linear;
    for (std::size_t x = 0; x < P; ++x) sol.g.push_back(to_value(A, A.encode(res[x])));
    if (!is_coboundary_of(rho, sol.g)) throw Error(ErrorKind::Structural, "linear solution does not reproduce the cocycle");
    return sol;
}

std::optional<CoboundarySolution> coboundary_solve(const Cocycle& rho) {
    if (auto s = coboundary_by_averaging(rho)) return s;
    return coboundary_by_linear(rho);
}

std::vector<Point> Extension::projection() const {
    std::vector<Point> p(space->size());
    for (Point y = 0; y < p.size(); ++y) p[y] = base_of(y);
    return p;
}

bool Extension::contains(int n, const std::vector<Point>& f) const {
    const Cubespace& X = *rho.base;
    if (n > X.nmax()) throw Error(ErrorKind::Config, "extension cube test beyond the base n_max");
    std::vector<Point> q(f.size());
    std::vector<std::uint64_t> z(f.size());
    for (std::size_t v = 0; v < f.size(); ++v) {
        if (f[v] >= X.size() * fibre()) return false;
        q[v] = base_of(f[v]);
        z[v] = offset_of(f[v]);
    }
    if (!X.contains(n, q)) return false;
    const int d = rho.dim;
    if (n < d) return true;
    const auto& A = rho.A;
    for (auto& face : faces(n, d)) {
        std::vector<Point> qf;
        std::vector<std::uint64_t> zf;
        for (auto v : face.verts) {
            qf.push_back(q[v]);
            zf.push_back(z[v]);
        }
        if (A.add(rho.at(qf), sigma_codes(A, zf)) != 0) return false;
    }
    return true;
}

Extension build_extension(const Cocycle& rho, int nmax) {
    auto rep = cocycle_verify(rho, 1);
    if (!rep.ok()) throw Error(ErrorKind::Precondition, "cocycle fails verification: " + rep.violations.front());
    const Cubespace& X = *rho.base;
    const auto& A = rho.A;
    const std::size_t m = A.order();
    const int d = rho.dim;
    int cap = nmax < 0 ? X.nmax() : std::min(nmax, X.nmax());
    int nm = affordable_nmax(X, m, d, cap);
    if (nmax >= 0 && nm < nmax)
        throw Error(ErrorKind::Budget, "extension cubes up to dimension " + std::to_string(nmax) + " exceed the budget");

    std::vector<std::string> labels;
    for (Point x = 0; x < X.size(); ++x)
        for (std::uint64_t z = 0; z < m; ++z) labels.push_back(X.label(x) + ":" + element_label(A, z));
    auto M = std::make_shared<Cubespace>(labels, nm);
    M->name = "M(" + X.name + ")";
    M->declared_step = std::max(X.declared_step.value_or(0), d - 1);

    Extension E{rho, nullptr};
    for (int n = 0; n <= nm; ++n) {
        const std::uint32_t V = 1u << n;
        // For each vertex u, the d-faces with top vertex u (popcount(u) >= d).
        std::vector<std::vector<std::vector<std::uint32_t>>> top(V);
        if (n >= d)
            for (auto& face : faces(n, d)) top[face.verts.back()].push_back(face.verts);
        std::vector<Key> keys;
        std::vector<Point> q(V), f(V);
        std::vector<std::uint64_t> z(V);
        for (Key bk : X.cubes(n)) {
            X.unpack(n, bk, q.data());
            // Depth-first over vertices; a vertex that tops a face is forced.
            std::vector<std::vector<std::uint64_t>> face_rho(V);
            for (std::uint32_t u = 0; u < V; ++u)
                for (auto& fv : top[u]) {
                    std::vector<Point> qf;
                    for (auto v : fv) qf.push_back(q[v]);
                    face_rho[u].push_back(rho.at(qf));
                }
            auto rec = [&](auto&& self, std::uint32_t u) -> void {
                if (u == V) {
                    for (std::uint32_t v = 0; v < V; ++v) f[v] = E.point(q[v], z[v]);
                    keys.push_back(M->pack(n, f));
                    return;
                }
                if (top[u].empty()) {
                    for (std::uint64_t a = 0; a < m; ++a) {
                        z[u] = a;
                        self(self, u + 1);
                    }
                    return;
                }
                // rho(q|F) + sigma_d(z|F) = 0 with the top vertex weighted (-1)^d.
                auto forced = [&](std::size_t t) {
                    const auto& fv = top[u][t];
                    std::uint64_t s = face_rho[u][t];
                    for (std::uint32_t w = 0; w + 1 < fv.size(); ++w)
                        s = (popcount(w) & 1) ? A.sub(s, z[fv[w]]) : A.add(s, z[fv[w]]);
                    return (d & 1) ? s : A.neg(s);
                };
                z[u] = forced(0);
                for (std::size_t t = 1; t < top[u].size(); ++t)
                    if (forced(t) != z[u]) return;
                self(self, u + 1);
            };
            rec(rec, 0);
        }
        M->set_cubes(n, std::move(keys));
    }
    E.space = M;
    return E;
}

std::uint64_t AbstractExtension::diff(Point y1, Point y2) const {
    const std::size_t m = A.order();
    for (std::uint64_t a = 0; a < m; ++a)
        if (act[std::size_t(y2) * m + a] == y1) return a;
    throw Error(ErrorKind::NotExtension, total->label(y1) + " and " + total->label(y2) + " are in different fibres");
}

AbstractExtension as_abstract(const Extension& M) {
    AbstractExtension E;
    E.total = M.space;
    E.base = M.rho.base;
    E.proj = M.projection();
    E.A = M.rho.A;
    E.degree = M.rho.dim - 1;
    const std::size_t m = M.fibre();
    E.act.resize(M.space->size() * m);
    for (Point y = 0; y < M.space->size(); ++y)
        for (std::uint64_t a = 0; a < m; ++a)
            E.act[std::size_t(y) * m + a] = M.point(M.base_of(y), M.rho.A.add(M.offset_of(y), a));
    return E;
}

AbstractExtension split_extension(const CubespacePtr& X, const FiniteAbelianGroup& A, int degree) {
    auto D = make_Dk(A, degree, X->nmax());
    AbstractExtension E;
    auto T = product(*X, *D);
    auto Tm = std::make_shared<Cubespace>(*T);
    Tm->declared_step = std::max(X->declared_step.value_or(0), degree);
    E.total = Tm;
    E.base = X;
    E.A = A;
    E.degree = degree;
    const std::size_t m = A.order();
    E.proj.resize(T->size());
    E.act.resize(T->size() * m);
    for (Point y = 0; y < T->size(); ++y) {
        E.proj[y] = static_cast<Point>(y / m);
        for (std::uint64_t a = 0; a < m; ++a) E.act[std::size_t(y) * m + a] = static_cast<Point>((y / m) * m + A.add(y % m, a));
    }
    return E;
}

void validate_abstract(const AbstractExtension& E) {
    const std::size_t m = E.A.order();
    if (E.proj.size() != E.total->size() || E.act.size() != E.total->size() * m)
        throw Error(ErrorKind::NotExtension, "projection or action table has the wrong size");
    std::vector<std::size_t> fib(E.base->size(), 0);
    for (auto p : E.proj) ++fib[p];
    for (auto c : fib)
        if (c != m) throw Error(ErrorKind::NotExtension, "fibres do not have |A| points");
    for (Point y = 0; y < E.total->size(); ++y) {
        std::set<Point> seen;
        for (std::uint64_t a = 0; a < m; ++a) {
            Point t = E.act[std::size_t(y) * m + a];
            if (E.proj[t] != E.proj[y]) throw Error(ErrorKind::NotExtension, "action leaves a fibre");
            seen.insert(t);
            for (std::uint64_t b = 0; b < m; ++b)
                if (E.act[std::size_t(t) * m + b] != E.act[std::size_t(y) * m + E.A.add(a, b)])
                    throw Error(ErrorKind::NotExtension, "action is not compatible with the group law");
        }
        if (seen.size() != m) throw Error(ErrorKind::NotExtension, "action is not free");
    }
    std::string w;
    if (!is_morphism(*E.total, *E.base, E.proj, E.total->nmax(), &w))
        throw Error(ErrorKind::NotExtension, "projection is not a morphism: " + w);
}

Cocycle cocycle_from_section(const AbstractExtension& E, const std::vector<Point>& s) {
    const Cubespace& X = *E.base;
    const Cubespace& Y = *E.total;
    const int d = E.degree + 1;
    if (s.size() != X.size()) throw Error(ErrorKind::Precondition, "section has the wrong size");
    for (Point x = 0; x < X.size(); ++x)
        if (s[x] >= Y.size() || E.proj[s[x]] != x) throw Error(ErrorKind::Precondition, "section is not a right inverse");
    if (Y.nmax() < d) throw Error(ErrorKind::Config, "total space stores cubes only up to " + std::to_string(Y.nmax()));
    Cocycle rho{E.base, d, E.A, std::vector<std::uint64_t>(X.count(d), 0)};
    std::vector<char> seen(X.count(d), 0);
    std::vector<Point> qp(std::size_t(1) << d), q(qp.size());
    std::vector<std::uint64_t> a(qp.size());
    for (Key k : Y.cubes(d)) {
        Y.unpack(d, k, qp.data());
        for (std::size_t v = 0; v < qp.size(); ++v) {
            q[v] = E.proj[qp[v]];
            a[v] = E.diff(s[q[v]], qp[v]);
        }
        auto idx = X.index_of(d, X.pack(d, q));
        if (!idx) throw Error(ErrorKind::NotExtension, "projection of " + show_cube(Y, qp) + " is not a cube");
        auto val = sigma_codes(E.A, a);
        if (seen[*idx] && rho.table[*idx] != val)
            throw Error(ErrorKind::NotExtension, "section cocycle depends on the lift of " + show_cube(X, q));
        seen[*idx] = 1;
        rho.table[*idx] = val;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) throw Error(ErrorKind::NotExtension, "cube " + show_cube(X, X.cube(d, i)) + " has no lift");
    return rho;
}

ThetaResult extension_theta(const AbstractExtension& E, const std::vector<Point>& s) {
    auto rho = cocycle_from_section(E, s);
    ThetaResult R{build_extension(rho), {}};
    const Extension& M = R.target;
    const Cubespace& Y = *E.total;
    R.map.resize(Y.size());
    std::vector<char> hit(M.space->size(), 0);
    for (Point y = 0; y < Y.size(); ++y) {
        Point x = E.proj[y];
        R.map[y] = M.point(x, E.diff(y, s[x]));
        if (hit[R.map[y]]) throw Error(ErrorKind::NotIsomorphic, "theta is not injective");
        hit[R.map[y]] = 1;
    }
    if (Y.size() != M.space->size()) throw Error(ErrorKind::NotIsomorphic, "theta is not onto");
    std::vector<Point> inv(Y.size());
    for (Point y = 0; y < Y.size(); ++y) inv[R.map[y]] = y;
    const int nm = std::min(Y.nmax(), M.rho.base->nmax());
    for (int n = 0; n <= nm; ++n) {
        std::vector<Point> f(std::size_t(1) << n);
        for (Key k : Y.cubes(n)) {
            Y.unpack(n, k, f.data());
            for (auto& p : f) p = R.map[p];
            if (!M.contains(n, f)) throw Error(ErrorKind::NotIsomorphic, "theta does not preserve " + std::to_string(n) + "-cubes");
        }
    }
    for (int n = 0; n <= std::min(Y.nmax(), M.space->nmax()); ++n) {
        std::vector<Point> f(std::size_t(1) << n);
        for (Key k : M.space->cubes(n)) {
            M.space->unpack(n, k, f.data());
            for (auto& p : f) p = inv[p];
            if (!Y.contains(n, f)) throw Error(ErrorKind::NotIsomorphic, "inverse of theta does not preserve " + std::to_string(n) + "-cubes");
        }
    }
    return R;
}

TricubeReport tricube_verify(const Cocycle& rho, std::size_t max_violations) {
    require_same_base(rho);
    const Cubespace& X = *rho.base;
    const int d = rho.dim;
    auto T = make_tricube(d);
    const auto& A = rho.A;
    TricubeReport R;
    const std::uint32_t V = 1u << d;
    std::vector<Point> tq(V);
    for (std::size_t i = 0; i < X.count(d); ++i) {
        auto q = X.cube(d, i);
        ++R.cubes;
        std::vector<std::int64_t> fixed(T.space.verts.size(), -1);
        for (std::uint32_t v = 0; v < V; ++v) fixed[T.omega[v]] = q[v];
        auto homs = hom_set(T.space, fixed, X);
        if (homs.empty()) ++R.empty_hom_sets;
        for (auto& t : homs) {
            ++R.pairs;
            std::uint64_t s = 0;
            for (std::uint32_t v = 0; v < V; ++v) {
                for (std::uint32_t w = 0; w < V; ++w) tq[w] = t[T.psi[v][w]];
                std::uint64_t r = rho.at(tq);
                s = (popcount(v) & 1) ? A.sub(s, r) : A.add(s, r);
            }
            if (s != rho.table[i] && R.violations.size() < max_violations)
                R.violations.push_back("q = " + show_cube(X, q) + ": alternating sum " + element_label(A, s) +
                                       " != " + element_label(A, rho.table[i]));
        }
    }
    return R;
}

AveragedCocycle average_cocycle(const Cocycle& rho, const Morphism& beta) {
    require_same_base(rho);
    const Cubespace& X = *rho.base;
    const Cubespace& Xp = *beta.target;
    if (beta.map.size() != X.size()) throw Error(ErrorKind::Structural, "beta is not defined on the cocycle's base");
    const int d = rho.dim;
    if (Xp.nmax() < d) throw Error(ErrorKind::Config, "target of beta stores too few cube dimensions");
    const std::size_t N = X.count(d);
    std::vector<std::pair<Key, std::size_t>> rows;
    rows.reserve(N);
    std::vector<Point> q(std::size_t(1) << d);
    for (std::size_t i = 0; i < N; ++i) {
        X.unpack(d, X.cubes(d)[i], q.data());
        for (auto& p : q) p = beta.map[p];
        rows.emplace_back(Xp.pack(d, q), i);
    }
    std::sort(rows.begin(), rows.end());
    std::vector<TorusValue> avg(N);
    AveragedCocycle out;
    out.shift = Distance::from_squared(Rational(0));
    out.fibre_diameter = Distance::from_squared(Rational(0));
    for (std::size_t s = 0; s < rows.size();) {
        std::size_t e = s;
        while (e < rows.size() && rows[e].first == rows[s].first) ++e;
        std::vector<TorusValue> vals;
        for (std::size_t r = s; r < e; ++r) vals.push_back(rho.value(rows[r].second));
        ConcentrationFailure w;
        auto a = try_concentrated_average(vals, &w);
        if (!a)
            throw Error(ErrorKind::Concentration, "fibre over " + show_cube(Xp, Xp.unpack(d, rows[s].first)) +
                                                      " has values " + vals[w.i].str() + " and " + vals[w.j].str() +
                                                      " outside one ball of radius 1/4");
        Distance diam = diameter(vals);
        if (out.fibre_diameter < diam) out.fibre_diameter = diam;
        for (std::size_t r = s; r < e; ++r) {
            avg[rows[r].second] = *a;
            Distance sh = d2(*a, vals[r - s]);
            if (out.shift < sh) out.shift = sh;
        }
        s = e;
    }
    auto A2 = refine_circle(rho.A, avg);
    out.rho = Cocycle{rho.base, d, A2, {}};
    out.rho.table.reserve(N);
    for (auto& v : avg) out.rho.table.push_back(coded(A2, v, "average"));
    return out;
}

RectifyResult rectify_lifted_map(const Extension& M, const CubespacePtr& S, const std::vector<Point>& phi2,
                                 const std::vector<Point>& phi3) {
    const Cubespace& X = *M.rho.base;
    const auto& A = M.rho.A;
    const int d = M.rho.dim;
    if (phi2.size() != S->size() || phi3.size() != S->size()) throw Error(ErrorKind::Structural, "maps have the wrong size");
    if (S->nmax() < d) throw Error(ErrorKind::Config, "source stores too few cube dimensions");
    for (Point x = 0; x < S->size(); ++x)
        if (M.base_of(phi3[x]) != phi2[x]) throw Error(ErrorKind::Precondition, "phi3 does not lift phi2");
    std::string w;
    if (!is_morphism(*S, X, phi2, d, &w)) throw Error(ErrorKind::Precondition, "phi2 is not a morphism: " + w);
    {
        std::vector<Point> f(std::size_t(1) << (d - 1));
        for (Key k : S->cubes(d - 1)) {
            S->unpack(d - 1, k, f.data());
            for (auto& p : f) p = phi3[p];
            if (!M.contains(d - 1, f)) throw Error(ErrorKind::Precondition, "phi3 does not preserve " + std::to_string(d - 1) + "-cubes");
        }
    }
    const std::uint32_t V = 1u << d;
    std::vector<TorusValue> offsets(S->size());
    std::vector<Point> q(V), bq(V);
    for (Point x = 0; x < S->size(); ++x) {
        TorusValue own = to_value(A, M.offset_of(phi3[x]));
        auto [lo, hi] = S->prefix_range(d, &x, 1);
        std::vector<TorusValue> diffs;
        for (std::size_t i = lo; i < hi; ++i) {
            S->unpack(d, S->cubes(d)[i], q.data());
            for (std::uint32_t v = 0; v < V; ++v) bq[v] = phi2[q[v]];
            // comp0: the offset at vertex 0 making rho(bq) = -sigma(z).
            TorusValue z0 = -to_value(A, M.rho.at(bq));
            for (std::uint32_t v = 1; v < V; ++v) {
                TorusValue zv = to_value(A, M.offset_of(phi3[q[v]]));
                if (popcount(v) & 1) z0 += zv;
                else z0 -= zv;
            }
            diffs.push_back(z0 - own);
        }
        ConcentrationFailure cw;
        auto avg = try_concentrated_average(diffs, &cw);
        if (!avg)
            throw Error(ErrorKind::Concentration, "completions at " + S->label(x) + " spread over " + diffs[cw.i].str() +
                                                      " and " + diffs[cw.j].str());
        offsets[x] = own + *avg;
    }
    auto A2 = refine_circle(A, offsets);
    auto rho2 = recode(M.rho, A2);
    RectifyResult R{build_extension(rho2, 0), {}, offsets};
    for (Point x = 0; x < S->size(); ++x) R.map.push_back(R.target.point(phi2[x], coded(A2, offsets[x], "offset")));
    for (int n = 0; n <= std::min(S->nmax(), X.nmax()); ++n) {
        std::vector<Point> f(std::size_t(1) << n);
        for (Key k : S->cubes(n)) {
            S->unpack(n, k, f.data());
            for (auto& p : f) p = R.map[p];
            if (!R.target.contains(n, f))
                throw Error(ErrorKind::Precondition, "rectified map does not preserve " + std::to_string(n) +
                                                         "-cubes; the lift is too far from a morphism");
        }
    }
    return R;
}

CohomologyResult cohomology(const CubespacePtr& Xp, int d, const FiniteAbelianGroup& A) {
    const Cubespace& X = *Xp;
    if (d < 1 || d > X.nmax()) throw Error(ErrorKind::Config, "cohomology dimension outside 1..n_max");
    const std::size_t N = X.count(d), P = X.size();
    if (N > 1024) throw Error(ErrorKind::Budget, "cohomology needs |Cu^d| <= 1024, got " + std::to_string(N));
    std::set<std::vector<std::pair<std::size_t, int>>> rowset;
    auto push = [&](std::map<std::size_t, int> coef) {
        std::vector<std::pair<std::size_t, int>> r;
        for (auto [c, v] : coef)
            if (v != 0) r.emplace_back(c, v);
        if (!r.empty()) rowset.insert(r);
    };
    for (auto& gen : automorphism_generators(d))
        for (std::size_t i = 0; i < N; ++i) {
            auto p = pull_back(gen.phi, X.cube(d, i));
            auto j = X.index_of(d, X.pack(d, p));
            if (!j) throw Error(ErrorKind::NotNilspace, "cube set not closed under automorphisms");
            std::map<std::size_t, int> c;
            c[*j] += 1;
            c[i] += gen.negate ? 1 : -1;
            push(c);
        }
    for_each_concatenation(X, d, [&](std::size_t i, std::size_t j, std::optional<std::size_t> k, auto&, auto&, auto&) {
        if (!k) throw Error(ErrorKind::NotNilspace, "concatenation of cubes is not a cube");
        std::map<std::size_t, int> c;
        c[*k] += 1;
        c[i] -= 1;
        c[j] -= 1;
        push(c);
        return true;
    });
    IntMatrix L = zero_matrix(std::max<std::size_t>(rowset.size(), 1), N);
    std::size_t r = 0;
    for (auto& row : rowset) {
        for (auto [c, v] : row) L[r][c] = v;
        ++r;
    }
    auto sd = smith_decompose(L, false);
    IntMatrix delta = zero_matrix(N, P);
    std::vector<Point> q(std::size_t(1) << d);
    for (std::size_t i = 0; i < N; ++i) {
        X.unpack(d, X.cubes(d)[i], q.data());
        for (std::uint32_t v = 0; v < q.size(); ++v) delta[i][q[v]] += (popcount(v) & 1) ? -1 : 1;
    }
    auto y_all = multiply(sd.Vinv, delta);

    CohomologyResult out;
    std::vector<std::uint64_t> cyc;
    for (auto mf : A.factors()) {
        const BigInt m(mf);
        std::vector<BigInt> c(N, 1);
        for (std::size_t i = 0; i < sd.rank; ++i) c[i] = m / gcd(BigInt(abs(sd.D[i][i])), m);
        // Z = {V diag(c) u}, u_i in Z/(m/c_i); coboundaries in u coordinates.
        IntMatrix K = zero_matrix(N, P + N);
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t x = 0; x < P; ++x) {
                BigInt y = mod_floor(y_all[i][x], m);
                if (y % c[i] != 0) throw Error(ErrorKind::Structural, "coboundary is not a cocycle");
                K[i][x] = y / c[i];
            }
            K[i][P + i] = m / c[i];
        }
        std::uint64_t zc = 1;
        for (std::size_t i = 0; i < N; ++i) zc *= static_cast<std::uint64_t>(m / c[i]);
        out.cocycles *= zc;
        std::uint64_t h = 1;
        for (auto& inv : smith_invariants(K)) {
            auto v = static_cast<std::uint64_t>(inv);
            if (v > 1) {
                cyc.push_back(v);
                h *= v;
            }
        }
        out.coboundaries *= zc / h;
    }
    out.invariant_factors = invariant_factors(cyc);
    for (auto f : out.invariant_factors) out.order *= f;
    return out;
}

} // namespace nilcube
