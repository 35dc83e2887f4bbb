#include "nilcube/cubespace.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "nilcube/filtered.hpp"

namespace nilcube {

namespace {

std::string show(const Cubespace& X, const std::vector<Point>& f) {
    std::string s = "(";
    for (std::size_t i = 0; i < f.size(); ++i) s += (i ? " " : "") + X.label(f[i]);
    return s + ")";
}

std::vector<CubeMorphismSpec> automorphism_generators(int n) {
    std::vector<CubeMorphismSpec> g;
    if (n >= 1) g.push_back(CubeMorphismSpec::reflection(n, 0));
    if (n >= 2) g.push_back(CubeMorphismSpec::transposition(n, 0, 1));
    if (n >= 3) g.push_back(CubeMorphismSpec::cycle(n));
    return g;
}

Key pull_key(const Cubespace& X, const CubeMorphismSpec& phi, const std::vector<std::uint32_t>& table, Key k,
             std::vector<Point>& buf, std::vector<Point>& out) {
    X.unpack(phi.n, k, buf.data());
    for (std::size_t w = 0; w < table.size(); ++w) out[w] = buf[table[w]];
    return X.pack(phi.m, out.data());
}

void check_pullbacks(const Cubespace& X, AxiomReport& rep) {
    const int nmax = X.nmax();
    for (int n = 0; n <= nmax; ++n) {
        const auto& cubes = X.cubes(n);
        std::vector<Point> buf(std::size_t(1) << nmax), out(std::size_t(1) << nmax);
        // Automorphisms permute Cu^n, so the image set must equal Cu^n.
        for (const auto& phi : automorphism_generators(n)) {
            auto table = phi.table();
            std::vector<Key> img(cubes.size());
            for (std::size_t i = 0; i < cubes.size(); ++i) img[i] = pull_key(X, phi, table, cubes[i], buf, out);
            std::sort(img.begin(), img.end());
            if (img != cubes) {
                rep.composition = false;
                for (Key k : cubes) {
                    Key im = pull_key(X, phi, table, k, buf, out);
                    if (!X.contains_key(n, im)) {
                        rep.witnesses.push_back("composition: " + show(X, X.unpack(n, k)) + " pulled back along " +
                                                phi.str() + " is not a cube");
                        break;
                    }
                }
            }
        }
        std::vector<CubeMorphismSpec> lower;
        if (n >= 1) lower.push_back(CubeMorphismSpec::face(n, n - 1, 0));
        if (n >= 2) lower.push_back(CubeMorphismSpec::diagonal(n));
        if (n + 1 <= nmax) lower.push_back(CubeMorphismSpec::degeneration(n));
        for (const auto& phi : lower) {
            auto table = phi.table();
            for (Key k : cubes) {
                Key im = pull_key(X, phi, table, k, buf, out);
                if (!X.contains_key(phi.m, im)) {
                    rep.composition = false;
                    rep.witnesses.push_back("composition: " + show(X, X.unpack(n, k)) + " pulled back along " +
                                            phi.str() + " is not a cube");
                    break;
                }
            }
        }
    }
}

std::vector<CubeConstraint> corner_constraints(int n) {
    std::vector<CubeConstraint> cons;
    for (int i = 0; i < n; ++i) {
        CubeConstraint c;
        c.dim = n - 1;
        for (auto v : faces(n, n - 1))
            if (v.free_mask == (((1u << n) - 1) & ~(1u << i)) && v.fixed_values == 0) c.slots = v.verts;
        cons.push_back(std::move(c));
    }
    return cons;
}

Key pack_values(unsigned bits, const std::vector<Point>& f, std::size_t len) {
    Key k = 0;
    for (std::size_t i = 0; i < len; ++i) k = (k << bits) | f[i];
    return k;
}

} // namespace

AxiomReport cs_check_axioms(const Cubespace& X, int k) {
    if (k < 0 || X.nmax() < k + 1)
        throw Error(ErrorKind::Config, "axiom check at step " + std::to_string(k) + " needs n_max >= " +
                                           std::to_string(k + 1) + ", have " + std::to_string(X.nmax()));
    AxiomReport rep;
    rep.k = k;
    rep.nmax = X.nmax();
    rep.corners.assign(X.nmax() + 1, 0);
    const std::size_t P = X.size();

    rep.cu0 = X.count(0) == P;
    if (!rep.cu0) rep.witnesses.push_back("Cu^0 does not list every point");
    rep.ergodic = X.count(1) == P * P;
    if (!rep.ergodic) rep.witnesses.push_back("Cu^1 has " + std::to_string(X.count(1)) + " cubes, expected " +
                                              std::to_string(P * P));

    check_pullbacks(X, rep);

    const unsigned bits = X.bits();
    for (int n = 1; n <= std::min(k + 1, X.nmax()); ++n) {
        const std::size_t V = std::size_t(1) << n;
        ConstraintSearch search(X, V - 1, corner_constraints(n));
        const auto& keys = X.cubes(n);
        std::size_t pi = 0;
        bool unique = true, exists = true;
        std::uint64_t corners = search.run(std::vector<std::int64_t>(V - 1, -1), [&](const std::vector<Point>& c) {
            Key ck = pack_values(bits, c, V - 1);
            while (pi < keys.size() && (keys[pi] >> bits) < ck) ++pi;
            if (pi < keys.size() && (keys[pi] >> bits) == ck) {
                std::size_t g = 0;
                while (pi < keys.size() && (keys[pi] >> bits) == ck) {
                    ++pi;
                    ++g;
                }
                if (g > 1 && unique && n == k + 1) {
                    rep.witnesses.push_back("k-step: corner " + show(X, std::vector<Point>(c.begin(), c.end())) +
                                            " has " + std::to_string(g) + " completions");
                }
                if (g > 1) unique = false;
            } else {
                if (exists)
                    rep.witnesses.push_back("completion: corner " + show(X, std::vector<Point>(c.begin(), c.end())) +
                                            " of dimension " + std::to_string(n) + " has no completion");
                exists = false;
            }
            return true;
        });
        rep.corners[n] = corners;
        if (!exists) rep.completion = false;
        if (unique && exists && !rep.minimal_step) rep.minimal_step = n - 1;
        if (n == k + 1 && !unique) rep.k_step = false;
    }

    for (int n = k + 2; n <= X.nmax(); ++n) {
        const std::size_t V = std::size_t(1) << n;
        std::vector<CubeConstraint> cons;
        for (auto& f : faces(n, k + 1)) cons.push_back({k + 1, f.verts});
        ConstraintSearch search(X, V, cons);
        const auto& keys = X.cubes(n);
        std::size_t pi = 0;
        bool equal = true;
        search.run(std::vector<std::int64_t>(V, -1), [&](const std::vector<Point>& f) {
            Key fk = X.pack(n, f);
            if (pi < keys.size() && keys[pi] == fk) {
                ++pi;
                return true;
            }
            equal = false;
            rep.witnesses.push_back("face criterion: " + show(X, f) + " has cube (k+1)-faces but is not in Cu^" +
                                    std::to_string(n));
            return false;
        });
        if (equal && pi != keys.size()) {
            equal = false;
            rep.witnesses.push_back("face criterion: " + show(X, X.unpack(n, keys[pi])) +
                                    " is a cube with a non-cube (k+1)-face");
        }
        if (!equal) rep.face_criterion = false;
    }
    return rep;
}

bool is_corner(const Cubespace& X, int n, const std::vector<Point>& corner) {
    const std::size_t V = std::size_t(1) << n;
    if (n < 1 || n > X.nmax() || corner.size() != V - 1) return false;
    for (auto p : corner)
        if (p >= X.size()) return false;
    for (auto& c : corner_constraints(n)) {
        std::vector<Point> f;
        for (auto s : c.slots) f.push_back(corner[s]);
        if (!X.contains(n - 1, f)) return false;
    }
    return true;
}

std::vector<Point> complete_corner(const Cubespace& X, int n, const std::vector<Point>& corner) {
    if (!is_corner(X, n, corner)) throw Error(ErrorKind::Precondition, "input is not a corner of dimension " + std::to_string(n));
    auto [lo, hi] = X.prefix_range(n, corner.data(), static_cast<int>(corner.size()));
    if (lo == hi) throw Error(ErrorKind::Completion, "corner " + show(X, corner) + " has no completion");
    std::vector<Point> out;
    for (std::size_t i = lo; i < hi; ++i) out.push_back(X.at(n, X.cubes(n)[i], static_cast<std::uint32_t>(corner.size())));
    return out;
}

CubespacePtr make_Dk(const FiniteAbelianGroup& A, int k, int nmax) {
    auto G = abelian_filtered(A, k);
    auto X = quotient_nilspace(G, {G.identity()}, nmax);
    auto Y = std::make_shared<Cubespace>(*X);
    Y->declared_step = k;
    Y->name = "D" + std::to_string(k) + "(" + A.descriptor() + ")";
    return Y;
}

bool dk_contains(const FiniteAbelianGroup& A, int k, int n, const std::vector<std::uint64_t>& f) {
    if (f.size() != (std::size_t(1) << n)) throw Error(ErrorKind::Structural, "function is not total on the cube");
    if (n <= k) return true;
    for (auto& face : faces(n, k + 1)) {
        std::vector<std::uint64_t> r;
        for (auto v : face.verts) r.push_back(f[v]);
        if (sigma(k + 1, r, A) != 0) return false;
    }
    return true;
}

CubespacePtr arrow_space(const Cubespace& X, int i) {
    if (i < 0 || X.nmax() - i < 0) throw Error(ErrorKind::Budget, "arrow space of height " + std::to_string(i) +
                                                                       " needs more stored dimensions");
    const std::size_t P = X.size();
    std::vector<std::string> labels;
    for (std::size_t a = 0; a < P; ++a)
        for (std::size_t b = 0; b < P; ++b) labels.push_back(X.label(a) + "|" + X.label(b));
    int nm = X.nmax() - i;
    while (nm > 0 && bits_for(P * P) * (1u << nm) > 64) --nm;
    auto Y = std::make_shared<Cubespace>(labels, nm);
    Y->name = X.name + " arrow " + std::to_string(i);
    for (int n = 0; n <= nm; ++n) {
        const std::size_t V = std::size_t(1) << n;
        std::vector<Key> keys;
        std::vector<Point> f(V);
        for (Key k : X.cubes(n + i)) {
            auto c = X.unpack(n + i, k);
            bool ok = true;
            for (std::size_t v = 0; v < V && ok; ++v)
                for (std::size_t w = 2; w < (std::size_t(1) << i) && ok; ++w) ok = c[v + (w << n)] == c[v + V];
            if (!ok) continue;
            for (std::size_t v = 0; v < V; ++v) f[v] = static_cast<Point>(c[v] * P + (i ? c[v + V] : c[v]));
            keys.push_back(Y->pack(n, f));
        }
        Y->set_cubes(n, std::move(keys));
    }
    return Y;
}

CubespacePtr point_space(int nmax) {
    auto X = std::make_shared<Cubespace>(std::vector<std::string>{"*"}, nmax);
    for (int n = 0; n <= nmax; ++n) X->set_cubes(n, {0});
    X->declared_step = 0;
    X->name = "point";
    return X;
}

CubespacePtr relabel(const Cubespace& X, const std::vector<Point>& perm) {
    const std::size_t P = X.size();
    if (perm.size() != P) throw Error(ErrorKind::Structural, "relabeling has the wrong size");
    std::vector<std::string> labels(P);
    std::vector<bool> hit(P, false);
    for (std::size_t p = 0; p < P; ++p) {
        if (perm[p] >= P || hit[perm[p]]) throw Error(ErrorKind::Structural, "relabeling is not a bijection");
        hit[perm[p]] = true;
        labels[perm[p]] = X.label(static_cast<Point>(p));
    }
    auto Y = std::make_shared<Cubespace>(labels, X.nmax());
    Y->declared_step = X.declared_step;
    Y->name = X.name + " relabeled";
    for (int n = 0; n <= X.nmax(); ++n) {
        std::vector<Key> keys;
        keys.reserve(X.count(n));
        std::vector<Point> f(std::size_t(1) << n);
        for (Key k : X.cubes(n)) {
            X.unpack(n, k, f.data());
            for (auto& p : f) p = perm[p];
            keys.push_back(Y->pack(n, f));
        }
        Y->set_cubes(n, std::move(keys));
    }
    return Y;
}

CubespacePtr product(const Cubespace& X, const Cubespace& Y) {
    std::vector<std::string> labels;
    for (std::size_t a = 0; a < X.size(); ++a)
        for (std::size_t b = 0; b < Y.size(); ++b) labels.push_back(X.label(a) + "," + Y.label(b));
    int nm = std::min(X.nmax(), Y.nmax());
    auto Z = std::make_shared<Cubespace>(labels, nm);
    Z->name = X.name + " x " + Y.name;
    if (X.declared_step && Y.declared_step) Z->declared_step = std::max(*X.declared_step, *Y.declared_step);
    for (int n = 0; n <= nm; ++n) {
        std::vector<Key> keys;
        std::vector<Point> f(std::size_t(1) << n);
        for (Key a : X.cubes(n)) {
            auto fa = X.unpack(n, a);
            for (Key b : Y.cubes(n)) {
                auto fb = Y.unpack(n, b);
                for (std::size_t v = 0; v < f.size(); ++v) f[v] = static_cast<Point>(fa[v] * Y.size() + fb[v]);
                keys.push_back(Z->pack(n, f));
            }
        }
        Z->set_cubes(n, std::move(keys));
    }
    return Z;
}

bool is_morphism(const Cubespace& src, const Cubespace& tgt, const std::vector<Point>& map, int nmax,
                 std::string* witness) {
    if (map.size() != src.size()) throw Error(ErrorKind::Structural, "point map has the wrong size");
    for (auto p : map)
        if (p >= tgt.size()) throw Error(ErrorKind::Structural, "point map leaves the target");
    nmax = std::min({nmax, src.nmax(), tgt.nmax()});
    for (int n = 0; n <= nmax; ++n) {
        std::vector<Point> f(std::size_t(1) << n);
        for (Key k : src.cubes(n)) {
            src.unpack(n, k, f.data());
            for (auto& p : f) p = map[p];
            if (!tgt.contains_key(n, tgt.pack(n, f))) {
                if (witness) *witness = "image of " + show(src, src.unpack(n, k)) + " is not a cube";
                return false;
            }
        }
    }
    return true;
}

std::optional<std::size_t> Subcubespace::local(std::uint32_t vertex) const {
    auto it = std::lower_bound(verts.begin(), verts.end(), vertex);
    if (it == verts.end() || *it != vertex) return std::nullopt;
    return static_cast<std::size_t>(it - verts.begin());
}

int Subcubespace::max_dim() const {
    int d = 0;
    for (auto& c : maximal) d = std::max(d, c.dim);
    return d;
}

Subcubespace make_subcubespace(int N, std::vector<std::uint32_t> verts) {
    if (N < 0 || N > 6) throw Error(ErrorKind::Budget, "subcubespaces are supported up to {0,1}^6");
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    Subcubespace S;
    S.N = N;
    S.verts = verts;
    std::vector<bool> inP(std::size_t(1) << N, false);
    for (auto v : verts) {
        if (v >= inP.size()) throw Error(ErrorKind::Structural, "vertex outside {0,1}^N");
        inP[v] = true;
    }
    // image set -> slots of the first injective morphism found with that image
    std::map<std::vector<std::uint32_t>, CubeConstraint> images;
    for (int m = 0; m <= N; ++m) {
        const int choices = 2 + 2 * m;
        std::vector<int> digit(N, 0);
        while (true) {
            CubeMorphismSpec phi;
            phi.m = m;
            phi.n = N;
            for (int j = 0; j < N; ++j) {
                int d = digit[j];
                if (d == 0) phi.outs.push_back({CubeMorphismSpec::Tag::Zero, 0});
                else if (d == 1) phi.outs.push_back({CubeMorphismSpec::Tag::One, 0});
                else if (d % 2 == 0) phi.outs.push_back({CubeMorphismSpec::Tag::Coord, (d - 2) / 2});
                else phi.outs.push_back({CubeMorphismSpec::Tag::NegCoord, (d - 3) / 2});
            }
            if (phi.injective()) {
                auto table = phi.table();
                bool inside = true;
                for (auto v : table) inside = inside && inP[v];
                if (inside) {
                    std::vector<std::uint32_t> img(table);
                    std::sort(img.begin(), img.end());
                    if (!images.count(img)) {
                        CubeConstraint c;
                        c.dim = m;
                        for (auto v : table) c.slots.push_back(static_cast<std::uint32_t>(*S.local(v)));
                        images.emplace(img, std::move(c));
                    }
                }
            }
            int j = 0;
            while (j < N && ++digit[j] == choices) digit[j++] = 0;
            if (j == N) break;
        }
    }
    for (auto& [img, c] : images) {
        bool strictly_inside = false;
        for (auto& [other, oc] : images) {
            if (other.size() <= img.size()) continue;
            if (std::includes(other.begin(), other.end(), img.begin(), img.end())) {
                strictly_inside = true;
                break;
            }
        }
        if (!strictly_inside) S.maximal.push_back(c);
    }
    return S;
}

namespace {

void require_fixed_morphism(const Subcubespace& P, const std::vector<std::int64_t>& fixed, const Cubespace& X) {
    if (fixed.size() != P.verts.size()) throw Error(ErrorKind::Structural, "fixed assignment has the wrong size");
    std::vector<std::uint32_t> sv;
    for (std::size_t i = 0; i < fixed.size(); ++i)
        if (fixed[i] >= 0) sv.push_back(P.verts[i]);
    if (sv.empty()) return;
    auto S = make_subcubespace(P.N, sv);
    for (auto& c : S.maximal) {
        std::vector<Point> f;
        for (auto s : c.slots) f.push_back(static_cast<Point>(fixed[*P.local(S.verts[s])]));
        if (c.dim > X.nmax())
            throw Error(ErrorKind::Config, "subcube of dimension " + std::to_string(c.dim) + " exceeds n_max");
        if (!X.contains(c.dim, f)) throw Error(ErrorKind::Precondition, "prescribed values are not a morphism on S");
    }
}

} // namespace

std::vector<std::vector<Point>> hom_set(const Subcubespace& P, const std::vector<std::int64_t>& fixed,
                                        const Cubespace& X) {
    require_fixed_morphism(P, fixed, X);
    ConstraintSearch search(X, P.verts.size(), P.maximal);
    std::vector<std::vector<Point>> out;
    search.run(fixed, [&](const std::vector<Point>& g) {
        out.push_back(g);
        return true;
    });
    return out;
}

std::uint64_t hom_count(const Subcubespace& P, const std::vector<std::int64_t>& fixed, const Cubespace& X) {
    require_fixed_morphism(P, fixed, X);
    ConstraintSearch search(X, P.verts.size(), P.maximal);
    return search.count(fixed);
}

bool hom_exists(const Subcubespace& P, const std::vector<std::int64_t>& fixed, const Cubespace& X) {
    require_fixed_morphism(P, fixed, X);
    ConstraintSearch search(X, P.verts.size(), P.maximal);
    return search.run(fixed, [](const std::vector<Point>&) { return false; }) > 0;
}

Tricube make_tricube(int n) {
    if (n < 1 || n > 3) throw Error(ErrorKind::Budget, "tricubes are supported for n in 1..3");
    Tricube T;
    T.n = n;
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    std::vector<std::pair<std::uint32_t, std::vector<int>>> pts;
    for (std::size_t t = 0; t < total; ++t) {
        std::vector<int> c(n);
        std::size_t r = t;
        std::uint32_t v = 0;
        for (int i = 0; i < n; ++i) {
            c[i] = static_cast<int>(r % 3) - 1;
            r /= 3;
            if (c[i] == 1) v |= 1u << (2 * i);
            if (c[i] == -1) v |= 1u << (2 * i + 1);
        }
        pts.emplace_back(v, c);
    }
    std::sort(pts.begin(), pts.end());
    std::vector<std::uint32_t> verts;
    for (auto& [v, c] : pts) {
        verts.push_back(v);
        T.coords.push_back(c);
    }
    T.space = make_subcubespace(2 * n, verts);
    auto local_of = [&](const std::vector<int>& c) {
        for (std::size_t i = 0; i < T.coords.size(); ++i)
            if (T.coords[i] == c) return static_cast<std::uint32_t>(i);
        throw Error(ErrorKind::Structural, "tricube point missing");
    };
    const std::uint32_t V = 1u << n;
    for (std::uint32_t v = 0; v < V; ++v) {
        std::vector<int> c(n);
        for (int i = 0; i < n; ++i) c[i] = (v >> i & 1u) ? -1 : 1;
        T.omega.push_back(local_of(c));
        std::vector<std::uint32_t> row;
        for (std::uint32_t w = 0; w < V; ++w) {
            std::vector<int> d(n);
            for (int i = 0; i < n; ++i) d[i] = (w >> i & 1u) ? 0 : ((v >> i & 1u) ? -1 : 1);
            row.push_back(local_of(d));
        }
        T.psi.push_back(row);
    }
    T.center = local_of(std::vector<int>(n, 0));
    return T;
}

} // namespace nilcube
