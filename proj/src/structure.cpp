#include "nilcube/structure.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace nilcube {

namespace {

Key config_key(const Cubespace& X, int n, Point x, Point y) {
    std::vector<Point> f(std::size_t(1) << n, y);
    f[0] = x;
    return X.pack(n, f);
}

CanonicalPartition blocks_from_labels(int k, const std::vector<Point>& rep) {
    CanonicalPartition part;
    part.k = k;
    part.block_of.assign(rep.size(), 0);
    std::map<Point, Point> index;
    for (std::size_t p = 0; p < rep.size(); ++p) {
        auto it = index.find(rep[p]);
        if (it == index.end()) {
            it = index.emplace(rep[p], static_cast<Point>(part.blocks.size())).first;
            part.blocks.emplace_back();
        }
        part.block_of[p] = it->second;
        part.blocks[it->second].push_back(static_cast<Point>(p));
    }
    return part;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> ps;
    for (std::uint64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            ps.push_back(p);
            while (n % p == 0) n /= p;
        }
    if (n > 1) ps.push_back(n);
    return ps;
}

// Group law on the fibre F of ~_{k-1} with identity e = F[0]: z = x + y is the
// completion of the (k+1)-corner that is e everywhere except x at e_0 and y at
// e_1, reflected on coordinates 2..k so that z sits at the all-ones vertex.
AbelianTable fibre_law(const Cubespace& Y, int k, const std::vector<Point>& F) {
    const int n = k + 1;
    const std::uint32_t V = 1u << n;
    const std::uint32_t R = (V - 1) & ~3u;
    const Point e = F[0];
    const std::size_t m = F.size();
    std::map<Point, std::uint32_t> pos;
    for (std::size_t i = 0; i < m; ++i) pos[F[i]] = static_cast<std::uint32_t>(i);

    AbelianTable A;
    A.n = m;
    A.add.assign(m * m, 0);
    A.neg.assign(m, 0);
    A.zero = 0;
    A.labels.clear();
    for (auto p : F) A.labels.push_back(Y.label(p));

    std::vector<Point> corner(V - 1);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            for (std::uint32_t u = 0; u + 1 < V; ++u) {
                std::uint32_t w = u ^ R;
                corner[u] = w == 1 ? F[a] : (w == 2 ? F[b] : e);
            }
            auto [lo, hi] = Y.prefix_range(n, corner.data(), static_cast<int>(V - 1));
            if (hi - lo != 1)
                throw Error(ErrorKind::NotNilspace, "addition corner on fibre of " + Y.label(e) + " has " +
                                                        std::to_string(hi - lo) + " completions");
            Point z = Y.at(n, Y.cubes(n)[lo], V - 1);
            auto it = pos.find(z);
            if (it == pos.end())
                throw Error(ErrorKind::NotNilspace, Y.label(F[a]) + " + " + Y.label(F[b]) + " leaves the fibre");
            A.add[a * m + b] = it->second;
        }
    for (std::uint32_t a = 0; a < m; ++a)
        for (std::uint32_t b = 0; b < m; ++b)
            if (A.add[a * m + b] == 0) A.neg[a] = b;
    if (auto bad = A.validate()) throw Error(ErrorKind::NotNilspace, "fibre of " + Y.label(e) + ": " + *bad);
    return A;
}

} // namespace

CanonicalPartition simk(const Cubespace& X, int k) {
    if (k < 0) throw Error(ErrorKind::Config, "level must be non-negative");
    const int n = k + 1;
    if (X.nmax() < n) throw Error(ErrorKind::Config, "~_" + std::to_string(k) + " needs n_max >= " + std::to_string(n));
    const std::size_t P = X.size();
    std::vector<char> rel(P * P, 0);
    for (Point x = 0; x < P; ++x)
        for (Point y = 0; y < P; ++y) rel[x * P + y] = X.contains_key(n, config_key(X, n, x, y));
    for (Point x = 0; x < P; ++x) {
        if (!rel[x * P + x]) throw Error(ErrorKind::NotNilspace, "~ is not reflexive at " + X.label(x));
        for (Point y = 0; y < P; ++y) {
            if (rel[x * P + y] != rel[y * P + x])
                throw Error(ErrorKind::NotNilspace, "~ is not symmetric on " + X.label(x) + ", " + X.label(y));
            if (!rel[x * P + y]) continue;
            for (Point z = 0; z < P; ++z)
                if (rel[y * P + z] && !rel[x * P + z])
                    throw Error(ErrorKind::NotNilspace,
                                "~ is not transitive on " + X.label(x) + ", " + X.label(y) + ", " + X.label(z));
        }
    }
    std::vector<Point> rep(P);
    for (Point x = 0; x < P; ++x) {
        Point r = x;
        for (Point y = 0; y < x; ++y)
            if (rel[x * P + y]) {
                r = y;
                break;
            }
        rep[x] = r;
    }
    return blocks_from_labels(k, rep);
}

FactorResult factor_by(const CubespacePtr& X, const CanonicalPartition& part) {
    std::vector<std::string> labels;
    for (auto& b : part.blocks) labels.push_back("[" + X->label(b.front()) + "]");
    auto Y = std::make_shared<Cubespace>(labels, X->nmax());
    Y->declared_step = part.k;
    Y->name = "F" + std::to_string(part.k) + "(" + X->name + ")";
    for (int n = 0; n <= X->nmax(); ++n) {
        std::vector<Key> keys;
        keys.reserve(X->count(n));
        std::vector<Point> f(std::size_t(1) << n);
        for (Key k : X->cubes(n)) {
            X->unpack(n, k, f.data());
            for (auto& p : f) p = part.block_of[p];
            keys.push_back(Y->pack(n, f));
        }
        Y->set_cubes(n, std::move(keys));
    }
    FactorResult r;
    r.space = Y;
    r.projection = Morphism{X, Y, part.block_of};
    return r;
}

FactorResult factor(const CubespacePtr& X, int k) { return factor_by(X, simk(*X, k)); }

std::vector<std::uint64_t> AbelianTable::invariant_factors() const {
    std::vector<std::uint64_t> order(n, 0);
    for (std::uint32_t a = 0; a < n; ++a) {
        std::uint32_t x = a;
        std::uint64_t o = 1;
        while (x != zero) {
            x = plus(x, a);
            ++o;
        }
        order[a] = o;
    }
    std::vector<std::uint64_t> cyc;
    for (auto p : prime_factors(n)) {
        // c[j] = #{a : p^j a = 0}; the number of cyclic factors of order >= p^j
        // is log_p(c[j] / c[j-1]).
        std::vector<std::uint64_t> c{1};
        std::uint64_t pj = 1;
        while (true) {
            pj *= p;
            std::uint64_t cnt = 0;
            for (auto o : order)
                if (pj % o == 0) ++cnt;
            if (cnt == c.back()) break;
            c.push_back(cnt);
        }
        std::vector<int> ge(c.size() + 1, 0);
        for (std::size_t j = 1; j < c.size(); ++j) {
            std::uint64_t q = c[j] / c[j - 1];
            while (q > 1) {
                q /= p;
                ++ge[j];
            }
        }
        std::uint64_t pp = 1;
        for (std::size_t j = 1; j < c.size(); ++j) {
            pp *= p;
            for (int t = 0; t < ge[j] - ge[j + 1]; ++t) cyc.push_back(pp);
        }
    }
    return nilcube::invariant_factors(cyc);
}

std::uint32_t AbelianTable::sigma(int k, const std::vector<std::uint32_t>& f) const {
    std::uint32_t s = zero;
    for (std::uint32_t v = 0; v < f.size() && v < (1u << k); ++v)
        s = (popcount(v) & 1) ? minus(s, f[v]) : plus(s, f[v]);
    return s;
}

std::optional<std::string> AbelianTable::validate() const {
    if (add.size() != n * n) return "addition table has the wrong size";
    for (auto v : add)
        if (v >= n) return "addition table leaves the group";
    for (std::uint32_t a = 0; a < n; ++a)
        if (plus(zero, a) != a || plus(a, zero) != a) return "no identity";
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = 0; b < n; ++b)
            if (plus(a, b) != plus(b, a)) return "not commutative";
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = 0; b < n; ++b)
            for (std::uint32_t c = 0; c < n; ++c)
                if (plus(plus(a, b), c) != plus(a, plus(b, c))) return "not associative";
    std::vector<std::uint32_t> ng(n, n);
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = 0; b < n; ++b)
            if (plus(a, b) == zero) ng[a] = b;
    for (auto v : ng)
        if (v == n) return "missing inverse";
    if (neg != ng) return "inverse table is inconsistent";
    return std::nullopt;
}

AbelianTable AbelianTable::from_group(const FiniteAbelianGroup& A) {
    AbelianTable T;
    T.n = A.order();
    T.add.assign(T.n * T.n, 0);
    T.neg.assign(T.n, 0);
    T.labels.clear();
    for (std::uint64_t a = 0; a < T.n; ++a) {
        T.labels.push_back(element_label(A, a));
        T.neg[a] = static_cast<std::uint32_t>(A.neg(a));
        for (std::uint64_t b = 0; b < T.n; ++b) T.add[a * T.n + b] = static_cast<std::uint32_t>(A.add(a, b));
    }
    return T;
}

CubespacePtr make_Dk_table(const AbelianTable& A, int k, int nmax) {
    auto G = abelian_filtered_from_table(A.labels, A.add, k);
    auto X = quotient_nilspace(G, {G.identity()}, nmax);
    auto Y = std::make_shared<Cubespace>(*X);
    Y->declared_step = k;
    Y->name = "D" + std::to_string(k) + "(table)";
    return Y;
}

bool dk_contains_table(const AbelianTable& A, int k, int n, const std::vector<std::uint32_t>& f) {
    if (n <= k) return true;
    for (auto& face : faces(n, k + 1)) {
        std::vector<std::uint32_t> r;
        for (auto v : face.verts) r.push_back(f[v]);
        if (A.sigma(k + 1, r) != A.zero) return false;
    }
    return true;
}

StructureGroup structure_group(const CubespacePtr& X, int k) {
    StructureGroup S;
    S.level = k;
    if (k == 0) {
        auto pt = point_space(X->nmax());
        S.space = pt;
        S.element_point = {0};
        S.action = {0};
        S.diff = {0};
        S.fibres.k = -1;
        S.fibres.block_of = {0};
        S.fibres.blocks = {{0}};
        return S;
    }
    if (X->nmax() < k + 1) throw Error(ErrorKind::Config, "structure group needs n_max >= " + std::to_string(k + 1));
    auto top = simk(*X, k);
    CubespacePtr Y = X;
    if (top.blocks.size() != X->size()) Y = factor_by(X, top).space;
    S.space = Y;
    S.fibres = simk(*Y, k - 1);
    const auto& F = S.fibres.blocks.front();
    S.group = fibre_law(*Y, k, F);
    S.element_point = F;
    const std::size_t m = F.size(), P = Y->size();
    const int n = k + 1;
    const std::uint32_t V = 1u << k;

    S.action.assign(P * m, StructureGroup::kNone);
    S.diff.assign(P * P, StructureGroup::kNone);
    std::vector<Point> q0(V), q1(V);
    for (auto& B : S.fibres.blocks) {
        if (B.size() != m)
            throw Error(ErrorKind::NotNilspace, "fibre of " + Y->label(B.front()) + " has " + std::to_string(B.size()) +
                                                    " points, the base fibre has " + std::to_string(m));
        for (auto y : B)
            for (std::uint32_t a = 0; a < m; ++a) {
                std::fill(q0.begin(), q0.end(), F[a]);
                q0[0] = F[0];
                Point hit = 0;
                int found = 0;
                for (auto y2 : B) {
                    std::fill(q1.begin(), q1.end(), y2);
                    q1[0] = y;
                    if (Y->contains(n, arrow(k, 1, q0, q1))) {
                        hit = y2;
                        ++found;
                    }
                }
                if (found != 1)
                    throw Error(ErrorKind::NotNilspace, "translate of " + Y->label(y) + " by " + S.group.labels[a] +
                                                            " has " + std::to_string(found) + " candidates");
                S.action[std::size_t(y) * m + a] = hit;
                if (S.diff[std::size_t(hit) * P + y] != StructureGroup::kNone)
                    throw Error(ErrorKind::NotNilspace, "action is not free at " + Y->label(y));
                S.diff[std::size_t(hit) * P + y] = a;
            }
    }
    for (Point y = 0; y < P; ++y)
        for (std::uint32_t a = 0; a < m; ++a)
            for (std::uint32_t b = 0; b < m; ++b)
                if (S.action[S.action[std::size_t(y) * m + a] * m + b] != S.action[std::size_t(y) * m + S.group.plus(a, b)])
                    throw Error(ErrorKind::NotNilspace, "action is not compatible with the group law at " + Y->label(y));
    for (std::uint32_t a = 0; a < m; ++a)
        for (std::uint32_t b = 0; b < m; ++b)
            if (S.action[std::size_t(F[a]) * m + b] != F[S.group.plus(a, b)])
                throw Error(ErrorKind::NotNilspace, "action on the base fibre differs from the group law");

    auto base = S.group.invariant_factors();
    for (std::size_t i = 1; i < S.fibres.blocks.size(); ++i)
        if (fibre_law(*Y, k, S.fibres.blocks[i]).invariant_factors() != base) S.fibre_independent = false;
    return S;
}

std::vector<std::vector<std::uint64_t>> fibre_invariant_factors(const Cubespace& X, int k) {
    if (k == 0) return {{}};
    auto part = simk(X, k - 1);
    std::vector<std::vector<std::uint64_t>> out;
    for (auto& B : part.blocks) out.push_back(fibre_law(X, k, B).invariant_factors());
    return out;
}

ErgodicClassification classify_kfold_ergodic(const CubespacePtr& X, int k) {
    ErgodicClassification C;
    std::uint64_t all = 1;
    for (std::uint32_t v = 0; v < (1u << k); ++v) all *= X->size();
    C.kfold_ergodic = X->count(k) == all;
    if (!C.kfold_ergodic) {
        C.witness = "Cu^" + std::to_string(k) + " has " + std::to_string(X->count(k)) + " of " + std::to_string(all) + " maps";
        return C;
    }
    auto S = structure_group(X, k);
    if (S.space != X) {
        C.witness = "space is not " + std::to_string(k) + "-step";
        return C;
    }
    C.group = S.group;
    const Point e = S.element_point.front();
    C.transport.resize(X->size());
    for (Point x = 0; x < X->size(); ++x) C.transport[x] = S.diff[std::size_t(x) * X->size() + e];
    auto D = make_Dk_table(S.group, k, X->nmax());
    auto T = relabel(*X, C.transport);
    C.cubes_equal = true;
    for (int n = 0; n <= X->nmax(); ++n)
        if (T->cubes(n) != D->cubes(n)) {
            C.cubes_equal = false;
            C.witness = "cube sets differ in dimension " + std::to_string(n);
            break;
        }
    return C;
}

BundleDecomposition bundle_decompose(const CubespacePtr& X, int k) {
    if (k < 0) {
        if (!X->declared_step) throw Error(ErrorKind::Precondition, "space has no declared step");
        k = *X->declared_step;
    }
    if (X->nmax() < k + 1) throw Error(ErrorKind::Config, "bundle decomposition needs n_max >= " + std::to_string(k + 1));
    BundleDecomposition B;
    B.k = k;
    std::vector<CanonicalPartition> parts;
    for (int i = 0; i <= k; ++i) parts.push_back(simk(*X, i));
    if (parts[k].blocks.size() != X->size()) {
        B.tower_consistent = false;
        B.witnesses.push_back("~_" + std::to_string(k) + " is not trivial, the space is not " + std::to_string(k) + "-step");
    }
    for (int i = 0; i <= k; ++i) {
        BundleLevel L;
        L.space = i == k && B.tower_consistent ? X : factor_by(X, parts[i]).space;
        L.proj = parts[i].block_of;
        if (i > 0) {
            for (auto& blk : parts[i].blocks) L.down.push_back(parts[i - 1].block_of[blk.front()]);
            for (Point x = 0; x < X->size(); ++x)
                if (parts[i - 1].block_of[x] != L.down[parts[i].block_of[x]]) {
                    B.tower_consistent = false;
                    B.witnesses.push_back("~_" + std::to_string(i) + " does not refine ~_" + std::to_string(i - 1) +
                                          " at " + X->label(x));
                    break;
                }
        }
        B.levels.push_back(std::move(L));
    }
    if (!B.tower_consistent)
        throw Error(ErrorKind::NotNilspace, B.witnesses.front());

    B.groups.push_back(FiniteAbelianGroup());
    for (int i = 1; i <= k; ++i) {
        auto& L = B.levels[i];
        L.group = structure_group(L.space, i);
        // Fibres of X_i -> X_{i-1} must be the ~_{i-1} classes of X_i.
        for (Point a = 0; a < L.space->size(); ++a)
            for (Point b = 0; b < L.space->size(); ++b)
                if ((L.group->fibres.block_of[a] == L.group->fibres.block_of[b]) != (L.down[a] == L.down[b])) {
                    B.tower_consistent = false;
                    B.witnesses.push_back("fibres of X_" + std::to_string(i) + " disagree with ~_" + std::to_string(i - 1));
                    a = b = static_cast<Point>(L.space->size());
                    break;
                }
        if (!L.group->fibre_independent) {
            B.actions_ok = false;
            B.witnesses.push_back("level " + std::to_string(i) + " structure group depends on the fibre");
        }
        B.groups.push_back(L.group->group.abstract());
        B.rank += grp_rank(B.groups.back());
    }
    for (int i = 1; i <= k; ++i)
        for (int n = 0; n <= X->nmax(); ++n) {
            std::string w;
            if (!check_difference_condition(B, i, n, &w)) {
                B.difference_condition = false;
                B.witnesses.push_back(w);
            }
        }
    if (!B.ok()) throw Error(ErrorKind::NotNilspace, B.witnesses.front());
    return B;
}

bool check_difference_condition(const BundleDecomposition& B, int i, int n, std::string* witness) {
    const auto& L = B.levels.at(i);
    const auto& S = *L.group;
    const Cubespace& Xi = *L.space;
    const Cubespace& Xd = *B.levels.at(i - 1).space;
    auto D = make_Dk_table(S.group, i, n);
    const std::size_t P = Xi.size();
    const std::size_t V = std::size_t(1) << n;

    std::vector<std::pair<Key, Key>> rows;
    rows.reserve(Xi.count(n));
    std::vector<Point> f(V), g(V);
    for (Key k : Xi.cubes(n)) {
        Xi.unpack(n, k, f.data());
        for (std::size_t v = 0; v < V; ++v) g[v] = L.down[f[v]];
        rows.emplace_back(Xd.pack(n, g), k);
    }
    std::sort(rows.begin(), rows.end());
    std::size_t groups = 0;
    std::vector<Point> q0(V), d(V);
    for (std::size_t s = 0; s < rows.size();) {
        std::size_t e = s;
        while (e < rows.size() && rows[e].first == rows[s].first) ++e;
        ++groups;
        Xi.unpack(n, rows[s].second, q0.data());
        for (std::size_t r = s; r < e; ++r) {
            Xi.unpack(n, rows[r].second, f.data());
            for (std::size_t v = 0; v < V; ++v) {
                auto a = S.diff[std::size_t(f[v]) * P + q0[v]];
                if (a == StructureGroup::kNone) {
                    if (witness) *witness = "cubes over one base cube leave a fibre";
                    return false;
                }
                d[v] = a;
            }
            if (!D->contains(n, d)) {
                if (witness)
                    *witness = "level " + std::to_string(i) + ", n=" + std::to_string(n) +
                               ": difference of two cubes over one base cube is not a D_" + std::to_string(i) + " cube";
                return false;
            }
        }
        if (e - s != D->count(n)) {
            if (witness)
                *witness = "level " + std::to_string(i) + ", n=" + std::to_string(n) + ": fibre of cube projection has " +
                           std::to_string(e - s) + " cubes, expected " + std::to_string(D->count(n));
            return false;
        }
        s = e;
    }
    if (groups != Xd.count(n)) {
        if (witness) *witness = "cube projection to X_" + std::to_string(i - 1) + " is not onto";
        return false;
    }
    return true;
}

namespace {

std::optional<int> step_of(const Cubespace& X) {
    if (X.declared_step) return X.declared_step;
    for (int s = 0; s + 1 <= X.nmax(); ++s)
        if (simk(X, s).blocks.size() == X.size()) return s;
    return std::nullopt;
}

bool level_fibre_surjective(const Morphism& phi, int i, std::string& note) {
    const Cubespace& X = *phi.source;
    const Cubespace& Y = *phi.target;
    auto px = simk(X, i), py = simk(Y, i);
    std::vector<Point> up(px.blocks.size());
    for (std::size_t b = 0; b < px.blocks.size(); ++b) {
        up[b] = py.block_of[phi.map[px.blocks[b].front()]];
        for (auto x : px.blocks[b])
            if (py.block_of[phi.map[x]] != up[b]) {
                note = "level " + std::to_string(i) + ": map does not respect ~_" + std::to_string(i);
                return false;
            }
    }
    // Group the ~_i blocks by their ~_{i-1} block (everything at level 0).
    std::vector<Point> xd(X.size(), 0), yd(Y.size(), 0);
    if (i > 0) {
        xd = simk(X, i - 1).block_of;
        yd = simk(Y, i - 1).block_of;
    }
    std::map<Point, std::set<Point>> image;
    std::map<Point, Point> parent, witness;
    for (std::size_t b = 0; b < px.blocks.size(); ++b) {
        Point xb = xd[px.blocks[b].front()];
        image[xb].insert(up[b]);
        parent[xb] = yd[phi.map[px.blocks[b].front()]];
        witness.emplace(xb, px.blocks[b].front());
    }
    for (auto& [xb, img] : image) {
        std::set<Point> full;
        for (std::size_t c = 0; c < py.blocks.size(); ++c)
            if (yd[py.blocks[c].front()] == parent[xb]) full.insert(static_cast<Point>(c));
        if (img != full) {
            note = "level " + std::to_string(i) + ": fibre over " + X.label(witness[xb]) +
                   " misses part of the target fibre";
            return false;
        }
    }
    return true;
}

} // namespace

MorphismReport morphism_check(const Morphism& phi, int levels) {
    MorphismReport R;
    const Cubespace& X = *phi.source;
    const Cubespace& Y = *phi.target;
    const int nm = std::min(X.nmax(), Y.nmax());
    std::string w;
    R.is_morphism = is_morphism(X, Y, phi.map, nm, &w);
    if (!R.is_morphism) R.notes.push_back(w);

    std::vector<std::uint64_t> pf(Y.size(), 0);
    for (auto p : phi.map) ++pf[p];
    R.point_fibres_uniform = std::all_of(pf.begin(), pf.end(), [&](auto c) { return c == pf[0] && c > 0; });
    R.point_fibre = R.point_fibres_uniform ? pf[0] : 0;

    R.cube_fibres_uniform = R.is_morphism;
    for (int n = 0; n <= nm && R.is_morphism; ++n) {
        std::vector<Key> img;
        img.reserve(X.count(n));
        std::vector<Point> f(std::size_t(1) << n);
        for (Key k : X.cubes(n)) {
            X.unpack(n, k, f.data());
            for (auto& p : f) p = phi.map[p];
            img.push_back(Y.pack(n, f));
        }
        std::sort(img.begin(), img.end());
        std::uint64_t first = 0, distinct = 0;
        bool uniform = true;
        for (std::size_t s = 0; s < img.size();) {
            std::size_t e = s;
            while (e < img.size() && img[e] == img[s]) ++e;
            if (distinct == 0) first = e - s;
            else if (e - s != first) uniform = false;
            ++distinct;
            s = e;
        }
        if (distinct != Y.count(n)) uniform = false;
        R.cube_fibre.push_back(uniform ? first : 0);
        if (!uniform) {
            R.cube_fibres_uniform = false;
            R.notes.push_back("cube fibres in dimension " + std::to_string(n) + " are not uniform");
        }
    }
    R.measure_preserving = R.point_fibres_uniform && R.cube_fibres_uniform;

    if (R.is_morphism) {
        int s = levels;
        if (s < 0) {
            auto sx = step_of(X), sy = step_of(Y);
            s = std::max(sx.value_or(nm - 1), sy.value_or(nm - 1));
        }
        if (s > nm - 1) {
            R.notes.push_back("fibre-surjectivity checked only up to level " + std::to_string(nm - 1));
            s = nm - 1;
        }
        R.fibre_surjective = true;
        for (int i = 0; i <= s && R.fibre_surjective; ++i) {
            std::string note;
            if (!level_fibre_surjective(phi, i, note)) {
                R.fibre_surjective = false;
                R.notes.push_back(note);
            }
        }
    }
    return R;
}

namespace {

std::vector<std::int64_t> pin(const Subcubespace& P, const std::vector<std::uint32_t>& verts,
                              const std::vector<Point>& values) {
    std::vector<std::int64_t> fixed(P.verts.size(), -1);
    for (std::size_t i = 0; i < verts.size(); ++i) {
        auto l = P.local(verts[i]);
        if (!l) throw Error(ErrorKind::Structural, "vertex outside the configuration");
        fixed[*l] = values[i];
    }
    return fixed;
}

// Every morphism S -> Y extends to P.
bool extension_property(const Subcubespace& P, const std::vector<std::uint32_t>& S, const Cubespace& Y) {
    if (S.empty()) return hom_exists(P, std::vector<std::int64_t>(P.verts.size(), -1), Y);
    auto sub = make_subcubespace(P.N, S);
    auto homs = hom_set(sub, std::vector<std::int64_t>(sub.verts.size(), -1), Y);
    for (auto& g : homs)
        if (!hom_exists(P, pin(P, sub.verts, g), Y)) return false;
    return true;
}

bool safe_exists(const Subcubespace& P, const std::vector<std::int64_t>& fixed, const Cubespace& Y) {
    try {
        return hom_exists(P, fixed, Y);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Precondition) return false;
        throw;
    }
}

} // namespace

GoodPairReport good_pair_check(const Subcubespace& P, const std::vector<std::uint32_t>& P1v,
                               const std::vector<std::uint32_t>& P2v, const BundleDecomposition& tower,
                               const std::vector<Point>& f) {
    GoodPairReport R;
    std::vector<std::uint32_t> P1 = P1v, P2 = P2v;
    std::sort(P1.begin(), P1.end());
    std::sort(P2.begin(), P2.end());
    if (f.size() != P1.size()) throw Error(ErrorKind::Structural, "values on P1 have the wrong size");
    std::vector<std::uint32_t> P12;
    std::set_intersection(P1.begin(), P1.end(), P2.begin(), P2.end(), std::back_inserter(P12));
    const Cubespace& X = *tower.levels.back().space;
    const int dim = P.max_dim();

    std::vector<CubespacePtr> targets;
    std::vector<int> degrees;
    for (int i = 1; i <= tower.k; ++i) {
        targets.push_back(make_Dk_table(tower.levels[i].group->group, i, dim));
        degrees.push_back(i);
    }

    R.p1_extension = extension_property(P, P1, X);
    R.p12_extension = extension_property(P, P12, X);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        if (!extension_property(P, P1, *targets[t])) R.p1_extension = false;
        if (!extension_property(P, P12, *targets[t])) R.p12_extension = false;
    }
    if (!R.p1_extension) R.notes.push_back("P1 lacks the extension property");
    if (!R.p12_extension) R.notes.push_back("P1 and P2 intersection lacks the extension property");

    auto sub2 = make_subcubespace(P.N, P2);
    for (std::size_t t = 0; t < targets.size() && R.dk_condition; ++t) {
        const Cubespace& D = *targets[t];
        auto fixed2 = pin(sub2, P12, std::vector<Point>(P12.size(), 0));
        for (auto& g : hom_set(sub2, fixed2, D)) {
            auto fixed = pin(P, P1, std::vector<Point>(P1.size(), 0));
            for (std::size_t j = 0; j < P2.size(); ++j) fixed[*P.local(P2[j])] = g[j];
            if (!safe_exists(P, fixed, D)) {
                R.dk_condition = false;
                R.notes.push_back("a map on P2 vanishing on the intersection does not extend over D_" +
                                  std::to_string(degrees[t]));
                break;
            }
        }
    }

    std::map<std::vector<Point>, std::uint64_t> fibres;
    auto dom = hom_set(P, pin(P, P1, f), X);
    R.domain = dom.size();
    std::vector<std::size_t> p2_local;
    for (auto v : P2) p2_local.push_back(*P.local(v));
    for (auto& h : dom) {
        std::vector<Point> r;
        for (auto l : p2_local) r.push_back(h[l]);
        ++fibres[r];
    }
    std::vector<Point> f12;
    for (auto v : P12) f12.push_back(f[std::lower_bound(P1.begin(), P1.end(), v) - P1.begin()]);
    auto cod = hom_set(sub2, pin(sub2, P12, f12), X);
    R.codomain = cod.size();
    for (auto& c : cod)
        if (!fibres.count(c)) R.surjective = false;
    if (fibres.size() != cod.size()) R.surjective = false;
    R.fibre = fibres.empty() ? 0 : fibres.begin()->second;
    for (auto& [k, c] : fibres)
        if (c != R.fibre) R.uniform_fibres = false;
    if (!R.surjective) R.notes.push_back("restriction to P2 is not onto");
    if (!R.uniform_fibres) R.notes.push_back("restriction fibres have different sizes");
    if (!R.uniform_fibres) R.fibre = 0;
    return R;
}

InverseSystemReport verify_inverse_system(const std::vector<CubespacePtr>& spaces,
                                          const std::map<std::pair<int, int>, std::vector<Point>>& transitions) {
    InverseSystemReport R;
    const int m = static_cast<int>(spaces.size());
    for (auto& [ij, map] : transitions) {
        auto [i, j] = ij;
        if (i < 0 || j >= m || i > j) throw Error(ErrorKind::Structural, "transition indices out of order");
        if (map.size() != spaces[j]->size()) throw Error(ErrorKind::Structural, "transition has the wrong size");
        if (i == j) {
            for (Point p = 0; p < map.size(); ++p)
                if (map[p] != p) {
                    R.identities = false;
                    R.notes.push_back("phi_" + std::to_string(j) + std::to_string(j) + " is not the identity");
                    break;
                }
            continue;
        }
        auto rep = morphism_check(Morphism{spaces[j], spaces[i], map});
        if (!rep.is_morphism || !rep.fibre_surjective) {
            R.fibre_surjective = false;
            R.notes.push_back("phi_" + std::to_string(i) + "," + std::to_string(j) + " is not fibre-surjective");
        }
    }
    for (auto& [ij, a] : transitions)
        for (auto& [jk, b] : transitions) {
            if (ij.second != jk.first || ij.first == ij.second || jk.first == jk.second) continue;
            auto it = transitions.find({ij.first, jk.second});
            if (it == transitions.end()) continue;
            for (Point p = 0; p < b.size(); ++p)
                if (a[b[p]] != it->second[p]) {
                    R.compositions = false;
                    R.notes.push_back("phi_" + std::to_string(ij.first) + "," + std::to_string(ij.second) + " o phi_" +
                                      std::to_string(jk.first) + "," + std::to_string(jk.second) + " differs from phi_" +
                                      std::to_string(ij.first) + "," + std::to_string(jk.second));
                    break;
                }
        }
    return R;
}

} // namespace nilcube
