#include "nilcube/translations.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace nilcube {

namespace {

void require_bijection(const Cubespace& X, const PointMap& alpha) {
    if (alpha.size() != X.size()) throw Error(ErrorKind::Precondition, "map has the wrong number of points");
    std::vector<char> hit(X.size(), 0);
    for (auto p : alpha) {
        if (p >= X.size() || hit[p]) throw Error(ErrorKind::Precondition, "map is not a bijection");
        hit[p] = 1;
    }
}

PointMap compose(const PointMap& a, const PointMap& b) {
    PointMap c(b.size());
    for (std::size_t x = 0; x < b.size(); ++x) c[x] = a[b[x]];
    return c;
}

PointMap identity_map(std::size_t n) {
    PointMap id(n);
    std::iota(id.begin(), id.end(), 0);
    return id;
}

} // namespace

TranslationVerdict is_translation(const Cubespace& X, const PointMap& alpha, int i) {
    require_bijection(X, alpha);
    if (i < 0) throw Error(ErrorKind::Config, "negative height");
    TranslationVerdict v;
    v.cap = X.nmax() - i;
    if (v.cap < 0) throw Error(ErrorKind::Config, "height exceeds n_max");
    for (int n = 0; n <= v.cap; ++n) {
        std::vector<Point> q(std::size_t(1) << n), aq(q.size());
        for (Key k : X.cubes(n)) {
            X.unpack(n, k, q.data());
            for (std::size_t t = 0; t < q.size(); ++t) aq[t] = alpha[q[t]];
            auto f = arrow(n, i, q, aq);
            if (!X.contains(n + i, f)) {
                v.ok = false;
                v.witness = "n=" + std::to_string(n) + ": arrow over cube (";
                for (std::size_t t = 0; t < q.size(); ++t) v.witness += (t ? "," : "") + X.label(q[t]);
                v.witness += ") is not a cube";
                return v;
            }
        }
    }
    return v;
}

std::vector<PointMap> top_shifts(const BundleDecomposition& B) {
    std::vector<PointMap> out;
    const auto& top = B.levels.back();
    const std::size_t P = top.space->size();
    if (B.k == 0) {
        out.push_back(identity_map(P));
        return out;
    }
    const auto& S = *top.group;
    const std::size_t m = S.group.n;
    for (std::uint32_t a = 0; a < m; ++a) {
        PointMap s(P);
        for (Point x = 0; x < P; ++x) s[x] = S.action[std::size_t(x) * m + a];
        out.push_back(s);
    }
    return out;
}

TranslationSet translations_enumerate(const CubespacePtr& Xp, int i, const std::vector<PointMap>& extra) {
    const Cubespace& X = *Xp;
    TranslationSet T;
    T.cap = X.nmax() - i;
    const std::size_t P = X.size();
    if (P <= Budget::global().max_perm_points) {
        T.exhaustive = true;
        PointMap a = identity_map(P);
        do {
            if (is_translation(X, a, i).ok) T.maps.push_back(a);
        } while (std::next_permutation(a.begin(), a.end()));
        return T;
    }
    std::vector<PointMap> gens = extra;
    if (Xp->declared_step) {
        auto B = bundle_decompose(Xp);
        for (auto& s : top_shifts(B)) gens.push_back(s);
    }
    std::set<PointMap> seen{identity_map(P)};
    std::vector<PointMap> frontier{identity_map(P)};
    bool truncated = false;
    while (!frontier.empty() && !truncated) {
        std::vector<PointMap> next;
        for (auto& f : frontier)
            for (auto& g : gens) {
                auto c = compose(g, f);
                if (seen.insert(c).second) {
                    next.push_back(c);
                    if (seen.size() >= Budget::global().max_closure) {
                        truncated = true;
                        break;
                    }
                }
            }
        frontier = std::move(next);
    }
    for (auto& a : seen)
        if (is_translation(X, a, i).ok) T.maps.push_back(a);
    T.exhaustive = false;
    return T;
}

TransHReport trans_h(const BundleDecomposition& B, const PointMap& alpha, int i) {
    TransHReport R;
    const int k = B.k;
    const auto& top = B.levels.back();
    const Cubespace& X = *top.space;
    require_bijection(X, alpha);
    if (k == 0) {
        R.h = {0};
        R.h_translation = R.in_kernel = R.fibre_constant = R.alpha_prime_hom = true;
        R.alpha_prime = {0};
        return R;
    }
    const auto& low = B.levels[k - 1];
    const auto& pi = top.down;  // X_k -> X_{k-1}
    R.h.assign(low.space->size(), 0);
    std::vector<char> set(low.space->size(), 0);
    for (Point x = 0; x < X.size(); ++x) {
        Point b = pi[x], hb = pi[alpha[x]];
        if (set[b] && R.h[b] != hb) {
            R.well_defined = false;
            throw Error(ErrorKind::NotNilspace, "induced map on X_" + std::to_string(k - 1) + " is not well defined at " +
                                                    X.label(x));
        }
        set[b] = 1;
        R.h[b] = hb;
    }
    R.h_translation = is_translation(*low.space, R.h, i).ok;
    R.in_kernel = R.h == identity_map(R.h.size());
    if (!R.in_kernel) return R;

    const auto& S = *top.group;
    R.alpha_prime.assign(low.space->size(), StructureGroup::kNone);
    R.fibre_constant = true;
    for (Point x = 0; x < X.size(); ++x) {
        auto a = S.diff[std::size_t(alpha[x]) * X.size() + x];
        auto& slot = R.alpha_prime[pi[x]];
        if (slot == StructureGroup::kNone) slot = a;
        else if (slot != a) R.fibre_constant = false;
    }
    if (!R.fibre_constant) {
        R.note = "alpha is not a single shift on every fibre";
        return R;
    }
    R.alpha_prime_hom = in_hom_dk(B, R.alpha_prime, k - i);
    return R;
}

PointMap kernel_map(const BundleDecomposition& B, const std::vector<std::uint32_t>& f) {
    const auto& top = B.levels.back();
    const auto& S = *top.group;
    const std::size_t m = S.group.n;
    PointMap a(top.space->size());
    for (Point x = 0; x < a.size(); ++x) a[x] = S.action[std::size_t(x) * m + f[top.down[x]]];
    return a;
}

bool in_hom_dk(const BundleDecomposition& B, const std::vector<std::uint32_t>& f, int degree) {
    if (degree < 0) return std::all_of(f.begin(), f.end(), [](auto v) { return v == 0; });
    const auto& G = B.levels.back().group->group;
    const Cubespace& Y = *B.levels[B.k - 1].space;
    for (int n = 0; n <= Y.nmax(); ++n) {
        std::vector<Point> q(std::size_t(1) << n);
        std::vector<std::uint32_t> img(q.size());
        for (Key key : Y.cubes(n)) {
            Y.unpack(n, key, q.data());
            for (std::size_t v = 0; v < q.size(); ++v) img[v] = f[q[v]];
            if (!dk_contains_table(G, degree, n, img)) return false;
        }
    }
    return true;
}

KernelCriterionReport kernel_criterion_check(const BundleDecomposition& B, int i) {
    KernelCriterionReport R;
    if (B.k == 0) return R;
    const Cubespace& X = *B.levels.back().space;
    const std::size_t base = B.levels[B.k - 1].space->size();
    const std::size_t m = B.levels.back().group->group.n;
    long double total = 1;
    for (std::size_t t = 0; t < base; ++t) total *= static_cast<long double>(m);
    if (total > static_cast<long double>(Budget::global().max_closure))
        throw Error(ErrorKind::Budget, "too many maps X_{k-1} -> A_k to run the kernel criterion");
    std::vector<std::uint32_t> f(base, 0);
    while (true) {
        ++R.maps;
        bool tr = is_translation(X, kernel_map(B, f), i).ok;
        bool hm = in_hom_dk(B, f, B.k - i);
        R.translations += tr;
        R.homs += hm;
        if (tr != hm) ++R.disagreements;
        std::size_t t = 0;
        while (t < base && ++f[t] == m) f[t++] = 0;
        if (t == base) break;
    }
    return R;
}

TauReport check_transk_tau(const CubespacePtr& X, int k) {
    auto B = bundle_decompose(X, k);
    TauReport R;
    auto T = translations_enumerate(X, B.k);
    auto shifts = top_shifts(B);
    R.translations = T.maps.size();
    R.shifts = shifts.size();
    R.cap = T.cap;
    std::set<PointMap> a(T.maps.begin(), T.maps.end()), b(shifts.begin(), shifts.end());
    if (a != b) R.verdict = TauVerdict::Different;
    else R.verdict = T.exhaustive ? TauVerdict::Equal : TauVerdict::Inconclusive;
    return R;
}

const char* tau_verdict_name(TauVerdict v) {
    switch (v) {
    case TauVerdict::Equal: return "equal";
    case TauVerdict::Different: return "different";
    case TauVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

} // namespace nilcube
