#include "nilcube/catalog.hpp"

#include <functional>
#include <sstream>

#include "nilcube/filtered.hpp"
#include "nilcube/io.hpp"

namespace nilcube {

namespace {

std::vector<Elem> parse_gamma(const FilteredGroup& G, const std::string& list) {
    std::vector<Elem> gamma{G.identity()};
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        bool found = false;
        for (Elem e = 0; e < G.order(); ++e)
            if (G.labels()[e] == tok) {
                gamma.push_back(e);
                found = true;
                break;
            }
        if (!found) throw Error(ErrorKind::Config, "unknown group element '" + tok + "' in --gamma");
    }
    return gamma;
}

} // namespace

CubespacePtr make_space(const SpaceSpec& s) {
    if (s.nmax < 0) throw Error(ErrorKind::Config, "nmax must be non-negative");
    if (s.kind == "dk") {
        if (s.step < 0) throw Error(ErrorKind::Config, "dk degree must be non-negative");
        return make_Dk(FiniteAbelianGroup::parse(s.group), s.step, s.nmax);
    }
    if (s.kind == "heis") {
        auto G = heisenberg(s.p);
        return quotient_nilspace(G, {G.identity()}, s.nmax);
    }
    if (s.kind == "cyclic-deg2") {
        auto G = cyclic_deg2(s.N);
        return quotient_nilspace(G, {G.identity()}, s.nmax);
    }
    if (s.kind == "quotient") {
        FilteredGroup G = s.file.empty() ? heisenberg(s.p) : load_group(s.file);
        return quotient_nilspace(G, parse_gamma(G, s.gamma), s.nmax);
    }
    if (s.kind == "point") return point_space(s.nmax);
    if (s.kind == "file") {
        if (s.file.empty()) throw Error(ErrorKind::Config, "--space file needs --file");
        return load_space(s.file);
    }
    throw Error(ErrorKind::Config, "unknown space kind '" + s.kind + "'");
}

std::vector<NamedSpace> catalog_spaces(int nmax, bool with_heis3) {
    std::vector<NamedSpace> out;
    auto dk = [&](std::uint64_t n, int k) {
        out.push_back({"D" + std::to_string(k) + "(Z/" + std::to_string(n) + ")",
                       make_Dk(FiniteAbelianGroup::cyclic(n), k, nmax)});
    };
    dk(2, 1);
    dk(3, 1);
    dk(2, 2);
    dk(3, 2);
    auto H2 = heisenberg(2);
    out.push_back({"heis(2)", quotient_nilspace(H2, {H2.identity()}, nmax)});
    if (with_heis3) {
        auto H3 = heisenberg(3);
        out.push_back({"heis(3)", quotient_nilspace(H3, {H3.identity()}, nmax)});
    }
    auto C = cyclic_deg2(2);
    out.push_back({"cyclic-deg2(2)", quotient_nilspace(C, {C.identity()}, nmax)});
    return out;
}

Morphism reduction_morphism(std::uint64_t a, std::uint64_t b, int k, int nmax) {
    if (b == 0 || a % b != 0) throw Error(ErrorKind::Config, "reduction needs b | a");
    Morphism m;
    m.source = make_Dk(FiniteAbelianGroup::cyclic(a), k, nmax);
    m.target = make_Dk(FiniteAbelianGroup::cyclic(b), k, nmax);
    m.map.resize(a);
    for (std::uint64_t x = 0; x < a; ++x) m.map[x] = static_cast<Point>(x % b);
    return m;
}

std::vector<NamedMorphism> catalog_morphisms(int nmax) {
    std::vector<NamedMorphism> out;
    out.push_back({"D2(Z/4) -> D2(Z/2) mod 2", reduction_morphism(4, 2, 2, nmax)});
    out.push_back({"D1(Z/8) -> D1(Z/4) mod 4", reduction_morphism(8, 4, 1, nmax)});
    out.push_back({"D1(Z/6) -> D1(Z/3) mod 3", reduction_morphism(6, 3, 1, nmax)});
    {
        auto X = make_Dk(FiniteAbelianGroup::cyclic(3), 2, nmax);
        Morphism id{X, X, {0, 1, 2}};
        out.push_back({"identity on D2(Z/3)", id});
    }
    {
        auto X = make_Dk(FiniteAbelianGroup::cyclic(3), 1, nmax);
        Morphism c{X, point_space(nmax), {0, 0, 0}};
        out.push_back({"D1(Z/3) -> point", c});
    }
    {
        auto X = make_Dk(FiniteAbelianGroup::cyclic(2), 1, nmax);
        auto Y = make_Dk(FiniteAbelianGroup::cyclic(3), 1, nmax);
        auto P = product(*X, *Y);
        std::vector<Point> pr(P->size());
        for (Point p = 0; p < P->size(); ++p) pr[p] = p / static_cast<Point>(Y->size());
        out.push_back({"D1(Z/2) x D1(Z/3) -> D1(Z/2)", Morphism{P, X, pr}});
    }
    auto H = heisenberg(2);
    auto HX = quotient_nilspace(H, {H.identity()}, nmax);
    auto F1 = factor(HX, 1);
    out.push_back({"heis(2) -> F1(heis(2))", F1.projection});
    auto C = cyclic_deg2(2);
    auto CX = quotient_nilspace(C, {C.identity()}, nmax);
    out.push_back({"cyclic-deg2(2) -> F1", factor(CX, 1).projection});
    {
        auto X = make_Dk(FiniteAbelianGroup::cyclic(4), 1, nmax);
        Morphism dbl{X, X, {0, 2, 0, 2}};
        out.push_back({"D1(Z/4) x -> 2x", dbl, false});
    }
    return out;
}

std::vector<std::uint32_t> table_embedding(const AbelianTable& T) {
    auto inv = T.invariant_factors();
    std::vector<std::uint64_t> order(inv.rbegin(), inv.rend());  // largest first
    auto elem_order = [&](std::uint32_t g) {
        std::uint64_t o = 1;
        for (std::uint32_t x = g; x != T.zero; x = T.plus(x, g)) ++o;
        return o;
    };
    std::vector<std::uint32_t> gens(order.size());
    std::function<bool(std::size_t, const std::vector<char>&)> pick = [&](std::size_t i, const std::vector<char>& span) {
        if (i == order.size()) return true;
        for (std::uint32_t g = 0; g < T.n; ++g) {
            if (elem_order(g) != order[i]) continue;
            bool free = true;
            for (std::uint32_t x = g; x != T.zero && free; x = T.plus(x, g)) free = !span[x];
            if (!free) continue;
            std::vector<char> next(T.n, 0);
            for (std::uint32_t s = 0; s < T.n; ++s) {
                if (!span[s]) continue;
                std::uint32_t x = s;
                for (std::uint64_t t = 0; t < order[i]; ++t, x = T.plus(x, g)) next[x] = 1;
            }
            gens[i] = g;
            if (pick(i + 1, next)) return true;
        }
        return false;
    };
    std::vector<char> span(T.n, 0);
    span[T.zero] = 1;
    if (!pick(0, span)) throw Error(ErrorKind::NotNilspace, "no basis matching the invariant factors");
    // Codes of FiniteAbelianGroup(inv) are mixed radix over inv in increasing order.
    FiniteAbelianGroup A(inv);
    std::vector<std::uint32_t> emb(A.order());
    for (std::uint64_t c = 0; c < A.order(); ++c) {
        auto res = A.decode(c);
        std::uint32_t x = T.zero;
        for (std::size_t j = 0; j < res.size(); ++j) {
            std::uint32_t g = gens[order.size() - 1 - j];
            for (std::uint64_t t = 0; t < res[j]; ++t) x = T.plus(x, g);
        }
        emb[c] = x;
    }
    return emb;
}

AbstractExtension extension_from_bundle(const BundleDecomposition& B) {
    if (B.k < 1) throw Error(ErrorKind::Precondition, "a 0-step space is not an extension");
    const auto& top = B.levels[B.k];
    const auto& S = *top.group;
    AbstractExtension E;
    E.total = top.space;
    E.base = B.levels[B.k - 1].space;
    E.proj = top.down;
    E.A = S.group.abstract();
    E.degree = B.k;
    auto emb = table_embedding(S.group);
    const std::size_t m = S.group.n;
    E.act.resize(E.total->size() * m);
    for (Point y = 0; y < E.total->size(); ++y)
        for (std::size_t c = 0; c < m; ++c) E.act[y * m + c] = S.action[std::size_t(y) * m + emb[c]];
    validate_abstract(E);
    return E;
}

AbstractExtension cyclic_reduction_extension(std::uint64_t N, int nmax) {
    AbstractExtension E;
    E.total = make_Dk(FiniteAbelianGroup::cyclic(N * N), 1, nmax);
    E.base = make_Dk(FiniteAbelianGroup::cyclic(N), 1, nmax);
    E.A = FiniteAbelianGroup::cyclic(N);
    E.degree = 1;
    E.proj.resize(N * N);
    E.act.resize(N * N * N);
    for (std::uint64_t y = 0; y < N * N; ++y) {
        E.proj[y] = static_cast<Point>(y % N);
        for (std::uint64_t a = 0; a < N; ++a) E.act[y * N + a] = static_cast<Point>((y + N * a) % (N * N));
    }
    validate_abstract(E);
    return E;
}

std::vector<NamedExtension> catalog_extensions(int nmax) {
    std::vector<NamedExtension> out;
    out.push_back({"z4", "D1(Z/4) over D1(Z/2)", cyclic_reduction_extension(2, nmax)});
    out.push_back({"z9", "D1(Z/9) over D1(Z/3)", cyclic_reduction_extension(3, nmax)});
    out.push_back({"split-d1", "split D1(Z/2) x D1(Z/2)", split_extension(make_Dk(FiniteAbelianGroup::cyclic(2), 1, nmax),
                                                              FiniteAbelianGroup::cyclic(2), 1)});
    out.push_back({"split-d2", "split D1(Z/2) x D2(Z/2)", split_extension(make_Dk(FiniteAbelianGroup::cyclic(2), 1, nmax),
                                                              FiniteAbelianGroup::cyclic(2), 2)});
    auto H = heisenberg(2);
    auto HX = quotient_nilspace(H, {H.identity()}, nmax);
    out.push_back({"heis2", "heis(2) over X1 by A2", extension_from_bundle(bundle_decompose(HX))});
    auto C = cyclic_deg2(2);
    auto CX = quotient_nilspace(C, {C.identity()}, nmax);
    out.push_back({"cyclic2", "cyclic-deg2(2) over X1 by A2", extension_from_bundle(bundle_decompose(CX))});
    return out;
}

} // namespace nilcube
