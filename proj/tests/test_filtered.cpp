#include <gtest/gtest.h>

#include <set>

#include "nilcube/cube.hpp"
#include "nilcube/cubespace.hpp"
#include "nilcube/filtered.hpp"

using namespace nilcube;

namespace {

std::vector<Elem> all_of(const FilteredGroup& G) {
    std::vector<Elem> v(G.order());
    for (Elem g = 0; g < G.order(); ++g) v[g] = g;
    return v;
}

// Cu^n(G) as the closure of the identity under g^F for every face F of
// {0,1}^n (not only upper faces) with g in G_codim(F).
std::set<std::vector<Elem>> closure_cubes(const FilteredGroup& G, int n) {
    std::vector<std::pair<std::vector<std::uint32_t>, std::size_t>> faces_with_codim;
    for (int d = 0; d <= n; ++d)
        for (auto& F : faces(n, d)) faces_with_codim.push_back({F.verts, static_cast<std::size_t>(n - d)});
    std::vector<Elem> start(std::size_t(1) << n, G.identity());
    std::set<std::vector<Elem>> seen{start};
    std::vector<std::vector<Elem>> todo{start};
    while (!todo.empty()) {
        auto q = todo.back();
        todo.pop_back();
        for (auto& [verts, codim] : faces_with_codim)
            for (Elem g : G.level(std::min(codim, G.levels() - 1))) {
                if (!G.in_level(g, codim)) continue;
                auto r = q;
                for (auto v : verts) r[v] = G.mul(r[v], g);
                if (seen.insert(r).second) todo.push_back(r);
            }
    }
    return seen;
}

} // namespace

TEST(Filtration, CatalogGroupsAreValid) {
    for (auto G : {heisenberg(2), heisenberg(3), cyclic_deg2(2), cyclic_deg2(3),
                   abelian_filtered(FiniteAbelianGroup({2, 3}), 2)}) {
        EXPECT_TRUE(filt_validate(G).valid) << G.name;
    }
    EXPECT_EQ(heisenberg(2).degree(), 2);
    EXPECT_EQ(heisenberg(2).order(), 8u);
    EXPECT_EQ(cyclic_deg2(2).level(2).size(), 2u);
}

TEST(Filtration, CommutatorViolationIsReported) {
    auto H = heisenberg(2);
    FilteredGroup bad(H.labels(), H.table(), {all_of(H), all_of(H), {H.identity()}});
    auto r = filt_validate(bad);
    EXPECT_FALSE(r.valid);
    ASSERT_FALSE(r.violations.empty());
    EXPECT_EQ(r.violations[0].i, 1u);
    EXPECT_EQ(r.violations[0].j, 1u);
}

TEST(Filtration, NonSubgroupLevelThrows) {
    auto H = heisenberg(2);
    std::vector<Elem> two_gens{H.identity(), 1, 2};
    EXPECT_THROW(
        {
            FilteredGroup bad(H.labels(), H.table(), {all_of(H), all_of(H), two_gens, {H.identity()}});
            filt_validate(bad);
        },
        Error);
}

TEST(Faces, ColexOrderAndCodimensions) {
    for (int n = 0; n <= 4; ++n) {
        auto F = FaceDecomposition::make(n);
        ASSERT_EQ(F.faces.size(), std::size_t(1) << n);
        for (std::size_t i = 0; i < F.faces.size(); ++i) {
            EXPECT_EQ(F.faces[i], i);
            EXPECT_EQ(F.codims[i], popcount(static_cast<std::uint32_t>(i)));
        }
    }
}

TEST(HostKra, FactorizationRoundTripOnHeisenbergSquares) {
    auto G = heisenberg(2);
    std::uint64_t count = 0;
    hk_for_each(G, 2, [&](const std::vector<Elem>& q) {
        ++count;
        auto f = hk_factorize(G, 2, q);
        ASSERT_TRUE(f.factorization.has_value());
        auto F = FaceDecomposition::make(2);
        for (std::size_t i = 0; i < F.faces.size(); ++i)
            EXPECT_TRUE(G.in_level(f.factorization->coefficients[i], F.codims[i]));
        EXPECT_EQ(hk_recompose(G, 2, *f.factorization), q);
    });
    EXPECT_EQ(count, hk_count(G, 2));
}

TEST(HostKra, MembershipAgreesWithGeneratedClosure) {
    for (auto G : {heisenberg(2), cyclic_deg2(2)}) {
        for (int n = 1; n <= 2; ++n) {
            auto closure = closure_cubes(G, n);
            auto listed = hk_enumerate(G, n);
            EXPECT_EQ(std::set<std::vector<Elem>>(listed.begin(), listed.end()), closure) << G.name;
            EXPECT_EQ(hk_count(G, n), closure.size());
            // every configuration in G^(2^n)
            const std::size_t V = std::size_t(1) << n;
            std::vector<Elem> q(V, 0);
            while (true) {
                EXPECT_EQ(hk_factorize(G, n, q).factorization.has_value(), closure.count(q) == 1);
                std::size_t t = 0;
                while (t < V && ++q[t] == G.order()) q[t++] = 0;
                if (t == V) break;
            }
        }
    }
    auto C = cyclic_deg2(2);
    EXPECT_EQ(closure_cubes(C, 3).size(), hk_count(C, 3));
}

TEST(HostKra, RejectIndexPointsAtFirstBadCoefficient) {
    auto G = cyclic_deg2(2);  // Z/4 with G_2 = {0, 2}
    // (0, 0, 0, 1): sigma_2 = 1 is not in G_2
    auto r = hk_factorize(G, 2, {0, 0, 0, 1});
    EXPECT_FALSE(r.factorization.has_value());
    EXPECT_EQ(r.reject_index, 3u);
}

TEST(Quotient, AbelianFiltrationGivesDk) {
    for (int k = 1; k <= 2; ++k) {
        FiniteAbelianGroup A({3});
        auto G = abelian_filtered(A, k);
        auto Q = quotient_nilspace(G, {G.identity()}, 3);
        auto D = make_Dk(A, k, 3);
        ASSERT_EQ(Q->size(), D->size());
        for (int n = 0; n <= 3; ++n) {
            ASSERT_EQ(Q->count(n), D->count(n));
            for (auto& q : Q->cube_list(n)) {
                std::vector<Point> f;
                for (auto p : q) f.push_back(*D->find_label(Q->label(p)));
                EXPECT_TRUE(D->contains(n, f));
            }
        }
    }
}

TEST(Quotient, HeisenbergModCenterIsOneStep) {
    auto H = heisenberg(2);
    auto center = H.level(2);
    auto Q = quotient_nilspace(H, center, 3);
    EXPECT_EQ(Q->size(), 4u);
    auto D = make_Dk(FiniteAbelianGroup({2, 2}), 1, 3);
    for (int n = 0; n <= 3; ++n) EXPECT_EQ(Q->count(n), D->count(n));
    EXPECT_TRUE(cs_check_axioms(*Q, 1).all_pass());
    auto cm = coset_map(H, center);
    for (Elem g = 0; g < H.order(); ++g)
        for (Elem z : center) EXPECT_EQ(cm[g], cm[H.mul(g, z)]);
}

TEST(Quotient, RejectsNonSubgroup) {
    auto H = heisenberg(2);
    EXPECT_THROW(quotient_nilspace(H, {H.identity(), 1, 2}, 2), Error);
}
