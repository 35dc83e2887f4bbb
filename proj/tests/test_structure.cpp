#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "nilcube/catalog.hpp"
#include "nilcube/cubespace.hpp"
#include "nilcube/filtered.hpp"
#include "nilcube/structure.hpp"

using namespace nilcube;

namespace {

CubespacePtr heis_space(std::uint64_t p, int nmax) {
    auto H = heisenberg(p);
    return quotient_nilspace(H, {H.identity()}, nmax);
}

std::set<std::set<Point>> blocks_as_sets(const CanonicalPartition& P) {
    std::set<std::set<Point>> out;
    for (auto& b : P.blocks) out.insert(std::set<Point>(b.begin(), b.end()));
    return out;
}

// Partition of X's points induced by a map.
std::set<std::set<Point>> kernel_of(const std::vector<Point>& map) {
    std::map<Point, std::set<Point>> m;
    for (Point x = 0; x < map.size(); ++x) m[map[x]].insert(x);
    std::set<std::set<Point>> out;
    for (auto& [k, s] : m) out.insert(s);
    return out;
}

} // namespace

TEST(Simk, OneStepSpacesAreConnectedAtLevelZero) {
    auto D = make_Dk(FiniteAbelianGroup::cyclic(3), 1, 3);
    EXPECT_EQ(simk(*D, 0).blocks.size(), 1u);
    auto D2 = make_Dk(FiniteAbelianGroup::cyclic(2), 2, 3);
    EXPECT_EQ(simk(*D2, 1).blocks.size(), 1u);
    EXPECT_EQ(simk(*D2, 2).blocks.size(), 2u);
}

TEST(Simk, CyclicDegreeTwoClassesAreCosetsOfG2) {
    auto C = cyclic_deg2(2);
    auto X = quotient_nilspace(C, {C.identity()}, 3);
    auto P = simk(*X, 1);
    std::set<std::set<Point>> cosets;
    for (Elem x = 0; x < C.order(); ++x) {
        std::set<Point> s;
        for (Elem g : C.level(2)) s.insert(*X->find_label(C.labels()[C.mul(x, g)]));
        cosets.insert(s);
    }
    EXPECT_EQ(blocks_as_sets(P), cosets);
}

TEST(Factor, TopAndBottomFactors) {
    auto X = heis_space(2, 3);
    auto top = factor(X, 2);
    EXPECT_EQ(top.space->size(), X->size());
    for (int n = 0; n <= 3; ++n) EXPECT_EQ(top.space->count(n), X->count(n));
    auto D = make_Dk(FiniteAbelianGroup::cyclic(3), 2, 3);
    EXPECT_EQ(factor(D, 0).space->size(), 1u);
}

TEST(Factor, FactorOfFactorIsTheLowerFactor) {
    for (auto X : {heis_space(2, 3), quotient_nilspace(cyclic_deg2(2), {0}, 3)}) {
        auto F2 = factor(X, 2);
        auto F21 = factor(F2.space, 1);
        auto F1 = factor(X, 1);
        std::vector<Point> composed(X->size());
        for (Point x = 0; x < X->size(); ++x) composed[x] = F21.projection.map[F2.projection.map[x]];
        EXPECT_EQ(kernel_of(composed), kernel_of(F1.projection.map));
        for (int n = 0; n <= 3; ++n) EXPECT_EQ(F21.space->count(n), F1.space->count(n));
        EXPECT_TRUE(cs_check_axioms(*F1.space, 1).all_pass());
    }
}

TEST(Factor, HeisenbergModThreeAbelianization) {
    auto X = heis_space(3, 2);
    auto F = factor(X, 1);
    auto D = make_Dk(FiniteAbelianGroup({3, 3}), 1, 2);
    ASSERT_EQ(F.space->size(), 9u);
    for (int n = 0; n <= 2; ++n) EXPECT_EQ(F.space->count(n), D->count(n));
}

TEST(StructureGroup, DkGivesItsCoefficientGroup) {
    for (std::uint64_t N : {2, 3, 4, 6}) {
        auto D = make_Dk(FiniteAbelianGroup::cyclic(N), 1, 3);
        auto S = structure_group(D, 1);
        EXPECT_EQ(S.group.invariant_factors(), invariant_factors({N}));
        EXPECT_FALSE(S.group.validate().has_value());
    }
    auto P = point_space(3);
    EXPECT_EQ(structure_group(P, 0).group.n, 1u);
}

TEST(StructureGroup, HeisenbergTopActionIsCentreMultiplication) {
    auto H = heisenberg(2);
    auto X = quotient_nilspace(H, {H.identity()}, 3);
    auto S = structure_group(X, 2);
    ASSERT_EQ(S.group.n, 2u);
    for (Point y = 0; y < X->size(); ++y) ASSERT_EQ(X->label(y), H.labels()[y]);
    std::set<std::vector<Point>> shifts, centre;
    for (std::uint32_t a = 0; a < S.group.n; ++a) {
        std::vector<Point> m(X->size());
        for (Point y = 0; y < X->size(); ++y) m[y] = S.action[std::size_t(y) * S.group.n + a];
        shifts.insert(m);
    }
    for (Elem z : H.level(2)) {
        std::vector<Point> m(X->size());
        // with trivial Gamma, point y is the element y
        for (Point y = 0; y < X->size(); ++y) m[y] = H.mul(y, z);
        centre.insert(m);
    }
    EXPECT_EQ(shifts, centre);
}

TEST(StructureGroup, IndependentOfFibre) {
    auto X = heis_space(2, 3);
    for (int k = 1; k <= 2; ++k) {
        auto Xk = k == 2 ? X : factor(X, k).space;
        auto per = fibre_invariant_factors(*Xk, k);
        ASSERT_FALSE(per.empty());
        for (auto& f : per) EXPECT_EQ(f, per.front());
        EXPECT_TRUE(structure_group(X, k).fibre_independent);
    }
}

TEST(Ergodic, KFoldErgodicSpacesAreDk) {
    auto D = make_Dk(FiniteAbelianGroup({2, 2}), 2, 3);
    auto c = classify_kfold_ergodic(D, 2);
    EXPECT_TRUE(c.kfold_ergodic);
    EXPECT_TRUE(c.cubes_equal);
    EXPECT_EQ(c.group.invariant_factors(), (std::vector<std::uint64_t>{2, 2}));
    EXPECT_FALSE(classify_kfold_ergodic(heis_space(2, 3), 2).kfold_ergodic);
}

TEST(Bundle, Examples) {
    auto D = make_Dk(FiniteAbelianGroup::cyclic(2), 2, 3);
    auto B = bundle_decompose(D);
    ASSERT_EQ(B.levels.size(), 3u);
    EXPECT_EQ(B.levels[0].space->size(), 1u);
    EXPECT_EQ(B.levels[1].space->size(), 1u);
    EXPECT_EQ(B.groups[1].order(), 1u);
    EXPECT_EQ(B.groups[2].descriptor(), "[2]");
    EXPECT_EQ(B.rank, 1u);
    EXPECT_TRUE(B.ok());

    auto H = bundle_decompose(heis_space(2, 3));
    EXPECT_EQ(H.groups[1].descriptor(), "[2,2]");
    EXPECT_EQ(H.groups[2].descriptor(), "[2]");
    EXPECT_EQ(H.rank, 3u);

    EXPECT_EQ(bundle_decompose(make_Dk(FiniteAbelianGroup::cyclic(6), 1, 3)).rank, 1u);
}

TEST(Bundle, TowerProjectionsCompose) {
    auto B = bundle_decompose(heis_space(2, 3));
    for (int i = 1; i <= B.k; ++i)
        for (Point x = 0; x < B.levels[B.k].space->size(); ++x)
            EXPECT_EQ(B.levels[i - 1].proj[x], B.levels[i].down[B.levels[i].proj[x]]);
    for (int i = 1; i <= B.k; ++i)
        for (int n = 0; n <= 3; ++n) EXPECT_TRUE(check_difference_condition(B, i, n));
}

TEST(Bundle, RejectsNonNilspace) {
    auto D = make_Dk(FiniteAbelianGroup::cyclic(2), 1, 3);
    auto Y = std::make_shared<Cubespace>(*D);
    auto keys = D->cubes(2);
    keys.pop_back();
    Y->set_cubes(2, keys);
    EXPECT_THROW(bundle_decompose(Y), Error);
}

TEST(Morphism, CatalogFibreCountsMatchDirectCounting) {
    for (auto& m : catalog_morphisms(3)) {
        auto R = morphism_check(m.phi);
        EXPECT_TRUE(R.is_morphism) << m.name;
        EXPECT_EQ(R.fibre_surjective, m.fibre_surjective_expected) << m.name;
        const auto& S = *m.phi.source;
        const auto& T = *m.phi.target;
        std::map<Point, std::uint64_t> pf;
        for (Point x = 0; x < S.size(); ++x) ++pf[m.phi.map[x]];
        bool uniform = pf.size() == T.size();
        for (auto& [p, c] : pf) uniform = uniform && c == pf.begin()->second;
        EXPECT_EQ(R.point_fibres_uniform, uniform) << m.name;
        for (int n = 0; n <= 3 && uniform; ++n) {
            std::map<Key, std::uint64_t> cf;
            std::vector<Point> f(std::size_t(1) << n);
            for (Key k : S.cubes(n)) {
                S.unpack(n, k, f.data());
                for (auto& p : f) p = m.phi.map[p];
                ++cf[T.pack(n, f)];
            }
            EXPECT_EQ(cf.size(), T.count(n)) << m.name;
            for (auto& [k, c] : cf) EXPECT_EQ(c, S.count(n) / T.count(n)) << m.name;
        }
        if (m.fibre_surjective_expected) {
            EXPECT_TRUE(R.measure_preserving) << m.name;
            EXPECT_EQ(R.point_fibre, S.size() / T.size()) << m.name;
        }
    }
}

TEST(GoodPairs, RootAndComposedFibres) {
    auto X = heis_space(2, 3);
    auto B = bundle_decompose(X);
    auto full = make_subcubespace(2, {0, 1, 2, 3});
    auto root = good_pair_check(full, {}, {0}, B, {});
    EXPECT_TRUE(root.ok());
    EXPECT_EQ(root.domain, X->count(2));
    EXPECT_EQ(root.codomain, X->size());
    EXPECT_EQ(root.fibre, X->count(2) / X->size());
    // {0} <- edge <- square: fibres multiply
    auto to_edge = good_pair_check(full, {}, {0, 1}, B, {});
    auto edge = make_subcubespace(1, {0, 1});
    auto edge_root = good_pair_check(edge, {}, {0}, B, {});
    EXPECT_TRUE(to_edge.ok());
    EXPECT_TRUE(edge_root.ok());
    EXPECT_EQ(to_edge.fibre * edge_root.fibre, root.fibre);
    EXPECT_EQ(to_edge.codomain, X->count(1));
}

TEST(GoodPairs, TricubePairs) {
    auto X = heis_space(2, 3);
    auto B = bundle_decompose(X);
    auto T = make_tricube(2);
    std::vector<std::uint32_t> outer, inner;
    for (auto l : T.omega) outer.push_back(T.space.verts[l]);
    for (auto l : T.psi[0]) inner.push_back(T.space.verts[l]);
    auto q = X->cube(2, 77);
    std::vector<std::pair<std::uint32_t, Point>> byvert;
    for (std::uint32_t v = 0; v < 4; ++v) byvert.push_back({T.space.verts[T.omega[v]], q[v]});
    std::sort(byvert.begin(), byvert.end());
    std::vector<Point> f;
    for (auto& [v, p] : byvert) f.push_back(p);
    auto r = good_pair_check(T.space, outer, inner, B, f);
    EXPECT_TRUE(r.ok());
    EXPECT_GT(r.fibre, 0u);
    EXPECT_EQ(r.domain, r.codomain * r.fibre);
    for (std::uint32_t v = 1; v < 4; ++v) {
        std::vector<std::uint32_t> pv;
        for (auto l : T.psi[v]) pv.push_back(T.space.verts[l]);
        auto g = good_pair_check(T.space, {T.space.verts[T.center]}, pv, B, {5});
        EXPECT_TRUE(g.ok()) << "v=" << v;
        EXPECT_EQ(g.domain, g.codomain * g.fibre);
    }
}

TEST(InverseSystem, ReductionChainIsStrict) {
    std::vector<CubespacePtr> spaces;
    for (std::uint64_t n : {2, 4, 8}) spaces.push_back(make_Dk(FiniteAbelianGroup::cyclic(n), 1, 3));
    std::map<std::pair<int, int>, std::vector<Point>> tr;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            std::vector<Point> m(spaces[j]->size());
            for (Point x = 0; x < m.size(); ++x) m[x] = x % spaces[i]->size();
            tr[{i, j}] = m;
        }
    EXPECT_TRUE(verify_inverse_system(spaces, tr).strict());
    auto broken = tr;
    broken[{0, 2}] = {0, 0, 0, 0, 1, 1, 1, 1};
    auto R = verify_inverse_system(spaces, broken);
    EXPECT_FALSE(R.compositions);
    EXPECT_FALSE(R.strict());
}
