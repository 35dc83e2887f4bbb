#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "nilcube/cube.hpp"
#include "nilcube/groups.hpp"
#include "nilcube/linalg.hpp"

using namespace nilcube;

namespace {

// Smallest number of elements generating A, by exhaustive search.
std::size_t brute_min_generators(const FiniteAbelianGroup& A) {
    const std::uint64_t N = A.order();
    if (N == 1) return 0;
    auto span_size = [&](const std::vector<std::uint64_t>& gens) {
        std::vector<char> in(N, 0);
        std::vector<std::uint64_t> todo{0};
        in[0] = 1;
        while (!todo.empty()) {
            auto x = todo.back();
            todo.pop_back();
            for (auto g : gens) {
                auto y = A.add(x, g);
                if (!in[y]) {
                    in[y] = 1;
                    todo.push_back(y);
                }
            }
        }
        return static_cast<std::uint64_t>(std::count(in.begin(), in.end(), 1));
    };
    for (std::size_t r = 1;; ++r) {
        std::vector<std::uint64_t> idx(r, 0);
        while (true) {
            if (span_size(idx) == N) return r;
            std::size_t t = 0;
            while (t < r && ++idx[t] == N) idx[t++] = 0;
            if (t == r) break;
        }
    }
}

// Number of x with d x = 0, for each d dividing the exponent.
std::vector<std::uint64_t> torsion_profile(const FiniteAbelianGroup& A, std::uint64_t upto) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 1; d <= upto; ++d) {
        std::uint64_t c = 0;
        for (std::uint64_t x = 0; x < A.order(); ++x) {
            std::uint64_t y = 0;
            for (std::uint64_t t = 0; t < d; ++t) y = A.add(y, x);
            c += y == 0;
        }
        out.push_back(c);
    }
    return out;
}

BigInt det(IntMatrix m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    if (n == 1) return m[0][0];
    BigInt total = 0;
    for (std::size_t c = 0; c < n; ++c) {
        IntMatrix minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<BigInt> row;
            for (std::size_t j = 0; j < n; ++j)
                if (j != c) row.push_back(m[r][j]);
            minor.push_back(row);
        }
        BigInt term = m[0][c] * det(minor);
        total += (c % 2 ? -term : term);
    }
    return total;
}

// gcd of all k x k minors.
BigInt determinantal_divisor(const IntMatrix& a, std::size_t k) {
    const std::size_t R = a.size(), C = a[0].size();
    BigInt g = 0;
    for (std::uint32_t rm = 0; rm < (1u << R); ++rm) {
        if (static_cast<std::size_t>(popcount(rm)) != k) continue;
        for (std::uint32_t cm = 0; cm < (1u << C); ++cm) {
            if (static_cast<std::size_t>(popcount(cm)) != k) continue;
            IntMatrix m;
            for (std::size_t r = 0; r < R; ++r) {
                if (!(rm >> r & 1)) continue;
                std::vector<BigInt> row;
                for (std::size_t c = 0; c < C; ++c)
                    if (cm >> c & 1) row.push_back(a[r][c]);
                m.push_back(row);
            }
            BigInt d = abs(det(m));
            g = boost::multiprecision::gcd(g, d);
        }
    }
    return g;
}

} // namespace

TEST(Rational, FracAndSignedFrac) {
    EXPECT_EQ(frac(Rational(-1, 4)), Rational(3, 4));
    EXPECT_EQ(frac(Rational(9, 4)), Rational(1, 4));
    EXPECT_EQ(signed_frac(Rational(3, 4)), Rational(-1, 4));
    EXPECT_EQ(signed_frac(Rational(1, 2)), Rational(1, 2));
    EXPECT_EQ(parse_rational("-3/6"), Rational(-1, 2));
    EXPECT_EQ(to_string(Rational(2, 4)), "1/2");
    EXPECT_THROW(parse_rational("1/0"), Error);
    EXPECT_THROW(parse_rational("x"), Error);
}

TEST(Group, DescriptorRoundTrip) {
    for (std::string d : {"[2,4]", "[t64]", "[]", "[3,t8]"}) EXPECT_EQ(FiniteAbelianGroup::parse(d).descriptor(), d);
    EXPECT_EQ(FiniteAbelianGroup::parse("6").descriptor(), "[6]");
    EXPECT_THROW(FiniteAbelianGroup::parse("[2,"), Error);
}

TEST(Group, EncodeDecodeAndArithmetic) {
    FiniteAbelianGroup A({2, 3, 4});
    for (std::uint64_t c = 0; c < A.order(); ++c) {
        EXPECT_EQ(A.encode(A.decode(c)), c);
        EXPECT_EQ(A.add(c, A.neg(c)), 0u);
        for (std::uint64_t d = 0; d < A.order(); ++d) EXPECT_EQ(A.add(c, d), A.add(d, c));
    }
}

TEST(Group, RankMatchesMinimalGeneratingSet) {
    std::vector<std::vector<std::uint64_t>> cases = {{2}, {6}, {2, 2}, {2, 3}, {2, 4}, {3, 3}, {2, 2, 2},
                                                     {4, 6}, {2, 2, 3}, {9}, {3, 6}, {2, 6, 3}};
    for (auto& f : cases) {
        FiniteAbelianGroup A(f);
        EXPECT_EQ(grp_rank(A), brute_min_generators(A)) << A.descriptor();
    }
}

TEST(Group, InvariantFactorsPreserveIsomorphismType) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<std::uint64_t> f;
        std::size_t len = 1 + rng() % 3;
        std::uint64_t order = 1;
        for (std::size_t i = 0; i < len; ++i) {
            f.push_back(2 + rng() % 5);
            order *= f.back();
        }
        if (order > 200) continue;
        auto inv = invariant_factors(f);
        for (std::size_t i = 0; i + 1 < inv.size(); ++i) EXPECT_EQ(inv[i + 1] % inv[i], 0u);
        FiniteAbelianGroup A(f), B(inv);
        EXPECT_EQ(torsion_profile(A, 12), torsion_profile(B, 12));
        EXPECT_TRUE(isomorphic(A, B));
    }
    EXPECT_FALSE(isomorphic(FiniteAbelianGroup({4}), FiniteAbelianGroup({2, 2})));
    EXPECT_TRUE(isomorphic(FiniteAbelianGroup({6}), FiniteAbelianGroup({2, 3})));
}

TEST(Sigma, ReflectionFlipsSignPermutationKeepsIt) {
    FiniteAbelianGroup A = FiniteAbelianGroup::cyclic(5);
    std::mt19937 rng(11);
    for (int k = 1; k <= 3; ++k) {
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<std::uint64_t> f(std::size_t(1) << k);
            for (auto& x : f) x = rng() % 5;
            auto s = sigma(k, f, A);
            for (int j = 0; j < k; ++j)
                EXPECT_EQ(sigma(k, pull_back(CubeMorphismSpec::reflection(k, j), f), A), A.neg(s));
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j)
                    EXPECT_EQ(sigma(k, pull_back(CubeMorphismSpec::transposition(k, i, j), f), A), s);
        }
    }
}

TEST(Sigma, TorusAndCodeFormsAgree) {
    FiniteAbelianGroup A = FiniteAbelianGroup::parse("[3,t8]");
    std::mt19937 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::uint64_t> f(8);
        std::vector<TorusValue> v(8);
        for (std::size_t i = 0; i < 8; ++i) {
            f[i] = rng() % A.order();
            v[i] = to_value(A, f[i]);
        }
        EXPECT_EQ(sigma(3, v), to_value(A, sigma(3, f, A)));
    }
}

TEST(Distance, IsAMetricOnEachComponent) {
    std::vector<TorusValue> vals;
    for (int i = 0; i < 12; ++i) vals.push_back(TorusValue::circle(Rational(i, 12)));
    for (auto& x : vals)
        for (auto& y : vals) {
            EXPECT_EQ(d2(x, y), d2(y, x));
            EXPECT_EQ(d2(x, y) == Distance::from_squared(Rational(0)), x == y);
            for (auto& z : vals) {
                // exact values exist on the circle
                auto a = *d2(x, y).exact(), b = *d2(y, z).exact(), c = *d2(x, z).exact();
                EXPECT_LE(c, a + b);
            }
        }
    auto f0 = TorusValue::finite({2}, {0}), f1 = TorusValue::finite({2}, {1});
    EXPECT_TRUE(d2(f0, f1).is_infinite());
    EXPECT_EQ(*d2(TorusValue::circle(Rational(1, 8)), TorusValue::circle(Rational(7, 8))).exact(), Rational(1, 4));
}

TEST(Averaging, MatchesBruteForceCenterScan) {
    std::mt19937 rng(5);
    const std::int64_t L = 24;
    int averaged = 0, rejected = 0;
    for (int trial = 0; trial < 400; ++trial) {
        std::size_t m = 1 + rng() % 5;
        std::int64_t base = rng() % L, spread = 1 + rng() % 18;
        std::vector<TorusValue> vals;
        for (std::size_t i = 0; i < m; ++i)
            vals.push_back(TorusValue::circle(frac(Rational(base + static_cast<std::int64_t>(rng() % spread), L))));
        // Centers on the grid 1/(8L) are enough: feasible centers form an open
        // arc with endpoints in (1/(4L))Z.
        std::optional<Rational> oracle;
        for (std::int64_t j = 0; j < 8 * L && !oracle; ++j) {
            Rational c(j, 8 * L);
            bool ok = true;
            Rational sum(0);
            for (auto& v : vals) {
                Rational s = signed_frac(v.torus[0] - c);
                if (!(s < Rational(1, 4) && s > Rational(-1, 4))) ok = false;
                sum += s;
            }
            if (ok) oracle = frac(c + sum / static_cast<std::int64_t>(m));
        }
        auto got = try_concentrated_average(vals);
        ASSERT_EQ(got.has_value(), oracle.has_value());
        if (oracle) {
            EXPECT_EQ(got->torus[0], *oracle);
            ++averaged;
        } else {
            EXPECT_THROW(concentrated_average(vals), Error);
            ++rejected;
        }
    }
    EXPECT_GT(averaged, 50);
    EXPECT_GT(rejected, 10);
}

TEST(Averaging, AdditiveForSmallConcentration) {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 2 + rng() % 2;  // number of functions
        const std::size_t n = 1 + rng() % 6;  // multiset size
        // each f_j is (1/(4m))-concentrated around a random center
        std::vector<std::vector<TorusValue>> fs(m);
        for (auto& f : fs) {
            std::int64_t c = rng() % 96;
            for (std::size_t i = 0; i < n; ++i) {
                std::int64_t off = static_cast<std::int64_t>(rng() % 5) - 2;  // |off|/96 < 1/(4m)
                f.push_back(TorusValue::circle(frac(Rational(c + off, 96))));
            }
        }
        std::vector<TorusValue> sum(n, TorusValue::circle(Rational(0)));
        TorusValue avgsum = TorusValue::circle(Rational(0));
        for (auto& f : fs) {
            for (std::size_t i = 0; i < n; ++i) sum[i] += f[i];
            avgsum += concentrated_average(f);
        }
        EXPECT_EQ(concentrated_average(sum), avgsum);
    }
}

TEST(Averaging, FiniteComponentsMustAgree) {
    auto a = TorusValue::finite({2}, {0}), b = TorusValue::finite({2}, {1});
    EXPECT_FALSE(try_concentrated_average({a, b}).has_value());
    EXPECT_EQ(concentrated_average({a, a}), a);
}

TEST(RefineCircle, FindsSmallestContainingGroup) {
    auto A = FiniteAbelianGroup::circle(64);
    auto B = refine_circle(A, {TorusValue::circle(Rational(1, 256)), TorusValue::circle(Rational(1, 3))});
    EXPECT_EQ(B.descriptor(), "[t768]");
}

TEST(Smith, InvariantsMatchDeterminantalDivisors) {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t R = 1 + rng() % 3, C = 1 + rng() % 3;
        IntMatrix a = zero_matrix(R, C);
        for (auto& row : a)
            for (auto& x : row) x = static_cast<int>(rng() % 13) - 6;
        auto inv = smith_invariants(a);
        BigInt prev = 1;
        for (std::size_t k = 1; k <= std::min(R, C); ++k) {
            BigInt dk = determinantal_divisor(a, k);
            if (dk == 0) {
                EXPECT_EQ(inv.size(), k - 1);
                break;
            }
            ASSERT_GE(inv.size(), k);
            EXPECT_EQ(inv[k - 1], dk / prev);
            prev = dk;
        }
        auto S = smith_decompose(a);
        EXPECT_EQ(multiply(multiply(S.U, a), S.V), S.D);
        EXPECT_EQ(multiply(S.V, S.Vinv), identity_matrix(C));
    }
}

TEST(Smith, SolveModAgreesWithExhaustiveSearch) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 80; ++trial) {
        const int m = 2 + rng() % 4;
        IntMatrix a = zero_matrix(3, 3);
        for (auto& row : a)
            for (auto& x : row) x = static_cast<int>(rng() % m);
        std::vector<BigInt> b(3);
        for (auto& x : b) x = static_cast<int>(rng() % m);
        bool exists = false;
        for (int y0 = 0; y0 < m && !exists; ++y0)
            for (int y1 = 0; y1 < m && !exists; ++y1)
                for (int y2 = 0; y2 < m && !exists; ++y2) {
                    bool ok = true;
                    for (int r = 0; r < 3; ++r)
                        ok = ok && mod_floor(a[r][0] * y0 + a[r][1] * y1 + a[r][2] * y2 - b[r], m) == 0;
                    exists = ok;
                }
        auto y = solve_mod(a, b, m);
        ASSERT_EQ(y.has_value(), exists);
        if (y)
            for (int r = 0; r < 3; ++r)
                EXPECT_EQ(mod_floor(a[r][0] * (*y)[0] + a[r][1] * (*y)[1] + a[r][2] * (*y)[2] - b[r], m), 0);
    }
}
