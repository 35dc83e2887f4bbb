#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "nilcube/catalog.hpp"
#include "nilcube/cocycles.hpp"
#include "nilcube/io.hpp"

using namespace nilcube;

namespace {

std::string space_text(const Cubespace& X) {
    std::ostringstream os;
    write_space(os, X);
    return os.str();
}

void expect_same_space(const Cubespace& a, const Cubespace& b) {
    ASSERT_EQ(a.size(), b.size());
    ASSERT_EQ(a.nmax(), b.nmax());
    for (Point p = 0; p < a.size(); ++p) EXPECT_EQ(a.label(p), b.label(p));
    for (int n = 0; n <= a.nmax(); ++n) EXPECT_EQ(a.cubes(n), b.cubes(n));
    EXPECT_EQ(a.declared_step, b.declared_step);
}

ErrorKind kind_of_space_read(const std::string& text) {
    std::istringstream is(text);
    try {
        read_space(is);
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "read succeeded";
    return ErrorKind::Config;
}

std::string replace_line(std::string text, const std::string& from, const std::string& to) {
    auto p = text.find(from);
    EXPECT_NE(p, std::string::npos);
    return text.replace(p, from.size(), to);
}

} // namespace

TEST(SpaceFile, RoundTripsEveryCatalogSpace) {
    for (auto& s : catalog_spaces(3, false)) {
        auto text = space_text(*s.space);
        std::istringstream is(text);
        auto back = read_space(is);
        expect_same_space(*s.space, *back);
        EXPECT_EQ(space_text(*back), text) << s.name;
    }
}

TEST(SpaceFile, SquaresOfD1Z2ListEightCubes) {
    auto text = space_text(*make_Dk(FiniteAbelianGroup::cyclic(2), 1, 3));
    std::istringstream is(text);
    std::string line;
    bool in_squares = false;
    int squares = 0;
    while (std::getline(is, line)) {
        if (line.rfind("cu ", 0) == 0 || line == "end") {
            in_squares = line == "cu 2";
            continue;
        }
        if (in_squares) ++squares;
    }
    EXPECT_EQ(squares, 8);
}

TEST(SpaceFile, MalformedInputIsStructural) {
    auto text = space_text(*make_Dk(FiniteAbelianGroup::cyclic(2), 1, 2));
    EXPECT_EQ(kind_of_space_read(replace_line(text, "nilcube-space v1", "nilcube-space v2")), ErrorKind::Structural);
    EXPECT_EQ(kind_of_space_read(replace_line(text, "nilcube-space v1", "something else")), ErrorKind::Structural);
    EXPECT_EQ(kind_of_space_read(text.substr(0, text.size() / 2)), ErrorKind::Structural);
    EXPECT_EQ(kind_of_space_read(replace_line(text, "point 1", "point 0")), ErrorKind::Structural);
    EXPECT_EQ(kind_of_space_read(replace_line(text, "cu 1\n0 0", "cu 1\n0 7")), ErrorKind::Structural);
    EXPECT_EQ(kind_of_space_read(replace_line(text, "cu 1\n0 0", "cu 1\n0 0 0")), ErrorKind::Structural);
}

TEST(SpaceFile, DeletedCubeStillReads) {
    auto D = make_Dk(FiniteAbelianGroup::cyclic(2), 1, 3);
    auto text = space_text(*D);
    auto at = text.find("cu 2\n");
    auto first = text.find('\n', at) + 1;
    auto second = text.find('\n', first) + 1;
    text.erase(first, second - first);
    std::istringstream is(text);
    auto Y = read_space(is);
    EXPECT_EQ(Y->count(2), 7u);
    EXPECT_FALSE(cs_check_axioms(*Y, 1).completion);
}

TEST(GroupFile, RoundTrip) {
    for (auto G : {heisenberg(2), heisenberg(3), cyclic_deg2(2)}) {
        std::ostringstream os;
        write_group(os, G);
        std::istringstream is(os.str());
        auto H = read_group(is);
        EXPECT_EQ(H.labels(), G.labels());
        EXPECT_EQ(H.table(), G.table());
        ASSERT_EQ(H.levels(), G.levels());
        for (std::size_t i = 0; i < G.levels(); ++i) EXPECT_EQ(H.level(i), G.level(i));
        std::ostringstream again;
        write_group(again, H);
        EXPECT_EQ(again.str(), os.str());
    }
}

TEST(CocycleFile, RoundTrip) {
    auto X = make_Dk(FiniteAbelianGroup::cyclic(3), 1, 3);
    std::mt19937 rng(5);
    std::vector<std::uint64_t> g(3);
    for (auto& x : g) x = rng() % 64;
    for (auto A : {FiniteAbelianGroup::circle(64), FiniteAbelianGroup({2, 4})}) {
        auto rho = coboundary(X, 2, A, std::vector<std::uint64_t>{g[0] % A.order(), g[1] % A.order(), g[2] % A.order()});
        std::ostringstream os;
        write_cocycle(os, rho, "d1.space");
        std::istringstream is(os.str());
        std::string ref;
        auto back = read_cocycle(is, X, &ref);
        EXPECT_EQ(ref, "d1.space");
        EXPECT_EQ(back.dim, rho.dim);
        EXPECT_EQ(back.A.descriptor(), rho.A.descriptor());
        EXPECT_EQ(back.table, rho.table);
    }
}

TEST(CocycleFile, WrongValueCountIsStructural) {
    auto X = make_Dk(FiniteAbelianGroup::cyclic(2), 1, 3);
    auto rho = zero_cocycle(X, 2, FiniteAbelianGroup::cyclic(2));
    std::ostringstream os;
    write_cocycle(os, rho, "x");
    auto text = os.str();
    auto p = text.find("value 7 ");
    ASSERT_NE(p, std::string::npos);
    text.erase(p, text.find('\n', p) + 1 - p);
    std::istringstream is(text);
    try {
        read_cocycle(is, X);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Structural);
    }
}

TEST(ExtensionFile, RoundTrip) {
    for (int nmax : {-1, 3}) {
        ExtensionFile e{"base.space", "t64", "rho.coc", nmax};
        std::ostringstream os;
        write_extension(os, e);
        std::istringstream is(os.str());
        auto back = read_extension(is);
        EXPECT_EQ(back.base, e.base);
        EXPECT_EQ(back.group, e.group);
        EXPECT_EQ(back.cocycle, e.cocycle);
        EXPECT_EQ(back.nmax, e.nmax);
    }
}

TEST(Codes, PerFactorNotation) {
    FiniteAbelianGroup A({2, 4});
    for (std::uint64_t c = 0; c < A.order(); ++c) EXPECT_EQ(parse_code(A, format_code(A, c)), c);
    auto T = FiniteAbelianGroup::circle(64);
    EXPECT_EQ(format_code(T, 16), "1/4");
    EXPECT_EQ(parse_code(T, "1/4"), 16u);
    // finite coordinates are integers mod the factor
    EXPECT_EQ(parse_code(A, "-1,5"), parse_code(A, "1,1"));
    EXPECT_THROW(parse_code(A, "1/2,0"), Error);
    EXPECT_THROW(parse_code(A, "1"), Error);
    EXPECT_THROW(parse_code(T, "1/3"), Error);
}

TEST(Report, MachineFormIsStableAndParses) {
    auto build = [] {
        Report r;
        r.set("command", "check");
        r.set("pass", true);
        r.set("points", std::uint64_t{8});
        r.set("delta", std::int64_t{-1});
        r.add_witness("corner (0 0 1)");
        r.add_witness("second");
        std::ostringstream os;
        r.write_machine(os);
        return os.str();
    };
    auto a = build(), b = build();
    EXPECT_EQ(a, b);
    std::istringstream is(a);
    auto e = parse_report(is);
    ASSERT_EQ(e.size(), 6u);
    EXPECT_EQ(e[0], (std::pair<std::string, std::string>{"command", "check"}));
    EXPECT_EQ(e[1].second, "true");
    EXPECT_EQ(e[3].second, "-1");
    EXPECT_EQ(e[4].first, "witness.0");
    std::istringstream bad("nilcube-report v2\n");
    EXPECT_THROW(parse_report(bad), Error);
}
