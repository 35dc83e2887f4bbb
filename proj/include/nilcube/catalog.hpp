#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nilcube/cocycles.hpp"
#include "nilcube/cubespace.hpp"
#include "nilcube/structure.hpp"

namespace nilcube {

// Named space generators used by the command line and the test suites.
struct SpaceSpec {
    std::string kind = "dk";   // dk | heis | cyclic-deg2 | quotient | point | file
    std::string group = "[2]"; // dk coefficient group
    int step = 1;              // dk degree
    std::uint64_t p = 2;       // heis modulus
    std::uint64_t N = 2;       // cyclic-deg2 parameter
    std::string file;          // space file, or group file for quotient
    std::string gamma;         // quotient: comma separated element labels of Gamma
    int nmax = 3;
};

CubespacePtr make_space(const SpaceSpec& spec);

struct NamedSpace {
    std::string name;
    CubespacePtr space;
};

// D1(Z/2), D1(Z/3), D2(Z/2), D2(Z/3), heis(2), cyclic-deg2(2), and heis(3)
// when with_heis3 is set.
std::vector<NamedSpace> catalog_spaces(int nmax, bool with_heis3);

struct NamedMorphism {
    std::string name;
    Morphism phi;
    bool fibre_surjective_expected = true;
};

std::vector<NamedMorphism> catalog_morphisms(int nmax);

struct NamedExtension {
    std::string key;
    std::string name;
    AbstractExtension ext;
};

// Top level of a bundle decomposition as an extension of X_{k-1} by A_k.
AbstractExtension extension_from_bundle(const BundleDecomposition& B);
// D1(Z/N^2) over D1(Z/N) by Z/N, acting as y -> y + N a.
AbstractExtension cyclic_reduction_extension(std::uint64_t N, int nmax);

std::vector<NamedExtension> catalog_extensions(int nmax);

// Element of the table group for each code of table.abstract().
std::vector<std::uint32_t> table_embedding(const AbelianTable& table);

// Reduction D_k(Z/(a)) -> D_k(Z/(b)) for b | a.
Morphism reduction_morphism(std::uint64_t a, std::uint64_t b, int k, int nmax);

} // namespace nilcube
