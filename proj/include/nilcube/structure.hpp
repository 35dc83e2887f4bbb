#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nilcube/cubespace.hpp"
#include "nilcube/filtered.hpp"
#include "nilcube/groups.hpp"

namespace nilcube {

struct CanonicalPartition {
    int k = 0;
    std::vector<Point> block_of;             // point -> block index
    std::vector<std::vector<Point>> blocks;  // ordered by least element
};

// x ~_k y iff some (k+1)-cube is x at 0 and y everywhere else.
CanonicalPartition simk(const Cubespace& X, int k);

struct Morphism {
    CubespacePtr source, target;
    std::vector<Point> map;
};

struct FactorResult {
    CubespacePtr space;
    Morphism projection;
};

FactorResult factor(const CubespacePtr& X, int k);
// Factor space from an already computed partition.
FactorResult factor_by(const CubespacePtr& X, const CanonicalPartition& part);

// Abelian group on elements 0..n-1 given by its addition table.
struct AbelianTable {
    std::size_t n = 1;
    std::vector<std::uint32_t> add{0};
    std::vector<std::uint32_t> neg{0};
    std::uint32_t zero = 0;
    std::vector<std::string> labels{"0"};

    std::uint32_t plus(std::uint32_t a, std::uint32_t b) const { return add[std::size_t(a) * n + b]; }
    std::uint32_t minus(std::uint32_t a, std::uint32_t b) const { return plus(a, neg[b]); }
    std::vector<std::uint64_t> invariant_factors() const;
    FiniteAbelianGroup abstract() const { return FiniteAbelianGroup(invariant_factors()); }
    std::uint32_t sigma(int k, const std::vector<std::uint32_t>& f) const;
    // Checks group axioms; returns a description of the first failure.
    std::optional<std::string> validate() const;
    static AbelianTable from_group(const FiniteAbelianGroup& A);
};

// Cu^n(D_k(A)) for a table group, points = elements.
CubespacePtr make_Dk_table(const AbelianTable& A, int k, int nmax);
bool dk_contains_table(const AbelianTable& A, int k, int n, const std::vector<std::uint32_t>& f);

// Level-k structure group acting on the fibres of X_k -> X_{k-1}.
struct StructureGroup {
    int level = 0;
    CubespacePtr space;                  // X_k
    AbelianTable group;                  // elements = points of the base fibre
    std::vector<Point> element_point;    // element -> point of X_k in the base fibre
    std::vector<std::uint32_t> action;   // action[y * |A| + a] = y + a
    std::vector<std::uint32_t> diff;     // diff[y1 * |X_k| + y2] = a with y2 + a = y1, or kNone
    CanonicalPartition fibres;           // ~_{k-1} on X_k
    bool fibre_independent = true;       // same invariant factors on every fibre
    static constexpr std::uint32_t kNone = 0xffffffffu;
};

StructureGroup structure_group(const CubespacePtr& X, int k);
// Invariant factors of the group law built on each ~_{k-1} fibre of X.
std::vector<std::vector<std::uint64_t>> fibre_invariant_factors(const Cubespace& X, int k);

// A k-fold ergodic k-step space (every map {0,1}^k -> X is a cube) is D_k(A)
// once points are transported to group elements by x -> x - e.
struct ErgodicClassification {
    bool kfold_ergodic = false;
    AbelianTable group;
    std::vector<std::uint32_t> transport;  // point -> element
    bool cubes_equal = false;
    std::string witness;
};

ErgodicClassification classify_kfold_ergodic(const CubespacePtr& X, int k);

struct BundleLevel {
    CubespacePtr space;          // X_i
    std::vector<Point> proj;     // X -> X_i
    std::vector<Point> down;     // X_i -> X_{i-1} (empty at i = 0)
    std::optional<StructureGroup> group;  // for i >= 1
};

struct BundleDecomposition {
    int k = 0;
    std::vector<BundleLevel> levels;        // 0..k
    std::vector<FiniteAbelianGroup> groups;  // A_1..A_k (index 0 unused, trivial)
    std::size_t rank = 0;
    bool tower_consistent = true;
    bool actions_ok = true;
    bool difference_condition = true;
    std::vector<std::string> witnesses;
    bool ok() const { return tower_consistent && actions_ok && difference_condition; }
};

// k < 0 uses the declared step of X.
BundleDecomposition bundle_decompose(const CubespacePtr& X, int k = -1);

// Cubes q, q' of X_i over the same cube of X_{i-1} differ by a cube of
// D_i(A_i), and every such translate is a cube.
bool check_difference_condition(const BundleDecomposition& B, int i, int n, std::string* witness = nullptr);

struct MorphismReport {
    bool is_morphism = false;
    bool fibre_surjective = false;
    bool point_fibres_uniform = false;
    bool cube_fibres_uniform = false;
    bool measure_preserving = false;
    std::uint64_t point_fibre = 0;
    std::vector<std::uint64_t> cube_fibre;  // per dimension, 0 when not uniform
    std::vector<std::string> notes;
};

// levels < 0: check fibre-surjectivity at every level up to the larger
// declared step of source and target.
MorphismReport morphism_check(const Morphism& phi, int levels = -1);

struct GoodPairReport {
    bool p1_extension = true;
    bool p12_extension = true;
    bool dk_condition = true;
    bool surjective = true;
    bool uniform_fibres = true;
    std::uint64_t domain = 0, codomain = 0, fibre = 0;
    std::vector<std::string> notes;
    bool ok() const { return p1_extension && p12_extension && dk_condition && surjective && uniform_fibres; }
};

// P1, P2 are global vertex sets inside P; f gives the values on P1 (in
// increasing vertex order).  Targets for the extension checks are X and the
// D_i(A_i) of its tower.
GoodPairReport good_pair_check(const Subcubespace& P, const std::vector<std::uint32_t>& P1,
                               const std::vector<std::uint32_t>& P2, const BundleDecomposition& tower,
                               const std::vector<Point>& f);

struct InverseSystemReport {
    bool identities = true;
    bool compositions = true;
    bool fibre_surjective = true;
    std::vector<std::string> notes;
    bool strict() const { return identities && compositions && fibre_surjective; }
};

// transitions[{i, j}] : X_j -> X_i for i <= j.
InverseSystemReport verify_inverse_system(const std::vector<CubespacePtr>& spaces,
                                          const std::map<std::pair<int, int>, std::vector<Point>>& transitions);

} // namespace nilcube
