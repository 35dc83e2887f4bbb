#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nilcube/cubespace.hpp"
#include "nilcube/groups.hpp"
#include "nilcube/structure.hpp"

namespace nilcube {

// rho: Cu^dim(X) -> A, one value (group code) per cube in canonical order.
// Extensions built from rho have degree dim - 1.
struct Cocycle {
    CubespacePtr base;
    int dim = 1;
    FiniteAbelianGroup A;
    std::vector<std::uint64_t> table;

    std::uint64_t at(Key q) const;
    std::uint64_t at(const std::vector<Point>& q) const { return at(base->pack(dim, q)); }
    TorusValue value(std::size_t idx) const { return to_value(A, table[idx]); }
};

Cocycle zero_cocycle(const CubespacePtr& X, int dim, const FiniteAbelianGroup& A);
// q -> sigma_dim(g o q) with g given as group codes per point.
Cocycle coboundary(const CubespacePtr& X, int dim, const FiniteAbelianGroup& A, const std::vector<std::uint64_t>& g);
// Same values re-encoded in a group that contains them (e.g. Z/64 inside Z/256).
Cocycle recode(const Cocycle& rho, const FiniteAbelianGroup& A);
Cocycle add(const Cocycle& a, const Cocycle& b);

struct CocycleReport {
    bool automorphism = true;
    bool concatenation = true;
    std::uint64_t checked_pairs = 0;
    std::vector<std::string> violations;
    bool ok() const { return automorphism && concatenation; }
};

// Automorphisms: rho(q o psi) = (-1)^(reflections of psi) rho(q), checked on
// a generating set.  Concatenation along the last axis: q1, q2 with
// q1(v,1) = q2(v,0) glue to q3 and rho(q3) = rho(q1) + rho(q2).
CocycleReport cocycle_verify(const Cocycle& rho, std::size_t max_violations = 16);

enum class SolvePath { Averaging, Linear };

struct CoboundarySolution {
    SolvePath path = SolvePath::Averaging;
    std::vector<TorusValue> g;  // one value per point; may leave A (averages)
};

// g(x) = concentrated average of rho over the cubes rooted at x, accepted only
// when sigma(g o q) reproduces rho on every cube.
std::optional<CoboundarySolution> coboundary_by_averaging(const Cocycle& rho);
// Linear system rho(q) = sigma(g o q) over each cyclic factor of A.
std::optional<CoboundarySolution> coboundary_by_linear(const Cocycle& rho);
// Averaging first, then the linear path.
std::optional<CoboundarySolution> coboundary_solve(const Cocycle& rho);
bool is_coboundary_of(const Cocycle& rho, const std::vector<TorusValue>& g);

// M(rho): points (x, z) with index x * |A| + z, standing for rho_x + z.
struct Extension {
    Cocycle rho;
    CubespacePtr space;

    std::size_t fibre() const { return rho.A.order(); }
    Point point(Point x, std::uint64_t z) const { return static_cast<Point>(x * fibre() + z); }
    Point base_of(Point p) const { return static_cast<Point>(p / fibre()); }
    std::uint64_t offset_of(Point p) const { return p % fibre(); }
    std::vector<Point> projection() const;
    // Direct cube test, independent of the materialized cube sets.
    bool contains(int n, const std::vector<Point>& f) const;
};

// Throws Error(Precondition) when rho fails verification.  nmax < 0 takes
// the base's n_max, reduced if the cubes would not pack.
Extension build_extension(const Cocycle& rho, int nmax = -1);

// A nilspace Y over X whose fibres carry a free transitive action of A.
struct AbstractExtension {
    CubespacePtr total, base;
    std::vector<Point> proj;
    FiniteAbelianGroup A;
    std::vector<Point> act;  // act[y * |A| + a] = y + a
    int degree = 1;

    // a with y2 + a = y1 (both in one fibre).
    std::uint64_t diff(Point y1, Point y2) const;
};

AbstractExtension as_abstract(const Extension& M);
// Split extension X x D_degree(A).
AbstractExtension split_extension(const CubespacePtr& X, const FiniteAbelianGroup& A, int degree);
// Checks the action tables and that proj is a morphism.
void validate_abstract(const AbstractExtension& E);

// rho_s(q) = sigma(s o q - q') for any lift q' of q; every lift is checked.
Cocycle cocycle_from_section(const AbstractExtension& E, const std::vector<Point>& section);

// theta(y) = (pi(y), y - s(pi(y))) into M(rho_s), verified as a bijection that
// is a morphism in both directions.  Throws Error(NotIsomorphic) otherwise.
struct ThetaResult {
    Extension target;
    std::vector<Point> map;
};
ThetaResult extension_theta(const AbstractExtension& E, const std::vector<Point>& section);

struct TricubeReport {
    std::uint64_t cubes = 0;
    std::uint64_t pairs = 0;
    std::uint64_t empty_hom_sets = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty() && empty_hom_sets == 0; }
};

// rho(q) = sum_v (-1)^|v| rho(t o Psi_v) for every cube q and every
// t: T_dim -> X with t o omega = q.
TricubeReport tricube_verify(const Cocycle& rho, std::size_t max_violations = 16);

struct AveragedCocycle {
    Cocycle rho;               // values in a refined coefficient group
    Distance shift;            // max d2(rho'(q), rho(q))
    Distance fibre_diameter;   // max d2 diameter of rho over one beta-fibre
};

// rho'(q) = average of rho over the cubes q' with beta o q' = beta o q.
AveragedCocycle average_cocycle(const Cocycle& rho, const Morphism& beta);

struct RectifyResult {
    Extension target;                 // M over a refined coefficient group
    std::vector<Point> map;           // phi4 into target.space
    std::vector<TorusValue> offsets;  // z-part of phi4 per source point
};

// phi2: S -> X (base of M), phi3: S -> M.space with pi o phi3 = phi2.
// phi4(x) = phi3(x) + E_{q in Cu^dim_x(S)} [comp0(q) - phi3(x)].
RectifyResult rectify_lifted_map(const Extension& M, const CubespacePtr& S, const std::vector<Point>& phi2,
                                 const std::vector<Point>& phi3);

struct CohomologyResult {
    std::vector<std::uint64_t> invariant_factors;  // of H
    std::uint64_t order = 1;
    std::uint64_t cocycles = 1;     // |Z|
    std::uint64_t coboundaries = 1; // |B|
};

CohomologyResult cohomology(const CubespacePtr& X, int dim, const FiniteAbelianGroup& A);

} // namespace nilcube
