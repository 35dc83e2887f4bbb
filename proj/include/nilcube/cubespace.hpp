#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nilcube/cube.hpp"
#include "nilcube/groups.hpp"
#include "nilcube/search.hpp"
#include "nilcube/space.hpp"

namespace nilcube {

struct AxiomReport {
    int k = 0;
    int nmax = 0;
    bool cu0 = true;
    bool ergodic = true;
    bool composition = true;
    bool completion = true;
    bool k_step = true;
    bool face_criterion = true;
    std::optional<int> minimal_step;
    std::vector<std::uint64_t> corners;      // per dimension, 0 where not enumerated
    std::vector<std::string> witnesses;

    bool all_pass() const { return cu0 && ergodic && composition && completion && k_step && face_criterion; }
};

// Nilspace axioms up to X.nmax(): ergodicity, closure under discrete-cube
// morphisms, corner completion for n <= k+1 with uniqueness at k+1, and for
// n > k+1 the identity Cu^n = {f : every (k+1)-face of f is a cube}.
AxiomReport cs_check_axioms(const Cubespace& X, int k);

// Corners are given as values on {0,1}^n minus the all-ones vertex.
bool is_corner(const Cubespace& X, int n, const std::vector<Point>& corner);
std::vector<Point> complete_corner(const Cubespace& X, int n, const std::vector<Point>& corner);

// Cu^n(D_k(A)) = {f : sigma_{k+1}(f|F) = 0 on every (k+1)-face F}.
CubespacePtr make_Dk(const FiniteAbelianGroup& A, int k, int nmax);
// Membership in Cu^n(D_k(A)) straight from the face characterization.
bool dk_contains(const FiniteAbelianGroup& A, int k, int n, const std::vector<std::uint64_t>& f);

CubespacePtr arrow_space(const Cubespace& X, int i);
CubespacePtr point_space(int nmax);
// Same cubes with points renamed through perm (new index of old point p is perm[p]).
CubespacePtr relabel(const Cubespace& X, const std::vector<Point>& perm);
// Product cubespace with points x*|Y| + y.
CubespacePtr product(const Cubespace& X, const Cubespace& Y);

bool is_morphism(const Cubespace& src, const Cubespace& tgt, const std::vector<Point>& map, int nmax,
                 std::string* witness = nullptr);

// A subset P of {0,1}^N with the cubes inherited from {0,1}^N: the maps
// {0,1}^m -> P that are discrete-cube morphisms.  Only the maximal injective
// ones are kept; every other cube of P factors through them.
struct Subcubespace {
    int N = 0;
    std::vector<std::uint32_t> verts;  // sorted vertex indices of {0,1}^N
    std::vector<CubeConstraint> maximal;  // slots are positions in verts
    std::optional<std::size_t> local(std::uint32_t vertex) const;
    int max_dim() const;
};

Subcubespace make_subcubespace(int N, std::vector<std::uint32_t> verts);

// All morphisms g: P -> X with g = f on the fixed vertices (fixed[i] >= 0
// pins verts[i]).  Throws Error(Precondition) when f is not a morphism on
// the fixed part.
std::vector<std::vector<Point>> hom_set(const Subcubespace& P, const std::vector<std::int64_t>& fixed,
                                        const Cubespace& X);
std::uint64_t hom_count(const Subcubespace& P, const std::vector<std::int64_t>& fixed, const Cubespace& X);
bool hom_exists(const Subcubespace& P, const std::vector<std::int64_t>& fixed, const Cubespace& X);

// Tricube T_n = {-1,0,1}^n inside {0,1}^(2n): coordinate value 0 -> (0,0),
// 1 -> (1,0), -1 -> (0,1).
struct Tricube {
    int n = 0;
    Subcubespace space;
    std::vector<std::uint32_t> omega;             // local index of omega(v), omega(v)_i = (-1)^(v_i)
    std::vector<std::vector<std::uint32_t>> psi;  // psi[v][w]: local index of Psi_v(w) = (-1)^(v_i) (1 - w_i)
    std::uint32_t center = 0;
    std::vector<std::vector<int>> coords;          // coordinates in {-1,0,1} per local index
};

Tricube make_tricube(int n);

} // namespace nilcube
