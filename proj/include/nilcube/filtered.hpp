#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nilcube/groups.hpp"
#include "nilcube/space.hpp"

namespace nilcube {

using Elem = std::uint32_t;

// Finite group with a precomputed multiplication table and a filtration
// G = G_0 = G_1 >= G_2 >= ... >= G_s = {id}.  Levels beyond s are trivial.
class FilteredGroup {
public:
    FilteredGroup(std::vector<std::string> labels, std::vector<Elem> table,
                  std::vector<std::vector<Elem>> filtration);

    std::size_t order() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<Elem>& table() const { return table_; }
    Elem mul(Elem a, Elem b) const { return table_[std::size_t(a) * order() + b]; }
    Elem inv(Elem a) const { return inv_[a]; }
    Elem identity() const { return id_; }
    Elem commutator(Elem a, Elem b) const { return mul(mul(inv(a), inv(b)), mul(a, b)); }

    // Number of stored levels (G_0 .. G_{levels-1}); G_i = {id} for i >= levels.
    std::size_t levels() const { return filtration_.size(); }
    // Degree of the filtration: largest i with G_i nontrivial.
    int degree() const;
    const std::vector<Elem>& level(std::size_t i) const;
    bool in_level(Elem g, std::size_t i) const;

    std::string name;

private:
    std::vector<std::string> labels_;
    std::vector<Elem> table_;
    std::vector<Elem> inv_;
    Elem id_ = 0;
    std::vector<std::vector<Elem>> filtration_;
    std::vector<std::vector<bool>> member_;
    std::vector<Elem> trivial_;
};

struct FiltrationViolation {
    std::size_t i, j;
    Elem a, b;
};

struct FiltrationReport {
    bool valid = true;
    std::vector<FiltrationViolation> violations;
};

// Checks [G_i, G_j] <= G_{i+j}.  Non-subgroups, a non-descending chain, or a
// G_1 different from G throw Error(Structural).
FiltrationReport filt_validate(const FilteredGroup& G);

// Upper faces F(v_i) of {0,1}^n in colex order; v_i is the integer i.
struct FaceDecomposition {
    int n = 0;
    std::vector<std::uint32_t> faces;  // v_i
    std::vector<int> codims;           // |v_i|
    static FaceDecomposition make(int n);
};

struct HKFactorization {
    std::vector<Elem> coefficients;
};

struct HKResult {
    std::optional<HKFactorization> factorization;
    std::size_t reject_index = 0;  // first i with g_i outside G_{codim}
};

HKResult hk_factorize(const FilteredGroup& G, int n, const std::vector<Elem>& q);
std::vector<Elem> hk_recompose(const FilteredGroup& G, int n, const HKFactorization& f);
std::uint64_t hk_count(const FilteredGroup& G, int n);
// Visits every element of Cu^n(G) once.  Throws Error(Budget) when the count
// exceeds the configured cube budget.
void hk_for_each(const FilteredGroup& G, int n, const std::function<void(const std::vector<Elem>&)>& visit);
std::vector<std::vector<Elem>> hk_enumerate(const FilteredGroup& G, int n);

// Cubespace on the left cosets g*Gamma with cubes the projected Host-Kra cubes.
CubespacePtr quotient_nilspace(const FilteredGroup& G, const std::vector<Elem>& gamma, int nmax);
// Coset index of every element under the quotient above (points ordered by
// their minimal element).
std::vector<Point> coset_map(const FilteredGroup& G, const std::vector<Elem>& gamma);

// Catalog groups.
FilteredGroup heisenberg(std::uint64_t N);
FilteredGroup cyclic_deg2(std::uint64_t N);
// Abelian group A with G_0 = ... = G_k = A, G_{k+1} = 0.
FilteredGroup abelian_filtered(const FiniteAbelianGroup& A, int k);
FilteredGroup abelian_filtered_from_table(std::vector<std::string> labels, const std::vector<Elem>& add_table, int k);

std::string element_label(const FiniteAbelianGroup& A, std::uint64_t code);

} // namespace nilcube
