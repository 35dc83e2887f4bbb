#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nilcube/cubespace.hpp"
#include "nilcube/structure.hpp"

namespace nilcube {

using PointMap = std::vector<Point>;

struct TranslationVerdict {
    bool ok = true;
    int cap = 0;  // largest n with <q, alpha o q>_i checked
    std::string witness;
};

// <q, alpha o q>_i in Cu^(n+i) for every q in Cu^n, n <= n_max - i.
// Throws Error(Precondition) when alpha is not a bijection.
TranslationVerdict is_translation(const Cubespace& X, const PointMap& alpha, int i);

struct TranslationSet {
    std::vector<PointMap> maps;  // lexicographic order
    bool exhaustive = false;
    int cap = 0;
};

// All bijections when |X| is within the permutation budget; otherwise the
// closure of the generators (top structure-group shifts plus `extra`) under
// composition, filtered by the arrow condition.
TranslationSet translations_enumerate(const CubespacePtr& X, int i, const std::vector<PointMap>& extra = {});

// Shifts x -> x + a by the top structure group, one per a.
std::vector<PointMap> top_shifts(const BundleDecomposition& B);

struct TransHReport {
    bool well_defined = true;
    PointMap h;                 // induced map on X_{k-1}
    bool h_translation = false;
    bool in_kernel = false;     // h = id
    bool fibre_constant = false;  // alpha acts on each fibre by one shift
    std::vector<std::uint32_t> alpha_prime;  // X_{k-1} -> A_k, when in the kernel
    bool alpha_prime_hom = false;  // alpha' in hom(X_{k-1}, D_{k-i}(A_k))
    std::string note;
};

TransHReport trans_h(const BundleDecomposition& B, const PointMap& alpha, int i);

// alpha(x) = x + f(pi(x)) for f: X_{k-1} -> A_k.
PointMap kernel_map(const BundleDecomposition& B, const std::vector<std::uint32_t>& f);
bool in_hom_dk(const BundleDecomposition& B, const std::vector<std::uint32_t>& f, int degree);

struct KernelCriterionReport {
    std::uint64_t maps = 0;
    std::uint64_t translations = 0;
    std::uint64_t homs = 0;
    std::uint64_t disagreements = 0;
    bool ok() const { return disagreements == 0; }
};

// Runs over every f: X_{k-1} -> A_k and compares "kernel_map(f) is a
// translation of height i" with "f in hom(X_{k-1}, D_{k-i}(A_k))".
KernelCriterionReport kernel_criterion_check(const BundleDecomposition& B, int i);

enum class TauVerdict { Equal, Different, Inconclusive };

struct TauReport {
    TauVerdict verdict = TauVerdict::Inconclusive;
    std::size_t translations = 0;
    std::size_t shifts = 0;
    int cap = 0;
};

TauReport check_transk_tau(const CubespacePtr& X, int k = -1);

const char* tau_verdict_name(TauVerdict v);

} // namespace nilcube
