#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace nilcube {

using BigInt = boost::multiprecision::cpp_int;
using IntMatrix = std::vector<std::vector<BigInt>>;

IntMatrix zero_matrix(std::size_t rows, std::size_t cols);
IntMatrix identity_matrix(std::size_t n);
IntMatrix multiply(const IntMatrix& a, const IntMatrix& b);

// U * A * V = D with U, V unimodular and D diagonal (not necessarily in
// divisibility order).  Vinv is the inverse of V.
struct SmithDecomposition {
    IntMatrix U, D, V, Vinv;
    std::size_t rank = 0;
};

// U is left empty when with_u is false.
SmithDecomposition smith_decompose(const IntMatrix& a, bool with_u = true);

// Diagonal of the Smith normal form proper: d_1 | d_2 | ... | d_r, all
// positive, followed by nothing for the zero part.
std::vector<BigInt> smith_invariants(const IntMatrix& a);

// Solves A y = b (mod m).  Returns nullopt when no solution exists.
std::optional<std::vector<BigInt>> solve_mod(const IntMatrix& a, const std::vector<BigInt>& b,
                                             const BigInt& m);

BigInt mod_floor(const BigInt& a, const BigInt& m);

} // namespace nilcube
