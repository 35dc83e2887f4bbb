#include "nilcube/linalg.hpp"

#include <algorithm>
#include <utility>

#include "nilcube/common.hpp"

namespace nilcube {

IntMatrix zero_matrix(std::size_t rows, std::size_t cols) {
    return IntMatrix(rows, std::vector<BigInt>(cols, 0));
}

IntMatrix identity_matrix(std::size_t n) {
    IntMatrix m = zero_matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
    std::size_t r = a.size(), inner = b.size(), c = b.empty() ? 0 : b[0].size();
    IntMatrix out = zero_matrix(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t k = 0; k < inner; ++k) {
            if (a[i][k] == 0) continue;
            for (std::size_t j = 0; j < c; ++j) out[i][j] += a[i][k] * b[k][j];
        }
    return out;
}

BigInt mod_floor(const BigInt& a, const BigInt& m) {
    BigInt r = a % m;
    if (r < 0) r += m;
    return r;
}

namespace {

BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

struct Work {
    IntMatrix A, U, V, Vinv;
    std::vector<BigInt> rhs;  // transformed like the columns of U
    std::size_t rows, cols;
    bool keep_u = true;

    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        std::swap(A[i], A[j]);
        if (keep_u) std::swap(U[i], U[j]);
        if (!rhs.empty()) std::swap(rhs[i], rhs[j]);
    }
    void swap_cols(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (auto& row : A) std::swap(row[i], row[j]);
        for (auto& row : V) std::swap(row[i], row[j]);
        std::swap(Vinv[i], Vinv[j]);
    }
    // row_i -= q * row_j
    void row_sub(std::size_t i, std::size_t j, const BigInt& q) {
        if (q == 0) return;
        for (std::size_t c = 0; c < cols; ++c) A[i][c] -= q * A[j][c];
        if (keep_u)
            for (std::size_t c = 0; c < rows; ++c) U[i][c] -= q * U[j][c];
        if (!rhs.empty()) rhs[i] -= q * rhs[j];
    }
    // col_i -= q * col_j
    void col_sub(std::size_t i, std::size_t j, const BigInt& q) {
        if (q == 0) return;
        for (std::size_t r = 0; r < rows; ++r) A[r][i] -= q * A[r][j];
        for (std::size_t r = 0; r < cols; ++r) V[r][i] -= q * V[r][j];
        for (std::size_t c = 0; c < cols; ++c) Vinv[j][c] += q * Vinv[i][c];
    }
    void negate_row(std::size_t i) {
        for (auto& x : A[i]) x = -x;
        if (keep_u)
            for (auto& x : U[i]) x = -x;
        if (!rhs.empty()) rhs[i] = -rhs[i];
    }
};

// Diagonalizes w.A in place; returns the rank.
std::size_t diagonalize(Work& w) {
    std::size_t t = 0;
    for (; t < std::min(w.rows, w.cols); ++t) {
        while (true) {
            // Smallest nonzero entry of the remaining block becomes the pivot.
            bool found = false;
            std::size_t pr = t, pc = t;
            BigInt best;
            for (std::size_t r = t; r < w.rows; ++r)
                for (std::size_t c = t; c < w.cols; ++c) {
                    if (w.A[r][c] == 0) continue;
                    BigInt v = abs(w.A[r][c]);
                    if (!found || v < best) {
                        found = true;
                        best = v;
                        pr = r;
                        pc = c;
                    }
                }
            if (!found) return t;
            w.swap_rows(t, pr);
            w.swap_cols(t, pc);
            if (w.A[t][t] < 0) w.negate_row(t);
            bool clean = true;
            for (std::size_t r = t + 1; r < w.rows; ++r) {
                if (w.A[r][t] == 0) continue;
                w.row_sub(r, t, floor_div(w.A[r][t], w.A[t][t]));
                if (w.A[r][t] != 0) clean = false;
            }
            for (std::size_t c = t + 1; c < w.cols; ++c) {
                if (w.A[t][c] == 0) continue;
                w.col_sub(c, t, floor_div(w.A[t][c], w.A[t][t]));
                if (w.A[t][c] != 0) clean = false;
            }
            if (clean) break;
        }
    }
    return t;
}

Work make_work(const IntMatrix& a, bool keep_u) {
    Work w;
    w.rows = a.size();
    w.cols = a.empty() ? 0 : a[0].size();
    w.A = a;
    w.keep_u = keep_u;
    if (keep_u) w.U = identity_matrix(w.rows);
    w.V = identity_matrix(w.cols);
    w.Vinv = identity_matrix(w.cols);
    return w;
}

} // namespace

SmithDecomposition smith_decompose(const IntMatrix& a, bool with_u) {
    Work w = make_work(a, with_u);
    SmithDecomposition out;
    out.rank = diagonalize(w);
    out.U = std::move(w.U);
    out.D = std::move(w.A);
    out.V = std::move(w.V);
    out.Vinv = std::move(w.Vinv);
    return out;
}

std::vector<BigInt> smith_invariants(const IntMatrix& a) {
    auto sd = smith_decompose(a, false);
    std::vector<BigInt> d;
    for (std::size_t i = 0; i < sd.rank; ++i) d.push_back(abs(sd.D[i][i]));
    // Restore the divisibility chain with gcd/lcm exchanges; each exchange
    // preserves the cokernel.
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < d.size(); ++i)
            for (std::size_t j = i + 1; j < d.size(); ++j) {
                if (d[j] % d[i] == 0) continue;
                BigInt g = gcd(d[i], d[j]);
                BigInt l = d[i] / g * d[j];
                d[i] = g;
                d[j] = l;
                changed = true;
            }
    }
    return d;
}

std::optional<std::vector<BigInt>> solve_mod(const IntMatrix& a, const std::vector<BigInt>& b, const BigInt& m) {
    std::size_t rows = a.size(), cols = a.empty() ? 0 : a[0].size();
    if (b.size() != rows) throw Error(ErrorKind::Structural, "solve_mod: shape mismatch");
    Work w = make_work(a, false);
    w.rhs = b;
    std::size_t rank = diagonalize(w);
    // D z = U b (mod m), then y = V z.
    std::vector<BigInt> c(rows, 0);
    for (std::size_t i = 0; i < rows; ++i) c[i] = mod_floor(w.rhs[i], m);
    struct {
        const IntMatrix& D;
        const IntMatrix& V;
        std::size_t rank;
    } sd{w.A, w.V, rank};
    std::vector<BigInt> z(cols, 0);
    for (std::size_t i = 0; i < rows; ++i) {
        BigInt d = i < sd.rank ? BigInt(mod_floor(sd.D[i][i], m)) : BigInt(0);
        if (d == 0) {
            if (c[i] != 0) return std::nullopt;
            continue;
        }
        BigInt g = gcd(d, m);
        if (c[i] % g != 0) return std::nullopt;
        // Solve d z = c (mod m) via the inverse of d/g modulo m/g.
        BigInt mg = m / g, dg = d / g, cg = c[i] / g;
        BigInt inv = 0;
        if (mg == 1) {
            z[i] = 0;
            continue;
        }
        BigInt r0 = mg, r1 = mod_floor(dg, mg), s0 = 0, s1 = 1;
        while (r1 != 0) {
            BigInt q = r0 / r1;
            BigInt tmp = r0 - q * r1;
            r0 = r1;
            r1 = tmp;
            tmp = s0 - q * s1;
            s0 = s1;
            s1 = tmp;
        }
        inv = mod_floor(s0, mg);
        z[i] = mod_floor(inv * cg, mg);
    }
    std::vector<BigInt> y(cols, 0);
    for (std::size_t i = 0; i < cols; ++i) {
        for (std::size_t j = 0; j < cols; ++j) y[i] += sd.V[i][j] * z[j];
        y[i] = mod_floor(y[i], m);
    }
    return y;
}

} // namespace nilcube
