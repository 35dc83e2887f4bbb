#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nilcube/common.hpp"

namespace nilcube {

// A discrete-cube morphism phi: {0,1}^m -> {0,1}^n.  Each output coordinate is
// a constant, a source coordinate, or a negated source coordinate.  Cubes are
// pulled back along phi: q in Cu^n gives q o phi in Cu^m.
struct CubeMorphismSpec {
    enum class Tag : std::uint8_t { Zero, One, Coord, NegCoord };
    struct Out {
        Tag tag = Tag::Zero;
        int src = 0;
    };
    int m = 0;  // source dimension
    int n = 0;  // target dimension
    std::vector<Out> outs;  // size n

    bool well_formed() const;
    std::uint32_t image(std::uint32_t w) const;
    // Table of phi(w) for every w in {0,1}^m.
    std::vector<std::uint32_t> table() const;
    bool injective() const;
    // (this o other): first other, then this.
    CubeMorphismSpec after(const CubeMorphismSpec& other) const;
    std::string str() const;

    static CubeMorphismSpec identity(int n);
    static CubeMorphismSpec transposition(int n, int i, int j);
    static CubeMorphismSpec cycle(int n);
    static CubeMorphismSpec reflection(int n, int i);
    // {0,1}^(n-1) -> {0,1}^n onto the face x_i = value.
    static CubeMorphismSpec face(int n, int i, int value);
    // {0,1}^(n-1) -> {0,1}^n duplicating coordinate n-2 into n-1.
    static CubeMorphismSpec diagonal(int n);
    // {0,1}^(n+1) -> {0,1}^n forgetting the last coordinate.
    static CubeMorphismSpec degeneration(int n);
};

// Pull back: out[w] = f[phi(w)].
template <class T>
std::vector<T> pull_back(const CubeMorphismSpec& phi, const std::vector<T>& f) {
    std::vector<T> out(std::size_t(1) << phi.m);
    for (std::uint32_t w = 0; w < out.size(); ++w) out[w] = f[phi.image(w)];
    return out;
}

// The vertices of a d-dimensional face of {0,1}^n, in local order.
struct Face {
    std::uint32_t free_mask = 0;
    std::uint32_t fixed_values = 0;
    std::vector<std::uint32_t> verts;
};

std::vector<Face> faces(int n, int d);

// Arrow concatenation <q0, q1>_i on {0,1}^(n+i): vertex v + 2^n w carries
// q0(v) if w = 0 and q1(v) otherwise.
template <class T>
std::vector<T> arrow(int n, int i, const std::vector<T>& q0, const std::vector<T>& q1) {
    std::size_t V = std::size_t(1) << n;
    std::vector<T> out(V << i);
    for (std::size_t w = 0; w < (std::size_t(1) << i); ++w)
        for (std::size_t v = 0; v < V; ++v) out[v + (w << n)] = w ? q1[v] : q0[v];
    return out;
}

} // namespace nilcube
