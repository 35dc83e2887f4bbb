#include "nilcube/cube.hpp"

namespace nilcube {

bool CubeMorphismSpec::well_formed() const {
    if (m < 0 || n < 0 || static_cast<int>(outs.size()) != n) return false;
    for (auto& o : outs)
        if ((o.tag == Tag::Coord || o.tag == Tag::NegCoord) && (o.src < 0 || o.src >= m)) return false;
    return true;
}

std::uint32_t CubeMorphismSpec::image(std::uint32_t w) const {
    std::uint32_t v = 0;
    for (int j = 0; j < n; ++j) {
        std::uint32_t b = 0;
        switch (outs[j].tag) {
        case Tag::Zero: b = 0; break;
        case Tag::One: b = 1; break;
        case Tag::Coord: b = (w >> outs[j].src) & 1u; break;
        case Tag::NegCoord: b = ((w >> outs[j].src) & 1u) ^ 1u; break;
        }
        v |= b << j;
    }
    return v;
}

std::vector<std::uint32_t> CubeMorphismSpec::table() const {
    std::vector<std::uint32_t> t(std::size_t(1) << m);
    for (std::uint32_t w = 0; w < t.size(); ++w) t[w] = image(w);
    return t;
}

bool CubeMorphismSpec::injective() const {
    std::vector<bool> used(m, false);
    for (auto& o : outs)
        if (o.tag == Tag::Coord || o.tag == Tag::NegCoord) used[o.src] = true;
    for (bool u : used)
        if (!u) return false;
    return true;
}

CubeMorphismSpec CubeMorphismSpec::after(const CubeMorphismSpec& other) const {
    if (other.n != m) throw Error(ErrorKind::Structural, "cube morphism dimensions do not compose");
    CubeMorphismSpec r;
    r.m = other.m;
    r.n = n;
    r.outs.resize(n);
    for (int j = 0; j < n; ++j) {
        const Out& o = outs[j];
        if (o.tag == Tag::Zero || o.tag == Tag::One) {
            r.outs[j] = o;
            continue;
        }
        Out inner = other.outs[o.src];
        if (o.tag == Tag::NegCoord) {
            switch (inner.tag) {
            case Tag::Zero: inner.tag = Tag::One; break;
            case Tag::One: inner.tag = Tag::Zero; break;
            case Tag::Coord: inner.tag = Tag::NegCoord; break;
            case Tag::NegCoord: inner.tag = Tag::Coord; break;
            }
        }
        r.outs[j] = inner;
    }
    return r;
}

std::string CubeMorphismSpec::str() const {
    std::string s = std::to_string(m) + "->" + std::to_string(n) + ":";
    for (auto& o : outs) {
        switch (o.tag) {
        case Tag::Zero: s += " 0"; break;
        case Tag::One: s += " 1"; break;
        case Tag::Coord: s += " x" + std::to_string(o.src); break;
        case Tag::NegCoord: s += " ~x" + std::to_string(o.src); break;
        }
    }
    return s;
}

CubeMorphismSpec CubeMorphismSpec::identity(int n) {
    CubeMorphismSpec s;
    s.m = s.n = n;
    for (int j = 0; j < n; ++j) s.outs.push_back({Tag::Coord, j});
    return s;
}

CubeMorphismSpec CubeMorphismSpec::transposition(int n, int i, int j) {
    CubeMorphismSpec s = identity(n);
    std::swap(s.outs[i], s.outs[j]);
    return s;
}

CubeMorphismSpec CubeMorphismSpec::cycle(int n) {
    CubeMorphismSpec s = identity(n);
    for (int j = 0; j < n; ++j) s.outs[j].src = (j + 1) % n;
    return s;
}

CubeMorphismSpec CubeMorphismSpec::reflection(int n, int i) {
    CubeMorphismSpec s = identity(n);
    s.outs[i].tag = Tag::NegCoord;
    return s;
}

CubeMorphismSpec CubeMorphismSpec::face(int n, int i, int value) {
    CubeMorphismSpec s;
    s.m = n - 1;
    s.n = n;
    int src = 0;
    for (int j = 0; j < n; ++j) {
        if (j == i) s.outs.push_back({value ? Tag::One : Tag::Zero, 0});
        else s.outs.push_back({Tag::Coord, src++});
    }
    return s;
}

CubeMorphismSpec CubeMorphismSpec::diagonal(int n) {
    CubeMorphismSpec s;
    s.m = n - 1;
    s.n = n;
    for (int j = 0; j < n - 1; ++j) s.outs.push_back({Tag::Coord, j});
    s.outs.push_back({Tag::Coord, n - 2});
    return s;
}

CubeMorphismSpec CubeMorphismSpec::degeneration(int n) {
    CubeMorphismSpec s;
    s.m = n + 1;
    s.n = n;
    for (int j = 0; j < n; ++j) s.outs.push_back({Tag::Coord, j});
    return s;
}

std::vector<Face> faces(int n, int d) {
    std::vector<Face> out;
    std::uint32_t full = (1u << n) - 1;
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
        if (popcount(mask) != d) continue;
        std::uint32_t fixed = full & ~mask;
        // iterate over assignments of the fixed coordinates
        for (std::uint32_t val = fixed;; val = (val - 1) & fixed) {
            Face f;
            f.free_mask = mask;
            f.fixed_values = val;
            for (std::uint32_t u = 0; u < (1u << d); ++u) {
                std::uint32_t v = val;
                int bit = 0;
                for (int j = 0; j < n; ++j)
                    if (mask >> j & 1u) v |= ((u >> bit++) & 1u) << j;
                f.verts.push_back(v);
            }
            out.push_back(std::move(f));
            if (val == 0) break;
        }
    }
    return out;
}

} // namespace nilcube
