#include "nilcube/space.hpp"

#include <algorithm>

namespace nilcube {

unsigned bits_for(std::size_t points) {
    unsigned b = 1;
    while ((std::size_t(1) << b) < points) ++b;
    return b;
}

void require_packable(std::size_t points, int n) {
    if (n < 0 || n > 6 || bits_for(points) * (1u << n) > 64)
        throw Error(ErrorKind::Budget, "cubes of dimension " + std::to_string(n) + " over " + std::to_string(points) +
                                           " points exceed the 64-bit cube encoding");
}

Cubespace::Cubespace(std::vector<std::string> labels, int nmax)
    : labels_(std::move(labels)), nmax_(nmax), bits_(bits_for(labels_.size())) {
    if (labels_.empty()) throw Error(ErrorKind::Structural, "cubespace without points");
    if (nmax < 0) throw Error(ErrorKind::Config, "negative dimension bound");
    for (int n = 0; n <= nmax; ++n) require_packable(labels_.size(), n);
    mask_ = (Key(1) << bits_) - 1;
    cubes_.resize(nmax + 1);
}

std::optional<Point> Cubespace::find_label(const std::string& s) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == s) return static_cast<Point>(i);
    return std::nullopt;
}

void Cubespace::set_cubes(int n, std::vector<Key> keys) {
    if (n < 0 || n > nmax_) throw Error(ErrorKind::Config, "dimension outside the stored range");
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    cubes_[n] = std::move(keys);
}

Key Cubespace::pack(int n, const Point* f) const {
    Key k = 0;
    std::uint32_t V = 1u << n;
    for (std::uint32_t v = 0; v < V; ++v) k = (k << bits_) | f[v];
    return k;
}

void Cubespace::unpack(int n, Key k, Point* out) const {
    std::uint32_t V = 1u << n;
    for (std::uint32_t v = V; v-- > 0;) {
        out[v] = static_cast<Point>(k & mask_);
        k >>= bits_;
    }
}

std::vector<Point> Cubespace::unpack(int n, Key k) const {
    std::vector<Point> f(std::size_t(1) << n);
    unpack(n, k, f.data());
    return f;
}

bool Cubespace::contains_key(int n, Key k) const {
    if (n < 0 || n > nmax_) throw Error(ErrorKind::Config, "dimension " + std::to_string(n) + " not stored");
    return std::binary_search(cubes_[n].begin(), cubes_[n].end(), k);
}

std::optional<std::size_t> Cubespace::index_of(int n, Key k) const {
    auto& c = cubes_.at(n);
    auto it = std::lower_bound(c.begin(), c.end(), k);
    if (it == c.end() || *it != k) return std::nullopt;
    return static_cast<std::size_t>(it - c.begin());
}

std::pair<std::size_t, std::size_t> Cubespace::prefix_range(int n, const Point* prefix, int len) const {
    return prefix_range(n, prefix, len, 0, cubes_.at(n).size());
}

std::pair<std::size_t, std::size_t> Cubespace::prefix_range(int n, const Point* prefix, int len, std::size_t lo,
                                                            std::size_t hi) const {
    auto& c = cubes_.at(n);
    if (len == 0) return {lo, hi};
    unsigned __int128 p = 0;
    for (int j = 0; j < len; ++j) p = (p << bits_) | prefix[j];
    unsigned shift = bits_ * ((1u << n) - len);
    unsigned __int128 a = p << shift, b = (p + 1) << shift;
    auto first = std::lower_bound(c.begin() + lo, c.begin() + hi, static_cast<Key>(a));
    auto last = b > static_cast<unsigned __int128>(~Key(0)) ? c.begin() + hi
                                                               : std::lower_bound(first, c.begin() + hi, static_cast<Key>(b));
    return {static_cast<std::size_t>(first - c.begin()), static_cast<std::size_t>(last - c.begin())};
}

std::vector<std::vector<Point>> Cubespace::cube_list(int n) const {
    std::vector<std::vector<Point>> out;
    out.reserve(cubes_.at(n).size());
    for (Key k : cubes_[n]) out.push_back(unpack(n, k));
    return out;
}

} // namespace nilcube
